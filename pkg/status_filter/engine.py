"""Cognitive Status Filter and the engine that keeps one filter per familiar object."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import DuplicateObject
from .status import (
    ConditionalStatusTable,
    CognitiveStatus,
    DialogueId,
    LinguisticStatus,
    ObjectId,
    StatusDistribution,
    UtteranceIndex,
    argmax_status,
    normalize,
)

log = logging.getLogger(__name__)


class UpdateMode(Enum):
    SOFT = "soft"
    HARD = "hard"


class Familiarity(Enum):
    NOT_FAMILIAR = "not-familiar"


NOT_FAMILIAR = Familiarity.NOT_FAMILIAR


@dataclass(frozen=True)
class UtteranceObservation:
    dialogue: DialogueId
    index: UtteranceIndex
    mentions: Mapping[ObjectId, LinguisticStatus] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"utterance index must be >= 1, got {self.index}")
        for obj, ling in self.mentions.items():
            if ling is LinguisticStatus.NOT_MENTIONED:
                raise ValueError(f"{obj}: only mentioned objects belong in an observation")
        object.__setattr__(self, "mentions", MappingProxyType(dict(self.mentions)))

    def status_of(self, obj: ObjectId) -> LinguisticStatus:
        return self.mentions.get(obj, LinguisticStatus.NOT_MENTIONED)


def predict_weights(
    belief: StatusDistribution,
    ling: LinguisticStatus,
    table: ConditionalStatusTable,
) -> np.ndarray:
    """Unnormalized soft update: sum over s' of belief(s') * p(s | s', ling)."""
    return belief.as_array() @ table.matrix_for(ling)


@dataclass
class CognitiveStatusFilter:
    object: ObjectId
    belief: StatusDistribution
    table: ConditionalStatusTable
    mode: UpdateMode = UpdateMode.SOFT
    step: int = 0

    def update(self, ling: LinguisticStatus) -> StatusDistribution:
        if self.mode is UpdateMode.HARD:
            new_belief = self.table.row(argmax_status(self.belief), ling)
        else:
            new_belief = normalize(predict_weights(self.belief, ling, self.table))
        self.belief = new_belief
        self.step += 1
        return new_belief

    @property
    def status(self) -> CognitiveStatus:
        return argmax_status(self.belief)


def init_filter(
    obj: ObjectId,
    prior: StatusDistribution,
    table: ConditionalStatusTable,
    mode: UpdateMode = UpdateMode.SOFT,
) -> CognitiveStatusFilter:
    return CognitiveStatusFilter(object=obj, belief=prior, table=table, mode=mode, step=0)


def update(f: CognitiveStatusFilter, ling: LinguisticStatus) -> StatusDistribution:
    return f.update(ling)


@dataclass(frozen=True)
class StatusQuery:
    status: CognitiveStatus | Familiarity
    belief: StatusDistribution | None

    @property
    def familiar(self) -> bool:
        return self.belief is not None


@dataclass
class StatusEngine:
    """One filter per object modeled as Familiar or higher; no filter means not familiar."""

    prior: StatusDistribution
    table: ConditionalStatusTable
    mode: UpdateMode = UpdateMode.SOFT
    filters: dict[ObjectId, CognitiveStatusFilter] = field(default_factory=dict)

    def _create(self, obj: ObjectId) -> CognitiveStatusFilter:
        f = init_filter(obj, self.prior, self.table, self.mode)
        self.filters[obj] = f
        return f

    def register_familiar(self, obj: ObjectId) -> None:
        if obj in self.filters:
            raise DuplicateObject(f"object already has a filter: {obj}")
        self._create(obj)

    def observe_utterance(self, obs: UtteranceObservation) -> dict[ObjectId, StatusDistribution]:
        for obj in obs.mentions:
            if obj not in self.filters:
                log.debug("%s becomes familiar by mention in %s/%d", obj, obs.dialogue, obs.index)
                self._create(obj)

        return {obj: f.update(obs.status_of(obj)) for obj, f in self.filters.items()}

    def query_status(self, obj: ObjectId) -> StatusQuery:
        f = self.filters.get(obj)
        if f is None:
            return StatusQuery(NOT_FAMILIAR, None)
        return StatusQuery(argmax_status(f.belief), f.belief)

    def beliefs(self) -> dict[ObjectId, StatusDistribution]:
        return {obj: f.belief for obj, f in self.filters.items()}
