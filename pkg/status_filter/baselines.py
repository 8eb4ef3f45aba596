"""Rule-based FSM and seeded random baselines."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import defaults
from .status import (
    LINGUISTIC_STATUSES,
    ROW_KEYS,
    STATUSES,
    CognitiveStatus,
    ConditionalStatusTable,
    LinguisticStatus,
    RowKey,
    row_index,
)

I = CognitiveStatus.IN_FOCUS
A = CognitiveStatus.ACTIVATED
F = CognitiveStatus.FAMILIAR


class DecayPolicy(Enum):
    DECAY_ONE = "decay-one"
    PERSIST = "persist"


_DECAY_ONE = {I: A, A: F, F: F}


@dataclass(frozen=True)
class FsmTransitionTable:
    transitions: Mapping[RowKey, CognitiveStatus]
    decay_policy: DecayPolicy

    def __post_init__(self) -> None:
        missing = [k for k in ROW_KEYS if k not in self.transitions]
        if missing:
            raise ValueError(f"FSM table is not total; missing {len(missing)} transition(s)")
        object.__setattr__(self, "transitions", MappingProxyType(dict(self.transitions)))

    @classmethod
    def default(cls, policy: DecayPolicy = DecayPolicy.DECAY_ONE) -> FsmTransitionTable:
        """Topic mention → In Focus, any other mention → Activated, no mention decays or persists."""
        transitions: dict[RowKey, CognitiveStatus] = {}
        for s in STATUSES:
            transitions[(s, LinguisticStatus.MENTIONED_TOPIC)] = I
            transitions[(s, LinguisticStatus.MENTIONED_NON_TOPIC)] = A
            transitions[(s, LinguisticStatus.NOT_MENTIONED)] = (
                _DECAY_ONE[s] if policy is DecayPolicy.DECAY_ONE else s
            )
        return cls(transitions, policy)

    def next(self, state: CognitiveStatus, ling: LinguisticStatus) -> CognitiveStatus:
        return self.transitions[(state, ling)]


def one_hot_table(fsm: FsmTransitionTable) -> ConditionalStatusTable:
    """Conditional status table that puts all mass on the FSM's next state."""
    probs = np.zeros((len(ROW_KEYS), len(STATUSES)), dtype=np.float64)
    for prev in STATUSES:
        for ling in LINGUISTIC_STATUSES:
            probs[row_index(prev, ling), fsm.next(prev, ling).column] = 1.0
    return ConditionalStatusTable(probs)


@dataclass
class FsmModel:
    state: CognitiveStatus
    table: FsmTransitionTable

    def step(self, ling: LinguisticStatus) -> CognitiveStatus:
        self.state = self.table.next(self.state, ling)
        return self.state


def fsm_init(
    start: CognitiveStatus = CognitiveStatus.FAMILIAR,
    policy: DecayPolicy = DecayPolicy.DECAY_ONE,
) -> FsmModel:
    return FsmModel(state=start, table=FsmTransitionTable.default(policy))


def fsm_step(m: FsmModel, ling: LinguisticStatus) -> CognitiveStatus:
    return m.step(ling)


@dataclass
class RandomBaseline:
    rng_seed: int
    fold: int | None = None
    _rng: np.random.Generator = field(init=False, repr=False)

    algorithm = defaults.RNG_ALGORITHM

    def __post_init__(self) -> None:
        if self.rng_seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.rng_seed}")
        # one independent stream per fold, all derived from the master seed
        spawn_key = () if self.fold is None else (self.fold,)
        seq = np.random.SeedSequence(entropy=self.rng_seed, spawn_key=spawn_key)
        self._rng = np.random.Generator(np.random.PCG64(seq))

    def predict(self) -> CognitiveStatus:
        return STATUSES[int(self._rng.integers(len(STATUSES)))]


def random_predict(b: RandomBaseline) -> CognitiveStatus:
    return b.predict()
