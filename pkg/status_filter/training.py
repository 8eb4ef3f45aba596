"""Learn the conditional status table from coded responses and linguistic annotations."""
from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .coding import CodedResponse, CodingSummary, code_responses
from .corpus import DialogueCorpus, ParticipantResponse
from .status import (
    ROW_KEYS,
    STATUSES,
    ConditionalStatusTable,
    DialogueId,
    ObjectId,
    RowKey,
    row_index,
    row_label,
)

log = logging.getLogger(__name__)

_SHAPE = (len(ROW_KEYS), len(STATUSES))


@dataclass(frozen=True)
class Exclusions:
    excluded_objects: frozenset[ObjectId] = frozenset()
    excluded_dialogues: frozenset[DialogueId] = frozenset()

    @classmethod
    def of(cls, objects: Iterable[ObjectId] = (), dialogues: Iterable[DialogueId] = ()) -> Exclusions:
        return cls(frozenset(objects), frozenset(dialogues))

    def excludes(self, dialogue: DialogueId, obj: ObjectId) -> bool:
        return dialogue in self.excluded_dialogues or obj in self.excluded_objects


NO_EXCLUSIONS = Exclusions()


@dataclass
class TransitionCounts:
    """9x3 integer counts keyed like the status table.

    `by_source` records how many increments each (dialogue, object) contributed.
    """

    counts: np.ndarray = field(default_factory=lambda: np.zeros(_SHAPE, dtype=np.int64))
    by_source: Counter[tuple[DialogueId, ObjectId]] = field(default_factory=Counter)
    missing_pairs: list[tuple[DialogueId, int]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def merge(self, other: TransitionCounts) -> None:
        self.counts += other.counts
        self.by_source.update(other.by_source)
        self.missing_pairs.extend(other.missing_pairs)


def _status_counts(group: Sequence[CodedResponse], obj: ObjectId) -> np.ndarray:
    v = np.zeros(len(STATUSES), dtype=np.int64)
    for c in group:
        v[c.labels[obj].column] += 1
    return v


def _count_pair(
    corpus: DialogueCorpus,
    dialogue: DialogueId,
    t: int,
    before: Sequence[CodedResponse],
    after: Sequence[CodedResponse],
    excl: Exclusions,
) -> TransitionCounts:
    part = TransitionCounts()
    for obj in corpus.objects:
        if excl.excludes(dialogue, obj):
            continue
        a = _status_counts(before, obj)
        b = _status_counts(after, obj)
        ling = corpus.linguistic_status(obj, dialogue, t)
        # every (before, after) participant pair adds one to ((s_before, L_t), s_after)
        for prev in STATUSES:
            part.counts[row_index(prev, ling)] += a[prev.column] * b
        part.by_source[(dialogue, obj)] += int(a.sum() * b.sum())
    return part


def count_transitions(
    corpus: DialogueCorpus,
    coded: Iterable[CodedResponse],
    excl: Exclusions = NO_EXCLUSIONS,
) -> TransitionCounts:
    groups: dict[tuple[DialogueId, int], list[CodedResponse]] = defaultdict(list)
    for c in coded:
        groups[(c.dialogue, c.prefix_len)].append(c)

    result = TransitionCounts()
    for d in corpus.dialogues:
        if d.id in excl.excluded_dialogues:
            continue
        for t in range(2, len(d) + 1):
            before = groups.get((d.id, t - 1), [])
            after = groups.get((d.id, t), [])
            if not before or not after:
                result.missing_pairs.append((d.id, t))
                log.warning("No adjacent data for %s utterances %d-%d.", d.id, t - 1, t)
                continue
            result.merge(_count_pair(corpus, d.id, t, before, after, excl))
    return result


def normalize_counts(c: TransitionCounts | np.ndarray, alpha: float = 0.0) -> ConditionalStatusTable:
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    counts = c.counts if isinstance(c, TransitionCounts) else np.asarray(c, dtype=np.int64)

    probs = np.empty(_SHAPE, dtype=np.float64)
    fallback: list[RowKey] = []
    for i, key in enumerate(ROW_KEYS):
        row = counts[i].astype(np.float64) + alpha
        total = row.sum()
        if total == 0.0:
            probs[i] = 1.0 / len(STATUSES)
            fallback.append(key)
        else:
            probs[i] = row / total

    if fallback:
        log.warning("Rows with no data set to uniform: %s", ", ".join(row_label(k) for k in fallback))
    return ConditionalStatusTable(probs, counts=counts, fallback_rows=tuple(fallback), alpha=float(alpha))


@dataclass(frozen=True)
class TrainingResult:
    table: ConditionalStatusTable
    counts: TransitionCounts
    coding: CodingSummary


def fit(
    corpus: DialogueCorpus,
    responses: Iterable[ParticipantResponse],
    excl: Exclusions = NO_EXCLUSIONS,
    alpha: float = 0.0,
) -> TrainingResult:
    coding = code_responses(responses, corpus.objects)
    return fit_coded(corpus, coding, excl, alpha)


def fit_coded(
    corpus: DialogueCorpus,
    coding: CodingSummary,
    excl: Exclusions = NO_EXCLUSIONS,
    alpha: float = 0.0,
) -> TrainingResult:
    counts = count_transitions(corpus, coding.coded, excl)
    log.debug("Counted %d transitions (%d missing pairs).", counts.total, len(counts.missing_pairs))
    return TrainingResult(normalize_counts(counts, alpha), counts, coding)


def train(
    corpus: DialogueCorpus,
    responses: Iterable[ParticipantResponse],
    excl: Exclusions = NO_EXCLUSIONS,
    alpha: float = 0.0,
) -> ConditionalStatusTable:
    return fit(corpus, responses, excl, alpha).table
