"""Statuses, distributions over statuses, and the conditional status table."""
from __future__ import annotations

import math
from dataclasses import InitVar, dataclass
from enum import Enum
from functools import total_ordering
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import defaults
from .errors import AllZeroWeights

ObjectId = str
DialogueId = str
UtteranceIndex = int


@total_ordering
class CognitiveStatus(Enum):
    IN_FOCUS = "I"
    ACTIVATED = "A"
    FAMILIAR = "F"

    @property
    def column(self) -> int:
        return _STATUS_COLUMN[self]

    @property
    def rank(self) -> int:
        # Givenness order: Familiar < Activated < In Focus
        return 2 - _STATUS_COLUMN[self]

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, CognitiveStatus):
            return NotImplemented
        return self.rank < other.rank


class LinguisticStatus(Enum):
    NOT_MENTIONED = "N"
    MENTIONED_NON_TOPIC = "M"
    MENTIONED_TOPIC = "T"

    @property
    def column(self) -> int:
        return _LINGUISTIC_COLUMN[self]


STATUSES: tuple[CognitiveStatus, ...] = (
    CognitiveStatus.IN_FOCUS,
    CognitiveStatus.ACTIVATED,
    CognitiveStatus.FAMILIAR,
)
LINGUISTIC_STATUSES: tuple[LinguisticStatus, ...] = (
    LinguisticStatus.NOT_MENTIONED,
    LinguisticStatus.MENTIONED_NON_TOPIC,
    LinguisticStatus.MENTIONED_TOPIC,
)

_STATUS_COLUMN = {s: i for i, s in enumerate(STATUSES)}
_LINGUISTIC_COLUMN = {l: i for i, l in enumerate(LINGUISTIC_STATUSES)}

RowKey = tuple[CognitiveStatus, LinguisticStatus]

# canonical row order: (I,N),(I,M),(I,T),(A,N),...,(F,T)
ROW_KEYS: tuple[RowKey, ...] = tuple((s, l) for s in STATUSES for l in LINGUISTIC_STATUSES)


def row_index(prev: CognitiveStatus, ling: LinguisticStatus) -> int:
    return prev.column * len(LINGUISTIC_STATUSES) + ling.column


def row_label(key: RowKey) -> str:
    return f"({key[0].value},{key[1].value})"


@dataclass(frozen=True)
class StatusDistribution:
    p_i: float
    p_a: float
    p_f: float

    def __post_init__(self) -> None:
        values = (self.p_i, self.p_a, self.p_f)
        for v in values:
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"probabilities must be finite and non-negative, got {values}")
        total = math.fsum(values)
        if abs(total - 1.0) > defaults.SUM_TOLERANCE:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")

    @classmethod
    def of(cls, values: Sequence[float]) -> StatusDistribution:
        if len(values) != 3:
            raise ValueError(f"expected 3 probabilities, got {len(values)}")
        return cls(float(values[0]), float(values[1]), float(values[2]))

    @classmethod
    def uniform(cls) -> StatusDistribution:
        return cls.of(defaults.UNIFORM_PRIOR)

    @classmethod
    def one_hot(cls, status: CognitiveStatus) -> StatusDistribution:
        values = [0.0, 0.0, 0.0]
        values[status.column] = 1.0
        return cls.of(values)

    def __getitem__(self, status: CognitiveStatus) -> float:
        return self.as_tuple()[status.column]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_i, self.p_a, self.p_f)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=np.float64)

    def items(self) -> Iterator[tuple[CognitiveStatus, float]]:
        return zip(STATUSES, self.as_tuple())

    def as_dict(self) -> dict[str, float]:
        return {s.value: p for s, p in self.items()}


def normalize(weights: Sequence[float] | np.ndarray) -> StatusDistribution:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (3,):
        raise ValueError(f"expected 3 weights, got shape {w.shape}")
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise ValueError(f"weights must be finite and non-negative, got {w.tolist()}")
    total = float(w.sum())
    if total <= 0.0:
        raise AllZeroWeights(f"cannot normalize all-zero weights {w.tolist()}")
    return StatusDistribution.of((w / total).tolist())


def argmax_status(d: StatusDistribution) -> CognitiveStatus:
    """Most probable status; ties go to the lower Givenness status (F before A before I)."""
    best = max(d.as_tuple())
    tied = [s for s, p in d.items() if p == best]
    return min(tied, key=lambda s: s.rank)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ConditionalStatusTable:
    """p(S_t | S_{t-1}, L_t) as 9 rows over (I, A, F), rows in ROW_KEYS order.

    `counts` keeps the raw transition counts the rows were normalized from, when known.
    `fallback_rows` lists rows that had no data and were set to uniform.
    """

    probabilities: np.ndarray
    counts: np.ndarray | None = None
    fallback_rows: tuple[RowKey, ...] = ()
    alpha: float | None = None
    tolerance: InitVar[float] = defaults.SUM_TOLERANCE

    def __post_init__(self, tolerance: float) -> None:
        probs = np.array(self.probabilities, dtype=np.float64, copy=True)
        if probs.shape != (len(ROW_KEYS), len(STATUSES)):
            raise ValueError(f"table must be 9x3, got shape {probs.shape}")
        if np.any(probs < 0.0) or not np.all(np.isfinite(probs)):
            raise ValueError("table entries must be finite and non-negative")
        sums = probs.sum(axis=1)
        bad = [row_label(ROW_KEYS[i]) for i, s in enumerate(sums) if abs(s - 1.0) > tolerance]
        if bad:
            raise ValueError(f"rows do not sum to 1: {', '.join(bad)}")
        object.__setattr__(self, "probabilities", _frozen(probs))

        if self.counts is not None:
            counts = np.array(self.counts, dtype=np.int64, copy=True)
            if counts.shape != probs.shape:
                raise ValueError(f"counts must be 9x3, got shape {counts.shape}")
            if np.any(counts < 0):
                raise ValueError("counts must be non-negative")
            object.__setattr__(self, "counts", _frozen(counts))
        object.__setattr__(self, "fallback_rows", tuple(self.fallback_rows))

    @classmethod
    def uniform(cls) -> ConditionalStatusTable:
        return cls(np.full((len(ROW_KEYS), len(STATUSES)), 1.0 / 3.0))

    @classmethod
    def from_rows(cls, rows: Mapping[RowKey, Sequence[float]]) -> ConditionalStatusTable:
        missing = [row_label(k) for k in ROW_KEYS if k not in rows]
        if missing:
            raise ValueError(f"missing rows: {', '.join(missing)}")
        return cls(np.array([list(rows[k]) for k in ROW_KEYS], dtype=np.float64))

    def row(self, prev: CognitiveStatus, ling: LinguisticStatus) -> StatusDistribution:
        values = self.probabilities[row_index(prev, ling)]
        if abs(math.fsum(values) - 1.0) > defaults.SUM_TOLERANCE:
            # rows read from disk may be off by up to READ_ROW_TOLERANCE
            return normalize(values)
        return StatusDistribution.of(values.tolist())

    def matrix_for(self, ling: LinguisticStatus) -> np.ndarray:
        """3x3 slice: entry [s_prev, s] = p(s | s_prev, ling)."""
        return self.probabilities[[row_index(s, ling) for s in STATUSES]]

    def row_sums(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConditionalStatusTable):
            return NotImplemented
        if (self.counts is None) != (other.counts is None):
            return False
        if self.counts is not None and not np.array_equal(self.counts, other.counts):
            return False
        return (
            np.array_equal(self.probabilities, other.probabilities)
            and self.fallback_rows == other.fallback_rows
            and self.alpha == other.alpha
        )

    __hash__ = None  # type: ignore[assignment]


def table_row(t: ConditionalStatusTable, prev: CognitiveStatus, ling: LinguisticStatus) -> StatusDistribution:
    return t.row(prev, ling)
