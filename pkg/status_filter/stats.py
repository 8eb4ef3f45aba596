"""Prediction vectors, accuracy, paired-model contingency, McNemar's test and Fleiss' kappa."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special
from scipy.stats import chi2 as chi2_dist
from statsmodels.stats.contingency_tables import mcnemar as sm_mcnemar
from statsmodels.stats.inter_rater import fleiss_kappa as sm_fleiss_kappa

from . import defaults
from .errors import EmptyVector, KeyMismatch
from .status import CognitiveStatus, DialogueId, ObjectId

log = logging.getLogger(__name__)

EntryKey = tuple[DialogueId, int, ObjectId]


@dataclass(frozen=True)
class PredictionEntry:
    dialogue: DialogueId
    index: int
    object: ObjectId
    predicted: CognitiveStatus
    gold: CognitiveStatus | None
    excluded: str | None = None

    @property
    def key(self) -> EntryKey:
        return (self.dialogue, self.index, self.object)

    @property
    def scored(self) -> bool:
        return self.gold is not None and self.excluded is None

    @property
    def correct(self) -> bool | None:
        if not self.scored:
            return None
        return self.predicted == self.gold


@dataclass(frozen=True)
class PredictionVector:
    model: str
    entries: tuple[PredictionEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def keys(self) -> tuple[EntryKey, ...]:
        return tuple(e.key for e in self.entries)

    @property
    def scored(self) -> tuple[PredictionEntry, ...]:
        return tuple(e for e in self.entries if e.scored)

    @property
    def n_correct(self) -> int:
        return sum(1 for e in self.scored if e.correct)

    @property
    def n_excluded(self) -> int:
        return len(self.entries) - len(self.scored)


def accuracy(v: PredictionVector) -> float:
    scored = v.scored
    if not scored:
        raise EmptyVector(f"{v.model}: no scored predictions")
    return round(100.0 * v.n_correct / len(scored), 2)


@dataclass(frozen=True)
class ContingencyTable2x2:
    n_ss: int
    n_sf: int
    n_fs: int
    n_ff: int

    @property
    def total(self) -> int:
        return self.n_ss + self.n_sf + self.n_fs + self.n_ff

    def swapped(self) -> ContingencyTable2x2:
        return ContingencyTable2x2(self.n_ss, self.n_fs, self.n_sf, self.n_ff)

    def as_matrix(self) -> list[list[int]]:
        return [[self.n_ss, self.n_sf], [self.n_fs, self.n_ff]]


def contingency(v1: PredictionVector, v2: PredictionVector) -> ContingencyTable2x2:
    """Joint success/failure counts over keys scored in both vectors."""
    if v1.keys() != v2.keys():
        raise KeyMismatch(f"{v1.model} and {v2.model} do not cover the same keys")

    n = {"ss": 0, "sf": 0, "fs": 0, "ff": 0}
    for a, b in zip(v1.entries, v2.entries):
        if not (a.scored and b.scored):
            continue
        n[("s" if a.correct else "f") + ("s" if b.correct else "f")] += 1
    return ContingencyTable2x2(n["ss"], n["sf"], n["fs"], n["ff"])


def chi_square_sf(x: float, df: int = 1) -> float:
    """Upper tail of the chi-square distribution; df=1 uses erfc(sqrt(x/2))."""
    if x < 0 or math.isnan(x):
        raise ValueError(f"chi-square statistic must be >= 0, got {x}")
    if df == 1:
        return float(special.erfc(math.sqrt(x / 2.0)))
    return float(chi2_dist.sf(x, df))


@dataclass(frozen=True)
class McNemarResult:
    chi2: float
    p: float
    no_discordant: bool = False
    exact: bool = False


def mcnemar(t: ContingencyTable2x2, *, exact: bool = False) -> McNemarResult:
    b, c = t.n_sf, t.n_fs
    if b + c == 0:
        log.info("No discordant pairs; chi2 set to 0.")
        return McNemarResult(0.0, 1.0, no_discordant=True, exact=exact)

    # continuity-corrected (|b - c| - 1)^2 / (b + c), not floored at zero
    stat = float(sm_mcnemar(t.as_matrix(), exact=False, correction=True).statistic)
    if exact:
        # binomial test on the discordant pairs
        p = float(sm_mcnemar(t.as_matrix(), exact=True).pvalue)
    else:
        p = chi_square_sf(stat, 1)
    return McNemarResult(stat, p, exact=exact)


def format_p(p: float) -> str:
    if p < defaults.P_DISPLAY_FLOOR:
        return f"<{defaults.P_DISPLAY_FLOOR:.4f}"
    return f"{p:.4f}"


@dataclass(frozen=True)
class AgreementResult:
    kappa: float
    degenerate: bool = False


def fleiss_kappa(assignments: Sequence[Sequence[int]] | np.ndarray) -> AgreementResult:
    """Fleiss' kappa over an items x categories matrix of rater counts."""
    table = np.asarray(assignments)
    if table.ndim != 2 or table.shape[0] == 0 or table.shape[1] < 2:
        raise ValueError(f"expected a non-empty items x categories matrix, got shape {table.shape}")
    if np.any(table < 0) or not np.all(np.equal(np.mod(table, 1), 0)):
        raise ValueError("rater counts must be non-negative integers")

    raters = table.sum(axis=1)
    if np.any(raters != raters[0]):
        raise ValueError("every item must be rated by the same number of raters")
    if raters[0] < 2:
        raise ValueError("need at least 2 raters per item")

    if np.count_nonzero(table.sum(axis=0)) == 1:
        log.warning("Every rating falls in one category; kappa set to 1.")
        return AgreementResult(1.0, degenerate=True)

    return AgreementResult(float(sm_fleiss_kappa(table.astype(np.float64), method="fleiss")))
