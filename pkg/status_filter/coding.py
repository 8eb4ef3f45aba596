"""Turn Q1/Q2 clicks into per-object statuses, and tally them into majority gold labels."""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Collection, Iterable, Mapping

from .corpus import DialogueCorpus, ParticipantResponse
from .errors import DanglingReference, UnknownObject
from .status import STATUSES, CognitiveStatus, DialogueId, ObjectId

log = logging.getLogger(__name__)

CellKey = tuple[DialogueId, int, ObjectId]


def code_response(r: ParticipantResponse, objects: Collection[ObjectId]) -> dict[ObjectId, CognitiveStatus]:
    """q1 → InFocus (even when missing from q2), rest of q2 → Activated, unclicked → Familiar."""
    scene = set(objects)
    for clicked in (r.q1, *r.q2):
        if clicked not in scene:
            raise UnknownObject(f"{r.participant}: clicked object not in scene: {clicked}")

    coded = {obj: CognitiveStatus.FAMILIAR for obj in objects}
    for obj in r.q2:
        coded[obj] = CognitiveStatus.ACTIVATED
    coded[r.q1] = CognitiveStatus.IN_FOCUS
    return coded


def q1_outside_q2(r: ParticipantResponse) -> bool:
    return r.q1 not in r.q2


@dataclass(frozen=True)
class CodedResponse:
    participant: str
    dialogue: DialogueId
    prefix_len: int
    labels: Mapping[ObjectId, CognitiveStatus]


@dataclass(frozen=True)
class CodingSummary:
    coded: tuple[CodedResponse, ...]
    dropped_failed_checks: int = 0
    q1_outside_q2: int = 0


def code_responses(responses: Iterable[ParticipantResponse], objects: Collection[ObjectId]) -> CodingSummary:
    coded: list[CodedResponse] = []
    dropped = 0
    inconsistent = 0
    for r in responses:
        if not r.passed_check:
            dropped += 1
            continue
        if q1_outside_q2(r):
            inconsistent += 1
        coded.append(CodedResponse(r.participant, r.dialogue, r.prefix_len, code_response(r, objects)))

    if dropped:
        log.info("Dropped %d response(s) that failed the attention check.", dropped)
    if inconsistent:
        log.info("%d response(s) clicked a Q1 object missing from Q2; coded as in focus.", inconsistent)
    return CodingSummary(tuple(coded), dropped, inconsistent)


def majority_status(votes: Mapping[CognitiveStatus, int]) -> tuple[CognitiveStatus, bool]:
    """Winner of a vote tally plus whether it was a tie; ties go to the lower status."""
    best = max(votes.get(s, 0) for s in STATUSES)
    tied = [s for s in STATUSES if votes.get(s, 0) == best]
    return min(tied, key=lambda s: s.rank), len(tied) > 1


@dataclass(frozen=True)
class GoldLabel:
    status: CognitiveStatus
    votes: tuple[int, int, int]
    n_participants: int
    tied: bool = False


@dataclass(frozen=True)
class GoldLabelTable:
    labels: Mapping[CellKey, GoldLabel]
    empty_cells: tuple[CellKey, ...] = ()
    dropped_failed_checks: int = 0
    q1_outside_q2: int = 0

    def get(self, key: CellKey) -> GoldLabel | None:
        return self.labels.get(key)

    @property
    def tied_cells(self) -> tuple[CellKey, ...]:
        return tuple(k for k, g in self.labels.items() if g.tied)


def build_gold_labels(responses: Iterable[ParticipantResponse], corpus: DialogueCorpus) -> GoldLabelTable:
    return tally_gold_labels(code_responses(responses, corpus.objects), corpus)


def tally_gold_labels(summary: CodingSummary, corpus: DialogueCorpus) -> GoldLabelTable:
    dialogues = set(corpus.dialogue_ids())
    tallies: dict[CellKey, Counter[CognitiveStatus]] = {}
    for c in summary.coded:
        if c.dialogue not in dialogues:
            raise DanglingReference(f"{c.participant}: unknown dialogue {c.dialogue}")
        for obj, status in c.labels.items():
            tallies.setdefault((c.dialogue, c.prefix_len, obj), Counter())[status] += 1

    labels: dict[CellKey, GoldLabel] = {}
    empty: list[CellKey] = []
    for key in corpus.cells():
        votes = tallies.get(key)
        if not votes:
            empty.append(key)
            continue
        status, tied = majority_status(votes)
        counts = tuple(votes.get(s, 0) for s in STATUSES)
        labels[key] = GoldLabel(status, counts, sum(counts), tied)  # type: ignore[arg-type]

    if empty:
        log.warning("%d gold cell(s) have no responses.", len(empty))
    return GoldLabelTable(labels, tuple(empty), summary.dropped_failed_checks, summary.q1_outside_q2)
