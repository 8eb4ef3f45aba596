"""JSON file formats: corpus, responses, table and report.

Parsers validate and reject; nothing is coerced or repaired. Writers emit two-space indented
JSON with fields in declared order and a trailing newline, so equal values give equal bytes.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, StrictBool, StrictFloat, StrictInt, StrictStr, ValidationError

from . import defaults
from .corpus import DialogueCorpus, ResponsesFile
from .errors import (
    DanglingReference,
    DuplicateMention,
    DuplicateRecord,
    InputError,
    PrefixOutOfRange,
    RowSumError,
    SchemaError,
)
from .stats import PredictionEntry, PredictionVector
from .status import ROW_KEYS, CognitiveStatus, ConditionalStatusTable, row_label

log = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)

Probability = Annotated[StrictFloat, Field(ge=0.0, le=1.0)]
Count = Annotated[StrictInt, Field(ge=0)]
StatusSymbol = Literal["I", "A", "F"]
LinguisticSymbol = Literal["N", "M", "T"]


def _reject_constant(name: str) -> Any:
    raise ValueError(f"non-finite number {name} is not allowed")


def _load_json(data: bytes | str) -> Any:
    try:
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    except UnicodeDecodeError as e:
        raise SchemaError("", f"not valid UTF-8: {e}") from None
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except ValueError as e:
        raise SchemaError("", f"invalid JSON: {e}") from None


def _validate(model: type[M], payload: Any) -> M:
    try:
        return model.model_validate(payload)
    except ValidationError as e:
        err = e.errors()[0]
        raise SchemaError(".".join(str(p) for p in err["loc"]), err["msg"]) from None


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def read_bytes(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None


def write_text(path: str | Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror or e}") from None


# --- corpus -------------------------------------------------------------------------------


def parse_corpus(data: bytes | str) -> DialogueCorpus:
    corpus = _validate(DialogueCorpus, _load_json(data))

    seen_objects: set[str] = set()
    for obj in corpus.objects:
        if obj in seen_objects:
            raise DuplicateRecord(f"duplicate object id: {obj}")
        seen_objects.add(obj)

    seen_dialogues: set[str] = set()
    for di, d in enumerate(corpus.dialogues):
        if d.id in seen_dialogues:
            raise DuplicateRecord(f"duplicate dialogue id: {d.id}")
        seen_dialogues.add(d.id)

        for ui, u in enumerate(d.utterances):
            path = f"dialogues.{di}.utterances.{ui}"
            if u.index != ui + 1:
                raise SchemaError(f"{path}.index", f"expected utterance index {ui + 1}, got {u.index}")
            mentioned: set[str] = set()
            for mi, m in enumerate(u.mentions):
                if m.object not in seen_objects:
                    raise DanglingReference(f"{d.id}/{u.index}: mention of unknown object {m.object}")
                if m.object in mentioned:
                    raise DuplicateMention(f"{d.id}/{u.index}: object {m.object} mentioned twice")
                mentioned.add(m.object)
                if m.topic_votes is not None:
                    if corpus.annotators is None:
                        raise SchemaError(f"{path}.mentions.{mi}.topic_votes", "topic_votes requires annotators")
                    if m.topic_votes > corpus.annotators:
                        raise SchemaError(f"{path}.mentions.{mi}.topic_votes", "more votes than annotators")

    log.debug("Parsed corpus: %d objects, %d dialogues.", len(corpus.objects), len(corpus.dialogues))
    return corpus


def load_corpus(path: str | Path) -> DialogueCorpus:
    return parse_corpus(read_bytes(path))


# --- responses ----------------------------------------------------------------------------


def parse_responses(data: bytes | str, corpus: DialogueCorpus) -> ResponsesFile:
    parsed = _validate(ResponsesFile, _load_json(data))

    participants: set[str] = set()
    for i, r in enumerate(parsed.responses):
        if r.participant in participants:
            raise DuplicateRecord(f"duplicate participant id: {r.participant}")
        participants.add(r.participant)

        if r.dialogue not in corpus.dialogue_ids():
            raise DanglingReference(f"{r.participant}: unknown dialogue {r.dialogue}")
        n = len(corpus.dialogue(r.dialogue))
        if r.prefix_len > n:
            raise PrefixOutOfRange(f"{r.participant}: prefix_len {r.prefix_len} exceeds {r.dialogue} length {n}")
        for obj in (r.q1, *r.q2):
            if obj not in corpus.objects:
                raise DanglingReference(f"{r.participant}: clicked unknown object {obj}")
        if len(set(r.q2)) != len(r.q2):
            raise SchemaError(f"responses.{i}.q2", "duplicate object in q2")

    failed = len(parsed.failed_checks)
    if failed:
        log.info("%d response(s) failed the attention check and will be ignored.", failed)
    return parsed


def load_responses(path: str | Path, corpus: DialogueCorpus) -> ResponsesFile:
    return parse_responses(read_bytes(path), corpus)


# --- table --------------------------------------------------------------------------------


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class TableRow(_Strict):
    previous: StatusSymbol
    linguistic: LinguisticSymbol
    probabilities: tuple[Probability, Probability, Probability]
    counts: Optional[tuple[Count, Count, Count]] = None
    fallback: StrictBool = False


class TableFile(_Strict):
    format_version: Literal[1] = defaults.FORMAT_VERSION
    alpha: Optional[Annotated[StrictFloat, Field(ge=0.0)]] = None
    rows: tuple[TableRow, ...]


def write_table(t: ConditionalStatusTable) -> str:
    rows = []
    for i, key in enumerate(ROW_KEYS):
        rows.append(
            TableRow(
                previous=key[0].value,
                linguistic=key[1].value,
                probabilities=tuple(float(p) for p in t.probabilities[i]),
                counts=None if t.counts is None else tuple(int(c) for c in t.counts[i]),
                fallback=key in t.fallback_rows,
            )
        )
    return dumps(TableFile(alpha=t.alpha, rows=tuple(rows)).model_dump(mode="json"))


def read_table(data: bytes | str) -> ConditionalStatusTable:
    parsed = _validate(TableFile, _load_json(data))
    if len(parsed.rows) != len(ROW_KEYS):
        raise SchemaError("rows", f"expected {len(ROW_KEYS)} rows, got {len(parsed.rows)}")

    with_counts = {r.counts is not None for r in parsed.rows}
    if len(with_counts) > 1:
        raise SchemaError("rows", "counts must be given for every row or for none")

    fallback = []
    for i, (row, key) in enumerate(zip(parsed.rows, ROW_KEYS)):
        if (row.previous, row.linguistic) != (key[0].value, key[1].value):
            raise SchemaError(f"rows.{i}", f"expected row {row_label(key)} in canonical order")
        total = sum(row.probabilities)
        if abs(total - 1.0) > defaults.READ_ROW_TOLERANCE:
            raise RowSumError(f"row {row_label(key)} sums to {total!r}")
        if row.fallback:
            fallback.append(key)

    probs = np.array([r.probabilities for r in parsed.rows], dtype=np.float64)
    counts = None
    if with_counts == {True}:
        counts = np.array([r.counts for r in parsed.rows], dtype=np.int64)
    return ConditionalStatusTable(
        probs,
        counts=counts,
        fallback_rows=tuple(fallback),
        alpha=parsed.alpha,
        tolerance=defaults.READ_ROW_TOLERANCE,
    )


def load_table(path: str | Path) -> ConditionalStatusTable:
    return read_table(read_bytes(path))


def save_table(path: str | Path, t: ConditionalStatusTable) -> None:
    write_text(path, write_table(t))


# --- report -------------------------------------------------------------------------------


class EntryRecord(_Strict):
    dialogue: StrictStr
    index: Annotated[StrictInt, Field(ge=1)]
    object: StrictStr
    predicted: StatusSymbol
    gold: Optional[StatusSymbol] = None
    excluded: Optional[StrictStr] = None


class ModelRecord(_Strict):
    name: StrictStr
    accuracy: Optional[StrictFloat] = None
    correct: Count
    scored: Count
    excluded: Count
    entries: tuple[EntryRecord, ...]

    def to_vector(self) -> PredictionVector:
        return PredictionVector(
            self.name,
            tuple(
                PredictionEntry(
                    dialogue=e.dialogue,
                    index=e.index,
                    object=e.object,
                    predicted=CognitiveStatus(e.predicted),
                    gold=None if e.gold is None else CognitiveStatus(e.gold),
                    excluded=e.excluded,
                )
                for e in self.entries
            ),
        )


class ComparisonRecord(_Strict):
    model_1: StrictStr
    model_2: StrictStr
    n_ss: Count
    n_sf: Count
    n_fs: Count
    n_ff: Count
    chi2: StrictFloat
    p: StrictFloat
    p_display: StrictStr
    no_discordant: StrictBool = False
    exact: StrictBool = False


class GoldSummary(_Strict):
    cells: Count
    labelled: Count
    empty_cells: Count
    tied_cells: Count
    dropped_failed_checks: Count
    q1_outside_q2: Count


class ReportFile(_Strict):
    format_version: Literal[1] = defaults.FORMAT_VERSION
    rng_algorithm: StrictStr = defaults.RNG_ALGORITHM
    config: dict[str, Any]
    gold: GoldSummary
    models: tuple[ModelRecord, ...]
    comparisons: tuple[ComparisonRecord, ...] = ()

    def model(self, name: str) -> ModelRecord | None:
        for m in self.models:
            if m.name == name:
                return m
        return None


def record_vector(v: PredictionVector, accuracy: float | None) -> ModelRecord:
    return ModelRecord(
        name=v.model,
        accuracy=accuracy,
        correct=v.n_correct,
        scored=len(v.scored),
        excluded=v.n_excluded,
        entries=tuple(
            EntryRecord(
                dialogue=e.dialogue,
                index=e.index,
                object=e.object,
                predicted=e.predicted.value,
                gold=None if e.gold is None else e.gold.value,
                excluded=e.excluded,
            )
            for e in v.entries
        ),
    )


def write_report(report: ReportFile) -> str:
    return dumps(report.model_dump(mode="json"))


def read_report(data: bytes | str) -> ReportFile:
    return _validate(ReportFile, _load_json(data))


def load_report(path: str | Path) -> ReportFile:
    return read_report(read_bytes(path))
