from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import pytest

from status_filter.corpus import DialogueCorpus, ParticipantResponse
from status_filter.formats import parse_corpus
from status_filter.stats import PredictionEntry, PredictionVector
from status_filter.status import CognitiveStatus

I, A, F = CognitiveStatus.IN_FOCUS, CognitiveStatus.ACTIVATED, CognitiveStatus.FAMILIAR

# one dict per utterance: object -> "topic" | "nontopic"
Script = Sequence[Mapping[str, str]]


def corpus_payload(
    objects: Sequence[str],
    dialogues: Mapping[str, Script],
    *,
    annotators: int | None = None,
    votes: Mapping[tuple[str, int, str], int] | None = None,
) -> dict[str, Any]:
    votes = votes or {}
    payload: dict[str, Any] = {
        "format_version": 1,
        "objects": list(objects),
        "dialogues": [
            {
                "id": d,
                "utterances": [
                    {
                        "index": i,
                        "text": f"{d} utterance {i}",
                        "mentions": [
                            {"object": o, "role": role, **({"topic_votes": votes[(d, i, o)]} if (d, i, o) in votes else {})}
                            for o, role in mentions.items()
                        ],
                    }
                    for i, mentions in enumerate(script, start=1)
                ],
            }
            for d, script in dialogues.items()
        ],
    }
    if annotators is not None:
        payload["annotators"] = annotators
    return payload


def build_corpus(objects: Sequence[str], dialogues: Mapping[str, Script], **kw: Any) -> DialogueCorpus:
    return parse_corpus(json.dumps(corpus_payload(objects, dialogues, **kw)))


def response(
    participant: str,
    dialogue: str,
    prefix_len: int,
    q1: str,
    q2: Sequence[str] = (),
    passed_check: bool = True,
) -> ParticipantResponse:
    return ParticipantResponse(
        participant=participant,
        dialogue=dialogue,
        prefix_len=prefix_len,
        q1=q1,
        q2=tuple(q2),
        passed_check=passed_check,
    )


def responses_payload(responses: Sequence[ParticipantResponse]) -> dict[str, Any]:
    return {"format_version": 1, "responses": [r.model_dump(mode="json") for r in responses]}


def write_json(path: Path, payload: Any) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


STUDY_OBJECTS = tuple(f"o{i}" for i in range(1, 9))
STUDY_DIALOGUES = ("M1", "M2", "M3", "M4")


def study_shaped(seed: int = 7, participants: int = 3) -> tuple[DialogueCorpus, list[ParticipantResponse]]:
    """8 objects x 4 dialogues x 4 utterances, with a few clicking participants per prefix."""
    rng = np.random.default_rng(seed)
    scripts: dict[str, list[dict[str, str]]] = {}
    for d in STUDY_DIALOGUES:
        script = []
        for _ in range(4):
            topic = STUDY_OBJECTS[int(rng.integers(8))]
            mentions = {topic: "topic"}
            if rng.random() < 0.5:
                other = STUDY_OBJECTS[int(rng.integers(8))]
                if other != topic:
                    mentions[other] = "nontopic"
            script.append(mentions)
        scripts[d] = script
    corpus = build_corpus(STUDY_OBJECTS, scripts)

    responses = []
    for d in STUDY_DIALOGUES:
        for t, mentions in enumerate(scripts[d], start=1):
            topic = next(o for o, r in mentions.items() if r == "topic")
            for p in range(participants):
                q1 = topic if rng.random() < 0.7 else STUDY_OBJECTS[int(rng.integers(8))]
                q2 = sorted({q1, *mentions})
                responses.append(response(f"{d}-{t}-p{p}", d, t, q1, q2))
    return corpus, responses


@pytest.fixture
def small_corpus() -> DialogueCorpus:
    return build_corpus(
        ["o1", "o2", "o3"],
        {
            "M1": [{"o1": "topic"}, {"o2": "nontopic"}, {}],
            "M2": [{"o3": "topic", "o1": "nontopic"}, {"o3": "topic"}],
        },
    )


@pytest.fixture
def small_responses() -> list[ParticipantResponse]:
    return [
        response("a", "M1", 1, "o1", ["o1"]),
        response("b", "M1", 1, "o1", ["o1", "o2"]),
        response("c", "M1", 2, "o2", ["o1", "o2"]),
        response("d", "M1", 2, "o1", ["o1", "o2"]),
        response("e", "M1", 3, "o2", ["o2"]),
        response("f", "M2", 1, "o3", ["o3", "o1"]),
        response("g", "M2", 2, "o3", ["o3"]),
        response("h", "M2", 2, "o1", [], passed_check=False),
    ]


@pytest.fixture
def study_data() -> tuple[DialogueCorpus, list[ParticipantResponse]]:
    return study_shaped()


def paired_vectors(row: tuple[int, int, int, int], m1: str, m2: str) -> tuple[PredictionVector, PredictionVector]:
    """Two 128-entry vectors whose joint outcomes are (n_ss, n_sf, n_fs, n_ff) = `row`."""
    outcomes = [(True, True)] * row[0] + [(True, False)] * row[1] + [(False, True)] * row[2] + [(False, False)] * row[3]
    e1, e2 = [], []
    for k, (ok1, ok2) in enumerate(outcomes):
        d, idx, obj = f"M{k // 32 + 1}", (k % 32) // 8 + 1, f"o{k % 8 + 1}"
        e1.append(PredictionEntry(d, idx, obj, I if ok1 else A, I))
        e2.append(PredictionEntry(d, idx, obj, I if ok2 else F, I))
    return PredictionVector(m1, tuple(e1)), PredictionVector(m2, tuple(e2))
