from __future__ import annotations

from typing import Annotated, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, StrictBool, StrictInt, StrictStr

from . import defaults
from .engine import UtteranceObservation
from .errors import UnknownDialogue, UnknownObject
from .status import DialogueId, LinguisticStatus, ObjectId

Identifier = Annotated[StrictStr, Field(min_length=1)]
Index = Annotated[StrictInt, Field(ge=1)]
MentionRole = Literal["topic", "nontopic"]

_ROLE_STATUS: dict[str, LinguisticStatus] = {
    "topic": LinguisticStatus.MENTIONED_TOPIC,
    "nontopic": LinguisticStatus.MENTIONED_NON_TOPIC,
}


class _Frozen(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Mention(_Frozen):
    object: Identifier
    role: MentionRole
    topic_votes: Optional[Annotated[StrictInt, Field(ge=0)]] = None

    @property
    def status(self) -> LinguisticStatus:
        return _ROLE_STATUS[self.role]


class Utterance(_Frozen):
    index: Index
    text: StrictStr = ""
    mentions: tuple[Mention, ...] = ()


class Dialogue(_Frozen):
    id: Identifier
    utterances: tuple[Utterance, ...] = Field(min_length=1)

    def __len__(self) -> int:
        return len(self.utterances)


class DialogueCorpus(_Frozen):
    """Scene objects plus annotated dialogues; absent mentions read as NotMentioned."""

    format_version: Literal[1] = defaults.FORMAT_VERSION
    objects: tuple[Identifier, ...] = Field(min_length=1)
    annotators: Optional[Annotated[StrictInt, Field(ge=2)]] = None
    dialogues: tuple[Dialogue, ...] = Field(min_length=1)

    _by_id: dict[DialogueId, Dialogue] = PrivateAttr(default_factory=dict)
    _mentions: dict[tuple[DialogueId, int, ObjectId], LinguisticStatus] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context: object) -> None:
        self._by_id = {d.id: d for d in self.dialogues}
        self._mentions = {
            (d.id, u.index, m.object): m.status
            for d in self.dialogues
            for u in d.utterances
            for m in u.mentions
        }

    def dialogue(self, dialogue_id: DialogueId) -> Dialogue:
        try:
            return self._by_id[dialogue_id]
        except KeyError:
            raise UnknownDialogue(f"unknown dialogue: {dialogue_id}") from None

    def require_object(self, obj: ObjectId) -> None:
        if obj not in self.objects:
            raise UnknownObject(f"unknown object: {obj}")

    def dialogue_ids(self) -> tuple[DialogueId, ...]:
        return tuple(d.id for d in self.dialogues)

    def linguistic_status(self, obj: ObjectId, dialogue_id: DialogueId, index: int) -> LinguisticStatus:
        return self._mentions.get((dialogue_id, index, obj), LinguisticStatus.NOT_MENTIONED)

    def observation(self, dialogue_id: DialogueId, index: int) -> UtteranceObservation:
        u = self.dialogue(dialogue_id).utterances[index - 1]
        return UtteranceObservation(
            dialogue=dialogue_id,
            index=u.index,
            mentions={m.object: m.status for m in u.mentions},
        )

    def cells(self) -> list[tuple[DialogueId, int, ObjectId]]:
        """Every (dialogue, utterance, object) key, in corpus order."""
        return [
            (d.id, u.index, obj)
            for d in self.dialogues
            for u in d.utterances
            for obj in self.objects
        ]


class ParticipantResponse(_Frozen):
    participant: Identifier
    dialogue: Identifier
    prefix_len: Index
    q1: Identifier
    q2: tuple[Identifier, ...] = ()
    passed_check: StrictBool = True


class ResponsesFile(_Frozen):
    format_version: Literal[1] = defaults.FORMAT_VERSION
    responses: tuple[ParticipantResponse, ...] = ()

    @property
    def failed_checks(self) -> tuple[ParticipantResponse, ...]:
        return tuple(r for r in self.responses if not r.passed_check)

    @property
    def usable(self) -> tuple[ParticipantResponse, ...]:
        return tuple(r for r in self.responses if r.passed_check)
