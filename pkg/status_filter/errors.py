from __future__ import annotations


class CsfError(Exception):
    """Base for every error the toolkit raises on purpose."""

    exit_code: int = 1


class InputError(CsfError):
    exit_code = 2


class SchemaError(InputError):
    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path or '<root>'}: {message}")


class RowSumError(InputError):
    pass


class SemanticError(CsfError):
    exit_code = 3


class DanglingReference(SemanticError):
    pass


class DuplicateMention(SemanticError):
    pass


class DuplicateRecord(SemanticError):
    pass


class PrefixOutOfRange(SemanticError):
    pass


class UnknownObject(SemanticError):
    pass


class UnknownDialogue(SemanticError):
    pass


class UnknownModel(SemanticError):
    pass


class DuplicateObject(SemanticError):
    pass


class KeyMismatch(SemanticError):
    pass


class EmptyVector(SemanticError):
    pass


class AllZeroWeights(CsfError):
    """Every weight was zero: the observation is impossible under the table."""

    exit_code = 3
