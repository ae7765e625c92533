"""Verdict records shared by the local, global and Shimura deciders."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Status(str, Enum):
    AFFIRMATIVE = "Affirmative"
    NEGATIVE = "Negative"
    OUT_OF_SCOPE = "OutOfScope"

    def __str__(self) -> str:
        return self.value


class Question(str, Enum):
    R = "R"
    RCIRC = "Rcirc"
    A = "A"
    ACIRC = "Acirc"
    T = "T"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class QuestionVerdict:
    status: Status
    question: Question
    reason: tuple[str, ...]
    witness: Any = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.reason:
            raise ValueError("a verdict needs at least one reason")
        if (
            self.status is Status.NEGATIVE
            and self.question in (Question.R, Question.RCIRC)
            and self.witness is None
        ):
            raise ValueError("negative local verdicts must carry a witness")

    @property
    def affirmative(self) -> bool:
        return self.status is Status.AFFIRMATIVE

    @property
    def negative(self) -> bool:
        return self.status is Status.NEGATIVE

    def record(self) -> str:
        lines = [
            f"question: {self.question}",
            f"status: {self.status}",
            f"reason: {', '.join(self.reason)}",
            f"witness: {format_witness(self.witness)}",
        ]
        return "\n".join(lines)


def format_witness(w: Any) -> str:
    if w is None:
        return "-"
    if isinstance(w, dict):
        return "; ".join(f"{k}={format_witness(v)}" for k, v in w.items())
    if isinstance(w, (list, tuple)):
        return "[" + ", ".join(format_witness(x) for x in w) + "]"
    return str(w)


def affirmative(question: Question, *reason: str, witness: Any = None, **diag) -> QuestionVerdict:
    return QuestionVerdict(Status.AFFIRMATIVE, question, tuple(reason), witness, diag)


def negative(question: Question, *reason: str, witness: Any = None, **diag) -> QuestionVerdict:
    return QuestionVerdict(Status.NEGATIVE, question, tuple(reason), witness, diag)


def out_of_scope(question: Question, *reason: str, witness: Any = None, **diag) -> QuestionVerdict:
    return QuestionVerdict(Status.OUT_OF_SCOPE, question, tuple(reason), witness, diag)
