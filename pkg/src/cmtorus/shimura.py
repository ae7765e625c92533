"""Transitivity of the prime-to-p Hecke action on connected components of
unitary similitude Shimura varieties for an abelian CM field.

The verdict depends only on (L, p) and the level type: a Bruhat-Tits level
reduces to (A) and a parahoric level to (A-circ).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import EvenVariables
from .fields import CyclotomicFieldDescriptor, _require_cm
from .globaldec import decide_A, decide_A_circ
from .verdict import Question, QuestionVerdict, format_witness


class LevelType(str, Enum):
    BRUHAT_TITS = "BruhatTits"
    PARAHORIC = "Parahoric"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "LevelType":
        key = text.strip().lower().replace("-", "").replace("_", "")
        if key in ("bt", "bruhattits"):
            return cls.BRUHAT_TITS
        if key in ("parahoric", "par"):
            return cls.PARAHORIC
        raise ValueError(f"unknown level type {text!r}")


@dataclass(frozen=True)
class ShimuraLevelDescriptor:
    field: CyclotomicFieldDescriptor
    p: int
    n_variables: int
    level_type: LevelType

    def __post_init__(self):
        if not isinstance(self.level_type, LevelType):
            object.__setattr__(self, "level_type", LevelType.parse(self.level_type))
        if self.n_variables < 1 or self.n_variables % 2 == 0:
            raise EvenVariables(f"the hermitian space must have odd rank, got {self.n_variables}")
        _require_cm(self.field)


@dataclass(frozen=True)
class TransitivityVerdict:
    status: QuestionVerdict
    reduced_question: Question

    @property
    def affirmative(self) -> bool:
        return self.status.affirmative

    @property
    def negative(self) -> bool:
        return self.status.negative

    def record(self) -> str:
        v = self.status
        lines = [
            "question: T",
            f"reduced_question: {self.reduced_question}",
            f"status: {v.status}",
            f"reason: {', '.join(v.reason)}",
            f"witness: {format_witness(v.witness)}",
        ]
        return "\n".join(lines)


def reduce_level(level_type: LevelType | str) -> Question:
    level = level_type if isinstance(level_type, LevelType) else LevelType.parse(level_type)
    return Question.A if level is LevelType.BRUHAT_TITS else Question.ACIRC


def decide_T(desc: ShimuraLevelDescriptor) -> TransitivityVerdict:
    q = reduce_level(desc.level_type)
    verdict: QuestionVerdict = decide_A(desc.field, desc.p) if q is Question.A else decide_A_circ(desc.field, desc.p)
    return TransitivityVerdict(verdict, q)
