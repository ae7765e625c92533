"""Bounded searches for abelian CM fields with negative (A) and (A-circ).

Each family is a compositum of small cyclic pieces chosen by congruence,
quadratic-residue and Frobenius conditions on auxiliary primes.  Every
field is certified by the norm criterion before it is emitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from sympy import isprime, nextprime

from .arith import legendre
from .errors import InvalidDescriptor, SearchExhausted
from .fields import (
    CyclotomicFieldDescriptor,
    compositum,
    cyclic_subfield,
    decomposition_data,
    fixed_field,
    frobenius,
    other_cyclic_quartic,
    quadratic_field,
    two_part_subfield,
)
from .globaldec import NormCriterionReport, check_ngax
from .local import _subgroups

VARIANTS = ("odd_p_main", "odd_p_unramified", "two_adic_unramified", "two_adic_ramified")

_ALIASES = {
    "odd_main": "odd_p_main",
    "odd_unramified": "odd_p_unramified",
    "two_unramified": "two_adic_unramified",
    "two_ramified": "two_adic_ramified",
}

DEFAULT_BOUND = 10**6


def normalize_variant(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in VARIANTS:
        raise InvalidDescriptor(f"unknown family variant {name!r}")
    return key


def _v2(n: int) -> int:
    return (n & -n).bit_length() - 1


@dataclass(frozen=True)
class FamilySpec:
    p: int
    degree: int
    variant: str
    count: int = 1
    search_bound: int = DEFAULT_BOUND

    def __post_init__(self):
        object.__setattr__(self, "variant", normalize_variant(self.variant))
        if not isprime(self.p):
            raise InvalidDescriptor(f"{self.p} is not prime")
        if self.count < 1 or self.search_bound < 2:
            raise InvalidDescriptor("count and search_bound must be positive")
        if self.variant.startswith("odd_p"):
            if self.p == 2 or self.degree <= 0 or self.degree % 32:
                raise InvalidDescriptor("odd-p families need p odd and degree in 32Z")
            if self.variant == "odd_p_unramified" and self.p % 4 != 1:
                raise InvalidDescriptor("this variant needs p = 1 mod 4")
        else:
            if self.p != 2 or self.degree <= 0 or self.degree % 8:
                raise InvalidDescriptor("two-adic families need p = 2 and degree in 8Z")

    @property
    def two_exponent(self) -> int:
        return _v2(self.degree)

    @property
    def odd_part(self) -> int:
        return self.degree >> self.two_exponent


@dataclass(frozen=True)
class FamilyMember:
    field: CyclotomicFieldDescriptor
    p: int
    variant: str
    ell0: int
    primes: tuple[int, ...]
    certificate: NormCriterionReport

    def line(self) -> str:
        aux = ",".join(map(str, self.primes))
        return (
            f"{self.field.text()} | p={self.p} variant={self.variant} ell0={self.ell0} "
            f"primes={aux} | {self.certificate.text()}"
        )


def _primes(start: int, bound: int, modulus: int = 1, residue: int = 0) -> Iterator[int]:
    q = nextprime(start - 1) if start > 2 else 2
    while q <= bound:
        if q % modulus == residue % modulus:
            yield q
        q = nextprime(q)


def _odd_cofactor(t: int, avoid: set[int], bound: int) -> CyclotomicFieldDescriptor | None:
    """A cyclic field of odd degree t and prime conductor outside ``avoid``."""
    if t == 1:
        return None
    for q in _primes(3, bound, t, 1):
        if q not in avoid:
            return cyclic_subfield(q, t)
    raise SearchExhausted(f"no prime q = 1 mod {t} below {bound}", [])


def _finish(spec: FamilySpec, two_part: CyclotomicFieldDescriptor, ell0: int, primes: tuple[int, ...]):
    rep = check_ngax(two_part, spec.p, ell0)
    if not rep.holds:
        return None
    L = two_part
    cof = _odd_cofactor(spec.odd_part, set(primes) | {spec.p}, spec.search_bound)
    if cof is not None:
        L = compositum(two_part, cof)
    if L.degree != spec.degree or not L.is_cm:
        return None
    return FamilyMember(L, spec.p, spec.variant, ell0, primes, rep)


def _real_quartic(p: int, ell: int) -> CyclotomicFieldDescriptor:
    """The fixed field of <(2,1)> in L0(sqrt(p*)), L0 the quartic field of
    conductor ell."""
    L0 = cyclic_subfield(ell, 4)
    p_star = p if p % 4 == 1 else -p
    return other_cyclic_quartic(compositum(L0, quadratic_field(p_star)), L0)


def _first_ell_ok(p: int, ell: int) -> bool:
    if ell in (2, p) or legendre(ell, p) != 1:
        return False
    return ell % 8 == (1 if p % 4 == 1 else 5)


def _mixed_cyclic(p: int, ell1: int, m: int) -> list[CyclotomicFieldDescriptor]:
    """Cyclic CM fields of degree 2^m inside L(ell1, m) L(p, 4) cut out by
    a subgroup <(+-2^(m-2), 1)> meeting neither inertia group."""
    M = compositum(cyclic_subfield(ell1, 2**m), cyclic_subfield(p, 4))
    _, I_p, _ = decomposition_data(M, p)
    _, I_l, _ = decomposition_data(M, ell1)
    out = []
    for K in _subgroups(M.gal):
        if K.order != 4 or not K.is_cyclic():
            continue
        if not (K.intersect(I_p).is_trivial() and K.intersect(I_l).is_trivial()):
            continue
        if K.contains(M.conjugation):
            continue
        sub = fixed_field(M, K)
        if sub.gal.is_cyclic():
            out.append(sub)
    return out


def _odd_candidates(spec: FamilySpec) -> Iterator[tuple[CyclotomicFieldDescriptor, int, tuple[int, ...]]]:
    p, bound = spec.p, spec.search_bound
    m = spec.two_exponent - 2
    if spec.variant == "odd_p_main" or p % 8 == 1:
        residue = 2**m + 1
    else:
        residue = 1
    for ell in _primes(3, bound):
        if not _first_ell_ok(p, ell):
            continue
        L2 = _real_quartic(p, ell)
        for ell1 in _primes(3, bound, 2 ** (m + 1), residue):
            if ell1 in (ell, p):
                continue
            # Frobenius (2,1) in Gal(L0(sqrt(p*))): trivial on L2, nontrivial on sqrt(p*)
            if legendre(p, ell1) != -1 or any(frobenius(L2, ell1)):
                continue
            if spec.variant == "odd_p_main":
                pieces = [cyclic_subfield(ell1, 2**m)]
            else:
                pieces = _mixed_cyclic(p, ell1, m)
            for piece in pieces:
                yield compositum(L2, piece), ell1, (ell, ell1)


def _two_adic_candidates(spec: FamilySpec) -> Iterator[tuple[CyclotomicFieldDescriptor, int, tuple[int, ...]]]:
    bound = spec.search_bound
    k = spec.two_exponent - 3
    for ell1 in _primes(5, bound, 8, 5):
        L0 = cyclic_subfield(ell1, 4)
        if spec.variant == "two_adic_unramified":
            base = L0
        else:
            base = other_cyclic_quartic(compositum(L0, quadratic_field(2)), L0)
        extra = []
        for q in _primes(17, bound, 8, 1):
            if len(extra) == k:
                break
            if legendre(q, ell1) == 1:
                extra.append(q)
        if len(extra) < k:
            continue
        extra_fields = [quadratic_field(q) for q in extra]
        for ell in _primes(3, bound, 4, 3):
            if legendre(ell, ell1) != 1:
                continue
            yield compositum(base, quadratic_field(ell), *extra_fields), ell1, (ell1, ell, *extra)


def generate_family(spec: FamilySpec) -> list[FamilyMember]:
    """The first spec.count certified fields in search order, sorted by
    conductor.  Raises SearchExhausted (with the partial list) when the
    bound runs out first."""
    found: list[FamilyMember] = []
    seen: set[int] = set()
    rejected = 0
    gen = _odd_candidates(spec) if spec.variant.startswith("odd_p") else _two_adic_candidates(spec)
    for L, ell0, primes in gen:
        if L.m in seen:
            continue
        member = _finish(spec, L, ell0, primes)
        if member is None:
            rejected += 1
            continue
        if member.field.m in seen:
            continue
        seen.add(member.field.m)
        found.append(member)
        if len(found) == spec.count:
            break
    found.sort(key=lambda f: f.field.m)
    if len(found) < spec.count:
        raise SearchExhausted(
            f"found {len(found)} of {spec.count} fields below {spec.search_bound} ({rejected} candidates rejected)",
            found,
        )
    return found


def certify(field: CyclotomicFieldDescriptor, p: int, ell0: int) -> NormCriterionReport:
    """Re-check a stored family member from its field, p and ell0 alone."""
    L1 = field if field.degree & (field.degree - 1) == 0 else two_part_subfield(field)
    return check_ngax(L1, p, ell0)
