"""Abelian number fields as Q(zeta_m)^H, with H a subgroup of (Z/m)^x.

Galois groups, decomposition and inertia groups, the local Artin map and
norm tests all reduce to arithmetic in (Z/m)^x.

>>> L = make_field(4, [])
>>> L.degree, L.is_cm
(2, True)
>>> is_global_norm(L, 2), is_global_norm(L, 3)
(True, False)
"""

from __future__ import annotations

import re
from functools import cached_property, lru_cache
from math import gcd, prod
from typing import Iterable, Sequence

from sympy import discrete_log, factorint, primitive_root, totient

from .arith import INFINITY, Rational, RationalNonzero, crt_pair
from .errors import NotQuadratic, NotUnits
from .groups import FiniteAbelianGroup, GroupElement, Subgroup
from .intmat import cokernel, hnf_contains, hnf_rows, intersect_lattices, mat_vec, preimage_lattice


class UnitGroup:
    """(Z/m)^x as a product of cyclic components with discrete logarithms.

    Each odd prime power contributes one component generated by a primitive
    root; 2^e contributes -1 (e >= 2) and 5 (e >= 3).
    """

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("modulus must be positive")
        self.m = m
        self.factors = sorted(factorint(m).items())
        comps = []  # (prime, prime power, generator residue mod q, order)
        for p, e in self.factors:
            q = p**e
            if p == 2:
                if e >= 2:
                    comps.append((2, q, q - 1, 2))
                if e >= 3:
                    comps.append((2, q, 5, 2 ** (e - 2)))
            else:
                comps.append((p, q, primitive_root(q), q // p * (p - 1)))
        self.components = comps
        self.orders = tuple(c[3] for c in comps)

    @property
    def rank(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        return prod(self.orders)

    def log(self, a: int) -> tuple[int, ...]:
        if gcd(a, self.m) != 1:
            raise NotUnits(f"{a} is not a unit modulo {self.m}")
        out = []
        for p, q, g, order in self.components:
            x = a % q
            if p == 2:
                if g == q - 1:
                    out.append(0 if x % 4 == 1 else 1)
                else:
                    y = x if x % 4 == 1 else (-x) % q
                    out.append(discrete_log(q, y, 5) % order if order > 1 else 0)
            else:
                out.append(discrete_log(q, x, g) % order)
        return tuple(out)

    def exp(self, v: Sequence[int]) -> int:
        by_q: dict[int, int] = {}
        for (p, q, g, order), k in zip(self.components, v):
            by_q[q] = by_q.get(q, 1) * pow(g, k % order, q) % q
        x, mod = 0, 1
        for p, e in self.factors:
            q = p**e
            x = crt_pair(x, mod, by_q.get(q, 1), q)
            mod *= q
        return x % self.m if self.m > 1 else 0

    def relation_rows(self) -> list[list[int]]:
        k = self.rank
        return [[o if i == j else 0 for j in range(k)] for i, o in enumerate(self.orders)]


@lru_cache(maxsize=512)
def unit_group(m: int) -> UnitGroup:
    return UnitGroup(m)


def units_congruent_one(M: int, d: int) -> list[int]:
    """Generators of the kernel of (Z/M)^x -> (Z/d)^x, for d dividing M."""
    if M % d:
        raise ValueError(f"{d} does not divide {M}")
    out = []
    for p, e in sorted(factorint(M).items()):
        q = p**e
        f = 0
        dd = d
        while dd % p == 0:
            dd //= p
            f += 1
        if f == e:
            continue
        if p == 2:
            if f <= 1:
                local = [q - 1, 5] if e >= 3 else [q - 1] * (e == 2)
            else:
                local = [1 + 2**f]
        else:
            local = [primitive_root(q)] if f == 0 else [1 + p**f]
        rest = M // q
        for x in local:
            out.append(crt_pair(x, q, 1, rest))
    return out


def _parse_residues(gens: Iterable[int], m: int) -> list[int]:
    out = []
    for g in gens:
        g = int(g)
        if m > 1 and gcd(g, m) != 1:
            raise NotUnits(f"{g} is not a unit modulo {m}")
        out.append(g % m if m > 1 else 0)
    return out


class CyclotomicFieldDescriptor:
    """The fixed field of H in Q(zeta_m), with m the conductor."""

    def __init__(self, m: int, generators: Iterable[int], warnings: Sequence[str] = ()):
        self.m = m
        self.U = unit_group(m)
        gens = _parse_residues(generators, m)
        logs = [list(self.U.log(g)) for g in gens] if m > 1 else []
        rows = hnf_rows(logs + self.U.relation_rows(), self.U.rank)
        self.h_lattice = rows
        mods, proj, _ = cokernel(rows, self.U.rank)
        self.gal = FiniteAbelianGroup(mods)
        self._proj = proj
        # canonical generating residues of H
        self.subgroup_h = tuple(sorted({self.U.exp(r) for r in rows if any(x % o for x, o in zip(r, self.U.orders))}))
        self.warnings = list(warnings)

    def __repr__(self) -> str:
        return f"CyclotomicFieldDescriptor({self.text()})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CyclotomicFieldDescriptor) and (self.m, self.h_lattice) == (other.m, other.h_lattice)

    def __hash__(self) -> int:
        return hash((self.m, tuple(map(tuple, self.h_lattice))))

    def text(self) -> str:
        return f"m={self.m} H=[{','.join(map(str, self.subgroup_h))}]"

    @property
    def degree(self) -> int:
        return self.gal.order

    def element(self, a: int) -> GroupElement:
        """Image of the residue a in Gal = (Z/m)^x / H."""
        if self.m == 1:
            return ()
        return self.gal.element(mat_vec(self._proj, self.U.log(a % self.m)))

    @cached_property
    def conjugation(self) -> GroupElement:
        return self.element(-1)

    @property
    def is_cm(self) -> bool:
        return any(self.conjugation)

    def contains_residue(self, a: int) -> bool:
        return not any(self.element(a))

    def preimage_residues(self, K: Subgroup) -> list[int]:
        """Residues generating the preimage of K in (Z/m)^x."""
        rows = preimage_lattice(self._proj, self.U.rank, [list(r) for r in K.canonical_basis])
        return sorted({self.U.exp(r) for r in rows})

    def conj_subgroup(self) -> Subgroup:
        return self.gal.subgroup([self.conjugation])


def _log_lattice(U: UnitGroup, residues: Iterable[int]) -> list[list[int]]:
    return hnf_rows([list(U.log(g)) for g in residues] + U.relation_rows(), U.rank)


def _normalize(m: int, gens: list[int]) -> tuple[int, list[int]]:
    """Lower m to the conductor of the fixed field of <gens>."""
    changed = True
    while changed and m > 1:
        changed = False
        U = unit_group(m)
        lat = _log_lattice(U, gens)
        for p, _ in U.factors:
            d = m // p
            ker = units_congruent_one(m, d)
            if all(hnf_contains(lat, U.log(x)) for x in ker):
                gens = [g % d for g in gens] if d > 1 else []
                m = d
                changed = True
                break
    return m, gens


def make_field(m: int, generators: Iterable[int] = ()) -> CyclotomicFieldDescriptor:
    """Q(zeta_m)^H, normalized so that m is the conductor."""
    m = int(m)
    if m < 1:
        raise ValueError("modulus must be positive")
    gens = _parse_residues(generators, m)
    m2, gens2 = _normalize(m, gens)
    warnings = []
    if m2 != m:
        warnings.append(f"modulus {m} is not the conductor; normalized to {m2}")
    return CyclotomicFieldDescriptor(m2, gens2, warnings)


_FIELD_RE = re.compile(r"^\s*m\s*=\s*(\d+)\s*[;\s]\s*H\s*=\s*\[?\s*([-\d,\s]*?)\s*\]?\s*$")


def parse_field(text: str) -> CyclotomicFieldDescriptor:
    """Parse 'm=<int> H=[g1,...]' or 'm=<int>;H=g1,...'."""
    match = _FIELD_RE.match(text)
    if not match:
        raise ValueError(f"cannot parse field descriptor {text!r}")
    m = int(match.group(1))
    body = match.group(2).strip()
    gens = [int(x) for x in body.split(",") if x.strip()] if body else []
    return make_field(m, gens)


def decomposition_data(field: CyclotomicFieldDescriptor, ell: int):
    """(D_ell, I_ell, Frobenius element) in Gal(L/Q)."""
    m = field.m
    G = field.gal
    v, mp = 0, m
    while mp % ell == 0:
        mp //= ell
        v += 1
    inertia = G.subgroup([field.element(x) for x in units_congruent_one(m, mp)]) if v else G.trivial()
    frob = field.element(crt_pair(ell % mp if mp > 1 else 0, mp, 1, ell**v)) if m > 1 else ()
    D = inertia.join(G.subgroup([frob])) if m > 1 else G.trivial()
    return D, inertia, frob


def decomposition_group(field: CyclotomicFieldDescriptor, ell: int) -> Subgroup:
    return decomposition_data(field, ell)[0]


def inertia_group(field: CyclotomicFieldDescriptor, ell: int) -> Subgroup:
    return decomposition_data(field, ell)[1]


def frobenius(field: CyclotomicFieldDescriptor, ell: int) -> GroupElement:
    """Frobenius class of an unramified prime."""
    if field.m % ell == 0:
        raise ValueError(f"{ell} ramifies in {field.text()}")
    return field.element(ell)


def ramified_primes(field: CyclotomicFieldDescriptor) -> set[int]:
    return {p for p, _ in factorint(field.m).items() if not inertia_group(field, p).is_trivial()}


def artin_local(field: CyclotomicFieldDescriptor, ell, x: Rational) -> GroupElement:
    """Local reciprocity image of x in Q_ell^x, in Gal(L/Q)."""
    x = RationalNonzero.of(x)
    if ell == INFINITY:
        return field.conjugation if x.sign < 0 else field.gal.identity
    m = field.m
    v, mp = 0, m
    while mp % ell == 0:
        mp //= ell
        v += 1
    k = x.valuation(ell)
    u = x.unit_part(ell)
    q = ell**v
    if q > 1:
        u_mod = u.numerator * pow(u.denominator, -1, q) % q
        a_ell = pow(u_mod, -1, q)
    else:
        a_ell = 0
    a_rest = pow(ell, k, mp) if mp > 1 else 0
    if k < 0 and mp > 1:
        a_rest = pow(pow(ell, -k, mp), -1, mp)
    return field.element(crt_pair(a_ell, q, a_rest, mp) if m > 1 else 0)


def _require_cm(field: CyclotomicFieldDescriptor) -> None:
    if not field.is_cm:
        raise NotQuadratic(f"{field.text()} is not a CM field")


def local_residue_degree_plus(field: CyclotomicFieldDescriptor, ell: int) -> int:
    """[L+_v : Q_ell] for v above ell."""
    D = decomposition_group(field, ell)
    return D.order // D.intersect(field.conj_subgroup()).order


def is_local_norm(field: CyclotomicFieldDescriptor, ell: int, x: Rational) -> bool:
    """Whether x is a norm from L_w to L+_v at every place v above ell."""
    _require_cm(field)
    g = artin_local(field, ell, x)
    f = local_residue_degree_plus(field, ell)
    return not any(field.gal.scale(f, g))


def is_global_norm(field: CyclotomicFieldDescriptor, x: Rational) -> bool:
    """Whether x is a norm from L to L+ (Hasse norm principle for L/L+)."""
    _require_cm(field)
    x = RationalNonzero.of(x)
    if x.sign < 0:
        return False
    places = ramified_primes(field) | set(x.support())
    return all(is_local_norm(field, ell, x) for ell in sorted(places))


def s_set(field: CyclotomicFieldDescriptor, bound: int | None = None) -> set[int]:
    """Primes where nu of the maximal compact subgroup misses some units.

    These are the ell with D_ell = I_ell cyclic and containing complex
    conjugation.  Such ell are ramified, so no search bound is needed.
    """
    _require_cm(field)
    c = field.conjugation
    out = set()
    for ell in ramified_primes(field):
        D, I, _ = decomposition_data(field, ell)
        if D == I and I.contains(c) and I.is_cyclic():
            out.add(ell)
    return out


def units_all_local_norms(field: CyclotomicFieldDescriptor, ell: int) -> bool:
    """Whether every ell-adic unit is a local norm from L to L+ above ell."""
    m = field.m
    v, mp = 0, m
    while mp % ell == 0:
        mp //= ell
        v += 1
    if v == 0:
        return True
    q = ell**v
    gens = units_congruent_one(q, 1) if q > 2 else []
    # the Artin map on units only sees residues mod ell^v
    for u in gens:
        if not is_local_norm(field, ell, u):
            return False
    return True


def fixed_field(field: CyclotomicFieldDescriptor, K: Subgroup) -> CyclotomicFieldDescriptor:
    """The subfield of L fixed by K <= Gal(L/Q)."""
    return make_field(field.m, field.preimage_residues(K))


def two_part_subfield(field: CyclotomicFieldDescriptor) -> CyclotomicFieldDescriptor:
    """The maximal subfield of 2-power degree."""
    G = field.gal
    e = G.exponent
    while e % 2 == 0:
        e //= 2
    odd_index_part = G.whole().multiple(G.exponent // e)
    return fixed_field(field, odd_index_part)


def real_subfield(field: CyclotomicFieldDescriptor) -> CyclotomicFieldDescriptor:
    return fixed_field(field, field.conj_subgroup())


def lift_residues(residues: Iterable[int], m: int, M: int) -> list[int]:
    """Generators of the preimage in (Z/M)^x of the subgroup of (Z/m)^x
    generated by ``residues``."""
    out = list(units_congruent_one(M, m))
    for r in residues:
        x = r % m if m > 1 else 1
        while gcd(x, M) != 1:
            x += m
        out.append(x % M)
    return out


def compositum(*fields: CyclotomicFieldDescriptor) -> CyclotomicFieldDescriptor:
    M = 1
    for L in fields:
        M = M * L.m // gcd(M, L.m)
    U = unit_group(M)
    lat = None
    for L in fields:
        gens = lift_residues(L.subgroup_h, L.m, M)
        cur = _log_lattice(U, gens)
        lat = cur if lat is None else intersect_lattices(lat, cur, U.rank)
    return make_field(M, [U.exp(r) for r in lat] if M > 1 else [])


def subfields_of_degree(field: CyclotomicFieldDescriptor, degree: int) -> list[CyclotomicFieldDescriptor]:
    from .groups import enumerate_subgroups

    out = []
    for K in enumerate_subgroups(field.gal):
        if K.index == degree:
            out.append(fixed_field(field, K))
    return out


def cyclic_subfield(q: int, degree: int) -> CyclotomicFieldDescriptor:
    """The unique subfield of Q(zeta_q) of the given degree, q prime."""
    phi = int(totient(q))
    if phi % degree:
        raise ValueError(f"{degree} does not divide phi({q})")
    g = primitive_root(q)
    return make_field(q, [pow(g, degree, q)])


def fields_with_conductor(conductor: int, degree: int, cm: bool | None = None) -> list[CyclotomicFieldDescriptor]:
    """All abelian fields of exact conductor and degree (optionally CM only)."""
    from .groups import enumerate_subgroups

    if conductor % 4 == 2:
        return []
    full = make_field(conductor, [])
    out = []
    for K in enumerate_subgroups(full.gal):
        if K.index != degree:
            continue
        if cm is not None and (not K.contains(full.conjugation)) != cm:
            continue
        L = fixed_field(full, K)
        if L.m == conductor:
            out.append(L)
    return out


def quadratic_field(D: int) -> CyclotomicFieldDescriptor:
    """Q(sqrt(D)) for a squarefree integer D != 0, 1."""
    D = int(D)
    fac = factorint(abs(D))
    if D in (0, 1) or any(e > 1 for e in fac.values()):
        raise ValueError(f"{D} is not a squarefree integer other than 0, 1")
    odd = [q for q in fac if q != 2]
    s = D
    for q in odd:
        s //= q if q % 4 == 1 else -q
    # s in {1, -1, 2, -2} picks the character at 2
    m = prod(odd) * {1: 1, -1: 4, 2: 8, -2: 8}[s]
    U = unit_group(m)
    form = []  # the character as a linear form mod 2 on log coordinates
    for p, q, g, order in U.components:
        if p != 2:
            form.append(1)
        elif g == q - 1:
            form.append(1 if s < 0 else 0)
        else:
            form.append(1 if abs(s) == 2 else 0)
    k = U.rank
    unit = [[int(i == j) for j in range(k)] for i in range(k)]
    gens = [U.exp(unit[i]) if not form[i] else U.exp([2 * x for x in unit[i]]) for i in range(k)]
    odd_idx = [i for i in range(k) if form[i]]
    for i in odd_idx[1:]:
        gens.append(U.exp([a + b for a, b in zip(unit[odd_idx[0]], unit[i])]))
    return make_field(m, gens)


def other_cyclic_quartic(big: CyclotomicFieldDescriptor, known: CyclotomicFieldDescriptor) -> CyclotomicFieldDescriptor:
    """For Gal(big) = Z/4 x Z/2 with known = the fixed field of 0 x Z/2,
    the fixed field of <(2,1)>, the other cyclic quartic subfield."""
    from .groups import enumerate_subgroups

    if big.gal.invariant_factors != (2, 4):
        raise ValueError(f"{big.text()} does not have group Z/4 x Z/2")
    for K in enumerate_subgroups(big.gal):
        if K.order != 2:
            continue
        sub = fixed_field(big, K)
        if sub.gal.is_cyclic() and sub != known:
            return sub
    raise ValueError("no second cyclic quartic subfield")
