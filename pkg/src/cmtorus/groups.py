"""Finite abelian groups in invariant-factor form, their elements and subgroups.

Elements are tuples of residues.  A subgroup is stored through the Hermite
basis of its preimage lattice in Z^k, which makes equality a tuple compare.

>>> G = FiniteAbelianGroup((2, 4))
>>> len(enumerate_subgroups(G))
8
>>> Q, proj = quotient(G, G.subgroup([(0, 2)]))
>>> Q.invariant_factors
(2, 2)
"""

from __future__ import annotations

import itertools
from functools import cached_property
from math import gcd, prod
from typing import Iterable, Iterator, Sequence

from .errors import AmbientMismatch, BoundExceeded
from .intmat import cokernel, hnf_coordinates, hnf_rows, preimage_lattice, reduce_by_hnf

GroupElement = tuple[int, ...]

DEFAULT_SUBGROUP_BOUND = 2**14


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class FiniteAbelianGroup:
    """Z/d1 x ... x Z/dk with d1 | d2 | ... | dk, all di >= 2."""

    __slots__ = ("invariant_factors", "__dict__")

    def __init__(self, invariant_factors: Iterable[int] = ()):
        inv = tuple(int(d) for d in invariant_factors)
        for d in inv:
            if d < 2:
                raise ValueError(f"invariant factors must be >= 2, got {inv}")
        for a, b in zip(inv, inv[1:]):
            if b % a:
                raise ValueError(f"invariant factors must form a divisibility chain, got {inv}")
        self.invariant_factors = inv

    @classmethod
    def from_cyclic_factors(cls, orders: Iterable[int]) -> "FiniteAbelianGroup":
        """Invariant-factor form of a product of cyclic groups (no coordinate map)."""
        o = list(orders)
        rels = [[d if i == j else 0 for j in range(len(o))] for i, d in enumerate(o)]
        mods, _, _ = cokernel(rels, len(o))
        return cls(mods)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteAbelianGroup) and self.invariant_factors == other.invariant_factors

    def __hash__(self) -> int:
        return hash(self.invariant_factors)

    def __repr__(self) -> str:
        return f"FiniteAbelianGroup({self.invariant_factors})"

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "1"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def is_cyclic(self) -> bool:
        return self.rank <= 1

    def is_p_group(self, p: int) -> bool:
        n = self.order
        while n % p == 0:
            n //= p
        return n == 1

    @property
    def identity(self) -> GroupElement:
        return (0,) * self.rank

    def element(self, coords: Iterable[int]) -> GroupElement:
        c = tuple(coords)
        if len(c) != self.rank:
            raise ValueError(f"element {c} has wrong length for {self!r}")
        return tuple(x % d for x, d in zip(c, self.invariant_factors))

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariant_factors))

    def neg(self, a: GroupElement) -> GroupElement:
        return tuple(-x % d for x, d in zip(a, self.invariant_factors))

    def scale(self, k: int, a: GroupElement) -> GroupElement:
        return tuple(k * x % d for x, d in zip(a, self.invariant_factors))

    def sum(self, elems: Iterable[GroupElement]) -> GroupElement:
        out = self.identity
        for e in elems:
            out = self.add(out, e)
        return out

    def gens(self) -> list[GroupElement]:
        k = self.rank
        return [tuple(1 if i == j else 0 for j in range(k)) for i in range(k)]

    def elements(self) -> Iterator[GroupElement]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def element_order(self, g: GroupElement) -> int:
        o = 1
        for x, d in zip(g, self.invariant_factors):
            o = _lcm(o, d // gcd(x, d))
        return o

    def relation_rows(self) -> list[list[int]]:
        k = self.rank
        return [[d if i == j else 0 for j in range(k)] for i, d in enumerate(self.invariant_factors)]

    def subgroup(self, generators: Iterable[Sequence[int]]) -> "Subgroup":
        gens = tuple(self.element(g) for g in generators)
        return Subgroup(self, gens)

    def whole(self) -> "Subgroup":
        return self.subgroup(self.gens())

    def trivial(self) -> "Subgroup":
        return self.subgroup([])


def element_order(G: FiniteAbelianGroup, g: GroupElement) -> int:
    return G.element_order(g)


def is_cyclic(G: FiniteAbelianGroup) -> bool:
    return G.is_cyclic()


class Subgroup:
    """A subgroup of a FiniteAbelianGroup, canonicalized by its preimage lattice."""

    __slots__ = ("ambient", "generators", "canonical_basis", "__dict__")

    def __init__(self, ambient: FiniteAbelianGroup, generators: Sequence[GroupElement]):
        self.ambient = ambient
        self.generators = tuple(generators)
        rows = [list(g) for g in self.generators] + ambient.relation_rows()
        self.canonical_basis = tuple(tuple(r) for r in hnf_rows(rows, ambient.rank))

    @classmethod
    def from_lattice(cls, ambient: FiniteAbelianGroup, rows: Iterable[Sequence[int]]) -> "Subgroup":
        """Subgroup whose preimage lattice is spanned by ``rows`` (plus the relations)."""
        gens = [ambient.element(r) for r in rows]
        gens = [g for g in gens if any(g)]
        return cls(ambient, gens)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.ambient == other.ambient and self.canonical_basis == other.canonical_basis

    def __hash__(self) -> int:
        return hash((self.ambient.invariant_factors, self.canonical_basis))

    def __repr__(self) -> str:
        return f"Subgroup({self.ambient.invariant_factors}, {list(self.canonical_generators())})"

    def key(self) -> tuple:
        return self.canonical_basis

    @cached_property
    def order(self) -> int:
        index = prod(self.canonical_basis[i][i] for i in range(self.ambient.rank))
        return self.ambient.order // index

    @property
    def index(self) -> int:
        return self.ambient.order // self.order

    def canonical_generators(self) -> list[GroupElement]:
        """Nonzero reductions of the canonical basis rows."""
        out = []
        for r in self.canonical_basis:
            g = self.ambient.element(r)
            if any(g):
                out.append(g)
        return out

    def contains(self, g: Sequence[int]) -> bool:
        if self.ambient.order <= 256:
            return tuple(x % d for x, d in zip(g, self.ambient.invariant_factors)) in self.element_set
        rem, _ = reduce_by_hnf(self.canonical_basis, g)
        return not any(rem)

    __contains__ = contains

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        _check_ambient(self, other)
        return all(other.contains(r) for r in self.canonical_basis)

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_whole(self) -> bool:
        return self.order == self.ambient.order

    def coset_rep(self, g: Sequence[int]) -> GroupElement:
        rem, _ = reduce_by_hnf(self.canonical_basis, g)
        return tuple(rem)

    @cached_property
    def structure(self) -> "SubgroupPresentation":
        return SubgroupPresentation(self)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.structure.group.invariant_factors

    def is_cyclic(self) -> bool:
        return self.structure.group.is_cyclic()

    @property
    def exponent(self) -> int:
        return self.structure.group.exponent

    def elements(self) -> list[GroupElement]:
        return list(self.element_set)

    @cached_property
    def element_set(self) -> frozenset:
        st = self.structure
        G = self.ambient
        gens = st.generators_in_ambient
        out = set()
        for c in st.group.elements():
            out.add(G.sum(G.scale(ci, g) for ci, g in zip(c, gens)))
        return frozenset(out)

    def join(self, other: "Subgroup") -> "Subgroup":
        return subgroup_join(self, other)

    def intersect(self, other: "Subgroup") -> "Subgroup":
        _check_ambient(self, other)
        from .intmat import intersect_lattices

        rows = intersect_lattices(self.canonical_basis, other.canonical_basis, self.ambient.rank)
        return Subgroup.from_lattice(self.ambient, rows)

    def multiple(self, k: int) -> "Subgroup":
        """The subgroup k*S."""
        G = self.ambient
        return G.subgroup([G.scale(k, g) for g in self.canonical_generators()])


class SubgroupPresentation:
    """Invariant-factor presentation of a subgroup with coordinate maps."""

    def __init__(self, S: Subgroup):
        G = S.ambient
        k = G.rank
        B = [list(r) for r in S.canonical_basis]
        # express the relations d_j e_j in the basis B
        C = [hnf_coordinates(B, rel) for rel in G.relation_rows()]
        mods, proj, lift = cokernel(C, k) if k else ([], [], [])
        self.subgroup = S
        self.group = FiniteAbelianGroup(mods)
        self._basis = B
        self._proj = proj
        self.generators_in_ambient = []
        for col in lift:
            v = [0] * k
            for c, b in zip(col, B):
                if c:
                    v = [x + c * y for x, y in zip(v, b)]
            self.generators_in_ambient.append(G.element(v))

    def to_ambient(self, h: Sequence[int]) -> GroupElement:
        G = self.subgroup.ambient
        return G.sum(G.scale(c, g) for c, g in zip(h, self.generators_in_ambient))

    def from_ambient(self, g: Sequence[int]) -> GroupElement:
        coords = hnf_coordinates(self._basis, list(g))
        if coords is None:
            raise ValueError(f"{tuple(g)} is not in {self.subgroup!r}")
        return self.group.element(sum(p * c for p, c in zip(row, coords)) for row in self._proj)

    def subgroup_from_ambient(self, T: Subgroup) -> Subgroup:
        return self.group.subgroup([self.from_ambient(g) for g in T.canonical_generators()])


def _check_ambient(a: Subgroup, b: Subgroup) -> None:
    if a.ambient != b.ambient:
        raise AmbientMismatch(f"{a.ambient!r} vs {b.ambient!r}")


def subgroup_join(S1: Subgroup, S2: Subgroup) -> Subgroup:
    _check_ambient(S1, S2)
    return Subgroup.from_lattice(S1.ambient, list(S1.canonical_basis) + list(S2.canonical_basis))


class GroupHom:
    """Homomorphism between finite abelian groups given by an integer matrix."""

    def __init__(self, source: FiniteAbelianGroup, target: FiniteAbelianGroup, matrix: Sequence[Sequence[int]]):
        self.source = source
        self.target = target
        self.matrix = [list(r) for r in matrix]

    def __call__(self, g: Sequence[int]) -> GroupElement:
        return self.target.element(sum(a * x for a, x in zip(row, g)) for row in self.matrix)

    def image(self, S: Subgroup) -> Subgroup:
        return self.target.subgroup([self(g) for g in S.canonical_generators()])

    def preimage(self, K: Subgroup) -> Subgroup:
        rows = preimage_lattice(self.matrix, self.source.rank, [list(r) for r in K.canonical_basis])
        return Subgroup.from_lattice(self.source, rows)

    def kernel(self) -> Subgroup:
        return self.preimage(self.target.trivial())


def quotient(G: FiniteAbelianGroup, S: Subgroup) -> tuple[FiniteAbelianGroup, GroupHom]:
    """G/S in invariant-factor form together with the projection G -> G/S."""
    if S.ambient != G:
        raise AmbientMismatch(f"{S.ambient!r} is not {G!r}")
    mods, proj, _ = cokernel([list(r) for r in S.canonical_basis], G.rank)
    Q = FiniteAbelianGroup(mods)
    return Q, GroupHom(G, Q, proj)


def enumerate_subgroups(G: FiniteAbelianGroup, bound: int = DEFAULT_SUBGROUP_BOUND) -> list[Subgroup]:
    """All subgroups of G, each once, ordered by (order, canonical basis).

    New subgroups are produced by adjoining one element to a known subgroup;
    only coset representatives are tried.
    """
    if G.order > bound:
        raise BoundExceeded(f"|G| = {G.order} exceeds the bound {bound}")
    start = G.trivial()
    seen = {start.key(): start}
    frontier = [start]
    elems = list(G.elements())
    while frontier:
        nxt = []
        for S in frontier:
            reps = {S.coset_rep(g) for g in elems}
            for g in reps:
                if not any(g):
                    continue
                T = Subgroup.from_lattice(G, list(S.canonical_basis) + [list(g)])
                if T.key() not in seen:
                    seen[T.key()] = T
                    nxt.append(T)
        frontier = nxt
    return sorted(seen.values(), key=lambda s: (s.order, s.canonical_basis))


def cyclic_subgroups(G: FiniteAbelianGroup) -> list[Subgroup]:
    out = {}
    for g in G.elements():
        S = G.subgroup([g])
        out.setdefault(S.key(), S)
    return sorted(out.values(), key=lambda s: (s.order, s.canonical_basis))


def abelian_groups_of_order(n: int, p: int | None = None) -> list[FiniteAbelianGroup]:
    """All abelian groups of order n up to isomorphism (invariant-factor form)."""
    from sympy import factorint

    per_prime = []
    for q, e in sorted(factorint(n).items()):
        per_prime.append([(q, part) for part in _partitions(e)])
    out = []
    for choice in itertools.product(*per_prime):
        cyc = [q**a for q, part in choice for a in part]
        out.append(FiniteAbelianGroup.from_cyclic_factors(cyc))
    return sorted(out, key=lambda g: g.invariant_factors)


def _partitions(n: int, largest: int | None = None) -> list[tuple[int, ...]]:
    if largest is None:
        largest = n
    if n == 0:
        return [()]
    out = []
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            out.append((k,) + rest)
    return out
