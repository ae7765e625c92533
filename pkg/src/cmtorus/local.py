"""Local questions (R) and (R-circ) for an abelian extension F/F+/F0.

A descriptor records G = Gal(F1/F0), the order-2 subgroup H+ = Gal(F1/F1+)
(None for the split algebra F+ x F+), the inertia subgroup I, a Frobenius
lift sigma and the number r of factors.

Each question is decided twice: by an oracle computing directly with the
cocharacter lattices, and by matching the known classification patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterator, Sequence

from sympy import isprime

from .errors import InvalidDescriptor, PreconditionUnmet, UnsupportedInertiaShape
from .groups import (
    FiniteAbelianGroup,
    GroupElement,
    Subgroup,
    abelian_groups_of_order,
    enumerate_subgroups,
)
from .lattice import (
    FgAbelianPresentation,
    coflasque_resolution,
    coinvariants,
    invariants,
    sigma_fixed,
    torus_modules,
)
from .intmat import mat_mul, mat_vec
from .verdict import Question, QuestionVerdict, affirmative, negative, out_of_scope

FULL = "full"
INDEX_TWO_UNRAMIFIED = "index_two_unramified"
INDEX_TWO_RAMIFIED = "index_two_ramified"


def _log2_exact(n: int) -> int | None:
    if n < 1 or n & (n - 1):
        return None
    return n.bit_length() - 1


@dataclass(frozen=True)
class LocalExtensionDescriptor:
    group: FiniteAbelianGroup
    h_plus: Subgroup | None
    inertia: Subgroup
    sigma: GroupElement
    r: int = 1
    residue_char: int = 3

    def __post_init__(self):
        G = self.group
        object.__setattr__(self, "sigma", G.element(self.sigma))
        if self.inertia.ambient != G:
            raise InvalidDescriptor("inertia is not a subgroup of the group")
        if self.h_plus is not None:
            if self.h_plus.ambient != G:
                raise InvalidDescriptor("h_plus is not a subgroup of the group")
            if self.h_plus.order != 2:
                from .errors import IndexNotTwo

                raise IndexNotTwo(f"Gal(F/F+) must have order 2, got {self.h_plus.order}")
        if self.r < 1:
            raise InvalidDescriptor("r must be positive")
        if not isprime(self.residue_char):
            raise InvalidDescriptor(f"residue characteristic {self.residue_char} is not prime")
        if not G.subgroup([self.sigma]).join(self.inertia).is_whole():
            raise InvalidDescriptor("sigma does not generate G modulo inertia")
        if self.residue_char != 2 and not self._tame_inertia_ok():
            raise InvalidDescriptor("inertia must be cyclic modulo its wild part")

    def _tame_inertia_ok(self) -> bool:
        # the prime-to-p part of inertia is cyclic
        p = self.residue_char
        inv = [d for d in self.inertia.invariant_factors]
        stripped = []
        for d in inv:
            while d % p == 0:
                d //= p
            if d > 1:
                stripped.append(d)
        return len(stripped) <= 1

    @property
    def is_split(self) -> bool:
        return self.h_plus is None

    @property
    def is_two_group(self) -> bool:
        return self.group.is_p_group(2)

    @property
    def ramified(self) -> bool:
        """Condition (r): F/F+ is a ramified quadratic extension."""
        return self.h_plus is not None and self.h_plus.is_subgroup_of(self.inertia)

    @property
    def inertia_shape(self) -> str:
        inv = self.inertia.invariant_factors
        if len(inv) <= 1:
            return "cyclic"
        if len(inv) == 2 and inv[0] == 2 and _log2_exact(inv[1]) is not None:
            return "two_adic"
        return "unsupported"

    @property
    def supported_shape(self) -> bool:
        if not self.is_two_group:
            return False
        shape = self.inertia_shape
        return shape == "cyclic" or (shape == "two_adic" and self.residue_char == 2)

    @property
    def m(self) -> int | None:
        k = _log2_exact(self.inertia.order)
        if k is None:
            return None
        return k if self.inertia_shape == "cyclic" else k - 1

    @property
    def n(self) -> int | None:
        return _log2_exact(self.inertia.index)

    def with_r(self, r: int) -> "LocalExtensionDescriptor":
        return LocalExtensionDescriptor(self.group, self.h_plus, self.inertia, self.sigma, r, self.residue_char)

    def with_sigma(self, sigma: Sequence[int]) -> "LocalExtensionDescriptor":
        return LocalExtensionDescriptor(self.group, self.h_plus, self.inertia, tuple(sigma), self.r, self.residue_char)

    def describe(self) -> str:
        G = self.group
        hp = "split" if self.h_plus is None else _gens_str(self.h_plus)
        return (
            f"group={','.join(map(str, G.invariant_factors)) or '1'} hplus={hp} "
            f"inertia={_gens_str(self.inertia)} sigma={','.join(map(str, self.sigma))} "
            f"r={self.r} p={self.residue_char}"
        )


def _gens_str(S: Subgroup) -> str:
    gens = S.canonical_generators()
    if not gens:
        return "trivial"
    return ";".join(",".join(map(str, g)) for g in gens)


def make_descriptor(
    invariant_factors: Sequence[int],
    h_plus: Sequence[Sequence[int]] | None,
    inertia: Sequence[Sequence[int]],
    sigma: Sequence[int],
    r: int = 1,
    residue_char: int = 3,
) -> LocalExtensionDescriptor:
    G = FiniteAbelianGroup(invariant_factors)
    hp = None if h_plus is None else G.subgroup(h_plus)
    return LocalExtensionDescriptor(G, hp, G.subgroup(inertia), tuple(sigma), r, residue_char)


def nu_point_image(desc: LocalExtensionDescriptor) -> str:
    """Image of nu on F0-points: everything, or a norm group of index 2."""
    G = desc.group
    if desc.is_split or not G.is_cyclic():
        return FULL
    if desc.inertia.is_subgroup_of(G.whole().multiple(2)):
        return INDEX_TWO_UNRAMIFIED
    return INDEX_TWO_RAMIFIED


@lru_cache(maxsize=None)
def _subgroups(G: FiniteAbelianGroup) -> tuple[Subgroup, ...]:
    return tuple(enumerate_subgroups(G))


_INV_CACHE: dict = {}


def _invariants_cached(G, h_plus, r, H):
    key = (G, h_plus, r, H)
    hit = _INV_CACHE.get(key)
    if hit is None:
        T = torus_modules(G, h_plus, r).T
        hit = invariants(T, H)
        _INV_CACHE[key] = hit
    return hit


def _nu_surjective_on(G, h_plus, r, H) -> bool:
    T = torus_modules(G, h_plus, r).T
    g = 0
    for y in _invariants_cached(G, h_plus, r, H):
        g = gcd(g, T.nu(y))
        if g == 1:
            return True
    return False


@lru_cache(maxsize=None)
def _oracle_search(G, h_plus, inertia, r):
    tested = 0
    for Hp in _subgroups(G):
        if not Hp.join(inertia).is_whole():
            continue
        tested += 1
        if _nu_surjective_on(G, h_plus, r, Hp):
            return Hp, tested
    return None, tested


def decide_R_oracle(desc: LocalExtensionDescriptor) -> QuestionVerdict:
    """Decide (R) from the lattice: look for H' with H'I = G and nu_*(X^{H'}) = Z."""
    G = desc.group
    if desc.is_split:
        return affirmative(Question.R, "split-algebra")
    if G.is_cyclic():
        return affirmative(Question.R, "cyclic-group")
    Hp, tested = _oracle_search(G, desc.h_plus, desc.inertia, desc.r)
    if Hp is not None:
        return affirmative(
            Question.R,
            "subgroup-criterion",
            witness={"H'": _gens_str(Hp), "order": Hp.order},
        )
    return negative(
        Question.R,
        "subgroup-criterion-exhausted",
        witness={"subgroups_tested": tested, "nu_image": "2Z on every X^{H'} with H'I = G"},
    )


# ---------------------------------------------------------------------------
# classification patterns


@dataclass(frozen=True)
class Pattern:
    name: str
    orders: tuple[int, ...]
    h_plus: tuple[int, ...]
    inertia: tuple[tuple[int, ...], ...]


def cyclic_inertia_patterns(m: int, n: int) -> list[Pattern]:
    """Negative patterns when I is cyclic of order 2^m and [G:I] = 2^n."""
    out = []
    if 0 < m < n:
        out.append(Pattern("cyclic-inertia-unramified", (2**m, 2**n), (0, 2 ** (n - 1)), ((1, 0),)))
    for u in range(1, min(m, n)):
        k = m + n - u
        out.append(Pattern(f"cyclic-inertia-ramified[u={u}]", (2**u, 2**k), (0, 2 ** (k - 1)), ((1, 2 ** (n - u)),)))
    return out


def two_adic_patterns(m: int, n: int) -> list[Pattern]:
    """Negative patterns when p = 2, I = Z/2^m x Z/2 and [G:I] = 2^n."""
    out = []
    if m < n:
        out.append(
            Pattern("two-adic-1", (2**m, 2**n, 2), (0, 2 ** (n - 1), 0), ((1, 0, 0), (0, 0, 1)))
        )
    if m <= n:
        out.append(Pattern("two-adic-2", (2**m, 2 ** (n + 1)), (0, 2**n), ((1, 0), (0, 2**n))))
    for u in range(1, min(m, n)):
        k = m + n - u
        out.append(
            Pattern(
                f"two-adic-3[u={u}]",
                (2**u, 2**k, 2),
                (0, 2 ** (k - 1), 0),
                ((1, 2 ** (n - u), 0), (0, 0, 1)),
            )
        )
    for u in range(0, min(m, n)):
        k = m + n - u
        out.append(
            Pattern(
                f"two-adic-4[u={u}]",
                (2 ** (u + 1), 2**k),
                (0, 2 ** (k - 1)),
                ((1, 2 ** (n - u)), (2**u, 0)),
            )
        )
    return out


def _combine(G: FiniteAbelianGroup, coeffs: Sequence[int], images: Sequence[GroupElement]) -> GroupElement:
    return G.sum(G.scale(c, x) for c, x in zip(coeffs, images) if c)


def find_pattern_isomorphism(
    desc: LocalExtensionDescriptor, pat: Pattern
) -> list[GroupElement] | None:
    """Images of the pattern's standard generators under an isomorphism onto G
    carrying (H+, I) to the pattern's subgroups, or None."""
    G = desc.group
    orders = [o for o in pat.orders]
    if FiniteAbelianGroup.from_cyclic_factors([o for o in orders if o > 1]) != G:
        return None
    if desc.h_plus is None:
        return None
    k = len(orders)
    hp_target = next(g for g in desc.h_plus.elements() if any(g))
    I = desc.inertia
    by_order: dict[int, list[GroupElement]] = {}
    for g in G.elements():
        by_order.setdefault(G.element_order(g), []).append(g)

    def support(v):
        return max((j for j, c in enumerate(v) if c), default=-1)

    hp_at = support(pat.h_plus)
    inertia_at = max(support(v) for v in pat.inertia)
    per_gen_at = [support(v) for v in pat.inertia]
    chosen: list[GroupElement] = []

    def ok_at(depth: int) -> bool:
        if depth == hp_at and _combine(G, pat.h_plus, chosen) != hp_target:
            return False
        for v, at in zip(pat.inertia, per_gen_at):
            if at == depth and not I.contains(_combine(G, v, chosen)):
                return False
        if depth == inertia_at:
            imgs = [_combine(G, v, chosen) for v in pat.inertia]
            if G.subgroup(imgs).order != I.order:
                return False
        return True

    def dfs(depth: int) -> bool:
        if depth == k:
            return G.subgroup(chosen).is_whole()
        for x in by_order.get(orders[depth], []):
            chosen.append(x)
            if ok_at(depth) and dfs(depth + 1):
                return True
            chosen.pop()
        return False

    return list(chosen) if dfs(0) else None


def negative_patterns(desc: LocalExtensionDescriptor) -> list[Pattern]:
    m, n = desc.m, desc.n
    if desc.inertia_shape == "cyclic":
        return cyclic_inertia_patterns(m, n)
    return two_adic_patterns(m, n)


def classify_R(desc: LocalExtensionDescriptor) -> QuestionVerdict:
    """Decide (R) by matching the classified negative patterns."""
    if desc.is_split:
        return affirmative(Question.R, "split-algebra")
    if desc.group.is_cyclic():
        return affirmative(Question.R, "cyclic-group")
    if not desc.supported_shape:
        raise UnsupportedInertiaShape(
            f"inertia {desc.inertia.invariant_factors} in {desc.group} with p={desc.residue_char}"
        )
    family = "cyclic-inertia-classification" if desc.inertia_shape == "cyclic" else "two-adic-classification"
    for pat in negative_patterns(desc):
        images = find_pattern_isomorphism(desc, pat)
        if images is not None:
            return negative(
                Question.R,
                family,
                pat.name,
                witness={"pattern": pat.name, "orders": list(pat.orders), "generator_images": images},
            )
    return affirmative(Question.R, family, "no-negative-pattern", witness={"m": desc.m, "n": desc.n})


# ---------------------------------------------------------------------------
# (R-circ): Kottwitz image of the induced part of a coflasque resolution


def kottwitz_target(desc: LocalExtensionDescriptor) -> tuple[FgAbelianPresentation, FgAbelianPresentation]:
    """(X_*(T)_I, X_*(T)_I^sigma)."""
    T = torus_modules(desc.group, desc.h_plus, desc.r).T
    P = coinvariants(T, desc.inertia)
    return P, sigma_fixed(P, T.matrix(desc.sigma))


def _sigma_norm(T, sigma, count):
    n = T.rank
    acc = [[0] * n for _ in range(n)]
    a = [[int(i == j) for j in range(n)] for i in range(n)]
    s = T.matrix(sigma)
    for _ in range(count):
        acc = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(acc, a)]
        a = mat_mul(s, a, n)
    return acc


def kottwitz_cokernel(desc: LocalExtensionDescriptor) -> FgAbelianPresentation:
    """Cokernel of X_*(P)_I^sigma -> X_*(T)_I^sigma for P = sum of Ind(T^{H'}).

    The sigma-fixed part of Ind_{H'}^G(Y)_I is the norm image of Y along
    G/H'I, so the image is generated by N_{H'} y for y in T^{H'}.
    """
    G = desc.group
    T = torus_modules(G, desc.h_plus, desc.r).T
    _, fixed = kottwitz_target(desc)
    images = []
    for Hp in _subgroups(G):
        c = Hp.join(desc.inertia).index
        N = _sigma_norm(T, desc.sigma, c)
        for y in _invariants_cached(G, desc.h_plus, desc.r, Hp):
            images.append(fixed.project(mat_vec(N, y)))
    return fixed.quotient_by(images)


def kottwitz_cokernel_via_resolution(desc: LocalExtensionDescriptor) -> FgAbelianPresentation:
    """Same cokernel, computed from an explicit coflasque resolution."""
    T = torus_modules(desc.group, desc.h_plus, desc.r).T
    res = coflasque_resolution(T)
    PP = coinvariants(res.P, desc.inertia)
    Pfix = sigma_fixed(PP, res.P.matrix(desc.sigma))
    _, fixed = kottwitz_target(desc)
    images = []
    for gen in range(Pfix.ngens):
        # lift the fixed generator to the resolution lattice, map to T
        f_coords = [row[gen] for row in _lift_matrix(Pfix)]
        y = [0] * PP.ngens
        for c, b in zip(f_coords, Pfix.basis_in_parent):
            if c:
                y = [u + c * v for u, v in zip(y, b)]
        x = [0] * res.P.rank
        for c, lf in zip(y, PP.lift):
            if c:
                x = [u + c * v for u, v in zip(x, lf)]
        images.append(fixed.project(res.map(x)))
    return fixed.quotient_by(images)


def _lift_matrix(P: FgAbelianPresentation):
    return [[lf[i] for lf in P.lift] for i in range(P.ambient_rank)]


def decide_R_circ(desc: LocalExtensionDescriptor) -> QuestionVerdict:
    """Decide (R-circ): surjectivity of X_*(P)_I^sigma -> X_*(T)_I^sigma."""
    coker = kottwitz_cokernel(desc)
    if coker.is_trivial():
        return affirmative(Question.RCIRC, "kottwitz-image-surjective")
    order = coker.torsion_order if coker.free_rank == 0 else 0
    return negative(
        Question.RCIRC,
        "kottwitz-image-cokernel",
        witness={"cokernel": str(coker), "order": order if order else "infinite"},
        cokernel=coker,
    )


def classify_R_circ(desc: LocalExtensionDescriptor) -> QuestionVerdict:
    """Decide (R-circ) from the classification, given that (R) holds."""
    if not decide_R_oracle(desc).affirmative:
        raise PreconditionUnmet("(R) is negative for this descriptor")
    if desc.is_split:
        return affirmative(Question.RCIRC, "split-algebra")
    if not desc.ramified:
        return affirmative(Question.RCIRC, "unramified-quadratic-factor")
    if desc.group.is_cyclic():
        return affirmative(Question.RCIRC, "cyclic-group")
    if not desc.is_two_group or desc.inertia_shape != "cyclic":
        return out_of_scope(Question.RCIRC, "ramified-noncyclic-inertia-unclassified")
    m, n = desc.m, desc.n
    if m <= n:
        return affirmative(Question.RCIRC, "ramified-cyclic-inertia", "m<=n", witness={"m": m, "n": n})
    return negative(
        Question.RCIRC,
        "ramified-cyclic-inertia",
        "m>n",
        witness={"m": m, "n": n, "cokernel": "Z/2", "order": 2},
    )


def kottwitz_equal_K(desc: LocalExtensionDescriptor) -> bool:
    """True iff the Kottwitz kernel is the whole maximal compact subgroup,
    i.e. X_*(T)_I^sigma is torsion-free."""
    _, fixed = kottwitz_target(desc)
    return not fixed.torsion_factors


# ---------------------------------------------------------------------------
# sweeps


def two_groups_up_to(max_order: int, max_rank: int | None = None) -> list[FiniteAbelianGroup]:
    out = []
    k = 1
    while 2**k <= max_order:
        for G in abelian_groups_of_order(2**k):
            if max_rank is None or G.rank <= max_rank:
                out.append(G)
        k += 1
    return out


def sweep_descriptors(
    max_order: int = 64,
    shape: str = "cyclic",
    residue_char: int = 3,
    r: int = 1,
    all_sigma: bool = True,
) -> Iterator[LocalExtensionDescriptor]:
    """Every non-split descriptor over a 2-group with the given inertia shape."""
    for G in two_groups_up_to(max_order):
        subs = _subgroups(G)
        involutions = [S for S in subs if S.order == 2]
        elems = list(G.elements())
        for I in subs:
            inv = I.invariant_factors
            if shape == "cyclic" and len(inv) > 1:
                continue
            if shape == "two_adic" and not (len(inv) == 2 and inv[0] == 2):
                continue
            sigmas = [g for g in elems if G.subgroup([g]).join(I).is_whole()]
            if not sigmas:
                continue
            if not all_sigma:
                sigmas = sigmas[:1]
            for hp in involutions:
                for s in sigmas:
                    yield LocalExtensionDescriptor(G, hp, I, s, r, residue_char)
