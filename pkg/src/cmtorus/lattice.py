"""Galois lattices: cocharacter modules of norm tori and their (co)homology.

A GaloisLattice is Z^rank with one integer matrix per generator of a finite
abelian group G, acting on column vectors.  The module X of the torus
T_{F/F+} is built as the fiber product

    X = {(x_1, ..., x_r, a) in Z[G]^r + Z : pi(x_i) = a * N for all i}

where pi: Z[G] -> Z[G/H+] and N is the sum of all cosets; nu_* is a.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .errors import BoundExceeded, IndexNotTwo, NotCyclic, NotDescending
from .groups import FiniteAbelianGroup, GroupElement, Subgroup, enumerate_subgroups
from .intmat import (
    IntegerMatrix,
    cokernel,
    hnf_coordinates,
    hnf_rows,
    kernel_basis,
    mat_mul,
    mat_vec,
    preimage_lattice,
)

Matrix = list[list[int]]

DEFAULT_LATTICE_BOUND = 2**10


def _eye(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _minus_identity(a: Matrix) -> Matrix:
    return [[x - (i == j) for j, x in enumerate(row)] for i, row in enumerate(a)]


def _columns_to_matrix(cols: Sequence[Sequence[int]], nrows: int) -> Matrix:
    return [[c[i] for c in cols] for i in range(nrows)]


def _mat_pow(a: Matrix, e: int) -> Matrix:
    n = len(a)
    out = _eye(n)
    base = a
    while e:
        if e & 1:
            out = mat_mul(out, base, n)
        e >>= 1
        if e:
            base = mat_mul(base, base, n)
    return out


def _permutation_matrix(perm: Sequence[int]) -> Matrix:
    """Matrix sending basis vector j to basis vector perm[j]."""
    n = len(perm)
    m = [[0] * n for _ in range(n)]
    for j, i in enumerate(perm):
        m[i][j] = 1
    return m


def _change_basis(action: Matrix, basis: Sequence[Sequence[int]]) -> Matrix:
    """Matrix of ``action`` restricted to the span of the HNF ``basis`` rows."""
    cols = []
    for b in basis:
        c = hnf_coordinates(basis, mat_vec(action, b))
        if c is None:
            raise ValueError("sublattice is not stable under the action")
        cols.append(c)
    return _columns_to_matrix(cols, len(basis))


class GaloisLattice:
    """Z^rank with a G-action given on the standard generators of G."""

    def __init__(
        self,
        group: FiniteAbelianGroup,
        action: Sequence[Sequence[Sequence[int]]],
        nu_star: Sequence[int] | None = None,
        rank: int | None = None,
        ambient_basis: Sequence[Sequence[int]] | None = None,
    ):
        self.group = group
        self.action = [[list(r) for r in a] for a in action]
        if len(self.action) != group.rank:
            raise ValueError("one action matrix per group generator is required")
        if rank is None:
            if not self.action:
                raise ValueError("rank must be given for a trivial group")
            rank = len(self.action[0])
        self.rank = rank
        self.nu_star = tuple(nu_star) if nu_star is not None else None
        self.ambient_basis = [list(b) for b in ambient_basis] if ambient_basis is not None else None
        self._cache: dict[GroupElement, Matrix] = {}

    def __repr__(self) -> str:
        return f"GaloisLattice(rank={self.rank}, group={self.group.invariant_factors})"

    def matrix(self, g: Sequence[int]) -> Matrix:
        g = self.group.element(g)
        hit = self._cache.get(g)
        if hit is not None:
            return hit
        out = _eye(self.rank)
        for e, a in zip(g, self.action):
            if e:
                out = mat_mul(out, _mat_pow(a, e), self.rank)
        self._cache[g] = out
        return out

    def act(self, g: Sequence[int], v: Sequence[int]) -> list[int]:
        return mat_vec(self.matrix(g), v)

    def nu(self, v: Sequence[int]) -> int:
        if self.nu_star is None:
            raise ValueError("lattice carries no nu_star")
        return sum(a * b for a, b in zip(self.nu_star, v))

    def check(self) -> None:
        """Verify the module axioms; raise ValueError on failure."""
        n = self.rank
        eye = _eye(n)
        for a, d in zip(self.action, self.group.invariant_factors):
            if abs(IntegerMatrix(a, n).det()) != 1:
                raise ValueError("action matrix is not unimodular")
            if _mat_pow(a, d) != eye:
                raise ValueError("generator order relation fails")
        for i, a in enumerate(self.action):
            for b in self.action[i + 1 :]:
                if mat_mul(a, b, n) != mat_mul(b, a, n):
                    raise ValueError("action matrices do not commute")
        if self.nu_star is not None:
            for a in self.action:
                if [sum(self.nu_star[i] * a[i][j] for i in range(n)) for j in range(n)] != list(self.nu_star):
                    raise ValueError("nu_star is not invariant")

    def sublattice(self, basis: Sequence[Sequence[int]]) -> "GaloisLattice":
        """The G-stable sublattice spanned by HNF rows ``basis`` (in its own coordinates)."""
        basis = [list(b) for b in basis]
        action = [_change_basis(a, basis) for a in self.action]
        nu = None
        if self.nu_star is not None:
            nu = [self.nu(b) for b in basis]
        return GaloisLattice(self.group, action, nu, rank=len(basis))


class LatticeMap:
    """A G-equivariant map source -> target, matrix of shape target.rank x source.rank."""

    def __init__(self, source: GaloisLattice, target: GaloisLattice, matrix: Sequence[Sequence[int]]):
        self.source = source
        self.target = target
        self.matrix = [list(r) for r in matrix]

    def __call__(self, v: Sequence[int]) -> list[int]:
        return mat_vec(self.matrix, v)

    def is_equivariant(self) -> bool:
        m = self.matrix
        for a, b in zip(self.source.action, self.target.action):
            if mat_mul(m, a, self.source.rank) != mat_mul(b, m, self.source.rank):
                return False
        return True


def build_res_gm(G: FiniteAbelianGroup, bound: int = DEFAULT_LATTICE_BOUND) -> GaloisLattice:
    """The regular representation Z[G]; basis vector i is the i-th element of G."""
    if G.order > bound:
        raise BoundExceeded(f"|G| = {G.order} exceeds {bound}")
    elems = list(G.elements())
    index = {g: i for i, g in enumerate(elems)}
    action = []
    for s in G.gens():
        action.append(_permutation_matrix([index[G.add(s, g)] for g in elems]))
    return GaloisLattice(G, action, rank=len(elems))


class TorusModules:
    """X_*(T^1), X_*(T) and the inclusion, for a homogeneous algebra of r factors."""

    def __init__(self, T1: GaloisLattice, T: GaloisLattice, embedding: LatticeMap):
        self.T1 = T1
        self.T = T
        self.embedding = embedding

    def __iter__(self):
        return iter((self.T1, self.T, self.embedding))


def build_torus_modules(desc) -> TorusModules:
    """Torus lattices for a descriptor with ``group``, ``h_plus`` and ``r``.

    ``h_plus`` of None means the split algebra F = F+ x F+.
    """
    return torus_modules(desc.group, desc.h_plus, desc.r)


@lru_cache(maxsize=4096)
def torus_modules(G: FiniteAbelianGroup, h_plus: Subgroup | None, r: int = 1) -> TorusModules:
    if r < 1:
        raise ValueError("r must be positive")
    if G.order * r > DEFAULT_LATTICE_BOUND:
        raise BoundExceeded(f"lattice of rank ~{G.order * r} exceeds {DEFAULT_LATTICE_BOUND}")
    elems = list(G.elements())
    index = {g: i for i, g in enumerate(elems)}
    if h_plus is None:
        # F-set is G x {0, 1} over the F+-set G
        fset = [(g, s) for s in (0, 1) for g in elems]
        fpos = {x: i for i, x in enumerate(fset)}
        quotient_of = [index[g] for g, _ in fset]
        nquot = len(elems)
        perms = [[fpos[(G.add(t, g), s)] for g, s in fset] for t in G.gens()]
    else:
        if h_plus.ambient != G:
            raise ValueError("h_plus is not a subgroup of the group")
        if h_plus.order != 2:
            raise IndexNotTwo(f"Gal(F/F+) must have order 2, got order {h_plus.order}")
        reps: dict[GroupElement, int] = {}
        quotient_of = []
        for g in elems:
            quotient_of.append(reps.setdefault(h_plus.coset_rep(g), len(reps)))
        nquot = len(reps)
        perms = [[index[G.add(t, g)] for g in elems] for t in G.gens()]
        fset = elems
    N = len(fset)
    dim = r * N + 1
    phi = []
    for i in range(r):
        for c in range(nquot):
            row = [0] * dim
            for j in range(N):
                if quotient_of[j] == c:
                    row[i * N + j] = 1
            row[-1] = -1
            phi.append(row)
    B = kernel_basis(phi, dim)
    ambient_action = []
    for perm in perms:
        full = [i * N + perm[j] for i in range(r) for j in range(N)] + [dim - 1]
        ambient_action.append(_permutation_matrix(full))
    action = [_change_basis(a, B) for a in ambient_action]
    nu = [b[-1] for b in B]
    T = GaloisLattice(G, action, nu, rank=len(B), ambient_basis=B)
    C = kernel_basis([nu], len(B))
    T1 = T.sublattice(C)
    T1.ambient_basis = [mat_vec(_columns_to_matrix(B, dim), c) for c in C]
    emb = LatticeMap(T1, T, _columns_to_matrix(C, len(B)))
    return TorusModules(T1, T, emb)


def invariants(M: GaloisLattice, H: Subgroup) -> list[list[int]]:
    """HNF basis of the fixed sublattice M^H."""
    rows: Matrix = []
    for h in H.canonical_generators():
        rows.extend(_minus_identity(M.matrix(h)))
    rows = [r for r in rows if any(r)]
    if not rows:
        return _eye(M.rank)
    return kernel_basis(rows, M.rank)


class FgAbelianPresentation:
    """Z^free_rank + (+)Z/f_i presented as a quotient of an ambient lattice.

    ``projection`` maps ambient coordinates to invariant coordinates (free
    coordinates first, then torsion).  ``lift`` holds an ambient preimage of
    each invariant generator.  ``relations`` generate the kernel.
    """

    def __init__(self, moduli, projection, lift, relations, ambient_rank, basis_in_parent=None, parent=None):
        self.moduli = tuple(moduli)
        self.free_rank = sum(1 for x in self.moduli if x == 0)
        self.torsion_factors = tuple(x for x in self.moduli if x)
        self.projection = [list(r) for r in projection]
        self.lift = [list(c) for c in lift]
        self.relations = [list(r) for r in relations]
        self.ambient_rank = ambient_rank
        self.basis_in_parent = basis_in_parent
        self.parent = parent

    def __repr__(self) -> str:
        return f"FgAbelianPresentation(free_rank={self.free_rank}, torsion={list(self.torsion_factors)})"

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{f}" for f in self.torsion_factors]
        return " + ".join(parts) if parts else "0"

    @property
    def ngens(self) -> int:
        return len(self.moduli)

    @property
    def torsion_order(self) -> int:
        out = 1
        for f in self.torsion_factors:
            out *= f
        return out

    def is_trivial(self) -> bool:
        return not self.moduli

    def shape(self) -> tuple[int, tuple[int, ...]]:
        return (self.free_rank, self.torsion_factors)

    def projection_matrix(self) -> IntegerMatrix:
        return IntegerMatrix(self.projection, self.ambient_rank)

    def reduce(self, y: Sequence[int]) -> tuple[int, ...]:
        return tuple(v % m if m else v for v, m in zip(y, self.moduli))

    def project(self, x: Sequence[int]) -> tuple[int, ...]:
        """Image in invariant coordinates of an ambient vector."""
        if self.basis_in_parent is not None:
            y = self.parent.project(x)
            # F contains the parent's relations, so any representative works
            c = hnf_coordinates(self.basis_in_parent, list(y))
            if c is None:
                raise ValueError("vector does not lie in this subgroup")
            x = c
        return self.reduce(mat_vec(self.projection, x))

    def quotient_by(self, images: Sequence[Sequence[int]]) -> "FgAbelianPresentation":
        """Cokernel of the subgroup generated by ``images`` (invariant coordinates)."""
        n = self.ngens
        rels = [[m if i == j else 0 for j in range(n)] for i, m in enumerate(self.moduli) if m]
        rels += [list(v) for v in images]
        mods, proj, lift = cokernel(rels, n)
        return FgAbelianPresentation(mods, proj, lift, rels, n)


def coinvariants(M: GaloisLattice, H: Subgroup) -> FgAbelianPresentation:
    """M_H = M / sum (h-1)M, in invariant-factor form."""
    rels: Matrix = []
    for h in H.canonical_generators():
        a = _minus_identity(M.matrix(h))
        for j in range(M.rank):
            col = [a[i][j] for i in range(M.rank)]
            if any(col):
                rels.append(col)
    rels = hnf_rows(rels, M.rank)
    mods, proj, lift = cokernel(rels, M.rank)
    return FgAbelianPresentation(mods, proj, lift, rels, M.rank)


def induced_action(P: FgAbelianPresentation, sigma_action: Sequence[Sequence[int]]) -> Matrix:
    """Matrix of the induced endomorphism on the invariant coordinates of P."""
    a = [list(r) for r in sigma_action]
    for rel in P.relations:
        img = P.reduce(mat_vec(P.projection, mat_vec(a, rel)))
        if any(img):
            raise NotDescending("sigma does not preserve the relation lattice")
    cols = [P.reduce(mat_vec(P.projection, mat_vec(a, lf))) for lf in P.lift]
    return _columns_to_matrix(cols, P.ngens)


def sigma_fixed(P: FgAbelianPresentation, sigma_action) -> FgAbelianPresentation:
    """The subgroup of P fixed by sigma, presented on its own lattice.

    The result's ambient lattice is the preimage F of the fixed subgroup in
    the invariant coordinates of P; ``basis_in_parent`` records F.
    """
    if isinstance(sigma_action, IntegerMatrix):
        sigma_action = sigma_action.tolist()
    S = induced_action(P, sigma_action)
    n = P.ngens
    diag = [[m if i == j else 0 for j in range(n)] for i, m in enumerate(P.moduli) if m]
    if n == 0:
        return FgAbelianPresentation((), [], [], [], 0, basis_in_parent=[], parent=P)
    F = preimage_lattice(_minus_identity(S), n, diag)
    rels = [hnf_coordinates(F, d) for d in diag]
    mods, proj, lift = cokernel(rels, len(F))
    return FgAbelianPresentation(mods, proj, lift, rels, len(F), basis_in_parent=F, parent=P)


def _cyclic_generator(H: Subgroup) -> GroupElement:
    G = H.ambient
    for g in H.canonical_generators() + H.elements():
        if G.element_order(g) == H.order:
            return g
    if H.order == 1:
        return G.identity
    raise NotCyclic(f"{H!r} is not cyclic")


def h1_cyclic(M: GaloisLattice, H: Subgroup) -> FiniteAbelianGroup:
    """H^1(H, M) = ker(N_h) / im(h - 1) for cyclic H = <h>."""
    if not H.is_cyclic():
        raise NotCyclic(f"{H!r} is not cyclic")
    if H.order == 1:
        return FiniteAbelianGroup(())
    h = _cyclic_generator(H)
    G = M.group
    n = M.rank
    norm = [[0] * n for _ in range(n)]
    g = G.identity
    for _ in range(H.order):
        a = M.matrix(g)
        norm = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(norm, a)]
        g = G.add(g, h)
    K = kernel_basis(norm, n)
    a = _minus_identity(M.matrix(h))
    rels = []
    for j in range(n):
        col = [a[i][j] for i in range(n)]
        if any(col):
            c = hnf_coordinates(K, col)
            if c is None:
                raise AssertionError("image of h-1 not inside the kernel of the norm")
            rels.append(c)
    mods, _, _ = cokernel(rels, len(K))
    if any(m == 0 for m in mods):
        raise AssertionError("H^1 of a finite group must be finite")
    return FiniteAbelianGroup(mods)


def h1(M: GaloisLattice, H: Subgroup) -> FiniteAbelianGroup:
    """H^1(H, M) for any subgroup, via cocycles on a presentation of H.

    With H = <h_1> x ... x <h_t>, a cocycle is (m_1, ..., m_t) with
    N_{h_i} m_i = 0 and (h_i - 1) m_j = (h_j - 1) m_i.
    """
    if H.order == 1:
        return FiniteAbelianGroup(())
    st = H.structure
    hs = st.generators_in_ambient
    orders = st.group.invariant_factors
    t, n = len(hs), M.rank
    G = M.group
    rows: Matrix = []
    for i, (h, o) in enumerate(zip(hs, orders)):
        norm = [[0] * n for _ in range(n)]
        g = G.identity
        for _ in range(o):
            a = M.matrix(g)
            norm = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(norm, a)]
            g = G.add(g, h)
        for r in norm:
            row = [0] * (t * n)
            row[i * n : (i + 1) * n] = r
            rows.append(row)
    dm = [_minus_identity(M.matrix(h)) for h in hs]
    for i in range(t):
        for j in range(i + 1, t):
            for k in range(n):
                row = [0] * (t * n)
                row[j * n : (j + 1) * n] = dm[i][k]
                row[i * n : (i + 1) * n] = [-x for x in dm[j][k]]
                rows.append(row)
    Z = kernel_basis([r for r in rows if any(r)], t * n)
    rels = []
    for k in range(n):
        cob = []
        for i in range(t):
            cob.extend(dm[i][r][k] for r in range(n))
        if any(cob):
            c = hnf_coordinates(Z, cob)
            if c is None:
                raise AssertionError("coboundary is not a cocycle")
            rels.append(c)
    mods, _, _ = cokernel(rels, len(Z))
    if any(m == 0 for m in mods):
        raise AssertionError("H^1 of a finite group must be finite")
    return FiniteAbelianGroup(mods)


def is_coflasque(M: GaloisLattice) -> bool:
    for H in enumerate_subgroups(M.group):
        if H.order == 1:
            continue
        grp = h1_cyclic(M, H) if H.is_cyclic() else h1(M, H)
        if grp.order != 1:
            return False
    return True


class CoflasqueResolution:
    def __init__(self, P: GaloisLattice, map: LatticeMap, F: GaloisLattice, summands):
        self.P = P
        self.map = map
        self.F = F
        self.summands = summands  # list of (H', coset reps, invariant basis)

    def __iter__(self):
        return iter((self.P, self.map, self.F))


def coflasque_resolution(T: GaloisLattice, bound: int = DEFAULT_LATTICE_BOUND) -> CoflasqueResolution:
    """P = (+)_{H'} Ind_{H'}^G(T^{H'}) -> T with kernel F."""
    G = T.group
    summands = []
    cols: list[list[int]] = []
    for Hp in enumerate_subgroups(G):
        Y = invariants(T, Hp)
        if not Y:
            continue
        reps = sorted({Hp.coset_rep(g) for g in G.elements()})
        summands.append((Hp, reps, Y))
        for rep in reps:
            a = T.matrix(rep)
            for y in Y:
                cols.append(mat_vec(a, y))
    rankP = len(cols)
    if rankP > bound:
        raise BoundExceeded(f"resolution of rank {rankP} exceeds {bound}")
    action = []
    for s in G.gens():
        perm = []
        offset = 0
        for Hp, reps, Y in summands:
            pos = {r: i for i, r in enumerate(reps)}
            t = len(Y)
            for i, rep in enumerate(reps):
                j = pos[Hp.coset_rep(G.add(s, rep))]
                for b in range(t):
                    perm.append(offset + j * t + b)
            offset += len(reps) * t
        action.append(_permutation_matrix(perm))
    P = GaloisLattice(G, action, rank=rankP)
    mat = _columns_to_matrix(cols, T.rank)
    K = kernel_basis(mat, rankP)
    F = P.sublattice(K)
    F.ambient_basis = K
    return CoflasqueResolution(P, LatticeMap(P, T, mat), F, summands)



def _gf2_rank(rows: Sequence[Sequence[int]]) -> int:
    masks = []
    for r in rows:
        v = 0
        for i, x in enumerate(r):
            if x & 1:
                v |= 1 << i
        masks.append(v)
    rank = 0
    while masks:
        piv = masks.pop()
        if not piv:
            continue
        rank += 1
        low = piv & -piv
        masks = [m ^ piv if m & low else m for m in masks]
    return rank


def presentation_report(m: int, n: int, r: int) -> dict[str, bool]:
    """Check the shape of the I-coinvariants of T^1 and T when I is cyclic of
    order 2^m, [G:I] = 2^n, G = Z/2^m x Z/2^n and F/F+ is ramified."""
    if min(m, n, r) < 1:
        raise ValueError("m, n, r must be positive")
    if m <= n:
        G = FiniteAbelianGroup((2**m, 2**n))
        tau, sig = (1, 0), (0, 1)
    else:
        G = FiniteAbelianGroup((2**n, 2**m))
        tau, sig = (0, 1), (1, 0)
    hp = G.subgroup([G.scale(2 ** (m - 1), tau)])
    I = G.subgroup([tau])
    mods = torus_modules(G, hp, r)
    T1, T, emb = mods
    N = 2**n * r
    P1 = coinvariants(T1, I)
    P = coinvariants(T, I)
    out = {
        "T1_coinvariants": P1.free_rank == 0 and P1.torsion_factors == (2,) * N,
        "T_coinvariants": P.free_rank == 1 and P.torsion_factors == (2,) * (N - 1),
    }
    # the induced map: image is the torsion of T_I and the cokernel is Z
    images = [P.project(emb(lf)) for lf in P1.lift]
    free_pos = [i for i, x in enumerate(P.moduli) if x == 0]
    in_torsion = all(all(v[i] == 0 for i in free_pos) for v in images)
    coker = P.quotient_by(images)
    out["connecting_map"] = in_torsion and coker.free_rank == 1 and not coker.torsion_factors
    # sigma permutes a basis of T1_I in r orbits of length 2^n
    S = induced_action(P1, T1.matrix(sig))
    Spow = _mat_pow(S, 2**n)
    unipotent = all((x - (i == j)) % 2 == 0 for i, row in enumerate(Spow) for j, x in enumerate(row))
    out["sigma_free_module"] = unipotent and _gf2_rank(_minus_identity(S)) == N - r
    # the explicit generators span the same lattices as the computed kernels
    elems = list(G.elements())
    index = {g: i for i, g in enumerate(elems)}
    size = G.order
    dim = r * size + 1
    half = 2 ** (m - 1)
    diffs, section = [], [0] * dim
    section[-1] = 1
    for i in range(r):
        for nu in range(2**n):
            for mu in range(half):
                a = G.add(G.scale(nu, sig), G.scale(mu, tau))
                b = G.add(a, G.scale(half, tau))
                v = [0] * dim
                v[i * size + index[a]] += 1
                v[i * size + index[b]] -= 1
                diffs.append(v)
                section[i * size + index[a]] = 1
    out["explicit_basis_T1"] = len(diffs) == T1.rank and hnf_rows(diffs, dim) == hnf_rows(T1.ambient_basis, dim)
    out["explicit_basis_T"] = hnf_rows(diffs + [section], dim) == hnf_rows(T.ambient_basis, dim)
    return out


def orbp_presentation_check(m: int, n: int, r: int) -> bool:
    return all(presentation_report(m, n, r).values())
