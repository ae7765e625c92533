"""Exact integer matrices: Smith and Hermite normal forms, kernels, cokernels.

Matrices are stored row-major as lists of Python ints, so entries never
overflow.  Vectors are plain sequences of ints and matrices act on column
vectors.

>>> U, D, V = smith_normal_form(IntegerMatrix([[2, 0], [0, 3]]))
>>> D.diagonal()
[1, 6]
>>> (U @ IntegerMatrix([[2, 0], [0, 3]]) @ V) == D
True
"""

from __future__ import annotations

from typing import Iterable, Sequence

Vector = Sequence[int]


class IntegerMatrix:
    """An immutable integer matrix with arbitrary precision entries."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, entries: Iterable[Iterable[int]], cols: int | None = None):
        grid = tuple(tuple(int(x) for x in row) for row in entries)
        if cols is None:
            if not grid:
                raise ValueError("column count needed for a matrix with no rows")
            cols = len(grid[0])
        for row in grid:
            if len(row) != cols:
                raise ValueError("ragged matrix")
        self.rows = len(grid)
        self.cols = cols
        self._entries = grid

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(_identity(n), n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Vector], nrows: int) -> "IntegerMatrix":
        return cls([[c[i] for c in columns] for i in range(nrows)], len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._entries]

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(self.columns(), self.rows)

    def diagonal(self) -> list[int]:
        return [self._entries[i][i] for i in range(min(self.rows, self.cols))]

    def apply(self, v: Vector) -> list[int]:
        return mat_vec(self._entries, v)

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return IntegerMatrix(mat_mul(self._entries, other._entries, other.cols), other.cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self.shape, self._entries))

    def __repr__(self) -> str:
        return f"IntegerMatrix({[list(r) for r in self._entries]!r})"

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return determinant(self._entries)

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_vec(a: Sequence[Vector], v: Vector) -> list[int]:
    return [sum(x * y for x, y in zip(row, v) if x) for row in a]


def mat_mul(a: Sequence[Vector], b: Sequence[Vector], bcols: int | None = None) -> list[list[int]]:
    if bcols is None:
        bcols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * bcols
        for x, brow in zip(row, b):
            if x:
                for j, y in enumerate(brow):
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def determinant(a: Sequence[Vector]) -> int:
    """Fraction-free Bareiss elimination."""
    m = [list(r) for r in a]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def _axpy(dst: list[int], q: int, src: Sequence[int]) -> list[int]:
    """Return dst - q*src."""
    return [a - q * b for a, b in zip(dst, src)]


def smith_normal_form(
    A: IntegerMatrix, *, transforms: bool = True
) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Return (U, D, V) with U*A*V = D diagonal, nonnegative, divisibility chain."""
    U, D, V, _ = _snf(A.tolist(), A.rows, A.cols, want_v=transforms, want_uinv=False)
    return (
        IntegerMatrix(U, A.rows),
        IntegerMatrix(D, A.cols),
        IntegerMatrix(V, A.cols),
    )


def _snf(a, m, n, *, want_v=True, want_uinv=False):
    """Core SNF.  Returns (U, D, V, Uinv) as nested lists (V/Uinv may be None)."""
    a = [list(r) for r in a]
    U = _identity(m)
    Uinv_t = _identity(m) if want_uinv else None  # rows are columns of U^-1
    Vt = _identity(n) if want_v else None  # rows are columns of V

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        if Uinv_t is not None:
            Uinv_t[i], Uinv_t[j] = Uinv_t[j], Uinv_t[i]

    def row_sub(i, q, t):
        # row_i -= q * row_t
        a[i] = _axpy(a[i], q, a[t])
        U[i] = _axpy(U[i], q, U[t])
        if Uinv_t is not None:
            Uinv_t[t] = _axpy(Uinv_t[t], -q, Uinv_t[i])

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        if Vt is not None:
            Vt[i], Vt[j] = Vt[j], Vt[i]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            p = a[t][t]
            restart = False
            for i in range(t + 1, m):
                x = a[i][t]
                if x:
                    row_sub(i, x // p, t)
                    if a[i][t]:
                        swap_rows(i, t)
                        restart = True
                        break
            if restart:
                continue
            p = a[t][t]
            rowt = a[t]
            for j in range(t + 1, n):
                x = rowt[j]
                if x:
                    q = x // p
                    # column t is clear below the pivot, so only row t changes
                    rowt[j] = x - q * p
                    if Vt is not None:
                        Vt[j] = _axpy(Vt[j], q, Vt[t])
                    if rowt[j]:
                        swap_cols(j, t)
                        restart = True
                        break
            if restart:
                continue
            p = a[t][t]
            bad = None
            for i in range(t + 1, m):
                row = a[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # row_t += row_bad
            row_sub(t, -1, bad)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
            if Uinv_t is not None:
                Uinv_t[t] = [-x for x in Uinv_t[t]]
        t += 1
    V = [list(c) for c in zip(*Vt)] if Vt is not None else None
    if Vt is not None and n == 0:
        V = []
    Uinv = [list(c) for c in zip(*Uinv_t)] if Uinv_t is not None else None
    return U, a, V, Uinv


def hnf_rows(vectors: Iterable[Vector], ncols: int) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by ``vectors``.

    Rows are in echelon form with positive pivots and entries above each
    pivot reduced into [0, pivot).  The result is a canonical basis.
    """
    pool = [list(v) for v in vectors if any(v)]
    basis: list[list[int]] = []
    pivots: list[int] = []
    col = 0
    while pool and col < ncols:
        active = [r for r in pool if r[col]]
        if not active:
            col += 1
            continue
        rest = [r for r in pool if not r[col]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            pc = piv[col]
            nxt = [piv]
            for r in active[1:]:
                r = _axpy(r, r[col] // pc, piv)
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        piv = active[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        pivots.append(col)
        pool = rest
        col += 1
    for k in range(len(basis)):
        c, p = pivots[k], basis[k][pivots[k]]
        for i in range(k):
            q = basis[i][c] // p
            if q:
                basis[i] = _axpy(basis[i], q, basis[k])
    return basis


def hnf_pivots(basis: Sequence[Vector]) -> list[int]:
    return [next(j for j, x in enumerate(r) if x) for r in basis]


def reduce_by_hnf(basis: Sequence[Vector], v: Vector) -> tuple[list[int], list[int]]:
    """Reduce v modulo an HNF basis; return (remainder, coefficients)."""
    v = list(v)
    coeffs = []
    for row in basis:
        c = next(j for j, x in enumerate(row) if x)
        q = v[c] // row[c]
        if q:
            v = _axpy(v, q, row)
        coeffs.append(q)
    return v, coeffs


def hnf_contains(basis: Sequence[Vector], v: Vector) -> bool:
    rem, _ = reduce_by_hnf(basis, v)
    return not any(rem)


def hnf_coordinates(basis: Sequence[Vector], v: Vector) -> list[int] | None:
    """Integer coordinates of v in an HNF basis, or None if v is not in the lattice."""
    rem, coeffs = reduce_by_hnf(basis, v)
    return None if any(rem) else coeffs


def kernel_basis(a: Sequence[Vector], ncols: int) -> list[list[int]]:
    """Basis of {x in Z^ncols : a x = 0}, returned in Hermite form.

    Uses a unimodular row reduction of the transpose augmented with the
    identity; the kernel is automatically saturated.
    """
    m = len(a)
    if m == 0:
        return _identity(ncols)
    aug = [[a[i][j] for i in range(m)] + [1 if k == j else 0 for k in range(ncols)] for j in range(ncols)]
    pool = aug
    col = 0
    done: list[list[int]] = []
    while pool and col < m:
        active = [r for r in pool if r[col]]
        rest = [r for r in pool if not r[col]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            pc = piv[col]
            nxt = [piv]
            for r in active[1:]:
                r = _axpy(r, r[col] // pc, piv)
                (nxt if r[col] else rest).append(r)
            active = nxt
        if active:
            done.append(active[0])
        pool = rest
        col += 1
    kern = [r[m:] for r in pool]
    return hnf_rows(kern, ncols)


def image_basis(columns: Iterable[Vector], nrows: int) -> list[list[int]]:
    """HNF basis (as row vectors) of the lattice spanned by the given vectors."""
    return hnf_rows(columns, nrows)


def intersect_lattices(b1: Sequence[Vector], b2: Sequence[Vector], dim: int) -> list[list[int]]:
    """HNF basis of the intersection of two lattices given by basis rows."""
    if not b1 or not b2:
        return []
    k1 = len(b1)
    # x*b1 = y*b2  <=>  (x, y) in kernel of [b1^T | -b2^T]
    rows = [[b1[i][c] for i in range(k1)] + [-b2[i][c] for i in range(len(b2))] for c in range(dim)]
    kern = kernel_basis(rows, k1 + len(b2))
    vecs = []
    for z in kern:
        v = [0] * dim
        for i in range(k1):
            if z[i]:
                v = [s + z[i] * t for s, t in zip(v, b1[i])]
        vecs.append(v)
    return hnf_rows(vecs, dim)


def preimage_lattice(a: Sequence[Vector], ncols: int, target: Sequence[Vector]) -> list[list[int]]:
    """HNF basis of {x in Z^ncols : a x lies in the lattice spanned by target}."""
    m = len(a)
    t = len(target)
    rows = [list(a[i]) + [-target[j][i] for j in range(t)] for i in range(m)]
    kern = kernel_basis(rows, ncols + t)
    return hnf_rows([z[:ncols] for z in kern], ncols)


def cokernel(relations: Sequence[Vector], dim: int):
    """Present Z^dim / span(relations).

    Returns (moduli, projection, lift): moduli lists 0 for each free
    coordinate followed by the torsion factors (ascending divisibility
    chain); projection is a list of row vectors x -> coordinates;
    lift is a list of column vectors (one per presented generator).
    """
    rel = list(relations)
    a = [[r[i] for r in rel] for i in range(dim)]
    U, D, _, Uinv = _snf(a, dim, len(rel), want_v=False, want_uinv=True)
    diag = [D[i][i] if i < len(rel) else 0 for i in range(dim)]
    torsion = [i for i in range(dim) if diag[i] > 1]
    free = [i for i in range(dim) if diag[i] == 0]
    order = free + torsion
    moduli = [0] * len(free) + [diag[i] for i in torsion]
    projection = [U[i] for i in order]
    lift = [[Uinv[r][i] for r in range(dim)] for i in order]
    return moduli, projection, lift
