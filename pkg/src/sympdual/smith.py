"""Exact integer linear algebra: Smith normal form with transforms,
cokernel structure, linear congruence solving, kernel and Hermite-style
lattice bases.

Everything here is plain Python arbitrary-precision arithmetic; matrices
are lists (or tuples) of rows of ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm
from typing import Optional, Sequence

from .errors import DimensionMismatch, SympdualError

IntMatrix = Sequence[Sequence[int]]


def matrix_copy(a: IntMatrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in a]


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a: IntMatrix, b: IntMatrix) -> list[list[int]]:
    if a and b and len(a[0]) != len(b):
        raise DimensionMismatch("matmul: inner dimensions differ")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k, x in enumerate(row):
            if x:
                brow = b[k]
                for j in range(cols):
                    acc[j] += x * brow[j]
        out.append(acc)
    return out


def matvec(a: IntMatrix, v: Sequence[int]) -> list[int]:
    if a and len(a[0]) != len(v):
        raise DimensionMismatch("matvec: dimensions differ")
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: IntMatrix) -> list[list[int]]:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def det(a: IntMatrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionMismatch("det: matrix not square")
    if n == 0:
        return 1
    m = matrix_copy(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """U·A·V = D with U, V unimodular and D diagonal, d1 | d2 | ... >= 0.

    The divisibility chain is stored ascending; `diagonal_descending` gives
    the reversed order used when listing invariant factors largest-first.
    """

    U: tuple[tuple[int, ...], ...]
    D: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]

    @property
    def diagonal(self) -> tuple[int, ...]:
        n = min(len(self.D), len(self.D[0]) if self.D else 0)
        return tuple(self.D[i][i] for i in range(n))

    @property
    def diagonal_descending(self) -> tuple[int, ...]:
        return tuple(reversed(self.diagonal))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith(a: IntMatrix) -> SmithDecomposition:
    """Smith normal form over Z.

    Pivots are chosen as the nonzero entry of minimal absolute value in the
    remaining submatrix (ties: smallest (row, col)), which keeps coefficient
    growth moderate; the diagonal is made non-negative with the sign
    absorbed into U.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if any(len(row) != cols for row in a):
        raise DimensionMismatch("smith: ragged matrix")
    m = matrix_copy(a)
    u = identity_matrix(rows)
    v = identity_matrix(cols)

    def swap_rows(i, j):
        if i != j:
            m[i], m[j] = m[j], m[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for r in m:
                r[i], r[j] = r[j], r[i]
            for r in v:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        mr, ms = m[dst], m[src]
        for k in range(cols):
            mr[k] += q * ms[k]
        ur, us = u[dst], u[src]
        for k in range(rows):
            ur[k] += q * us[k]

    def add_col(dst, src, q):
        for r in m:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        best = None
        for i in range(t, rows):
            mi = m[i]
            for j in range(t, cols):
                x = mi[j]
                if x:
                    ax = -x if x < 0 else x
                    if best is None or ax < best[0]:
                        best = (ax, i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        piv = m[t][t]
        dirty = False
        for i in range(t + 1, rows):
            if m[i][t]:
                add_row(i, t, -(m[i][t] // piv))
                if m[i][t]:
                    dirty = True
        for j in range(t + 1, cols):
            if m[t][j]:
                add_col(j, t, -(m[t][j] // piv))
                if m[t][j]:
                    dirty = True
        if dirty:
            continue
        piv = m[t][t]
        fix = None
        for i in range(t + 1, rows):
            mi = m[i]
            for j in range(t + 1, cols):
                if mi[j] % piv:
                    fix = i
                    break
            if fix is not None:
                break
        if fix is not None:
            add_row(t, fix, 1)
            continue
        t += 1

    for i in range(limit):
        if m[i][i] < 0:
            m[i] = [-x for x in m[i]]
            u[i] = [-x for x in u[i]]

    freeze = lambda mat: tuple(tuple(r) for r in mat)
    return SmithDecomposition(freeze(u), freeze(m), freeze(v))


def invert_unimodular(a: IntMatrix) -> list[list[int]]:
    """Inverse of a matrix with det ±1 (via U·A·V = I, so A^{-1} = V·U)."""
    dec = smith(a)
    if any(d != 1 for d in dec.diagonal) or len(a) != (len(a[0]) if a else 0):
        raise SympdualError("invert_unimodular: matrix is not unimodular")
    return matmul(dec.V, dec.U)


def cokernel_structure(a: IntMatrix) -> tuple[int, ...]:
    """Invariant factors of Z^rows / columnspace(a), 1-entries elided.

    Raises when the column space has rank < rows (infinite cokernel).
    """
    rows = len(a)
    dec = smith(a)
    if dec.rank < rows:
        raise SympdualError(
            "cokernel_structure: column space has rank %d < %d, cokernel is infinite"
            % (dec.rank, rows)
        )
    return tuple(d for d in dec.diagonal if d != 1)


def kernel_lattice(a: IntMatrix) -> list[list[int]]:
    """Columns generating {x in Z^cols : a·x = 0}."""
    dec = smith(a)
    cols = len(a[0]) if a else 0
    r = dec.rank
    return [[dec.V[i][j] for i in range(cols)] for j in range(r, cols)]


def _diagonal_solve(dec: SmithDecomposition, target: Sequence[int], mod: int,
                    n_unknowns: int) -> Optional[list[int]]:
    diag = dec.diagonal
    y = [0] * n_unknowns
    for i, ti in enumerate(target):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ti % mod:
                return None
        else:
            g = gcd(d, mod)
            if ti % g:
                return None
            mg = mod // g
            y_i = ((ti // g) * pow(d // g, -1, mg)) % mg
            y[i] = y_i
    return matvec(dec.V, y)


def solve_congruence(a: IntMatrix, b: Sequence[int],
                     moduli: Sequence[int]) -> Optional[list[int]]:
    """Solve a·x ≡ b componentwise mod `moduli`; None means no solution.

    The result (when any) is verified by substitution before returning, so a
    non-None answer is always correct and None is definitive.
    """
    sols = solve_congruence_many(a, [[x] for x in b], moduli)
    return None if sols is None or sols[0] is None else sols[0]


def solve_congruence_many(a: IntMatrix, bs: IntMatrix,
                          moduli: Sequence[int]) -> Optional[list[Optional[list[int]]]]:
    """Solve a·x ≡ b for every column b of `bs`, sharing one Smith reduction.

    Returns a list with one entry per column: the solution vector, or None
    when that column's system is unsolvable.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if len(moduli) != rows or len(bs) != rows:
        raise DimensionMismatch("solve_congruence: shape mismatch")
    if any(mod <= 0 for mod in moduli):
        raise SympdualError("solve_congruence: moduli must be positive")
    mod = lcm(*moduli) if moduli else 1
    scaled = [[x * (mod // moduli[i]) for x in a[i]] for i in range(rows)]
    dec = smith(scaled)
    n_rhs = len(bs[0]) if rows else 0
    out: list[Optional[list[int]]] = []
    for k in range(n_rhs):
        b = [bs[i][k] * (mod // moduli[i]) for i in range(rows)]
        target = matvec(dec.U, b)
        x = _diagonal_solve(dec, target, mod, cols)
        if x is None:
            out.append(None)
            continue
        x = [xi % mod for xi in x]
        check = matvec(a, x)
        orig = [bs[i][k] for i in range(rows)]
        if any((ci - oi) % moduli[i] for i, (ci, oi) in enumerate(zip(check, orig))):
            raise SympdualError("solve_congruence: verification failed (internal)")
        out.append(x)
    return out


def solve_triangular_columns(h: IntMatrix, x: Sequence[int]) -> Optional[list[int]]:
    """Solve h·c = x exactly for lower-triangular nonsingular h; None if the
    solution is not integral."""
    n = len(h)
    c = [0] * n
    for i in range(n):
        acc = x[i] - sum(h[i][j] * c[j] for j in range(i))
        piv = h[i][i]
        if acc % piv:
            return None
        c[i] = acc // piv
    return c


def hnf_columns(columns: Sequence[Sequence[int]], n: int) -> tuple[tuple[int, ...], ...]:
    """Canonical lower-triangular column basis of a full-rank lattice in Z^n.

    The output H (rows returned) has positive diagonal, zeros above it and
    entries left of the diagonal reduced into [0, H[i][i]); it is the unique
    such basis of the lattice, so lattice equality is matrix equality.
    """
    work = [list(col) for col in columns]
    if any(len(col) != n for col in work):
        raise DimensionMismatch("hnf_columns: column length mismatch")
    pivots: list[list[int]] = []
    for i in range(n):
        carrier = None
        rest = []
        for col in work:
            if col[i] == 0:
                rest.append(col)
            elif carrier is None:
                carrier = col
            else:
                a, b = carrier[i], col[i]
                g = gcd(a, b)
                s, t = _bezout(a, b)
                new_carrier = [s * ca + t * cb for ca, cb in zip(carrier, col)]
                new_rest = [(-(b // g)) * ca + (a // g) * cb
                            for ca, cb in zip(carrier, col)]
                carrier = new_carrier
                rest.append(new_rest)
        if carrier is None:
            raise SympdualError("hnf_columns: lattice not full rank")
        if carrier[i] < 0:
            carrier = [-x for x in carrier]
        # reduce the new pivot against earlier pivots? handled in final pass
        pivots.append(carrier)
        work = rest
    # left-reduction: make 0 <= H[i][j] < H[i][i] for j < i
    for i in range(n):
        piv = pivots[i]
        for j in range(i):
            q = pivots[j][i] // piv[i]
            if q:
                pivots[j] = [a - q * b for a, b in zip(pivots[j], piv)]
    return tuple(tuple(pivots[j][i] for j in range(n)) for i in range(n))


def _bezout(a: int, b: int) -> tuple[int, int]:
    """(s, t) with s*a + t*b = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t
