"""Exact integer and rational matrix kernel.

Matrices are immutable tuples of row tuples; integer matrices hold ints,
rational ones hold Fractions. No floating point enters this module: every
value computed here can sit on a branch decision.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import DependentVectors, ValidationError

IntRows = tuple[tuple[int, ...], ...]
RatRows = tuple[tuple[Fraction, ...], ...]


def int_matrix(rows: Sequence[Sequence[int]]) -> IntRows:
    """Validate and freeze an integer matrix (rectangular, int entries)."""
    out = []
    width = None
    for i, row in enumerate(rows):
        r = tuple(row)
        if width is None:
            width = len(r)
        elif len(r) != width:
            raise ValidationError(f"rows[{i}]", "ragged matrix")
        for j, x in enumerate(r):
            if not isinstance(x, int) or isinstance(x, bool):
                raise ValidationError(f"rows[{i}][{j}]", f"not an integer: {x!r}")
        out.append(r)
    return tuple(out)


def rat_matrix(rows: Sequence[Sequence]) -> RatRows:
    """Validate and freeze a rational matrix; entries coerced to Fraction."""
    out = []
    width = None
    for i, row in enumerate(rows):
        r = []
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValidationError(f"rows[{i}]", "ragged matrix")
        for j, x in enumerate(row):
            if isinstance(x, float):
                raise ValidationError(f"rows[{i}][{j}]", "float entry rejected, use Fraction")
            r.append(Fraction(x))
        out.append(tuple(r))
    return tuple(out)


def identity(n: int) -> IntRows:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m):
    return tuple(zip(*m)) if m else ()


def mat_mul(a, b):
    """Matrix product; works for int and Fraction entries alike."""
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(m, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def hnf(m: Sequence[Sequence[int]]) -> tuple[IntRows, IntRows]:
    """Row-style Hermite normal form with transform.

    Returns (h, u) with h = u·m, u unimodular. Pivots positive, entries above
    a pivot reduced into [0, pivot), zero rows trail.
    """
    work = [list(r) for r in m]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    u = [list(r) for r in identity(nrows)]
    row = 0
    for col in range(ncols):
        piv = None
        for i in range(row, nrows):
            if work[i][col]:
                piv = i
                break
        if piv is None:
            continue
        if piv != row:
            work[row], work[piv] = work[piv], work[row]
            u[row], u[piv] = u[piv], u[row]
        for i in range(row + 1, nrows):
            if not work[i][col]:
                continue
            g, x, y = xgcd(work[row][col], work[i][col])
            a, b = work[row][col] // g, work[i][col] // g
            # [[x, y], [-b, a]] has determinant xa + yb = 1: unimodular
            work[row], work[i] = (
                [x * p + y * q for p, q in zip(work[row], work[i])],
                [-b * p + a * q for p, q in zip(work[row], work[i])],
            )
            u[row], u[i] = (
                [x * p + y * q for p, q in zip(u[row], u[i])],
                [-b * p + a * q for p, q in zip(u[row], u[i])],
            )
        if work[row][col] < 0:
            work[row] = [-x for x in work[row]]
            u[row] = [-x for x in u[row]]
        p = work[row][col]
        for i in range(row):
            q = work[i][col] // p
            if q:
                work[i] = [x - q * y for x, y in zip(work[i], work[row])]
                u[i] = [x - q * y for x, y in zip(u[i], u[row])]
        row += 1
        if row == nrows:
            break
    return tuple(tuple(r) for r in work), tuple(tuple(r) for r in u)


def hnf_rank(h: IntRows) -> int:
    """Number of nonzero rows of a matrix already in HNF."""
    return sum(1 for r in h if any(r))


def right_kernel_int(m: Sequence[Sequence[int]]) -> IntRows:
    """Basis of {x in Z^cols : m·x = 0}, rows are the kernel vectors.

    The result is saturated automatically and returned in HNF.
    """
    mt = transpose(m)
    if not mt:
        return ()
    h, u = hnf(mt)
    rank = hnf_rank(h)
    ker = u[rank:]
    if not ker:
        return ()
    hk, _ = hnf(ker)
    return hk[:hnf_rank(hk)]


def saturate(m: Sequence[Sequence[int]]) -> IntRows:
    """HNF basis of (Q-span of the rows of m) ∩ Z^cols.

    Computed as the kernel of the kernel: the integer vectors orthogonal to
    everything orthogonal to the row span.
    """
    rows = [r for r in m if any(r)]
    if not rows:
        return ()
    ncols = len(rows[0])
    ker = right_kernel_int(rows)
    if not ker:
        return identity(ncols)
    return right_kernel_int(ker)


def int_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix, Bareiss fraction-free."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            arow = a[i]
            krow = a[k]
            for j in range(k + 1, n):
                arow[j] = (arow[j] * pk - aik * krow[j]) // prev
            arow[k] = 0
        prev = pk
    return sign * a[n - 1][n - 1]


def row_scale_to_int(rows: Sequence[Sequence[Fraction]]) -> tuple[IntRows, tuple[int, ...]]:
    """Scale each row by the lcm of its denominators; returns (int rows, scales)."""
    out = []
    scales = []
    for r in rows:
        d = 1
        for x in r:
            d = lcm(d, Fraction(x).denominator)
        out.append(tuple(int(x * d) for x in r))
        scales.append(d)
    return tuple(out), tuple(scales)


def gram_det(vectors: Sequence[Sequence]) -> Fraction:
    """det of the Gram matrix ⟨v_i, v_j⟩ of rational vectors.

    Equals the squared norm of the wedge v₁∧…∧v_k. Raises DependentVectors
    when the vectors are linearly dependent (determinant 0).
    """
    vecs = rat_matrix(vectors) if vectors else ()
    if not vecs:
        return Fraction(1)
    w, scales = row_scale_to_int(vecs)
    g = mat_mul(w, transpose(w))
    d = int_det(g)
    if d == 0:
        raise DependentVectors("gram determinant is zero")
    denom = 1
    for s in scales:
        denom *= s * s
    return Fraction(d, denom)


def rat_det(m: Sequence[Sequence]) -> Fraction:
    rows = rat_matrix(m)
    if not rows:
        return Fraction(1)
    w, scales = row_scale_to_int(rows)
    d = Fraction(int_det(w))
    for s in scales:
        d /= s
    return d


def _rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot column list)."""
    a = [[Fraction(x) for x in r] for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    row = 0
    for col in range(ncols):
        piv = None
        for i in range(row, nrows):
            if a[i][col]:
                piv = i
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for i in range(nrows):
            if i != row and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    return a, pivots


def rat_rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    _, pivots = _rref(rows)
    return len(pivots)


def rat_right_kernel(rows: Sequence[Sequence]) -> RatRows:
    """Basis rows of {x in Q^cols : rows·x = 0}."""
    if not rows:
        return ()
    ncols = len(rows[0])
    rref, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for prow, pcol in enumerate(pivots):
            v[pcol] = -rref[prow][fc]
        basis.append(tuple(v))
    return tuple(basis)


def span_contains(base_rows: Sequence[Sequence], vec: Sequence) -> bool:
    """Whether vec lies in the Q-span of base_rows."""
    if not any(vec):
        return True
    if not base_rows:
        return False
    r0 = rat_rank(base_rows)
    stacked = list(base_rows) + [tuple(vec)]
    return rat_rank(stacked) == r0


def rat_inverse(m: Sequence[Sequence]) -> RatRows:
    """Inverse of a square rational matrix (Gauss-Jordan); ValueError if singular."""
    n = len(m)
    a = [[Fraction(x) for x in r] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, r in enumerate(m)]
    for col in range(n):
        piv = None
        for i in range(col, n):
            if a[i][col]:
                piv = i
                break
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def int_inverse_unimodular(m: Sequence[Sequence[int]]) -> IntRows:
    """Integer inverse of a unimodular integer matrix."""
    inv = rat_inverse(m)
    out = []
    for r in inv:
        for x in r:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
        out.append(tuple(int(x) for x in r))
    return tuple(out)


def lcm_upto(n: int) -> int:
    """lcm(1, 2, ..., n); the shared exponent L for root-free comparisons."""
    out = 1
    for k in range(2, n + 1):
        out = lcm(out, k)
    return out


def primitive_part(vec: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (0 vector unchanged)."""
    g = 0
    for x in vec:
        g = gcd(g, x)
    if g in (0, 1):
        return tuple(vec)
    return tuple(x // g for x in vec)
