"""Complete short-vector enumeration and stable-subspace search.

delta_m needs a provably exhaustive candidate family. Subspace candidates are
found by growing chains of M-stable saturated subspaces: at a chain node Z the
quotient lattice Λ/Λ_Z is enumerated up to a Minkowski bound for the remaining
dimension, each short vector is closed up under M, and the chain continues
from the closure. Completeness per node: a target Y ⊋ Z with r missing
dimensions satisfies λ₁(Λ_Y/Λ_Z)² ≤ γ_r·(covol²(Y)/covol²(Z))^{1/r}, and the
primitive form of that shortest vector is one of the enumerated vectors, so
some enumerated vector leads into Y; induction on dim terminates the argument.
When r = 1 the target line is M-stable, hence lies in a common rational
eigenspace of the generators on the quotient; only those sublattices are
enumerated, which keeps heavily squashed instances cheap.

Everything decision-bearing is exact; LLL here is only a preconditioner for
the enumeration and never changes what is found.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import exp, gcd, isqrt, log

from . import ratlin as rl
from .errors import BudgetExceeded, InternalInvariantViolation, ValidationError
from .lattice import (ZERO_SUBSPACE, RationalSubspace, Scenario,
                      UnimodularLattice, conjugated_generators, covolume_sq,
                      covolume_sq_rows, full_subspace, is_m_stable, lcm_pow,
                      m_closure, subspace_from_rows)

F = Fraction

DEFAULT_VECTOR_BUDGET = 10 ** 6


class _Budget:
    """Node counter shared across one public operation."""

    __slots__ = ("cap", "used")

    def __init__(self, cap: int):
        if cap < 1:
            raise ValidationError("vector_budget", "must be >= 1")
        self.cap = cap
        self.used = 0

    def consume(self, n: int = 1):
        self.used += n
        if self.used > self.cap:
            raise BudgetExceeded(self.cap)


def _as_budget(budget) -> _Budget:
    if isinstance(budget, _Budget):
        return budget
    return _Budget(DEFAULT_VECTOR_BUDGET if budget is None else int(budget))


def _gso(g):
    """Gram-Schmidt data from a Gram matrix: (mu lower-triangular, d norms²)."""
    n = len(g)
    mu = [[F(0)] * n for _ in range(n)]
    d = [F(0)] * n
    for i in range(n):
        for j in range(i):
            s = g[i][j]
            for t in range(j):
                s -= mu[i][t] * mu[j][t] * d[t]
            mu[i][j] = s / d[j]
        mu[i][i] = F(1)
        s = g[i][i]
        for t in range(i):
            s -= mu[i][t] ** 2 * d[t]
        d[i] = s
        if d[i] <= 0:
            raise InternalInvariantViolation("Gram matrix not positive definite")
    return mu, d


def _round_half(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def lll_reduce_gram(a, delta: Fraction = F(3, 4)):
    """Unimodular u with u·a·uᵀ LLL-reduced; exact arithmetic throughout."""
    n = len(a)
    u = [list(r) for r in rl.identity(n)]

    def gram():
        return rl.mat_mul(rl.mat_mul(u, a), rl.transpose(u))

    g = gram()
    mu, d = _gso(g)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = _round_half(mu[k][j])
            if q:
                u[k] = [x - q * y for x, y in zip(u[k], u[j])]
                g = gram()
                mu, d = _gso(g)
        if d[k] >= (delta - mu[k][k - 1] ** 2) * d[k - 1]:
            k += 1
        else:
            u[k], u[k - 1] = u[k - 1], u[k]
            g = gram()
            mu, d = _gso(g)
            k = max(k - 1, 1)
    return tuple(tuple(r) for r in u)


def _sqrt_range(c: Fraction, rd: Fraction) -> tuple[int, int]:
    """Integer t range with (t + c)² ≤ rd; may be empty (lo > hi)."""
    if rd < 0:
        return 0, -1
    s = isqrt(rd.numerator // rd.denominator) + 2

    def below_sqrt(y: Fraction) -> bool:
        # y <= sqrt(rd), monotone in y, no square root taken
        return y <= 0 or y * y <= rd

    base = (-c).__floor__()
    hi = base + s
    while not below_sqrt(hi + c):
        hi -= 1
    lo = base - s
    while not below_sqrt(-(lo + c)):
        lo += 1
    return lo, hi


def _enumerate_gram(g, bound: Fraction, budget: _Budget, spanning: bool):
    """All x ≠ 0 with x·g·xᵀ ≤ bound, canonical sign (highest nonzero positive).

    spanning mode collapses multiples along the first basis direction (only
    x = (1,0,..,0) survives of the pure-axis family); used by subspace search
    where only spans matter.
    """
    n = len(g)
    if bound <= 0:
        return []
    mu, d = _gso(g)
    out = []
    x = [0] * n

    def recurse(level: int, rem: Fraction, outer_zero: bool):
        budget.consume()
        c = F(0)
        for i in range(level + 1, n):
            if x[i]:
                c += mu[i][level] * x[i]
        lo, hi = _sqrt_range(c, rem / d[level])
        if outer_zero:
            lo = max(lo, 0)
            if spanning and level == 0:
                hi = min(hi, 1)
        for t in range(lo, hi + 1):
            if level == 0 and outer_zero and t == 0:
                continue
            x[level] = t
            rem2 = rem - d[level] * (t + c) ** 2
            if level == 0:
                budget.consume()
                out.append((bound - rem2, tuple(x)))
            else:
                recurse(level - 1, rem2, outer_zero and t == 0)
        x[level] = 0

    recurse(n - 1, bound, True)
    return out


def _canon_sign(v: tuple[int, ...]) -> tuple[int, ...]:
    """One representative of {v, -v}: highest-index nonzero entry positive."""
    for x in reversed(v):
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def short_vectors(lat: UnimodularLattice, bound_sq, budget=None) -> list[tuple[int, ...]]:
    """All nonzero lattice vectors with ‖v‖² ≤ bound_sq, one of ±v each.

    Returned as integer coordinate rows, sorted by squared length then
    lexicographically.
    """
    bound_sq = F(bound_sq)
    if bound_sq <= 0:
        raise ValidationError("bound_sq", "must be positive")
    bud = _as_budget(budget)
    u = lll_reduce_gram(lat.gram)
    g = rl.mat_mul(rl.mat_mul(u, lat.gram), rl.transpose(u))
    raw = _enumerate_gram(g, bound_sq, bud, spanning=False)
    mapped = []
    for qv, xs in raw:
        v = tuple(sum(xs[i] * u[i][j] for i in range(len(u))) for j in range(lat.n))
        mapped.append((qv, _canon_sign(v)))
    mapped.sort()
    return [v for _, v in mapped]


def shortest_vector_sq(lat: UnimodularLattice, budget=None) -> Fraction:
    """Exact squared length of a shortest nonzero lattice vector."""
    bud = _as_budget(budget)
    u = lll_reduce_gram(lat.gram)
    g = rl.mat_mul(rl.mat_mul(u, lat.gram), rl.transpose(u))
    bound = min(g[i][i] for i in range(len(g)))
    raw = _enumerate_gram(g, bound, bud, spanning=False)
    return min(qv for qv, _ in raw)


def _int_nthroot_floor(m: int, r: int) -> int:
    if m < 0:
        raise ValueError("negative")
    if r == 1 or m in (0, 1):
        return m
    if r == 2:
        return isqrt(m)
    t = int(round(m ** (1.0 / r))) + 2
    while t ** r > m:
        t -= 1
    while (t + 1) ** r <= m:
        t += 1
    return t


def rat_root_upper(x: Fraction, r: int, bits: int = 8) -> Fraction:
    """A rational ≥ x^{1/r} on a dyadic grid (slack only loosens search bounds)."""
    x = F(x)
    if x <= 0:
        raise ValueError("positive input required")
    if r == 1:
        return x
    if x < 1:
        # widen the grid so tiny roots keep ~2^-bits relative slack
        bits += max(0, (x.denominator.bit_length() - x.numerator.bit_length()) // r + 1)
    scaled = x * (1 << (r * bits))
    m = -(-scaled.numerator // scaled.denominator)  # ceil
    root = _int_nthroot_floor(m, r)
    if root ** r < m:
        root += 1
    return F(root, 1 << bits)


def _hermite_sq_bound(r: int) -> Fraction:
    """Rational upper bound for the Hermite constant γ_r: (4/3)^{ceil((r-1)/2)}."""
    return F(4, 3) ** (r // 2)


class _Quotient:
    """Λ/Λ_Z with exact quotient Gram (Schur complement) and integer lifts."""

    def __init__(self, lat: UnimodularLattice, sc: Scenario, z_rows):
        self.lat = lat
        self.sc = sc
        self.k = len(z_rows)
        n = lat.n
        if self.k == 0:
            self.full_basis = rl.identity(n)
        else:
            self.full_basis = complete_to_basis(z_rows, n)
        v = self.full_basis
        self.lift_rows = v[self.k:]
        g_full = rl.mat_mul(rl.mat_mul(v, lat.gram), rl.transpose(v))
        k = self.k
        if k == 0:
            self.gram = g_full
        else:
            g11 = [row[:k] for row in g_full[:k]]
            g12 = [row[k:] for row in g_full[:k]]
            g21 = [row[:k] for row in g_full[k:]]
            g22 = [row[k:] for row in g_full[k:]]
            inv11 = rl.rat_inverse(g11)
            corr = rl.mat_mul(rl.mat_mul(g21, inv11), g12)
            self.gram = tuple(tuple(a - b for a, b in zip(r1, r2))
                              for r1, r2 in zip(g22, corr))
        self._reps = None

    @property
    def rank(self) -> int:
        return self.lat.n - self.k

    def rep_matrices(self):
        """Row-action matrices of the generators on quotient coordinates."""
        if self._reps is None:
            reps = []
            v = self.full_basis
            vinv = rl.int_inverse_unimodular(v)
            k = self.k
            for ghat in conjugated_generators(self.lat, self.sc):
                m = rl.mat_mul(rl.mat_mul(v, rl.transpose(ghat)), vinv)
                for i in range(k):
                    for j in range(k, len(v)):
                        if m[i][j] != 0:
                            raise InternalInvariantViolation(
                                "quotient base subspace is not stable")
                reps.append(tuple(tuple(row[k:]) for row in m[k:]))
            self._reps = tuple(reps)
        return self._reps

    def lift(self, y) -> tuple[int, ...]:
        return tuple(sum(y[i] * self.lift_rows[i][j] for i in range(len(y)))
                     for j in range(self.lat.n))


def complete_to_basis(sat_rows, n: int) -> rl.IntRows:
    """Extend a saturated k-row basis to a unimodular n×n matrix.

    The first k rows of the result span the same sublattice as sat_rows.
    """
    k = len(sat_rows)
    ht = rl.transpose(sat_rows)
    hh, w = rl.hnf(ht)
    corner = tuple(tuple(hh[i][:k][j] for j in range(k)) for i in range(k))
    if abs(rl.int_det(corner)) != 1:
        raise InternalInvariantViolation("rows are not a saturated basis")
    v = rl.transpose(rl.int_inverse_unimodular(w))
    hv, _ = rl.hnf(v[:k])
    hs, _ = rl.hnf(sat_rows)
    if hv[:k] != hs[:k]:
        raise InternalInvariantViolation("basis completion changed the sublattice")
    return v


def char_poly(m) -> list[Fraction]:
    """Coefficients [c_0, ..., c_{n-1}, 1] of det(xI - m), Faddeev-LeVerrier."""
    n = len(m)
    coeffs = [F(0)] * (n + 1)
    coeffs[n] = F(1)
    mk = rl.identity(n)
    mk = tuple(tuple(F(x) for x in row) for row in mk)
    c = F(1)
    for k in range(1, n + 1):
        mk = rl.mat_mul(m, mk)
        tr = sum(mk[i][i] for i in range(n))
        c = -tr / k
        coeffs[n - k] = c
        mk = tuple(tuple(x + (c if i == j else 0) for j, x in enumerate(row))
                   for i, row in enumerate(mk))
    return coeffs


def _divisors(m: int) -> list[int]:
    m = abs(m)
    out = set()
    i = 1
    while i * i <= m:
        if m % i == 0:
            out.add(i)
            out.add(m // i)
        i += 1
    return sorted(out)


def rational_roots(coeffs) -> list[Fraction]:
    """All rational roots of the polynomial with the given coefficients."""
    cs = [F(c) for c in coeffs]
    den = 1
    for c in cs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in cs]
    roots = []
    # factor out x^v
    v = 0
    while v < len(ints) and ints[v] == 0:
        v += 1
    if v == len(ints):
        return [F(0)]
    if v:
        roots.append(F(0))
        ints = ints[v:]
    a0, an = ints[0], ints[-1]
    for p in _divisors(a0):
        for q in _divisors(an):
            for cand in (F(p, q), F(-p, q)):
                if cand in roots:
                    continue
                val = F(0)
                for c in reversed(ints):
                    val = val * cand + c
                if val == 0:
                    roots.append(cand)
    return sorted(set(roots))


def _eigenspace_rows(m, alpha: Fraction):
    """Rows z with z·m = alpha·z."""
    n = len(m)
    shifted = tuple(tuple(m[i][j] - (alpha if i == j else 0) for j in range(n))
                    for i in range(n))
    return rl.rat_right_kernel(rl.transpose(shifted))


def _span_intersection(e1, e2):
    """Basis rows of span(e1) ∩ span(e2) over Q."""
    n1 = rl.rat_right_kernel(e1)
    n2 = rl.rat_right_kernel(e2)
    constraints = list(n1) + list(n2)
    if not constraints:
        return e1 if len(e1) <= len(e2) else e2
    return rl.rat_right_kernel(constraints)


def common_eigenspace_bases(mats, dim: int):
    """Nonzero intersections ∩_g ker(g - α_g·id) over all rational α choices."""
    spaces = [tuple(tuple(F(1 if i == j else 0) for j in range(dim)) for i in range(dim))]
    for m in mats:
        roots = [r for r in rational_roots(char_poly(m)) if r != 0]
        refined = []
        for alpha in roots:
            eig = _eigenspace_rows(m, alpha)
            if not eig:
                continue
            for e in spaces:
                inter = _span_intersection(e, eig)
                if inter:
                    refined.append(inter)
        spaces = refined
        if not spaces:
            break
    return spaces


def _stable_quotient_lines(quot: _Quotient, t_sq: Fraction, budget: _Budget):
    """Primitive quotient vectors spanning M-stable lines with norm² ≤ t_sq."""
    m = quot.rank
    if not quot.sc.m_generators:
        spaces = [rl.identity(m)]
    else:
        spaces = common_eigenspace_bases(quot.rep_matrices(), m)
    seen = set()
    for e in spaces:
        ints, _ = rl.row_scale_to_int(rl.rat_matrix(e))
        s_e = rl.saturate(ints)
        if not s_e:
            continue
        if len(s_e) == 1:
            y = _canon_sign(s_e[0])
            norm = F(0)
            for i, yi in enumerate(y):
                if yi:
                    norm += yi * sum(quot.gram[i][j] * yj for j, yj in enumerate(y))
            if norm <= t_sq and y not in seen:
                seen.add(y)
                yield y
            continue
        gram_e = rl.mat_mul(rl.mat_mul(s_e, quot.gram), rl.transpose(s_e))
        u = lll_reduce_gram(gram_e)
        g = rl.mat_mul(rl.mat_mul(u, gram_e), rl.transpose(u))
        comp = rl.mat_mul(u, s_e)
        for _, w in _enumerate_gram(g, t_sq, budget, spanning=True):
            y = tuple(sum(w[i] * comp[i][j] for i in range(len(w)))
                      for j in range(m))
            y = _canon_sign(rl.primitive_part(y))
            if y not in seen:
                seen.add(y)
                yield y


def stable_subspaces_within(lat: UnimodularLattice, sc: Scenario, cap_sq,
                            base: RationalSubspace | None = None,
                            budget=None) -> tuple[list[RationalSubspace], bool]:
    """All M-stable proper subspaces Y (⊋ base when given) with covol² ≤ cap_sq.

    Returns (sorted list, complete flag); complete is False when the budget
    ran out, in which case the list is whatever was found before that.
    """
    cap_sq = F(cap_sq)
    n = lat.n
    bud = _as_budget(budget)
    base_rows = base.rows if base is not None else ()
    found: dict = {}
    visited: set = set()
    quot_cache: dict = {}

    def quotient_for(z_rows) -> _Quotient:
        if z_rows not in quot_cache:
            quot_cache[z_rows] = _Quotient(lat, sc, z_rows)
        return quot_cache[z_rows]

    def emit(sub: RationalSubspace):
        if sub.rows not in found and not sub.is_full:
            if covolume_sq(lat, sub) <= cap_sq:
                found[sub.rows] = sub

    def search(z_rows, k: int):
        key = (z_rows, k)
        if key in visited:
            return
        visited.add(key)
        covz = covolume_sq_rows(lat, z_rows)
        t_sq = cap_sq / covz
        quot = quotient_for(z_rows)
        r = k - len(z_rows)
        if r == 1:
            for y in _stable_quotient_lines(quot, t_sq, bud):
                sub = subspace_from_rows(n, list(z_rows) + [quot.lift(y)])
                if sub is ZERO_SUBSPACE or sub.dim != k:
                    raise InternalInvariantViolation("line lift lost a dimension")
                emit(sub)
            return
        bound = _hermite_sq_bound(r) * rat_root_upper(t_sq, r)
        u = lll_reduce_gram(quot.gram)
        g = rl.mat_mul(rl.mat_mul(u, quot.gram), rl.transpose(u))
        for _, w in _enumerate_gram(g, bound, bud, spanning=True):
            y = tuple(sum(w[i] * u[i][j] for i in range(len(w)))
                      for j in range(quot.rank))
            if rl.primitive_part(y) != y:
                continue
            cl = m_closure(lat, sc, list(z_rows) + [quot.lift(y)])
            d = cl.dim
            if d > k:
                continue
            if d == k:
                emit(cl)
            elif d > len(z_rows):
                search(cl.rows, k)

    complete = True
    try:
        for k in range(len(base_rows) + 1, n):
            search(base_rows, k)
    except BudgetExceeded:
        complete = False
    out = sorted(found.values(), key=lambda s: (s.dim, s.rows))
    for s in out:
        if not is_m_stable(s, lat, sc):
            raise InternalInvariantViolation("closure produced an unstable subspace")
    return out, complete


def eligible_subspaces(lat: UnimodularLattice, sc: Scenario, covol_sq_cap,
                       budget=None) -> list[RationalSubspace]:
    """All eligible proper nonzero subspaces with covol² ≤ cap, canonical order."""
    cap = F(covol_sq_cap)
    if cap <= 0:
        raise ValidationError("covol_sq_cap", "must be positive")
    subs, complete = stable_subspaces_within(lat, sc, cap, budget=budget)
    if not complete:
        raise BudgetExceeded(_as_budget(budget).cap,
                             "budget exhausted before the subspace family was certified")
    return subs


@dataclass(frozen=True)
class DeltaResult:
    """Exact certificate for the restricted minimal covolume.

    delta_sq_pow = (covol² of the witness)^{L/dim}, L = lcm(1..N); the reported
    value is delta_float = delta_sq_pow^{1/(2L)}. complete=False marks an upper
    bound obtained under an exhausted budget.
    """

    delta_sq_pow: Fraction
    lcm_pow: int
    delta_float: float
    witness: RationalSubspace
    witness_covol_sq: Fraction
    complete: bool

    def delta_sq_vs(self, value_sq: Fraction) -> int:
        """Compare δ² with an exact rational: -1, 0, or 1."""
        rhs = F(value_sq) ** self.lcm_pow
        if self.delta_sq_pow < rhs:
            return -1
        if self.delta_sq_pow > rhs:
            return 1
        return 0


def _float_root(x: Fraction, power: int) -> float:
    if x == 1:
        return 1.0
    return exp((log(x.numerator) - log(x.denominator)) / power)


def _best_candidate(lat, cands, big_l):
    best_key = (F(1), lat.n, full_subspace(lat.n).rows)
    best = (full_subspace(lat.n), F(1))
    for w in cands:
        c = covolume_sq(lat, w)
        q = c ** (big_l // w.dim)
        key = (q, w.dim, w.rows)
        if key < best_key:
            best_key = key
            best = (w, c)
    return best_key, best


def delta_m(lat: UnimodularLattice, sc: Scenario, budget=None) -> DeltaResult:
    """Exact minimizer of covol^{1/dim} over eligible subspaces (full included).

    Ties break to smaller dimension, then lexicographically smallest basis.
    Budget exhaustion degrades to an upper bound with complete=False.

    The covolume cap for the exhaustive search is seeded from the stable
    closure of one LLL-short vector: any subspace beating a candidate with
    value q must have covol² < q^{dim/L} ≤ q^{1/L}, so capping at a rational
    upper bound of q^{1/L} loses nothing and tames badly squashed inputs.
    """
    big_l = lcm_pow(lat.n)
    u = lll_reduce_gram(lat.gram)
    seed = m_closure(lat, sc, [tuple(u[0])])
    cap = F(1)
    extra = []
    if not seed.is_full:
        extra.append(seed)
        q_seed = covolume_sq(lat, seed) ** (big_l // seed.dim)
        if q_seed < 1:
            cap = rat_root_upper(q_seed, big_l)
    cands, complete = stable_subspaces_within(lat, sc, cap, budget=budget)
    best_key, (witness, covol) = _best_candidate(lat, extra + cands, big_l)
    q = best_key[0]
    return DeltaResult(
        delta_sq_pow=q,
        lcm_pow=big_l,
        delta_float=_float_root(q, 2 * big_l),
        witness=witness,
        witness_covol_sq=covol,
        complete=complete,
    )


@lru_cache(maxsize=64)
def _hnf_candidates(n: int, k: int, bound: int) -> tuple[rl.IntRows, ...]:
    """Every saturated HNF k×n matrix with entries bounded by `bound`."""
    out = []
    for pivots in itertools.combinations(range(n), k):
        pivot_index = {c: i for i, c in enumerate(pivots)}
        for vals in itertools.product(range(1, bound + 1), repeat=k):
            positions = []
            ranges = []
            for i in range(k):
                for j in range(pivots[i] + 1, n):
                    if j in pivot_index:
                        m_i = pivot_index[j]
                        ranges.append(range(0, min(vals[m_i], bound + 1)))
                    else:
                        ranges.append(range(-bound, bound + 1))
                    positions.append((i, j))
            for combo in itertools.product(*ranges):
                mat = [[0] * n for _ in range(k)]
                for i in range(k):
                    mat[i][pivots[i]] = vals[i]
                for (i, j), val in zip(positions, combo):
                    mat[i][j] = val
                frozen = tuple(tuple(r) for r in mat)
                if rl.saturate(frozen) == frozen:
                    out.append(frozen)
    out.sort()
    return tuple(out)


def oracle_delta_m(lat: UnimodularLattice, sc: Scenario,
                   hnf_entry_bound: int) -> DeltaResult:
    """Brute-force delta_m over all bounded-entry saturated HNF bases.

    Independent of the chain search; used to validate it. Only correct when
    the bound covers the true minimizer's entries, which the agreement tests
    arrange by construction.
    """
    n = lat.n
    big_l = lcm_pow(n)
    best_key = (F(1), n, full_subspace(n).rows)
    best = (full_subspace(n), F(1))
    for k in range(1, n):
        items = []
        for mat in _hnf_candidates(n, k, hnf_entry_bound):
            items.append((covolume_sq_rows(lat, mat), mat))
        items.sort()
        for c, mat in items:
            q = c ** (big_l // k)
            if (q, k, mat) >= best_key:
                break
            sub = RationalSubspace(ambient=n, rows=mat)
            if is_m_stable(sub, lat, sc):
                best_key = (q, k, mat)
                best = (sub, c)
                break
    q = best_key[0]
    return DeltaResult(
        delta_sq_pow=q,
        lcm_pow=big_l,
        delta_float=_float_root(q, 2 * big_l),
        witness=best[0],
        witness_covol_sq=best[1],
        complete=True,
    )
