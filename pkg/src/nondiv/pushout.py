"""Torus push-out: expansion certificates, protection subspaces, the driver.

One round: find the minimal-covolume eligible subspace, protect it (grow a
chain until every competing eligible subspace has large joint covolume), pick
the block-scalar torus element that expands the protected subspace, apply it,
and certify the resulting growth of the restricted minimal covolume exactly.
Iterating rounds drives the lattice above a covolume floor eta0.

Constants policy. The guard constant (squared) c1c2_sq and the floor eta0 are
coupled: eta0_sq = c1c2_sq^(-N) keeps the protection chain proper and makes
the a priori growth factor a theorem. By default both are derived from the
achieved expansion certificate and stabilized by a short fixed-point loop
(certificates of larger protected subspaces can have larger constants). With
eta0_override the guard becomes the largest 1/256-grid rational c > 1 with
c^N <= 1/eta0_sq; the a priori factor may then be unprovable, so the step
always re-verifies growth a posteriori and raises GrowthContractViolated
honestly if a configuration breaks it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from . import ratlin as rl
from .enumeration import (DeltaResult, _Budget, _int_nthroot_floor, delta_m,
                          rational_roots, stable_subspaces_within)
from .errors import (GrowthContractViolated, IncompleteSearch,
                     InternalInvariantViolation, NotBelowEta0,
                     ProtectionFailed, UnexpandableSubspace, ValidationError,
                     WholeSpace)
from .exterior import contraction_constant
from .lattice import (RationalSubspace, Scenario, TorusElement,
                      UnimodularLattice, apply_torus, covolume_sq, lcm_pow)

F = Fraction


@dataclass(frozen=True)
class PushoutConfig:
    """Knobs for one run; defaults give the self-calibrating exact pipeline."""

    lambda_multiplier: Fraction = F(2)
    eta0_override: Fraction | None = None
    max_steps: int = 32
    vector_budget: int = 10 ** 6

    def __post_init__(self):
        object.__setattr__(self, "lambda_multiplier", F(self.lambda_multiplier))
        if self.lambda_multiplier <= 1:
            raise ValidationError("lambda_multiplier", "must be > 1")
        if self.eta0_override is not None:
            object.__setattr__(self, "eta0_override", F(self.eta0_override))
            if not 0 < self.eta0_override < 1:
                raise ValidationError("eta0", "must lie strictly between 0 and 1")
        if self.max_steps < 0:
            raise ValidationError("max_steps", "must be >= 0")
        if self.vector_budget < 1:
            raise ValidationError("vector_budget", "must be >= 1")


class _NotNeeded:
    __slots__ = ()

    def __repr__(self):
        return "NotNeeded"


NOT_NEEDED = _NotNeeded()


def _fresh_budget(cfg: PushoutConfig) -> _Budget:
    return _Budget(cfg.vector_budget)


def _budget_arg(cfg: PushoutConfig, budget) -> _Budget:
    if budget is None:
        return _fresh_budget(cfg)
    if isinstance(budget, _Budget):
        return budget
    return _Budget(int(budget))


def select_index_set(lat: UnimodularLattice, w: RationalSubspace,
                     sc: Scenario) -> tuple[int, ...]:
    """Block index set I from the descending kernel chain of block projections.

    Scan blocks in ascending order; whenever the current kernel subspace has a
    nonzero projection to block i, add i and pass to the kernel of that
    projection. The result makes the projection of W to the I-coordinates
    injective, which is asserted exactly.
    """
    real = lat.real_rows(w.rows)
    cur = [tuple(row) for row in real]
    picked = []
    for i, (a, b) in enumerate(sc.blocks):
        if not cur:
            break
        proj = [row[a:b] for row in cur]
        if all(x == 0 for p in proj for x in p):
            continue
        picked.append(i)
        coeffs = rl.rat_right_kernel(rl.transpose(proj))
        cur = [tuple(sum(cf[j] * cur[j][t] for j in range(len(cur)))
                     for t in range(lat.n)) for cf in coeffs]
        cur = [row for row in cur if any(row)]
    if cur:
        raise InternalInvariantViolation("projection kernel chain did not reach zero")
    i_cols = [c for i in picked for c in range(*sc.blocks[i])]
    proj_w = [tuple(row[c] for c in i_cols) for row in real]
    if rl.rat_rank(proj_w) != w.dim:
        raise InternalInvariantViolation("index-set projection is not injective on W")
    return tuple(picked)


def _is_psd(m) -> bool:
    """Exact test for positive semidefiniteness of a symmetric rational matrix."""
    a = [[F(x) for x in row] for row in m]
    while a:
        k = len(a)
        diag = [a[i][i] for i in range(k)]
        if any(d < 0 for d in diag):
            return False
        p = max(range(k), key=lambda i: diag[i])
        if diag[p] == 0:
            return all(x == 0 for row in a for x in row)
        if p != 0:
            a[0], a[p] = a[p], a[0]
            for row in a:
                row[0], row[p] = row[p], row[0]
        piv = a[0][0]
        a = [[a[i][j] - a[i][0] * a[0][j] / piv for j in range(1, k)]
             for i in range(1, k)]
    return True


def _det_poly(g_i, g_c) -> list[Fraction]:
    """Coefficients of det(x·g_i - g_c) by exact interpolation."""
    k = len(g_i)
    xs = list(range(k + 1))
    ys = []
    for t in xs:
        m = tuple(tuple(t * g_i[r][c] - g_c[r][c] for c in range(k)) for r in range(k))
        ys.append(rl.rat_det(m))
    # Lagrange interpolation, accumulated as coefficient lists
    coeffs = [F(0)] * (k + 1)
    for idx, x0 in enumerate(xs):
        term = [F(1)]
        denom = F(1)
        for j, xj in enumerate(xs):
            if j == idx:
                continue
            term = [F(0)] + term
            for d in range(len(term) - 1):
                term[d] -= xj * term[d + 1]
            denom *= x0 - xj
        scale = ys[idx] / denom
        for d, c in enumerate(term):
            coeffs[d] += scale * c
    return coeffs


def _sigma_sq_upper(g_i, g_c, rounds: int = 16) -> Fraction:
    """Certified rational upper bound for max_x (x·g_c·x)/(x·g_i·x), g_i PD.

    Equals the exact largest generalized eigenvalue whenever that value is
    rational (bisection bracket plus rational-root snap); otherwise a dyadic
    overshoot, which only strengthens downstream certificates.
    """
    if all(x == 0 for row in g_c for x in row):
        return F(0)

    def ok(x: Fraction) -> bool:
        k = len(g_i)
        m = tuple(tuple(x * g_i[r][c] - g_c[r][c] for c in range(k)) for r in range(k))
        return _is_psd(m)

    hi = F(1)
    while not ok(hi):
        hi *= 2
    lo = F(0)
    for _ in range(rounds):
        mid = (lo + hi) / 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    for r in rational_roots(_det_poly(g_i, g_c)):
        if lo < r <= hi and ok(r):
            return r
    return hi


@dataclass(frozen=True)
class ExpansionCertificate:
    """Torus element expanding W, with the exact constants it achieves.

    achieved_c2_sq bounds the squared expansion of every vector in W and every
    pure wedge spanned inside W; achieved_c1 bounds the worst squared-root
    contraction over all pure wedges of the ambient space.
    """

    s: TorusElement
    index_set: tuple[int, ...]
    c_w_sq: Fraction
    lam: Fraction
    achieved_c1: Fraction
    achieved_c2_sq: Fraction

    def __post_init__(self):
        if not self.lam > self.c_w_sq:
            raise InternalInvariantViolation("lambda must exceed c_w_sq")
        if not self.achieved_c2_sq > 1:
            raise InternalInvariantViolation("expansion constant must exceed 1")
        if not self.achieved_c1 >= 1:
            raise InternalInvariantViolation("contraction constant must be >= 1")

    @property
    def c1c2_sq(self) -> Fraction:
        return self.achieved_c1 ** 2 * self.achieved_c2_sq


def expansion_element(lat: UnimodularLattice, w: RationalSubspace, sc: Scenario,
                      cfg: PushoutConfig) -> ExpansionCertificate:
    """Certificate (s, I, C_W², λ, C₁, C₂²) making s expand W and contract little.

    W is treated as the graph of a map from its I-coordinate projection to the
    remaining coordinates; C_W² = 1 + σ² with σ² a certified upper bound for
    the largest squared singular value of that map. λ = ρ^{N-d_I} for the
    smallest power of two ρ with λ ≥ lambda_multiplier·C_W²; s scales
    I-blocks by λ and the rest by ρ^{-d_I}, keeping determinant one exactly.
    """
    if w.is_full:
        raise WholeSpace("expansion needs a proper subspace")
    n = lat.n
    picked = select_index_set(lat, w, sc)
    i_cols = [c for i in picked for c in range(*sc.blocks[i])]
    d_i = len(i_cols)
    if d_i == n:
        raise UnexpandableSubspace(
            "index set touches every block; no determinant-one direction expands W")
    o_cols = [c for c in range(n) if c not in set(i_cols)]
    real = lat.real_rows(w.rows)
    a = [tuple(row[c] for c in i_cols) for row in real]
    b = [tuple(row[c] for c in o_cols) for row in real]
    g_i = rl.mat_mul(a, rl.transpose(a))
    g_c = rl.mat_mul(b, rl.transpose(b))
    c_w_sq = 1 + _sigma_sq_upper(g_i, g_c)
    target = cfg.lambda_multiplier * c_w_sq
    rho = F(2)
    while rho ** (n - d_i) < target:
        rho *= 2
    lam = rho ** (n - d_i)
    mu = F(1) / rho ** d_i
    scalars = tuple(lam if i in picked else mu for i in range(sc.num_blocks))
    s = TorusElement(scalars=scalars, block_dims=sc.block_dims)
    return ExpansionCertificate(
        s=s,
        index_set=picked,
        c_w_sq=c_w_sq,
        lam=lam,
        achieved_c1=contraction_constant(s),
        achieved_c2_sq=(lam / c_w_sq) ** 2,
    )


@dataclass(frozen=True)
class ProtectResult:
    """Protection chain and the guard it certifies.

    For every eligible W not contained in w_infinity, the saturated sum
    satisfies covol²(W + W∞) ≥ guard_c·covol²(W∞); certified by exhausting
    all eligible strict superspaces of each chain element below the cap.
    """

    w_infinity: RationalSubspace
    chain: tuple[RationalSubspace, ...]
    chain_covol_sq: tuple[Fraction, ...]
    guard_c: Fraction
    eta0_sq: Fraction


def protect(lat: UnimodularLattice, sc: Scenario, cfg: PushoutConfig, c1c2_sq,
            eta0_sq=None, delta: DeltaResult | None = None, budget=None):
    """Grow the minimal witness into a protected subspace, or NOT_NEEDED.

    Starting from the exact minimizer W₁, repeatedly absorb any eligible
    strict superspace whose covolume² is below c1c2_sq times the current
    element's, picking the smallest violator each time. Equivalent to the
    joint-covolume loop over subspaces W' ⊄ W_i: the saturated sum W' + W_i is
    itself an eligible strict superspace with covolume no larger than the
    joint one, and conversely any cheap superspace violates in its own name.
    """
    c = F(c1c2_sq)
    if c <= 1:
        raise ValidationError("c1c2_sq", "must be > 1")
    n = lat.n
    big_l = lcm_pow(n)
    bud = _budget_arg(cfg, budget)
    if eta0_sq is None:
        eta0_sq = (cfg.eta0_override ** 2 if cfg.eta0_override is not None
                   else c ** (-n))
    eta0_sq = F(eta0_sq)
    d = delta if delta is not None else delta_m(lat, sc, budget=bud)
    if d.delta_sq_pow >= eta0_sq ** big_l:
        return NOT_NEEDED
    if not d.complete:
        raise IncompleteSearch("cannot start a protection chain from an upper bound")
    chain = [d.witness]
    covols = [covolume_sq(lat, d.witness)]
    while True:
        x = chain[-1]
        cap = c * covols[-1]
        if cap > 1:
            # a violation by the full space itself; the chain bound rules
            # this out whenever eta0_sq <= c^(-N)
            raise ProtectionFailed(
                "guard cap exceeded covolume 1; floor and guard are inconsistent")
        supers, complete = stable_subspaces_within(lat, sc, cap, base=x, budget=bud)
        if not complete:
            raise IncompleteSearch("budget exhausted while certifying the guard")
        viol = [(covolume_sq(lat, y), y.dim, y.rows, y) for y in supers
                if covolume_sq(lat, y) < cap]
        if not viol:
            break
        viol.sort(key=lambda t: t[:3])
        chain.append(viol[0][3])
        covols.append(viol[0][0])
        if len(chain) > n:
            raise ProtectionFailed("protection chain exceeded the dimension bound")
    return ProtectResult(
        w_infinity=chain[-1],
        chain=tuple(chain),
        chain_covol_sq=tuple(covols),
        guard_c=c,
        eta0_sq=eta0_sq,
    )


def dyadic_guard(eta0_sq: Fraction, n: int, grid_bits: int = 8) -> Fraction:
    """Largest c = t/2^grid_bits > 1 with c^n ≤ 1/eta0_sq."""
    eta0_sq = F(eta0_sq)
    if not 0 < eta0_sq < 1:
        raise ValidationError("eta0", "squared floor must lie in (0, 1)")
    denom = 1 << grid_bits
    scaled = F(denom ** n) / eta0_sq
    t = _int_nthroot_floor(scaled.numerator // scaled.denominator, n)
    c = F(t, denom)
    if c <= 1:
        raise ValidationError("eta0", "floor too close to 1 for a usable guard")
    return c


@dataclass(frozen=True)
class PushoutStep:
    """Everything one step did, exact."""

    delta_before: DeltaResult
    delta_after: DeltaResult
    w_infinity: RationalSubspace
    chain: tuple[RationalSubspace, ...]
    chain_covol_sq: tuple[Fraction, ...]
    expansion: ExpansionCertificate
    eta0_sq: Fraction
    guard_c: Fraction
    case_tag: str
    growth_qpow_factor: Fraction
    qpow_ratio: Fraction

    @property
    def growth_factor_float(self) -> float:
        """A priori guaranteed δ ratio: min(achieved_c2_sq, 4)^(1/(2N))."""
        n = self.delta_before.witness.ambient
        return float(min(self.expansion.achieved_c2_sq, F(4))) ** (1 / (2 * n))


def _resolve_protection(lat, sc, cfg, d0, big_l):
    """Stabilize (guard, eta0, W∞, certificate); raises NotBelowEta0 if moot."""
    n = lat.n
    if d0.witness.is_full:
        # delta is exactly 1; every admissible floor is below it
        eta0_sq = (cfg.eta0_override ** 2 if cfg.eta0_override is not None
                   else None)
        raise NotBelowEta0(eta0_sq, d0.delta_sq_pow)
    cert = expansion_element(lat, d0.witness, sc, cfg)
    if cfg.eta0_override is not None:
        eta0_sq = cfg.eta0_override ** 2
        if d0.delta_sq_pow >= eta0_sq ** big_l:
            raise NotBelowEta0(eta0_sq, d0.delta_sq_pow)
        guard = dyadic_guard(eta0_sq, n)
        pres = protect(lat, sc, cfg, guard, eta0_sq=eta0_sq, delta=d0,
                       budget=_fresh_budget(cfg))
        if pres is NOT_NEEDED:
            raise InternalInvariantViolation("floor check diverged between layers")
        if pres.w_infinity != d0.witness:
            cert = expansion_element(lat, pres.w_infinity, sc, cfg)
        return pres, cert
    c_work = cert.c1c2_sq
    eta0_sq = c_work ** (-n)
    if d0.delta_sq_pow >= eta0_sq ** big_l:
        # larger constants only lower the floor further
        raise NotBelowEta0(eta0_sq, d0.delta_sq_pow)
    for _ in range(8 * n):
        pres = protect(lat, sc, cfg, c_work, eta0_sq=eta0_sq, delta=d0,
                       budget=_fresh_budget(cfg))
        if pres is NOT_NEEDED:
            raise InternalInvariantViolation("floor check diverged between layers")
        cert = expansion_element(lat, pres.w_infinity, sc, cfg)
        if cert.c1c2_sq <= c_work:
            return pres, cert
        c_work = cert.c1c2_sq
        eta0_sq = c_work ** (-n)
        if d0.delta_sq_pow >= eta0_sq ** big_l:
            raise NotBelowEta0(eta0_sq, d0.delta_sq_pow)
    raise InternalInvariantViolation("working constants failed to stabilize")


def _execute_step(lat, sc, cfg, d0, pres, cert, big_l):
    """Apply the certified torus element and re-verify the growth claim."""
    n = lat.n
    new_lat = apply_torus(cert.s, lat)
    d1 = delta_m(new_lat, sc, budget=_fresh_budget(cfg))
    if not d1.complete:
        raise IncompleteSearch("moved lattice's delta could not be certified")
    factor = min(cert.achieved_c2_sq, F(4)) ** (big_l // n)
    if d1.delta_sq_pow < factor * d0.delta_sq_pow:
        raise GrowthContractViolated(
            f"a posteriori q-ratio {d1.delta_sq_pow / d0.delta_sq_pow} "
            f"fell below the a priori factor {factor}")
    if d1.witness.is_full:
        tag = "none"
    elif pres.w_infinity.contains(d1.witness):
        tag = "I"
    else:
        tag = "II"
    rec = PushoutStep(
        delta_before=d0,
        delta_after=d1,
        w_infinity=pres.w_infinity,
        chain=pres.chain,
        chain_covol_sq=pres.chain_covol_sq,
        expansion=cert,
        eta0_sq=pres.eta0_sq,
        guard_c=pres.guard_c,
        case_tag=tag,
        growth_qpow_factor=factor,
        qpow_ratio=d1.delta_sq_pow / d0.delta_sq_pow,
    )
    return new_lat, rec


def pushout_step(lat: UnimodularLattice, sc: Scenario, cfg: PushoutConfig,
                 delta_before: DeltaResult | None = None
                 ) -> tuple[UnimodularLattice, PushoutStep]:
    """One certified push-out round.

    Raises NotBelowEta0 when the restricted minimal covolume is already at or
    above the governing floor. Otherwise returns the moved lattice and a step
    record whose growth claim min(achieved_c2_sq, 4)^{L/N} (in q-power form)
    is re-verified against the exact recomputed delta; GrowthContractViolated
    if a custom floor configuration defeats it.
    """
    big_l = lcm_pow(lat.n)
    d0 = delta_before if delta_before is not None else delta_m(
        lat, sc, budget=_fresh_budget(cfg))
    if not d0.complete:
        raise IncompleteSearch("cannot certify a step from an incomplete delta")
    pres, cert = _resolve_protection(lat, sc, cfg, d0, big_l)
    return _execute_step(lat, sc, cfg, d0, pres, cert, big_l)


class Terminated(enum.Enum):
    REACHED_ETA0 = "reached_eta0"
    MAX_STEPS = "max_steps"
    INCOMPLETE = "incomplete"


@dataclass(frozen=True)
class PushoutCertificate:
    """Full trajectory of a drive run."""

    initial_delta: DeltaResult
    steps: tuple[PushoutStep, ...]
    terminated: Terminated
    eta0_sq: Fraction | None
    composed: TorusElement
    final_delta: DeltaResult
    final_lattice: UnimodularLattice
    step_bound: int | None


def _step_count_bound(q0: Fraction, factor_min: Fraction, target: Fraction,
                      hard_cap: int = 10 ** 6) -> int:
    """Smallest b with factor_min^b·q0 ≥ target (exact iteration)."""
    b = 0
    q = q0
    while q < target:
        q *= factor_min
        b += 1
        if b > hard_cap:
            raise InternalInvariantViolation("step bound iteration diverged")
    return b


def drive(lat: UnimodularLattice, sc: Scenario, cfg: PushoutConfig
          ) -> PushoutCertificate:
    """Iterate push-out steps until the floor is reached (or steps run out).

    Terminal states: REACHED_ETA0 (with the governing floor and the composed
    torus element), MAX_STEPS, or INCOMPLETE when a budget prevented
    certification; the certificate always carries the partial trace. On
    success with at least one step, the trace length is asserted against the
    exact pigeonhole bound from the smallest per-step growth factor.
    """
    big_l = lcm_pow(lat.n)
    steps: list[PushoutStep] = []
    cur = lat
    d_cur = delta_m(cur, sc, budget=_fresh_budget(cfg))
    d_init = d_cur
    status = None
    eta0_final = None
    if not d_cur.complete:
        status = Terminated.INCOMPLETE
    else:
        while True:
            try:
                pres, cert = _resolve_protection(cur, sc, cfg, d_cur, big_l)
            except NotBelowEta0 as e:
                status = Terminated.REACHED_ETA0
                eta0_final = e.eta0_sq
                break
            except IncompleteSearch:
                status = Terminated.INCOMPLETE
                break
            if len(steps) >= cfg.max_steps:
                status = Terminated.MAX_STEPS
                break
            try:
                new_lat, rec = _execute_step(cur, sc, cfg, d_cur, pres, cert, big_l)
            except IncompleteSearch:
                status = Terminated.INCOMPLETE
                break
            steps.append(rec)
            cur = new_lat
            d_cur = rec.delta_after
    composed = TorusElement(tuple(F(1) for _ in sc.blocks), sc.block_dims)
    for rec in steps:
        composed = composed.compose(rec.expansion.s)
    if steps:
        replayed = apply_torus(composed, lat)
        if replayed.basis != cur.basis:
            raise InternalInvariantViolation("composed torus does not replay the trace")
    bound = None
    if status is Terminated.REACHED_ETA0 and steps:
        eta0s = [rec.eta0_sq for rec in steps]
        if eta0_final is not None:
            eta0s.append(eta0_final)
        eta0_max = max(eta0s)
        factor_min = min(rec.growth_qpow_factor for rec in steps)
        bound = _step_count_bound(steps[0].delta_before.delta_sq_pow, factor_min,
                                  eta0_max ** big_l)
        if len(steps) > bound:
            raise InternalInvariantViolation(
                f"trace length {len(steps)} exceeded the growth bound {bound}")
        if eta0_final is None:
            eta0_final = eta0s[-1] if eta0s else None
    return PushoutCertificate(
        initial_delta=d_init,
        steps=tuple(steps),
        terminated=status,
        eta0_sq=eta0_final,
        composed=composed,
        final_delta=d_cur,
        final_lattice=cur,
        step_bound=bound,
    )
