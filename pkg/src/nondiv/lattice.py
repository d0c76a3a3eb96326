"""Unimodular lattices, rational subspaces, block scenarios, torus elements.

Subspaces are stored as saturated HNF integer matrices in LATTICE coordinates
(rows are coordinates of a Z-basis of Λ∩W with respect to the lattice basis).
Group actions transport them for free; the real-coordinate span is derived.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import lcm
from typing import Sequence

from . import ratlin as rl
from .errors import NotUnimodular, ValidationError

Rat = Fraction


def _freeze_rat(rows) -> rl.RatRows:
    return rl.rat_matrix(rows)


@dataclass(frozen=True)
class Scenario:
    """Block decomposition R^N = ⊕ V_i plus generators of M.

    blocks are 0-based half-open [start, stop) coordinate ranges, contiguous
    and ascending. The torus S is always the full block-scalar determinant-1
    torus; its rank is #blocks - 1. Non-isomorphism of the blocks as M-reps
    is trusted input (see isomorphy_warnings for the heuristic check).
    """

    n: int
    blocks: tuple[tuple[int, int], ...]
    m_generators: tuple[rl.RatRows, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("dimension", f"must be >= 2, got {self.n}")
        pos = 0
        for i, (a, b) in enumerate(self.blocks):
            if a != pos or b <= a:
                raise ValidationError(f"blocks[{i}]",
                                      f"range [{a},{b}) must start at {pos} and be nonempty")
            if b > self.n:
                raise ValidationError(f"blocks[{i}]", f"range end {b} exceeds dimension {self.n}")
            pos = b
        if pos != self.n:
            raise ValidationError("blocks", f"cover only {pos} of {self.n} coordinates")
        for gi, g in enumerate(self.m_generators):
            if len(g) != self.n or any(len(r) != self.n for r in g):
                raise ValidationError(f"m_generators[{gi}]", f"must be {self.n}x{self.n}")
            for i in range(self.n):
                for j in range(self.n):
                    if self.block_of(i) != self.block_of(j) and g[i][j] != 0:
                        raise ValidationError(
                            f"m_generators[{gi}][{i}][{j}]",
                            "nonzero entry outside the block diagonal")
            if rl.rat_det(g) != 1:
                raise ValidationError(f"m_generators[{gi}]", "determinant must be 1")

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def torus_rank(self) -> int:
        return len(self.blocks) - 1

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in self.blocks)

    def block_of(self, coord: int) -> int:
        for i, (a, b) in enumerate(self.blocks):
            if a <= coord < b:
                return i
        raise IndexError(coord)

    def generator_block(self, g: rl.RatRows, i: int) -> rl.RatRows:
        a, b = self.blocks[i]
        return tuple(tuple(row[a:b]) for row in g[a:b])

    def isomorphy_warnings(self) -> list[str]:
        """Heuristic check that equal-dimension blocks are non-isomorphic M-reps.

        Compares generator traces blockwise; identical trace vectors on a pair
        of equal-dimension blocks cannot prove isomorphism but are suspicious
        enough to surface.
        """
        out = []
        for i in range(self.num_blocks):
            for j in range(i + 1, self.num_blocks):
                if self.block_dims[i] != self.block_dims[j]:
                    continue
                same = all(
                    sum(self.generator_block(g, i)[k][k] for k in range(self.block_dims[i]))
                    == sum(self.generator_block(g, j)[k][k] for k in range(self.block_dims[j]))
                    for g in self.m_generators)
                if same:
                    out.append(
                        f"blocks {i} and {j} have equal dimension and identical generator "
                        f"traces; they may be isomorphic as representations, which would "
                        f"make the block-scalar torus too large")
        return out


def trivial_scenario(n: int) -> Scenario:
    """All blocks one-dimensional, M = {e}; the unrestricted-delta setting."""
    return Scenario(n=n, blocks=tuple((i, i + 1) for i in range(n)), m_generators=())


def make_scenario(n: int, blocks: Sequence[Sequence[int]], generators: Sequence[Sequence[Sequence]]) -> Scenario:
    return Scenario(n=n,
                    blocks=tuple((int(a), int(b)) for a, b in blocks),
                    m_generators=tuple(_freeze_rat(g) for g in generators))


@dataclass(frozen=True)
class TorusElement:
    """Per-block positive scalars with determinant one."""

    scalars: tuple[Fraction, ...]
    block_dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.scalars) != len(self.block_dims):
            raise ValidationError("scalars", "one scalar per block required")
        det = Fraction(1)
        for s, d in zip(self.scalars, self.block_dims):
            if s <= 0:
                raise ValidationError("scalars", f"must be positive, got {s}")
            det *= s ** d
        if det != 1:
            raise ValidationError("scalars", f"determinant {det} != 1")

    def diagonal(self) -> tuple[Fraction, ...]:
        out = []
        for s, d in zip(self.scalars, self.block_dims):
            out.extend([s] * d)
        return tuple(out)

    def as_matrix(self) -> rl.RatRows:
        diag = self.diagonal()
        n = len(diag)
        return tuple(tuple(diag[i] if i == j else Fraction(0) for j in range(n))
                     for i in range(n))

    def inverse(self) -> "TorusElement":
        return TorusElement(tuple(1 / s for s in self.scalars), self.block_dims)

    def compose(self, other: "TorusElement") -> "TorusElement":
        if self.block_dims != other.block_dims:
            raise ValidationError("block_dims", "mismatched block structures")
        return TorusElement(tuple(a * b for a, b in zip(self.scalars, other.scalars)),
                            self.block_dims)


def torus_identity(sc: Scenario) -> TorusElement:
    return TorusElement(tuple(Fraction(1) for _ in sc.blocks), sc.block_dims)


@dataclass(frozen=True)
class UnimodularLattice:
    """A point of SL_N(R)/SL_N(Z): columns of `basis` generate the lattice."""

    basis: rl.RatRows

    def __post_init__(self):
        n = len(self.basis)
        if n < 2 or any(len(r) != n for r in self.basis):
            raise ValidationError("basis", "must be square, N >= 2")
        d = rl.rat_det(self.basis)
        if d not in (1, -1):
            raise NotUnimodular(f"|det| must be 1, got {d}")
        object.__setattr__(self, "_det_sign", 1 if d == 1 else -1)

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def det_sign(self) -> int:
        return self._det_sign

    @cached_property
    def gram(self) -> rl.RatRows:
        """A[i][j] = ⟨column i, column j⟩; ‖x·basisᵀ‖² = x·A·xᵀ for integer rows x."""
        bt = rl.transpose(self.basis)
        return rl.mat_mul(bt, self.basis)

    @cached_property
    def int_gram(self) -> tuple[rl.IntRows, int]:
        """(d·gram, d) with d the common denominator; integer Gram for fast dets."""
        d = 1
        for row in self.gram:
            for x in row:
                d = lcm(d, x.denominator)
        scaled = tuple(tuple(int(x * d) for x in row) for row in self.gram)
        return scaled, d

    def real_rows(self, int_rows: Sequence[Sequence[int]]) -> rl.RatRows:
        """Real coordinates (as rows) of integer coordinate rows."""
        bt = rl.transpose(self.basis)
        return tuple(tuple(sum(Fraction(x) * bt[i][j] for i, x in enumerate(row))
                           for j in range(self.n)) for row in int_rows)

    def vector_norm_sq(self, int_row: Sequence[int]) -> Fraction:
        a = self.gram
        return sum(Fraction(x) * sum(a[i][j] * y for j, y in enumerate(int_row))
                   for i, x in enumerate(int_row))


def make_lattice(basis_rows: Sequence[Sequence]) -> UnimodularLattice:
    return UnimodularLattice(basis=_freeze_rat(basis_rows))


def standard_lattice(n: int) -> UnimodularLattice:
    return UnimodularLattice(basis=_freeze_rat(rl.identity(n)))


class _ZeroSubspace:
    """Distinguished sentinel for the zero subspace; never a RationalSubspace."""

    dim = 0
    __slots__ = ()

    def __repr__(self):
        return "ZeroSubspace"


ZERO_SUBSPACE = _ZeroSubspace()


@dataclass(frozen=True)
class RationalSubspace:
    """Saturated HNF integer rows spanning Λ∩W in lattice coordinates."""

    ambient: int
    rows: rl.IntRows

    def __post_init__(self):
        if not self.rows:
            raise ValidationError("rows", "zero subspace is not a RationalSubspace")
        if any(len(r) != self.ambient for r in self.rows):
            raise ValidationError("rows", "row length must equal ambient dimension")
        if len(self.rows) > self.ambient:
            raise ValidationError("rows", "more rows than ambient dimension")
        sat = rl.saturate(self.rows)
        if sat != self.rows:
            raise ValidationError("rows", "not a saturated HNF basis")

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient

    def contains(self, other: "RationalSubspace") -> bool:
        return all(rl.span_contains(self.rows, r) for r in other.rows)


def subspace_from_rows(ambient: int, rows: Sequence[Sequence[int]]):
    """Saturate and canonicalize integer spanning rows; ZERO_SUBSPACE if empty."""
    sat = rl.saturate([tuple(r) for r in rows])
    if not sat:
        return ZERO_SUBSPACE
    return RationalSubspace(ambient=ambient, rows=sat)


def subspace_from_rational_rows(ambient: int, rows: Sequence[Sequence]):
    ints, _ = rl.row_scale_to_int(rl.rat_matrix(rows)) if rows else ((), ())
    return subspace_from_rows(ambient, ints)


def full_subspace(n: int) -> RationalSubspace:
    return RationalSubspace(ambient=n, rows=rl.identity(n))


def covolume_sq(lat: UnimodularLattice, w) -> Fraction:
    """‖Λ_W‖²: Gram determinant of the real basis of Λ∩W. Zero subspace gives 1."""
    if w is ZERO_SUBSPACE:
        return Fraction(1)
    return covolume_sq_rows(lat, w.rows)


def covolume_sq_rows(lat: UnimodularLattice, int_rows: Sequence[Sequence[int]]) -> Fraction:
    a_int, d = lat.int_gram
    k = len(int_rows)
    if k == 0:
        return Fraction(1)
    inner = rl.mat_mul(rl.mat_mul(int_rows, a_int), rl.transpose(int_rows))
    det = rl.int_det(inner)
    return Fraction(det, d ** k)


def subspace_sum(w1: RationalSubspace, w2: RationalSubspace) -> RationalSubspace:
    if w1.ambient != w2.ambient:
        raise ValidationError("ambient", "mismatched ambient dimensions")
    return subspace_from_rows(w1.ambient, list(w1.rows) + list(w2.rows))


def subspace_intersect(w1: RationalSubspace, w2: RationalSubspace):
    """W₁∩W₂ saturated; ZERO_SUBSPACE when the intersection is {0}.

    For saturated inputs Λ_{W₁∩W₂} = Λ_{W₁} ∩ Λ_{W₂} exactly.
    """
    if w1.ambient != w2.ambient:
        raise ValidationError("ambient", "mismatched ambient dimensions")
    stacked = list(w1.rows) + list(w2.rows)
    # rows u with u·stacked = 0; the w1-part of u recombines into intersection vectors
    ker = rl.right_kernel_int(rl.transpose(stacked))
    k1 = len(w1.rows)
    vecs = []
    for u in ker:
        v = tuple(sum(u[i] * w1.rows[i][j] for i in range(k1)) for j in range(w1.ambient))
        if any(v):
            vecs.append(v)
    return subspace_from_rows(w1.ambient, vecs)


@lru_cache(maxsize=512)
def conjugated_generators(lat: UnimodularLattice, sc: Scenario) -> tuple[rl.RatRows, ...]:
    """Generators of M in lattice coordinates: B⁻¹·g·B per generator g."""
    binv = rl.rat_inverse(lat.basis)
    return tuple(rl.rat_matrix(rl.mat_mul(rl.mat_mul(binv, g), lat.basis))
                 for g in sc.m_generators)


def is_m_stable(w, lat: UnimodularLattice, sc: Scenario) -> bool:
    """Whether every generator of M maps the real span of w into itself."""
    if w is ZERO_SUBSPACE:
        return True
    base = [tuple(Fraction(x) for x in r) for r in w.rows]
    for ghat in conjugated_generators(lat, sc):
        # row coordinates transform by x ↦ x·ĝᵀ, i.e. entrywise rows of ĝ dot x
        for x in w.rows:
            y = rl.mat_vec(ghat, [Fraction(v) for v in x])
            if not rl.span_contains(base, y):
                return False
    return True


def m_closure(lat: UnimodularLattice, sc: Scenario, rows: Sequence[Sequence[int]]):
    """Smallest M-stable Λ-rational subspace containing the span of rows."""
    cur = [tuple(Fraction(x) for x in r) for r in rows if any(r)]
    if not cur:
        return ZERO_SUBSPACE
    gens = conjugated_generators(lat, sc)
    rank = rl.rat_rank(cur)
    changed = True
    while changed and rank < lat.n:
        changed = False
        for ghat in gens:
            for row in list(cur):
                y = rl.mat_vec(ghat, row)
                if not rl.span_contains(cur, y):
                    cur.append(tuple(y))
                    rank = rl.rat_rank(cur)
                    changed = True
    return subspace_from_rational_rows(lat.n, cur)


def apply_group(g: Sequence[Sequence], lat: UnimodularLattice) -> UnimodularLattice:
    """g·Λ; integer subspace coordinates are unchanged by transport."""
    gm = _freeze_rat(g)
    d = rl.rat_det(gm)
    if d not in (1, -1):
        raise NotUnimodular(f"|det g| must be 1, got {d}")
    return UnimodularLattice(basis=rl.rat_matrix(rl.mat_mul(gm, lat.basis)))


def apply_torus(s: TorusElement, lat: UnimodularLattice) -> UnimodularLattice:
    diag = s.diagonal()
    if len(diag) != lat.n:
        raise ValidationError("scalars", "torus element dimension mismatch")
    new_basis = tuple(tuple(diag[i] * x for x in row) for i, row in enumerate(lat.basis))
    return UnimodularLattice(basis=rl.rat_matrix(new_basis))


def lcm_pow(n: int) -> int:
    return rl.lcm_upto(n)


def q_pow(covol_sq: Fraction, dim: int, n: int) -> Fraction:
    """Root-free comparison key (covol²)^{L/dim}; smaller means smaller covol^{1/dim}."""
    return Fraction(covol_sq) ** (lcm_pow(n) // dim)


def shortest_vector_sq(lat: UnimodularLattice) -> Fraction:
    from .enumeration import shortest_vector_sq as _svs
    return _svs(lat)
