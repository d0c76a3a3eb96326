"""Pure wedges and the block-scalar torus action on exterior powers.

A torus element acts diagonally on ∧^k with eigenvalues equal to k-fold
products of coordinate scalars, so extreme scaling factors are products of
the k smallest / largest available scalars. Everything stays rational;
comparisons against concrete wedges are made in squared form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import ratlin as rl
from .errors import DegreeOutOfRange
from .lattice import TorusElement


@dataclass(frozen=True)
class PureWedge:
    """v₁∧…∧v_k carried by its spanning vectors; sq_norm is the Gram det."""

    spanning_vectors: rl.RatRows
    sq_norm: Fraction = field(init=False)

    def __post_init__(self):
        vecs = rl.rat_matrix(self.spanning_vectors)
        object.__setattr__(self, "spanning_vectors", vecs)
        object.__setattr__(self, "sq_norm", rl.gram_det(vecs))

    @property
    def degree(self) -> int:
        return len(self.spanning_vectors)

    def subspace_rows(self) -> rl.RatRows:
        """The span L_v as rational rows."""
        return self.spanning_vectors


def apply_torus_to_wedge(s: TorusElement, v: PureWedge) -> PureWedge:
    diag = s.diagonal()
    scaled = tuple(tuple(d * x for d, x in zip(diag, vec)) for vec in v.spanning_vectors)
    return PureWedge(spanning_vectors=scaled)


def wedge_scaling_range(s: TorusElement, k: int) -> tuple[Fraction, Fraction]:
    """(min, max) factor by which s scales the norm of a degree-k pure wedge."""
    diag = sorted(s.diagonal())
    n = len(diag)
    if not 1 <= k <= n:
        raise DegreeOutOfRange(f"degree {k} outside 1..{n}")
    lo = Fraction(1)
    hi = Fraction(1)
    for x in diag[:k]:
        lo *= x
    for x in diag[n - k:]:
        hi *= x
    return lo, hi


def contraction_constant(s: TorusElement) -> Fraction:
    """C₁(s): for every pure wedge v of any degree, ‖s·v‖ ≥ ‖v‖/C₁(s)."""
    n = len(s.diagonal())
    worst = Fraction(1)
    for k in range(1, n + 1):
        lo, _ = wedge_scaling_range(s, k)
        worst = max(worst, 1 / lo)
    return worst
