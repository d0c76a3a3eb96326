"""Bundled example scenarios and lattice builders.

The 4-dimensional scenario couples a one-dimensional block with a
three-dimensional block carrying a rational orthogonal-group action that
preserves the form diag(1, 1, -1). Its only stable proper nonzero subspaces
are the two coordinate blocks, which makes it the canonical nontrivial test
bed for the whole push-out pipeline.
"""

from __future__ import annotations

from fractions import Fraction

from .lattice import (Scenario, TorusElement, UnimodularLattice, make_lattice,
                      make_scenario)

F = Fraction


def so21_generators_3d() -> tuple:
    """Three rational generators preserving x² + y² - z²: two boosts, one rotation."""
    b13 = ((F(5, 4), F(0), F(3, 4)),
           (F(0), F(1), F(0)),
           (F(3, 4), F(0), F(5, 4)))
    b23 = ((F(1), F(0), F(0)),
           (F(0), F(5, 4), F(3, 4)),
           (F(0), F(3, 4), F(5, 4)))
    r12 = ((F(3, 5), F(-4, 5), F(0)),
           (F(4, 5), F(3, 5), F(0)),
           (F(0), F(0), F(1)))
    return b13, b23, r12


def sl4_so21_scenario() -> Scenario:
    """Blocks {1} and {2,3,4}; M acts trivially on the first, hyperbolically on the second."""
    gens = []
    for g0 in so21_generators_3d():
        g = [[F(0)] * 4 for _ in range(4)]
        g[0][0] = F(1)
        for i in range(3):
            for j in range(3):
                g[i + 1][j + 1] = g0[i][j]
        gens.append(tuple(tuple(r) for r in g))
    return make_scenario(4, [(0, 1), (1, 4)], gens)


def sl4_torus(t) -> TorusElement:
    """diag(t³, 1/t, 1/t, 1/t) as a block-scalar element of the 4-dim scenario."""
    t = F(t)
    return TorusElement(scalars=(t ** 3, 1 / t), block_dims=(1, 3))


def sl4_torus_lattice(t) -> UnimodularLattice:
    """s_t·Z⁴ for the 4-dim scenario."""
    t = F(t)
    d = (t ** 3, 1 / t, 1 / t, 1 / t)
    return make_lattice([[d[i] if i == j else F(0) for j in range(4)] for i in range(4)])


def diagonal_lattice(*entries) -> UnimodularLattice:
    es = [F(e) for e in entries]
    n = len(es)
    return make_lattice([[es[i] if i == j else F(0) for j in range(n)] for i in range(n)])


def squash_lattice_2d(eps) -> UnimodularLattice:
    """diag(ε, 1/ε)·Z²."""
    eps = F(eps)
    return diagonal_lattice(eps, 1 / eps)
