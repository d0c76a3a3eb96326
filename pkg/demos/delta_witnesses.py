"""Tour of restricted minimal covolume certificates.

Runs the exact search on a handful of lattices and prints the witness
subspace next to the certified value. Everything here is a Fraction; the
floats are display only.
"""

from fractions import Fraction as F

from nondiv import delta_m, make_lattice, standard_lattice, trivial_scenario
from nondiv.samples import (diagonal_lattice, sl4_so21_scenario,
                            sl4_torus_lattice)


def show(tag, lat, sc):
    d = delta_m(lat, sc)
    rows = " ".join(str(list(r)) for r in d.witness.rows)
    print(f"{tag:28s} delta ~ {d.delta_float:.6f}  witness dim {d.witness.dim}  rows {rows}")
    return d


print("== trivial group, unit blocks ==")
for n in (2, 3, 4, 5):
    show(f"Z^{n}", standard_lattice(n), trivial_scenario(n))

# squashing one axis pushes a coordinate line below covolume 1
show("diag(1/4, 4) Z^2", diagonal_lattice(F(1, 4), 4), trivial_scenario(2))
show("diag(1/2, 3, 2/3) Z^3", diagonal_lattice(F(1, 2), 3, F(2, 3)), trivial_scenario(3))

# no proper subspace beats the full space here: delta stays at 1
skew = make_lattice([[F(5, 6), 0], [F(3, 5), F(6, 5)]])
show("skew unimodular Z^2", skew, trivial_scenario(2))

print()
print("== 4-dim scenario: 1-block + hyperbolic 3-block ==")
sc4 = sl4_so21_scenario()
for t in (F(1, 2), F(1, 4), F(1, 8)):
    d = show(f"s_t Z^4, t = {t}", sl4_torus_lattice(t), sc4)
    # the witness is always the first coordinate line, covol t^3
    assert d.witness.rows == ((1, 0, 0, 0),)

# the inverse push makes the 3-dim block cheap instead
show("s_t Z^4, t = 2", sl4_torus_lattice(2), sc4)
show("s_t Z^4, t = 8", sl4_torus_lattice(8), sc4)
