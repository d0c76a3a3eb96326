"""Push-out drives on two fixture families.

Prints one table row per executed step and compares the realized step
count with the a priori bound carried by the certificate. The second
family sweeps the squashing exponent to show the linear step growth.
"""

from fractions import Fraction as F

from nondiv import PushoutConfig, drive, Terminated
from nondiv.samples import sl4_so21_scenario, sl4_torus_lattice, squash_lattice_2d
from nondiv.lattice import trivial_scenario


def run(tag, lat, sc, cfg):
    cert = drive(lat, sc, cfg)
    print(f"{tag}: start delta ~ {cert.initial_delta.delta_float:.6f}, "
          f"{len(cert.steps)} steps (bound {cert.step_bound}), "
          f"terminated {cert.terminated.value}")
    for i, st in enumerate(cert.steps, 1):
        scalars = ",".join(str(x) for x in st.expansion.s.scalars)
        print(f"  step {i}: delta ~ {st.delta_after.delta_float:.6f}  "
              f"case {st.case_tag}  s = ({scalars})")
    comp = ",".join(str(x) for x in cert.composed.scalars)
    print(f"  composed torus: ({comp})")
    return cert


print("== 4-dim scenario, floor 1/4 ==")
sc4 = sl4_so21_scenario()
cfg4 = PushoutConfig(eta0_override=F(1, 4))
for t in (F(1, 2), F(1, 4), F(1, 8)):
    cert = run(f"s_t Z^4, t = {t}", sl4_torus_lattice(t), sc4, cfg4)
    assert cert.terminated is Terminated.REACHED_ETA0

print()
print("== squashed planes, adaptive floor ==")
# with no override the driver floors at c^(-n) for the certificate's own
# constant c; for these inputs that lands at 1/16
sc2 = trivial_scenario(2)
cfg2 = PushoutConfig()
for k in range(4, 13, 2):
    cert = run(f"diag(2^-{k}, 2^{k}) Z^2", squash_lattice_2d(F(1, 2 ** k)), sc2, cfg2)
    assert len(cert.steps) == max(0, k - 4)
