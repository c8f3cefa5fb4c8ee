"""How much density sits away from the two newest poles?

For short ideal paths everything is in the pole windows. Old basepoints
are poles of the derivative too, and once a few particles have been
stacked their lobes are no longer negligible at sigma = c^6. The grid
needs its old-basepoint windows switched on to see this.
"""
from alelab import lemma_oracle as lo
from alelab.cluster import ideal_cluster
from alelab.params import GridConfig, SimParams
from alelab.sampler import build_density

P = SimParams(c=1e-3, nu=4.0, grid=GridConfig(coarse=1024))
print(f"{'n':>3} {'off-pole (plain grid)':>22} {'off-pole (refined)':>20} {'regions':>28}")
for n in range(2, 9):
    st = ideal_cluster(P, [(-1) ** k for k in range(n - 1)])
    plain = build_density(st)
    r = lo.check_region_masses(st)
    off_plain = max(0.0, 1 - plain.window_mass(1) - plain.window_mass(-1))
    masses = ", ".join(f"{k}={v:.2g}" for k, v in r.details["masses"].items())
    print(f"{n:3d} {off_plain:22.2e} {r.worst_residual:20.2e} {masses:>28}")
