"""Grow a concentrated cluster and look at its driving function.

With nu = 4 almost every particle lands on one of the two newest poles, so
the angles do a +-beta walk. The quadratic variation should be close to 4T.

    python3 demos/grow_cluster.py [N] [out.svg]
"""
import sys

import numpy as np

from alelab.cluster import boundary_trace
from alelab.driver import extract_driver, quadratic_variation
from alelab.params import GridConfig, SimParams
from alelab.simulation import run_rng, simulate
from alelab.svg import polyline_svg

N = int(sys.argv[1]) if len(sys.argv) > 1 else 200
out = sys.argv[2] if len(sys.argv) > 2 else "cluster.svg"

P = SimParams(c=1e-3, nu=4.0, N=N, seed=1, grid=GridConfig(coarse=512))
res = simulate(P, run_rng(P.seed))
st = res.state

signs = st.top_signs[1:]
far = np.array([r.mass_far for r in res.records])
print(f"{st.n} particles, stopped at {st.stopped_at}")
print(f"fraction of +beta steps: {np.mean(signs > 0):.3f}")
print(f"largest |residual|: {np.max(np.abs(st.residuals)):.2e} (sigma = {P.sigma:.0e})")
print(f"largest off-pole mass of any step: {far.max():.2e}")

path = extract_driver(st)
print(f"xi_T = {path.endpoint:+.4f},  qv / 4T = {quadratic_variation(path) / (4 * path.T):.4f}")

with open(out, "w") as fh:
    fh.write(polyline_svg([boundary_trace(st)], title=f"cluster, N = {st.n}"))
print("boundary written to", out)
