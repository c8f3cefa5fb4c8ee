"""Two ways to the same Loewner map.

A piecewise-constant driver is an exact composition of slit maps. The
characteristic ODE integrated with RK4 knows nothing about slits, so
agreement between the two is a good check of both.
"""
import cmath

import numpy as np

from alelab.cluster import phi_apply
from alelab.loewner import PiecewiseDriver, hull_tip, sample_sle_driver, solve_composition, solve_ode
from alelab.slit_map import params_from_capacity

rng = np.random.default_rng(3)

# constant driver: 100 thin slits at the same angle stack into one slit
xi = 0.4
st = solve_composition(PiecewiseDriver(1e-3, np.full(100, xi)))
exact = cmath.exp(1j * xi) * (1 + params_from_capacity(0.1).d)
print(f"stacked tip error: {abs(hull_tip(st) - exact):.2e}")

for rk in (200, 2000, 20000):
    drv = PiecewiseDriver(0.01, np.cumsum(rng.normal(0, 0.2, 20)))
    comp = phi_apply(solve_composition(drv), 2.0)
    ode = solve_ode(drv, 2.0, rk_steps=rk)
    print(f"rk_steps={rk:6d}  |ODE - composition| at w=2: {abs(ode - comp):.2e}")

# a kappa = 4 driver, its hull tip and endpoint
drv = sample_sle_driver(4.0, 0.5, 1e-3, rng)
print(f"SLE_4 driver on [0, {drv.T:.1f}]: endpoint {drv.endpoint:+.3f}, qv/T = {drv.quadratic_variation() / drv.T:.3f}")
print("tip of its hull:", hull_tip(solve_composition(drv)))
