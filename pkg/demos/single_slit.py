"""One slit particle: where it attaches and how hard its ends pull.

Prints the slit geometry for a few capacities, then the derivative of the
slit map as the evaluation point approaches one of its two poles.
"""
import math

import numpy as np

from alelab.slit_map import log_abs_f_prime, params_from_capacity, slit_map

print(f"{'c':>8} {'beta':>10} {'2 sqrt c':>10} {'length d':>10}")
for c in (1e-2, 1e-3, 1e-4):
    p = params_from_capacity(c)
    print(f"{c:8.0e} {p.beta:10.6f} {2 * math.sqrt(c):10.6f} {p.d:10.6f}")

p = params_from_capacity(1e-3)
# the two ends of the preimage arc both land on the base of the slit
print("\nf(e^{+i beta}) =", slit_map(p.e_ibeta, p))
print("f(e^{-i beta}) =", slit_map(p.e_ibeta.conjugate(), p))
print("f(1)           =", slit_map(1.0, p), " (tip at 1 + d)")

# |f'| blows up like rho^{-1/2} next to the poles
print(f"\n{'rho':>8} {'|f`|':>12} {'|f`| sqrt(rho)':>16}")
for rho in np.logspace(-4, -14, 6):
    v = math.exp(log_abs_f_prime(p.e_ibeta * (1 + rho), p))
    print(f"{rho:8.0e} {v:12.4e} {v * math.sqrt(rho):16.6f}")
