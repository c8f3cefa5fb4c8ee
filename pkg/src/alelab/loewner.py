"""Radial Loewner chains for piecewise-constant drivers.

For a driver that is constant on intervals of capacity ``dt`` the Loewner
map is exactly a composition of rotated slit maps, which is how
``solve_composition`` builds hulls. ``solve_ode`` integrates the flow

    dz/ds = z (z + e^{i xi_{T-s}}) / (z - e^{i xi_{T-s}}),   z(0) = w,

whose time-T value is phi_T(w); it shares no code with the slit maps and is
used to cross-check them.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .cluster import ClusterState, append_particle, boundary_trace, new_cluster
from . import _kernels as K
from .errors import ConfigError, DomainError, SwallowedError
from .params import SimParams

SWALLOW_TOL = 1e-12


@dataclass(frozen=True)
class PiecewiseDriver:
    """Driver equal to ``values[k]`` on ``[k dt, (k + 1) dt)``.

    ``terminal`` optionally carries the value at time T itself (right limit),
    which only matters for endpoint statistics.
    """

    dt: float
    values: np.ndarray
    terminal: float | None = None

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError("dt must be positive")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).ravel())

    def __len__(self):
        return int(self.values.shape[0])

    @property
    def T(self) -> float:
        return self.dt * len(self)

    @property
    def endpoint(self) -> float:
        if self.terminal is not None:
            return float(self.terminal)
        return float(self.values[-1]) if len(self) else 0.0

    def quadratic_variation(self) -> float:
        v = self.values
        if self.terminal is not None:
            v = np.append(v, self.terminal)
        d = np.diff(v)
        return float(np.dot(d, d))

    @classmethod
    def from_path(cls, path) -> "PiecewiseDriver":
        """From a DriverPath (equal capacities)."""
        return cls(path.c, np.array(path.steps))


def solve_composition(driver: PiecewiseDriver) -> ClusterState:
    """Cluster whose k-th particle is a slit of capacity dt at ``values[k]``."""
    # a stopping radius of 2 pi can never be reached, so nothing is flagged
    st = new_cluster(SimParams(c=driver.dt, N=len(driver), d_stat=2 * math.pi))
    for v in driver.values:
        st = append_particle(st, float(v), driver.dt)
    return st


def hull_tip(state: ClusterState) -> complex:
    """Image of the newest pole midpoint e^{i theta_n}, the tip of the last slit."""
    if state.n == 0:
        return 1.0 + 0j
    # the last map sends e^{i theta_n} to the tip exactly; push that through the rest
    th = float(state.theta[-1])
    tip = complex(math.cos(th), math.sin(th)) * (1.0 + float(state.slit_params[-1].d))
    if state.n == 1:
        return tip
    img, _, ok = K.chain_abs(tip, state.n - 2, 0, state.tables())
    if not ok:
        raise DomainError("tip image left the exterior disc")
    return complex(img)


def hull_trace(driver: PiecewiseDriver, **kw) -> np.ndarray:
    return boundary_trace(solve_composition(driver), **kw)


def _field(z, u):
    return z * (z + u) / (z - u)


def solve_ode(driver: PiecewiseDriver, w, rk_steps: int = 10_000):
    """phi_T(w) by classical RK4 on the characteristic flow.

    ``rk_steps`` is the number of steps per unit capacity; every piece of
    the driver gets at least one step and steps never straddle a jump.
    Accepts a scalar or an array of starting points.
    """
    w = np.asarray(w, dtype=complex)
    z = np.atleast_1d(w).astype(complex).copy()
    if np.any(np.abs(z) <= 1.0):
        raise SwallowedError("starting point is not outside the unit disc")
    per_piece = max(1, int(math.ceil(rk_steps * driver.dt)))
    h = driver.dt / per_piece
    for xi in driver.values[::-1]:
        u = complex(math.cos(xi), math.sin(xi))
        for _ in range(per_piece):
            k1 = _field(z, u)
            k2 = _field(z + 0.5 * h * k1, u)
            k3 = _field(z + 0.5 * h * k2, u)
            k4 = _field(z + h * k3, u)
            z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if np.any(np.abs(z) < 1.0 + SWALLOW_TOL) or not np.all(np.isfinite(z)):
                raise SwallowedError("trajectory reached the unit circle")
    return z.reshape(w.shape)[()]


def sample_sle_driver(kappa: float, T: float, dt: float, rng: np.random.Generator) -> PiecewiseDriver:
    """sqrt(kappa) B sampled at the left end of each interval, starting at 0.

    The value at T is kept as ``terminal`` so the endpoint has variance
    exactly kappa T.
    """
    if kappa < 0:
        raise ConfigError("kappa must be non-negative")
    if not dt > 0:
        raise ConfigError("dt must be positive")
    n = int(round(T / dt))
    inc = rng.normal(0.0, math.sqrt(kappa * dt), n) if kappa > 0 else np.zeros(n)
    path = np.concatenate([[0.0], np.cumsum(inc)])
    return PiecewiseDriver(dt, path[:-1], terminal=float(path[-1]))


def _point_segment_dist(P, A, B, chunk: int = 512) -> np.ndarray:
    """For each point of P, distance to the nearest segment [A_k, B_k]."""
    D = B - A
    L2 = np.abs(D) ** 2
    safe = np.where(L2 > 0, L2, 1.0)
    out = np.empty(P.shape[0])
    for i in range(0, P.shape[0], chunk):
        p = P[i:i + chunk, None]
        t = np.real((p - A) * np.conj(D)) / safe
        t = np.clip(np.where(L2 > 0, t, 0.0), 0.0, 1.0)
        out[i:i + chunk] = np.min(np.abs(p - (A + t * D)), axis=1)
    return out


def hull_distance(trace_a, trace_b) -> float:
    """Symmetric Hausdorff distance between two polylines (complex arrays)."""
    a = np.atleast_1d(np.asarray(trace_a, dtype=complex))
    b = np.atleast_1d(np.asarray(trace_b, dtype=complex))
    if a.size == 0 or b.size == 0:
        raise ValueError("traces must be non-empty")
    sa = (a[:-1], a[1:]) if a.size > 1 else (a, a)
    sb = (b[:-1], b[1:]) if b.size > 1 else (b, b)
    return float(max(_point_segment_dist(a, *sb).max(), _point_segment_dist(b, *sa).max()))
