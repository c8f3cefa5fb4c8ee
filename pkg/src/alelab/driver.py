"""Driving function of a cluster and its scaling-limit diagnostics.

The driver is the step function t -> theta_{floor(t/c) + 1}: it jumps at the
cumulative capacities and takes the (unwrapped) attachment angles as values.
For the concentrated model these steps are +-beta plus tiny residuals, and
the path should look like 2B_t once c is small.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
import math

import numpy as np
from scipy import stats as _st

from .cluster import ClusterState
from .errors import StatisticsError

# Smallness gate for the summed conditional means, as a fraction of sqrt(T).
# An engineering choice, not a derived rate.
M1_GATE = 0.02


@dataclass(frozen=True)
class DriverPath:
    """Piecewise-constant driver on [0, T].

    ``steps[k]`` is the value on ``[times[k], times[k + 1])``; the final
    interval ends at ``T``. Values are unwrapped to the real line.
    """

    c: float
    T: float
    steps: np.ndarray
    times: np.ndarray
    stopped_at: int | None = None

    def __len__(self):
        return int(self.steps.shape[0])

    def xi(self, t):
        """Driver value at time(s) t in [0, T]."""
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > self.T * (1 + 1e-12))):
            raise ValueError("t outside [0, T]")
        if len(self) == 0:
            return np.zeros(t.shape)[()]
        i = np.searchsorted(self.times, t, side="right") - 1
        return self.steps[np.clip(i, 0, len(self) - 1)][()]

    @property
    def endpoint(self) -> float:
        return float(self.steps[-1]) if len(self) else 0.0

    def increments(self) -> np.ndarray:
        return np.diff(self.steps)

    def concat(self, other: "DriverPath") -> "DriverPath":
        """Run ``other`` after this path (its times shifted by T)."""
        return DriverPath(self.c, self.T + other.T,
                          np.concatenate([self.steps, other.steps]),
                          np.concatenate([self.times, other.times + self.T]))


def unwrap_angles(theta) -> np.ndarray:
    """Continue a sequence of angles along the nearest branch."""
    th = np.asarray(theta, dtype=float)
    return np.unwrap(th) if th.size else th


def extract_driver(state: ClusterState, T: float | None = None) -> DriverPath:
    """Driver of ``state`` on [0, T] (default: the full cluster).

    Needs floor(T/c) particles unless the cluster has stopped; a stopped
    cluster is cut after the stopping particle.
    """
    c = state.base_capacity
    T = state.total_capacity if T is None else float(T)
    if T < 0:
        raise ValueError("T must be non-negative")
    K = int(math.floor(T / c * (1 + 1e-12)))
    n = state.n
    if state.stopped:
        K = min(K, int(state.stopped_at))
        T = min(T, K * c) if state.alpha == 0 else T
    if n < K:
        raise StatisticsError(f"cluster has {n} particles, the driver on [0, {T}] needs {K}")
    steps = unwrap_angles(state.theta[:K])
    caps = state.caps[:K]
    times = np.concatenate([[0.0], np.cumsum(caps)[:-1]]) if K else np.zeros(0)
    if K and state.alpha != 0:
        T = min(T, float(np.sum(caps)))
    return DriverPath(c=c, T=float(T), steps=steps, times=times, stopped_at=state.stopped_at)


def quadratic_variation(path: DriverPath) -> float:
    d = path.increments()
    return float(np.dot(d, d))


@dataclass
class StatsReport:
    """Path statistics of a single run."""

    T: float
    n_steps: int
    tau_D: int | None
    frac_plus: float
    qv: float
    qv_ratio: float | None
    mcleish: tuple
    endpoint: float
    offsets: list = field(default_factory=list)
    m1_gate: float = M1_GATE
    m1_small: bool = True

    def to_json(self) -> dict:
        d = asdict(self)
        d["mcleish"] = list(self.mcleish)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "StatsReport":
        d = dict(d)
        d["mcleish"] = tuple(d["mcleish"])
        return cls(**d)


def statistics(path: DriverPath, state: ClusterState, per_step_moments=None) -> StatsReport:
    """Sign balance, quadratic variation, summed moments and endpoint.

    ``per_step_moments`` holds one row (m1, m2, tail2) per drawn step, as
    stored in the run records; only the rows inside the path are summed.
    """
    K = len(path)
    signs = state.top_signs[1:K]
    frac = float(np.mean(signs > 0)) if signs.size else 0.5
    qv = quadratic_variation(path)
    if per_step_moments is None or len(per_step_moments) == 0:
        mc = (0.0, 0.0, 0.0)
    else:
        m = np.asarray(per_step_moments, dtype=float).reshape(-1, 3)[: max(K - 1, 0)]
        mc = (float(np.sum(m[:, 2])), float(np.sum(m[:, 1])), float(np.sum(np.abs(m[:, 0]))))
    T = path.T
    qv_ratio = qv / (4 * T) if T > 0 else None
    offsets = [float(abs(x)) for x in state.residuals[1:K]]
    return StatsReport(
        T=T, n_steps=K, tau_D=state.stopped_at, frac_plus=frac, qv=qv, qv_ratio=qv_ratio,
        mcleish=mc, endpoint=path.endpoint, offsets=offsets,
        m1_small=bool(mc[2] <= M1_GATE * math.sqrt(T)) if T > 0 else True,
    )


def ensemble_normality(reports, *, min_runs: int = 30):
    """KS test of the rescaled endpoints xi_T / (2 sqrt T) against N(0, 1).

    Accepts StatsReports or (endpoint, T) pairs. Returns (statistic, p).
    """
    vals = []
    for r in reports:
        e, T = (r.endpoint, r.T) if isinstance(r, StatsReport) else r
        vals.append(e / (2 * math.sqrt(T)))
    if len(vals) < min_runs:
        raise StatisticsError(f"need at least {min_runs} runs, got {len(vals)}")
    res = _st.kstest(np.asarray(vals), "norm", method="asymp")
    return float(res.statistic), float(res.pvalue)
