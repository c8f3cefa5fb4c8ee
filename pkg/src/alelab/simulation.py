"""The model loop: build density, draw an angle, attach, repeat."""
from __future__ import annotations

from dataclasses import asdict, dataclass
import math
import time

import numpy as np

from .cluster import AnchoredAngle, ClusterState, append_particle, new_cluster
from .errors import DomainError, NumericalAbort
from .params import SimParams
from .sampler import build_density, next_capacity, sample_angle, step_moments

# Second-moment tail threshold for the per-step moments, in units of beta.
TAIL_FACTOR = 4.0


@dataclass
class RunRecord:
    """One attached particle.

    ``angle`` is the anchored decomposition relative to the previous angle
    (``m`` poles plus residual ``r``). Masses refer to the density the angle
    was drawn from.
    """

    n: int
    angle: dict
    capacity: float
    log_Z: float
    mass_plus: float
    mass_minus: float
    mass_far: float
    theory_D: float
    tau_flag: bool
    m1: float
    m2: float
    tail2: float
    excluded: int
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "RunRecord":
        return cls(**d)


@dataclass
class RunResult:
    params: SimParams
    state: ClusterState
    records: list

    @property
    def moments(self) -> np.ndarray:
        return np.array([[r.m1, r.m2, r.tail2] for r in self.records]).reshape(-1, 3)


def theory_stop_radius(c: float, sigma: float) -> float:
    """c^{9/2} sigma^{1/2}, reported for comparison with the stopping radius in use."""
    return c ** 4.5 * math.sqrt(sigma)


def run_rng(seed: int, run_index: int = 0) -> np.random.Generator:
    """Independent stream for run ``run_index`` of an experiment seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(run_index),)))


def simulate(params: SimParams, rng: np.random.Generator | None = None, *,
             n_particles: int | None = None, stop_at_tau: bool = False,
             clock=time.perf_counter, progress=None) -> RunResult:
    """Grow a cluster of ``n_particles`` (default from params).

    The first particle sits at angle 0. Records are produced for particles
    2..N. With ``stop_at_tau`` the run ends at the stopping time; otherwise
    it continues and only the flag is recorded.
    """
    rng = rng if rng is not None else run_rng(params.seed)
    N = params.n_particles if n_particles is None else int(n_particles)
    state = new_cluster(params)
    records = []
    if N == 0:
        return RunResult(params, state, records)
    state = append_particle(state, 0.0, params.c)
    Dp = theory_stop_radius(params.c, params.sigma)
    for n in range(1, N):
        t0 = clock()
        try:
            grid = build_density(state)
            if not math.isfinite(grid.log_Z):
                raise NumericalAbort(f"density could not be normalized at step {n + 1}")
            theta = sample_angle(grid, rng)
            cap = next_capacity(state, theta)
        except (NumericalAbort, DomainError) as e:
            err = e if isinstance(e, NumericalAbort) else NumericalAbort(f"step {n + 1}: {e}")
            # hand the good part of the run to the caller
            err.partial = RunResult(params, state, records)
            err.last_good = n
            raise err from (None if e is err else e)
        mp, mm = grid.window_mass(1), grid.window_mass(-1)
        m1, m2, tail = step_moments(grid, None, TAIL_FACTOR * grid.beta)
        state = append_particle(state, theta, cap)
        rel = AnchoredAngle(int(state.top_signs[-1]), float(state.residuals[-1]),
                            float(state.theta[-2]), float(state.betas[-2]))
        records.append(RunRecord(
            n=n + 1, angle={"m": rel.m, "r": rel.r}, capacity=cap, log_Z=grid.log_Z,
            mass_plus=mp, mass_minus=mm, mass_far=max(0.0, 1.0 - mp - mm), theory_D=Dp,
            tau_flag=state.stopped_at == n + 1, m1=m1, m2=m2, tail2=tail,
            excluded=grid.excluded, wall_time=clock() - t0,
        ))
        if progress is not None:
            progress(n + 1, N)
        if stop_at_tau and state.stopped:
            break
    return RunResult(params, state, records)


def replay(params: SimParams, records) -> ClusterState:
    """Rebuild the cluster from its records (no sampling)."""
    state = new_cluster(params)
    if not records and params.n_particles == 0:
        return state
    state = append_particle(state, 0.0, params.c)
    for rec in records:
        a = rec.angle if isinstance(rec, RunRecord) else rec["angle"]
        cap = rec.capacity if isinstance(rec, RunRecord) else rec["capacity"]
        th = AnchoredAngle(int(a["m"]), float(a["r"]), float(state.theta[-1]), float(state.betas[-1]))
        state = append_particle(state, th, cap)
    return state
