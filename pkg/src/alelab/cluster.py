"""Growing clusters of slit particles and the composed map Phi_n.

The cluster after n particles is the complement of ``Phi_n(Delta)`` with

    Phi_n = f_1 o f_2 o ... o f_n,   f_k = slit map of capacity c_k at theta_k.

Angles are stored relative to their predecessor. Particle k attaches at

    theta_k = theta_{k-1} + s_k beta_{k-1} + phi_k,

where ``s_k`` says which of the two newest poles it landed near and
``phi_k`` is the (usually tiny) residual. Keeping ``phi_k`` exactly is what
lets the density be evaluated at offsets far below double precision of the
absolute angle; the absolute float ``theta_k`` is kept alongside for
evaluation away from the poles.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from . import _kernels as K
from .errors import DomainError, OutOfRegimeError, PoleError
from .params import SimParams
from .slit_map import SlitParams, params_from_capacity

# Absolute evaluation takes over once an offset exceeds this.
OFFSET_SWITCH = 1e-6
# Radial lift used to keep inverse maps off the boundary.
RADIAL_LIFT = 1e-9


def wrap_angle(x):
    """Map to [-pi, pi)."""
    return (np.asarray(x) + math.pi) % (2 * math.pi) - math.pi


@dataclass(frozen=True)
class AnchoredAngle:
    """Angle stored as ``base + m * step + r``.

    ``base`` is a reference angle and ``step`` the pole spacing beta used by
    the decomposition. Shifting by whole steps only changes ``m``, so the
    residual ``r`` keeps its full relative precision.
    """

    m: int
    r: float
    base: float = 0.0
    step: float = 0.0

    @property
    def value(self) -> float:
        return self.base + (self.m * self.step + self.r)

    def offset(self) -> float:
        """Angle relative to ``base``."""
        return self.m * self.step + self.r

    def shift(self, k: int) -> "AnchoredAngle":
        return AnchoredAngle(self.m + k, self.r, self.base, self.step)

    @classmethod
    def from_offset(cls, base: float, step: float, offset: float) -> "AnchoredAngle":
        """Decompose ``offset`` so that ``|r| <= step / 2``."""
        if step <= 0:
            return cls(0, float(offset), float(base), float(step))
        m = int(round(offset / step))
        return cls(m, float(offset - m * step), float(base), float(step))

    def to_json(self) -> dict:
        return {"m": self.m, "r": self.r, "base": self.base, "step": self.step}

    @classmethod
    def from_json(cls, d: dict) -> "AnchoredAngle":
        return cls(int(d["m"]), float(d["r"]), float(d["base"]), float(d["step"]))


@dataclass(frozen=True)
class Basepoints:
    """Preimages under Phi_n of the old slit bases.

    ``zhat[j - 1]`` is the point of the unit circle sent to the base of
    particle j (j = 1..n-1); entries that could not be computed are NaN.
    ``poles`` are the two newest poles e^{i(theta_n + beta)}, e^{i(theta_n - beta)}.
    """

    zhat: np.ndarray
    poles: tuple
    available: np.ndarray


def _empty_arrays():
    return dict(
        theta=np.zeros(0), caps=np.zeros(0), signs=np.zeros(0, dtype=np.int64),
        phis=np.zeros(0),
        a=np.zeros(0), sqa=np.zeros(0), emh=np.zeros(0), ec=np.zeros(0),
        eib=np.zeros(0, dtype=complex), rot=np.zeros(0, dtype=complex),
        top=np.zeros(0, dtype=complex), eiphi=np.zeros(0, dtype=complex),
        em1phi=np.zeros(0, dtype=complex), beta=np.zeros(0),
    )


@dataclass(frozen=True, eq=False)
class ClusterState:
    """Immutable cluster after n particles; ``append_particle`` makes the next one."""

    params: SimParams
    arrays: dict = field(default_factory=_empty_arrays)
    stopped_at: int | None = None

    # basic views -----------------------------------------------------------

    @property
    def n(self) -> int:
        return int(self.arrays["theta"].shape[0])

    @property
    def base_capacity(self) -> float:
        return self.params.c

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def nu(self) -> float:
        return self.params.nu

    @property
    def sigma(self) -> float:
        return self.params.sigma

    @property
    def d_stat(self) -> float:
        return self.params.stop_radius

    @property
    def theta(self) -> np.ndarray:
        return self.arrays["theta"]

    @property
    def caps(self) -> np.ndarray:
        return self.arrays["caps"]

    @property
    def betas(self) -> np.ndarray:
        return self.arrays["beta"]

    @property
    def top_signs(self) -> np.ndarray:
        """s_k for k = 2..n (entry 0 belongs to the first particle and is 0)."""
        return self.arrays["signs"]

    @property
    def residuals(self) -> np.ndarray:
        """phi_k = theta_k - theta_top_k, exact as drawn (0 for k = 1)."""
        return self.arrays["phis"]

    @property
    def total_capacity(self) -> float:
        return float(np.sum(self.caps))

    @property
    def slit_params(self) -> list:
        return [params_from_capacity(c) for c in self.caps]

    @property
    def angles(self) -> list:
        """theta_k as anchored angles relative to theta_{k-1}."""
        th, s, ph, b = self.theta, self.top_signs, self.residuals, self.betas
        out = []
        for k in range(self.n):
            if k == 0:
                out.append(AnchoredAngle(0, float(th[0]), 0.0, float(b[0])))
            else:
                out.append(AnchoredAngle(int(s[k]), float(ph[k]), float(th[k - 1]), float(b[k - 1])))
        return out

    @property
    def stopped(self) -> bool:
        return self.stopped_at is not None

    def tables(self):
        """Per-particle arrays in the layout used by the compiled kernels."""
        A = self.arrays
        return (A["a"], A["sqa"], A["emh"], A["ec"], A["eib"], A["rot"],
                A["top"], A["eiphi"], A["em1phi"], A["signs"])

    def switch(self) -> float:
        if self.n == 0:
            return OFFSET_SWITCH
        return min(OFFSET_SWITCH, 0.25 * float(np.min(self.betas)))

    def pole(self, sign: int) -> complex:
        """e^{i(theta_n + sign beta_n)}."""
        if self.n == 0:
            raise DomainError("an empty cluster has no poles")
        A = self.arrays
        b = A["eib"][-1] if sign > 0 else A["eib"][-1].conjugate()
        return complex(A["rot"][-1] * b)


def new_cluster(params: SimParams | None = None) -> ClusterState:
    """Empty cluster; Phi_0 is the identity."""
    return ClusterState(params if params is not None else SimParams())


def classify(state: ClusterState, theta) -> tuple[int, float]:
    """Nearest-pole sign and residual of a proposed next angle.

    Returns (s, phi) with theta = theta_n + s beta_n + phi. Ties go to +1.
    When ``theta`` is anchored at theta_n with step beta_n, phi is taken
    from the stored residual without any rounding.
    """
    th_n = float(state.theta[-1])
    beta = float(state.betas[-1])
    if isinstance(theta, AnchoredAngle) and theta.base == th_n and theta.step == beta:
        m, r = theta.m, theta.r
        if abs(m) == 1 and abs(r) <= beta:
            return m, r
        if m == 0:
            s = 1 if r >= 0 else -1
            return s, r - s * beta
        s = 1 if m > 0 else -1
        return s, (m - s) * beta + r
    val = theta.value if isinstance(theta, AnchoredAngle) else float(theta)
    psi = float(wrap_angle(val - th_n))
    s = 1 if abs(psi - beta) <= abs(psi + beta) else -1
    return s, psi - s * beta


def append_particle(state: ClusterState, theta, c: float) -> ClusterState:
    """Attach particle n+1 with capacity ``c`` at ``theta``.

    ``theta`` may be an AnchoredAngle or a float. Records the top sign and
    residual; sets ``stopped_at`` the first time the residual exceeds the
    stopping radius.
    """
    c = float(c)
    if not (c > 0 and math.isfinite(c)):
        raise DomainError("particle capacity must be positive")
    p = params_from_capacity(c)
    A = state.arrays
    n = state.n
    if n == 0:
        val = theta.value if isinstance(theta, AnchoredAngle) else float(theta)
        s, phi, th = 0, 0.0, float(val)
        top = 1.0 + 0j
    else:
        s, phi = classify(state, theta)
        beta_prev = float(A["beta"][-1])
        th = float(A["theta"][-1]) + (s * beta_prev + phi)
        top = A["eib"][-1] if s > 0 else A["eib"][-1].conjugate()
    stopped = state.stopped_at
    if stopped is None and n > 0 and abs(phi) > state.d_stat:
        stopped = n + 1
    a = math.expm1(c)
    new = dict(
        theta=np.append(A["theta"], th),
        caps=np.append(A["caps"], c),
        signs=np.append(A["signs"], np.int64(s)),
        phis=np.append(A["phis"], phi),
        a=np.append(A["a"], a),
        sqa=np.append(A["sqa"], math.sqrt(a)),
        emh=np.append(A["emh"], math.exp(-0.5 * c)),
        ec=np.append(A["ec"], math.exp(c)),
        eib=np.append(A["eib"], p.e_ibeta),
        rot=np.append(A["rot"], complex(math.cos(th), math.sin(th))),
        top=np.append(A["top"], top),
        eiphi=np.append(A["eiphi"], complex(math.cos(phi), math.sin(phi))),
        em1phi=np.append(A["em1phi"], complex(-2.0 * math.sin(0.5 * phi) ** 2, math.sin(phi))),
        beta=np.append(A["beta"], p.beta),
    )
    return ClusterState(state.params, new, stopped)


def cluster_from_angles(params: SimParams, thetas, caps=None) -> ClusterState:
    """Build a cluster from absolute angles (and optional capacities)."""
    st = new_cluster(params)
    for k, th in enumerate(thetas):
        st = append_particle(st, th, params.c if caps is None else caps[k])
    return st


def ideal_cluster(params: SimParams, signs) -> ClusterState:
    """Cluster attached exactly at the poles: theta_k = theta_{k-1} + s_k beta.

    ``signs`` lists s_2..s_n; the first particle sits at angle 0.
    """
    st = append_particle(new_cluster(params), 0.0, params.c)
    beta = st.betas[-1]
    for s in signs:
        st = append_particle(st, AnchoredAngle(int(s), 0.0, float(st.theta[-1]), float(beta)), params.c)
    return st


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _as_points(w):
    w = np.asarray(w, dtype=complex)
    return w, np.atleast_1d(w).ravel()


def _apply_range(state: ClusterState, pts, lo: int):
    """Apply maps n..lo+1 (1-based) to an array of points."""
    n = state.n
    if n == lo or pts.size == 0:
        return pts.copy()
    if np.any(np.abs(pts) < 1.0 - 1e-12):
        raise DomainError("point lies strictly inside the unit disc")
    T = state.tables()
    out = np.empty_like(pts)
    for i, z in enumerate(pts):
        img, _, ok = K.chain_abs(z, n - 1, lo, T)
        if not ok:
            raise DomainError("intermediate image left the exterior disc")
        out[i] = img
    return out


def phi_apply(state: ClusterState, w):
    """Phi_n(w) for |w| >= 1."""
    w, pts = _as_points(w)
    out = _apply_range(state, pts, 0).reshape(w.shape)
    return out[()]


def phi_partial_apply(state: ClusterState, j: int, w):
    """Phi_{j,n}(w) = f_{j+1} o ... o f_n (w); identity for j = n."""
    if not 0 <= j <= state.n:
        raise IndexError(f"j must lie in [0, {state.n}], got {j}")
    w, pts = _as_points(w)
    out = _apply_range(state, pts, j).reshape(w.shape)
    return out[()]


def log_abs_phi_prime(state: ClusterState, anchor, delta=0.0):
    """log|Phi_n'(w)| at w = anchor * e^delta.

    ``anchor`` is +1 or -1 for the newest poles e^{i(theta_n +- beta_n)};
    then the chain is tracked as offsets from the successive base points as
    long as they stay small. Any other (complex) anchor is evaluated in
    absolute coordinates. ``delta`` may be an array, e.g. sigma + i phi.
    """
    d, dl = _as_points(delta)
    if state.n == 0:
        return np.zeros(d.shape)[()]
    T = state.tables()
    k = state.n - 1
    out = np.empty(dl.shape[0])
    if isinstance(anchor, (int, np.integer)) and anchor in (1, -1):
        s = int(anchor)
        b = state.arrays["eib"][k] if s > 0 else state.arrays["eib"][k].conjugate()
        sw = state.switch()
        for i, dd in enumerate(dl):
            delta0 = b * np.expm1(dd)
            if delta0 == 0:
                raise PoleError("evaluation exactly at a pole")
            _, ld, ok = K.chain_offset(delta0, s, k, T, sw)
            if math.isinf(ld):
                raise PoleError("derivative chain hit a pole")
            if not ok:
                raise DomainError("intermediate image left the exterior disc")
            out[i] = ld
    else:
        pts = complex(anchor) * np.exp(dl)
        if np.any(np.abs(pts) < 1.0 - 1e-12):
            raise DomainError("point lies strictly inside the unit disc")
        for i, z in enumerate(pts):
            _, ld, ok = K.chain_abs(z, k, 0, T)
            if math.isinf(ld):
                raise PoleError("derivative chain hit a pole")
            if not ok:
                raise DomainError("intermediate image left the exterior disc")
            out[i] = ld
    return out.reshape(d.shape)[()]


def offset_chain(state: ClusterState, pole_sign: int, delta0, *, limit: float | None = None):
    """Offsets delta_j = Phi_{n-j,n}(w) - e^{i theta_top_{n-j+1}}, j = 1..n.

    ``w = e^{i(theta_n + pole_sign beta_n)} + delta0``. Offsets are global
    (not rotated into local frames). The chain is tracked in offset form up
    to beta/4 and then continued absolutely.
    """
    if state.n == 0:
        return np.zeros(0, dtype=complex)
    beta = float(state.betas[-1])
    lim = beta * 1e-3 if limit is None else limit
    if abs(delta0) > lim:
        raise OutOfRegimeError(f"|delta0| = {abs(delta0):.3g} exceeds {lim:.3g}")
    if state.stopped:
        raise OutOfRegimeError("cluster is stopped")
    k = state.n - 1
    local = complex(delta0) * state.arrays["rot"][k].conjugate()
    if local == 0:
        return np.zeros(state.n, dtype=complex)
    sw = 0.25 * float(np.min(state.betas))
    tr = K.offset_trace(local, int(pole_sign), k, state.tables(), sw)
    return tr[1:]


def basepoints(state: ClusterState, lift: float = RADIAL_LIFT) -> Basepoints:
    """Preimages zhat_j^n of the unused bases e^{i theta_bot_{j+1}}, j = 1..n-1."""
    n = state.n
    if n < 1:
        raise DomainError("basepoints need at least one particle")
    A = state.arrays
    T = state.tables()
    zhat = np.full(max(n - 1, 0), np.nan + 0j)
    for j in range(1, n):
        # theta_bot_{j+1} = theta_j - s_{j+1} beta_j (0-based: particle j-1, sign j)
        s = A["signs"][j]
        b = A["eib"][j - 1].conjugate() if s > 0 else A["eib"][j - 1]
        z = math.exp(lift) * A["rot"][j - 1] * b
        try:
            z = K.chain_inverse(z, j, n - 1, T)
        except Exception:  # pragma: no cover - numba raises generic errors
            continue
        if np.isfinite(z):
            zhat[j - 1] = z / abs(z)
    poles = (state.pole(1), state.pole(-1))
    return Basepoints(zhat=zhat, poles=poles, available=np.isfinite(zhat))


def _particle_arc_angles(state: ClusterState, per_particle: int, lift: float):
    """Angles on the unit circle whose images trace the particles."""
    n = state.n
    A = state.arrays
    T = state.tables()
    t = np.cos(np.linspace(math.pi, 0.0, per_particle))
    out = []
    for j in range(n):
        ang = A["theta"][j] + t * A["beta"][j]
        pts = math.exp(lift) * np.exp(1j * ang)
        if j < n - 1:
            pts = K.batch_inverse(pts, j + 1, n - 1, T)
        out.append(np.angle(pts[np.isfinite(pts)]))
    return np.concatenate(out) if out else np.zeros(0)


def boundary_trace(state: ClusterState, points_per_particle: int = 16,
                   background: int = 512, lift: float = RADIAL_LIFT) -> np.ndarray:
    """Closed polyline approximating the cluster boundary.

    A circle mesh, refined on the preimage arcs of every particle, is lifted
    radially by ``lift`` and pushed through Phi_n.
    """
    psi = np.linspace(-math.pi, math.pi, background, endpoint=False)
    if state.n > 0:
        psi = np.concatenate([psi, _particle_arc_angles(state, points_per_particle, lift)])
    psi = np.unique(wrap_angle(psi))
    w = np.exp(lift + 1j * psi)
    if state.n == 0:
        img = w
    else:
        zx, zy = w.real.copy(), w.imag.copy()
        start = np.full(w.shape[0], state.n - 1, dtype=np.int64)
        K.batch_chain(zx, zy, start, state.n - 1, state.tables())
        img = zx + 1j * zy
        img = img[np.isfinite(img)]
    return np.append(img, img[:1])


def harmonic_sample(state: ClusterState, rng: np.random.Generator, k: int,
                    lift: float = RADIAL_LIFT) -> np.ndarray:
    """k points on the cluster boundary distributed by harmonic measure from infinity."""
    u = rng.uniform(0.0, 2 * math.pi, int(k))
    return phi_apply(state, np.exp(lift + 1j * u))
