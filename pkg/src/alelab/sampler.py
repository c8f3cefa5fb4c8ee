"""Attachment density, sampling of the next angle and the capacity rule.

The next angle has density proportional to

    |Phi_n'(e^{sigma + i theta})|^nu        (nu = -eta)

which for large nu is concentrated in lobes of width ~sigma around the two
newest poles theta_n +- beta. The density is discretized on a grid made of

* uniform coarse cells covering the circle,
* sinh-spaced windows around the two poles (cell widths from sigma/depth
  in the core up to a geometric progression in the tails),
* optionally, windows around the most recent old basepoints.

All arithmetic on the density is done in log space.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import logsumexp

from . import _kernels as K
from .cluster import (AnchoredAngle, ClusterState, RADIAL_LIFT, basepoints,
                      log_abs_phi_prime, wrap_angle)
from .params import GridConfig

KIND_COARSE = 0
KIND_OLD = 2
# Core of a pole window, in units of sigma; beyond it cells grow faster.
CORE_EXTENT = 64.0
TAIL_STRETCH = 4


@dataclass
class DensityGrid:
    """Discretized attachment density around the newest particle.

    Positions are stored relative to ``center`` (= theta_n): cell i covers
    ``anchor[i] + [left[i], left[i] + width[i]]``. Pole-window cells have
    ``anchor = kind * beta`` with kind = +-1, so their ``left`` keeps full
    precision at offsets of order sigma.
    """

    center: float
    beta: float
    sigma: float
    nu: float
    kind: np.ndarray
    anchor: np.ndarray
    left: np.ndarray
    width: np.ndarray
    node: np.ndarray
    log_f: np.ndarray
    log_Z: float
    pole_windows: list = field(default_factory=list)
    excluded: int = 0

    @property
    def size(self) -> int:
        return int(self.width.shape[0])

    def log_prob(self) -> np.ndarray:
        return self.log_f + np.log(self.width) - self.log_Z

    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_prob())

    @property
    def cells(self):
        """(left edge as AnchoredAngle, width, log-integrand) per cell."""
        out = []
        for k, a, l, w, f in zip(self.kind, self.anchor, self.left, self.width, self.log_f):
            if k in (1, -1):
                edge = AnchoredAngle(int(k), float(l), self.center, self.beta)
            else:
                edge = AnchoredAngle.from_offset(self.center, self.beta, float(a + l))
            out.append((edge, float(w), float(f)))
        return out

    def window_mass(self, kind: int) -> float:
        p = self.probabilities()
        return float(np.sum(p[self.kind == kind]))


# ---------------------------------------------------------------------------
# Grid geometry
# ---------------------------------------------------------------------------

def window_edges(half_width: float, scale: float, depth: int) -> np.ndarray:
    """Symmetric sinh-spaced cell edges on [-half_width, half_width].

    Edges are ``scale * sinh(x)`` on a grid in x with step asinh(1/depth)
    up to |phi| = CORE_EXTENT * scale and TAIL_STRETCH times that beyond,
    so the two central cells have width exactly scale/depth.
    """
    X = math.asinh(half_width / scale)
    h = math.asinh(1.0 / depth)
    xc = min(X, math.asinh(CORE_EXTENT))
    nc = max(1, int(math.ceil(xc / h - 1e-9)))
    xs = [np.arange(nc + 1) * h] if nc * h <= X else [np.linspace(0.0, X, nc + 1)]
    x_end = xs[0][-1]
    if X > x_end:
        ht = TAIL_STRETCH * h
        nt = max(1, int(math.ceil((X - x_end) / ht)))
        xs.append(np.linspace(x_end, X, nt + 1)[1:])
    x = np.concatenate(xs)
    pos = scale * np.sinh(x)
    pos[-1] = half_width
    return np.concatenate([-pos[:0:-1], pos])


def _window_nodes(edges: np.ndarray, scale: float) -> np.ndarray:
    """Evaluation point of each window cell.

    Chosen where the model lobe (scale^2 + phi^2)^(-1/2) equals its cell
    average; for that profile the one-point rule is then exact, and the
    node always lies inside the cell.
    """
    lo, hi = edges[:-1], edges[1:]
    w = hi - lo
    dx = np.arcsinh(hi / scale) - np.arcsinh(lo / scale)
    t = np.sqrt(np.maximum((w / (scale * dx)) ** 2 - 1.0, 0.0))
    node = scale * t * np.sign(lo + hi)
    return np.clip(node, lo, hi)


def _coarse_cells(M: int, holes: list):
    """Uniform cells on [-pi, pi) with the given (lo, hi) intervals cut out."""
    e = -math.pi + 2 * math.pi * np.arange(M + 1) / M
    e[-1] = math.pi
    keep = np.ones(e.shape, dtype=bool)
    for lo, hi in holes:
        keep &= ~((e > lo) & (e < hi))
    pts = [e[keep]]
    for lo, hi in holes:
        pts.append(np.array([lo, hi]))
    e = np.unique(np.concatenate(pts))
    lefts, widths = [], []
    for a, b in zip(e[:-1], e[1:]):
        inside = any(lo <= a and b <= hi for lo, hi in holes)
        if not inside and b > a:
            lefts.append(a)
            widths.append(b - a)
    return np.array(lefts), np.array(widths)


# ---------------------------------------------------------------------------
# Density
# ---------------------------------------------------------------------------

def _old_windows(state: ClusterState, W: float, count: int):
    """Windows around the most recent old basepoints, linearized.

    Near zhat_j^n the partial map Phi_{j,n} is regular with derivative
    g e^{i(theta_bot - arg zhat)}, so the lobe there looks like the newest
    lobe of Phi_j with sigma replaced by g sigma.
    """
    n = state.n
    if n < 2 or count <= 0:
        return []
    bp = basepoints(state)
    A = state.arrays
    T = state.tables()
    th_n = float(A["theta"][-1])
    beta = float(A["beta"][-1])
    others = [beta, -beta]
    out = []
    for j in range(n - 1, max(0, n - 1 - count), -1):
        z = bp.zhat[j - 1]
        if not np.isfinite(z):
            continue
        psi = float(wrap_angle(np.angle(z) - th_n))
        sep = min(abs(wrap_angle(psi - o)) for o in others)
        hw = min(W, 0.25 * sep)
        if hw <= 0:
            continue
        _, logg, ok = K.chain_abs(z * math.exp(RADIAL_LIFT), n - 1, j, T)
        if not ok:
            continue
        s_bot = -int(A["signs"][j])
        out.append(dict(j=j, psi=psi, half_width=hw, log_g=logg, sign=s_bot))
        others.append(psi)
    return out


def build_density(state: ClusterState, grid: GridConfig | None = None,
                  refine_old: bool | None = None) -> DensityGrid:
    """Evaluate and normalize the attachment density for particle n+1."""
    P = state.params
    g = grid if grid is not None else P.grid
    refine_old = P.refine_old_basepoints if refine_old is None else refine_old
    sigma, nu = state.sigma, state.nu
    n = state.n
    if n == 0:
        M = int(g.coarse)
        left = -math.pi + 2 * math.pi * np.arange(M) / M
        width = np.full(M, 2 * math.pi / M)
        width[-1] = math.pi - left[-1]
        return DensityGrid(0.0, 0.0, sigma, nu, np.zeros(M, dtype=np.int8), np.zeros(M),
                           left, width, left + width / 2, np.zeros(M), math.log(2 * math.pi))
    A = state.arrays
    T = state.tables()
    th_n = float(A["theta"][-1])
    beta = float(A["beta"][-1])
    W = g.window if g.window is not None else beta / 4
    W = min(W, 0.5 * beta)
    depth = int(g.depth)
    k = n - 1
    sw = state.switch()

    kinds, anchors, lefts, widths, nodes = [], [], [], [], []
    zxs, zys, starts, partials = [], [], [], []
    holes = []
    windows = []

    edges = window_edges(W, sigma, depth)
    wnode = _window_nodes(edges, sigma)
    for s in (1, -1):
        zx, zy, st, pa = K.pole_starts(s, wnode, sigma, k, T, sw)
        m = edges.shape[0] - 1
        kinds.append(np.full(m, s, dtype=np.int8))
        anchors.append(np.full(m, s * beta))
        lefts.append(edges[:-1])
        widths.append(np.diff(edges))
        nodes.append(wnode)
        zxs.append(zx)
        zys.append(zy)
        starts.append(st)
        partials.append(pa)
        holes.append((s * beta - W, s * beta + W))
        windows.append(((s, 0.0), depth))

    if refine_old:
        for ow in _old_windows(state, W, int(P.old_basepoint_count)):
            gsig = math.exp(ow["log_g"]) * sigma
            e = window_edges(ow["half_width"], sigma, depth)
            nd = _window_nodes(e, sigma)
            j = ow["j"]
            s = ow["sign"]
            b = A["eib"][j - 1] if s > 0 else A["eib"][j - 1].conjugate()
            delta = b * np.expm1(math.exp(ow["log_g"]) * (sigma + 1j * nd))
            zx, zy, st, pa = K.delta_starts(delta, s, j - 1, T, sw)
            pa = pa + ow["log_g"]
            # outer cells of the window are accurate enough from the top
            far = np.abs(delta) > 0.5 * sw
            if np.any(far):
                pts = np.exp(sigma + 1j * (th_n + ow["psi"] + nd[far]))
                zx[far] = pts.real
                zy[far] = pts.imag
                st[far] = k
                pa[far] = 0.0
            m = e.shape[0] - 1
            kinds.append(np.full(m, KIND_OLD, dtype=np.int8))
            anchors.append(np.full(m, ow["psi"]))
            lefts.append(e[:-1])
            widths.append(np.diff(e))
            nodes.append(nd)
            zxs.append(zx)
            zys.append(zy)
            starts.append(st)
            partials.append(pa)
            holes.append((ow["psi"] - ow["half_width"], ow["psi"] + ow["half_width"]))
            windows.append((("old", j, ow["psi"], gsig), depth))

    cl, cw = _coarse_cells(int(g.coarse), sorted(holes))
    mid = cl + cw / 2
    pts = np.exp(sigma + 1j * (th_n + mid))
    kinds.append(np.zeros(cl.shape[0], dtype=np.int8))
    anchors.append(np.zeros(cl.shape[0]))
    lefts.append(cl)
    widths.append(cw)
    nodes.append(mid)
    zxs.append(pts.real.copy())
    zys.append(pts.imag.copy())
    starts.append(np.full(cl.shape[0], k, dtype=np.int64))
    partials.append(np.zeros(cl.shape[0]))

    zx = np.concatenate(zxs)
    zy = np.concatenate(zys)
    start = np.concatenate(starts)
    logd, minr = K.batch_chain(zx, zy, start, k, T)
    logd += np.concatenate(partials)

    log_f = nu * logd
    bad = ~np.isfinite(log_f)
    excluded = int(np.count_nonzero(bad))
    log_f[bad] = -np.inf
    width = np.concatenate(widths)
    log_Z = float(logsumexp(log_f + np.log(width)))
    return DensityGrid(
        center=th_n, beta=beta, sigma=sigma, nu=nu,
        kind=np.concatenate(kinds), anchor=np.concatenate(anchors),
        left=np.concatenate(lefts), width=width, node=np.concatenate(nodes),
        log_f=log_f, log_Z=log_Z, pole_windows=windows, excluded=excluded,
    )


# ---------------------------------------------------------------------------
# Sampling and diagnostics
# ---------------------------------------------------------------------------

def sample_angle(grid: DensityGrid, rng: np.random.Generator) -> AnchoredAngle:
    """Inverse-CDF draw over cells, uniform within the chosen cell.

    Draws from a pole window come back anchored at that pole, so the
    residual keeps its precision.
    """
    cdf = np.cumsum(grid.probabilities())
    u = rng.random() * cdf[-1]
    i = int(np.searchsorted(cdf, u, side="right"))
    i = min(i, grid.size - 1)
    while grid.log_f[i] == -np.inf and i > 0:
        i -= 1
    x = grid.left[i] + rng.random() * grid.width[i]
    kind = int(grid.kind[i])
    if kind in (1, -1):
        return AnchoredAngle(kind, float(x), grid.center, grid.beta)
    return AnchoredAngle.from_offset(grid.center, grid.beta, float(grid.anchor[i] + x))


def _relative(grid: DensityGrid, where) -> float:
    if isinstance(where, AnchoredAngle):
        if where.base == grid.center and where.step == grid.beta:
            return where.offset()
        return float(wrap_angle(where.value - grid.center))
    return float(wrap_angle(float(where) - grid.center))


def _cell_offsets(grid: DensityGrid, where) -> np.ndarray:
    """Left edges of all cells relative to ``where``.

    For an anchor sitting exactly on a pole the subtraction of the pole
    position cancels exactly, leaving the stored residual untouched.
    """
    rel = _relative(grid, where)
    if isinstance(where, AnchoredAngle) and where.base == grid.center and where.step == grid.beta:
        shift = wrap_angle(grid.anchor - where.m * grid.beta)
        return shift + (grid.left - where.r)
    return wrap_angle(grid.anchor - rel) + grid.left


def mass_near(grid: DensityGrid, anchor, half_width: float) -> float:
    """Probability of the arc ``anchor +- half_width`` (partial cells pro-rated)."""
    if half_width >= math.pi:
        return 1.0
    lo = _cell_offsets(grid, anchor)
    hi = lo + grid.width
    ov = np.clip(np.minimum(hi, half_width) - np.maximum(lo, -half_width), 0.0, None)
    # cells that wrap through +-pi
    ov2 = np.clip(np.minimum(hi - 2 * math.pi, half_width) - np.maximum(lo - 2 * math.pi, -half_width), 0.0, None)
    ov3 = np.clip(np.minimum(hi + 2 * math.pi, half_width) - np.maximum(lo + 2 * math.pi, -half_width), 0.0, None)
    frac = (ov + ov2 + ov3) / grid.width
    return float(np.sum(grid.probabilities() * frac))


def step_moments(grid: DensityGrid, center=None, eps: float = math.pi):
    """(m1, m2, tail2): first and second moments of the signed offset from
    ``center`` (default theta_n) and the second moment beyond ``eps``."""
    c = grid.center if center is None else center
    phi = _cell_offsets(grid, c) + 0.5 * grid.width
    p = grid.probabilities()
    m1 = float(np.sum(p * phi))
    m2 = float(np.sum(p * phi * phi))
    tail = float(np.sum(p * phi * phi * (np.abs(phi) > eps)))
    return m1, m2, tail


def next_capacity(state: ClusterState, theta) -> float:
    """c |Phi_n'(e^{sigma + i theta})|^(-alpha)."""
    c = state.base_capacity
    if state.alpha == 0 or state.n == 0:
        return c
    sigma = state.sigma
    th_n = float(state.theta[-1])
    beta = float(state.betas[-1])
    if (isinstance(theta, AnchoredAngle) and abs(theta.m) == 1
            and theta.base == th_n and theta.step == beta):
        ld = log_abs_phi_prime(state, theta.m, sigma + 1j * theta.r)
    else:
        val = theta.value if isinstance(theta, AnchoredAngle) else float(theta)
        ld = log_abs_phi_prime(state, complex(math.cos(val), math.sin(val)), sigma)
    return c * math.exp(-state.alpha * float(ld))
