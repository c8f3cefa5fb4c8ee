"""Single-slit conformal maps of the exterior disc.

The basic map ``f_c`` sends the exterior of the closed unit disc onto the
exterior of the disc with a radial slit ``(1, 1 + d]`` attached at 1. It has
logarithmic capacity ``c`` (``f_c(z) ~ e^c z`` at infinity) and is built as

    f_c = mobius_to_disc_exterior o halfplane_slit o mobius_to_halfplane

where ``mobius_to_halfplane`` is a Moebius map onto the upper half-plane and
``halfplane_slit(zeta) = e^{-c/2} sqrt(zeta^2 - a)`` with ``a = e^c - 1``.

Everything here accepts scalars or numpy arrays.

Two identities keep the evaluation stable away from the slit:

* ``1 + v^2 = e^{-c} (1 + zeta^2) = 4 e^{-c} w / (w + 1)^2`` gives the
  cancellation-free form ``f(w) = e^c (w + 1)^2 (1 - i v)^2 / (4 w)``.
* Near the two preimages ``e^{+-i beta}`` of the slit base the difference
  ``zeta^2 - a`` is formed from the offset directly, see ``slit_map_offset``.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigError, DomainError, OutOfRegimeError, PoleError

# Points with |w| below this are treated as strictly inside the unit disc.
DISC_TOL = 1e-12


@dataclass(frozen=True)
class SlitParams:
    """Shape constants of the slit map with capacity ``c``.

    ``d`` is the slit length and ``beta`` the half-angle of the boundary arc
    that folds onto the two sides of the slit.
    """

    c: float
    d: float
    beta: float
    e_ibeta: complex

    @property
    def a(self) -> float:
        return math.expm1(self.c)

    @property
    def sqrt_a(self) -> float:
        return math.sqrt(math.expm1(self.c))


def params_from_capacity(c: float) -> SlitParams:
    """Slit length and base half-angle for capacity ``c``.

    Uses ``d = 2E + 2 sqrt(E e^c)`` and
    ``e^{i beta} = 2e^{-c} - 1 + 2i e^{-c} sqrt(e^c - 1)`` with ``E = e^c - 1``
    evaluated through ``expm1`` so that tiny capacities keep full precision.
    """
    c = float(c)
    if not math.isfinite(c) or c <= 0.0:
        raise ConfigError(f"capacity must be finite and positive, got {c!r}")
    E = math.expm1(c)
    d = 2.0 * E + 2.0 * math.sqrt(E * math.exp(c))
    re = 1.0 + 2.0 * math.expm1(-c)
    im = 2.0 * math.exp(-c) * math.sqrt(E)
    beta = math.atan2(im, re)
    return SlitParams(c=c, d=d, beta=beta, e_ibeta=complex(re, im))


# ---------------------------------------------------------------------------
# Moebius pieces
# ---------------------------------------------------------------------------

def mobius_to_halfplane(w):
    """``i (w - 1) / (w + 1)``: exterior disc -> upper half-plane."""
    w = np.asarray(w, dtype=complex)
    if np.any(w == -1):
        raise PoleError("mobius_to_halfplane is singular at w = -1")
    return (1j * (w - 1) / (w + 1))[()]


def mobius_to_disc_exterior(z):
    """``(1 - i z) / (1 + i z)``: upper half-plane -> exterior disc."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 1j):
        raise PoleError("mobius_to_disc_exterior is singular at z = i")
    return ((1 - 1j * z) / (1 + 1j * z))[()]


def upper_sqrt(u, ref=None):
    """Square root with argument in ``[0, pi]``.

    This is the branch of ``sqrt`` with arg in ``(0, 2 pi)`` continued to the
    positive real axis from above. On the cut ``u >= 0`` (purely real root)
    the sign follows ``Re(ref)``, which is how a point of the closed upper
    half-plane is distinguished by its preimage.
    """
    r = np.sqrt(np.asarray(u, dtype=complex))
    flip = r.imag < 0
    if ref is not None:
        ref = np.asarray(ref)
        flip = flip | ((r.imag == 0) & (r.real * np.real(ref) < 0))
    return np.where(flip, -r, r)[()]


def halfplane_slit(zeta, p: SlitParams):
    """``e^{-c/2} sqrt(zeta^2 - a)`` on the closed upper half-plane.

    Maps the half-plane onto itself minus the vertical slit ``(0, i h]``.
    """
    zeta = np.asarray(zeta, dtype=complex)
    zeta = zeta.real + 1j * np.maximum(zeta.imag, 0.0)
    sa = p.sqrt_a
    return math.exp(-0.5 * p.c) * upper_sqrt((zeta - sa) * (zeta + sa), ref=zeta)


def halfplane_slit_inverse(xi, p: SlitParams):
    """``sqrt(e^c xi^2 + a)`` with the root chosen in the upper half-plane."""
    xi = np.asarray(xi, dtype=complex)
    return upper_sqrt(math.exp(p.c) * xi * xi + p.a, ref=xi)


# ---------------------------------------------------------------------------
# The slit map and its inverse
# ---------------------------------------------------------------------------

def _check_exterior(w):
    if np.any(np.abs(w) < 1.0 - DISC_TOL):
        raise DomainError("point lies strictly inside the unit disc")


def slit_map(w, p: SlitParams):
    """Evaluate ``f_c(w)`` for ``|w| >= 1``.

    ``w = -1`` is fixed by the map and handled by continuity.
    """
    w = np.asarray(w, dtype=complex)
    _check_exterior(w)
    at_m1 = w == -1
    ws = np.where(at_m1, 2.0, w)
    v = halfplane_slit(1j * (ws - 1) / (ws + 1), p)
    out = math.exp(p.c) * (ws + 1) ** 2 * (1 - 1j * v) ** 2 / (4 * ws)
    out = np.where(at_m1, -1.0 + 0j, out)
    return out[()] if out.ndim == 0 else out


def slit_map_rotated(w, theta: float, p: SlitParams):
    """``e^{i theta} f_c(e^{-i theta} w)``: slit attached at ``e^{i theta}``."""
    rot = complex(math.cos(theta), math.sin(theta))
    return rot * slit_map(np.asarray(w, dtype=complex) / rot, p)


def slit_map_inverse(z, p: SlitParams, *, slit_tol: float = 1e-14):
    """Inverse of ``f_c`` on the exterior disc minus the slit.

    Points strictly inside the slit have two preimages and are rejected;
    the tip ``1 + d`` maps back to 1.
    """
    z = np.asarray(z, dtype=complex)
    _check_exterior(z)
    on_slit = (np.abs(z.imag) <= slit_tol) & (z.real > 1.0 + slit_tol) & (z.real < 1.0 + p.d - slit_tol)
    if np.any(on_slit):
        raise DomainError("point lies on the slit, inverse is two-valued")
    at_m1 = z == -1
    zs = np.where(at_m1, 2.0, z)
    y = halfplane_slit_inverse(1j * (zs - 1) / (zs + 1), p)
    out = math.exp(-p.c) * (zs + 1) ** 2 * (1 - 1j * y) ** 2 / (4 * zs)
    out = np.where(at_m1, -1.0 + 0j, out)
    return out[()] if out.ndim == 0 else out


def log_abs_f_prime(w, p: SlitParams):
    """``log |f_c'(w)|`` from the closed form

        |f'(w)| = |f(w)| / |w| * |w - 1| / sqrt(|w - e^{i beta}| |w - e^{-i beta}|).

    Singular at the two base preimages ``e^{+-i beta}``.
    """
    w = np.asarray(w, dtype=complex)
    _check_exterior(w)
    dp = np.abs(w - p.e_ibeta)
    dm = np.abs(w - np.conj(p.e_ibeta))
    if np.any((dp == 0) | (dm == 0)):
        raise PoleError("log|f'| is singular at e^{+-i beta}")
    fw = slit_map(w, p)
    out = (np.log(np.abs(fw)) - np.log(np.abs(w)) + np.log(np.abs(w - 1))
           - 0.5 * (np.log(dp) + np.log(dm)))
    return out[()] if np.ndim(out) == 0 else out


def slit_map_offset(delta, sign: int, p: SlitParams):
    """``f_c(e^{i s beta} + delta) - 1`` without cancellation.

    Writing ``b = e^{i s beta}`` and ``zeta_0 = -s sqrt(a)`` (the image of b in
    the half-plane), the half-plane offset is

        lambda = 2 i delta / ((b + 1 + delta)(b + 1))

    and ``zeta^2 - a = lambda (2 zeta_0 + lambda)`` is formed without
    subtracting nearly equal numbers. Valid for ``|delta| <= beta / 2``.
    """
    if sign not in (1, -1):
        raise ConfigError("sign must be +1 or -1")
    delta = np.asarray(delta, dtype=complex)
    if np.any(np.abs(delta) > 0.5 * p.beta):
        raise OutOfRegimeError("offset larger than beta/2, use slit_map instead")
    b = p.e_ibeta if sign > 0 else p.e_ibeta.conjugate()
    w = b + delta
    _check_exterior(w)
    lam = 2j * delta / ((w + 1) * (b + 1))
    zeta0 = -sign * p.sqrt_a
    r = upper_sqrt(lam * (2 * zeta0 + lam), ref=zeta0 + lam)
    v = math.exp(-0.5 * p.c) * r
    out = -2j * v / (1 + 1j * v)
    return out[()] if out.ndim == 0 else out


def slit_map_inverse_offset(eps, p: SlitParams):
    """Preimage of ``1 + eps`` as ``(sign, delta)`` with
    ``f_c^{-1}(1 + eps) = e^{i sign beta} + delta``.

    For small ``eps`` the preimage sits next to one of the base points and
    plain evaluation loses everything to cancellation. In the half-plane,
    with ``xi = i eps / (2 + eps)`` and ``y0 = +-sqrt(a)``,

        y - y0 = e^c xi^2 / (y + y0)

    and the Moebius difference is formed directly. ``sign`` is +1 when the
    preimage is closer to e^{i beta} (the half-plane root has Re y < 0).
    """
    eps = complex(eps)
    z = 1.0 + eps
    if abs(z) < 1.0 - DISC_TOL:
        raise DomainError("point lies strictly inside the unit disc")
    if eps == 0:
        raise DomainError("1 is the slit base, its preimage is two-valued")
    xi = 1j * eps / (2.0 + eps)
    y = complex(halfplane_slit_inverse(xi, p))
    if y.imag == 0 and y.real == 0:
        raise DomainError("preimage is not unique")
    sign = 1 if y.real < 0 else -1
    y0 = -sign * p.sqrt_a
    dy = math.exp(p.c) * xi * xi / (y + y0)
    delta = -2j * dy / ((1 + 1j * y) * (1 + 1j * y0))
    return sign, delta
