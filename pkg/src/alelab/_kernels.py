"""Compiled inner loops for composed slit maps.

A cluster of n particles is described by per-particle arrays packed in a
tuple ``T``:

    T = (a, sqa, emh, ec, eib, rot, top, eiphi, em1phi, sgn)

    a       e^{c_k} - 1
    sqa     sqrt(a)
    emh     e^{-c_k / 2}
    ec      e^{c_k}
    eib     e^{i beta_k}
    rot     e^{i theta_k}
    top     e^{i s_k beta_{k-1}}   (position of particle k in the frame of k-1)
    eiphi   e^{i phi_k}            (phi_k = theta_k - theta_{k-1} - s_k beta_{k-1})
    em1phi  e^{i phi_k} - 1
    sgn     s_k in {-1, +1} (0 for the first particle)

Index 0 is the first particle; maps are applied from the newest down.

Two evaluation modes are used. Absolute mode pushes the point itself
through the maps. Offset mode tracks ``w - b`` for the base point b of the
current map and is used while the point sits within ``switch`` of a base,
where absolute coordinates would have lost all relative precision.
"""
import math

import numpy as np
from numba import njit

DISC_EPS = 1e-9
# Log of the running derivative product is taken once per block of maps.
LOG_BLOCK = 8

_FM = {"nsz", "arcp", "contract"}


@njit(cache=True)
def abs_factors(ux, uy, sa, emh, ec):
    """One unrotated slit map in real arithmetic.

    Returns (Re f, Im f, |f'|^2) at u = ux + i uy, using
    f(u) = e^c (u+1)^2 (1 - iv)^2 / (4u) with v = e^{-c/2} sqrt(zeta^2 - a).
    """
    up = ux + 1.0
    um = ux - 1.0
    au = ux * ux + uy * uy
    aup = up * up + uy * uy
    aum = um * um + uy * uy
    zx = -2.0 * uy / aup
    zy = max((au - 1.0) / aup, 0.0)
    qx = (zx - sa) * (zx + sa) - zy * zy
    qy = 2.0 * zx * zy
    mq = math.hypot(qx, qy)
    big = math.sqrt(0.5 * (mq + abs(qx)))
    small = 0.5 * abs(qy) / big if big > 0.0 else 0.0
    rx = big if qx >= 0.0 else small
    ry = small if qx >= 0.0 else big
    if zx < 0.0:
        rx = -rx
    ox = 1.0 + emh * ry
    oy = -emh * rx
    px = up * up - uy * uy
    py = 2.0 * up * uy
    sx = ox * ox - oy * oy
    sy = 2.0 * ox * oy
    nx = px * sx - py * sy
    ny = px * sy + py * sx
    k = 0.25 * ec / au
    fx = k * (nx * ux + ny * uy)
    fy = k * (ny * ux - nx * uy)
    ao = ox * ox + oy * oy
    d2 = ec * ec * ec * aum * aup * ao * ao / (16.0 * au * au * mq)
    return fx, fy, d2


@njit(cache=True)
def off_step(delta, s, eib, sqa, emh, ec):
    """f(b + delta) - 1 and log|f'(b + delta)| with b = e^{i s beta}."""
    b = eib if s > 0 else eib.conjugate()
    w = b + delta
    lam = 2j * delta / ((w + 1.0) * (b + 1.0))
    z0 = -s * sqa
    r = np.sqrt(lam * (2.0 * z0 + lam))
    if r.imag < 0.0 or (r.imag == 0.0 and r.real * (z0 + lam.real) < 0.0):
        r = -r
    v = emh * r
    omv = 1.0 - 1j * v
    eps = -2j * v / (1.0 + 1j * v)
    aw = w.real * w.real + w.imag * w.imag
    wm = w - 1.0
    wp = w + 1.0
    num = (ec * ec * ec * (wm.real ** 2 + wm.imag ** 2) * (wp.real ** 2 + wp.imag ** 2)
           * (omv.real ** 2 + omv.imag ** 2) ** 2)
    den = 16.0 * aw * aw * (r.real ** 2 + r.imag ** 2)
    return eps, 0.5 * math.log(num / den)


@njit(cache=True)
def chain_abs(z, k, lo, T):
    """Apply maps k, k-1, ..., lo to z. Returns (image, sum log|f'|, ok)."""
    rot = T[5]
    sqa = T[1]
    emh = T[2]
    ec = T[3]
    total = 0.0
    prod = 1.0
    ok = True
    lim = (1.0 - DISC_EPS) ** 2
    zx = z.real
    zy = z.imag
    while k >= lo:
        cx = rot[k].real
        cy = rot[k].imag
        ux = zx * cx + zy * cy
        uy = zy * cx - zx * cy
        fx, fy, d2 = abs_factors(ux, uy, sqa[k], emh[k], ec[k])
        zx = cx * fx - cy * fy
        zy = cx * fy + cy * fx
        prod *= d2
        if not (1e-150 < prod < 1e150):
            total += math.log(prod)
            prod = 1.0
        if zx * zx + zy * zy < lim:
            ok = False
        k -= 1
    total = 0.5 * (total + math.log(prod))
    if not math.isfinite(total):
        ok = False
    return complex(zx, zy), total, ok


@njit(cache=True)
def offset_prefix(delta, s, k, T, switch):
    """Offset-mode part of a chain started at rot[k] (e^{i s beta_k} + delta).

    Runs maps while the offset stays within ``switch``. Returns
    (z, next_k, partial) where z is the absolute point still to be pushed
    through maps next_k..0 (next_k = -1 when nothing is left).
    """
    eib = T[4]
    rot = T[5]
    top = T[6]
    eiphi = T[7]
    em1phi = T[8]
    sgn = T[9]
    partial = 0.0
    while k >= 0:
        if abs(delta) > switch:
            b = eib[k] if s > 0 else eib[k].conjugate()
            return rot[k] * (b + delta), k, partial
        eps, ld = off_step(delta, s, eib[k], T[1][k], T[2][k], T[3][k])
        partial += ld
        if k == 0:
            return rot[0] * (1.0 + eps), -1, partial
        s = sgn[k]
        delta = top[k] * (em1phi[k] + eiphi[k] * eps)
        k -= 1
    return 0j, -1, partial


@njit(cache=True)
def chain_offset(delta, s, k, T, switch):
    """Full chain from an offset start. Returns (image, sum log|f'|, ok)."""
    z, nk, partial = offset_prefix(delta, s, k, T, switch)
    if nk < 0:
        return z, partial, math.isfinite(partial)
    img, rest, ok = chain_abs(z, nk, 0, T)
    return img, partial + rest, ok


@njit(cache=True)
def offset_trace(delta, s, k, T, switch):
    """Offsets of the partial images from the successive base points.

    Entry 0 is the starting offset (global frame); entry j is the offset
    after applying j maps, measured from the base point of the next frame
    (for the last entry, from e^{i theta_1}).
    """
    eib = T[4]
    rot = T[5]
    top = T[6]
    eiphi = T[7]
    em1phi = T[8]
    sgn = T[9]
    out = np.empty(k + 2, dtype=np.complex128)
    out[0] = rot[k] * delta
    absolute = False
    z = 0j
    j = 1
    while k >= 0:
        if not absolute and abs(delta) > switch:
            b = eib[k] if s > 0 else eib[k].conjugate()
            z = rot[k] * (b + delta)
            absolute = True
        if absolute:
            u = z * rot[k].conjugate()
            fx, fy, d2 = abs_factors(u.real, u.imag, T[1][k], T[2][k], T[3][k])
            z = rot[k] * complex(fx, fy)
            base = rot[k - 1] * top[k] if k > 0 else rot[0]
            out[j] = z - base
        else:
            eps, ld = off_step(delta, s, eib[k], T[1][k], T[2][k], T[3][k])
            if k > 0:
                s = sgn[k]
                delta = top[k] * (em1phi[k] + eiphi[k] * eps)
                out[j] = rot[k - 1] * delta
            else:
                out[j] = rot[0] * eps
        j += 1
        k -= 1
    return out


@njit(cache=True, fastmath=_FM)
def batch_chain(zx, zy, start, k_hi, T):
    """Push many points through the maps, one map at a time.

    Point i enters at map ``start[i]`` (it is left untouched by maps above
    that index). ``zx``/``zy`` are overwritten with the images. Returns the
    log-derivative sums and the smallest |z|^2 seen along each path.
    Interleaving the points hides the latency of the per-map dependency
    chain, which dominates the cost of the scalar loop.
    """
    sqa = T[1]
    emh = T[2]
    ec = T[3]
    rot = T[5]
    n = zx.shape[0]
    total = np.zeros(n)
    prod = np.ones(n)
    minr = np.full(n, np.inf)
    blk = 0
    for k in range(k_hi, -1, -1):
        cx = rot[k].real
        cy = rot[k].imag
        sa = sqa[k]
        eh = emh[k]
        e = ec[k]
        e3 = e * e * e / 16.0
        q4 = 0.25 * e
        for i in range(n):
            x0 = zx[i]
            y0 = zy[i]
            ux = x0 * cx + y0 * cy
            uy = y0 * cx - x0 * cy
            up = ux + 1.0
            um = ux - 1.0
            au = ux * ux + uy * uy
            aup = up * up + uy * uy
            aum = um * um + uy * uy
            iaup = 1.0 / aup
            zxx = -2.0 * uy * iaup
            zyy = max((au - 1.0) * iaup, 0.0)
            qx = (zxx - sa) * (zxx + sa) - zyy * zyy
            qy = 2.0 * zxx * zyy
            mq = math.sqrt(qx * qx + qy * qy)
            big = math.sqrt(0.5 * (mq + abs(qx)))
            small = 0.5 * abs(qy) / big
            rx = big if qx >= 0.0 else small
            ry = small if qx >= 0.0 else big
            rx = -rx if zxx < 0.0 else rx
            ox = 1.0 + eh * ry
            oy = -eh * rx
            px = up * up - uy * uy
            py = 2.0 * up * uy
            sx = ox * ox - oy * oy
            sy = 2.0 * ox * oy
            nx = px * sx - py * sy
            ny = px * sy + py * sx
            iau = 1.0 / au
            kk = q4 * iau
            fx = kk * (nx * ux + ny * uy)
            fy = kk * (ny * ux - nx * uy)
            ao = ox * ox + oy * oy
            d2 = e3 * aum * aup * ao * ao * iau * iau / mq
            gx = cx * fx - cy * fy
            gy = cx * fy + cy * fx
            act = start[i] >= k
            zx[i] = gx if act else x0
            zy[i] = gy if act else y0
            prod[i] *= d2 if act else 1.0
            r2 = gx * gx + gy * gy
            minr[i] = min(minr[i], r2) if act else minr[i]
        blk += 1
        if blk == LOG_BLOCK:
            blk = 0
            for i in range(n):
                total[i] += math.log(prod[i])
                prod[i] = 1.0
    for i in range(n):
        total[i] = 0.5 * (total[i] + math.log(prod[i]))
    return total, minr


@njit(cache=True)
def pole_starts(s, x, sigma, k, T, switch):
    """Offset-mode prefixes for the points e^{i(theta_k + s beta_k)} e^{sigma + i x}."""
    n = x.shape[0]
    zx = np.empty(n)
    zy = np.empty(n)
    start = np.empty(n, dtype=np.int64)
    partial = np.empty(n)
    b = T[4][k] if s > 0 else T[4][k].conjugate()
    em1s = math.expm1(sigma)
    for i in range(n):
        e = complex(math.cos(x[i]), math.sin(x[i]))
        em1 = complex(-2.0 * math.sin(0.5 * x[i]) ** 2, math.sin(x[i]))
        delta = b * (em1s * e + em1)
        z, nk, p = offset_prefix(delta, s, k, T, switch)
        zx[i] = z.real
        zy[i] = z.imag
        start[i] = nk
        partial[i] = p
    return zx, zy, start, partial


@njit(cache=True)
def delta_starts(deltas, s, k, T, switch):
    """Offset-mode prefixes for explicit offsets from e^{i(theta_k + s beta_k)}."""
    n = deltas.shape[0]
    zx = np.empty(n)
    zy = np.empty(n)
    start = np.empty(n, dtype=np.int64)
    partial = np.empty(n)
    for i in range(n):
        z, nk, p = offset_prefix(deltas[i], s, k, T, switch)
        zx[i] = z.real
        zy[i] = z.imag
        start[i] = nk
        partial[i] = p
    return zx, zy, start, partial


@njit(cache=True)
def inverse_step(z, a, ec):
    """Unrotated inverse slit map, same factorization as the forward map."""
    xi = 1j * (z - 1.0) / (z + 1.0)
    y = np.sqrt(ec * xi * xi + a)
    if y.imag < 0.0 or (y.imag == 0.0 and y.real * xi.real < 0.0):
        y = -y
    omy = 1.0 - 1j * y
    zp1 = z + 1.0
    return zp1 * zp1 * omy * omy / (4.0 * ec * z)


@njit(cache=True)
def chain_inverse(z, lo, hi, T):
    """Apply inverse maps lo, lo+1, ..., hi to z (oldest first)."""
    a = T[0]
    ec = T[3]
    rot = T[5]
    for k in range(lo, hi + 1):
        u = z * rot[k].conjugate()
        z = rot[k] * inverse_step(u, a[k], ec[k])
    return z


@njit(cache=True)
def batch_inverse(zs, lo, hi, T):
    out = np.empty_like(zs)
    for i in range(zs.shape[0]):
        out[i] = chain_inverse(zs[i], lo, hi, T)
    return out
