"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

Every conductivity law is packed into ``(kind, scal, coefs, exps)``:

* ``coefs``/``exps`` describe a power sum ``G(s) = sum_j coefs[j] * s**exps[j]``
  with ascending positive exponents (the forward map of the interpolated law,
  or ``G_F`` of the Forchheimer part for the piecewise/multiplicative laws);
* ``scal`` holds the per-kind scalars listed next to the ``KIND_*`` codes.

The public dispatchers at the bottom pick the backend from
:data:`mixedflow._accel.USE_NUMBA`. Solver-side kernels work on a ghost-extended
field ``pe`` whose outer ring holds Dirichlet values at boundary face centres,
with coordinates ``xe`` (and ``ye``) that include the wall positions.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

KIND_POWER = 0  # scal unused
KIND_PIECEWISE = 1  # scal = [M1, beta1, M2, Z1, Z2]
KIND_RATIONAL = 2  # scal = [a, b, c, beta1, beta2]
KIND_MULTIPLICATIVE = 3  # scal = [kbar, beta1]

DEFAULT_RTOL = 1e-12
DEFAULT_MAXITER = 200
_TINY = np.finfo(float).tiny


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------


@njit
def _gsum(s, coefs, exps):
    g = 0.0
    dg = 0.0
    for j in range(coefs.shape[0]):
        c = coefs[j]
        if c != 0.0:
            t = c * s ** exps[j]
            g += t
            dg += exps[j] * t
    return g, dg / s


@njit
def _invert_one(xi, coefs, exps, rtol, maxiter):
    """Return (s, status, lo, hi); status 0 means converged.

    Every single-term solution of ``c_j s^e_j = xi`` bounds the root from
    above and ``(xi / (n c_j))^(1/e_j)`` bounds it from below, so the bracket
    is closed-form. ``u -> log G(e^u)`` is convex (a log-sum-exp), hence
    Newton in log-log variables started at the upper bound decreases
    monotonically to the root; the bracket only guards against roundoff.
    """
    if xi <= 0.0:
        return 0.0, 0, 0.0, 0.0
    n = 0
    for j in range(coefs.shape[0]):
        if coefs[j] != 0.0:
            n += 1
    hi = np.inf
    lo = np.inf
    for j in range(coefs.shape[0]):
        c = coefs[j]
        if c != 0.0:
            e = 1.0 / exps[j]
            v = (xi / c) ** e
            if v < hi:
                hi = v
            v = (xi / (n * c)) ** e
            if v < lo:
                lo = v
    if hi < _TINY:
        # the root lies below the normal double range
        return 0.0, 0, 0.0, hi
    s = hi
    lx = np.log(xi)
    for _ in range(maxiter):
        g, dg = _gsum(s, coefs, exps)
        f = g - xi
        if f == 0.0:
            return s, 0, s, s
        if f > 0.0:
            if s < hi:
                hi = s
        elif s > lo:
            lo = s
        sn = s * np.exp(-(np.log(g) - lx) * g / (s * dg))
        if not (lo <= sn <= hi):
            sn = 0.5 * (lo + hi)
        if abs(sn - s) <= rtol * sn or hi - lo <= 4.4e-16 * hi:
            return sn, 0, lo, hi
        s = sn
    return s, 1, lo, hi


@njit
def _invert_nb(xi, coefs, exps, rtol, maxiter):
    m = xi.shape[0]
    out = np.empty(m)
    status = np.zeros(m, dtype=np.int64)
    lo = np.empty(m)
    hi = np.empty(m)
    for i in range(m):
        out[i], status[i], lo[i], hi[i] = _invert_one(xi[i], coefs, exps, rtol, maxiter)
    return out, status, lo, hi


@njit
def _ksum_one(xi, coefs, exps, rtol, maxiter):
    # K = s/xi for the power-sum law; the xi -> 0 limit is 1/c0 when the
    # leading exponent is 1 (Forchheimer) and 0 when it is below 1
    if xi <= 0.0:
        jd = 0
        while coefs[jd] == 0.0:
            jd += 1
        if exps[jd] == 1.0:
            return 1.0 / coefs[jd], 0
        return 0.0, 0
    s, st, _, _ = _invert_one(xi, coefs, exps, rtol, maxiter)
    return s / xi, st


@njit
def _k_one(kind, scal, coefs, exps, xi, rtol, maxiter):
    if kind == KIND_POWER:
        return _ksum_one(xi, coefs, exps, rtol, maxiter)
    if kind == KIND_PIECEWISE:
        if xi < scal[3]:
            return scal[0] * xi ** scal[1], 0
        if xi <= scal[4]:
            return scal[2], 0
        return _ksum_one(xi, coefs, exps, rtol, maxiter)
    if kind == KIND_RATIONAL:
        if xi <= 0.0:
            return 0.0, 0
        t1 = xi ** scal[3]
        return scal[0] * t1 / ((1.0 + scal[1] * t1) * (1.0 + scal[2] * xi ** scal[4])), 0
    # multiplicative
    if xi <= 0.0:
        return 0.0, 0
    kf, st = _ksum_one(xi, coefs, exps, rtol, maxiter)
    m = scal[0] * xi ** scal[1]
    return kf * m / (1.0 + m), st


@njit
def _k_nb(kind, scal, coefs, exps, xi, rtol, maxiter):
    m = xi.shape[0]
    out = np.empty(m)
    bad = 0
    for i in range(m):
        out[i], st = _k_one(kind, scal, coefs, exps, xi[i], rtol, maxiter)
        bad += st
    return out, bad


@njit
def _rates_1d_nb(pe, xe, h, kind, scal, coefs, exps, rtol, maxiter):
    """Flux divergence and the step-bound rate ``2n max_f K_f / (h d_f)``.

    ``dt * rate <= 1`` bounds every per-face coupling by 1/(2n), which keeps
    each update a convex combination and damps the odd-even mode.
    """
    nf = pe.shape[0] - 1
    flux = np.empty(nf)
    rate = np.empty(nf)
    bad = 0
    for f in range(nf):
        d = xe[f + 1] - xe[f]
        g = (pe[f + 1] - pe[f]) / d
        k, st = _k_one(kind, scal, coefs, exps, abs(g), rtol, maxiter)
        bad += st
        flux[f] = k * g
        rate[f] = k / (h * d)
    n = nf - 1
    div = np.empty(n)
    for i in range(n):
        div[i] = (flux[i + 1] - flux[i]) / h
    return div, 2.0 * rate.max(), bad


@njit
def _rates_2d_nb(pe, xe, ye, hx, hy, kind, scal, coefs, exps, rtol, maxiter):
    nx = pe.shape[0] - 2
    ny = pe.shape[1] - 2
    fx = np.empty((nx + 1, ny))
    rx = np.empty((nx + 1, ny))
    fy = np.empty((nx, ny + 1))
    ry = np.empty((nx, ny + 1))
    bad = 0
    for i in range(1, nx + 2):
        d = xe[i] - xe[i - 1]
        for j in range(1, ny + 1):
            gn = (pe[i, j] - pe[i - 1, j]) / d
            dy = ye[j + 1] - ye[j - 1]
            gt = 0.5 * ((pe[i - 1, j + 1] - pe[i - 1, j - 1]) / dy + (pe[i, j + 1] - pe[i, j - 1]) / dy)
            k, st = _k_one(kind, scal, coefs, exps, np.sqrt(gn * gn + gt * gt), rtol, maxiter)
            bad += st
            fx[i - 1, j - 1] = k * gn
            rx[i - 1, j - 1] = k / (hx * d)
    for j in range(1, ny + 2):
        d = ye[j] - ye[j - 1]
        for i in range(1, nx + 1):
            gn = (pe[i, j] - pe[i, j - 1]) / d
            dx = xe[i + 1] - xe[i - 1]
            gt = 0.5 * ((pe[i + 1, j - 1] - pe[i - 1, j - 1]) / dx + (pe[i + 1, j] - pe[i - 1, j]) / dx)
            k, st = _k_one(kind, scal, coefs, exps, np.sqrt(gn * gn + gt * gt), rtol, maxiter)
            bad += st
            fy[i - 1, j - 1] = k * gn
            ry[i - 1, j - 1] = k / (hy * d)
    div = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            div[i, j] = (fx[i + 1, j] - fx[i, j]) / hx + (fy[i, j + 1] - fy[i, j]) / hy
    return div, 4.0 * max(rx.max(), ry.max()), bad


# --------------------------------------------------------------------------
# numpy path
# --------------------------------------------------------------------------


def _gsum_np(s, coefs, exps):
    terms = coefs[None, :] * np.power(s[:, None], exps[None, :])
    g = terms.sum(axis=1)
    dg = (terms * exps[None, :]).sum(axis=1) / s
    return g, dg


def _invert_np(xi, coefs, exps, rtol, maxiter):
    xi = np.asarray(xi, dtype=float)
    m = xi.shape[0]
    out = np.zeros(m)
    status = np.zeros(m, dtype=np.int64)
    lo = np.zeros(m)
    hi = np.zeros(m)
    pos = xi > 0.0
    if not pos.any():
        return out, status, lo, hi
    x = xi[pos]
    nz = np.flatnonzero(coefs)
    c, e = coefs[nz], exps[nz]
    u = ((x[:, None] / c[None, :]) ** (1.0 / e[None, :])).min(axis=1)
    l = ((x[:, None] / (nz.size * c[None, :])) ** (1.0 / e[None, :])).min(axis=1)
    s = np.where(u < _TINY, 0.0, u)
    l = np.where(u < _TINY, 0.0, l)
    lx = np.log(x)
    active = u >= _TINY
    for _ in range(maxiter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        sa = s[idx]
        g, dg = _gsum_np(sa, coefs, exps)
        f = g - x[idx]
        hit = f == 0.0
        ua = np.where(f > 0.0, np.minimum(sa, u[idx]), u[idx])
        la = np.where(f < 0.0, np.maximum(sa, l[idx]), l[idx])
        sn = sa * np.exp(-(np.log(g) - lx[idx]) * g / (sa * dg))
        sn = np.where((la <= sn) & (sn <= ua), sn, 0.5 * (la + ua))
        sn = np.where(hit, sa, sn)
        done = hit | (np.abs(sn - sa) <= rtol * sn) | (ua - la <= 4.4e-16 * ua)
        l[idx] = la
        u[idx] = ua
        s[idx] = sn
        active[idx[done]] = False
    out[pos] = s
    lo[pos] = l
    hi[pos] = u
    status[np.flatnonzero(pos)[active]] = 1
    return out, status, lo, hi


def _ksum_np(xi, coefs, exps, rtol, maxiter):
    s, status, _, _ = _invert_np(xi, coefs, exps, rtol, maxiter)
    k = np.empty_like(s)
    pos = xi > 0.0
    k[pos] = s[pos] / xi[pos]
    jd = np.flatnonzero(coefs)[0]
    k[~pos] = 1.0 / coefs[jd] if exps[jd] == 1.0 else 0.0
    return k, int(status.sum())


def _k_np(kind, scal, coefs, exps, xi, rtol, maxiter):
    xi = np.asarray(xi, dtype=float)
    if kind == KIND_POWER:
        return _ksum_np(xi, coefs, exps, rtol, maxiter)
    if kind == KIND_PIECEWISE:
        out = np.empty_like(xi)
        b1 = xi < scal[3]
        b2 = ~b1 & (xi <= scal[4])
        b3 = ~(b1 | b2)
        out[b1] = scal[0] * xi[b1] ** scal[1]
        out[b2] = scal[2]
        bad = 0
        if b3.any():
            out[b3], bad = _ksum_np(xi[b3], coefs, exps, rtol, maxiter)
        return out, bad
    if kind == KIND_RATIONAL:
        t1 = xi ** scal[3]
        return scal[0] * t1 / ((1.0 + scal[1] * t1) * (1.0 + scal[2] * xi ** scal[4])), 0
    kf, bad = _ksum_np(xi, coefs, exps, rtol, maxiter)
    m = scal[0] * xi ** scal[1]
    return kf * m / (1.0 + m), bad


def _rates_1d_np(pe, xe, h, kind, scal, coefs, exps, rtol, maxiter):
    d = np.diff(xe)
    g = np.diff(pe) / d
    k, bad = _k_np(kind, scal, coefs, exps, np.abs(g), rtol, maxiter)
    flux = k * g
    rate = k / (h * d)
    div = np.diff(flux) / h
    return div, 2.0 * float(rate.max()), bad


def face_gradients_2d(pe, xe, ye):
    """Full gradient vectors on x-faces and y-faces of a ghost-extended field.

    Returns ``(gx_n, gx_t, gy_n, gy_t)``: normal and transverse components on
    x-faces, shape ``(nx+1, ny)``, and on y-faces, shape ``(nx, ny+1)``.
    """
    dxf = np.diff(xe)[:, None]
    dyf = np.diff(ye)[None, :]
    gx_n = np.diff(pe[:, 1:-1], axis=0) / dxf
    gy_n = np.diff(pe[1:-1, :], axis=1) / dyf
    # centred transverse differences in every (ghost) column / row
    cy = (pe[:, 2:] - pe[:, :-2]) / (ye[2:] - ye[:-2])[None, :]
    cx = (pe[2:, :] - pe[:-2, :]) / (xe[2:] - xe[:-2])[:, None]
    gx_t = 0.5 * (cy[:-1, :] + cy[1:, :])
    gy_t = 0.5 * (cx[:, :-1] + cx[:, 1:])
    return gx_n, gx_t, gy_n, gy_t


def _rates_2d_np(pe, xe, ye, hx, hy, kind, scal, coefs, exps, rtol, maxiter):
    gx_n, gx_t, gy_n, gy_t = face_gradients_2d(pe, xe, ye)
    kx, b1 = _k_np(kind, scal, coefs, exps, np.hypot(gx_n, gx_t).ravel(), rtol, maxiter)
    ky, b2 = _k_np(kind, scal, coefs, exps, np.hypot(gy_n, gy_t).ravel(), rtol, maxiter)
    kx = kx.reshape(gx_n.shape)
    ky = ky.reshape(gy_n.shape)
    fx = kx * gx_n
    fy = ky * gy_n
    div = np.diff(fx, axis=0) / hx + np.diff(fy, axis=1) / hy
    rx = kx / (hx * np.diff(xe)[:, None])
    ry = ky / (hy * np.diff(ye)[None, :])
    return div, 4.0 * float(max(rx.max(), ry.max())), b1 + b2


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def invert_power_sum(xi, coefs, exps, rtol=DEFAULT_RTOL, maxiter=DEFAULT_MAXITER):
    """Solve ``G(s) = xi`` elementwise; returns ``(s, status, lo, hi)``."""
    xi = np.ascontiguousarray(xi, dtype=float).ravel()
    if USE_NUMBA:
        return _invert_nb(xi, coefs, exps, rtol, maxiter)
    return _invert_np(xi, coefs, exps, rtol, maxiter)


def conductivity(kind, scal, coefs, exps, xi, rtol=DEFAULT_RTOL, maxiter=DEFAULT_MAXITER):
    """K(xi) on a flat array; returns ``(K, n_unconverged)``."""
    xi = np.ascontiguousarray(xi, dtype=float).ravel()
    if USE_NUMBA:
        return _k_nb(kind, scal, coefs, exps, xi, rtol, maxiter)
    return _k_np(kind, scal, coefs, exps, xi, rtol, maxiter)


def rates_1d(pe, xe, h, kind, scal, coefs, exps, rtol=DEFAULT_RTOL, maxiter=DEFAULT_MAXITER):
    if USE_NUMBA:
        return _rates_1d_nb(pe, xe, h, kind, scal, coefs, exps, rtol, maxiter)
    return _rates_1d_np(pe, xe, h, kind, scal, coefs, exps, rtol, maxiter)


def rates_2d(pe, xe, ye, hx, hy, kind, scal, coefs, exps, rtol=DEFAULT_RTOL, maxiter=DEFAULT_MAXITER):
    if USE_NUMBA:
        return _rates_2d_nb(pe, xe, ye, hx, hy, kind, scal, coefs, exps, rtol, maxiter)
    return _rates_2d_np(pe, xe, ye, hx, hy, kind, scal, coefs, exps, rtol, maxiter)
