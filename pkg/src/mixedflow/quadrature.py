"""Batched adaptive Simpson quadrature.

All open panels of all requested intervals are refined together, one level
per pass, so the integrand is called on whole arrays. This matters because
evaluating K for the interpolated law costs a root solve per point.
"""

import numpy as np

from .errors import ConvergenceError

_UNRESOLVED = 64.0 * np.finfo(float).tiny


def adaptive_simpson(f, a, b, rtol=1e-10, atol=1e-300, n_init=4, max_level=60):
    """Integrate vectorised ``f`` over each ``[a[k], b[k]]``.

    Each interval starts as ``n_init`` Simpson panels. A panel is accepted
    when the two-half estimate differs from the whole-panel one by at most
    15x its share of ``max(atol, rtol * |coarse estimate of the interval|)``;
    the accepted value carries the Richardson correction.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    m = a.size
    result = np.zeros(m)
    if m == 0:
        return result

    edges = a[:, None] + (b - a)[:, None] * np.linspace(0.0, 1.0, n_init + 1)[None, :]
    lo = edges[:, :-1].ravel()
    hi = edges[:, 1:].ravel()
    owner = np.repeat(np.arange(m), n_init)
    mid = 0.5 * (lo + hi)
    vals = f(np.concatenate([lo, mid, hi]))
    k = lo.size
    flo, fmid, fhi = vals[:k], vals[k : 2 * k], vals[2 * k :]
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    coarse = np.bincount(owner, weights=whole, minlength=m)
    width = (b - a)[owner]
    budget = np.maximum(atol, rtol * np.abs(coarse))[owner]
    tol = np.where(width > 0, budget * (hi - lo) / np.where(width > 0, width, 1.0), budget)

    for _level in range(max_level):
        if lo.size == 0:
            return result
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        fv = f(np.concatenate([lm, rm]))
        k = lo.size
        flm, frm = fv[:k], fv[k:]
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        err = left + right - whole
        # errors near the underflow threshold are below double resolution
        ok = np.abs(err) <= np.maximum(15.0 * tol, _UNRESOLVED)
        # panels that can no longer be split in floating point are accepted
        ok |= (lm <= lo) | (rm >= hi) | (mid <= lo) | (mid >= hi)
        if ok.any():
            result += np.bincount(owner[ok], weights=(left + right + err / 15.0)[ok], minlength=m)
        keep = ~ok
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        lm, rm = lm[keep], rm[keep]
        flo, fmid, fhi, flm, frm = flo[keep], fmid[keep], fhi[keep], flm[keep], frm[keep]
        left, right, tol, owner = left[keep], right[keep], tol[keep], owner[keep]
        lo = np.concatenate([lo, mid])
        hi_new = np.concatenate([mid, hi])
        mid = np.concatenate([lm, rm])
        flo, fhi = np.concatenate([flo, fmid]), np.concatenate([fmid, fhi])
        fmid = np.concatenate([flm, frm])
        hi = hi_new
        whole = np.concatenate([left, right])
        tol = np.concatenate([tol, tol]) * 0.5
        owner = np.concatenate([owner, owner])

    if lo.size:
        worst = int(owner[0])
        raise ConvergenceError(
            f"adaptive Simpson did not reach rtol={rtol:g} after {max_level} levels",
            bracket=(float(a[worst]), float(b[worst])),
        )
    return result


def fixed_simpson(f, a, b, panels):
    """Composite Simpson with a fixed number of panels (reference rule)."""
    x = np.linspace(a, b, 2 * panels + 1)
    y = f(x)
    h = (b - a) / (2 * panels)
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
