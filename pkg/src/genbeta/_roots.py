from __future__ import annotations

import numpy as np

from .errors import NumericError

_EPS = np.finfo(float).eps


def bracketed_newton(residual, slope, lo, hi, x0, ftol, fscale=1.0, xrtol=1e-14, max_iter=400):
    """Vectorized safeguarded Newton iteration for increasing residuals.

    ``residual(x, idx)`` and ``slope(x, idx)`` receive the current iterates
    together with the indices of the still-active elements. Any Newton step
    that leaves the bracket is replaced by a bisection step (geometric when
    the bracket is far from zero). An element is converged when
    ``|residual| <= ftol`` and the Newton correction is below ``xrtol``
    relative, when the residual is at rounding level (``8 eps * fscale``), or
    when the bracket spans a few ulps.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x = np.array(x0, dtype=float)
    floor = 8 * _EPS * np.broadcast_to(np.asarray(fscale, dtype=float), x.shape)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        xa, loa, hia = x[idx], lo[idx], hi[idx]
        f = np.atleast_1d(residual(xa, idx))
        loa = np.where(f < 0, xa, loa)
        hia = np.where(f > 0, xa, hia)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            corr = f / np.atleast_1d(slope(xa, idx))
        step = xa - corr
        done = (
            ((np.abs(f) <= ftol) & (np.abs(corr) <= xrtol * np.abs(xa)))
            | (np.abs(f) <= floor[idx])
            | (hia - loa <= 4 * _EPS * np.abs(hia))
        )
        bad = ~np.isfinite(step) | (step <= loa) | (step >= hia)
        with np.errstate(invalid="ignore"):
            mid = np.where((loa > 0) & (hia > 4 * loa), np.sqrt(loa * hia), 0.5 * (loa + hia))
        xnew = np.where(done, xa, np.where(bad, mid, step))
        x[idx], lo[idx], hi[idx] = xnew, loa, hia
        active[idx[done]] = False
        if not np.any(active):
            return x
    raise NumericError("bracketed Newton iteration did not converge", partial=x)
