"""Special-function kernels: beta, regularized incomplete beta, 2F1 and Appell F1.

All functions are pure. ``reg_inc_beta`` and ``inv_reg_inc_beta`` broadcast
over numpy arrays; the hypergeometric functions are scalar.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from ._roots import bracketed_newton
from .errors import DomainError, NumericError

_TINY = 1e-300
_EPS = np.finfo(float).eps
_SLOW_SERIES_W = 0.95


@dataclass(frozen=True)
class SeriesControl:
    """Stopping rule for series and quadrature evaluations."""

    rel_tol: float = 1e-12
    max_terms: int = 100_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_CONTROL = SeriesControl()


def _scalar_or_array(arr):
    arr = np.asarray(arr, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


def ln_beta(p, q):
    """Logarithm of the complete beta function ``B(p, q)``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(~(p > 0)) or np.any(~(q > 0)):
        raise DomainError(f"ln_beta needs positive arguments, got p={p}, q={q}")
    return _scalar_or_array(gammaln(p) + gammaln(q) - gammaln(p + q))


def _betacf(a, b, x, max_terms):
    """Modified Lentz evaluation of the incomplete-beta continued fraction.

    Arrays must already be broadcast to a common shape and satisfy
    ``x < (a + 1) / (a + b + 2)`` for fast convergence. Entries leave the
    working set as soon as their own factor has converged.
    """
    out = np.empty_like(x)
    idx = np.arange(x.size)
    a, b, x = a.ravel(), b.ravel(), x.ravel()
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    flat = out.reshape(-1)
    for m in range(1, max_terms + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        done = np.abs(delta - 1.0) <= 4 * _EPS
        if np.all(done):
            flat[idx] = h
            return out
        if np.any(done):
            flat[idx[done]] = h[done]
            keep = ~done
            idx, a, b, x = idx[keep], a[keep], b[keep], x[keep]
            qab, qap, qam, c, d, h = qab[keep], qap[keep], qam[keep], c[keep], d[keep], h[keep]
    flat[idx] = h
    raise NumericError(
        f"incomplete beta continued fraction did not converge in {max_terms} terms",
        partial=out,
    )


def reg_inc_beta(y, p, q, control: SeriesControl = DEFAULT_CONTROL):
    """Regularized incomplete beta function ``I(y; p, q)``.

    Parameters
    ----------
    y : float or array_like
        Upper integration limit in ``[0, 1]``.
    p, q : float or array_like
        Positive shape parameters.
    control : SeriesControl, optional
        Only ``max_terms`` is used; the continued fraction always runs to
        machine precision.

    Returns
    -------
    float or ndarray
        Value in ``[0, 1]``, nondecreasing in ``y``.
    """
    y, p, q = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (y, p, q)))
    if np.any(~((y >= 0) & (y <= 1))):
        raise DomainError("reg_inc_beta needs 0 <= y <= 1")
    if np.any(~(p > 0)) or np.any(~(q > 0)):
        raise DomainError("reg_inc_beta needs positive shape parameters")

    out = np.where(y >= 1.0, 1.0, 0.0)
    inner = (y > 0) & (y < 1)
    if np.any(inner):
        yy, pp, qq = y[inner], p[inner], q[inner]
        swap = yy >= (pp + 1.0) / (pp + qq + 2.0)
        a = np.where(swap, qq, pp)
        b = np.where(swap, pp, qq)
        x = np.where(swap, 1.0 - yy, yy)
        # log prefactor x^a (1-x)^b / B(a, b)
        log_front = a * np.log(x) + b * np.log1p(-x) - (gammaln(a) + gammaln(b) - gammaln(a + b))
        val = np.exp(log_front) * _betacf(a, b, x, control.max_terms) / a
        out[inner] = np.where(swap, 1.0 - val, val)
    return _scalar_or_array(np.clip(out, 0.0, 1.0))


def _beta_density(y, p, q):
    with np.errstate(divide="ignore", invalid="ignore"):
        logd = (p - 1.0) * np.log(y) + (q - 1.0) * np.log1p(-y) - (gammaln(p) + gammaln(q) - gammaln(p + q))
    return np.exp(logd)


def inv_reg_inc_beta(u, p, q, control: SeriesControl = DEFAULT_CONTROL):
    """Inverse of :func:`reg_inc_beta` in its first argument.

    Safeguarded Newton iteration on the bracket ``[0, 1]``. Stops once
    ``|I(y) - u| <= 1e-13`` or the bracket has shrunk to a few ulps, which is
    the best attainable when the density is singular at an endpoint.
    """
    u, p, q = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (u, p, q)))
    if np.any(~((u >= 0) & (u <= 1))):
        raise DomainError("inv_reg_inc_beta needs 0 <= u <= 1")
    if np.any(~(p > 0)) or np.any(~(q > 0)):
        raise DomainError("inv_reg_inc_beta needs positive shape parameters")

    out = np.where(u >= 1.0, 1.0, 0.0)
    inner = (u > 0) & (u < 1)
    if np.any(inner):
        uu, pp, qq = u[inner], p[inner], q[inner]
        # upper half solved for 1 - y with swapped shapes to keep relative precision
        upper = uu > 0.5
        target = np.where(upper, 1.0 - uu, uu)
        a = np.where(upper, qq, pp)
        b = np.where(upper, pp, qq)
        z = bracketed_newton(
            lambda y, i: reg_inc_beta(y, a[i], b[i], control) - target[i],
            lambda y, i: _beta_density(y, a[i], b[i]),
            np.zeros_like(uu), np.ones_like(uu), np.minimum(a / (a + b), 0.5),
            ftol=1e-13, fscale=target,
        )
        out[inner] = np.where(upper, 1.0 - z, z)
    return _scalar_or_array(out)


def gauss_2f1(a, b, c, z, control: SeriesControl = DEFAULT_CONTROL):
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for ``z <= 0``.

    The Pfaff transformation maps ``z`` to ``w = z / (z - 1)`` in ``[0, 1)``
    where the power series converges. For ``w > 0.95`` the series is slow and,
    when ``c > b > 0`` (or ``c > a > 0``), the Euler integral is used instead.
    """
    if z > 0:
        raise DomainError(f"gauss_2f1 is implemented for z <= 0 only, got z={z}")
    if c <= 0 and float(c).is_integer():
        raise DomainError(f"c must not be a non-positive integer, got c={c}")
    if z == 0:
        return 1.0
    w = z / (z - 1.0)
    if w > _SLOW_SERIES_W:
        # the series needs O(1/(1-w)) terms here; use the Euler integral when it exists
        for lead, other in ((b, a), (a, b)):
            if c > lead > 0:
                return appell_f1(lead, 0.0, other, c, 0.0, z, control)
    # 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; w); pick the Pfaff branch that terminates if any
    A, B, prefactor_exp = a, c - b, a
    if not (B <= 0 and float(B).is_integer()) and (c - a <= 0 and float(c - a).is_integer()):
        A, B, prefactor_exp = c - a, b, b
    total = 1.0
    term = 1.0
    for n in range(control.max_terms):
        term *= (A + n) * (B + n) / ((c + n) * (n + 1.0)) * w
        total += term
        if term == 0.0:
            break
        ratio = abs((A + n + 1) * (B + n + 1) / ((c + n + 1) * (n + 2.0))) * w
        # tail bound kept an order below rel_tol to leave room for rounding
        if ratio < 1.0 and abs(term) * ratio / (1.0 - ratio) <= 0.1 * control.rel_tol * abs(total):
            break
    else:
        raise NumericError(
            f"2F1 series did not converge in {control.max_terms} terms (w={w})",
            partial=(1.0 - z) ** (-prefactor_exp) * total,
        )
    return (1.0 - z) ** (-prefactor_exp) * total


def appell_f1(a, b1, b2, c, x, y, control: SeriesControl = DEFAULT_CONTROL):
    """Appell ``F1(a; b1, b2; c; x, y)`` from its one-dimensional Euler integral.

    Requires ``a > 0`` and ``c - a > 0``. ``x`` must lie in ``[0, 1)`` and
    ``y < 1``; the endpoint powers ``t^(a-1) (1-t)^(c-a-1)`` are handled as an
    algebraic quadrature weight.
    """
    if not (a > 0 and c - a > 0):
        raise DomainError(f"appell_f1 needs a > 0 and c - a > 0, got a={a}, c={c}")
    if not (0 <= x < 1):
        raise DomainError(f"appell_f1 needs 0 <= x < 1, got x={x}")
    if not y < 1:
        raise DomainError(f"appell_f1 needs y < 1, got y={y}")
    if x == 0 and y == 0:
        return 1.0

    def core(t):
        return (1.0 - x * t) ** (-b1) * (1.0 - y * t) ** (-b2)

    # the integrand varies on the scale 1/|y| near t = 0 and 1 - x near t = 1;
    # geometric breakpoints let each piece be resolved separately
    cuts = []
    if y < -20.0:
        t = 10.0 / -y
        while t < 0.25:
            cuts.append(t)
            t *= 10.0
    if x > 0.95:
        g = 10.0 * (1.0 - x)
        while g < 0.25:
            cuts.append(1.0 - g)
            g *= 10.0
    edges = [0.0, *sorted(cuts), 1.0]
    pa, pb = a - 1.0, c - a - 1.0
    opts = dict(epsabs=0.0, epsrel=max(control.rel_tol, 50 * _EPS), limit=500)
    val = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            for lo, hi in zip(edges[:-1], edges[1:]):
                if lo == 0.0 and hi == 1.0:
                    piece = integrate.quad(core, lo, hi, weight="alg", wvar=(pa, pb), **opts)[0]
                elif lo == 0.0:
                    piece = integrate.quad(lambda t: core(t) * (1.0 - t) ** pb, lo, hi,
                                           weight="alg", wvar=(pa, 0.0), **opts)[0]
                elif hi == 1.0:
                    piece = integrate.quad(lambda t: core(t) * t**pa, lo, hi,
                                           weight="alg", wvar=(0.0, pb), **opts)[0]
                else:
                    piece = integrate.quad(lambda t: core(t) * t**pa * (1.0 - t) ** pb, lo, hi, **opts)[0]
                val += piece
        except integrate.IntegrationWarning as exc:
            raise NumericError(f"Appell F1 quadrature failed: {exc}") from exc
    return val / math.exp(ln_beta(a, c - a))
