"""Closed-form members of the generalized beta family and their modified variants.

Every member is described by an immutable :class:`DistSpec`. The module level
functions (``pdf``, ``cdf``, ``ccdf``, ``quantile``, ``sample``) dispatch on
``spec.family`` and broadcast over numpy arrays of ``x``.

Notation used throughout::

    u1 = (x / beta1)**alpha      u2 = (x / beta2)**alpha      r = (beta1 / beta2)**alpha

The GB cumulative distribution is ``I(F; p, q)`` with the seed
``F = (u1 + u2) / (1 + u2)``; its complement ``1 - F = (1 - u1) / (1 + u2)``
is always formed directly so that far-tail ccdf values keep full relative
precision.
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np
from scipy.special import gammainc, gammaincc, gammainccinv, gammaincinv, gammaln, xlogy

from ._roots import bracketed_newton
from .errors import DomainError
from .specfun import appell_f1, gauss_2f1, inv_reg_inc_beta, ln_beta, reg_inc_beta

_FIVE = ("alpha", "beta1", "beta2", "p", "q")

FAMILY_FIELDS = {
    "GB": _FIVE,
    "mGB": _FIVE,
    "tildeMGB": _FIVE,
    "mB": ("beta1", "beta2", "p", "q"),
    "B": ("beta1", "beta2", "p", "q"),
    "B2": ("beta2", "p", "q"),
    "mB2": ("beta2", "p", "q"),
    "GB1": ("alpha", "beta1", "p", "q"),
    "GB2": ("alpha", "beta2", "p", "q"),
    "mGB2": ("alpha", "beta2", "p", "q"),
    "GGa": ("alpha", "beta", "p"),
    "GIGa": ("alpha", "beta", "q"),
}
FAMILIES = tuple(FAMILY_FIELDS)
BOUNDED = frozenset({"GB", "mGB", "tildeMGB", "mB", "B", "GB1"})


@dataclass(frozen=True)
class DistSpec:
    """A family tag together with that member's parameters.

    Fields that do not apply to the family must be left as ``None``. The
    ``beta`` field is the single scale of the GGa and GIGa members.
    """

    family: str
    alpha: float | None = None
    beta1: float | None = None
    beta2: float | None = None
    beta: float | None = None
    p: float | None = None
    q: float | None = None

    def __post_init__(self):
        if self.family not in FAMILY_FIELDS:
            raise DomainError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        needed = FAMILY_FIELDS[self.family]
        for f in fields(self)[1:]:
            val = getattr(self, f.name)
            if f.name in needed:
                if val is None:
                    raise DomainError(f"{self.family} requires parameter {f.name!r}")
                val = float(val)
                if not (math.isfinite(val) and val > 0):
                    raise DomainError(f"{self.family} parameter {f.name} must be finite and positive, got {val}")
                object.__setattr__(self, f.name, val)
            elif val is not None:
                raise DomainError(f"parameter {f.name!r} does not apply to {self.family}")
        if self.family == "tildeMGB" and not self.q > 1.0 / self.alpha - 1.0:
            raise DomainError(
                f"tildeMGB needs q > 1/alpha - 1 for a normalizable density, got q={self.q}, alpha={self.alpha}"
            )

    @property
    def a(self) -> float:
        """Power parameter, 1 for the alpha-free members."""
        return 1.0 if self.alpha is None else self.alpha

    @property
    def upper(self) -> float:
        """Upper end of the support."""
        return self.beta1 if self.family in BOUNDED else math.inf

    def params(self) -> dict:
        return {name: getattr(self, name) for name in FAMILY_FIELDS[self.family]}

    def replace(self, **changes) -> "DistSpec":
        values = {"family": self.family, **self.params()}
        values.update(changes)
        return DistSpec(**values)

    def to_dict(self) -> dict:
        return {"family": self.family, **self.params()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "DistSpec":
        data = dict(data)
        if "family" not in data:
            raise DomainError("distribution JSON needs a 'family' key")
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise DomainError(f"unknown keys in distribution JSON: {sorted(extra)}")
        return cls(**{k: v for k, v in data.items() if v is not None})

    @classmethod
    def from_json(cls, text: str) -> "DistSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed distribution JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise DomainError("distribution JSON must be an object")
        return cls.from_dict(data)


def from_mcdonald(alpha, beta, c, p, q) -> DistSpec:
    """Convert McDonald's correlated-scale parameterization.

    ``beta1 = beta / (1 - c)**(1/alpha)`` and ``beta2 = beta / c**(1/alpha)``.
    The endpoints ``c = 0`` and ``c = 1`` give GB1 and GB2.
    """
    if not 0 <= c <= 1:
        raise DomainError(f"McDonald c must lie in [0, 1], got {c}")
    if c == 0:
        return DistSpec("GB1", alpha=alpha, beta1=beta, p=p, q=q)
    if c == 1:
        return DistSpec("GB2", alpha=alpha, beta2=beta, p=p, q=q)
    return DistSpec("GB", alpha=alpha, beta1=beta / (1 - c) ** (1 / alpha), beta2=beta / c ** (1 / alpha), p=p, q=q)


def to_power_variable(spec: DistSpec) -> DistSpec:
    """Law of ``y = x**alpha`` for a GB or mGB variable ``x``.

    GB maps onto B and mGB onto mB with both scales raised to ``alpha``.
    """
    target = {"GB": "B", "mGB": "mB"}.get(spec.family)
    if target is None:
        raise DomainError(f"power change of variable is defined for GB and mGB, not {spec.family}")
    a = spec.alpha
    return DistSpec(target, beta1=spec.beta1**a, beta2=spec.beta2**a, p=spec.p, q=spec.q)


# --------------------------------------------------------------------------
# evaluation kernels; x is a float array strictly inside (0, upper] or [0, upper]

def _log1p_r(a, beta1, beta2):
    return np.logaddexp(0.0, a * (math.log(beta1) - math.log(beta2)))


def _gb_terms(x, a, beta1, beta2):
    """Return ``u1``, ``1 - u1``, ``u2`` for the five-parameter members."""
    with np.errstate(divide="ignore"):
        lx1 = np.log(x / beta1)
    u1 = np.exp(a * lx1)
    one_minus_u1 = -np.expm1(a * lx1)
    u2 = (x / beta2) ** a
    return u1, one_minus_u1, u2


def _logpdf_gb(x, a, beta1, beta2, p, q):
    _, om1, u2 = _gb_terms(x, a, beta1, beta2)
    return (math.log(a) - math.log(beta1) - ln_beta(p, q) + p * _log1p_r(a, beta1, beta2)
            + xlogy(a * p - 1.0, x / beta1) + xlogy(q - 1.0, om1) - (p + q) * np.log1p(u2))


def _mgb_log_norm(a, beta1, beta2, p, q):
    """log of beta1 (p + (1 + r) q) B(p, q) / ((p + q) (1 + r)^(p+1))."""
    l1r = _log1p_r(a, beta1, beta2)
    return (math.log(beta1) + np.logaddexp(math.log(p), math.log(q) + l1r) + ln_beta(p, q)
            - math.log(p + q) - (p + 1.0) * l1r)


def _logpdf_mgb(x, a, beta1, beta2, p, q):
    _, om1, u2 = _gb_terms(x, a, beta1, beta2)
    return (math.log(a) - _mgb_log_norm(a, beta1, beta2, p, q)
            + xlogy(a * p - 1.0, x / beta1) + xlogy(q - 1.0, om1) - (p + q + 1.0) * np.log1p(u2))


def _mgb_extra(x, a, beta1, beta2, p, q):
    """Second CDF term of mGB; zero at 0 and at beta1."""
    u1, om1, u2 = _gb_terms(x, a, beta1, beta2)
    log_r = a * (math.log(beta1) - math.log(beta2))
    log_k = -ln_beta(p, q) - math.log(q + (p + q) * math.exp(-log_r))
    l1p_u2 = np.log1p(u2)
    with np.errstate(divide="ignore"):
        log_term = (log_k + xlogy(q, om1) - q * l1p_u2
                    + p * (_log1p_r(a, beta1, beta2) + np.log(u1) - l1p_u2))
    return np.exp(log_term)


@functools.lru_cache(maxsize=256)
def _tilde_log_norm(a, beta1, beta2, p, q):
    big_q = q - 1.0 / a + 1.0
    r = (beta1 / beta2) ** a
    return ln_beta(p, big_q) + math.log(gauss_2f1(p, p + q + 1.0, p + big_q, -r))


def _logpdf_tilde(x, a, beta1, beta2, p, q):
    _, om1, u2 = _gb_terms(x, a, beta1, beta2)
    return (math.log(a) - math.log(beta1) - _tilde_log_norm(a, beta1, beta2, p, q)
            + xlogy(a * p - 1.0, x / beta1) + xlogy(q - 1.0 / a, om1) - (p + q + 1.0) * np.log1p(u2))


def _tilde_cdf_lower(s, a, beta1, beta2, p, q):
    """Appell-F1 closed form of the tilde-mGB CDF in ``s = (x/beta1)**alpha``."""
    if s == 0:
        return 0.0
    r = (beta1 / beta2) ** a
    u2 = r * s
    b1 = 1.0 / a - q
    f_a = appell_f1(p, b1, p + q, p + 1.0, s, -u2)
    f_b = appell_f1(p + 1.0, b1, p + q + 1.0, p + 2.0, s, -u2)
    log_n = _tilde_log_norm(a, beta1, beta2, p, q)
    return math.exp(p * math.log(s) - log_n) * (f_a / p - u2 / (p + 1.0) * f_b)


def _tilde_ccdf_upper(s, a, beta1, beta2, p, q):
    """Complementary Appell-F1 form, accurate as ``s -> 1``.

    Substituting ``t = 1 - (1 - s) v`` in the tail integral gives
    ``(1-s)^Q (1+r)^-(p+q+1) F1(Q; 1-p, p+q+1; Q+1; 1-s, r(1-s)/(1+r)) / Q``
    with ``Q = q - 1/alpha + 1``.
    """
    if s >= 1:
        return 0.0
    big_q = q - 1.0 / a + 1.0
    r = (beta1 / beta2) ** a
    w = 1.0 - s
    f = appell_f1(big_q, 1.0 - p, p + q + 1.0, big_q + 1.0, w, r * w / (1.0 + r))
    log_n = _tilde_log_norm(a, beta1, beta2, p, q)
    return math.exp(big_q * math.log(w) - (p + q + 1.0) * math.log1p(r) - math.log(big_q) - log_n) * f


def _tilde_pair(x, a, beta1, beta2, p, q):
    s = np.minimum((x / beta1) ** a, 1.0)
    cdf = np.empty_like(s)
    ccdf = np.empty_like(s)
    for i, si in enumerate(s.flat):
        if si <= 0.5:
            c = _tilde_cdf_lower(si, a, beta1, beta2, p, q)
            cdf.flat[i], ccdf.flat[i] = c, 1.0 - c
        else:
            c = _tilde_ccdf_upper(si, a, beta1, beta2, p, q)
            cdf.flat[i], ccdf.flat[i] = 1.0 - c, c
    return cdf, ccdf


def _logpdf_gb1(x, a, beta1, p, q):
    _, om1, _ = _gb_terms(x, a, beta1, 1.0)
    return (math.log(a) - math.log(beta1) - ln_beta(p, q)
            + xlogy(a * p - 1.0, x / beta1) + xlogy(q - 1.0, om1))


def _logpdf_gb2(x, a, beta2, p, q):
    u2 = (x / beta2) ** a
    return (math.log(a) - math.log(beta2) - ln_beta(p, q)
            + xlogy(a * p - 1.0, x / beta2) - (p + q) * np.log1p(u2))


def _logpdf_gga(x, a, beta, p):
    v = (x / beta) ** a
    return math.log(a) - math.log(beta) - gammaln(p) + xlogy(a * p - 1.0, x / beta) - v


def _logpdf_giga(x, a, beta, q):
    with np.errstate(divide="ignore"):
        v = (beta / x) ** a
        out = math.log(a) - math.log(beta) - gammaln(q) - (a * q + 1.0) * np.log(x / beta) - v
    return np.where(x > 0, out, -np.inf)


def _core(spec: DistSpec):
    """Reduce a member to one of the kernel families with explicit alpha and q."""
    f, a = spec.family, spec.a
    if f in ("GB", "B"):
        return "GB", (a, spec.beta1, spec.beta2, spec.p, spec.q)
    if f in ("mGB", "mB"):
        return "mGB", (a, spec.beta1, spec.beta2, spec.p, spec.q)
    if f == "tildeMGB":
        return "tildeMGB", (a, spec.beta1, spec.beta2, spec.p, spec.q)
    if f == "GB1":
        return "GB1", (a, spec.beta1, spec.p, spec.q)
    if f in ("GB2", "B2"):
        return "GB2", (a, spec.beta2, spec.p, spec.q)
    if f in ("mGB2", "mB2"):
        # modified second-kind members are the standard ones with q -> q + 1
        return "GB2", (a, spec.beta2, spec.p, spec.q + 1.0)
    if f == "GGa":
        return "GGa", (a, spec.beta, spec.p)
    return "GIGa", (a, spec.beta, spec.q)


_LOGPDF = {
    "GB": _logpdf_gb,
    "mGB": _logpdf_mgb,
    "tildeMGB": _logpdf_tilde,
    "GB1": _logpdf_gb1,
    "GB2": _logpdf_gb2,
    "GGa": _logpdf_gga,
    "GIGa": _logpdf_giga,
}


def _pair(kind, args, x):
    """(cdf, ccdf) for x inside the support."""
    if kind == "GB":
        a, b1, b2, p, q = args
        u1, om1, u2 = _gb_terms(x, a, b1, b2)
        return reg_inc_beta((u1 + u2) / (1.0 + u2), p, q), reg_inc_beta(om1 / (1.0 + u2), q, p)
    if kind == "mGB":
        a, b1, b2, p, q = args
        u1, om1, u2 = _gb_terms(x, a, b1, b2)
        extra = _mgb_extra(x, a, b1, b2, p, q)
        lower = reg_inc_beta((u1 + u2) / (1.0 + u2), p, q) + extra
        upper = reg_inc_beta(om1 / (1.0 + u2), q, p) - extra
        return lower, upper
    if kind == "tildeMGB":
        return _tilde_pair(x, *args)
    if kind == "GB1":
        a, b1, p, q = args
        u1, om1, _ = _gb_terms(x, a, b1, 1.0)
        return reg_inc_beta(u1, p, q), reg_inc_beta(om1, q, p)
    if kind == "GB2":
        a, b2, p, q = args
        u2 = (x / b2) ** a
        return reg_inc_beta(u2 / (1.0 + u2), p, q), reg_inc_beta(1.0 / (1.0 + u2), q, p)
    if kind == "GGa":
        a, b, p = args
        v = (x / b) ** a
        return gammainc(p, v), gammaincc(p, v)
    a, b, q = args
    with np.errstate(divide="ignore"):
        v = (b / x) ** a
    return gammaincc(q, v), gammainc(q, v)


def _pair_balanced(kind, args, x):
    """Like :func:`_pair` but derives the larger value from the smaller one.

    Keeps both functions monotone at the ulp level. GB is left on its exact
    ``I(seed; p, q)`` composition, which already has this property.
    """
    lower, upper = (np.atleast_1d(v) for v in _pair(kind, args, x))
    if kind != "GB":
        lower, upper = np.where(upper < lower, 1.0 - upper, lower), np.where(lower <= upper, 1.0 - lower, upper)
    return lower, upper


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("x must not be NaN")
    return arr


def _finish(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def logpdf(spec: DistSpec, x):
    """Log density; ``-inf`` outside the support."""
    x = _as_array(x)
    kind, args = _core(spec)
    inside = (x >= 0) & (x <= spec.upper)
    out = np.full(x.shape, -np.inf)
    if np.any(inside):
        with np.errstate(invalid="ignore", over="ignore"):
            out[inside] = _LOGPDF[kind](x[inside], *args)
    return _finish(out)


def pdf(spec: DistSpec, x):
    """Closed-form density of ``spec`` at ``x``.

    Zero outside the support. Where the density diverges at an endpoint
    (``alpha * p < 1`` at 0, ``q < 1`` at ``beta1``) the value is ``inf``.
    """
    return _finish(np.exp(np.asarray(logpdf(spec, x))))


def seed_cdf(alpha, beta1, beta2, x):
    """Seed distribution ``((x/beta1)^a + (x/beta2)^a) / (1 + (x/beta2)^a)`` on ``[0, beta1]``."""
    x = _as_array(x)
    if np.any((x < 0) | (x > beta1)):
        raise DomainError(f"seed_cdf needs 0 <= x <= beta1={beta1}")
    u1, _, u2 = _gb_terms(x, alpha, beta1, beta2)
    return _finish((u1 + u2) / (1.0 + u2))


def seed_pdf(alpha, beta1, beta2, x):
    """Derivative of :func:`seed_cdf`."""
    x = _as_array(x)
    if np.any((x <= 0) | (x > beta1)):
        raise DomainError(f"seed_pdf needs 0 < x <= beta1={beta1}")
    u1, _, u2 = _gb_terms(x, alpha, beta1, beta2)
    return _finish(alpha * (u1 + u2) / (x * (1.0 + u2) ** 2))


def generator_pdf(seed_F, seed_f, p, q, seed_ccdf=None):
    """Beta-generated density ``F^(p-1) f (1-F)^(q-1) / B(p, q)``.

    ``seed_ccdf`` may carry an accurately computed ``1 - F``; otherwise it is
    formed by subtraction.
    """
    F = np.asarray(seed_F, dtype=float)
    f = np.asarray(seed_f, dtype=float)
    if np.any((F < 0) | (F > 1)) or np.any(f < 0):
        raise DomainError("generator_pdf needs 0 <= F <= 1 and f >= 0")
    G = 1.0 - F if seed_ccdf is None else np.asarray(seed_ccdf, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(xlogy(p - 1.0, F) + np.log(f) + xlogy(q - 1.0, G) - ln_beta(p, q))
    return _finish(out)


def pdf_alt(spec: DistSpec, x):
    """GB density through the beta generator applied to the seed distribution.

    Equivalent to :func:`pdf` for the GB member; used as an independent route.
    """
    if spec.family != "GB":
        raise DomainError(f"pdf_alt is defined for GB, not {spec.family}")
    x = _as_array(x)
    a, b1, b2, p, q = spec.alpha, spec.beta1, spec.beta2, spec.p, spec.q
    out = np.zeros(x.shape)
    inner = (x > 0) & (x <= b1)
    if np.any(inner):
        xi = x[inner]
        u1, om1, u2 = _gb_terms(xi, a, b1, b2)
        F = (u1 + u2) / (1.0 + u2)
        f = a * (u1 + u2) / (xi * (1.0 + u2) ** 2)
        out[inner] = generator_pdf(F, f, p, q, seed_ccdf=om1 / (1.0 + u2))
    at_zero = x == 0
    if np.any(at_zero):
        out[at_zero] = pdf(spec, 0.0)
    return _finish(out)


def cdf(spec: DistSpec, x):
    """Cumulative distribution function."""
    x = _as_array(x)
    kind, args = _core(spec)
    out = np.where(x >= spec.upper, 1.0, 0.0)
    inner = (x > 0) & (x < spec.upper)
    if np.any(inner):
        out[inner] = _pair_balanced(kind, args, x[inner])[0]
    return _finish(np.clip(out, 0.0, 1.0))


def ccdf(spec: DistSpec, x):
    """Complementary CDF from the direct complementary closed forms."""
    x = _as_array(x)
    kind, args = _core(spec)
    out = np.where(x <= 0, 1.0, 0.0)
    inner = (x > 0) & (x < spec.upper)
    if np.any(inner):
        out[inner] = _pair_balanced(kind, args, x[inner])[1]
    return _finish(np.clip(out, 0.0, 1.0))


# --------------------------------------------------------------------------
# quantiles and sampling

def _gb_quantile(a, b1, b2, p, q, u):
    r = (b1 / b2) ** a
    lower = u <= 0.5
    F = inv_reg_inc_beta(np.where(lower, u, 0.5), p, q)
    G = inv_reg_inc_beta(np.where(lower, 0.5, 1.0 - u), q, p)
    ratio = np.where(lower, F / (1.0 + (1.0 - F) * r), (1.0 - G) / (1.0 + G * r))
    return b1 * ratio ** (1.0 / a)


def _solve_quantile(spec, u, x0):
    """Bracketed Newton on the CDF, working with the ccdf in the upper half."""
    lower = u <= 0.5
    target = np.where(lower, u, 1.0 - u)
    hi = np.full(u.shape, spec.upper)
    if not math.isfinite(spec.upper):
        hi = np.maximum(2.0 * x0, 1e-300)
        for _ in range(2000):
            short = cdf(spec, hi) < u
            if not np.any(short):
                break
            hi = np.where(short, 2.0 * hi, hi)

    def residual(x, i):
        c = np.atleast_1d(cdf(spec, x))
        cc = np.atleast_1d(ccdf(spec, x))
        return np.where(lower[i], c - target[i], target[i] - cc)

    def slope(x, i):
        return np.atleast_1d(pdf(spec, x))

    x0 = np.clip(x0, 0.0, hi)
    return bracketed_newton(residual, slope, np.zeros_like(u), hi, x0, ftol=1e-12, fscale=target)


def quantile(spec: DistSpec, u):
    """Inverse CDF: ``x`` with ``|cdf(x) - u| <= 1e-10``."""
    u = np.asarray(u, dtype=float)
    if np.any(~((u >= 0) & (u <= 1))):
        raise DomainError("quantile needs 0 <= u <= 1")
    out = np.where(u >= 1.0, spec.upper, 0.0)
    inner = (u > 0) & (u < 1)
    if np.any(inner):
        ui = u[inner]
        lower = ui <= 0.5
        kind, args = _core(spec)
        if kind == "GB":
            xi = _gb_quantile(*args, ui)
        elif kind == "GB1":
            a, b1, p, q = args
            y = np.where(lower, inv_reg_inc_beta(np.where(lower, ui, 0.5), p, q),
                         1.0 - inv_reg_inc_beta(np.where(lower, 0.5, 1.0 - ui), q, p))
            xi = b1 * y ** (1.0 / a)
        elif kind == "GB2":
            a, b2, p, q = args
            F = inv_reg_inc_beta(np.where(lower, ui, 0.5), p, q)
            G = inv_reg_inc_beta(np.where(lower, 0.5, 1.0 - ui), q, p)
            with np.errstate(divide="ignore"):
                u2 = np.where(lower, F / (1.0 - F), (1.0 - G) / G)
            xi = b2 * u2 ** (1.0 / a)
        elif kind == "GGa":
            a, b, p = args
            v = np.where(lower, gammaincinv(p, ui), gammainccinv(p, 1.0 - ui))
            xi = b * v ** (1.0 / a)
        elif kind == "GIGa":
            a, b, q = args
            with np.errstate(divide="ignore"):
                v = np.where(lower, gammainccinv(q, ui), gammaincinv(q, 1.0 - ui))
                xi = b * v ** (-1.0 / a)
        else:
            a, b1, b2, p, q = args
            x0 = _gb_quantile(a, b1, b2, p, q + 1.0, ui)
            xi = _solve_quantile(spec, ui, x0)
        out = out.astype(float)
        out[inner] = xi
    return _finish(out)


def sample(spec: DistSpec, count: int, seed: int) -> np.ndarray:
    """Inverse-CDF draws, deterministic given ``seed``."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    u = np.random.default_rng(seed).random(count)
    return np.atleast_1d(quantile(spec, u))


# --------------------------------------------------------------------------
# hierarchy, tails

def hierarchy_limit(spec: DistSpec, target: str) -> DistSpec:
    """Parameters of the limiting member ``target`` reachable from ``spec``.

    Scale-to-infinity limits drop the diverging scale. Gamma-type limits
    (p or q to infinity) fold the diverging shape into the remaining scale:
    GB1 -> GGa uses ``beta = beta1 / q**(1/alpha)``, GB2 -> GGa
    ``beta = beta2 / q**(1/alpha)`` and GB2 -> GIGa ``beta = beta2 * p**(1/alpha)``.
    The alpha = 1 reductions require ``alpha == 1``.
    """
    f, a = spec.family, spec.a

    def unit_alpha(new_family, **kw):
        if not math.isclose(a, 1.0, rel_tol=0, abs_tol=1e-12):
            raise DomainError(f"{f} -> {new_family} needs alpha = 1, got {a}")
        return DistSpec(new_family, **kw)

    def gamma_limits(alpha, beta2, p, q):
        if target == "GIGa":
            return DistSpec("GIGa", alpha=alpha, beta=beta2 * p ** (1.0 / alpha), q=q)
        if target == "GGa":
            return DistSpec("GGa", alpha=alpha, beta=beta2 / q ** (1.0 / alpha), p=p)
        return None

    res = None
    if f == "GB":
        if target == "GB1":
            res = DistSpec("GB1", alpha=a, beta1=spec.beta1, p=spec.p, q=spec.q)
        elif target == "GB2":
            res = DistSpec("GB2", alpha=a, beta2=spec.beta2, p=spec.p, q=spec.q)
        elif target == "B":
            res = unit_alpha("B", beta1=spec.beta1, beta2=spec.beta2, p=spec.p, q=spec.q)
    elif f == "mGB":
        if target == "mGB2":
            res = DistSpec("mGB2", alpha=a, beta2=spec.beta2, p=spec.p, q=spec.q)
        elif target == "GB1":
            res = DistSpec("GB1", alpha=a, beta1=spec.beta1, p=spec.p, q=spec.q)
        elif target == "mB":
            res = unit_alpha("mB", beta1=spec.beta1, beta2=spec.beta2, p=spec.p, q=spec.q)
    elif f == "tildeMGB":
        if target == "mGB2":
            res = DistSpec("mGB2", alpha=a, beta2=spec.beta2, p=spec.p, q=spec.q)
        elif target == "GB1":
            res = DistSpec("GB1", alpha=a, beta1=spec.beta1, p=spec.p, q=spec.q - 1.0 / a + 1.0)
    elif f == "B":
        if target == "B2":
            res = DistSpec("B2", beta2=spec.beta2, p=spec.p, q=spec.q)
        elif target == "GB1":
            res = DistSpec("GB1", alpha=1.0, beta1=spec.beta1, p=spec.p, q=spec.q)
    elif f == "mB":
        if target == "mB2":
            res = DistSpec("mB2", beta2=spec.beta2, p=spec.p, q=spec.q)
        elif target == "GB1":
            res = DistSpec("GB1", alpha=1.0, beta1=spec.beta1, p=spec.p, q=spec.q)
    elif f == "GB1":
        if target == "GGa":
            res = DistSpec("GGa", alpha=a, beta=spec.beta1 / spec.q ** (1.0 / a), p=spec.p)
    elif f in ("GB2", "B2"):
        res = gamma_limits(a, spec.beta2, spec.p, spec.q)
        if target == "B2" and f == "GB2":
            res = unit_alpha("B2", beta2=spec.beta2, p=spec.p, q=spec.q)
    elif f in ("mGB2", "mB2"):
        res = gamma_limits(a, spec.beta2, spec.p, spec.q + 1.0)
        if target == "mB2" and f == "mGB2":
            res = unit_alpha("mB2", beta2=spec.beta2, p=spec.p, q=spec.q)
    if res is None:
        raise DomainError(f"{target} is not reachable from {f} in the hierarchy")
    return res


class TailExponents(NamedTuple):
    ccdf: float
    pdf: float


def tail_exponent(spec: DistSpec) -> TailExponents:
    """Mid-range log-log slopes of the ccdf and pdf for ``beta2 << x << beta1``.

    ``-alpha q`` for GB and GB2. The modified members carry an extra
    ``(1 + u2)^-1`` factor and give ``-alpha (q + 1)``.
    """
    f = spec.family
    if f in ("GB", "GB2"):
        slope = -spec.alpha * spec.q
    elif f in ("mGB", "tildeMGB", "mGB2"):
        slope = -spec.alpha * (spec.q + 1.0)
    else:
        raise DomainError(f"tail_exponent is defined for GB, GB2, mGB, mGB2 and tildeMGB, not {f}")
    if spec.family in BOUNDED and not spec.beta2 < spec.beta1 / 10.0:
        raise DomainError(
            f"power-law regime needs beta2 < beta1/10, got beta1={spec.beta1}, beta2={spec.beta2}"
        )
    return TailExponents(ccdf=slope, pdf=slope - 1.0)


def power_law_window(spec: DistSpec, margin: float = 5.0):
    """``[x_lo, x_hi]`` where ``(x/beta2)^a >= margin`` and ``(x/beta1)^a <= 1/margin``."""
    a = spec.alpha
    lo = spec.beta2 * margin ** (1.0 / a)
    hi = spec.beta1 * margin ** (-1.0 / a) if spec.family in BOUNDED else math.inf
    return lo, hi


def ccdf_near_beta1(spec: DistSpec, x, variant: str | None = None, window: float = 0.01):
    """Leading asymptote of ``1 - F`` as ``x -> beta1``.

    GB: ``z^q / (q B(p, q))`` with ``z = (1 - u1) / (1 + u2)``. mGB multiplies
    this by ``(1 + p/q) (beta2/beta1)^alpha``.
    """
    variant = variant or spec.family
    if variant not in ("GB", "mGB"):
        raise DomainError(f"variant must be 'GB' or 'mGB', got {variant!r}")
    if spec.family not in ("GB", "mGB"):
        raise DomainError(f"ccdf_near_beta1 needs a GB or mGB spec, got {spec.family}")
    x = _as_array(x)
    gap = 1.0 - x / spec.beta1
    if np.any((gap < 0) | (gap > window)):
        raise DomainError(f"x must lie within {window:g} (relative) below beta1={spec.beta1}")
    a, p, q = spec.alpha, spec.p, spec.q
    _, om1, u2 = _gb_terms(x, a, spec.beta1, spec.beta2)
    base = np.exp(xlogy(q, om1 / (1.0 + u2)) - math.log(q) - ln_beta(p, q))
    if variant == "mGB":
        base = base * (1.0 + p / q) * (spec.beta2 / spec.beta1) ** a
    return _finish(base)
