"""Parameter estimation, Kolmogorov-Smirnov goodness of fit and bootstrap bands.

Parameters are optimized in an unconstrained space: logarithms of every
positive parameter, except the upper bound ``beta1`` which is written as
``max(samples) * (1 + softplus(s))`` so the likelihood never sees a sample
outside the support.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from . import distributions as dist
from .distributions import FAMILY_FIELDS, DistSpec
from .errors import DomainError, NumericError

log = logging.getLogger(__name__)

# Massey's asymptotic coefficients c(alpha) for the two-sided one-sample test
_MASSEY = {0.20: 1.073, 0.15: 1.138, 0.10: 1.224, 0.05: 1.358, 0.01: 1.628}


@dataclass
class FitResult:
    spec: DistSpec
    ks: float
    ks_threshold: float
    neg_log_likelihood: float
    converged: bool
    iterations: int

    def to_dict(self) -> dict:
        return {
            "family": self.spec.family,
            "params": self.spec.params(),
            "ks": self.ks,
            "ks_threshold": self.ks_threshold,
            "nll": self.neg_log_likelihood,
            "converged": self.converged,
            "iterations": self.iterations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "FitResult":
        spec = DistSpec(data["family"], **data["params"])
        return cls(spec, data["ks"], data["ks_threshold"], data["nll"], data["converged"], data["iterations"])


@dataclass
class CiBand:
    grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    dropped: int = 0
    replicas: int = 0

    def to_tsv(self) -> str:
        rows = ["x\tlower\tupper"]
        rows += [f"{x:.10g}\t{lo:.10g}\t{hi:.10g}" for x, lo, hi in zip(self.grid, self.lower, self.upper)]
        return "\n".join(rows) + "\n"


def ks_statistic(samples, spec: DistSpec) -> float:
    """Two-sided KS distance between the empirical CDF of ``samples`` and ``spec``.

    Evaluated at both edges of every step; the input is sorted internally, so
    the result does not depend on sample order.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise DomainError("ks_statistic needs at least one sample")
    F = np.asarray(dist.cdf(spec, x))
    d_plus = np.max(np.arange(1, n + 1) / n - F)
    d_minus = np.max(F - np.arange(n) / n)
    return float(max(d_plus, d_minus))


def ks_threshold(n: int, alpha_level: float = 0.05) -> float:
    """Asymptotic critical value ``c(alpha)/sqrt(n)``.

    Tabulated coefficients are used for the usual levels, otherwise
    ``sqrt(-ln(alpha/2)/2)``.
    """
    if n < 35:
        raise DomainError(f"asymptotic KS threshold needs n >= 35, got {n}")
    if not 0 < alpha_level < 1:
        raise DomainError(f"alpha_level must lie in (0, 1), got {alpha_level}")
    c = next((v for k, v in _MASSEY.items() if math.isclose(k, alpha_level)), None)
    if c is None:
        c = math.sqrt(-math.log(alpha_level / 2.0) / 2.0)
    return c / math.sqrt(n)


# --------------------------------------------------------------------------
# parameter transforms

def _softplus(s):
    return s + math.log1p(math.exp(-s)) if s > 0 else math.log1p(math.exp(s))


def _inv_softplus(v):
    return v + math.log(-math.expm1(-v))


class _Transform:
    """Map between a family's parameters and an unconstrained vector."""

    def __init__(self, family, xmax):
        self.family = family
        self.names = FAMILY_FIELDS[family]
        self.xmax = xmax

    def to_vector(self, spec: DistSpec) -> np.ndarray:
        out = []
        for name in self.names:
            v = getattr(spec, name)
            if name == "beta1":
                slack = max(v / self.xmax - 1.0, 1e-12)
                out.append(_inv_softplus(slack))
            else:
                out.append(math.log(v))
        return np.array(out)

    def to_spec(self, vec) -> DistSpec:
        kw = {}
        for name, v in zip(self.names, vec):
            if name == "beta1":
                kw[name] = self.xmax * (1.0 + _softplus(v))
            else:
                kw[name] = math.exp(v)
        return DistSpec(self.family, **kw)


def default_init(samples, family: str) -> DistSpec:
    """Starting point ``alpha=2, p=q=1, beta2=median, beta1=1.5 max``."""
    x = np.asarray(samples, dtype=float)
    med = float(np.median(x))
    table = {"alpha": 2.0, "beta1": 1.5 * float(np.max(x)), "beta2": med, "beta": med, "p": 1.0, "q": 1.0}
    spec = DistSpec(family, **{k: table[k] for k in FAMILY_FIELDS[family]})
    if family == "tildeMGB" and not spec.q > 1.0 / spec.alpha - 1.0:
        spec = spec.replace(q=1.0 / spec.alpha)
    return spec


def _validate_samples(samples, family):
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size < 2 or x[0] == x[-1]:
        raise DomainError("fitting needs at least two distinct samples")
    if np.any(~np.isfinite(x)) or x[0] <= 0:
        raise DomainError("samples must be finite and strictly positive")
    if family not in FAMILY_FIELDS:
        raise DomainError(f"unknown family {family!r}")
    return x


# --------------------------------------------------------------------------
# optimizer

def _numeric_grad(f, v, step):
    g = np.empty_like(v)
    for i in range(v.size):
        e = np.zeros_like(v)
        e[i] = step
        g[i] = (f(v + e) - f(v - e)) / (2.0 * step)
    return g


def _numeric_hessian(f, v, step):
    n = v.size
    H = np.empty((n, n))
    f0 = f(v)
    E = np.eye(n) * step
    for i in range(n):
        H[i, i] = (f(v + E[i]) - 2.0 * f0 + f(v - E[i])) / step**2
        for j in range(i):
            H[i, j] = H[j, i] = (f(v + E[i] + E[j]) - f(v + E[i] - E[j]) - f(v - E[i] + E[j])
                                 + f(v - E[i] - E[j])) / (4.0 * step**2)
    return H


def _newton_inverse(f, v, step):
    """Inverse of a finite-difference Hessian, or ``None`` unless positive definite."""
    H = _numeric_hessian(f, v, step)
    if not np.all(np.isfinite(H)):
        return None
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        return None
    Linv = np.linalg.inv(L)
    return Linv.T @ Linv


def _minimize(f, v0, *, step=1e-5, gtol=1e-6, ftol=1e-10, max_iter=500, hess_step=1e-3):
    """Quasi-Newton (BFGS) descent with Armijo backtracking and numeric gradients.

    Returns ``(v, f(v), converged, iterations)``. Stops when the gradient norm
    drops below ``gtol`` or when an undamped step changes ``f`` by less than
    ``ftol`` relative even after the inverse Hessian has been reset from finite
    differences. Every accepted step lowers ``f``, so the result is never
    worse than the start.
    """
    v = np.asarray(v0, dtype=float)
    fv = f(v)
    if not math.isfinite(fv):
        raise NumericError("objective is not finite at the starting point")
    g = _numeric_grad(f, v, step)
    H = np.eye(v.size)
    refreshed = False
    for it in range(1, max_iter + 1):
        if np.linalg.norm(g) < gtol:
            return v, fv, True, it - 1
        d = -H @ g
        if g @ d >= 0:
            H = np.eye(v.size)
            d = -g
        t = 1.0
        # cap the first trial so a single step moves no coordinate by more than 2 in log space
        t = min(t, 2.0 / max(np.max(np.abs(d)), 1e-300))
        accepted = False
        for _ in range(60):
            cand = v + t * d
            fc = f(cand)
            if math.isfinite(fc) and fc <= fv + 1e-4 * t * (g @ d):
                # a point whose difference stencil leaves the domain is no use either
                g_new = _numeric_grad(f, cand, step)
                if np.all(np.isfinite(g_new)):
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            return v, fv, False, it
        s, yv = cand - v, g_new - g
        rel_change = abs(fv - fc) / max(abs(fv), 1e-300)
        full_step = t == min(1.0, 2.0 / max(np.max(np.abs(d)), 1e-300))
        v, fv, g = cand, fc, g_new
        # Likelihood valleys are very flat along beta1, where the quasi-Newton
        # matrix badly underestimates the step. A small full step therefore
        # triggers a refresh from the finite-difference Hessian, and only a
        # small step taken right after a refresh counts as convergence.
        if rel_change < ftol and full_step:
            if refreshed:
                return v, fv, True, it
            fresh = _newton_inverse(f, v, hess_step)
            if fresh is None:
                return v, fv, True, it
            H, refreshed = fresh, True
            continue
        refreshed = False
        sy = s @ yv
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(yv):
            rho = 1.0 / sy
            I = np.eye(v.size)
            H = (I - rho * np.outer(s, yv)) @ H @ (I - rho * np.outer(yv, s)) + rho * np.outer(s, s)
    return v, fv, False, max_iter


def _mean_nll(spec, x):
    lp = np.asarray(dist.logpdf(spec, x))
    if not np.all(np.isfinite(lp)):
        return math.inf
    return -float(np.mean(lp))


def _finish(x, spec, converged, iterations, alpha_level):
    nll = _mean_nll(spec, x) * x.size
    thr = ks_threshold(x.size, alpha_level) if x.size >= 35 else math.nan
    if not converged:
        log.warning("fit of %s did not converge after %d iterations", spec.family, iterations)
    return FitResult(spec=spec, ks=ks_statistic(x, spec), ks_threshold=thr,
                     neg_log_likelihood=nll, converged=converged, iterations=iterations)


def _nll_objective(x, tr):
    def f(v):
        try:
            spec = tr.to_spec(v)
        except DomainError:
            return math.inf
        return _mean_nll(spec, x)
    return f


def _prepare(samples, family, init):
    x = _validate_samples(samples, family)
    init = init if init is not None else default_init(x, family)
    if init.family != family:
        raise DomainError(f"init family {init.family} does not match {family}")
    if math.isfinite(init.upper) and init.upper <= x[-1]:
        init = init.replace(beta1=1.5 * float(x[-1]))
    return x, init, _Transform(family, float(x[-1]))


def _fit_nll(samples, family, init, alpha_level, max_iter):
    x, init, tr = _prepare(samples, family, init)
    v, _, ok, it = _minimize(_nll_objective(x, tr), tr.to_vector(init), max_iter=max_iter)
    return _finish(x, tr.to_spec(v), ok, it, alpha_level)


def _fit_cdf(samples, family, init, alpha_level, max_iter, gtol=1e-6, ftol=1e-10):
    x, init, tr = _prepare(samples, family, init)
    ecdf = (np.arange(1, x.size + 1) - 0.5) / x.size

    def residual(v):
        try:
            spec = tr.to_spec(v)
        except DomainError:
            return np.ones_like(x)
        return np.asarray(dist.cdf(spec, x)) - ecdf

    # unit scaling keeps the iteration path identical when the sample is duplicated
    out = least_squares(residual, tr.to_vector(init), method="trf", diff_step=1e-5, x_scale=1.0,
                        ftol=ftol, xtol=1e-15, gtol=1e-15, max_nfev=max_iter)
    grad_norm = float(np.linalg.norm(2.0 * out.jac.T @ out.fun))
    ok = out.status in (2, 4) or grad_norm < gtol
    return _finish(x, tr.to_spec(out.x), ok, int(out.nfev), alpha_level)


def fit_mle(samples, family: str, init: DistSpec | None = None, *, alpha_level: float = 0.05,
            max_iter: int = 500) -> FitResult:
    """Maximum-likelihood fit by quasi-Newton descent on the mean log-likelihood.

    Convergence means a gradient norm below 1e-6 or a relative change of the
    objective below 1e-10. Non-convergence is reported through
    ``FitResult.converged`` rather than raised.
    """
    return _fit_nll(samples, family, init, alpha_level, max_iter)


def fit_cdf_lsq(samples, family: str, init: DistSpec | None = None, *, alpha_level: float = 0.05,
                max_iter: int = 500) -> FitResult:
    """Least-squares fit of the model CDF to the empirical CDF ``(i - 1/2)/n``.

    The objective is the plain sum of squares over the sorted sample (the
    Cramér-von Mises statistic up to a constant). It is minimized with
    scipy's trust-region least-squares solver on a finite-difference
    Jacobian; ``max_iter`` caps residual evaluations. Convergence means a
    relative objective reduction below 1e-10 or a gradient norm below 1e-6.
    ``iterations`` reports residual evaluations.
    """
    return _fit_cdf(samples, family, init, alpha_level, max_iter)


def bootstrap_ci(spec: DistSpec, n: int, replicas: int, level: float, grid, *, seed: int = 0,
                 method: str = "mle", max_iter: int = 200) -> CiBand:
    """Parametric bootstrap band for the ccdf of ``spec``.

    Draws ``replicas`` samples of size ``n`` from ``spec``, refits each
    (warm-started at ``spec``), and returns pointwise quantile envelopes of
    the refitted ccdfs. Non-converged replicas are dropped; more than 20%
    dropped raises :class:`NumericError`.
    """
    if replicas < 100:
        raise DomainError(f"bootstrap needs replicas >= 100, got {replicas}")
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    grid = np.asarray(grid, dtype=float)
    fitter = fit_mle if method == "mle" else fit_cdf_lsq
    seeds = np.random.SeedSequence(seed).spawn(replicas)
    curves = []
    dropped = 0
    for ss in seeds:
        draw = dist.sample(spec, n, int(ss.generate_state(1)[0]))
        try:
            res = fitter(draw, spec.family, init=spec, max_iter=max_iter)
        except (DomainError, NumericError):
            dropped += 1
            continue
        if not res.converged:
            dropped += 1
            continue
        curves.append(np.asarray(dist.ccdf(res.spec, grid)))
    if dropped > 0.2 * replicas:
        raise NumericError(f"{dropped} of {replicas} bootstrap fits failed")
    curves = np.array(curves)
    tail = (1.0 - level) / 2.0
    lower = np.quantile(curves, tail, axis=0)
    upper = np.quantile(curves, 1.0 - tail, axis=0)
    return CiBand(grid=grid, lower=np.clip(lower, 0, 1), upper=np.clip(upper, 0, 1), level=level,
                  dropped=dropped, replicas=replicas)
