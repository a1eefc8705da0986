"""Mean-reverting SDEs whose stationary laws are members of the family.

Five models are provided:

``B2``
    ``dy = -gamma (y - theta) dt + sqrt(kappa^2 y + kappa2^2 y^2) dW``; stationary mB2.
``GB2``
    ``dx = -gamma (x - theta x^(1-a)) dt + sqrt(kappa^2 x^(2-a) + kappa2^2 x^2) dW``
    with the already-divided rates (``gamma``, ``kappa``, ``kappa2`` here are
    the primed quantities of the power-variable construction); stationary mGB2.
``mB``
    ``dx = -gamma (x - theta) dt + sqrt(x (1 - x/beta1) (1 + x/beta2)) dW``. The
    amplitude form with ``kappa``, ``kappa1``, ``kappa2`` is accepted and
    converted through ``beta_i = kappa^2 / kappa_i^2`` and ``gamma -> gamma / kappa^2``
    (a rescaling of time that leaves the stationary law unchanged).
``tildeMGB``
    ``dx = -gamma (x - theta x^(1-a)) dt + sqrt(x^(2-a) (1 - (x/beta1)^a) (1 + (x/beta2)^a)) dW``.
``B2B1mix``
    ``dx = -gamma (x - theta) dt + sqrt(kappa^2 x + (2c - 1) kappa_tilde^2 x^2) dW``,
    moving from a bounded B1-type law (``c < 1/2``) through a gamma law
    (``c = 1/2``) to a B2-type law (``c > 1/2``).
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .distributions import DistSpec
from .errors import DomainError

log = logging.getLogger(__name__)

MODEL_FIELDS = {
    "B2": ("kappa", "kappa2"),
    "GB2": ("kappa", "kappa2", "alpha"),
    "mB": ("kappa", "kappa1", "kappa2", "beta1", "beta2"),
    "tildeMGB": ("alpha", "beta1", "beta2"),
    "B2B1mix": ("kappa", "kappa_tilde", "c"),
}
MODELS = tuple(MODEL_FIELDS)
_OPTIONAL = ("kappa", "kappa1", "kappa2", "kappa_tilde", "alpha", "c", "beta1", "beta2")


@dataclass(frozen=True)
class SdeSpec:
    """Model tag with its physical parameters.

    Fields a model does not use are ignored and reported through
    :attr:`ignored` (and a log warning). For ``mB`` either ``beta1``/``beta2``
    (rescaled form; ``inf`` removes a factor) or ``kappa``/``kappa1``/``kappa2``
    (amplitude form) must be given.
    """

    model: str
    gamma: float
    theta: float
    kappa: float | None = None
    kappa1: float | None = None
    kappa2: float | None = None
    kappa_tilde: float | None = None
    alpha: float | None = None
    c: float | None = None
    beta1: float | None = None
    beta2: float | None = None

    def __post_init__(self):
        if self.model not in MODEL_FIELDS:
            raise DomainError(f"unknown SDE model {self.model!r}; expected one of {MODELS}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise DomainError(f"theta must be positive, got {self.theta}")
        for name in ("kappa", "kappa1", "kappa2", "kappa_tilde"):
            v = getattr(self, name)
            if v is not None and not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")
        if self.alpha is not None and not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.c is not None and not 0 <= self.c <= 1:
            raise DomainError(f"c must lie in [0, 1], got {self.c}")
        for name in ("beta1", "beta2"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise DomainError(f"{name} must be positive (inf allowed for mB), got {v}")

        used = MODEL_FIELDS[self.model]
        if self.model == "mB":
            kappa_form = self.kappa is not None
            scale_form = self.beta1 is not None or self.beta2 is not None
            if kappa_form == scale_form:
                raise DomainError("mB needs either beta1/beta2 or kappa/kappa1/kappa2, not both or neither")
            need = ("kappa", "kappa1", "kappa2") if kappa_form else ("beta1", "beta2")
            if kappa_form and not self.kappa > 0:
                raise DomainError("mB amplitude form needs kappa > 0")
        else:
            need = used
        for name in need:
            if getattr(self, name) is None:
                raise DomainError(f"{self.model} requires {name!r}")
        if self.model == "tildeMGB" and not (math.isfinite(self.beta1) and math.isfinite(self.beta2)):
            raise DomainError("tildeMGB needs finite beta1 and beta2")
        if self.ignored:
            log.warning("SdeSpec(%s): ignoring parameters %s", self.model, ", ".join(self.ignored))

    @property
    def ignored(self) -> tuple:
        used = MODEL_FIELDS[self.model]
        return tuple(n for n in _OPTIONAL if n not in used and getattr(self, n) is not None)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "SdeSpec":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise DomainError(f"unknown keys in SDE JSON: {sorted(extra)}")
        return cls(**{k: (float(v) if k != "model" else v) for k, v in data.items() if v is not None})

    @classmethod
    def from_json(cls, text: str) -> "SdeSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed SDE JSON: {exc}") from exc
        if not isinstance(data, dict) or "model" not in data:
            raise DomainError("SDE JSON must be an object with a 'model' key")
        return cls.from_dict(data)


def canonical(spec: SdeSpec) -> SdeSpec:
    """Rescaled form of an ``mB`` spec given through amplitudes; others unchanged."""
    if spec.model != "mB" or spec.kappa is None:
        return spec
    k2 = spec.kappa**2
    b1 = k2 / spec.kappa1**2 if spec.kappa1 > 0 else math.inf
    b2 = k2 / spec.kappa2**2 if spec.kappa2 > 0 else math.inf
    return SdeSpec("mB", gamma=spec.gamma / k2, theta=spec.theta, beta1=b1, beta2=b2)


def _mix_slope(spec):
    return (2.0 * spec.c - 1.0) * spec.kappa_tilde**2


def support(spec: SdeSpec):
    """Closed interval ``(0, upper)`` containing the stationary law."""
    spec = canonical(spec)
    if spec.model in ("mB", "tildeMGB"):
        return 0.0, spec.beta1
    if spec.model == "B2B1mix":
        s = _mix_slope(spec)
        return 0.0, spec.kappa**2 / -s if s < 0 else math.inf
    return 0.0, math.inf


def _coefficients(spec, x):
    """Drift and squared diffusion of the model as written, in the x variable."""
    g, th = spec.gamma, spec.theta
    m = spec.model
    if m == "B2":
        return -g * (x - th), spec.kappa**2 * x + spec.kappa2**2 * x**2
    if m == "GB2":
        a = spec.alpha
        with np.errstate(divide="ignore"):
            return -g * (x - th * x ** (1.0 - a)), spec.kappa**2 * x ** (2.0 - a) + spec.kappa2**2 * x**2
    if m == "mB":
        return -g * (x - th), x * (1.0 - x / spec.beta1) * (1.0 + x / spec.beta2)
    if m == "tildeMGB":
        a = spec.alpha
        with np.errstate(divide="ignore"):
            d2 = x ** (2.0 - a) * (1.0 - (x / spec.beta1) ** a) * (1.0 + (x / spec.beta2) ** a)
            return -g * (x - th * x ** (1.0 - a)), d2
    return -g * (x - th), spec.kappa**2 * x + _mix_slope(spec) * x**2


def drift_diffusion(spec: SdeSpec, x):
    """Drift ``mu(x)`` and diffusion amplitude ``sigma(x)`` of the model.

    The ``mB`` amplitude form is evaluated as written (its diffusion carries
    the overall ``kappa^2``); every other model uses its equation directly.
    """
    xa = np.asarray(x, dtype=float)
    lo, hi = support(spec)
    if np.any((xa < lo) | (xa > hi)):
        raise DomainError(f"x must lie in the support [{lo}, {hi}]")
    if spec.model == "mB" and spec.kappa is not None:
        k2 = spec.kappa**2
        mu = -spec.gamma * (xa - spec.theta)
        d2 = k2 * xa * (1.0 - spec.kappa1**2 / k2 * xa) * (1.0 + spec.kappa2**2 / k2 * xa)
    else:
        mu, d2 = _coefficients(spec, xa)
    sigma = np.sqrt(np.maximum(d2, 0.0))
    if np.ndim(mu) == 0:
        return float(mu), float(sigma)
    return mu, sigma


def noise_free(spec: SdeSpec) -> bool:
    """True when every diffusion amplitude of the model vanishes."""
    if spec.model in ("B2", "GB2"):
        return spec.kappa == 0 and spec.kappa2 == 0
    if spec.model == "B2B1mix":
        return spec.kappa == 0 and (spec.kappa_tilde == 0 or spec.c == 0.5)
    return False


def _need(cond, message):
    if not cond:
        raise DomainError(message)


def param_map(spec: SdeSpec) -> DistSpec:
    """Stationary law of the model as a :class:`DistSpec`.

    Maps, with ``g = gamma`` and ``t = theta``::

        B2        mB2(beta2 = k^2/k2^2, p = 2 g t / k^2, q = 2 g / k2^2)
                  k = 0  -> GIGa(1, 2 g t / k2^2, 1 + 2 g / k2^2)
                  k2 = 0 -> GGa(1, k^2 / (2 g), 2 g t / k^2)
        GB2       mGB2 with beta2^a = k^2/k2^2, a p = a - 1 + 2 g t / k^2,
                  a q = 1 - a + 2 g / k2^2
        mB        mB(beta1, beta2, p = 2 g t, q = 2 g (beta1 - t) / (1 + beta1/beta2))
        tildeMGB  a p = a - 1 + 2 g t,  a q = 1 - a + 2 g (b1 - t) / (1 + b1/b2),
                  with b_i = beta_i^a
        B2B1mix   s = (2c - 1) kt^2 selects mB2 (s > 0), GGa (s = 0) or GB1 (s < 0)

    The ``q`` of the GB2 model follows from the zero-flux Fokker-Planck
    solution (see the package tests); the constant is ``1 - a``.
    """
    spec = canonical(spec)
    g, t = spec.gamma, spec.theta
    m = spec.model
    if m == "B2":
        k, k2 = spec.kappa, spec.kappa2
        _need(k > 0 or k2 > 0, "B2 model with kappa = kappa2 = 0 has no noise and no stationary law")
        if k == 0:
            return DistSpec("GIGa", alpha=1.0, beta=2 * g * t / k2**2, q=1.0 + 2 * g / k2**2)
        if k2 == 0:
            return DistSpec("GGa", alpha=1.0, beta=k**2 / (2 * g), p=2 * g * t / k**2)
        return DistSpec("mB2", beta2=k**2 / k2**2, p=2 * g * t / k**2, q=2 * g / k2**2)
    if m == "GB2":
        a, k, k2 = spec.alpha, spec.kappa, spec.kappa2
        _need(k > 0 or k2 > 0, "GB2 model with kappa = kappa2 = 0 has no noise and no stationary law")
        if k > 0:
            ap = a - 1.0 + 2 * g * t / k**2
            _need(ap > 0, f"GB2 model needs alpha - 1 + 2 gamma theta / kappa^2 > 0, got {ap}")
        if k2 > 0:
            aq = 1.0 - a + 2 * g / k2**2
        if k == 0:
            aq = 1.0 + 2 * g / k2**2
            return DistSpec("GIGa", alpha=a, beta=(2 * g * t / (a * k2**2)) ** (1 / a), q=aq / a)
        if k2 == 0:
            return DistSpec("GGa", alpha=a, beta=(a * k**2 / (2 * g)) ** (1 / a), p=ap / a)
        _need(aq > 0, f"GB2 model needs 1 - alpha + 2 gamma / kappa2^2 > 0, got {aq}")
        return DistSpec("mGB2", alpha=a, beta2=(k**2 / k2**2) ** (1 / a), p=ap / a, q=aq / a)
    if m == "mB":
        b1, b2 = spec.beta1, spec.beta2
        p = 2 * g * t
        if math.isinf(b1):
            if math.isinf(b2):
                return DistSpec("GGa", alpha=1.0, beta=1.0 / (2 * g), p=p)
            return DistSpec("mB2", beta2=b2, p=p, q=2 * g * b2)
        _need(t < b1, f"mB needs theta < beta1 for q > 0, got theta={t}, beta1={b1}")
        if math.isinf(b2):
            return DistSpec("GB1", alpha=1.0, beta1=b1, p=p, q=2 * g * (b1 - t))
        return DistSpec("mB", beta1=b1, beta2=b2, p=p, q=2 * g * (b1 - t) / (1.0 + b1 / b2))
    if m == "tildeMGB":
        a = spec.alpha
        b1, b2 = spec.beta1**a, spec.beta2**a
        ap = a - 1.0 + 2 * g * t
        _need(ap > 0, f"tildeMGB needs alpha - 1 + 2 gamma theta > 0, got {ap}")
        _need(t < b1, f"tildeMGB needs theta < beta1^alpha, got theta={t}, beta1^alpha={b1}")
        aq = 1.0 - a + 2 * g * (b1 - t) / (1.0 + b1 / b2)
        _need(aq > 0, f"tildeMGB needs 1 - alpha + 2 gamma (b1 - theta)/(1 + b1/b2) > 0, got {aq}")
        return DistSpec("tildeMGB", alpha=a, beta1=spec.beta1, beta2=spec.beta2, p=ap / a, q=aq / a)
    k2 = spec.kappa**2
    _need(k2 > 0, "B2B1mix needs kappa > 0")
    s = _mix_slope(spec)
    p = 2 * g * t / k2
    if s > 0:
        return DistSpec("mB2", beta2=k2 / s, p=p, q=2 * g / s)
    if s == 0:
        return DistSpec("GGa", alpha=1.0, beta=k2 / (2 * g), p=p)
    b1 = k2 / -s
    _need(t < b1, f"B2B1mix with c < 1/2 needs theta < kappa^2 / |s| = {b1}, got theta={t}")
    return DistSpec("GB1", alpha=1.0, beta1=b1, p=p, q=2 * g * (b1 - t) / k2)


# --------------------------------------------------------------------------
# integration

@dataclass(frozen=True)
class IntegrationConfig:
    """Euler-Maruyama settings. ``None`` time settings default to multiples of ``1/gamma``.

    ``dt = 1e-3/gamma``, ``burn_in = 20/gamma`` and ``thin = 1/gamma``, with
    ``gamma`` taken from the canonical (rescaled) spec. Each of the ``paths``
    independent paths contributes ``samples_per_path`` thinned samples.
    ``variable='native'`` steps the x equation as written; ``'power'``
    integrates ``y = x^alpha`` with the Ito-transformed coefficients for the
    alpha models and maps back, which avoids the ``x^(1-alpha)`` drift
    singularity at the origin.
    """

    dt: float | None = None
    burn_in: float | None = None
    thin: float | None = None
    paths: int = 1000
    samples_per_path: int = 100
    seed: int = 0
    boundary_policy: str = "reflect"
    variable: str = "native"
    x0: float | None = None
    block_steps: int = 2048

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.burn_in is not None and not self.burn_in >= 0:
            raise DomainError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.thin is not None and not self.thin > 0:
            raise DomainError(f"thin must be positive, got {self.thin}")
        if self.paths < 1 or self.samples_per_path < 1:
            raise DomainError("paths and samples_per_path must be >= 1")
        if self.boundary_policy not in ("reflect", "clamp"):
            raise DomainError(f"boundary_policy must be 'reflect' or 'clamp', got {self.boundary_policy!r}")
        if self.variable not in ("power", "native"):
            raise DomainError(f"variable must be 'power' or 'native', got {self.variable!r}")

    def resolved(self, gamma: float) -> "IntegrationConfig":
        return replace(
            self,
            dt=self.dt if self.dt is not None else 1e-3 / gamma,
            burn_in=self.burn_in if self.burn_in is not None else 20.0 / gamma,
            thin=self.thin if self.thin is not None else 1.0 / gamma,
        )


@dataclass
class Ensemble:
    """Thinned stationary samples with their provenance."""

    samples: np.ndarray
    effective_count: int
    spec: SdeSpec
    config: IntegrationConfig
    steps_per_path: int
    boundary_events: int = 0
    target: DistSpec | None = field(default=None)

    @property
    def boundary_events_per_million_steps(self) -> float:
        return 1e6 * self.boundary_events / (self.steps_per_path * self.config.paths)


def _power_coefficients(spec, y):
    """Ito-transformed drift and squared diffusion of ``y = x^alpha``."""
    a, g, t = spec.alpha, spec.gamma, spec.theta
    if spec.model == "GB2":
        k2, kk2 = spec.kappa**2, spec.kappa2**2
        drift = -a * g * (y - t) + 0.5 * a * (a - 1.0) * (k2 + kk2 * y)
        return drift, a * a * (k2 * y + kk2 * y * y)
    b1, b2 = spec.beta1**a, spec.beta2**a
    shape = (1.0 - y / b1) * (1.0 + y / b2)
    return -a * g * (y - t) + 0.5 * a * (a - 1.0) * shape, a * a * y * shape


def _path_generators(seed, paths):
    root = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(np.random.SeedSequence(root.entropy, spawn_key=(i,))))
            for i in range(paths)]


def integrate(spec: SdeSpec, config: IntegrationConfig = IntegrationConfig()) -> Ensemble:
    """Euler-Maruyama ensemble of stationary samples.

    Every path starts at ``x0`` (default ``theta``, or ``theta^(1/alpha)``
    for the alpha models, moved inside the support), runs ``burn_in`` time
    units, then records one sample every ``thin`` time units. Each path draws
    its normals from its own Philox stream keyed by ``(seed, path index)``,
    so results do not depend on how paths are scheduled. Steps leaving the
    support are reflected (``|x|`` at 0, ``2 beta1 - x`` at ``beta1``) or
    clamped; either counts as a boundary event. With every amplitude zero the
    paths relax deterministically towards the reversion level and
    ``Ensemble.target`` is ``None``.
    """
    # refuses specs without a normalizable stationary law; a noise-free model
    # is a deterministic relaxation and has no target law
    target = None if noise_free(spec) else param_map(spec)
    cspec = canonical(spec)
    cfg = config.resolved(cspec.gamma)
    lo, hi = support(cspec)

    power = cfg.variable == "power" and cspec.model in ("GB2", "tildeMGB")
    a = cspec.alpha if power else 1.0
    # native alpha models with alpha > 1 have a drift singular at 0
    lo_w = np.finfo(float).tiny if cspec.model in ("GB2", "tildeMGB") and not power and cspec.alpha > 1 else 0.0
    if power:
        hi_w = hi**a
        coeff = lambda z: _power_coefficients(cspec, z)  # noqa: E731
    else:
        hi_w = hi
        coeff = lambda z: _coefficients(cspec, z)  # noqa: E731

    if cfg.x0 is not None:
        x0 = cfg.x0
    elif cspec.model in ("GB2", "tildeMGB"):
        x0 = cspec.theta ** (1.0 / cspec.alpha)
    else:
        x0 = cspec.theta
    if math.isfinite(hi):
        x0 = min(x0, 0.999 * hi)
    w = np.full(cfg.paths, x0**a if power else x0, dtype=float)

    dt = cfg.dt
    sqdt = math.sqrt(dt)
    burn_steps = int(round(cfg.burn_in / dt))
    thin_steps = max(1, int(round(cfg.thin / dt)))
    total = burn_steps + thin_steps * cfg.samples_per_path
    record_at = burn_steps + thin_steps * np.arange(1, cfg.samples_per_path + 1)

    gens = _path_generators(cfg.seed, cfg.paths)
    out = np.empty((cfg.samples_per_path, cfg.paths))
    events = 0
    step = 0
    next_record = 0
    while step < total:
        block = min(cfg.block_steps, total - step)
        noise = np.stack([gen.standard_normal(block) for gen in gens], axis=1)
        for j in range(block):
            mu, d2 = coeff(w)
            w = w + mu * dt + np.sqrt(np.maximum(d2, 0.0)) * sqdt * noise[j]
            low = w < 0.0
            high = w > hi_w
            if low.any() or high.any():
                events += int(low.sum() + high.sum())
                if cfg.boundary_policy == "reflect":
                    w = np.where(low, -w, w)
                    w = np.where(w > hi_w, 2.0 * hi_w - w, w)
                w = np.clip(w, lo_w, hi_w)
            step += 1
            if next_record < len(record_at) and step == record_at[next_record]:
                out[next_record] = w
                next_record += 1
        if not np.all(np.isfinite(w)):
            raise DomainError("integration produced non-finite values; reduce dt")

    samples = out.T.reshape(-1)
    if power:
        samples = samples ** (1.0 / a)
    return Ensemble(samples=samples, effective_count=samples.size, spec=spec, config=cfg,
                    steps_per_path=total, boundary_events=events, target=target)


@dataclass(frozen=True)
class SweepPoint:
    spec: SdeSpec
    target: DistSpec
    ks: float


_KNOBS = {"kappa1", "kappa2", "kappa", "c"}


def hierarchy_sweep(base: SdeSpec, knob: str, values=None,
                    config: IntegrationConfig = IntegrationConfig()) -> list:
    """Integrate ``base`` with ``knob`` set to each of ``values`` and compare.

    Amplitude knobs default to ``(0.0,)`` (the limit itself), ``c`` to
    ``(0, 0.5, 1)``. Each point reports the KS distance between its ensemble
    and the stationary member predicted by :func:`param_map`.
    """
    from .fit import ks_statistic

    if knob not in _KNOBS:
        raise DomainError(f"knob must be one of {sorted(_KNOBS)}, got {knob!r}")
    if knob not in MODEL_FIELDS[base.model]:
        raise DomainError(f"{base.model} has no parameter {knob!r}")
    if base.model == "mB" and base.kappa is None:
        raise DomainError("amplitude sweeps on mB need the kappa form")
    if values is None:
        values = (0.0, 0.5, 1.0) if knob == "c" else (0.0,)
    points = []
    for v in values:
        spec = replace(base, **{knob: float(v)})
        ens = integrate(spec, config)
        ks = ks_statistic(np.sort(ens.samples), ens.target)
        points.append(SweepPoint(spec=spec, target=ens.target, ks=ks))
    return points


def export(ensemble: Ensemble, prefix) -> tuple:
    """Write ``<prefix>.txt`` (one sample per line) and ``<prefix>.json`` (provenance)."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    txt = prefix.with_suffix(".txt")
    meta = prefix.with_suffix(".json")
    np.savetxt(txt, ensemble.samples, fmt="%.17g")
    sidecar = {
        "spec": ensemble.spec.to_dict(),
        "config": asdict(ensemble.config),
        "seed": ensemble.config.seed,
        "effective_count": ensemble.effective_count,
        "target": ensemble.target.to_dict() if ensemble.target is not None else None,
        "boundary_events": ensemble.boundary_events,
    }
    meta.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return txt, meta
