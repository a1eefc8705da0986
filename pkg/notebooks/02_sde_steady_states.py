# %% [markdown]
# # Steady states of the mean-reverting models
#
# Each model is integrated with Euler-Maruyama over independent paths and the
# pooled, thinned samples are compared with the stationary member that the
# parameter map predicts. Samples one relaxation time apart are still
# mildly correlated, and every model reuses the same per-path noise for a
# given seed, so at this small size the KS threshold is only a guide.

# %%
from __future__ import annotations

import numpy as np

from genbeta.fit import ks_statistic, ks_threshold
from genbeta.sde import IntegrationConfig, SdeSpec, hierarchy_sweep, integrate, param_map

config = IntegrationConfig(paths=200, samples_per_path=50, seed=3)
models = [
    SdeSpec("B2", gamma=1, theta=1, kappa=1, kappa2=1),
    SdeSpec("GB2", gamma=1.2, theta=1.5, kappa=0.7, kappa2=0.6, alpha=1.7),
    SdeSpec("mB", gamma=2, theta=0.5, beta1=1, beta2=1),
    SdeSpec("tildeMGB", gamma=2, theta=0.6, alpha=1.5, beta1=1.4, beta2=0.7),
]

# %% one ensemble per model
threshold = ks_threshold(config.paths * config.samples_per_path)
for spec in models:
    ens = integrate(spec, config)
    ks = ks_statistic(np.sort(ens.samples), ens.target)
    print(f"{spec.model:9s} -> {param_map(spec).family:9s} KS {ks:.4f} (threshold {threshold:.4f}), "
          f"{ens.boundary_events_per_million_steps:.1f} boundary events per 1e6 steps")

# %% switching noise sources off walks down the hierarchy
base = SdeSpec("mB", gamma=2, theta=0.5, kappa=1.0, kappa1=1.0, kappa2=1.0)
for knob in ("kappa1", "kappa2"):
    (point,) = hierarchy_sweep(base, knob, config=config)
    print(f"mB with {knob}=0 -> {point.target.family}, KS {point.ks:.4f}")

mix = SdeSpec("B2B1mix", gamma=1, theta=0.5, kappa=1, kappa_tilde=0.8, c=0.3)
for point in hierarchy_sweep(mix, "c", config=config):
    print(f"B2B1mix c={point.spec.c:g} -> {point.target.family}, KS {point.ks:.4f}")
