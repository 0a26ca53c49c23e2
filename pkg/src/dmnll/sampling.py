"""Synthetic count data for fitting tests: compound Dirichlet-multinomial draws."""

from __future__ import annotations

import os

import numpy as np

from .core import AlphaLike, _as_alpha, _as_simplex
from .estimate import Dataset

__all__ = ["resolve_seed", "sample_dmn_dataset", "sample_mn_dataset"]

_SEED_ENV = "DMN_SEED"


def resolve_seed(seed: int | None) -> int | None:
    """Explicit seed wins; otherwise the DMN_SEED environment variable, if set."""
    if seed is not None:
        return seed
    env = os.environ.get(_SEED_ENV)
    return int(env) if env else None


def sample_dmn_dataset(
    alpha: AlphaLike, n_trials: int, n_obs: int, seed: int | None = None
) -> Dataset:
    """Draw n_obs observations: p ~ Dirichlet(alpha), then counts ~ MN(n_trials, p)."""
    alpha = _as_alpha(alpha)
    rng = np.random.default_rng(resolve_seed(seed))
    probs = rng.dirichlet(alpha.alpha, size=n_obs)
    counts = rng.multinomial(n_trials, probs)
    return Dataset(row for row in counts.tolist())


def sample_mn_dataset(
    p, n_trials: int, n_obs: int, seed: int | None = None
) -> Dataset:
    """Draw n_obs plain multinomial observations (the phi = 0 regime)."""
    probs = _as_simplex(p)
    rng = np.random.default_rng(resolve_seed(seed))
    counts = rng.multinomial(n_trials, np.tile(probs, (n_obs, 1)))
    return Dataset(row for row in counts.tolist())
