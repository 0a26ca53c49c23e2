import numpy as np
import pytest

from dmnll import AlphaParams, CountVector


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)


def random_alpha(rng, k, lo=0.01, hi=100.0) -> AlphaParams:
    """Log-uniform concentration parameters in [lo, hi]."""
    return AlphaParams(np.exp(rng.uniform(np.log(lo), np.log(hi), size=k)))


def random_counts(rng, k, n_max, allow_empty=True) -> CountVector:
    """Counts drawn multinomially at a log-uniform total <= n_max."""
    if allow_empty and rng.uniform() < 0.02:
        return CountVector([0] * k)
    total = int(np.exp(rng.uniform(0.0, np.log(n_max))))
    p = rng.dirichlet(np.ones(k))
    return CountVector(rng.multinomial(total, p).tolist())
