import numpy as np
import pytest

from couplekit import SeqVec, StepFunction, Window


def random_step(rng, n_pieces=None, domain="unit", vmax=3.0):
    """Seeded nonnegative step function with irregular breakpoints."""
    if n_pieces is None:
        n_pieces = int(rng.integers(4, 14))
    top = 1.0 if domain == "unit" else float(rng.uniform(0.5, 20.0))
    cuts = np.sort(rng.uniform(0.0, top, size=n_pieces - 1))
    bp = np.concatenate([[0.0], cuts, [top]])
    bp = np.unique(bp)
    vals = rng.uniform(0.0, vmax, size=bp.size - 1)
    return StepFunction(domain, tuple(bp), tuple(vals))


def random_seqvec(rng, window: Window, k=None, scale_sigma=2.0):
    if k is None:
        k = int(rng.integers(2, max(3, window.size // 3)))
    vals = np.zeros(window.size)
    idx = rng.choice(window.size, size=min(k, window.size), replace=False)
    vals[idx] = np.exp(rng.normal(0.0, scale_sigma, size=idx.size))
    return SeqVec(window, vals)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
