import numpy as np
import pytest

from rzqlab.spectral import Grid, PeriodicField, random_field, sobolev_norm


@pytest.fixture
def grid128():
    return Grid(128)


@pytest.fixture
def grid256():
    return Grid(256)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_corpus(grid, s, count, seed, band_limit=None, amp=None):
    """Seeded list of random H^s-type fields, optionally normalized."""
    gen = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        f = random_field(grid, s, gen, band_limit=band_limit)
        if amp is not None:
            norm = sobolev_norm(f, s)
            f = PeriodicField(grid, amp * f.values / norm)
        out.append(f)
    return out
