import numpy as np
import pytest

from couette_euler.spectral import EtaGrid, PhysParams, SpectralField


@pytest.fixture
def params14():
    return PhysParams(gamma=1.4, mach=1.0)


@pytest.fixture
def grid_small():
    return EtaGrid(-10.0, 10.0, 81)


def constant_field(grid, values_by_k):
    """SpectralField with one constant row per k (test helper)."""
    ks = tuple(sorted(values_by_k))
    f = SpectralField.zeros(grid, ks)
    for k, v in values_by_k.items():
        f.amp[f.index_of(k)] = v
    return f


def random_hermitian_field(grid, ks_positive, rng, scale=1.0):
    """Random smooth Hermitian field supported on +/-k for k in ks_positive."""
    ks = tuple(sorted({k for kk in ks_positive for k in (kk, -kk)}))
    f = SpectralField.zeros(grid, ks)
    eta = grid.points
    for k in ks_positive:
        row = scale * (rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n))
        row *= np.exp(-0.25 * eta ** 2)
        f.amp[f.index_of(k)] = row
        f.amp[f.index_of(-k)] = np.conj(row[::-1])
    return f
