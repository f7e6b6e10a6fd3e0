"""Builders for test sequences and multipliers."""

import numpy as np

from ucfactor.core.models import MultiplierSpec, VectorSequence

SQRT2 = np.sqrt(2.0)


def basis(d, *indices):
    """Rows e_i of C^d for the given 0-based indices."""
    return np.eye(d, dtype=np.complex128)[list(indices)]


def random_vectors(rng, n, d, real=False):
    z = rng.standard_normal((n, d))
    if not real:
        z = z + 1j * rng.standard_normal((n, d))
    return z


def random_sequence(rng, n, d, real=False):
    return VectorSequence(random_vectors(rng, n, d, real=real))


def random_spec(rng, n, d):
    m = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return MultiplierSpec(m, random_vectors(rng, n, d), random_vectors(rng, n, d))
