"""Inner-product space primitives.

Conventions: ``inner(f, g) = sum_i f_i * conj(g_i)`` (linear in the first
slot). A sequence with vectors Phi_1..Phi_N stored as rows of V has synthesis
matrix V^T (d x N) and Gram matrix G_jk = inner(Phi_k, Phi_j).
"""

import logging
from typing import Any, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from .enumeration import SignSearchResult, check_cap, enumerate_max, sample_max
from .models import HVector, VectorSequence, as_hvector, as_matrix, check_same_dim
from .errors import DimensionMismatchError
from .settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)

SequenceLike = Union[VectorSequence, Any]


def as_sequence(seq: SequenceLike) -> VectorSequence:
    """Accept a VectorSequence or anything convertible to an (N, d) array."""
    return seq if isinstance(seq, VectorSequence) else VectorSequence(seq)


def inner(f: Any, g: Any) -> complex:
    f = as_hvector(f, "f")
    g = as_hvector(g, "g")
    check_same_dim(f, g)
    return complex(np.vdot(g, f))


def synthesis_matrix(seq: SequenceLike) -> np.ndarray:
    """d x N matrix whose column n is Phi_n."""
    return as_sequence(seq).vectors.T.copy()


def analysis_coefficients(seq: SequenceLike, f: Any) -> np.ndarray:
    """(inner(f, Phi_n))_n, the analysis operator applied to f."""
    seq = as_sequence(seq)
    f = as_hvector(f, "f")
    if f.shape[0] != seq.dim:
        raise DimensionMismatchError(f"vector of dimension {f.shape[0]} against sequence of dimension {seq.dim}")
    return seq.vectors.conj() @ f


def gram(seq: SequenceLike) -> np.ndarray:
    """N x N Gram matrix, Hermitian by construction."""
    V = as_sequence(seq).vectors
    G = V.conj() @ V.T
    return (G + G.conj().T) / 2


def frame_operator(seq: SequenceLike) -> np.ndarray:
    """d x d matrix sum_n Phi_n Phi_n^H."""
    V = as_sequence(seq).vectors
    S = V.T @ V.conj()
    return (S + S.conj().T) / 2


def spectral_norm(M: Any) -> float:
    """Largest singular value."""
    M = as_matrix(M, "matrix")
    return float(scipy.linalg.svdvals(M)[0])


def top_eigenpair(M: Any) -> Tuple[float, np.ndarray]:
    """Largest eigenvalue of a Hermitian matrix with a unit eigenvector."""
    M = as_matrix(M, "matrix")
    n = M.shape[0]
    w, U = scipy.linalg.eigh((M + M.conj().T) / 2, subset_by_index=[n - 1, n - 1])
    return float(w[0]), U[:, 0]


def bessel_bound(seq: SequenceLike) -> float:
    """Optimal Bessel bound, the top eigenvalue of the frame operator (equivalently of the Gram matrix)."""
    S = frame_operator(seq)
    return max(0.0, float(scipy.linalg.eigvalsh(S)[-1]))


def orlicz_sum(seq: SequenceLike) -> float:
    """sum_n ||Phi_n||^2."""
    V = as_sequence(seq).vectors
    return float(np.sum(V.real**2 + V.imag**2))


def weak_l1_sum(seq: SequenceLike, g: Any) -> float:
    """sum_n |<Phi_n, g>|."""
    return float(np.sum(np.abs(analysis_coefficients(seq, g))))


def _greedy_signs(V: np.ndarray) -> np.ndarray:
    # each new sign makes its cross terms with the partial sum nonnegative
    signs = np.ones(V.shape[0])
    partial = V[0].copy()
    for k in range(1, V.shape[0]):
        if np.real(np.vdot(partial, V[k])) < 0:
            signs[k] = -1.0
        partial += signs[k] * V[k]
    return signs


def c0_operator_norm_witness(
    seq: SequenceLike,
    mode: str = DEFAULT_SETTINGS["mode"],
    trials: int = DEFAULT_SETTINGS["trials"],
    seed: Optional[int] = DEFAULT_SETTINGS["seed"],
    max_enum: int = DEFAULT_SETTINGS["c0_max_enum"],
    parallel: int = DEFAULT_SETTINGS["parallel"],
    chunk_size: int = DEFAULT_SETTINGS["chunk_size"],
) -> SignSearchResult:
    """max over real sign patterns of ||sum_n eps_n Phi_n||, with the maximizing pattern.

    Zero vectors do not affect any pattern's value and are left out of the
    search; their signs are reported as +1. The cap applies to the nonzero
    vectors. In sampled mode the all-plus pattern and a greedy pattern are
    always evaluated first, so the result is at least sqrt(sum ||Phi_n||^2).
    """
    seq = as_sequence(seq)
    active = np.flatnonzero(np.any(seq.vectors != 0, axis=1))
    signs = np.ones(seq.length)
    if active.size == 0:
        return SignSearchResult(value=0.0, signs=signs, evaluated=1)
    V = seq.vectors[active]

    def evaluate(block: np.ndarray) -> np.ndarray:
        return np.linalg.norm(block @ V, axis=1)

    if mode == "exact":
        check_cap(active.size, max_enum)
        found = enumerate_max(evaluate, active.size, chunk_size=chunk_size, parallel=parallel)
    elif mode == "sampled":
        seeds = [np.ones(active.size), _greedy_signs(V)]
        found = sample_max(evaluate, active.size, trials, seed=0 if seed is None else seed, seeds=seeds, chunk_size=chunk_size)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'exact' or 'sampled'")

    signs[active] = found.signs
    return SignSearchResult(value=found.value, signs=signs, evaluated=found.evaluated)


def c0_operator_norm(
    seq: SequenceLike,
    mode: str = DEFAULT_SETTINGS["mode"],
    trials: int = DEFAULT_SETTINGS["trials"],
    seed: Optional[int] = DEFAULT_SETTINGS["seed"],
    max_enum: int = DEFAULT_SETTINGS["c0_max_enum"],
    parallel: int = DEFAULT_SETTINGS["parallel"],
    chunk_size: int = DEFAULT_SETTINGS["chunk_size"],
) -> float:
    """Norm of the synthesis operator on the sup-norm unit ball, over real signs.

    Exact for real data; for complex data a lower bound within a factor pi/2
    of the complex-phase supremum.
    """
    return c0_operator_norm_witness(seq, mode, trials, seed, max_enum, parallel, chunk_size).value


def as_probe(f: Any, dim: int) -> HVector:
    f = as_hvector(f, "probe")
    if f.shape[0] != dim:
        raise DimensionMismatchError(f"probe of dimension {f.shape[0]}, expected {dim}")
    return f
