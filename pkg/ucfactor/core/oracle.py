"""Brute-force references for the SDP solver, the sign enumerations and the factorization.

These are deliberately simple and share no search code with the solvers they
check.
"""

import logging
from typing import Any

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, EnumerationCapError, ProblemTooLargeError
from .hilbert import SequenceLike, as_sequence, gram
from .models import DualCheck
from .settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)

MAX_BRUTE_PIETSCH = 3
MIN_RESOLUTION = 4
_BLOCK = 4096


def _grid_values(G: np.ndarray, p: np.ndarray) -> np.ndarray:
    """lambda_max(D_p^{-1/2} G D_p^{-1/2}) for each row of weights p."""
    K = G[None, :, :] / np.sqrt(p[:, :, None] * p[:, None, :])
    return np.linalg.eigvalsh(K)[:, -1]


def brute_pietsch(G: Any, resolution: int = DEFAULT_SETTINGS["resolution"]) -> float:
    """Upper estimate of min sum(v) s.t. diag(v) >= G from the simplex grid with step 1/resolution.

    For weights p on the simplex the cheapest feasible v is t p with
    t = lambda_max(D_p^{-1/2} G D_p^{-1/2}), a convex function of p. Every grid
    point gives a feasible v, so the result is never below the optimum, and a
    grid refines the grids of all divisors of its resolution.
    """
    G = np.array(G, dtype=np.complex128)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {G.shape}")
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")
    G = (G + G.conj().T) / 2
    active = np.flatnonzero(np.real(np.diag(G)) > 0)
    if active.size > MAX_BRUTE_PIETSCH:
        raise ProblemTooLargeError(f"brute_pietsch handles N <= {MAX_BRUTE_PIETSCH}, got {active.size}")
    G = G[np.ix_(active, active)]
    r = int(resolution)

    if active.size == 0:
        return 0.0
    if active.size == 1:
        return float(np.real(G[0, 0]))
    if active.size == 2:
        i = np.arange(1, r, dtype=np.float64)
        p = np.stack([i, r - i], axis=1) / r
        return float(np.min(_grid_values(G, p)))

    # N = 3: along each row i = const the values are convex in j; binary search per row
    i = np.arange(1, r - 1)
    lo = np.ones_like(i)
    hi = r - i - 1

    def values(j: np.ndarray) -> np.ndarray:
        p = np.stack([i, j, r - i - j], axis=1).astype(np.float64) / r
        return _grid_values(G, p)

    while np.any(lo < hi):
        mid = (lo + hi) // 2
        nxt = np.minimum(mid + 1, hi)
        rising = values(nxt) >= values(mid)
        hi = np.where(rising, mid, hi)
        lo = np.where(rising, lo, mid + 1)
    return float(np.min(values(lo)))


def brute_sign_norm(seq: SequenceLike, max_enum: int = DEFAULT_SETTINGS["brute_max_enum"]) -> float:
    """max over all 2^N sign patterns of ||sum_n eps_n Phi_n||."""
    seq = as_sequence(seq)
    n = seq.length
    if n > max_enum:
        raise EnumerationCapError(n, max_enum)
    V = seq.vectors
    shifts = np.arange(n, dtype=np.int64)
    best = 0.0
    for start in range(0, 1 << n, _BLOCK):
        idx = np.arange(start, min(start + _BLOCK, 1 << n), dtype=np.int64)
        signs = 1.0 - 2.0 * ((idx[:, None] >> shifts[None, :]) & 1)
        best = max(best, float(np.max(np.linalg.norm(signs @ V, axis=1))))
    return best


def dual_value(
    G: Any,
    X: Any,
    psd_tol: float = DEFAULT_SETTINGS["psd_tol"],
    hermitian_tol: float = DEFAULT_SETTINGS["hermitian_tol"],
    diagonal_tol: float = 1e-10,
) -> DualCheck:
    """Re <G, X> together with the feasibility of X for max <G, X>, X >= 0, diag(X) = 1."""
    G = np.array(G, dtype=np.complex128)
    X = np.array(X, dtype=np.complex128)
    if G.shape != X.shape or G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DimensionMismatchError(f"shapes differ or are not square: G {G.shape}, X {X.shape}")

    value = float(np.real(np.vdot(X, G)))
    hermitian_error = float(np.max(np.abs(X - X.conj().T)))
    w = scipy.linalg.eigvalsh((X + X.conj().T) / 2)
    diagonal_error = float(np.max(np.abs(np.diag(X) - 1.0)))
    feasible = (
        hermitian_error <= hermitian_tol * max(1.0, float(np.max(np.abs(X))))
        and w[0] >= -psd_tol * max(1.0, abs(float(w[-1])))
        and diagonal_error <= diagonal_tol
    )
    return DualCheck(
        value=value,
        feasible=bool(feasible),
        min_eigenvalue=float(w[0]),
        max_diagonal_error=diagonal_error,
        hermitian_error=hermitian_error,
    )


def random_factorization_cost(seq: SequenceLike, trials: int = DEFAULT_SETTINGS["trials"], seed: int = 0) -> float:
    """Cheapest ||alpha||^2 * bessel(Phi / alpha) over seeded log-normal positive weights.

    Zero vectors get alpha_n = 0 and f_n = 0. Returns +inf for trials = 0.
    """
    seq = as_sequence(seq)
    if trials <= 0:
        return float("inf")
    G = gram(seq)
    active = np.flatnonzero(np.real(np.diag(G)) > 0)
    if active.size == 0:
        return 0.0
    G = G[np.ix_(active, active)]

    rng = np.random.default_rng(seed)
    best = np.inf
    remaining = trials
    while remaining > 0:
        alpha = rng.lognormal(mean=0.0, sigma=1.0, size=(_BLOCK, active.size))[: min(_BLOCK, remaining)]
        K = G[None, :, :] / (alpha[:, :, None] * alpha[:, None, :])
        costs = np.sum(alpha**2, axis=1) * np.linalg.eigvalsh(K)[:, -1]
        best = min(best, float(np.min(costs)))
        remaining -= alpha.shape[0]
    logger.debug("random_factorization_cost: %d trials, best %.10g", trials, best)
    return best
