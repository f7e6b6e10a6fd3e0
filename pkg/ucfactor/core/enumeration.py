"""Sign-pattern enumeration and sampling for ucfactor.

Patterns are rows of a float array with entries +1/-1. Every evaluated
quantity is invariant under a global sign flip, so enumeration fixes the first
sign to +1 and walks the remaining 2^(n-1) patterns: bit j of the pattern
index set means sign j+1 is -1. Index 0 is the all-plus pattern.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from .errors import EnumerationCapError

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class SignSearchResult:
    """Best value found over a set of sign patterns."""

    value: float
    signs: np.ndarray
    evaluated: int


def pattern_count(n: int) -> int:
    """Number of canonical patterns (first sign fixed) for n signs."""
    return 1 << max(n - 1, 0)


def check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise EnumerationCapError(n, cap)


def sign_block(start: int, count: int, n: int) -> np.ndarray:
    """Canonical patterns with indices start .. start+count-1, as a (count, n) array."""
    signs = np.ones((count, n))
    if n > 1:
        idx = np.arange(start, start + count, dtype=np.int64)
        bits = (idx[:, None] >> np.arange(n - 1, dtype=np.int64)[None, :]) & 1
        signs[:, 1:] = 1.0 - 2.0 * bits
    return signs


def canonicalize(signs: np.ndarray) -> np.ndarray:
    """Flip each row so its first sign is +1."""
    return signs * signs[:, :1]


def _best_in_block(evaluate: Evaluator, signs: np.ndarray):
    values = np.asarray(evaluate(signs), dtype=np.float64)
    k = int(np.argmax(values))  # first occurrence
    return float(values[k]), signs[k].copy(), signs.shape[0]


def _reduce(blocks: Iterable) -> SignSearchResult:
    value, signs, evaluated = -np.inf, None, 0
    for block_value, block_signs, count in blocks:
        evaluated += count
        if block_value > value:
            value, signs = block_value, block_signs
    return SignSearchResult(value=value, signs=signs, evaluated=evaluated)


def enumerate_max(
    evaluate: Evaluator,
    n: int,
    chunk_size: int = 4096,
    parallel: int = 1,
) -> SignSearchResult:
    """Exact maximum of ``evaluate`` over all canonical sign patterns of length n.

    ``evaluate`` maps a (k, n) block of patterns to k values. Blocks may run on
    ``parallel`` worker threads; the reduction walks blocks in index order and
    keeps the first maximal pattern, so the result does not depend on
    ``parallel`` or on scheduling.
    """
    total = pattern_count(n)
    chunk_size = max(1, int(chunk_size))
    starts = range(0, total, chunk_size)

    def run(start: int):
        return _best_in_block(evaluate, sign_block(start, min(chunk_size, total - start), n))

    logger.debug("Enumerating %d sign patterns in %d blocks (workers=%d)", total, len(starts), parallel)
    if parallel > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            return _reduce(pool.map(run, starts))
    return _reduce(map(run, starts))


def sample_max(
    evaluate: Evaluator,
    n: int,
    trials: int,
    seed: int = 0,
    seeds: Optional[Sequence[np.ndarray]] = None,
    chunk_size: int = 4096,
) -> SignSearchResult:
    """Maximum of ``evaluate`` over seed patterns plus ``trials`` random patterns.

    Random patterns are drawn block by block from ``numpy.random.default_rng(seed)``
    with a fixed block size, so the first t patterns are the same for every
    ``trials >= t`` and the value is non-decreasing in ``trials``.
    """
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    chunk_size = max(1, int(chunk_size))
    blocks: List = []
    if seeds:
        blocks.append(_best_in_block(evaluate, canonicalize(np.array(seeds, dtype=np.float64).reshape(-1, n))))

    rng = np.random.default_rng(seed)
    remaining = trials
    while remaining > 0:
        draw = rng.random((chunk_size, n)) < 0.5
        signs = canonicalize(np.where(draw, -1.0, 1.0))[: min(chunk_size, remaining)]
        blocks.append(_best_in_block(evaluate, signs))
        remaining -= signs.shape[0]

    if not blocks:
        blocks.append(_best_in_block(evaluate, np.ones((1, n))))
    return _reduce(blocks)
