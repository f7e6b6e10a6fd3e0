"""2-summing norms, Pietsch weights and the factorization Phi_n = alpha_n f_n.

The finite 2-summing norm of the synthesis operator of (Phi_n) is computed
from the semidefinite pair

    primal:  minimize sum(v)    subject to  diag(v) - G >= 0
    dual:    maximize <G, X>    subject to  X >= 0,  diag(X) = 1

with G the Gram matrix. Every solution returned is polished into an exactly
feasible pair and carries its certificate (v, X, gap).
"""

import logging
from typing import Any, Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import (
    CertificationError,
    DimensionMismatchError,
    NotHermitianError,
    NotPositiveSemidefiniteError,
    ProblemTooLargeError,
    RowNormError,
)
from .hilbert import SequenceLike, as_sequence, bessel_bound, gram
from .models import Factorization, NuclearFactorization, PietschSolution, VectorSequence, as_weights
from .settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)

MAX_SDP_SIZE = 512
MIN_ITERATIONS = 50
# interior point keeps going past the certification tolerance down to this relative gap
TARGET_GAP = 1e-13
CVXPY_ACCURACY = 1e-12
BACKENDS = ("interior-point", "cvxpy")


def check_gram(
    G: Any,
    hermitian_tol: float = DEFAULT_SETTINGS["hermitian_tol"],
    psd_tol: float = DEFAULT_SETTINGS["psd_tol"],
) -> np.ndarray:
    """Validate a Gram matrix and return its Hermitian part."""
    try:
        G = np.array(G, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise NotHermitianError(f"Gram matrix is not numeric: {e}") from e
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 1:
        raise NotHermitianError(f"Gram matrix must be square and nonempty, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise NotHermitianError("Gram matrix has NaN or infinite entries")

    scale = max(1.0, float(np.max(np.abs(G))))
    asym = float(np.max(np.abs(G - G.conj().T)))
    if asym > hermitian_tol * scale:
        raise NotHermitianError(f"Gram matrix is not Hermitian (max |G - G^H| = {asym:.3e})")

    H = (G + G.conj().T) / 2
    w = scipy.linalg.eigvalsh(H)
    if w[0] < -psd_tol * max(abs(w[-1]), np.finfo(float).tiny):
        raise NotPositiveSemidefiniteError(f"Gram matrix is not PSD (smallest eigenvalue {w[0]:.3e})")
    return H


def _max_step(A: np.ndarray, dA: np.ndarray) -> float:
    """Backtracked step keeping A + step * dA positive definite."""
    step = 1.0
    while step > 1e-12:
        try:
            scipy.linalg.cholesky(A + step * dA, lower=True)
            break
        except scipy.linalg.LinAlgError:
            step *= 0.8
    else:
        return 0.0
    return step * 0.95 if step < 1.0 else step


def _interior_point(L: np.ndarray, tol: float, max_iter: int) -> Tuple[np.ndarray, np.ndarray, int]:
    """Primal-dual interior-point method for the unit-diagonal SDP.

    ``L`` is Hermitian with maximal diagonal within a factor 2 of 1 and every
    diagonal entry positive. Returns (y, X, iterations) for the best iterate seen.
    """
    target = min(0.1 * tol, TARGET_GAP)
    n = L.shape[0]
    X = np.eye(n, dtype=np.complex128)
    y = 1.1 * np.sum(np.abs(L), axis=1)
    Z = np.diag(y) - L
    mu = float(np.real(np.vdot(Z, X))) / (2 * n)

    best = (np.inf, y.copy(), X.copy())
    stalled = 0
    it = 0
    for it in range(1, max_iter + 1):
        primal = float(np.sum(y))
        gap = primal - float(np.real(np.vdot(X, L)))
        rel = gap / max(1.0, primal)
        stalled = 0 if rel < 0.9 * best[0] else stalled + 1
        if rel < best[0]:
            best = (rel, y.copy(), X.copy())
        if rel <= target:
            logger.debug("Interior point converged in %d iterations (relative gap %.3e)", it, rel)
            break
        if stalled >= 10:
            logger.debug("Interior point stalled at iteration %d (relative gap %.3e)", it, best[0])
            break

        try:
            factor = scipy.linalg.cho_factor(Z, lower=True)
        except scipy.linalg.LinAlgError:
            logger.debug("Slack matrix lost definiteness at iteration %d", it)
            break
        Zi = scipy.linalg.cho_solve(factor, np.eye(n, dtype=np.complex128))
        Zi = (Zi + Zi.conj().T) / 2

        M = np.real(Zi * X.T)
        rhs = mu * np.real(np.diag(Zi)) - 1.0
        try:
            dy = scipy.linalg.solve(M, rhs, assume_a="pos")
        except (scipy.linalg.LinAlgError, ValueError):
            logger.debug("Schur complement is singular at iteration %d", it)
            break
        dX = mu * Zi - X - (Zi * dy[None, :]) @ X
        dX = (dX + dX.conj().T) / 2

        alpha_p = _max_step(X, dX)
        alpha_d = _max_step(Z, np.diag(dy).astype(np.complex128))
        X = X + alpha_p * dX
        d = np.sqrt(np.real(np.diag(X)))
        X = X / np.outer(d, d)
        y = y + alpha_d * dy
        Z = np.diag(y) - L

        mu = float(np.real(np.vdot(Z, X))) / (2 * n)
        if alpha_p + alpha_d > 1.6:
            mu /= 2
        if alpha_p + alpha_d > 1.9:
            mu /= 5
        logger.debug("it=%d gap=%.3e mu=%.3e steps=(%.3f, %.3f)", it, gap, mu, alpha_p, alpha_d)

    return best[1], best[2], it


def _cvxpy_solve(L: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray, int]:
    """Solve the unit-diagonal SDP with cvxpy; X is projected onto the PSD cone."""
    import cvxpy as cp

    n = L.shape[0]
    if np.any(np.imag(L) != 0):
        X = cp.Variable((n, n), hermitian=True)
        diag = cp.real(cp.diag(X)) == 1
        objective = cp.Maximize(cp.real(cp.trace(L @ X)))
    else:
        L = np.real(L)
        X = cp.Variable((n, n), symmetric=True)
        diag = cp.diag(X) == 1
        objective = cp.Maximize(cp.trace(L @ X))
    problem = cp.Problem(objective, [X >> 0, diag])
    accuracy = max(1e-3 * tol, CVXPY_ACCURACY)
    if cp.CLARABEL in cp.installed_solvers():
        problem.solve(solver=cp.CLARABEL, tol_gap_abs=accuracy, tol_gap_rel=accuracy, tol_feas=accuracy, max_iter=500)
    else:
        problem.solve(solver=cp.SCS, eps_abs=accuracy, eps_rel=accuracy, max_iters=200_000)
    if X.value is None:
        raise CertificationError(f"cvxpy finished with status {problem.status}")
    v = np.maximum(np.abs(np.asarray(diag.dual_value, dtype=np.float64)), np.real(np.diag(L)))
    iterations = int(getattr(problem.solver_stats, "num_iters", 0) or 0)
    w, U = scipy.linalg.eigh((X.value + np.conj(X.value).T) / 2)
    Xp = (U * np.maximum(w, 0.0)[None, :]) @ U.conj().T
    logger.debug("cvxpy status %s, %d iterations, clipped eigenvalue %.3e", problem.status, iterations, min(w[0], 0.0))
    return v, Xp.astype(np.complex128), iterations


def _polish(G: np.ndarray, active: np.ndarray, y: np.ndarray, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Exactly feasible (v, X) on the full index set from an approximate solution on ``active``."""
    n = G.shape[0]
    Ga = G[np.ix_(active, active)]

    d = np.sqrt(y)
    K = Ga / np.outer(d, d)
    scale = float(scipy.linalg.eigvalsh((K + K.conj().T) / 2)[-1])
    v = np.zeros(n)
    v[active] = scale * y

    xd = np.sqrt(np.maximum(np.real(np.diag(X)), np.finfo(float).tiny))
    Xa = X / np.outer(xd, xd)
    Xa = (Xa + Xa.conj().T) / 2
    np.fill_diagonal(Xa, 1.0)
    full = np.eye(n, dtype=np.complex128)
    full[np.ix_(active, active)] = Xa
    return v, full


def _certify(
    G: np.ndarray,
    v: np.ndarray,
    X: np.ndarray,
    tol: float,
    psd_tol: float,
    iterations: int,
    backend: str,
) -> PietschSolution:
    total = float(np.sum(v))
    gap = max(0.0, total - float(np.real(np.vdot(X, G))))
    primal_slack = float(scipy.linalg.eigvalsh(np.diag(v) - G)[0])
    wx = scipy.linalg.eigvalsh(X)
    dual_slack = float(wx[0])
    g_norm = float(max(abs(scipy.linalg.eigvalsh(G)[-1]), 0.0))
    certified = (
        gap <= tol * max(1.0, total)
        and primal_slack >= -psd_tol * g_norm
        and dual_slack >= -psd_tol * max(1.0, float(wx[-1]))
    )
    return PietschSolution(
        v=v,
        pi2_sq=total,
        dualX=X,
        gap=gap,
        certified=certified,
        iterations=iterations,
        primal_slack=primal_slack,
        dual_slack=dual_slack,
        backend=backend,
    )


def min_dominating_diagonal(
    G: Any,
    tol: float = DEFAULT_SETTINGS["tol"],
    max_iter: Optional[int] = DEFAULT_SETTINGS["max_iter"],
    backend: str = DEFAULT_SETTINGS["backend"],
    psd_tol: float = DEFAULT_SETTINGS["psd_tol"],
    hermitian_tol: float = DEFAULT_SETTINGS["hermitian_tol"],
) -> PietschSolution:
    """Minimal-trace diagonal dominating G, with its dual certificate.

    Indices with G_ii = 0 get v_i = 0 and a unit row in X. Raises
    CertificationError (carrying the best polished iterate as ``solution``)
    when the duality gap or feasibility tolerances are not met.
    """
    G = check_gram(G, hermitian_tol=hermitian_tol, psd_tol=psd_tol)
    n = G.shape[0]
    if n > MAX_SDP_SIZE:
        raise ProblemTooLargeError(f"SDP size {n} exceeds {MAX_SDP_SIZE}")
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {', '.join(BACKENDS)}")

    diag = np.real(np.diag(G))
    active = np.flatnonzero(diag > 0)
    if active.size == 0:
        return _certify(G, np.zeros(n), np.eye(n, dtype=np.complex128), tol, psd_tol, 0, backend)

    Ga = G[np.ix_(active, active)]
    if active.size == 1:
        y, X, iterations = np.array([float(np.real(Ga[0, 0]))]), np.ones((1, 1), dtype=np.complex128), 0
    else:
        # power of two, so dividing by it is exact
        scale = float(2.0 ** np.round(np.log2(np.max(diag[active]))))
        budget = max_iter if max_iter is not None else max(10 * active.size**2, MIN_ITERATIONS)
        if backend == "cvxpy":
            y, X, iterations = _cvxpy_solve(Ga / scale, tol)
        else:
            y, X, iterations = _interior_point(Ga / scale, tol, budget)
        y = y * scale

    v, X = _polish(G, active, y, X)
    solution = _certify(G, v, X, tol, psd_tol, iterations, backend)
    if not solution.certified:
        logger.warning(
            "SDP not certified: gap=%.3e, primal slack=%.3e, dual slack=%.3e",
            solution.gap,
            solution.primal_slack,
            solution.dual_slack,
        )
        raise CertificationError(
            f"SDP did not reach tolerance {tol:g} (gap {solution.gap:.3e} after {iterations} iterations)",
            solution=solution,
        )
    return solution


def pietsch_factorize(seq: SequenceLike, tol: float = DEFAULT_SETTINGS["tol"], **solver_options) -> NuclearFactorization:
    """Synthesis = S diag(lambda) B with B = identity and lambda = sqrt(v)."""
    seq = as_sequence(seq)
    solution = min_dominating_diagonal(gram(seq), tol=tol, **solver_options)
    lam = np.sqrt(solution.v)
    inv = np.zeros_like(lam)
    inv[lam > 0] = 1.0 / lam[lam > 0]
    S = seq.vectors.T * inv[None, :]
    return NuclearFactorization(B=np.eye(seq.length, dtype=np.complex128), lam=lam, S=S, solution=solution)


def construct_alpha_f(lam: Any, B: Any, row_tol: float = 1e-12) -> Tuple[np.ndarray, VectorSequence]:
    """alpha_k^2 = sum_i lam_i^2 |B_ik| and f_k = (lam_i B_ik)_i / alpha_k.

    ``lam`` has one weight per row of B; f_k lives in C^(rows of B). Columns
    with alpha_k = 0 give f_k = 0.
    """
    lam = as_weights(lam, "lambda")
    B = np.array(B, dtype=np.complex128)
    if B.ndim != 2 or B.shape[0] != lam.shape[0]:
        raise DimensionMismatchError(f"B has shape {B.shape} but lambda has length {lam.shape[0]}")

    row_norms = np.sum(np.abs(B), axis=1)
    for i, norm in enumerate(row_norms):
        if norm > 1.0 + row_tol:
            raise RowNormError(i, float(norm))

    alpha = np.sqrt(np.sum((lam**2)[:, None] * np.abs(B), axis=0))
    inv = np.zeros_like(alpha)
    inv[alpha > 0] = 1.0 / alpha[alpha > 0]
    f = (lam[:, None] * B).T * inv[:, None]
    return alpha, VectorSequence(f)


def factorization_cost(alpha: Any, f: SequenceLike) -> float:
    """||alpha||_2^2 times the optimal Bessel bound of f."""
    alpha = as_weights(alpha, "alpha")
    f = as_sequence(f)
    if alpha.shape[0] != f.length:
        raise DimensionMismatchError(f"{alpha.shape[0]} weights for {f.length} vectors")
    return float(np.sum(alpha**2)) * bessel_bound(f)


def factorize(seq: SequenceLike, tol: float = DEFAULT_SETTINGS["tol"], **solver_options) -> Factorization:
    """Optimal factorization Phi_n = alpha_n f_n with alpha_n = sqrt(v_n)."""
    seq = as_sequence(seq)
    solution = min_dominating_diagonal(gram(seq), tol=tol, **solver_options)
    alpha = np.sqrt(solution.v)
    inv = np.zeros_like(alpha)
    inv[alpha > 0] = 1.0 / alpha[alpha > 0]
    frame = VectorSequence(seq.vectors * inv[:, None])

    residual = float(np.max(np.linalg.norm(alpha[:, None] * frame.vectors - seq.vectors, axis=1)))
    bessel = bessel_bound(frame)
    return Factorization(
        alpha=alpha,
        frame=frame,
        bessel=bessel,
        cost=float(np.sum(alpha**2)) * bessel,
        residual=residual,
        solution=solution,
    )
