"""Multipliers M_{m,Phi,Psi}: f -> sum_n m_n <f, Psi_n> Phi_n."""

import logging
from typing import Any, Iterable, List, Optional, Tuple

import numpy as np

from .enumeration import check_cap, enumerate_max, sample_max
from .errors import DimensionMismatchError, OrthonormalityError
from .hilbert import analysis_coefficients, as_probe, as_sequence, gram
from .models import HVector, MultiplierSpec, UCReport, VectorSequence, as_matrix
from .pietsch import min_dominating_diagonal
from .settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)

# matrices materialized per sign-enumeration block
_UC_BLOCK_ENTRIES = 1 << 22


def assemble(spec: MultiplierSpec) -> np.ndarray:
    """d x d matrix of the multiplier: synthesis(Phi) diag(m) analysis(Psi)."""
    return (spec.phi.vectors.T * spec.m[None, :]) @ spec.psi.vectors.conj()


def apply(spec: MultiplierSpec, f: Any) -> HVector:
    """Apply the multiplier to f by direct summation."""
    f = as_probe(f, spec.dim)
    coeffs = spec.m * analysis_coefficients(spec.psi, f)
    return coeffs @ spec.phi.vectors


def adjoint_spec(spec: MultiplierSpec) -> MultiplierSpec:
    """The adjoint multiplier (conj(m), Psi, Phi)."""
    return MultiplierSpec(spec.m.conj(), spec.psi, spec.phi)


def from_operator(T: Any, basis: Any, side: str = "synthesis", tol: float = 1e-10) -> MultiplierSpec:
    """Represent T as a multiplier with constant symbol 1 over an orthonormal basis (u_n).

    ``side="synthesis"`` gives Phi_n = T u_n, Psi_n = u_n; ``side="analysis"``
    gives Phi_n = u_n, Psi_n = T^H u_n.
    """
    T = as_matrix(T, "operator")
    basis = as_sequence(basis)
    d = basis.dim
    if T.shape != (d, d):
        raise DimensionMismatchError(f"operator of shape {T.shape} against basis of dimension {d}")
    if basis.length != d:
        raise OrthonormalityError(f"a basis of C^{d} needs {d} vectors, got {basis.length}")
    deviation = float(np.max(np.abs(gram(basis) - np.eye(d))))
    if deviation > tol:
        raise OrthonormalityError(f"basis is not orthonormal (max |Gram - I| = {deviation:.3e})")

    U = basis.vectors
    ones = np.ones(d, dtype=np.complex128)
    if side == "synthesis":
        return MultiplierSpec(ones, VectorSequence(U @ T.T), basis)
    if side == "analysis":
        return MultiplierSpec(ones, basis, VectorSequence(U @ T.conj()))
    raise ValueError(f"unknown side {side!r}; expected 'synthesis' or 'analysis'")


def uc_constant(
    spec: MultiplierSpec,
    mode: str = DEFAULT_SETTINGS["mode"],
    trials: int = DEFAULT_SETTINGS["trials"],
    seed: Optional[int] = DEFAULT_SETTINGS["seed"],
    max_enum: int = DEFAULT_SETTINGS["uc_max_enum"],
    parallel: int = DEFAULT_SETTINGS["parallel"],
    chunk_size: int = DEFAULT_SETTINGS["chunk_size"],
) -> UCReport:
    """max over real sign patterns of ||sum_n eps_n m_n <., Psi_n> Phi_n||.

    Terms that vanish (m_n = 0, Phi_n = 0 or Psi_n = 0) are left out of the
    search and reported with sign +1; the cap applies to the remaining terms.
    """
    weights = spec.m * np.linalg.norm(spec.phi.vectors, axis=1) * np.linalg.norm(spec.psi.vectors, axis=1)
    active = np.flatnonzero(weights != 0)
    witness = np.ones(spec.length)
    if active.size == 0:
        return UCReport(constant=0.0, witness_signs=witness, method=mode, trials=1, seed=seed if mode == "sampled" else None)

    P = spec.phi.vectors[active] * spec.m[active][:, None]
    Q = spec.psi.vectors[active].conj()
    d = spec.dim
    block = max(1, min(int(chunk_size), _UC_BLOCK_ENTRIES // (d * d)))

    def evaluate(signs: np.ndarray) -> np.ndarray:
        mats = np.einsum("kn,ni,nj->kij", signs, P, Q)
        return np.linalg.svd(mats, compute_uv=False)[:, 0]

    if mode == "exact":
        check_cap(active.size, max_enum)
        found = enumerate_max(evaluate, active.size, chunk_size=block, parallel=parallel)
        seed = None
    elif mode == "sampled":
        found = sample_max(
            evaluate, active.size, trials, seed=0 if seed is None else seed, seeds=[np.ones(active.size)], chunk_size=block
        )
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'exact' or 'sampled'")

    witness[active] = found.signs
    logger.debug("uc_constant(%s) = %.6g over %d patterns", mode, found.value, found.evaluated)
    return UCReport(constant=found.value, witness_signs=witness, method=mode, trials=found.evaluated, seed=seed)


def absolute_profile(spec: MultiplierSpec, probes: Iterable[Any]) -> List[float]:
    """Per probe f: sum_n |m_n| |<f, Psi_n>| ||Phi_n||."""
    phi_norms = np.linalg.norm(spec.phi.vectors, axis=1)
    weights = np.abs(spec.m) * phi_norms
    profile = []
    for f in probes:
        coeffs = analysis_coefficients(spec.psi, as_probe(f, spec.dim))
        profile.append(float(np.sum(weights * np.abs(coeffs))))
    return profile


def orlicz_condition(spec: MultiplierSpec, tol: float = DEFAULT_SETTINGS["tol"], **solver_options) -> Tuple[float, float]:
    """(sum_n (|m_n| ||Phi_n|| ||Psi_n||)^2, ||Psi_1||^2 * pi2_sq of (m_n Phi_n)).

    For a constant sequence Psi the first never exceeds the second.
    """
    symbol_seq = spec.phi.scaled(spec.m)
    psi_norms = np.linalg.norm(spec.psi.vectors, axis=1)
    lhs = float(np.sum((np.abs(spec.m) * np.linalg.norm(spec.phi.vectors, axis=1) * psi_norms) ** 2))
    solution = min_dominating_diagonal(gram(symbol_seq), tol=tol, **solver_options)
    rhs = float(psi_norms[0] ** 2) * solution.pi2_sq
    logger.debug("Orlicz condition: %.6g <= %.6g", lhs, rhs)
    return lhs, rhs
