"""Symbol splitting m_n = a_n * conj(b_n) with (a_n Phi_n) and (b_n Psi_n) Bessel.

Three constructions are provided:

* ``split_weak``: Psi_n / ||Psi_n|| (or Phi_n / ||Phi_n||) stays away from 0
  weakly, witnessed by finitely many test vectors f_1..f_K.
* ``split_absolute``: the multiplier converges absolutely.
* ``split_measure``: the rank-one tensors m_n (Psi_n (x) Phi_n) are
  factorized in Hilbert-Schmidt (Frobenius) geometry and the weights are
  redistributed through a finitely supported probability measure.

Real factorization weights (beta, c, alpha) are nonnegative; all complex phase
is carried by a and b.
"""

import logging
from typing import Any, Iterable, Optional, Tuple

import numpy as np

from .errors import DegenerateMeasureError, DimensionMismatchError, WitnessMarginError, ZeroVectorError
from .hilbert import analysis_coefficients, as_probe, as_sequence, bessel_bound
from .models import (
    DiscreteMeasure,
    HSSequence,
    MeasureSplit,
    MultiplierSpec,
    SymbolSplit,
    VectorSequence,
    WeakWitness,
)
from .multiplier import adjoint_spec
from .pietsch import factorize
from .settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)

MARGIN_TOL = 1e-10
DEGENERATE_TOL = 1e-14


def _witness_sequence(witness: Any, dim: int) -> VectorSequence:
    witness = as_sequence(list(witness) if not isinstance(witness, (VectorSequence, np.ndarray)) else witness)
    if witness.dim != dim:
        raise DimensionMismatchError(f"witness vectors of dimension {witness.dim}, expected {dim}")
    return witness


def _require_nonzero(seq: VectorSequence, name: str, where: Optional[np.ndarray] = None) -> np.ndarray:
    norms = seq.norms()
    mask = norms == 0 if where is None else (norms == 0) & where
    if np.any(mask):
        index = int(np.argmax(mask))
        raise ZeroVectorError(f"{name}_{index} is zero", index)
    return norms


def _max_residual(m: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(m - a * b.conj())))


def _inverse(weights: np.ndarray) -> np.ndarray:
    inv = np.zeros_like(weights)
    inv[weights > 0] = 1.0 / weights[weights > 0]
    return inv


def verify_witness(psi: Any, witness: Iterable[Any]) -> WeakWitness:
    """margin = min_n sum_k |<f_k, Psi_n / ||Psi_n||>|."""
    psi = as_sequence(psi)
    vectors = _witness_sequence(witness, psi.dim)
    norms = _require_nonzero(psi, "Psi")
    units = psi.vectors / norms[:, None]
    sums = np.sum(np.abs(vectors.vectors @ units.conj().T), axis=0)
    worst = int(np.argmin(sums))
    return WeakWitness(vectors=vectors, margin=float(sums[worst]), worst_index=worst)


def witness_domination(spec: MultiplierSpec, witness: Iterable[Any], g: Any) -> Tuple[float, float]:
    """(sum_n |m_n| ||Psi_n|| |<Phi_n, g>|, sum_k sum_n |m_n| |<f_k, Psi_n>| |<Phi_n, g>|).

    When the witness margin is at least 1 the first value never exceeds the second.
    """
    vectors = _witness_sequence(witness, spec.dim)
    g = as_probe(g, spec.dim)
    phi_g = np.abs(analysis_coefficients(spec.phi, g))
    weights = np.abs(spec.m) * phi_g
    lhs = float(np.sum(weights * spec.psi.norms()))
    pairings = np.abs(vectors.vectors @ spec.psi.vectors.conj().T)  # |<f_k, Psi_n>|
    rhs = float(np.sum(pairings * weights[None, :]))
    return lhs, rhs


def _weak_factors(
    m: np.ndarray, frame_side: VectorSequence, norms: np.ndarray, tol: float, **solver_options
):
    """(a, b, beta, solution) with m = a conj(b) and (a_n frame_side_n) the Bessel frame g_n."""
    theta = frame_side.scaled(m * norms)
    fact = factorize(theta, tol=tol, **solver_options)
    beta = fact.alpha

    a = np.zeros(len(m), dtype=np.complex128)
    b = np.zeros(len(m), dtype=np.complex128)
    live = beta > 0
    a[live] = m[live] * norms[live] / beta[live]
    b[live] = beta[live] / norms[live]
    lone = (~live) & (m != 0)  # frame-side vector is zero
    a[lone] = m[lone]
    b[lone] = 1.0
    if np.any(lone):
        logger.debug("Zero vectors at indices %s; using a_n = m_n, b_n = 1", np.flatnonzero(lone).tolist())
    return a, b, beta, fact.solution


def split_weak(
    spec: MultiplierSpec,
    witness: Iterable[Any],
    tol: float = DEFAULT_SETTINGS["tol"],
    side: str = "psi",
    **solver_options,
) -> SymbolSplit:
    """Split through the factorization of Theta_n = m_n ||Psi_n|| Phi_n = beta_n g_n.

    a_n = m_n ||Psi_n|| / beta_n and b_n = beta_n / ||Psi_n||, so (a_n Phi_n) is
    the Bessel frame (g_n). Indices with m_n = 0 get a_n = b_n = 0; indices
    with Phi_n = 0 and m_n != 0 get a_n = m_n, b_n = 1.

    With ``side="phi"`` the witness bounds Phi_n / ||Phi_n|| below instead and
    the roles swap: the adjoint symbol conj(m_n) is split against (Psi_n), so
    (b_n Psi_n) is the Bessel frame.
    """
    if side not in ("psi", "phi"):
        raise ValueError(f"unknown witness side {side!r}")
    bounded, other = (spec.psi, spec.phi) if side == "psi" else (spec.phi, spec.psi)
    norms = _require_nonzero(bounded, "Psi" if side == "psi" else "Phi")
    check = verify_witness(bounded, witness)
    if check.margin < 1.0 - MARGIN_TOL:
        raise WitnessMarginError(check.margin, check.worst_index)

    if side == "psi":
        a, b, beta, solution = _weak_factors(spec.m, other, norms, tol, **solver_options)
    else:
        adjoint = adjoint_spec(spec)
        b, a, beta, solution = _weak_factors(adjoint.m, other, norms, tol, **solver_options)

    return SymbolSplit(
        a=a,
        b=b,
        bessel_a_phi=bessel_bound(spec.phi.scaled(a)),
        bessel_b_psi=bessel_bound(spec.psi.scaled(b)),
        max_residual=_max_residual(spec.m, a, b),
        kind="weak",
        weights=beta,
        solution=solution,
        side=side,
    )


def split_absolute(spec: MultiplierSpec, tol: float = DEFAULT_SETTINGS["tol"], **solver_options) -> SymbolSplit:
    """Split for absolutely convergent multipliers.

    With m'_n = m_n ||Phi_n|| (Phi normalized to unit vectors) the sequence
    conj(m'_n) Psi_n is factorized as c_n Psi'_n; then b_n = conj(m'_n) / c_n
    makes (b_n Psi_n) = (Psi'_n) the Bessel frame and a_n = c_n / ||Phi_n||.
    """
    nonzero = spec.m != 0
    _require_nonzero(spec.psi, "Psi", where=nonzero)
    phi_norms = _require_nonzero(spec.phi, "Phi", where=nonzero)

    m_unit = spec.m * phi_norms
    fact = factorize(spec.psi.scaled(m_unit.conj()), tol=tol, **solver_options)
    c = fact.alpha

    a = np.zeros(spec.length, dtype=np.complex128)
    b = np.zeros(spec.length, dtype=np.complex128)
    a[nonzero] = c[nonzero] / phi_norms[nonzero]
    b[nonzero] = m_unit[nonzero].conj() / c[nonzero]

    return SymbolSplit(
        a=a,
        b=b,
        bessel_a_phi=bessel_bound(spec.phi.scaled(a)),
        bessel_b_psi=bessel_bound(spec.psi.scaled(b)),
        max_residual=_max_residual(spec.m, a, b),
        kind="absolute",
        weights=c,
        solution=fact.solution,
    )


def hs_tensor_sequence(spec: MultiplierSpec) -> HSSequence:
    """Tensors m_n (Psi_n (x) Phi_n) = m_n Psi_n Phi_n^H, acting as h -> m_n <h, Phi_n> Psi_n."""
    tensors = np.einsum("n,ni,nj->nij", spec.m, spec.psi.vectors, spec.phi.vectors.conj())
    return HSSequence(tensors)


def jmu_embed(mu: DiscreteMeasure, x: Any) -> np.ndarray:
    """(sqrt(w_j) <x, g_j>)_j, the canonical inclusion into L^2(mu) on the support of mu."""
    x = as_probe(x, mu.dim)
    return np.sqrt(mu.weights) * analysis_coefficients(mu.points, x)


def measure_integrals(mu: DiscreteMeasure, seq: Any) -> np.ndarray:
    """sum_j w_j |<g_j, Phi_n>|^2 for every n."""
    seq = as_sequence(seq)
    if seq.dim != mu.dim:
        raise DimensionMismatchError(f"sequence of dimension {seq.dim} against measure of dimension {mu.dim}")
    pairings = mu.points.vectors @ seq.vectors.conj().T  # <g_j, Phi_n>
    return mu.weights @ (pairings.real**2 + pairings.imag**2)


def hs_bessel_probe(spec: MultiplierSpec, alpha: Any, f: Any, g: Any) -> float:
    """sum_n |(m_n / alpha_n) <f, Psi_n> <g, Phi_n>|^2, skipping alpha_n = 0."""
    alpha = np.asarray(alpha, dtype=np.float64)
    f = as_probe(f, spec.dim)
    g = as_probe(g, spec.dim)
    terms = spec.m * _inverse(alpha) * analysis_coefficients(spec.psi, f) * analysis_coefficients(spec.phi, g)
    return float(np.sum(np.abs(terms) ** 2))


def split_measure(
    spec: MultiplierSpec, mu: DiscreteMeasure, tol: float = DEFAULT_SETTINGS["tol"], **solver_options
) -> MeasureSplit:
    """Split through the Frobenius factorization of the tensors and the measure mu.

    a_n = |m_n / alpha_n| * sqrt(sum_j w_j |<g_j, Phi_n>|^2) and
    b_n = conj(m_n) / a_n, so that (a_n Psi_n) and (j_mu(b_n Phi_n)) are
    Bessel and sum_n ||j_mu(b_n Phi_n)||^2 = sum_n alpha_n^2.
    """
    if mu.dim != spec.dim:
        raise DimensionMismatchError(f"measure of dimension {mu.dim} against multiplier of dimension {spec.dim}")

    tensors = hs_tensor_sequence(spec)
    fact = factorize(tensors.as_sequence(), tol=tol, **solver_options)
    alpha = fact.alpha
    integrals = measure_integrals(mu, spec.phi)
    phi_sq = spec.phi.norms() ** 2

    for n in np.flatnonzero(spec.m != 0):
        if alpha[n] == 0:
            raise ZeroVectorError(f"alpha_{n} = 0 with nonzero symbol (Phi_{n} or Psi_{n} is zero)", int(n))
        if integrals[n] <= DEGENERATE_TOL * phi_sq[n]:
            raise DegenerateMeasureError(int(n), float(integrals[n]))

    live = spec.m != 0
    a = np.zeros(spec.length, dtype=np.complex128)
    b = np.zeros(spec.length, dtype=np.complex128)
    a[live] = np.abs(spec.m[live] / alpha[live]) * np.sqrt(integrals[live])
    b[live] = spec.m[live].conj() / a[live]

    embedded = np.array([jmu_embed(mu, x) for x in spec.phi.scaled(b)])
    split = SymbolSplit(
        a=a,
        b=b,
        bessel_a_phi=bessel_bound(spec.phi.scaled(a)),
        bessel_b_psi=bessel_bound(spec.psi.scaled(b)),
        max_residual=_max_residual(spec.m, a, b),
        kind="measure",
        weights=alpha,
        solution=fact.solution,
    )
    return MeasureSplit(
        split=split,
        alpha=alpha,
        frobenius_bessel=fact.bessel,
        bessel_a_psi=bessel_bound(spec.psi.scaled(a)),
        jmu_bessel_b_phi=bessel_bound(VectorSequence(embedded)),
        measure_identity=float(np.sum(embedded.real**2 + embedded.imag**2)),
        alpha_sq_sum=float(np.sum(alpha**2)),
        integrals=integrals,
    )
