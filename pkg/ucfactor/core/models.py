"""Data models for ucfactor.

Vectors live in C^d and are stored as complex128 numpy arrays. A
``VectorSequence`` keeps its N vectors as the rows of an (N, d) array; the
synthesis matrix is its transpose. Arrays held by the models are read-only.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from ..util.jsonio import decode_complex_array, encode_complex_array, encode_real_array
from .errors import DimensionMismatchError, InvalidSequenceError

# Type aliases for the plain-array domain types
HVector = np.ndarray  # shape (d,), complex128
ScalarSequence = np.ndarray  # shape (N,), complex128
DenseMatrix = np.ndarray  # shape (rows, cols), complex128


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _complex_array(values: Any, ndim: int, name: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise InvalidSequenceError(f"{name} is not a regular numeric array: {e}") from e
    if arr.ndim != ndim:
        raise InvalidSequenceError(f"{name} must have {ndim} dimension(s), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidSequenceError(f"{name} has NaN or infinite entries")
    return arr


def _real_array(values: Any, name: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InvalidSequenceError(f"{name} is not a real array: {e}") from e
    if arr.ndim != 1:
        raise InvalidSequenceError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidSequenceError(f"{name} has NaN or infinite entries")
    return arr


def as_hvector(values: Any, name: str = "vector") -> HVector:
    """Validate and convert to a complex vector of dimension >= 1."""
    arr = _complex_array(values, 1, name)
    if arr.shape[0] < 1:
        raise InvalidSequenceError(f"{name} must have dimension >= 1")
    return arr


def as_scalars(values: Any, name: str = "scalars") -> ScalarSequence:
    """Validate and convert to a finite complex scalar sequence."""
    return _complex_array(values, 1, name)


def as_weights(values: Any, name: str = "weights") -> np.ndarray:
    """Validate and convert to a nonnegative real weight vector."""
    arr = _real_array(values, name)
    if np.any(arr < 0):
        raise InvalidSequenceError(f"{name} must be nonnegative")
    return arr


def as_matrix(values: Any, name: str = "matrix") -> DenseMatrix:
    """Validate and convert to a finite complex matrix with positive shape."""
    arr = _complex_array(values, 2, name)
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidSequenceError(f"{name} must have positive shape, got {arr.shape}")
    return arr


def check_same_dim(f: HVector, g: HVector) -> None:
    """Raise DimensionMismatchError unless the vectors have equal dimension."""
    if f.shape != g.shape:
        raise DimensionMismatchError(f"dimension mismatch: {f.shape[0]} vs {g.shape[0]}")


@dataclass(frozen=True, eq=False)
class VectorSequence:
    """Finite sequence of N >= 1 vectors of common dimension d >= 1."""

    vectors: np.ndarray

    def __post_init__(self):
        arr = _complex_array(self.vectors, 2, "vectors")
        if arr.shape[0] < 1:
            raise InvalidSequenceError("a sequence needs at least one vector")
        if arr.shape[1] < 1:
            raise InvalidSequenceError("vectors must have dimension >= 1")
        object.__setattr__(self, "vectors", _frozen(arr))

    @property
    def length(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, n: int) -> HVector:
        return self.vectors[n]

    def __iter__(self):
        return iter(self.vectors)

    def norms(self) -> np.ndarray:
        """Euclidean norm of every vector."""
        return np.linalg.norm(self.vectors, axis=1)

    def scaled(self, weights: Any) -> "VectorSequence":
        """The sequence (w_n * Phi_n)."""
        w = as_scalars(weights, "weights")
        if w.shape[0] != self.length:
            raise DimensionMismatchError(f"{w.shape[0]} weights for {self.length} vectors")
        return VectorSequence(w[:, None] * self.vectors)

    def to_dict(self) -> Dict[str, Any]:
        return {"vectors": encode_complex_array(self.vectors)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VectorSequence":
        return cls(decode_complex_array(data["vectors"]))


@dataclass(frozen=True, eq=False)
class PietschSolution:
    """Certified solution of min sum(v) s.t. diag(v) >= G, with its dual max <G, X>."""

    v: np.ndarray
    pi2_sq: float
    dualX: np.ndarray
    gap: float
    certified: bool = True
    iterations: int = 0
    primal_slack: float = 0.0  # smallest eigenvalue of diag(v) - G
    dual_slack: float = 0.0  # smallest eigenvalue of dualX
    backend: str = "interior-point"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v": encode_real_array(self.v),
            "pi2_sq": float(self.pi2_sq),
            "X": encode_complex_array(self.dualX),
            "gap": float(self.gap),
            "certified": bool(self.certified),
            "iterations": int(self.iterations),
            "primal_slack": float(self.primal_slack),
            "dual_slack": float(self.dual_slack),
            "backend": self.backend,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PietschSolution":
        v = np.asarray(data["v"], dtype=np.float64)
        return cls(
            v=v,
            pi2_sq=float(data.get("pi2_sq", v.sum())),
            dualX=decode_complex_array(data["X"]),
            gap=float(data.get("gap", 0.0)),
            certified=bool(data.get("certified", False)),
            iterations=int(data.get("iterations", 0)),
            primal_slack=float(data.get("primal_slack", 0.0)),
            dual_slack=float(data.get("dual_slack", 0.0)),
            backend=str(data.get("backend", "external")),
        )


@dataclass(frozen=True, eq=False)
class NuclearFactorization:
    """Synthesis = S @ diag(lam) @ B with ||S|| <= 1 and row l1 norms of B <= 1."""

    B: np.ndarray
    lam: np.ndarray
    S: np.ndarray
    solution: Optional[PietschSolution] = None

    def product(self) -> np.ndarray:
        return (self.S * self.lam[None, :]) @ self.B

    def to_dict(self) -> Dict[str, Any]:
        return {
            "B": encode_complex_array(self.B),
            "lambda": encode_real_array(self.lam),
            "S": encode_complex_array(self.S),
        }


@dataclass(frozen=True, eq=False)
class Factorization:
    """Phi_n = alpha_n * f_n with alpha >= 0 and (f_n) Bessel."""

    alpha: np.ndarray
    frame: VectorSequence
    bessel: float
    cost: float
    residual: float = 0.0  # max_n ||alpha_n f_n - Phi_n||
    solution: Optional[PietschSolution] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": encode_real_array(self.alpha),
            "frame": encode_complex_array(self.frame.vectors),
            "bessel": float(self.bessel),
            "cost": float(self.cost),
            "residual": float(self.residual),
        }


@dataclass(frozen=True, eq=False)
class MultiplierSpec:
    """Symbol m with sequences Phi, Psi defining f -> sum_n m_n <f, Psi_n> Phi_n."""

    m: np.ndarray
    phi: VectorSequence
    psi: VectorSequence

    def __post_init__(self):
        m = as_scalars(self.m, "symbol")
        if not isinstance(self.phi, VectorSequence):
            object.__setattr__(self, "phi", VectorSequence(self.phi))
        if not isinstance(self.psi, VectorSequence):
            object.__setattr__(self, "psi", VectorSequence(self.psi))
        if not (m.shape[0] == self.phi.length == self.psi.length):
            raise DimensionMismatchError(
                f"lengths differ: m={m.shape[0]}, phi={self.phi.length}, psi={self.psi.length}"
            )
        if self.phi.dim != self.psi.dim:
            raise DimensionMismatchError(f"dimensions differ: phi={self.phi.dim}, psi={self.psi.dim}")
        object.__setattr__(self, "m", _frozen(m))

    @property
    def length(self) -> int:
        return self.m.shape[0]

    @property
    def dim(self) -> int:
        return self.phi.dim

    def with_symbol(self, m: Any) -> "MultiplierSpec":
        """Same sequences, new symbol."""
        return MultiplierSpec(m, self.phi, self.psi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": encode_complex_array(self.m),
            "phi": encode_complex_array(self.phi.vectors),
            "psi": encode_complex_array(self.psi.vectors),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MultiplierSpec":
        return cls(
            decode_complex_array(data["m"]),
            VectorSequence(decode_complex_array(data["phi"])),
            VectorSequence(decode_complex_array(data["psi"])),
        )


@dataclass(frozen=True, eq=False)
class UCReport:
    """Finite unconditional-convergence constant of a multiplier."""

    constant: float
    witness_signs: np.ndarray
    method: str  # exact, sampled
    trials: int = 0  # sign patterns evaluated
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "constant": float(self.constant),
            "witness_signs": [int(s) for s in self.witness_signs],
            "method": self.method,
            "trials": int(self.trials),
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class SymbolSplit:
    """m_n = a_n * conj(b_n) with the Bessel bounds of (a_n Phi_n) and (b_n Psi_n)."""

    a: np.ndarray
    b: np.ndarray
    bessel_a_phi: float
    bessel_b_psi: float
    max_residual: float
    kind: str = ""  # weak, absolute, measure
    weights: Optional[np.ndarray] = None  # the real factorization weights (beta, c or alpha)
    solution: Optional[PietschSolution] = None
    side: str = ""  # weak: psi or phi, the sequence the witness bounds below

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "kind": self.kind,
            "a": encode_complex_array(self.a),
            "b": encode_complex_array(self.b),
            "bessel_a_phi": float(self.bessel_a_phi),
            "bessel_b_psi": float(self.bessel_b_psi),
            "max_residual": float(self.max_residual),
        }
        if self.weights is not None:
            data["weights"] = encode_real_array(self.weights)
        if self.side:
            data["side"] = self.side
        return data


@dataclass(frozen=True, eq=False)
class WeakWitness:
    """Test vectors f_1..f_K and min_n sum_k |<f_k, Psi_n / ||Psi_n||>|."""

    vectors: VectorSequence
    margin: float
    worst_index: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {"margin": float(self.margin), "worst_index": int(self.worst_index), "size": self.vectors.length}


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Probability measure with finitely many atoms in the closed unit ball."""

    points: VectorSequence
    weights: np.ndarray

    def __post_init__(self):
        if not isinstance(self.points, VectorSequence):
            object.__setattr__(self, "points", VectorSequence(self.points))
        w = as_weights(self.weights, "measure weights")
        if w.shape[0] != self.points.length:
            raise DimensionMismatchError(f"{w.shape[0]} weights for {self.points.length} points")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvalidSequenceError(f"measure weights sum to {w.sum()!r}, not 1")
        norms = self.points.norms()
        if np.any(norms > 1.0 + 1e-12):
            raise InvalidSequenceError(f"measure point {int(np.argmax(norms))} lies outside the unit ball")
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def dim(self) -> int:
        return self.points.dim

    @classmethod
    def normalized(cls, points: Any, weights: Any, tol: float = 1e-9) -> "DiscreteMeasure":
        """Rescale weights that sum to 1 within ``tol`` so they sum to 1."""
        w = as_weights(weights, "measure weights")
        total = w.sum()
        if abs(total - 1.0) > tol:
            raise InvalidSequenceError(f"measure weights sum to {total!r}, not 1 +- {tol}")
        return cls(VectorSequence(points), w / total)

    @classmethod
    def sample_sphere(cls, dim: int, size: int, seed: int = 0) -> "DiscreteMeasure":
        """Uniform weights on ``size`` seeded random points of the unit sphere of C^dim."""
        rng = np.random.default_rng(seed)
        z = rng.standard_normal((size, dim)) + 1j * rng.standard_normal((size, dim))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        return cls(VectorSequence(z), np.full(size, 1.0 / size))

    def to_dict(self) -> Dict[str, Any]:
        return {"points": encode_complex_array(self.points.vectors), "weights": encode_real_array(self.weights)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], tol: float = 1e-9) -> "DiscreteMeasure":
        return cls.normalized(decode_complex_array(data["points"]), data["weights"], tol=tol)


@dataclass(frozen=True, eq=False)
class HSSequence:
    """Rank-one operators m_n (Psi_n (x) Phi_n), where (Psi (x) Phi) h = <h, Phi> Psi."""

    tensors: np.ndarray  # shape (N, d, d)

    def __post_init__(self):
        arr = _complex_array(self.tensors, 3, "tensors")
        object.__setattr__(self, "tensors", _frozen(arr))

    @property
    def length(self) -> int:
        return self.tensors.shape[0]

    def as_sequence(self) -> VectorSequence:
        """Row-major flattening; the Euclidean inner product becomes the Frobenius one."""
        return VectorSequence(self.tensors.reshape(self.length, -1))

    def frobenius_norms(self) -> np.ndarray:
        return np.linalg.norm(self.tensors.reshape(self.length, -1), axis=1)


@dataclass(frozen=True, eq=False)
class MeasureSplit:
    """Symbol split from a discrete measure, with the per-index alpha report."""

    split: SymbolSplit
    alpha: np.ndarray
    frobenius_bessel: float  # certified Bessel bound of the Frobenius-space frame
    bessel_a_psi: float  # Bessel bound of (a_n Psi_n)
    jmu_bessel_b_phi: float  # Bessel bound of (j_mu(b_n Phi_n))
    measure_identity: float  # sum_n sum_j w_j |<g_j, b_n Phi_n>|^2
    alpha_sq_sum: float
    integrals: np.ndarray = field(default_factory=lambda: np.zeros(0))  # sum_j w_j |<g_j, Phi_n>|^2

    def to_dict(self) -> Dict[str, Any]:
        data = self.split.to_dict()
        data.update(
            {
                "alpha": encode_real_array(self.alpha),
                "frobenius_bessel": float(self.frobenius_bessel),
                "bessel_a_psi": float(self.bessel_a_psi),
                "jmu_bessel_b_phi": float(self.jmu_bessel_b_phi),
                "measure_identity": float(self.measure_identity),
                "alpha_sq_sum": float(self.alpha_sq_sum),
            }
        )
        return data


@dataclass(frozen=True)
class DualCheck:
    """Frobenius pairing <G, X> with the dual feasibility verdict for X."""

    value: float
    feasible: bool
    min_eigenvalue: float
    max_diagonal_error: float
    hermitian_error: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": float(self.value),
            "feasible": bool(self.feasible),
            "min_eigenvalue": float(self.min_eigenvalue),
            "max_diagonal_error": float(self.max_diagonal_error),
            "hermitian_error": float(self.hermitian_error),
        }

