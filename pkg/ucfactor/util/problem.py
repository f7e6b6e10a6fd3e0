"""Problem files: a JSON document describing sequences, a symbol and optional extras.

Vectors are arrays of ``[re, im]`` pairs. A report written by the CLI is also
accepted; its ``problem`` section is read and its ``certificate`` and
``results`` sections are kept for verification.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..core.errors import InvalidSequenceError, ProblemFileError
from ..core.models import DiscreteMeasure, MultiplierSpec, VectorSequence
from .jsonio import decode_complex_array, load_json_file

logger = logging.getLogger(__name__)

KNOWN_KEYS = ("dim", "phi", "psi", "m", "witness", "measure", "basis", "operator")
WEIGHT_SUM_TOL = 1e-9


@dataclass
class ProblemFile:
    """Validated contents of a problem file."""

    dim: int
    phi: Optional[VectorSequence] = None
    psi: Optional[VectorSequence] = None
    m: Optional[np.ndarray] = None
    witness: Optional[VectorSequence] = None
    measure: Optional[DiscreteMeasure] = None
    basis: Optional[VectorSequence] = None
    operator: Optional[np.ndarray] = None
    certificate: Optional[Dict[str, Any]] = None
    results: Optional[Dict[str, Any]] = None
    report_command: Optional[str] = None  # set when the file is a ucfactor report
    source: Dict[str, Any] = field(default_factory=dict)

    @property
    def length(self) -> Optional[int]:
        for seq in (self.phi, self.psi):
            if seq is not None:
                return seq.length
        return None

    def require(self, name: str) -> Any:
        """Return a field or raise ProblemFileError if the file does not provide it."""
        value = getattr(self, name)
        if value is None:
            raise ProblemFileError(f"problem file has no '{name}'")
        return value

    def spec(self) -> MultiplierSpec:
        """The multiplier (m, phi, psi); m defaults to all ones."""
        phi = self.require("phi")
        psi = self.require("psi")
        m = self.m if self.m is not None else np.ones(phi.length, dtype=np.complex128)
        return MultiplierSpec(m, phi, psi)


def _decode(data: Any, name: str) -> np.ndarray:
    try:
        return decode_complex_array(data)
    except ValueError as e:
        raise ProblemFileError(f"'{name}': {e}") from e


def _vectors(data: Any, name: str, dim: int) -> VectorSequence:
    arr = _decode(data, name)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ProblemFileError(f"'{name}' must be a nonempty array of vectors, got shape {arr.shape}")
    if arr.shape[1] != dim:
        raise ProblemFileError(f"'{name}' has vectors of dimension {arr.shape[1]}, but dim = {dim}")
    try:
        return VectorSequence(arr)
    except InvalidSequenceError as e:
        raise ProblemFileError(f"'{name}': {e}") from e


def _measure(data: Any, dim: int) -> DiscreteMeasure:
    if not isinstance(data, dict) or "points" not in data or "weights" not in data:
        raise ProblemFileError("'measure' must be an object with 'points' and 'weights'")
    _vectors(data["points"], "measure.points", dim)
    try:
        return DiscreteMeasure.from_dict(data, tol=WEIGHT_SUM_TOL)
    except (InvalidSequenceError, ValueError) as e:
        raise ProblemFileError(f"'measure': {e}") from e


def parse_problem(data: Any) -> ProblemFile:
    """Validate a decoded JSON document."""
    if not isinstance(data, dict):
        raise ProblemFileError("problem file must hold a JSON object")

    certificate = results = report_command = None
    if isinstance(data.get("problem"), dict):
        certificate = data.get("certificate")
        results = data.get("results")
        command = data.get("command")
        report_command = None if command is None else str(command)
        data = data["problem"]

    unknown = sorted(set(data) - set(KNOWN_KEYS))
    if unknown:
        logger.warning("Ignoring unknown problem keys: %s", ", ".join(unknown))

    dim = data.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ProblemFileError(f"'dim' must be a positive integer, got {dim!r}")

    problem = ProblemFile(dim=dim, certificate=certificate, results=results, report_command=report_command)
    problem.source = {key: data[key] for key in KNOWN_KEYS if key in data}
    for name in ("phi", "psi", "witness", "basis"):
        if name in data:
            setattr(problem, name, _vectors(data[name], name, dim))

    if problem.phi is not None and problem.psi is not None and problem.phi.length != problem.psi.length:
        raise ProblemFileError(f"'phi' has {problem.phi.length} vectors but 'psi' has {problem.psi.length}")

    if "m" in data:
        m = _decode(data["m"], "m")
        if m.ndim != 1 or not np.all(np.isfinite(m)):
            raise ProblemFileError("'m' must be a flat array of finite [re, im] pairs")
        if problem.length is not None and m.shape[0] != problem.length:
            raise ProblemFileError(f"'m' has {m.shape[0]} entries for {problem.length} vectors")
        problem.m = m

    if "measure" in data:
        problem.measure = _measure(data["measure"], dim)

    if "operator" in data:
        T = _decode(data["operator"], "operator")
        if T.shape != (dim, dim) or not np.all(np.isfinite(T)):
            raise ProblemFileError(f"'operator' must be a finite {dim}x{dim} matrix, got shape {T.shape}")
        problem.operator = T

    return problem


def load_problem(path: Union[str, Path]) -> ProblemFile:
    """Read and validate a problem file."""
    try:
        data = load_json_file(path)
    except (OSError, ValueError) as e:
        raise ProblemFileError(f"cannot read problem file {path}: {e}") from e
    return parse_problem(data)
