"""JSON helpers for ucfactor: complex codec, file IO and input digests."""

import hashlib
import json
from pathlib import Path
from typing import Any, Union

import numpy as np


def encode_complex_array(values: Any) -> Any:
    """Encode a complex array as nested lists ending in ``[re, im]`` pairs."""
    arr = np.asarray(values, dtype=np.complex128)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def decode_complex_array(data: Any) -> np.ndarray:
    """Decode nested lists ending in ``[re, im]`` pairs into a complex array.

    Raises ValueError when the innermost level is not a pair of reals or the
    nesting is ragged.
    """
    try:
        arr = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ValueError(f"not a regular array of [re, im] pairs: {e}") from e
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError(f"expected [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_real_array(values: Any) -> Any:
    """Encode a real array as nested lists of floats."""
    return np.asarray(values, dtype=np.float64).tolist()


def load_json_file(path: Union[str, Path]) -> Any:
    """Load a JSON document from ``path``."""
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def dump_json(data: Any) -> str:
    """Serialize with sorted keys so equal data gives identical text."""
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=True)


def digest(data: Any) -> str:
    """SHA-256 of the canonical compact JSON form of ``data``."""
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
