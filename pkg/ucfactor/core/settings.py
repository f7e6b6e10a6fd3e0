"""Settings management for ucfactor."""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

MAX_ENUM_ENV = "UCFACTOR_MAX_ENUM"

DEFAULT_SETTINGS: Dict[str, Any] = {
    "tol": 1e-8,  # duality gap, relative to max(1, sum v)
    "max_iter": None,  # None = 10 * N^2, never below 50
    "backend": "interior-point",  # or "cvxpy"
    "c0_max_enum": 20,
    "uc_max_enum": 16,
    "brute_max_enum": 20,
    "mode": "exact",  # exact, sampled
    "trials": 1000,
    "seed": 0,
    "resolution": 400,  # brute_pietsch grid used by verify
    "parallel": 1,  # enumeration worker threads
    "chunk_size": 4096,  # sign patterns per block
    "psd_tol": 1e-10,
    "hermitian_tol": 1e-10,
}

ENUM_KEYS = ("c0_max_enum", "uc_max_enum", "brute_max_enum")


def get_config_dir() -> Path:
    """Get the configuration directory."""
    if os.name == "nt":  # Windows
        config_dir = Path(os.environ.get("APPDATA", Path.home())) / ".ucfactor"
    else:  # Linux/macOS
        config_dir = Path.home() / ".ucfactor"

    config_dir.mkdir(parents=True, exist_ok=True)
    return config_dir


def load_json_file(filename: str, default: Any = None) -> Any:
    """Load a JSON file from config directory."""
    filepath = get_config_dir() / filename

    if not filepath.exists():
        return default if default is not None else {}

    try:
        with open(filepath, "r", encoding="utf-8") as f:
            return json.load(f)
    except (json.JSONDecodeError, IOError) as e:
        logger.warning("Ignoring unreadable %s: %s", filepath, e)
        return default if default is not None else {}


def save_json_file(filename: str, data: Any) -> None:
    """Save data to a JSON file in config directory."""
    filepath = get_config_dir() / filename

    try:
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, sort_keys=True)
    except IOError as e:
        raise IOError(f"Failed to save {filename}: {e}")


def load_settings() -> Dict[str, Any]:
    """Load user settings merged over the defaults."""
    settings = load_json_file("settings.json", {})
    if not isinstance(settings, dict):
        logger.warning("settings.json does not hold an object; using defaults")
        settings = {}

    unknown = sorted(set(settings) - set(DEFAULT_SETTINGS))
    if unknown:
        logger.warning("Unknown settings ignored: %s", ", ".join(unknown))

    merged = dict(DEFAULT_SETTINGS)
    merged.update({key: value for key, value in settings.items() if key in DEFAULT_SETTINGS})
    return merged


def save_settings(settings: Dict[str, Any]) -> None:
    """Save user settings."""
    save_json_file("settings.json", settings)


def apply_env_overrides(settings: Dict[str, Any], environ: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    """Apply environment overrides; UCFACTOR_MAX_ENUM sets every enumeration cap."""
    environ = os.environ if environ is None else environ
    raw = environ.get(MAX_ENUM_ENV)
    if raw is None or raw.strip() == "":
        return settings

    try:
        cap = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", MAX_ENUM_ENV, raw)
        return settings
    if cap < 1:
        logger.warning("Ignoring %s=%r: must be >= 1", MAX_ENUM_ENV, raw)
        return settings

    for key in ENUM_KEYS:
        settings[key] = cap
    return settings
