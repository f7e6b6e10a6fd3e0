"""Shared fixtures for the ucfactor test suite."""

import json

import numpy as np
import pytest

from ucfactor.core import settings as settings_module
from ucfactor.util.jsonio import encode_complex_array


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep settings.json and UCFACTOR_MAX_ENUM of the host out of every test."""
    config_dir = tmp_path / "config"
    config_dir.mkdir()
    monkeypatch.setattr(settings_module, "get_config_dir", lambda: config_dir)
    monkeypatch.delenv(settings_module.MAX_ENUM_ENV, raising=False)
    return config_dir


@pytest.fixture
def write_problem(tmp_path):
    """Write a problem document; numpy arrays are encoded as [re, im] pairs."""

    def _write(data, name="problem.json"):
        doc = {}
        for key, value in data.items():
            if isinstance(value, np.ndarray):
                value = encode_complex_array(value)
            elif key == "measure" and isinstance(value.get("points"), np.ndarray):
                value = {"points": encode_complex_array(value["points"]), "weights": list(value["weights"])}
            doc[key] = value
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return _write
