"""Experiment configuration: JSON parsing, validation and hashing.

A configuration document looks like::

    {
      "model": {"E_R": 1.0, "Gamma": 0.2, "r": 2, "gamma": [0.0]},
      "psi":   {"numer": [1.0], "poles": [{"re": 0.0, "im": 2.0, "mult": 2}]},
      "phi":   {"numer": [1.0], "poles": [{"re": 0.0, "im": 3.0, "mult": 2}]},
      "t_grid": "0:10:51",
      "quadrature": {"scheme": "adaptive", "tol": 1e-12},
      "tol": 1e-8,
      "options": {"dyad_k": 1}
    }

The model keys may also sit at the top level.  ``"models"`` (a list of
model documents) replaces ``"model"`` for block-diagonal evolution.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .contour import QuadratureSpec
from .errors import DomainError, GamowJordanError
from .model import HardyFunction, ResonanceModel

__all__ = ["ConfigError", "ExperimentConfig", "parse_t_grid", "load_config", "canonical_hash"]

_MODEL_KEYS = ("E_R", "Gamma", "r", "gamma")


class ConfigError(GamowJordanError):
    """The configuration could not be read or is structurally malformed."""


def parse_t_grid(spec):
    """Turn ``"a:b:n"``, ``[a, b, n]`` or ``{"start", "stop", "count"}`` into a grid.

    Negative times are rejected as a domain error since evolution is only
    defined forward in time.
    """
    if spec is None:
        return None
    try:
        if isinstance(spec, str):
            a, b, n = spec.split(":")
        elif isinstance(spec, dict):
            a, b, n = spec["start"], spec["stop"], spec["count"]
        else:
            a, b, n = spec
        a, b = float(a), float(b)
        n_f = float(n)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"t-grid must look like start:stop:count, got {spec!r}") from exc
    if n_f != int(n_f) or n_f < 1:
        raise ConfigError(f"t-grid count must be a positive integer, got {n!r}")
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ConfigError("t-grid bounds must be finite")
    if min(a, b) < 0:
        raise DomainError("t-grid reaches negative times; evolution is a forward semigroup")
    return np.linspace(a, b, int(n_f))


def _model_from(doc) -> ResonanceModel:
    if not isinstance(doc, dict):
        raise ConfigError(f"model must be a JSON object, got {type(doc).__name__}")
    missing = [k for k in ("E_R", "Gamma") if k not in doc]
    if missing:
        raise ConfigError(f"model is missing required keys {missing}")
    unknown = sorted(set(doc) - set(_MODEL_KEYS))
    if unknown:
        raise ConfigError(f"unknown model keys {unknown}")
    try:
        E_R, Gamma = float(doc["E_R"]), float(doc["Gamma"])
        r = doc.get("r", 1)
        if isinstance(r, bool) or not isinstance(r, (int, float)):
            raise TypeError("r")
        gamma = tuple(float(g) for g in doc.get("gamma", [0.0]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"model fields have the wrong type: {exc}") from exc
    return ResonanceModel(E_R, Gamma, r, gamma)


def _hardy_from(doc, name) -> HardyFunction:
    if doc is None:
        return None
    if not isinstance(doc, dict) or "poles" not in doc:
        raise ConfigError(f"{name} must be an object with 'numer' and 'poles'")
    try:
        return HardyFunction.from_dict(doc)
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"{name} is malformed: {exc}") from exc


def canonical_hash(doc) -> str:
    """SHA-256 of the canonical (sorted, compact) JSON encoding of ``doc``."""
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one CLI run needs, validated up front."""

    models: tuple
    psi: HardyFunction | None = None
    phi: HardyFunction | None = None
    t_grid: np.ndarray | None = None
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    tol: float | None = None
    options: dict = field(default_factory=dict)
    sha256: str = ""

    @property
    def model(self) -> ResonanceModel:
        return self.models[0] if self.models else None

    @classmethod
    def from_dict(cls, doc) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("configuration root must be a JSON object")
        if "models" in doc:
            if not isinstance(doc["models"], list) or not doc["models"]:
                raise ConfigError("'models' must be a non-empty list")
            models = tuple(_model_from(m) for m in doc["models"])
        elif "model" in doc:
            models = (_model_from(doc["model"]),)
        elif any(k in doc for k in _MODEL_KEYS):
            models = (_model_from({k: doc[k] for k in _MODEL_KEYS if k in doc}),)
        else:
            models = ()
        psi = _hardy_from(doc.get("psi"), "psi")
        phi = _hardy_from(doc.get("phi"), "phi")
        for F in (psi, phi):
            if F is not None:
                F.require_valid()
        try:
            quad = QuadratureSpec.from_dict(doc.get("quadrature"))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"quadrature block is malformed: {exc}") from exc
        tol = doc.get("tol")
        if tol is not None:
            try:
                tol = float(tol)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"tol must be a number, got {tol!r}") from exc
            if not tol > 0:
                raise ConfigError("tol must be positive")
        options = doc.get("options", {})
        if not isinstance(options, dict):
            raise ConfigError("'options' must be an object")
        return cls(
            models=models,
            psi=psi,
            phi=phi,
            t_grid=parse_t_grid(doc.get("t_grid")),
            quadrature=quad,
            tol=tol,
            options=dict(options),
            sha256=canonical_hash(doc),
        )


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON configuration file."""
    if path is None:
        return ExperimentConfig.from_dict({})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(doc)
