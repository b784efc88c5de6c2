"""Run configuration: a versioned JSON tree validated against the defaults.

Unknown keys are rejected, so a misspelled option never falls back silently
to a default.
"""
from __future__ import annotations

import copy
import json
from pathlib import Path

from .errors import ConfigInvalid
from .quadrature import QuadratureConfig

SCHEMA = 1

DEFAULTS = {
    "schema": SCHEMA,
    "geometry": {"k": 1.0, "alpha": 1.0, "sigma0": 2.0, "H": 1.0, "R": None},
    "field": {"cutoff_rho": 0.3, "cutoff_H": 2.0, "q": 4},
    "quadrature": {"radial_order": 8, "angular_order": 8, "vertical_order": 8,
                   "radial_cells": 3, "angular_cells": 1, "vertical_cells": 4,
                   "grading_levels": 30, "refine_tol": 1e-6, "defect_budget": 1e-3},
    "sweep": {"h_min": 1e-3, "h_max": 1e-1, "n_h": 8, "alphas": [1.0, 0.5], "p": 2.0,
              "seed": 0, "n_cases": 50, "lemma_h": [1e-4, 1e-3, 1e-2], "c_w": None,
              "component": "all", "slope_tol": 0.05},
    "collide": {"alpha": 1.0, "theta": 1.0, "T": 1.0, "omega3": 0.0, "grid": 12},
    "output": {"dir": "out", "formats": ["csv", "json"]},
}

# keys whose value may be null or a number
_NULLABLE = {("geometry", "R"), ("sweep", "c_w")}


def _check(tree, ref, path=()):
    if not isinstance(tree, dict):
        raise ConfigInvalid(f"{'.'.join(path) or 'config'} must be a table")
    for key, val in tree.items():
        where = path + (key,)
        if key not in ref:
            raise ConfigInvalid(f"unknown key {'.'.join(where)!r}")
        want = ref[key]
        if isinstance(want, dict):
            _check(val, want, where)
        elif where in _NULLABLE:
            if val is not None and not isinstance(val, (int, float)):
                raise ConfigInvalid(f"{'.'.join(where)} must be a number or null")
        elif isinstance(want, bool) != isinstance(val, bool):
            raise ConfigInvalid(f"{'.'.join(where)} has the wrong type")
        elif isinstance(want, int) and not isinstance(val, int):
            raise ConfigInvalid(f"{'.'.join(where)} must be an integer")
        elif isinstance(want, float) and not isinstance(val, (int, float)):
            raise ConfigInvalid(f"{'.'.join(where)} must be numeric")
        elif isinstance(want, (str, list)) and not isinstance(val, type(want)):
            raise ConfigInvalid(f"{'.'.join(where)} must be a {type(want).__name__}")


def _merge(base, extra):
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(base.get(key), dict):
            _merge(base[key], val)
        else:
            base[key] = val
    return base


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(tree, assignment):
    """Apply one ``dotted.key=value`` override in place."""
    if "=" not in assignment:
        raise ConfigInvalid(f"override {assignment!r} is not key=value")
    key, text = assignment.split("=", 1)
    parts = key.strip().split(".")
    node, ref = tree, DEFAULTS
    for part in parts[:-1]:
        if part not in ref or not isinstance(ref[part], dict):
            raise ConfigInvalid(f"unknown key {key!r}")
        node, ref = node[part], ref[part]
    if parts[-1] not in ref or isinstance(ref[parts[-1]], dict):
        raise ConfigInvalid(f"unknown key {key!r}")
    node[parts[-1]] = _parse_value(text)


def load_config(path=None, overrides=()):
    """Defaults, merged with the file at ``path`` and the overrides."""
    tree = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
        _check(user, DEFAULTS)
        if user.get("schema", SCHEMA) != SCHEMA:
            raise ConfigInvalid(f"unsupported schema {user['schema']!r}")
        _merge(tree, user)
    for item in overrides:
        apply_override(tree, item)
    _check(tree, DEFAULTS)
    if tree["schema"] != SCHEMA:
        raise ConfigInvalid(f"unsupported schema {tree['schema']!r}")
    return tree


def quadrature_config(tree):
    return QuadratureConfig(**tree["quadrature"])
