"""
Shipped scenario presets.

A preset is a run-config mapping in the same shape as a TOML run file. A
run file naming ``preset = "<name>"`` is deep-merged on top of it, so a
file only needs the keys it changes.
"""

import copy
from typing import Any, Dict, List, Mapping

NOTCH_Y = 0.5 + 1.0 / 96.0


def _rect(x0: float, y0: float, x1: float, y1: float) -> List[List[float]]:
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


PRESETS: Dict[str, Dict[str, Any]] = {
    # Bonded state is the affine stretch u = (t x, 0) with energy t^2 |Omega|.
    "uniform-stretch": {
        "domain": {
            "polygon": _rect(0.0, 0.0, 1.0, 1.0 / 3.0),
            "brittle": [[1.0 / 3.0, 0.0, 2.0 / 3.0, 1.0 / 3.0]],
            "boundary": [
                {"start": [0.0, 0.0], "end": [0.0, 1.0 / 3.0], "label": "dirichlet"},
                {"start": [1.0, 0.0], "end": [1.0, 1.0 / 3.0], "label": "dirichlet"},
            ],
        },
        "model": {
            "bulk": "quadratic",
            "mu": 1.0,
            "confinement": 0.0,
            "allow_degenerate": True,
            "surface": "isotropic",
            "toughness": 1.0,
            "boundary_deformation": ["t*x", "0"],
        },
        "discretization": {"eps": 1.0 / 3.0, "a": 0.2, "horizon": 0.8, "steps": 8},
        "solver": {"mode": "heuristic"},
    },
    "strip-notch": {
        "domain": {
            "polygon": _rect(0.0, 0.0, 1.0, 1.0),
            "brittle": [[0.0, 0.375, 1.0, 0.625]],
            "boundary": [
                {"start": [0.0, 0.0], "end": [1.0, 0.0], "label": "dirichlet"},
                {"start": [0.0, 1.0], "end": [1.0, 1.0], "label": "dirichlet"},
            ],
            "initial_crack": [[[0.0, NOTCH_Y], [0.375, NOTCH_Y]]],
        },
        "model": {
            "bulk": "quadratic",
            "mu": 1.0,
            "confinement": 0.01,
            "surface": "isotropic",
            "toughness": 0.5,
            "boundary_deformation": ["0", "t*y"],
        },
        "discretization": {"eps": 0.125, "a": 0.2, "horizon": 1.0, "steps": 10},
        "solver": {"mode": "heuristic"},
        "study": {"sequence": [[0.125, 0.2, 0.1], [0.0625, 0.1, 0.05], [0.03125, 0.05, 0.025]]},
    },
    # k(nu) = toughness sqrt(nu1^2 + 4 nu2^2)
    "anisotropic-zigzag": {
        "domain": {
            "polygon": _rect(0.0, 0.0, 1.0, 1.0),
            "brittle": [[0.0, 0.375, 1.0, 0.625]],
            "boundary": [
                {"start": [0.0, 0.0], "end": [1.0, 0.0], "label": "dirichlet"},
                {"start": [0.0, 1.0], "end": [1.0, 1.0], "label": "dirichlet"},
            ],
            "initial_crack": [[[0.0, NOTCH_Y], [0.19, NOTCH_Y + 0.06], [0.36, NOTCH_Y]]],
        },
        "model": {
            "bulk": "quadratic",
            "mu": 1.0,
            "confinement": 0.01,
            "surface": "anisotropic_ellipse",
            "toughness": 0.25,
            "matrix": [[1.0, 0.0], [0.0, 4.0]],
            "boundary_deformation": ["0", "t*y"],
        },
        "discretization": {"eps": 0.125, "a": 0.2, "horizon": 1.0, "steps": 10},
        "solver": {"mode": "heuristic"},
    },
}


def preset_names() -> List[str]:
    return sorted(PRESETS)


def get_preset(name: str) -> Dict[str, Any]:
    """A private copy of the named preset; KeyError for unknown names."""
    return copy.deepcopy(PRESETS[name])


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    """Tables merge key by key; every other value, lists included, is replaced."""
    merged = copy.deepcopy(dict(base))
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


__all__ = ['PRESETS', 'NOTCH_Y', 'preset_names', 'get_preset', 'deep_merge']
