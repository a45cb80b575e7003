"""
Gauss rules on triangles, segments and time intervals.

Triangle rules are given in barycentric coordinates with weights summing to 1,
so an integral over T is area(T) * sum(w * f(x_q)).
"""

import math
from dataclasses import dataclass
from typing import Dict

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray   # (nq, d) barycentric (triangle) or unit-interval (segment) coordinates
    weights: np.ndarray  # (nq,) summing to 1
    degree: int


def _triangle_rules() -> Dict[int, QuadratureRule]:
    a, b = 0.059715871789770, 0.470142064105115
    c, d = 0.797426985353087, 0.101286507323456
    w_ab, w_cd = 0.132394152788506, 0.125939180544827
    seven = np.array([
        [1 / 3, 1 / 3, 1 / 3],
        [a, b, b], [b, a, b], [b, b, a],
        [c, d, d], [d, c, d], [d, d, c],
    ])
    return {
        1: QuadratureRule(np.array([[1 / 3, 1 / 3, 1 / 3]]), np.array([1.0]), 1),
        3: QuadratureRule(
            np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]]),
            np.full(3, 1 / 3), 2,
        ),
        7: QuadratureRule(seven, np.array([0.225] + [w_ab] * 3 + [w_cd] * 3), 5),
    }


TRIANGLE_RULES = _triangle_rules()

EDGE_RULE = QuadratureRule(
    np.array([0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0)]),
    np.array([0.5, 0.5]),
    3,
)

TIME_RULE = QuadratureRule(
    np.array([0.5 - 0.5 * math.sqrt(0.6), 0.5, 0.5 + 0.5 * math.sqrt(0.6)]),
    np.array([5.0, 8.0, 5.0]) / 18.0,
    5,
)


def triangle_rule(n_points: int) -> QuadratureRule:
    try:
        return TRIANGLE_RULES[n_points]
    except KeyError:
        raise ValueError(f"no {n_points}-point triangle rule; choose 1, 3 or 7") from None


def triangle_points(vertices: np.ndarray, triangles: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    """Physical quadrature points, shape (n_triangles, nq, 2)."""
    corners = vertices[triangles]  # (n, 3, 2)
    return np.einsum("qk,nkd->nqd", rule.points, corners)


def edge_points(p0: np.ndarray, p1: np.ndarray, rule: QuadratureRule = EDGE_RULE) -> np.ndarray:
    """Points along segments p0 -> p1, shape (n, nq, 2)."""
    s = rule.points[None, :, None]
    return (1.0 - s) * p0[:, None, :] + s * p1[:, None, :]


def time_nodes(s: float, t: float, rule: QuadratureRule = TIME_RULE):
    """Nodes and weights of the time rule on [s, t]; weights sum to t - s."""
    return s + (t - s) * rule.points, (t - s) * rule.weights


__all__ = [
    'QuadratureRule',
    'TRIANGLE_RULES',
    'EDGE_RULE',
    'TIME_RULE',
    'triangle_rule',
    'triangle_points',
    'edge_points',
    'time_nodes',
]
