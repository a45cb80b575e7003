"""
Formulas in (t, x, y) for loads and boundary deformations.

Formulas are parsed with sympy over the symbols ``t``, ``x``, ``y``, the
constant ``pi`` and the functions sin, cos, exp, log and sqrt; ``^`` and
``**`` both denote powers. Derivatives are symbolic, so time derivatives of
loads are exact, and evaluation goes through numpy-vectorised lambdas.
"""

import re
from functools import cached_property
from tokenize import TokenError
from typing import Dict, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from infrastructure.utilities.error_handling import SimulationError

T, X, Y = sympy.symbols("t x y", real=True)
SYMBOLS = {"t": T, "x": X, "y": Y}
VARIABLES = tuple(SYMBOLS)
FUNCTIONS = {"sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp, "log": sympy.log, "sqrt": sympy.sqrt}
NAMESPACE = {**SYMBOLS, **FUNCTIONS, "pi": sympy.pi}

_NUMBER = re.compile(r"\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_]\w*")
_CHARACTER = re.compile(r"[^\w\s.+\-*/^()]")
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


class FormulaError(SimulationError):
    """A formula string cannot be parsed or evaluated."""


def _check_tokens(text: str) -> None:
    bad = _CHARACTER.search(text)
    if bad:
        raise FormulaError(f"unexpected character {bad.group()!r} in {text!r}")
    for name in _NAME.findall(_NUMBER.sub(" ", text)):
        if name not in NAMESPACE:
            raise FormulaError(f"unknown name {name!r} in {text!r}")
    depth = 0
    for char in text:
        depth += {"(": 1, ")": -1}.get(char, 0)
        if depth < 0:
            raise FormulaError(f"unexpected ')' in {text!r}")
    if depth:
        raise FormulaError(f"expected ')' before the end of {text!r}")


def parse_formula(text: str) -> sympy.Expr:
    if not text.strip():
        raise FormulaError("empty formula")
    _check_tokens(text)
    try:
        expr = parse_expr(text, local_dict=dict(NAMESPACE), transformations=_TRANSFORMATIONS)
    except (SyntaxError, TokenError, TypeError, ValueError) as exc:
        raise FormulaError(f"unexpected end or operator in {text!r}: {exc}") from exc
    if not isinstance(expr, sympy.Expr):
        raise FormulaError(f"{text!r} is not a scalar formula")
    return expr


class Expression:
    """A scalar formula in (t, x, y)."""

    def __init__(self, source: Union[str, float, int, sympy.Expr]):
        if isinstance(source, sympy.Expr):
            self.expr = source
            self.source = str(source)
        elif isinstance(source, (int, float)) and not isinstance(source, bool):
            # repr keeps every digit through the lambdified printer
            self.expr = sympy.Float(repr(float(source)))
            self.source = repr(float(source))
        elif isinstance(source, str):
            self.expr = parse_formula(source)
            self.source = source
        else:
            raise FormulaError(f"formula must be a string or a number, got {type(source).__name__}")
        self._derivatives: Dict[str, "Expression"] = {}

    @cached_property
    def _function(self):
        return sympy.lambdify((T, X, Y), self.expr, modules="numpy")

    def __call__(self, t, x, y) -> np.ndarray:
        t, x, y = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float),
                                      np.asarray(y, dtype=float))
        with np.errstate(all="raise"):
            try:
                value = self._function(t, x, y)
            except (FloatingPointError, ZeroDivisionError) as exc:
                raise FormulaError(f"cannot evaluate {self.source!r}: {exc}") from exc
        value = np.broadcast_to(np.asarray(value, dtype=float), t.shape).copy()
        if not np.all(np.isfinite(value)):
            raise FormulaError(f"{self.source!r} is not finite at some evaluation points")
        return value

    def diff(self, var: str) -> "Expression":
        if var not in SYMBOLS:
            raise FormulaError(f"cannot differentiate with respect to {var!r}")
        if var not in self._derivatives:
            self._derivatives[var] = Expression(sympy.diff(self.expr, SYMBOLS[var]))
        return self._derivatives[var]

    def is_zero(self) -> bool:
        return bool(self.expr.is_zero)

    def depends_on(self, var: str) -> bool:
        return SYMBOLS.get(var) in self.expr.free_symbols

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"


class VectorExpression:
    """Two formulas giving a vector field of (t, x, y)."""

    def __init__(self, components: Sequence[Union[str, float, Expression]]):
        if len(components) != 2:
            raise FormulaError(f"vector formulas need 2 components, got {len(components)}")
        self.components = tuple(c if isinstance(c, Expression) else Expression(c) for c in components)

    @classmethod
    def zero(cls) -> "VectorExpression":
        return cls([0.0, 0.0])

    def __call__(self, t, points: np.ndarray) -> np.ndarray:
        """Values at (..., 2) points, shape (..., 2)."""
        points = np.asarray(points, dtype=float)
        x, y = points[..., 0], points[..., 1]
        return np.stack([c(t, x, y) for c in self.components], axis=-1)

    def diff(self, var: str) -> "VectorExpression":
        return VectorExpression([c.diff(var) for c in self.components])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def depends_on(self, var: str) -> bool:
        return any(c.depends_on(var) for c in self.components)

    @property
    def sources(self) -> Tuple[str, str]:
        return tuple(c.source for c in self.components)

    def __repr__(self) -> str:
        return f"VectorExpression({list(self.sources)!r})"


__all__ = ['FormulaError', 'Expression', 'VectorExpression', 'parse_formula']
