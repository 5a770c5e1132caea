"""Safe arithmetic expressions over jets.

Field choices in config files are short formulas such as
``"-m/sqrt(rho**2 + z**2)"``.  They are parsed with :mod:`ast` and only
numbers, named variables, the four operations, powers and a fixed set of
elementary functions are accepted.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Mapping

from . import jets

FUNCTIONS = {
    "exp": jets.exp,
    "log": jets.log,
    "ln": jets.log,
    "sqrt": jets.sqrt,
    "sin": jets.sin,
    "cos": jets.cos,
    "sinh": jets.sinh,
    "cosh": jets.cosh,
    "arctan": jets.arctan,
    "atan": jets.arctan,
}

CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


class ExpressionError(ValueError):
    pass


def _power(a, b):
    if isinstance(b, jets.Jet):
        return jets.exp(b * jets.log(a))
    if isinstance(a, jets.Jet):
        return jets.power(a, float(b))
    return a ** b


def _check(node, names):
    if isinstance(node, ast.Expression):
        return _check(node.body, names)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ExpressionError(f"unsupported constant {node.value!r}")
    elif isinstance(node, ast.Name):
        if node.id not in names and node.id not in CONSTANTS:
            raise ExpressionError(f"unknown name {node.id!r}")
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS and not isinstance(node.op, ast.Pow):
            raise ExpressionError(f"unsupported operator {type(node.op).__name__}")
        _check(node.left, names)
        _check(node.right, names)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ExpressionError(f"unsupported operator {type(node.op).__name__}")
        _check(node.operand, names)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ExpressionError("only elementary functions may be called")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument")
        _check(node.args[0], names)
    else:
        raise ExpressionError(f"unsupported syntax {type(node).__name__}")


def _eval(node, env):
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return env[node.id] if node.id in env else CONSTANTS[node.id]
    if isinstance(node, ast.BinOp):
        a, b = _eval(node.left, env), _eval(node.right, env)
        if isinstance(node.op, ast.Pow):
            return _power(a, b)
        return _BINOPS[type(node.op)](a, b)
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env)
        return -v if isinstance(node.op, ast.USub) else v
    return FUNCTIONS[node.func.id](_eval(node.args[0], env))


@dataclass(frozen=True)
class Expression:
    """A compiled formula in the given variable names (plus parameters)."""

    source: str
    variables: tuple[str, ...]
    params: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        try:
            tree = ast.parse(self.source, mode="eval")
        except SyntaxError as err:
            raise ExpressionError(f"cannot parse {self.source!r}: {err.msg}") from None
        _check(tree, set(self.variables) | {k for k, _ in self.params})
        object.__setattr__(self, "_tree", tree.body)

    def __call__(self, *args):
        if len(args) != len(self.variables):
            raise TypeError(f"expected {len(self.variables)} arguments")
        env = dict(self.params)
        env.update(zip(self.variables, args))
        return _eval(self._tree, env)

    @property
    def names(self) -> set[str]:
        return {n.id for n in ast.walk(self._tree) if isinstance(n, ast.Name)}

    def depends_on(self, name: str) -> bool:
        return name in self.names


def compile_expr(source: str, variables, params: Mapping[str, float] | None = None) -> Expression:
    return Expression(str(source), tuple(variables), tuple(sorted((params or {}).items())))
