"""Numeric tokens in configuration files.

A token is a JSON number or a string such as "1.5", "sqrt(2)", "3/7",
"-sqrt(2)" or "1+2*sqrt(3)". Strings are evaluated from their syntax tree,
so nothing beyond arithmetic and ``sqrt`` is ever executed.
"""
from __future__ import annotations

import ast

import mpmath

from .errors import ConfigError

WORKING_DPS = 50

_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b,
           ast.Mult: lambda a, b: a * b, ast.Div: lambda a, b: a / b}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return mpmath.mpf(str(node.value)) if isinstance(node.value, float) else mpmath.mpf(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        v = _eval(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt" \
            and len(node.args) == 1 and not node.keywords:
        arg = _eval(node.args[0])
        if arg < 0:
            raise ConfigError("sqrt of a negative number")
        return mpmath.sqrt(arg)
    raise ConfigError(f"unsupported syntax in numeric token: {ast.dump(node)}")


def parse_mp(token) -> mpmath.mpf:
    """Token to an mpmath number at WORKING_DPS digits."""
    with mpmath.workdps(WORKING_DPS):
        if isinstance(token, bool):
            raise ConfigError(f"not a number: {token!r}")
        if isinstance(token, int):
            return mpmath.mpf(token)
        if isinstance(token, float):
            return mpmath.mpf(token)
        if not isinstance(token, str):
            raise ConfigError(f"not a number: {token!r}")
        try:
            tree = ast.parse(token.strip(), mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse numeric token {token!r}") from exc
        try:
            return _eval(tree)
        except ZeroDivisionError as exc:
            raise ConfigError(f"division by zero in {token!r}") from exc


def parse_float(token) -> float:
    return float(parse_mp(token))


def parse_vector(tokens) -> list[float]:
    if not isinstance(tokens, list):
        raise ConfigError(f"expected a list of numbers, got {tokens!r}")
    return [parse_float(t) for t in tokens]
