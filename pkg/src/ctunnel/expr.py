"""Safe parser for closed-form potential expressions.

Grammar: the variable ``x``, numeric literals, ``+ - * / ^`` (``**`` is
accepted too), unary signs, parentheses and the functions ``exp`` and
``sqrt``.  The result is a Python callable that works on floats, numpy arrays
and :class:`~ctunnel.jets.Jet` objects, so derivatives come for free by
evaluating on a jet.
"""
from __future__ import annotations

import ast
import operator

from . import jets
from .errors import ConfigurationError

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {"exp": jets.exp, "sqrt": jets.sqrt}


def _compile(node):
    if isinstance(node, ast.Expression):
        return _compile(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        value = float(node.value)
        return lambda x: value
    if isinstance(node, ast.Name):
        if node.id != "x":
            raise ConfigurationError(f"unknown symbol {node.id!r} (only 'x' is allowed)")
        return lambda x: x
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile(node.left), _compile(node.right)
        if isinstance(node.op, ast.Pow) and isinstance(node.right, ast.Constant):
            p = float(node.right.value)
            if p.is_integer():
                p = int(p)
            return lambda x: left(x) ** p
        return lambda x: op(left(x), right(x))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        op = _UNARY[type(node.op)]
        inner = _compile(node.operand)
        return lambda x: op(inner(x))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
        fn = _FUNCS[node.func.id]
        inner = _compile(node.args[0])
        return lambda x: fn(inner(x))
    raise ConfigurationError(f"unsupported construct in potential expression: {ast.dump(node)}")


def parse_expression(text: str):
    """Compile ``text`` into a callable ``f(x)``.

    >>> f = parse_expression("(1 - x^2)^2")
    >>> f(0.0)
    1.0
    """
    if not isinstance(text, str) or not text.strip():
        raise ConfigurationError("potential expression must be a non-empty string")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ConfigurationError(f"cannot parse potential expression {text!r}: {exc.msg}") from None
    return _compile(tree)
