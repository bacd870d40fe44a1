"""Safe evaluation of small arithmetic expressions in ``t`` and named parameters.

Used for the Pauli-string shorthand, e.g. ``"0.5*Z + g*cos(w*t)*X"``. Only
arithmetic, numeric literals, whitelisted NumPy functions and names drawn
from the supplied parameters are accepted.
"""

from __future__ import annotations

import ast
import re

import numpy as np

_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "log": np.log,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "floor": np.floor,
    "sign": np.sign,
    "heaviside": lambda x: np.heaviside(x, 1.0),
}
_CONSTS = {"pi": np.pi, "e": np.e}
_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.Mod)
_PAULI_RE = re.compile(r"^[IXYZ]+$")


def _check(node, names):
    if isinstance(node, ast.Expression):
        return _check(node.body, names)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ValueError(f"unsupported literal {node.value!r}")
        return
    if isinstance(node, ast.Name):
        if node.id not in names and node.id not in _CONSTS and node.id != "t":
            raise ValueError(f"unknown name {node.id!r}")
        return
    if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        _check(node.left, names)
        _check(node.right, names)
        return
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        _check(node.operand, names)
        return
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        if node.keywords:
            raise ValueError("keyword arguments are not allowed")
        for a in node.args:
            _check(a, names)
        return
    raise ValueError(f"unsupported expression element {ast.dump(node)}")


def compile_scalar(expr: str, params: dict | None = None):
    """Compile ``expr`` into a vectorized function of ``t``.

    Returns
    -------
    func : callable
        ``func(t)`` evaluates the expression elementwise on an array.
    depends_on_t : bool
        Whether the expression mentions ``t``.
    """
    params = dict(params or {})
    tree = ast.parse(expr.strip(), mode="eval")
    _check(tree, params)
    code = compile(tree, "<expr>", "eval")
    uses_t = any(isinstance(n, ast.Name) and n.id == "t" for n in ast.walk(tree))
    env = {"__builtins__": {}}
    env.update(_FUNCS)
    env.update(_CONSTS)
    env.update({k: float(v) for k, v in params.items()})

    def func(t):
        t = np.asarray(t, dtype=float)
        val = eval(code, env, {"t": t})  # noqa: S307 - AST whitelisted above
        return np.broadcast_to(np.asarray(val, dtype=float), t.shape).copy()

    return func, uses_t


def split_terms(expr: str) -> list[str]:
    """Split at top-level ``+``/``-`` signs, keeping the sign with each term."""
    terms, depth, cur = [], 0, ""
    s = expr.replace(" ", "")
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur and s[i - 1] not in "eE*/(":
            terms.append(cur)
            cur = ch if ch == "-" else ""
            continue
        if ch in "+-" and depth == 0 and cur and s[i - 1] in "eE" and not re.search(r"[0-9.]$", cur[:-1]):
            terms.append(cur)
            cur = ch if ch == "-" else ""
            continue
        cur += ch
    if cur:
        terms.append(cur)
    return terms


def split_pauli_factor(term: str) -> tuple[str, str]:
    """Split ``"coeff*PAULI"`` (or ``"1.1Z"``) into coefficient text and Pauli label."""
    m = re.match(r"^(.*?)(\*?)([IXYZ]+)$", term)
    if not m or not _PAULI_RE.match(m.group(3)):
        raise ValueError(f"term {term!r} does not end in a Pauli string")
    coeff = m.group(1)
    if coeff in ("", "+"):
        coeff = "1"
    elif coeff == "-":
        coeff = "-1"
    elif m.group(2) == "" and not re.match(r"^[+-]?[0-9.]+([eE][+-]?[0-9]+)?$", coeff):
        raise ValueError(f"ambiguous term {term!r}; write the coefficient with '*'")
    return coeff, m.group(3)
