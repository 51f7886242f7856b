"""Parsing and printing of Salamon-style Lie algebra notation.

A Salamon string lists the differentials of the six dual basis covectors,
e.g. ``(0,0,0,e15,0,e13)`` or ``(-λ e^{15}, λ e^{25}, -λ e36, λ e46, 0, 0)``.
Each field is ``0`` or a signed sum of monomials; a monomial is ``e`` followed
by its indices (``e15``, ``e^{15}``, ``e^15``), optionally preceded by scalar
factors that are rational literals or declared parameter names.
"""

from __future__ import annotations

import ast
import math
import operator
import re
from fractions import Fraction
from typing import List, Mapping, Optional, Tuple

from .exterior import KForm, format_form, indices_mask, _permutation_sign

PARAM_ALIASES = {"lambda": "λ", "lam": "λ"}


class ParseError(ValueError):
    """Malformed notation; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<mono>e(?:\^|_)?(?:\{[^}]*\}|\d+))
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<name>[^\W\d_][\w]*)
  | (?P<op>[-+*,()])
    """,
    re.VERBOSE | re.UNICODE,
)


def _tokenize(s: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None:
            raise ParseError(f"unexpected character {s[pos]!r}", pos, s)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    return tokens


def _monomial_indices(tok: str, pos: int, text: str) -> Tuple[int, ...]:
    body = tok[1:].lstrip("^_")
    if body.startswith("{"):
        body = body[1:-1]
    if not body or not body.isdigit():
        raise ParseError(f"malformed monomial {tok!r}", pos, text)
    idx = tuple(int(ch) for ch in body)
    for i in idx:
        if not 1 <= i <= 6:
            raise ParseError(f"index {i} out of range 1..6 in {tok!r}", pos, text)
    if len(set(idx)) != len(idx):
        raise ParseError(f"repeated index in monomial {tok!r}", pos, text)
    return idx


def _resolve_param(name: str, params: Mapping[str, object], pos: int, text: str):
    key = PARAM_ALIASES.get(name, name)
    for cand in (name, key):
        if cand in params:
            return params[cand]
    for k, v in params.items():
        if PARAM_ALIASES.get(k, k) == key:
            return v
    raise ParseError(f"unknown parameter {name!r}", pos, text)


def _parse_number(tok: str, pos: int, text: str):
    if "/" in tok:
        if int(tok.split("/")[1]) == 0:
            raise ParseError(f"zero denominator in {tok!r}", pos, text)
        return Fraction(tok)
    if "." in tok:
        return Fraction(tok)
    return int(tok)


def _parse_sum(tokens, i, text, params, degree, stop=(",", ")")):
    """Parse a signed sum of monomials starting at tokens[i]; returns (form, next_i)."""
    coeffs = {}
    first = True
    while i < len(tokens) and not (tokens[i][0] == "op" and tokens[i][1] in stop):
        sign = 1
        kind, tok, pos = tokens[i]
        if kind == "op" and tok in "+-":
            sign = -1 if tok == "-" else 1
            i += 1
        elif not first:
            raise ParseError(f"expected '+' or '-' before {tok!r}", pos, text)
        first = False
        scalar = sign
        saw_factor = False
        while True:
            if i >= len(tokens):
                raise ParseError("unexpected end of input, expected a monomial", len(text), text)
            kind, tok, pos = tokens[i]
            if kind == "num":
                scalar = scalar * _parse_number(tok, pos, text)
            elif kind == "name":
                scalar = scalar * _resolve_param(tok, params, pos, text)
            elif kind == "mono":
                break
            elif kind == "op" and tok == "*" and saw_factor:
                i += 1
                continue
            else:
                raise ParseError(f"unexpected {tok!r}, expected a monomial", pos, text)
            saw_factor = True
            i += 1
        idx = _monomial_indices(tok, pos, text)
        if degree is None:
            degree = len(idx)
        elif len(idx) != degree:
            raise ParseError(f"monomial {tok!r} has degree {len(idx)}, expected {degree}", pos, text)
        m = indices_mask(idx)
        coeffs[m] = coeffs.get(m, 0) + scalar * _permutation_sign(idx)
        i += 1
    return degree, coeffs, i


def _parse_field(tokens, i, text, params, degree):
    """A field is either the literal ``0`` or a monomial sum."""
    if i >= len(tokens) or (tokens[i][0] == "op" and tokens[i][1] in ",)"):
        pos = tokens[i][2] if i < len(tokens) else len(text)
        raise ParseError("empty field", pos, text)
    if i < len(tokens) and tokens[i][0] == "num" and tokens[i][1] in ("0", "0.0"):
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if nxt is None or (nxt[0] == "op" and nxt[1] in ",)"):
            return KForm(degree if degree is not None else 0), i + 1
    deg, coeffs, i = _parse_sum(tokens, i, text, params, degree)
    if deg is None:
        deg = degree if degree is not None else 0
    return KForm(deg, coeffs), i


def parse_form(s: str, params: Optional[Mapping[str, object]] = None, degree: Optional[int] = None) -> KForm:
    """Parse a single monomial sum such as ``e12+e34+e56`` or ``e134-e156``."""
    params = params or {}
    tokens = _tokenize(s)
    if not tokens:
        raise ParseError("empty form", 0, s)
    form, i = _parse_field(tokens, 0, s, params, degree)
    if i != len(tokens):
        raise ParseError(f"unexpected {tokens[i][1]!r}", tokens[i][2], s)
    return form


def parse_salamon_fields(s: str, params: Optional[Mapping[str, object]] = None) -> List[KForm]:
    """Parse a six-field Salamon string into the 2-forms d e^1, ..., d e^6."""
    params = params or {}
    tokens = _tokenize(s)
    i = 0
    closing = False
    if tokens and tokens[0] == ("op", "(", tokens[0][2]):
        i = 1
        closing = True
    fields = []
    while True:
        form, i = _parse_field(tokens, i, s, params, 2)
        fields.append(form)
        if i < len(tokens) and tokens[i][1] == ",":
            i += 1
            continue
        break
    if closing:
        if i >= len(tokens) or tokens[i][1] != ")":
            pos = tokens[i][2] if i < len(tokens) else len(s)
            raise ParseError("expected ')'", pos, s)
        i += 1
    if i != len(tokens):
        raise ParseError(f"unexpected {tokens[i][1]!r}", tokens[i][2], s)
    if len(fields) != 6:
        raise ParseError(f"expected 6 fields, got {len(fields)}", len(s), s)
    return fields


def format_salamon(d_images) -> str:
    return "(" + ",".join(format_form(f) for f in d_images) + ")"


# parameter expressions -------------------------------------------------------

_FUNCS = {"sqrt": math.sqrt, "log": math.log, "exp": math.exp}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def eval_param(value):
    """Resolve a parameter value: numbers pass through, strings are rational
    literals or small expressions like ``log((3+sqrt5)/2)``."""
    if isinstance(value, (int, float, Fraction)):
        return value
    if not isinstance(value, str):
        raise ValueError(f"unsupported parameter value {value!r}")
    text = value.strip()
    try:
        return Fraction(text)
    except ValueError:
        pass
    text = re.sub(r"sqrt(\d+(?:\.\d+)?)", r"sqrt(\1)", text)
    tree = ast.parse(text, mode="eval")
    return float(_eval_node(tree.body))


def _eval_node(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        return _FUNCS[node.func.id](*[_eval_node(a) for a in node.args])
    raise ValueError(f"unsupported expression element {ast.dump(node)}")
