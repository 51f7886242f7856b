"""The 20 coordinates A..T of a 3-form relative to the standard symplectic basis.

    phi = A e135 + B e136 + C e145 + D e146 + E e235 + F e236 + G e245 + H e246
        + (I e1 + J e2)(e34 - e56) + (K e3 + L e4)(e12 - e56) + (M e5 + N e6)(e12 - e34)
        + (O e1 + P e2)(e34 + e56) + (Q e3 + R e4)(e12 + e56) + (S e5 + T e6)(e12 + e34)

The last six coordinates vanish exactly on primitive forms for omega = e12+e34+e56.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping, Sequence

import numpy as np

from .exterior import BASIS, KForm, e, wedge
from .linalg import inverse

NAMES = tuple("ABCDEFGHIJKLMNOPQRST")
INDEX = {n: i for i, n in enumerate(NAMES)}
PRIMITIVE_NAMES = NAMES[:14]


def _generators():
    pure = [e(1, 3, 5), e(1, 3, 6), e(1, 4, 5), e(1, 4, 6), e(2, 3, 5), e(2, 3, 6), e(2, 4, 5), e(2, 4, 6)]
    gens = list(pure)
    for sign in (-1, 1):
        w1 = e(3, 4) + e(5, 6) * sign
        w2 = e(1, 2) + e(5, 6) * sign
        w3 = e(1, 2) + e(3, 4) * sign
        gens += [
            wedge(e(1), w1), wedge(e(2), w1),
            wedge(e(3), w2), wedge(e(4), w2),
            wedge(e(5), w3), wedge(e(6), w3),
        ]
    return gens


GENERATORS = tuple(_generators())
# columns: generators in blade coordinates
TO_BLADES = [[g[m] for g in GENERATORS] for m in BASIS[3]]
FROM_BLADES = inverse(TO_BLADES)
TO_BLADES_F = np.array(TO_BLADES, dtype=float)
FROM_BLADES_F = np.array([[float(x) for x in row] for row in FROM_BLADES])


def to_form(coeffs) -> KForm:
    """Build the 3-form from 20 coordinates (sequence or name->value mapping)."""
    vals = as_list(coeffs)
    out = {}
    for row, m in zip(TO_BLADES, BASIS[3]):
        s = 0
        for a, x in zip(row, vals):
            if a and x:
                s = s + a * x
        out[m] = s
    return KForm(3, out)


def from_form(phi: KForm) -> list:
    if phi.degree != 3:
        raise ValueError("need a 3-form")
    v = phi.to_vector()
    out = []
    for row in FROM_BLADES:
        s = 0
        for a, x in zip(row, v):
            if a and x:
                s = s + (int(a) if a.denominator == 1 else a) * x
        out.append(s)
    return [_tidy(x) for x in out]


def _tidy(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def as_list(coeffs) -> list:
    if isinstance(coeffs, Mapping):
        unknown = set(coeffs) - set(NAMES)
        if unknown:
            raise KeyError(f"unknown coefficient names {sorted(unknown)}")
        return [coeffs.get(n, 0) for n in NAMES]
    vals = list(coeffs)
    if len(vals) != 20:
        raise ValueError(f"expected 20 coefficients, got {len(vals)}")
    return vals


def as_dict(coeffs) -> Dict[str, object]:
    return dict(zip(NAMES, as_list(coeffs)))


def make(**named) -> list:
    """``make(A=1, H=1)`` -> full 20-list with zeros elsewhere."""
    return as_list(named)


def to_blade_array(c: np.ndarray) -> np.ndarray:
    return TO_BLADES_F @ np.asarray(c, dtype=float)


def from_blade_array(v: np.ndarray) -> np.ndarray:
    return FROM_BLADES_F @ np.asarray(v, dtype=float)


def is_primitive_coeffs(coeffs: Sequence) -> bool:
    return all(x == 0 for x in as_list(coeffs)[14:])
