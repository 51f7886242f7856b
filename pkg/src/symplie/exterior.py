"""Exterior algebra on the dual of a fixed 6-dimensional vector space.

Blades are stored as 6-bit masks (bit ``i - 1`` set for ``e^i``) and carry no
sign.  A :class:`KForm` maps masks to scalars.  Scalars are duck-typed: the
exact paths use ``int``/``Fraction``, the numerical paths use ``float``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Iterator, Mapping, Tuple

DIM = 6
FULL_MASK = (1 << DIM) - 1


def _popcount(m: int) -> int:
    return bin(m).count("1")


def mask_indices(mask: int) -> Tuple[int, ...]:
    """1-based indices of a blade mask, ascending."""
    return tuple(i + 1 for i in range(DIM) if mask >> i & 1)


def indices_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        if not 1 <= i <= DIM:
            raise ValueError(f"index {i} out of range 1..{DIM}")
        bit = 1 << (i - 1)
        if m & bit:
            raise ValueError(f"repeated index {i}")
        m |= bit
    return m


def _build_sign_table():
    table = [[0] * 64 for _ in range(64)]
    for a in range(64):
        for b in range(64):
            if a & b:
                continue
            inv = 0
            for i in range(DIM):
                if a >> i & 1:
                    # indices of b strictly below i that must hop over e^{i+1}
                    inv += _popcount(b & ((1 << i) - 1))
            table[a][b] = -1 if inv & 1 else 1
    return table


# _SIGN[a][b]: sign of e^a ^ e^b relative to e^(a|b); 0 if the blades overlap.
_SIGN = _build_sign_table()

# position (number of smaller indices) of index v inside a mask
_POS = [[0] + [_popcount(m & ((1 << (v - 1)) - 1)) for v in range(1, DIM + 1)] for m in range(64)]


def blade_sign(a: int, b: int) -> int:
    return _SIGN[a][b]


def basis_masks(degree: int) -> list[int]:
    """Masks of the given degree in lexicographic order of their index tuples."""
    return [indices_mask(c) for c in combinations(range(1, DIM + 1), degree)]


BASIS = {k: basis_masks(k) for k in range(DIM + 1)}
BASIS_INDEX = {k: {m: i for i, m in enumerate(BASIS[k])} for k in range(DIM + 1)}


class KForm:
    """A homogeneous alternating form of fixed degree.

    Treat instances as immutable; every operation returns a new form.
    """

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: Mapping[int, object] | None = None):
        if not 0 <= degree <= DIM:
            raise ValueError(f"degree {degree} out of range")
        clean: Dict[int, object] = {}
        if coeffs:
            for m, c in coeffs.items():
                if _popcount(m) != degree or m & ~FULL_MASK:
                    raise ValueError(f"blade {mask_indices(m)} does not have degree {degree}")
                if c != 0:
                    clean[m] = c
        self.degree = degree
        self.coeffs = clean

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, degree: int) -> "KForm":
        return cls(degree)

    @classmethod
    def blade(cls, *indices: int, coeff=1) -> "KForm":
        """``KForm.blade(1, 3, 5)`` is e^{135}; unsorted input picks up the permutation sign."""
        m = indices_mask(indices)
        sign = _permutation_sign(indices)
        return cls(len(indices), {m: sign * coeff})

    @classmethod
    def from_vector(cls, degree: int, values) -> "KForm":
        return cls(degree, dict(zip(BASIS[degree], values)))

    # access ---------------------------------------------------------------
    def __getitem__(self, mask: int):
        return self.coeffs.get(mask, 0)

    def coeff(self, *indices: int):
        m = indices_mask(indices)
        return _permutation_sign(indices) * self.coeffs.get(m, 0)

    def to_vector(self) -> list:
        return [self.coeffs.get(m, 0) for m in BASIS[self.degree]]

    def items(self) -> Iterator[Tuple[int, object]]:
        return iter(sorted(self.coeffs.items(), key=lambda kv: mask_indices(kv[0])))

    def is_zero(self) -> bool:
        return not self.coeffs

    def map_coeffs(self, fn) -> "KForm":
        return KForm(self.degree, {m: fn(c) for m, c in self.coeffs.items()})

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "KForm") -> "KForm":
        if not isinstance(other, KForm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return KForm(self.degree, out)

    def __neg__(self) -> "KForm":
        return KForm(self.degree, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __mul__(self, scalar) -> "KForm":
        if isinstance(scalar, KForm):
            return NotImplemented
        return KForm(self.degree, {m: c * scalar for m, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "KForm":
        if isinstance(scalar, int):
            scalar = Fraction(scalar)
        return KForm(self.degree, {m: c / scalar for m, c in self.coeffs.items()})

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if isinstance(other, KForm):
            return self.degree == other.degree and self.coeffs == other.coeffs
        if other == 0:
            return not self.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.degree, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        return f"KForm({self.degree}, {format_form(self)!r})"

    def __str__(self) -> str:
        return format_form(self)


def _permutation_sign(indices) -> int:
    idx = list(indices)
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


def one(scalar=1) -> KForm:
    return KForm(0, {0: scalar})


def e(*indices: int) -> KForm:
    """Basis blade shorthand: ``e(1, 3, 5)`` is e^{135}."""
    return KForm.blade(*indices)


def wedge(a: KForm, b: KForm) -> KForm:
    deg = a.degree + b.degree
    if deg > DIM:
        return KForm(DIM)
    out: Dict[int, object] = {}
    for ma, ca in a.coeffs.items():
        row = _SIGN[ma]
        for mb, cb in b.coeffs.items():
            s = row[mb]
            if s:
                m = ma | mb
                out[m] = out.get(m, 0) + (ca * cb if s > 0 else -(ca * cb))
    return KForm(deg, out)


def wedge_all(*forms: KForm) -> KForm:
    result = forms[0]
    for f in forms[1:]:
        result = wedge(result, f)
    return result


def interior(v: int, a: KForm) -> KForm:
    """Contraction with the basis vector e_v (1-based)."""
    if a.degree == 0:
        return KForm(0)
    bit = 1 << (v - 1)
    out = {}
    for m, c in a.coeffs.items():
        if m & bit:
            out[m ^ bit] = -c if _POS[m][v] & 1 else c
    return KForm(a.degree - 1, out)


def interior_vector(vec, a: KForm) -> KForm:
    """Contraction with ``sum(vec[i] * e_{i+1})``."""
    result = KForm(max(a.degree - 1, 0))
    for i, x in enumerate(vec):
        if x != 0:
            result = result + interior(i + 1, a) * x
    return result


def top_coefficient(a: KForm):
    """Coefficient of e^{123456} in a 6-form."""
    if a.degree != DIM:
        raise ValueError("top_coefficient needs a 6-form")
    return a.coeffs.get(FULL_MASK, 0)


def five_form_to_vector(a: KForm) -> list:
    """Write a 5-form as v (x) e^{123456}; returns the components of v.

    Uses v = sum_i e_i (x) (e^i ^ a), which is the inverse of v |-> iota_v e^{123456}.
    """
    if a.degree != 5:
        raise ValueError("five_form_to_vector needs a 5-form")
    return [top_coefficient(wedge(e(i), a)) for i in range(1, DIM + 1)]


def vector_to_five_form(vec) -> KForm:
    """Inverse of :func:`five_form_to_vector`."""
    return interior_vector(vec, KForm(DIM, {FULL_MASK: 1}))


def format_form(a: KForm) -> str:
    """Render as a monomial sum such as ``e134-e156`` or ``2*e12+1/2*e34``."""
    if not a.coeffs:
        return "0"
    parts = []
    for m, c in a.items():
        name = "e" + "".join(str(i) for i in mask_indices(m)) if m else "1"
        if c == 1:
            term, neg = name, False
        elif c == -1:
            term, neg = name, True
        else:
            neg = _is_negative(c)
            mag = -c if neg else c
            term = f"{_format_scalar(mag)}*{name}" if m else _format_scalar(mag)
        parts.append(("-" if neg else "+") + term)
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


def _is_negative(c) -> bool:
    try:
        return c < 0
    except TypeError:
        return False


def _format_scalar(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    if isinstance(c, float):
        return repr(c)
    return str(c)
