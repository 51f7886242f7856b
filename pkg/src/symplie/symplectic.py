"""Symplectic form, Lefschetz operators and the primitive splitting of d."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, Optional, Tuple

from .errors import InvalidSymplecticStructure, PreconditionError
from .exterior import BASIS, DIM, FULL_MASK, KForm, interior, mask_indices, one, wedge
from .lie_algebra import LieAlgebraSpec
from .salamon import parse_form

STANDARD_OMEGA = "e12+e34+e56"


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class SymplecticStructure:
    omega: KForm
    inverse_bivector: Tuple[Tuple[object, ...], ...]
    volume: KForm
    _cache: Dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def vol(self):
        """Coefficient of e^{123456} in omega^3/3!."""
        return self.volume[FULL_MASK]

    @property
    def is_standard(self) -> bool:
        return self.omega == parse_form(STANDARD_OMEGA)

    def matrix(self) -> list:
        w = [[0] * DIM for _ in range(DIM)]
        for m, c in self.omega.coeffs.items():
            i, j = mask_indices(m)
            w[i - 1][j - 1] = c
            w[j - 1][i - 1] = -c
        return w


def make_symplectic(omega: KForm | str, spec: Optional[LieAlgebraSpec] = None, params=None) -> SymplecticStructure:
    """Build and check a symplectic structure; ``spec`` enables the dω = 0 check."""
    if isinstance(omega, str):
        omega = parse_form(omega, params, degree=2)
    if omega.degree != 2:
        raise InvalidSymplecticStructure("omega must be a 2-form")
    cube = wedge(wedge(omega, omega), omega)
    volume = cube / factorial(3) if all(_is_exact(c) for c in cube.coeffs.values()) else cube * (1 / 6)
    if volume.is_zero():
        raise InvalidSymplecticStructure("omega is degenerate (omega^3 = 0)")
    if spec is not None:
        domega = spec.d(omega)
        if not domega.is_zero():
            raise InvalidSymplecticStructure(f"omega is not closed: d omega = {domega}")
    w = [[0] * DIM for _ in range(DIM)]
    for m, c in omega.coeffs.items():
        i, j = mask_indices(m)
        w[i - 1][j - 1] = c
        w[j - 1][i - 1] = -c
    if all(_is_exact(x) for row in w for x in row):
        from .linalg import inverse

        pi = inverse(w)
        pi = [[int(x) if x.denominator == 1 else x for x in row] for row in pi]
    else:
        import numpy as np

        pi = np.linalg.inv(np.array(w, dtype=float)).tolist()
    ss = SymplecticStructure(omega=omega, inverse_bivector=tuple(tuple(r) for r in pi), volume=volume)
    lam = lefschetz_Lambda(ss, omega)
    # pin the global sign of the contraction so that Lambda(omega) = +3
    if lam[0] != 3 and not (not _is_exact(lam[0]) and abs(lam[0] - 3) < 1e-9):
        raise InvalidSymplecticStructure(f"Lambda(omega) = {lam[0]}, expected 3")
    return ss


def standard_structure() -> SymplecticStructure:
    return make_symplectic(STANDARD_OMEGA)


def lefschetz_L(ss: SymplecticStructure, a: KForm) -> KForm:
    return wedge(ss.omega, a)


def _lambda_blade(ss: SymplecticStructure, mask: int) -> KForm:
    cache = ss._cache.setdefault("lambda", {})
    out = cache.get(mask)
    if out is not None:
        return out
    deg = bin(mask).count("1")
    blade = KForm(deg, {mask: 1})
    acc: Dict[int, object] = {}
    pi = ss.inverse_bivector
    for i in range(DIM):
        for j in range(DIM):
            p = pi[i][j]
            if p == 0:
                continue
            t = interior(i + 1, interior(j + 1, blade))
            for m, c in t.coeffs.items():
                acc[m] = acc.get(m, 0) + p * c
    half = Fraction(1, 2) if all(_is_exact(x) for row in pi for x in row) else 0.5
    out = KForm(deg - 2, {m: c * half for m, c in acc.items()})
    cache[mask] = out
    return out


def lefschetz_Lambda(ss: SymplecticStructure, a: KForm) -> KForm:
    """Contraction with the inverse bivector, 1/2 sum Pi^{ij} iota_i iota_j."""
    if a.degree < 2:
        return KForm(0)
    out: Dict[int, object] = {}
    for m, c in a.coeffs.items():
        for mm, cc in _lambda_blade(ss, m).coeffs.items():
            out[mm] = out.get(mm, 0) + c * cc
    return KForm(a.degree - 2, out)


def is_primitive(ss: SymplecticStructure, a: KForm) -> bool:
    k = a.degree
    if k > 3:
        return a.is_zero()
    power = one()
    for _ in range(3 - k + 1):
        power = wedge(power, ss.omega)
    return wedge(power, a).is_zero()


def _scale(a: KForm, num: int, den: int) -> KForm:
    if all(_is_exact(c) for c in a.coeffs.values()):
        return a * Fraction(num, den)
    return a * (num / den)


def primitive_decompose(ss: SymplecticStructure, a: KForm) -> Tuple[KForm, KForm]:
    """Split a 3-form as p + omega ^ alpha with p primitive.

    Lambda(omega ^ alpha) = 2 alpha on 1-forms and Lambda kills P^3, so alpha = Lambda(a)/2.
    """
    if a.degree != 3:
        raise PreconditionError("primitive_decompose needs a 3-form")
    alpha = _scale(lefschetz_Lambda(ss, a), 1, 2)
    p = a - lefschetz_L(ss, alpha)
    return p, alpha


def dpm_split(spec: LieAlgebraSpec, ss: SymplecticStructure, p: KForm) -> Tuple[KForm, KForm]:
    """Return (d_plus p, d_minus p) with d p = d_plus p + omega ^ d_minus p."""
    k = p.degree
    if k > 3:
        raise PreconditionError("dpm_split is defined on primitive forms of degree <= 3")
    if not is_primitive(ss, p):
        raise PreconditionError(f"form is not primitive: {p}")
    dp = spec.d(p)
    if k == 0:
        return dp, KForm(0)
    # Lambda L on primitive (k-1)-forms is multiplication by 4 - k
    minus = _scale(lefschetz_Lambda(ss, dp), 1, 4 - k)
    plus = dp - lefschetz_L(ss, minus)
    return plus, minus


def d_plus(spec, ss, p):
    return dpm_split(spec, ss, p)[0]


def d_minus(spec, ss, p):
    return dpm_split(spec, ss, p)[1]


def lambda_matrix(ss: SymplecticStructure, degree: int) -> list:
    """Matrix of Lambda from k-forms to (k-2)-forms in lexicographic bases."""
    src, dst = BASIS[degree], BASIS[degree - 2]
    cols = [_lambda_blade(ss, m) for m in src]
    return [[col[t] for col in cols] for t in dst]
