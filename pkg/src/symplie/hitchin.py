"""The quadratic endomorphism K, cubic 3-form F and quartic scalar Q of a 3-form.

Definitions (densities are divided by the volume omega^3/3! of the given omega):

    K(phi)(v)        = -iota_v phi ^ phi            (a 5-form, read as a vector)
    F(phi)(v1,v2,v3) = -2 phi(K(phi) v1, v2, v3)
    Q(phi)           = -phi ^ F(phi)

This module is the ground truth; :mod:`symplie.lemmas` holds the
20-coefficient closed forms, which are checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

import numpy as np

from .exterior import BASIS, DIM, FULL_MASK, KForm, five_form_to_vector, interior, mask_indices, wedge
from .symplectic import SymplecticStructure, _is_exact, is_primitive

Matrix = List[list]


def _div(x, vol):
    if vol == 1:
        return x
    if _is_exact(x) and _is_exact(vol):
        return Fraction(x) / vol
    return x / vol


def K_def(ss: SymplecticStructure, phi: KForm) -> Matrix:
    """K as a 6x6 matrix: column j holds the components of K(phi)(e_j)."""
    vol = ss.vol
    cols = []
    for j in range(1, DIM + 1):
        five = wedge(interior(j, phi), phi)
        cols.append([_div(-x, vol) for x in five_form_to_vector(five)])
    return [[cols[j][i] for j in range(DIM)] for i in range(DIM)]


def _phi_eval(phi: KForm, a: int, b: int, c: int):
    """phi(e_a, e_b, e_c) for 1-based indices."""
    if a == b or b == c or a == c:
        return 0
    return phi.coeff(a, b, c)


def F_from_K(phi: KForm, K: Matrix) -> KForm:
    out = {}
    for m in BASIS[3]:
        i, j, k = mask_indices(m)
        s = 0
        for a in range(1, DIM + 1):
            kai = K[a - 1][i - 1]
            if kai:
                val = _phi_eval(phi, a, j, k)
                if val:
                    s = s + kai * val
        out[m] = -2 * s
    return KForm(3, out)


def F_def(ss: SymplecticStructure, phi: KForm) -> KForm:
    return F_from_K(phi, K_def(ss, phi))


def F_trilinear(ss: SymplecticStructure, phi: KForm, K: Optional[Matrix] = None):
    """All 216 values -2 phi(K e_i, e_j, e_k); used to confirm F is alternating."""
    K = K_def(ss, phi) if K is None else K
    t = {}
    for i in range(1, DIM + 1):
        for j in range(1, DIM + 1):
            for k in range(1, DIM + 1):
                t[i, j, k] = -2 * sum(K[a - 1][i - 1] * _phi_eval(phi, a, j, k) for a in range(1, DIM + 1))
    return t


def Q_def(ss: SymplecticStructure, phi: KForm, F: Optional[KForm] = None):
    F = F_def(ss, phi) if F is None else F
    return _div(-wedge(phi, F)[FULL_MASK], ss.vol)


def KFQ_def(ss: SymplecticStructure, phi: KForm):
    K = K_def(ss, phi)
    F = F_from_K(phi, K)
    return K, F, Q_def(ss, phi, F)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    return [[sum(a[i][k] * b[k][j] for k in range(DIM)) for j in range(DIM)] for i in range(DIM)]


def _max_abs(values) -> object:
    return max((abs(v) for v in values), default=0)


def prop31_check(ss: SymplecticStructure, phi: KForm):
    """Residuals of K o K = Q/4 id, K(F) = -K Q, F(F) = -phi Q^2 (max abs entry each)."""
    K, F, Q = KFQ_def(ss, phi)
    KK = matmul(K, K)
    r1 = _max_abs(KK[i][j] - (Q / 4 if not _is_exact(Q) else Fraction(Q) / 4) * (i == j)
                  for i in range(DIM) for j in range(DIM))
    KF = K_def(ss, F)
    r2 = _max_abs(KF[i][j] + K[i][j] * Q for i in range(DIM) for j in range(DIM))
    FF = F_def(ss, F)
    r3 = _max_abs((FF + phi * (Q * Q)).coeffs.values())
    return r1, r2, r3


@dataclass(frozen=True)
class HitchinBundle:
    K: Matrix
    Fform: KForm
    Qscalar: object
    Jcomplex: Optional[Matrix] = None
    norm_sq: Optional[float] = None
    phi_hat: Optional[KForm] = None
    nonnegative_Q: bool = False

    @property
    def has_complex(self) -> bool:
        return self.Jcomplex is not None


def complex_data(ss: SymplecticStructure, phi: KForm) -> HitchinBundle:
    """K, F, Q and, when Q < 0, J = 2K/sqrt(-Q), |phi|^2 = sqrt(-Q), phi_hat = F/|phi|^2."""
    K, F, Q = KFQ_def(ss, phi)
    if Q >= 0:
        return HitchinBundle(K=K, Fform=F, Qscalar=Q, nonnegative_Q=True)
    norm_sq = math.sqrt(-float(Q))
    J = [[2 * float(x) / norm_sq for x in row] for row in K]
    phi_hat = F.map_coeffs(lambda c: float(c) / norm_sq)
    return HitchinBundle(K=K, Fform=F, Qscalar=Q, Jcomplex=J, norm_sq=norm_sq, phi_hat=phi_hat)


# fast numerical evaluation ---------------------------------------------------

class NumericHitchin:
    """Vectorised K/F/Q in the lexicographic blade basis of 3-forms.

    K is quadratic in phi, so it is stored as the symmetric bilinear tensor
    obtained by polarising :func:`K_def` on pairs of basis blades.  F then
    follows from its definition with the full antisymmetric tensor of phi.
    """

    def __init__(self, ss: SymplecticStructure):
        blades = [KForm(3, {m: 1}) for m in BASIS[3]]
        n = len(blades)
        diag = [np.array(K_def(ss, b), dtype=float) for b in blades]
        T = np.zeros((DIM, DIM, n, n))
        for p in range(n):
            T[:, :, p, p] = diag[p]
            for q in range(p + 1, n):
                both = np.array(K_def(ss, blades[p] + blades[q]), dtype=float)
                T[:, :, p, q] = T[:, :, q, p] = (both - diag[p] - diag[q]) / 2
        self.Kt = T
        # full antisymmetric embedding: phi_full[a,b,c] = sum_p E[p,a,b,c] phi_p
        E = np.zeros((n, DIM, DIM, DIM))
        for p, m in enumerate(BASIS[3]):
            i, j, k = (x - 1 for x in mask_indices(m))
            for (a, b, c), s in _perms(i, j, k):
                E[p, a, b, c] = s
        self.E = E
        self.tri = np.array([[x - 1 for x in mask_indices(m)] for m in BASIS[3]])
        # phi ^ psi top coefficient as a bilinear form on blade vectors
        W = np.zeros((n, n))
        for p, mp in enumerate(BASIS[3]):
            for q, mq in enumerate(BASIS[3]):
                W[p, q] = wedge(KForm(3, {mp: 1}), KForm(3, {mq: 1}))[FULL_MASK]
        self.W = W
        self.vol = float(ss.vol)

    def K(self, phi: np.ndarray) -> np.ndarray:
        return np.einsum("ijpq,p,q->ij", self.Kt, phi, phi)

    def F(self, phi: np.ndarray, K: Optional[np.ndarray] = None) -> np.ndarray:
        K = self.K(phi) if K is None else K
        full = np.einsum("pabc,p->abc", self.E, phi)
        Ffull = -2.0 * np.einsum("ai,ajk->ijk", K, full)
        t = self.tri
        return Ffull[t[:, 0], t[:, 1], t[:, 2]]

    def Q(self, phi: np.ndarray, F: Optional[np.ndarray] = None) -> float:
        F = self.F(phi) if F is None else F
        return -float(phi @ self.W @ F) / self.vol

    def wedge_top(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(a @ self.W @ b)


def _perms(i, j, k):
    return [
        ((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
        ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1),
    ]


def is_primitive_3form(ss: SymplecticStructure, phi: KForm) -> bool:
    return is_primitive(ss, phi)


# gradient identities --------------------------------------------------------

@dataclass(frozen=True)
class GradientCheck:
    max_rel_error: float
    euler_residual: object
    variational_max_rel_error: Optional[float] = None


def hitchin_gradient_check(c, h: float = 1e-5, directions: int = 0, seed: int = 0,
                           numeric: Optional[NumericHitchin] = None) -> GradientCheck:
    """Central differences of Q against the +-8/+-16 scaled hatted coefficients.

    ``c`` is a Coeff20 (standard omega).  Errors are relative to the largest
    gradient entry (or 1, whichever is bigger).  The Euler identity
    4Q = sum x dQ/dx is evaluated in the scalar type of ``c``.  With
    ``directions > 0`` the variational identity dQ(psi) = -4 psi ^ F(phi) is
    also checked along that many random directions.
    """
    from . import coeff20, lemmas
    from .symplectic import standard_structure

    nh = numeric or NumericHitchin(standard_structure())
    vals = coeff20.as_list(c)
    grad = lemmas.Q_gradient_closed(vals)
    g = np.array([float(grad[n]) for n in coeff20.NAMES])
    x0 = np.array([float(v) for v in vals])
    fd = np.empty(20)
    for i in range(20):
        step = np.zeros(20)
        step[i] = h
        fd[i] = (nh.Q(coeff20.to_blade_array(x0 + step)) - nh.Q(coeff20.to_blade_array(x0 - step))) / (2 * h)
    scale = max(float(np.max(np.abs(g))), 1.0)
    err = float(np.max(np.abs(fd - g))) / scale

    euler = 4 * lemmas.Q_closed(vals) - sum(v * grad[n] for v, n in zip(vals, coeff20.NAMES))

    var_err = None
    if directions:
        rng = np.random.default_rng(seed)
        phi = coeff20.to_blade_array(x0)
        F = nh.F(phi)
        worst = 0.0
        for _ in range(directions):
            psi = rng.normal(size=20)
            fd_dir = (nh.Q(phi + h * psi) - nh.Q(phi - h * psi)) / (2 * h)
            exact = -4 * nh.wedge_top(psi, F) / nh.vol
            worst = max(worst, abs(fd_dir - exact) / max(abs(exact), 1.0))
        var_err = worst
    return GradientCheck(max_rel_error=err, euler_residual=euler, variational_max_rel_error=var_err)
