"""F-harmonic 3-forms: residuals, the reduced polynomial systems, and the loci
L_F / PL_F of the nilpotent and solvable examples.

A closed 3-form phi is F-harmonic when d F(phi) = 0 as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from . import coeff20
from .cohomology import CohomologyReport, canonical_kind, cohomology, representative
from .errors import ConsistencyError, PreconditionError
from .exterior import KForm
from .hitchin import F_def, NumericHitchin, Q_def
from .lie_algebra import LieAlgebraSpec
from .symplectic import SymplecticStructure, _is_exact, standard_structure


def _norm(form: KForm):
    return max((abs(c) for c in form.coeffs.values()), default=0)


@dataclass(frozen=True)
class FHarmonicResidual:
    d_phi_norm: object
    dF_phi_norm: object
    is_closed: bool
    is_fharmonic: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            "d_phi_norm": _jsonable(self.d_phi_norm),
            "dF_phi_norm": _jsonable(self.dF_phi_norm),
            "is_closed": self.is_closed,
            "is_fharmonic": self.is_fharmonic,
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


def residual(spec: LieAlgebraSpec, ss: SymplecticStructure, phi: KForm, tol: float = 1e-10) -> FHarmonicResidual:
    """Max-abs coefficient norms of d phi and d F(phi); exact zero test in rational mode."""
    dphi = _norm(spec.d(phi))
    dF = _norm(spec.d(F_def(ss, phi)))
    exact = _is_exact(dphi) and _is_exact(dF)
    closed = dphi == 0 if exact else dphi <= tol
    harmonic = closed and (dF == 0 if exact else dF <= tol)
    return FHarmonicResidual(dphi, dF, bool(closed), bool(harmonic))


# nilpotent example -----------------------------------------------------------------

NILPOTENT_CLASS_PARAMS = ("B", "C", "D", "E", "F", "G", "K-Q", "M-S", "O", "P", "R", "T")
NILPOTENT_EXACT_PARAMS = ("A", "I", "K+Q", "M+S")


def nilpotent_closedness_violations(c) -> List[str]:
    d = coeff20.as_dict(c)
    checks = {"H=0": d["H"], "J=0": d["J"], "L=R": d["L"] - d["R"], "N=T": d["N"] - d["T"]}
    return [k for k, v in checks.items() if v != 0]


def nilpotent_system_residual(c) -> Tuple[object, object, object, object]:
    """The four polynomials whose common zeros are the closed F-harmonic forms."""
    bad = nilpotent_closedness_violations(c)
    if bad:
        raise PreconditionError(f"phi is not closed; violated: {', '.join(bad)}")
    d = coeff20.as_dict(c)
    D, F, G, I, K, M, P, Q, R, S, T = (d[x] for x in "DFGIKMPQRST")
    r1 = G * (K - Q) - P * (M - S)
    r2 = P * (K - Q) + F * (M - S)
    return (D * (P * P + F * G), I * (P * P + F * G) + T * r1 + R * r2, D * r1, D * r2)


def nilpotent_class_params(c) -> Dict[str, object]:
    """de Rham class coordinates of a closed form (adding exact forms leaves them fixed)."""
    d = coeff20.as_dict(c)
    out = {x: d[x] for x in ("B", "C", "D", "E", "F", "G", "O", "P", "R", "T")}
    out["K-Q"] = d["K"] - d["Q"]
    out["M-S"] = d["M"] - d["S"]
    return {k: out[k] for k in NILPOTENT_CLASS_PARAMS}


STRATA = (
    "D=0, P^2+FG!=0",
    "D=P^2+FG=0, T[G(K-Q)-P(M-S)]+R[P(K-Q)+F(M-S)]=0",
    "D!=0, rank<=1",
)


@dataclass(frozen=True)
class LocusVerdict:
    in_LF: bool
    in_PLF: bool
    stratum: Optional[str] = None

    def __post_init__(self):
        if self.in_PLF and not self.in_LF:
            raise ConsistencyError("PL_F membership without L_F membership")

    def to_dict(self) -> Dict[str, object]:
        return {"in_LF": self.in_LF, "in_PLF": self.in_PLF, "stratum": self.stratum}


def _params(p: Mapping[str, object], names: Sequence[str]) -> Dict[str, object]:
    unknown = set(p) - set(names)
    if unknown:
        raise KeyError(f"unknown class parameters {sorted(unknown)}; expected a subset of {list(names)}")
    return {n: p.get(n, 0) for n in names}


def nilpotent_locus(params: Mapping[str, object]) -> LocusVerdict:
    """Stratum of a de Rham class given by {B,C,D,E,F,G,K-Q,M-S,O,P,R,T}."""
    p = _params(params, NILPOTENT_CLASS_PARAMS)
    D, F, G, P, R, T = (p[x] for x in "DFGPRT")
    kq, ms = p["K-Q"], p["M-S"]
    minor12 = G * F + P * P
    minor13 = G * kq - P * ms
    minor23 = P * kq + F * ms
    rank_le_1 = minor12 == 0 and minor13 == 0 and minor23 == 0
    mixed = T * minor13 + R * minor23
    if D == 0 and minor12 != 0:
        stratum = STRATA[0]
    elif D == 0 and minor12 == 0 and mixed == 0:
        stratum = STRATA[1]
    elif D != 0 and rank_le_1:
        stratum = STRATA[2]
    else:
        stratum = None
    perfect = (D == 0 and minor12 == 0 and mixed == 0) or rank_le_1
    return LocusVerdict(in_LF=stratum is not None, in_PLF=bool(perfect), stratum=stratum)


PRIMITIVE_TABLE = {
    # kind: (class params, exact params)
    "PH3": (("B", "C", "D", "E", "F", "G", "K", "M"), ("A", "I")),
    "SHplus3": (("B", "C", "D", "E", "F", "G"), ("A", "I", "K", "M")),
    "SHminus3": (("B", "C", "D", "E", "F", "G", "I", "K", "M"), ("A",)),
}


def nilpotent_primitive_locus(kind: str, params: Mapping[str, object]) -> LocusVerdict:
    kind = canonical_kind(kind)
    if kind == "H3":
        return nilpotent_locus(params)
    names = PRIMITIVE_TABLE[kind][0]
    p = _params(params, names)
    D, F, G = p["D"], p["F"], p["G"]
    I, K, M = p.get("I", 0), p.get("K", 0), p.get("M", 0)
    if kind == "PH3":
        lf = D * F * G == 0 and D * F * M == 0 and D * G * K == 0
        plf = F * G == 0 and D * F * M == 0 and D * G * K == 0
    elif kind == "SHplus3":
        lf = D * F * G == 0
        plf = F * G == 0 and D * F == 0 and D * G == 0
    else:
        lf = D * F * G == 0 and I * F * G == 0 and D * F * M == 0 and D * G * K == 0
        plf = lf
    return LocusVerdict(in_LF=bool(lf), in_PLF=bool(plf), stratum=None)


def nilpotent_primitive_Q_quarter(c):
    """Q/4 for closed primitive forms on the F-harmonic locus of the nilpotent example.

    With x = BG, y = CF, z = DE this is 2(x^2+y^2+z^2) - (x+y+z)^2; DFG = 0
    kills one of x, y, z, leaving a perfect square such as (x-y)^2.
    """
    d = coeff20.as_dict(c)
    x, y, z = d["B"] * d["G"], d["C"] * d["F"], d["D"] * d["E"]
    return 2 * (x * x + y * y + z * z) - (x + y + z) ** 2


# solvable example (rational presentation, standard omega) --------------------------

SOLVABLE_CLOSED = {
    "A-B": ("A", "B", -1), "C+D": ("C", "D", 1), "E+F": ("E", "F", 1), "G-H": ("G", "H", -1),
    "I+O": ("I", "O", 1), "J+P": ("J", "P", 1), "K+Q": ("K", "Q", 1), "L+R": ("L", "R", 1),
}


def solvable_closedness_violations(c) -> List[str]:
    d = coeff20.as_dict(c)
    return [k + "=0" for k, (x, y, s) in SOLVABLE_CLOSED.items() if d[x] + s * d[y] != 0]


def solvable_system_residual(c) -> Tuple[object, object, object, object]:
    bad = solvable_closedness_violations(c)
    if bad:
        raise PreconditionError(f"phi is not closed; violated: {', '.join(bad)}")
    d = coeff20.as_dict(c)
    A, C, E, G, M, N, S, T = (d[x] for x in "ACEGMNST")
    x = 4 * C * E - (M - N) ** 2 + (S - T) ** 2
    y = 4 * A * G + (M + N) ** 2 - (S + T) ** 2
    return (A * x, C * y, E * y, G * x)


def solvable_Q_factored(c):
    """Q/4 as [4AG+(M+N)^2-(S+T)^2][4CE-(M-N)^2+(S-T)^2] + (M^2-N^2-S^2+T^2)^2 (closed forms)."""
    d = coeff20.as_dict(c)
    A, C, E, G, M, N, S, T = (d[x] for x in "ACEGMNST")
    return (4 * A * G + (M + N) ** 2 - (S + T) ** 2) * (4 * C * E - (M - N) ** 2 + (S - T) ** 2) \
        + (M * M - N * N - S * S + T * T) ** 2


def solvable_Q_sign_check(c, ss: Optional[SymplecticStructure] = None) -> Tuple[object, bool]:
    """Return (Q, ok); ok is False only if an F-harmonic form has Q < 0."""
    bad = solvable_closedness_violations(c)
    if bad:
        raise PreconditionError(f"phi is not closed; violated: {', '.join(bad)}")
    ss = ss or standard_structure()
    Q = Q_def(ss, coeff20.to_form(c))
    q4 = solvable_Q_factored(c)
    if _is_exact(Q) and _is_exact(q4):
        if Fraction(Q) != 4 * Fraction(q4):
            raise ConsistencyError(f"factored Q/4 = {q4} but definitional Q/4 = {Fraction(Q) / 4}")
    elif abs(Q - 4 * q4) > 1e-9 * max(1.0, abs(Q)):
        raise ConsistencyError(f"factored Q/4 = {q4} but definitional Q/4 = {Q / 4}")
    harmonic = all(x == 0 for x in solvable_system_residual(c))
    return Q, (not harmonic) or Q >= 0


def solvable_locus(kind: str = "H3") -> LocusVerdict:
    """Every class has an F-harmonic representative (A=C=E=G=0); none has only F-harmonic ones."""
    canonical_kind(kind)
    return LocusVerdict(in_LF=True, in_PLF=False, stratum="all classes")


# numerical search inside a class ----------------------------------------------------

@dataclass
class SearchResult:
    success: bool
    residual: float
    phi: Optional[List[float]]
    restarts: int
    evaluations: int
    best_params: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "success": self.success,
            "residual": self.residual,
            "phi_blades": self.phi,
            "restarts": self.restarts,
            "evaluations": self.evaluations,
        }


class _NumericResidual:
    def __init__(self, spec: LieAlgebraSpec, ss: SymplecticStructure):
        self.hitchin = NumericHitchin(ss)
        self.d3 = np.array([[float(x) for x in row] for row in spec.d_matrix(3)])

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return np.concatenate([self.d3 @ v, self.d3 @ self.hitchin.F(v)])


def class_fiber(spec: LieAlgebraSpec, ss: SymplecticStructure, kind: str, coords: Sequence) -> Tuple[KForm, List[KForm], CohomologyReport]:
    report = cohomology(spec, ss, kind)
    base = representative(report, coords)
    exact = report.exact_space.basis
    return base, exact, report


def find_representative(spec: LieAlgebraSpec, ss: SymplecticStructure, coords: Sequence, kind: str = "H3",
                        seed: int = 0, restarts: int = 10, budget: int = 100_000, tol: float = 1e-10,
                        scale: float = 1.0) -> SearchResult:
    """Least-squares search for phi in the class with d phi = 0 and d F(phi) = 0."""
    base, exact, _ = class_fiber(spec, ss, kind, coords)
    b0 = np.array([float(x) for x in base.to_vector()])
    X = np.array([[float(x) for x in f.to_vector()] for f in exact]).T.reshape(len(b0), len(exact))
    res = _NumericResidual(spec, ss)
    rng = np.random.default_rng(seed)
    evals = 0
    best = (np.inf, None, None)
    n = X.shape[1]
    per_run = max(1, budget // max(restarts, 1))

    def fun(t):
        return res(b0 + X @ t)

    for k in range(restarts):
        if evals >= budget:
            break
        t0 = np.zeros(n) if k == 0 else rng.normal(scale=scale, size=n)
        if n == 0:
            r = fun(t0)
            evals += 1
            val = float(np.max(np.abs(r))) if r.size else 0.0
            best = min(best, (val, t0, b0), key=lambda x: x[0])
            break
        sol = least_squares(fun, t0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=per_run)
        evals += sol.nfev
        val = float(np.max(np.abs(sol.fun))) if sol.fun.size else 0.0
        if val < best[0]:
            best = (val, sol.x, b0 + X @ sol.x)
        if val <= tol:
            return SearchResult(True, val, best[2].tolist(), k + 1, evals, best[1].tolist())
    val, t, phi = best
    return SearchResult(val <= tol, val, None if phi is None else phi.tolist(), restarts, evals,
                        [] if t is None else list(t))


def q_constancy_probe(spec: LieAlgebraSpec, ss: SymplecticStructure, coords: Sequence, kind: str = "H3",
                      samples: int = 50, seed: int = 0, scale: float = 1.0) -> Dict[str, float]:
    """Sample Q over representatives of a class; a spread of 0 is the signature of PL_F."""
    base, exact, _ = class_fiber(spec, ss, kind, coords)
    hitchin = NumericHitchin(ss)
    b0 = np.array([float(x) for x in base.to_vector()])
    X = np.array([[float(x) for x in f.to_vector()] for f in exact]).T.reshape(len(b0), len(exact))
    rng = np.random.default_rng(seed)
    qs = [hitchin.Q(b0 + X @ rng.normal(scale=scale, size=X.shape[1])) for _ in range(samples)]
    return {"min": float(min(qs)), "max": float(max(qs)), "spread": float(max(qs) - min(qs))}
