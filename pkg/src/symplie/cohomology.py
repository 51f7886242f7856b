"""Exact H^3, PH^3, SH_+^3 and SH_-^3 of a symplectic Lie algebra.

All subspaces live in the 20-dimensional space of 3-forms (or the relevant
form space) written in the lexicographic blade basis, and are stored in
reduced row echelon form so that bases are canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .errors import DomainError, PreconditionError
from .exterior import BASIS, KForm
from .lie_algebra import LieAlgebraSpec
from .linalg import in_span, nullspace, reduce_against, rref
from .symplectic import SymplecticStructure, dpm_split, lefschetz_L, _is_exact

KINDS = ("H3", "PH3", "SHplus3", "SHminus3")
KIND_ALIASES = {
    "H3": "H3", "H": "H3",
    "PH3": "PH3", "PH": "PH3",
    "SHplus3": "SHplus3", "SH+3": "SHplus3", "SH+": "SHplus3", "SHplus": "SHplus3",
    "SHminus3": "SHminus3", "SH-3": "SHminus3", "SH-": "SHminus3", "SHminus": "SHminus3",
}


def canonical_kind(kind: str) -> str:
    try:
        return KIND_ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown cohomology kind {kind!r}; expected one of {KINDS}") from None


@dataclass(frozen=True)
class Subspace:
    ambient_degree: int
    rows: Tuple[Tuple[Fraction, ...], ...]
    pivots: Tuple[int, ...]

    @classmethod
    def spanned_by(cls, degree: int, vectors: Sequence[Sequence]) -> "Subspace":
        red, piv = rref(vectors) if vectors else ([], [])
        return cls(degree, tuple(tuple(r) for r in red), tuple(piv))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> List[KForm]:
        return [KForm.from_vector(self.ambient_degree, r) for r in self.rows]

    def contains(self, a: KForm | Sequence) -> bool:
        v = a.to_vector() if isinstance(a, KForm) else a
        return in_span(v, self.rows, self.pivots)

    def reduce(self, v: Sequence) -> List[Fraction]:
        return reduce_against(v, self.rows, self.pivots)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.rows)


def kernel_and_image(domain: Sequence[Sequence], images: Sequence[Sequence], domain_degree: int, target_degree: int):
    """Kernel and image of a linear map given by its values on a spanning set.

    ``domain`` holds ambient coordinates of the domain basis vectors and
    ``images`` the ambient coordinates of their images.
    """
    n_dom = len(domain)
    if n_dom == 0:
        return Subspace.spanned_by(domain_degree, []), Subspace.spanned_by(target_degree, [])
    # columns of the matrix are the images
    mat = [list(col) for col in zip(*images)] if images and len(images[0]) else []
    if mat:
        coeff_kernel = nullspace(mat, n_dom)
    else:
        coeff_kernel = [[Fraction(int(i == j)) for j in range(n_dom)] for i in range(n_dom)]
    kernel_vectors = [
        [sum(c * x for c, x in zip(coeffs, col)) for col in zip(*domain)] for coeffs in coeff_kernel
    ]
    return (
        Subspace.spanned_by(domain_degree, kernel_vectors),
        Subspace.spanned_by(target_degree, [list(v) for v in images if any(x != 0 for x in v)]),
    )


def _identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _require_exact(spec: LieAlgebraSpec, ss: SymplecticStructure):
    coeffs = [c for f in spec.d_images for c in f.coeffs.values()] + list(ss.omega.coeffs.values())
    if not all(_is_exact(c) for c in coeffs):
        raise PreconditionError(
            "cohomology needs exact rational structure constants; use the rational presentation"
        )
    if not spec.d(ss.omega).is_zero():
        from .errors import InvalidSymplecticStructure

        raise InvalidSymplecticStructure("omega is not d-closed for this algebra")


def primitive_space(ss: SymplecticStructure, degree: int) -> Subspace:
    """P^k as the kernel of omega^(4-k) ^ (.) on k-forms."""
    power = KForm(0, {0: 1})
    for _ in range(3 - degree + 1):
        power = lefschetz_L(ss, power)
    from .exterior import wedge

    dom = _identity(len(BASIS[degree]))
    imgs = [wedge(power, KForm.from_vector(degree, v)).to_vector() for v in dom]
    return kernel_and_image(dom, imgs, degree, degree + 2 * (4 - degree))[0]


@dataclass(frozen=True)
class CohomologyReport:
    kind: str
    dimension: int
    basis: Tuple[KForm, ...]
    closed_space: Subspace
    exact_space: Subspace
    complement: Subspace
    primitive: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dimension": self.dimension,
            "basis": [str(b) for b in self.basis],
            "closed_dimension": self.closed_space.dim,
            "exact_dimension": self.exact_space.dim,
        }


@dataclass
class _Spaces:
    spec: LieAlgebraSpec
    ss: SymplecticStructure

    def __post_init__(self):
        self._memo: Dict[str, Subspace] = {}

    def get(self, key):
        if key not in self._memo:
            self._memo[key] = getattr(self, "_" + key)()
        return self._memo[key]

    def _P3(self):
        return primitive_space(self.ss, 3)

    def _P2(self):
        return primitive_space(self.ss, 2)

    def _map_on(self, basis: Subspace, fn, target_degree):
        dom = [list(r) for r in basis.rows]
        imgs = [fn(KForm.from_vector(basis.ambient_degree, r)).to_vector() for r in dom]
        return kernel_and_image(dom, imgs, basis.ambient_degree, target_degree)

    def _closed3(self):
        return self._map_on(Subspace.spanned_by(3, _identity(20)), self.spec.d, 4)[0]

    def _exact3(self):
        return self._map_on(Subspace.spanned_by(2, _identity(15)), self.spec.d, 3)[1]

    def _P3_closed(self):
        return self._map_on(self.get("P3"), self.spec.d, 4)[0]

    def _P3_exact(self):
        return intersect(self.get("P3"), self.get("exact3"))

    def _dpdm(self):
        def dpdm(p):
            minus = dpm_split(self.spec, self.ss, p)[1]
            return dpm_split(self.spec, self.ss, minus)[0]

        return self._map_on(self.get("P3"), dpdm, 3)

    def _dpdm_kernel(self):
        return self.get("dpdm")[0]

    def _dpdm_image(self):
        return self.get("dpdm")[1]

    def _dminus_kernel(self):
        return self._map_on(self.get("P3"), lambda p: dpm_split(self.spec, self.ss, p)[1], 2)[0]

    def _dplus_image(self):
        return self._map_on(self.get("P2"), lambda p: dpm_split(self.spec, self.ss, p)[0], 3)[1]


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection of two subspaces of the same ambient space."""
    if a.dim == 0 or b.dim == 0:
        return Subspace.spanned_by(a.ambient_degree, [])
    # x = sum s_i a_i = sum t_j b_j  <=>  [A^T | -B^T] (s, t) = 0
    cols = [list(r) for r in a.rows] + [[-x for x in r] for r in b.rows]
    mat = [list(row) for row in zip(*cols)]
    ker = nullspace(mat, len(cols))
    vecs = [[sum(s * x for s, x in zip(k[: a.dim], col)) for col in zip(*a.rows)] for k in ker]
    return Subspace.spanned_by(a.ambient_degree, vecs)


_SPACE_KEYS = {
    "H3": ("closed3", "exact3", False),
    "PH3": ("P3_closed", "P3_exact", True),
    "SHplus3": ("dpdm_kernel", "dplus_image", True),
    "SHminus3": ("dminus_kernel", "dpdm_image", True),
}


def _quotient(closed: Subspace, exact: Subspace) -> Subspace:
    reduced = [exact.reduce(r) for r in closed.rows]
    return Subspace.spanned_by(closed.ambient_degree, [r for r in reduced if any(x != 0 for x in r)])


class CohomologyEngine:
    """Caches the shared subspaces so the four kinds reuse each other's work."""

    def __init__(self, spec: LieAlgebraSpec, ss: SymplecticStructure):
        _require_exact(spec, ss)
        self.spec, self.ss = spec, ss
        self._spaces = _Spaces(spec, ss)
        self._reports: Dict[str, CohomologyReport] = {}

    def space(self, key: str) -> Subspace:
        return self._spaces.get(key)

    def report(self, kind: str) -> CohomologyReport:
        kind = canonical_kind(kind)
        if kind not in self._reports:
            ckey, ekey, primitive = _SPACE_KEYS[kind]
            closed, exact = self.space(ckey), self.space(ekey)
            if not closed.contains_subspace(exact):
                raise AssertionError(f"{kind}: exact space is not contained in the closed space")
            comp = _quotient(closed, exact)
            if comp.dim != closed.dim - exact.dim:
                raise AssertionError(f"{kind}: quotient dimension mismatch")
            self._reports[kind] = CohomologyReport(
                kind=kind,
                dimension=comp.dim,
                basis=tuple(comp.basis),
                closed_space=closed,
                exact_space=exact,
                complement=comp,
                primitive=primitive,
            )
        return self._reports[kind]


def cohomology(spec: LieAlgebraSpec, ss: SymplecticStructure, kind: str) -> CohomologyReport:
    return CohomologyEngine(spec, ss).report(kind)


_MEMBERSHIP = {
    "H3": "d-closed",
    "PH3": "d-closed",
    "SHplus3": "d_plus d_minus-closed",
    "SHminus3": "d_minus-closed",
}


def class_coordinates(report: CohomologyReport, phi: KForm, ss: SymplecticStructure | None = None) -> List[Fraction]:
    """Coordinates of [phi] in ``report.basis``; independent of the representative."""
    if phi.degree != 3:
        raise DomainError("class_coordinates needs a 3-form")
    v = phi.to_vector()
    if report.primitive and ss is not None:
        from .symplectic import is_primitive

        if not is_primitive(ss, phi):
            raise DomainError(f"phi is not primitive, so it has no class in {report.kind}")
    if not report.closed_space.contains(v):
        raise DomainError(f"phi is not {_MEMBERSHIP[report.kind]}; no class in {report.kind}")
    r = report.exact_space.reduce(v)
    return [r[p] for p in report.complement.pivots]


def representative(report: CohomologyReport, coords: Sequence) -> KForm:
    """The canonical representative sum(coords[i] * basis[i])."""
    out = KForm(3)
    for c, b in zip(coords, report.basis):
        out = out + b * c
    return out


def verify_basis(report: CohomologyReport, forms: Sequence[KForm]) -> bool:
    """True if ``forms`` represent a basis of the cohomology described by ``report``."""
    if len(forms) != report.dimension:
        return False
    if not all(f.degree == 3 and report.closed_space.contains(f) for f in forms):
        return False
    rows = [list(r) for r in report.exact_space.rows] + [f.to_vector() for f in forms]
    return len(rref(rows)[1]) == report.exact_space.dim + len(forms)


def class_matrix(source: CohomologyReport, target: CohomologyReport) -> List[List[Fraction]]:
    """Matrix of the map induced by the identity on representatives (columns: source basis)."""
    cols = [class_coordinates(target, b) for b in source.basis]
    return [list(r) for r in zip(*cols)] if cols else []


@dataclass(frozen=True)
class NaturalMaps:
    shminus_to_ph_rank: int
    ph_to_h_rank: int
    ph_to_shplus_rank: int
    shplus_to_ph_well_defined: bool
    dims: Dict[str, int]

    @property
    def shminus_to_ph_surjective(self) -> bool:
        return self.shminus_to_ph_rank == self.dims["PH3"]

    @property
    def ph_to_h_injective(self) -> bool:
        return self.ph_to_h_rank == self.dims["PH3"]


def surjectivity_injectivity_maps(spec: LieAlgebraSpec, ss: SymplecticStructure) -> NaturalMaps:
    eng = CohomologyEngine(spec, ss)
    h, ph, shp, shm = (eng.report(k) for k in KINDS)

    def rank(m):
        return len(rref(m)[1]) if m and m[0] else 0

    # a map SH_+ -> PH on representatives needs ker(d_plus d_minus) inside ker d
    well_defined = ph.closed_space.contains_subspace(shp.closed_space)
    return NaturalMaps(
        shminus_to_ph_rank=rank(class_matrix(shm, ph)),
        ph_to_h_rank=rank(class_matrix(ph, h)),
        ph_to_shplus_rank=rank(class_matrix(ph, shp)),
        shplus_to_ph_well_defined=well_defined,
        dims={k: eng.report(k).dimension for k in KINDS},
    )
