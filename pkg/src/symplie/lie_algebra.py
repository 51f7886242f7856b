"""Six-dimensional Lie algebras given by the differential on the dual space."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .exterior import BASIS, DIM, KForm, mask_indices, wedge
from .salamon import eval_param, format_salamon, parse_salamon_fields


@dataclass(frozen=True)
class LieAlgebraSpec:
    """A Lie algebra encoded by ``d e^k`` for k = 1..6 (Chevalley-Eilenberg)."""

    name: str
    d_images: Tuple[KForm, ...]
    params: Mapping[str, object] = field(default_factory=dict)
    _dcache: Dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.d_images) != DIM:
            raise ValueError("need exactly six differentials")
        for k, f in enumerate(self.d_images, 1):
            if f.degree != 2:
                raise ValueError(f"d e^{k} must be a 2-form")

    def salamon(self) -> str:
        return format_salamon(self.d_images)

    def d_blade(self, mask: int) -> KForm:
        cached = self._dcache.get(mask)
        if cached is not None:
            return cached
        idx = mask_indices(mask)
        out = KForm(len(idx) + 1)
        # graded Leibniz over the factors of e^{i1} ^ ... ^ e^{ik}
        for r, i in enumerate(idx):
            left = KForm.blade(*idx[:r]) if r else KForm(0, {0: 1})
            right = KForm.blade(*idx[r + 1:]) if r + 1 < len(idx) else KForm(0, {0: 1})
            term = wedge(wedge(left, self.d_images[i - 1]), right)
            out = out - term if r % 2 else out + term
        self._dcache[mask] = out
        return out

    def d(self, a: KForm) -> KForm:
        if a.degree >= DIM:
            return KForm(DIM) if a.degree == DIM else a
        out: Dict[int, object] = {}
        for m, c in a.coeffs.items():
            for mm, cc in self.d_blade(m).coeffs.items():
                out[mm] = out.get(mm, 0) + c * cc
        return KForm(a.degree + 1, out)

    def d_matrix(self, degree: int) -> List[list]:
        """Matrix of d on k-forms in the lexicographic blade bases (rows: targets)."""
        src, dst = BASIS[degree], BASIS[degree + 1]
        cols = [self.d_blade(m) for m in src]
        return [[col[t] for col in cols] for t in dst]

    def structure_constants(self) -> list:
        """``c[k][i][j]`` with [e_i, e_j] = sum_k c^k_ij e_k (0-based), from d e^k = -1/2 c^k_ij e^i ^ e^j."""
        c = [[[0] * DIM for _ in range(DIM)] for _ in range(DIM)]
        for k, f in enumerate(self.d_images):
            for m, coef in f.coeffs.items():
                i, j = mask_indices(m)
                c[k][i - 1][j - 1] = -coef
                c[k][j - 1][i - 1] = coef
        return c

    def bracket(self, u: Sequence, v: Sequence) -> list:
        c = self.structure_constants()
        return [
            sum(c[k][i][j] * u[i] * v[j] for i in range(DIM) for j in range(DIM) if u[i] != 0 and v[j] != 0)
            for k in range(DIM)
        ]


def parse_salamon(s: str, params: Mapping[str, object] | None = None, name: str = "") -> LieAlgebraSpec:
    resolved = {k: eval_param(v) for k, v in (params or {}).items()}
    fields = parse_salamon_fields(s, resolved)
    return LieAlgebraSpec(name=name or s, d_images=tuple(fields), params=resolved)


@dataclass(frozen=True)
class ValidationReport:
    jacobi_ok: bool
    unimodular: bool
    jacobi_failures: Tuple[int, ...] = ()
    trace_failures: Tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return self.jacobi_ok and self.unimodular


def validate(spec: LieAlgebraSpec) -> ValidationReport:
    bad_jacobi = tuple(k + 1 for k, f in enumerate(spec.d_images) if not spec.d(f).is_zero())
    c = spec.structure_constants()
    bad_trace = tuple(j + 1 for j in range(DIM) if sum(c[i][i][j] for i in range(DIM)) != 0)
    return ValidationReport(
        jacobi_ok=not bad_jacobi,
        unimodular=not bad_trace,
        jacobi_failures=bad_jacobi,
        trace_failures=bad_trace,
    )


def _rank(rows: List[list], tol: float = 1e-12) -> int:
    from .linalg import rank

    return rank(rows, tol=tol)


def subspace_is_ideal(spec: LieAlgebraSpec, vectors: Sequence[Sequence], tol: float = 1e-12) -> bool:
    """True iff [g, span(vectors)] lies in span(vectors)."""
    vectors = [list(v) for v in vectors]
    r = _rank(vectors, tol)
    for a in range(DIM):
        ea = [1 if i == a else 0 for i in range(DIM)]
        for v in vectors:
            w = spec.bracket(ea, v)
            if any(x != 0 for x in w) and _rank(vectors + [w], tol) > r:
                return False
    return True


def kernel_distribution_is_ideal(spec: LieAlgebraSpec, vectors: Iterable[int]) -> bool:
    """Ideal test for the span of basis vectors e_i, i in ``vectors`` (1-based)."""
    idx = sorted(set(vectors))
    if not idx:
        raise ValueError("need at least one basis vector")
    c = spec.structure_constants()
    inside = set(i - 1 for i in idx)
    for a in range(DIM):
        for v in inside:
            for k in range(DIM):
                if k not in inside and c[k][a][v] != 0:
                    return False
    return True
