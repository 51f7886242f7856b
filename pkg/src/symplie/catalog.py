"""Bundled example algebras and loading of algebra description files.

An algebra file is JSON with keys ``salamon``, optional ``params``, optional
``omega`` (default e12+e34+e56) and optional ``name``.  The solvable example
also carries a ``rational_presentation``: the same algebra with the
structure constant scaled to 1, which keeps cohomology computations exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .exterior import e
from .lie_algebra import LieAlgebraSpec, parse_salamon
from .salamon import PARAM_ALIASES
from .symplectic import STANDARD_OMEGA, SymplecticStructure, make_symplectic

BUNDLED = ("nilpotent", "solvable", "abelian")


@dataclass(frozen=True)
class AlgebraBundle:
    name: str
    spec: LieAlgebraSpec
    ss: SymplecticStructure
    source: str
    raw: Dict[str, Any]
    rational: Optional[Tuple[LieAlgebraSpec, SymplecticStructure]] = None

    @property
    def exact(self) -> Tuple[LieAlgebraSpec, SymplecticStructure]:
        """A presentation with exact coefficients (for cohomology)."""
        return self.rational if self.rational is not None else (self.spec, self.ss)


def _normalise_params(params: Dict[str, Any]) -> Dict[str, Any]:
    return {PARAM_ALIASES.get(k, k): v for k, v in (params or {}).items()}


def build(raw: Dict[str, Any], source: str = "<inline>") -> AlgebraBundle:
    if "salamon" not in raw:
        raise KeyError("algebra description needs a 'salamon' field")
    params = _normalise_params(raw.get("params", {}))
    name = raw.get("name", raw["salamon"])
    spec = parse_salamon(raw["salamon"], params, name=name)
    ss = make_symplectic(raw.get("omega", STANDARD_OMEGA), spec, spec.params)
    rational = None
    if "rational_presentation" in raw:
        rp = raw["rational_presentation"]
        rspec = parse_salamon(rp["salamon"], _normalise_params(rp.get("params", {})), name=name + " (rational)")
        rss = make_symplectic(rp.get("omega", STANDARD_OMEGA), rspec, rspec.params)
        rational = (rspec, rss)
    return AlgebraBundle(name=name, spec=spec, ss=ss, source=source, raw=raw, rational=rational)


def load_raw(name_or_path: str) -> Tuple[Dict[str, Any], str]:
    if name_or_path in BUNDLED:
        text = resources.files("symplie").joinpath("data").joinpath(f"{name_or_path}.json").read_text(encoding="utf-8")
        return json.loads(text), f"bundled:{name_or_path}"
    path = Path(name_or_path)
    return json.loads(path.read_text(encoding="utf-8")), str(path)


def load(name_or_path: str) -> AlgebraBundle:
    raw, source = load_raw(name_or_path)
    return build(raw, source)


def nilpotent() -> AlgebraBundle:
    return load("nilpotent")


def solvable() -> AlgebraBundle:
    return load("solvable")


def abelian() -> AlgebraBundle:
    return load("abelian")


# recognition of the two worked examples -------------------------------------

def _same(a, b, tol=1e-12) -> bool:
    keys = set(a.coeffs) | set(b.coeffs)
    return all(abs(a[m] - b[m]) <= tol for m in keys)


def is_nilpotent_example(spec: LieAlgebraSpec) -> bool:
    target = (0, 0, 0, e(1, 5), 0, e(1, 3))
    return all(
        (f.is_zero() if t == 0 else _same(f, t)) for f, t in zip(spec.d_images, target)
    )


def solvable_lambda(spec: LieAlgebraSpec) -> Optional[float]:
    """Return lambda if ``spec`` is (-l e15, l e25, -l e36, l e46, 0, 0) with l != 0, else None."""
    d1 = spec.d_images[0]
    lam = -d1.coeff(1, 5)
    if lam == 0:
        return None
    target = (e(1, 5) * -lam, e(2, 5) * lam, e(3, 6) * -lam, e(4, 6) * lam)
    if not all(_same(f, t) for f, t in zip(spec.d_images[:4], target)):
        return None
    if not (spec.d_images[4].is_zero() and spec.d_images[5].is_zero()):
        return None
    return lam
