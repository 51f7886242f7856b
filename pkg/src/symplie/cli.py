"""Command-line entry point: validate, cohomology, eval, fharmonic, flow.

Every run prints its main report as JSON on stdout and writes the report,
any further artifacts and a ``manifest.json`` into the output directory
(``--out-dir``, else $SYMPLIE_OUT_DIR, else ./symplie-out).

Exit codes: 0 success, 1 a check failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__, catalog, coeff20, lemmas
from .catalog import AlgebraBundle
from .cohomology import (KINDS, canonical_kind, class_coordinates, cohomology, surjectivity_injectivity_maps,
                         verify_basis)
from .errors import SchemaError, SympLieError
from .exterior import wedge
from .fharmonic import (
    find_representative,
    nilpotent_class_params,
    nilpotent_closedness_violations,
    nilpotent_locus,
    nilpotent_primitive_locus,
    nilpotent_system_residual,
    q_constancy_probe,
    residual,
    solvable_closedness_violations,
    solvable_locus,
    solvable_Q_sign_check,
    solvable_system_residual,
)
from .flow import (
    FlowConfig,
    SolvableState,
    blowup_analysis,
    integrate,
    limit_geometry,
    nilpotent_exact,
    positivity_check,
)
from .hitchin import complex_data
from .lie_algebra import parse_salamon, validate
from .reporting import ArtifactWriter, csv_text, resolve_out_dir, trajectory_rows
from .salamon import ParseError, parse_form
from .symplectic import STANDARD_OMEGA

log = logging.getLogger("symplie")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


# input helpers ---------------------------------------------------------------------

def _load_config(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise SchemaError("config must be a JSON object")
    return cfg


def _check_keys(cfg: Dict[str, Any], allowed: Sequence[str], where: str) -> None:
    unknown = sorted(set(cfg) - set(allowed))
    if unknown:
        raise SchemaError(f"unknown keys in {where}: {unknown}")


def _parse_scalar(x: Any):
    if isinstance(x, bool):
        raise SchemaError(f"expected a number, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"cannot read {x!r} as a number") from exc
    raise SchemaError(f"expected a number, got {x!r}")


def _parse_coeff20(x: Any) -> list:
    if isinstance(x, str):
        try:
            x = json.loads(x)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"phi must be a JSON array or object: {exc}") from exc
    if isinstance(x, dict):
        unknown = set(x) - set(coeff20.NAMES)
        if unknown:
            raise SchemaError(f"unknown coefficient names {sorted(unknown)}")
        return [_parse_scalar(x.get(n, 0)) for n in coeff20.NAMES]
    if isinstance(x, list):
        if len(x) != 20:
            raise SchemaError(f"phi needs 20 coefficients A..T, got {len(x)}")
        return [_parse_scalar(v) for v in x]
    raise SchemaError("phi must be a list of 20 numbers or a map from A..T to numbers")


def _parse_json_arg(x: Any, what: str):
    if isinstance(x, str):
        try:
            return json.loads(x)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{what} is not valid JSON: {exc}") from exc
    return x


def _algebra(args, cfg: Dict[str, Any]) -> AlgebraBundle:
    if getattr(args, "salamon", None):
        raw = {"salamon": args.salamon, "omega": args.omega or STANDARD_OMEGA}
        return catalog.build(raw, "inline")
    name = args.algebra or cfg.get("algebra")
    if name is None:
        raise SchemaError("no algebra given (use --algebra, --salamon or an 'algebra' config key)")
    if isinstance(name, dict):
        return catalog.build(name, "inline")
    if name not in catalog.BUNDLED and not Path(name).exists():
        raise SchemaError(f"algebra file {name!r} not found (bundled: {', '.join(catalog.BUNDLED)})")
    return catalog.load(name)


def _algebra_inputs(args, cfg) -> Dict[str, Any]:
    if getattr(args, "salamon", None):
        return {"salamon": args.salamon, "omega": args.omega or STANDARD_OMEGA}
    return {"algebra": args.algebra or cfg.get("algebra")}


def _emit(args, command: str, report: Dict[str, Any], inputs: Dict[str, Any], writer: Optional[ArtifactWriter] = None,
          outcome: Optional[Dict[str, Any]] = None) -> None:
    writer = writer or ArtifactWriter(resolve_out_dir(args.out_dir))
    text = writer.add_json(f"{command}.json", report)
    writer.finish(command, inputs, outcome if outcome is not None else {})
    sys.stdout.write(text)


# validate ----------------------------------------------------------------------------

def cmd_validate(args) -> int:
    cfg = _load_config(args.config)
    if args.salamon:
        raw, source = {"salamon": args.salamon, "omega": args.omega or STANDARD_OMEGA}, "inline"
    else:
        name = args.algebra or cfg.get("algebra")
        if name is None:
            raise SchemaError("no algebra given")
        raw, source = catalog.load_raw(name)
    params = catalog._normalise_params(raw.get("params", {}))
    spec = parse_salamon(raw["salamon"], params)
    omega = parse_form(raw.get("omega", STANDARD_OMEGA), spec.params, degree=2)
    rep = validate(spec)
    cube = wedge(wedge(omega, omega), omega)
    domega = spec.d(omega)
    report = {
        "source": source,
        "salamon": spec.salamon(),
        "jacobi_ok": rep.jacobi_ok,
        "jacobi_failures": list(rep.jacobi_failures),
        "unimodular": rep.unimodular,
        "trace_failures": list(rep.trace_failures),
        "omega": str(omega),
        "domega_zero": domega.is_zero(),
        "domega": str(domega),
        "omega_nondegenerate": not cube.is_zero(),
    }
    ok = rep.ok and domega.is_zero() and not cube.is_zero()
    failing = [k for k in ("jacobi_ok", "unimodular", "domega_zero", "omega_nondegenerate") if not report[k]]
    report["ok"] = ok
    report["failing"] = failing
    _emit(args, "validate", report, {"source": source, **_algebra_inputs(args, cfg)}, outcome={"ok": ok, "failing": failing})
    return EXIT_OK if ok else EXIT_FAIL


# cohomology ----------------------------------------------------------------------------

def cmd_cohomology(args) -> int:
    cfg = _load_config(args.config)
    bundle = _algebra(args, cfg)
    spec, ss = bundle.exact
    kinds = args.kinds or cfg.get("kinds") or ",".join(KINDS)
    kinds = [canonical_kind(k.strip()) for k in (kinds.split(",") if isinstance(kinds, str) else kinds)]
    refs = bundle.raw.get("reference_bases", {})
    reports = {}
    for k in kinds:
        rep = cohomology(spec, ss, k)
        reports[k] = rep.to_dict()
        if k in refs:
            reports[k]["verified_reference_basis"] = verify_basis(rep, [parse_form(f, degree=3) for f in refs[k]])
    report = {
        "algebra": bundle.name,
        "presentation": spec.salamon(),
        "omega": str(ss.omega),
        "cohomology": reports,
        "dimensions": {k: reports[k]["dimension"] for k in kinds},
    }
    if set(kinds) == set(KINDS):
        maps = surjectivity_injectivity_maps(spec, ss)
        report["natural_maps"] = {
            "SHminus3->PH3_rank": maps.shminus_to_ph_rank,
            "SHminus3->PH3_surjective": maps.shminus_to_ph_surjective,
            "PH3->H3_rank": maps.ph_to_h_rank,
            "PH3->H3_injective": maps.ph_to_h_injective,
            "PH3->SHplus3_rank": maps.ph_to_shplus_rank,
            "SHplus3->PH3_well_defined": maps.shplus_to_ph_well_defined,
        }
    _emit(args, "cohomology", report, _algebra_inputs(args, cfg), outcome=report["dimensions"])
    return EXIT_OK


# eval ----------------------------------------------------------------------------------

def _matrix(m) -> list:
    return [[x for x in row] for row in m]


def cmd_eval(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, ("algebra", "phi"), "eval config")
    phi_in = args.phi if args.phi is not None else cfg.get("phi")
    if phi_in is None:
        raise SchemaError("eval needs phi (--phi or config key 'phi')")
    c = _parse_coeff20(phi_in)
    if args.algebra or args.salamon or cfg.get("algebra"):
        bundle = _algebra(args, cfg)
        ss = bundle.ss
    else:
        from .symplectic import standard_structure

        ss = standard_structure()
    phi = coeff20.to_form(c)
    data = complex_data(ss, phi)
    report: Dict[str, Any] = {
        "phi": coeff20.as_dict(c),
        "K": _matrix(data.K),
        "F": coeff20.as_dict(coeff20.from_form(data.Fform)),
        "Q": data.Qscalar,
        "nonnegative_Q": data.nonnegative_Q,
    }
    if data.has_complex:
        report["J"] = data.Jcomplex
        report["norm_sq"] = data.norm_sq
    if ss.is_standard:
        K2, F2, Q2 = lemmas.KFQ_closed_form(c, ss)
        agree = (_matrix(K2) == _matrix(data.K) and list(F2) == coeff20.from_form(data.Fform) and Q2 == data.Qscalar)
        report["closed_form_agrees"] = bool(agree) if all(isinstance(x, (int, Fraction)) for x in c) else None
    _emit(args, "eval", report, {"phi": coeff20.as_dict(c)}, outcome={"Q": report["Q"]})
    return EXIT_OK


# fharmonic -------------------------------------------------------------------------------

def cmd_fharmonic(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, ("algebra", "phi", "class_coords", "class_params", "kind", "search", "seed", "restarts"),
                "fharmonic config")
    bundle = _algebra(args, cfg)
    spec, ss = bundle.exact
    kind = canonical_kind(args.kind or cfg.get("kind", "H3"))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    search = args.search or bool(cfg.get("search", False))
    nil = catalog.is_nilpotent_example(spec)
    solv = catalog.solvable_lambda(spec) is not None
    report: Dict[str, Any] = {"algebra": bundle.name, "kind": kind, "seed": seed}
    inputs: Dict[str, Any] = {**_algebra_inputs(args, cfg), "kind": kind, "seed": seed}

    phi_in = args.phi if args.phi is not None else cfg.get("phi")
    params_in = args.class_params if args.class_params is not None else cfg.get("class_params")
    coords_in = args.class_coords if args.class_coords is not None else cfg.get("class_coords")
    if sum(x is not None for x in (phi_in, params_in, coords_in)) != 1:
        raise SchemaError("give exactly one of phi, class_params, class_coords")

    coords = None
    verdict = None
    if phi_in is not None:
        c = _parse_coeff20(phi_in)
        inputs["phi"] = coeff20.as_dict(c)
        phi = coeff20.to_form(c)
        res = residual(spec, ss, phi)
        report["residual"] = res.to_dict()
        report["is_fharmonic"] = res.is_fharmonic
        if nil and not nilpotent_closedness_violations(c):
            report["system_residual"] = list(nilpotent_system_residual(c))
            params = nilpotent_class_params(c)
            report["class_params"] = params
            verdict = nilpotent_locus(params)
        elif solv and not solvable_closedness_violations(c):
            report["system_residual"] = list(solvable_system_residual(c))
            q, ok = solvable_Q_sign_check(c, ss)
            report["Q"] = q
            report["Q_sign_ok"] = ok
            verdict = solvable_locus(kind)
        if res.is_closed:
            try:
                coords = class_coordinates(cohomology(spec, ss, kind), phi, ss)
            except SympLieError as exc:
                report["class_error"] = str(exc)
    elif params_in is not None:
        params = {k: _parse_scalar(v) for k, v in _parse_json_arg(params_in, "class_params").items()}
        inputs["class_params"] = params
        if nil:
            verdict = nilpotent_primitive_locus(kind, params)
        elif solv:
            verdict = solvable_locus(kind)
        else:
            raise SchemaError("class_params are only defined for the nilpotent and solvable examples")
    else:
        coords = [_parse_scalar(v) for v in _parse_json_arg(coords_in, "class_coords")]
        inputs["class_coords"] = coords
        rep = cohomology(spec, ss, kind)
        if len(coords) != rep.dimension:
            raise SchemaError(f"{kind} has dimension {rep.dimension}, got {len(coords)} coordinates")
        if solv:
            verdict = solvable_locus(kind)
        elif nil and kind == "H3":
            from .cohomology import representative

            rep_c = coeff20.from_form(representative(rep, coords))
            verdict = nilpotent_locus(nilpotent_class_params(rep_c))
    if coords is not None:
        report["class_coords"] = list(coords)
    if verdict is not None:
        report["locus"] = verdict.to_dict()
    if search:
        if coords is None:
            raise SchemaError("search needs phi or class_coords")
        restarts = int(cfg.get("restarts", 10))
        found = find_representative(spec, ss, coords, kind, seed=seed, restarts=restarts)
        report["search"] = found.to_dict()
        report["q_probe"] = q_constancy_probe(spec, ss, coords, kind, seed=seed)
    outcome = {k: report[k] for k in ("is_fharmonic", "locus") if k in report}
    if "search" in report:
        outcome["search_success"] = report["search"]["success"]
    _emit(args, "fharmonic", report, inputs, outcome=outcome)
    return EXIT_OK


# flow ----------------------------------------------------------------------------------

FLOW_KEYS = ("algebra", "phi0") + tuple(FlowConfig.__dataclass_fields__)


def _snap(v: Sequence[float], tol: float = 1e-9) -> list:
    """Round to integers when every entry is within ``tol`` of one."""
    if all(abs(x - round(x)) <= tol for x in v):
        return [int(round(x)) for x in v]
    return list(v)


def cmd_flow(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, FLOW_KEYS, "flow config")
    phi_in = args.phi if args.phi is not None else cfg.get("phi0")
    if phi_in is None:
        raise SchemaError("flow needs phi0 (config key 'phi0' or --phi)")
    c = _parse_coeff20(phi_in)
    bundle = _algebra(args, cfg)
    spec, ss = bundle.spec, bundle.ss
    overrides = {k: cfg[k] for k in FlowConfig.__dataclass_fields__ if k in cfg}
    if args.t_max is not None:
        overrides["t_max"] = args.t_max
    for k, v in overrides.items():
        if isinstance(v, bool) and k != "stop_on_convergence":
            raise SchemaError(f"{k} must be a number")
        if not isinstance(v, (int, float)):
            raise SchemaError(f"{k} must be a number, got {v!r}")
    fcfg = FlowConfig.from_mapping(overrides)
    traj = integrate(spec, ss, c, fcfg)
    outcome = traj.outcome.to_dict()
    report: Dict[str, Any] = {
        "algebra": bundle.name,
        "phi0": coeff20.as_dict(c),
        "config": {k: getattr(fcfg, k) for k in FlowConfig.__dataclass_fields__},
        "outcome": outcome,
        "n_steps": traj.n_steps,
        "n_samples": len(traj.times),
    }
    limit_vec = outcome.get("direction") or outcome.get("normalized_limit")
    if limit_vec is not None:
        snapped = _snap(limit_vec)
        outcome["direction_form" if "direction" in outcome else "normalized_limit_form"] = str(coeff20.to_form(snapped))
        geo = limit_geometry(spec, ss, coeff20.to_form(snapped))
        report["limit_geometry"] = geo.to_dict()
    if catalog.is_nilpotent_example(spec):
        sol = nilpotent_exact(c, spec)
        report["nilpotent_exact"] = {
            "H": sol.H, "R": sol.R, "R_printed_formula": sol.R_printed,
            "outcome": sol.outcome, "limit_A": sol.limit_A,
        }
    lam = catalog.solvable_lambda(spec)
    if lam is not None:
        state = SolvableState.from_coeff20(c)
        if state.is_closed_primitive and state.alpha > 0 and positivity_check(state):
            report["blowup_analysis"] = blowup_analysis(state, lam).to_dict()
    header = ["t", *coeff20.NAMES, "Qscalar", "rhs_norm"]
    writer = ArtifactWriter(resolve_out_dir(args.out_dir))
    writer.add("trajectory.csv", csv_text(header, trajectory_rows(traj.times, traj.states, traj.Q, traj.rhs_norms)))
    writer.add_json("outcome.json", outcome)
    inputs = {**_algebra_inputs(args, cfg), "config": cfg if cfg else None, "phi0": coeff20.as_dict(c)}
    _emit(args, "flow", report, inputs, writer=writer, outcome={"kind": outcome["kind"]})
    return EXIT_OK


# parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="bundled name (nilpotent, solvable, abelian) or JSON algebra file")
    common.add_argument("--salamon", help="inline Salamon string instead of --algebra")
    common.add_argument("--omega", help="symplectic form for --salamon (default e12+e34+e56)")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out-dir", help="artifact directory (default $SYMPLIE_OUT_DIR or ./symplie-out)")
    common.add_argument("--seed", type=int, default=None, help="RNG seed for randomized searches")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="symplie", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"symplie {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check Jacobi, unimodularity and omega")
    q = sub.add_parser("cohomology", parents=[common], help="H3, PH3, SH+3, SH-3")
    q.add_argument("--kinds", help="comma-separated subset of H3,PH3,SHplus3,SHminus3")
    q = sub.add_parser("eval", parents=[common], help="K, F, Q (and J when Q<0) of a 3-form")
    q.add_argument("--phi", help="20 coefficients A..T as a JSON array or object")
    q = sub.add_parser("fharmonic", parents=[common], help="F-harmonicity verdicts and loci")
    q.add_argument("--phi", help="20 coefficients A..T as a JSON array or object")
    q.add_argument("--class-params", help="JSON object of class parameters (nilpotent example)")
    q.add_argument("--class-coords", help="JSON array of class coordinates in the computed basis")
    q.add_argument("--kind", help="H3 (default), PH3, SHplus3 or SHminus3")
    q.add_argument("--search", action="store_true", help="look for an F-harmonic representative")
    q = sub.add_parser("flow", parents=[common], help="integrate the Type IIA flow")
    q.add_argument("--phi", help="initial 20 coefficients (overrides phi0 in the config)")
    q.add_argument("--t-max", type=float, default=None)
    return p


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "eval": cmd_eval,
    "fharmonic": cmd_fharmonic,
    "flow": cmd_flow,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc.message} at position {exc.position}\n")
        if exc.text:
            sys.stderr.write(f"  {exc.text}\n  {' ' * exc.position}^\n")
        return EXIT_INPUT
    except (SchemaError, KeyError, FileNotFoundError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except SympLieError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
