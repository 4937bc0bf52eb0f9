"""
Cubic Lab - Main Entry Point
Command-line surface for the Hesse-form toolkit: every operation, the
verification suites and the figure presets, with JSON output.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
from dotenv import load_dotenv

from figures import FigurePresetFactory, FigureSpec, render_figure
from figures.figure_presets import LAYERS
from figures.svg_renderer import count_shaded_regions
from hesse.cone_atlas import atlas_to_dict, component_of, find_component
from hesse.curve_geometry import INFLEXIONS
from hesse.error_handler import ErrorHandler, error_dict, is_error
from hesse.exceptions import NumericalFailure
from hesse.forms import (
    RayVector, hesse_cubic, hesse_hessian, hessian_parameter, polar_quadric, siblings,
)
from hesse.scenario import (
    enumerate_integral, fermat_classify, fermat_grid_summary, km2_c2_bound_check,
    km2_fact_check, km2_functions, lambda_bound, pole_residual, pole_solve,
)
from hesse.steinian import (
    GroupLawContext, e_levels, group_add, group_negate, steinian_map, two_torsion,
    verify_steinian_tangency,
)
from hesse.tolerances import Tolerances
from hesse.verify import SUITES, VerificationRunner, default_seed
from hesse.visibility import ga_zero_count, classify_c2_pieces, visible, visible_extremity
from utils.console import log
from utils.parsing import parse_assignments, parse_range, parse_scalar, parse_vector, to_plain
from utils.seeded_rng import SplitMix64

load_dotenv()

GLOBAL_FLAGS = ("json", "tol", "seed")


class ArgumentError(Exception):
    """Bad command line; exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def _point(text: str) -> RayVector:
    return RayVector(parse_vector(text))


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true", help="emit one JSON object")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="override a tolerance, e.g. on_curve_abs=1e-10")
    p.add_argument("--seed", type=int, default=None, help="sampling seed (default CUBICLAB_SEED)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="main.py", description="Real plane cubics in Hesse form")
    sub = parser.add_subparsers(dest="op", required=True, parser_class=_Parser)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        return p

    p = command("eval", "evaluate F, H or a polar conic G_A at a point")
    p.add_argument("--k", required=True)
    p.add_argument("--form", choices=["F", "H", "G"], default="F")
    p.add_argument("--point", required=True)
    p.add_argument("--a", help="A for --form G")

    p = command("hessian", "Hessian cubic and its parameter k'")
    p.add_argument("--k", required=True)

    p = command("siblings", "the three k with the same Hessian parameter")
    p.add_argument("--kprime", required=True)
    p.add_argument("--allow-boundary", action="store_true")

    p = command("components", "positive index cone components")
    p.add_argument("--k", required=True)
    p.add_argument("--point", help="report the component containing this class")

    p = command("steinian", "Steinian involution of a Hessian point")
    p.add_argument("--k", required=True)
    p.add_argument("--point", required=True)

    p = command("group", "group law on the Hessian")
    p.add_argument("--k", required=True)
    p.add_argument("--p1", required=True)
    p.add_argument("--p2", help="omit with --negate")
    p.add_argument("--zero", choices=list(INFLEXIONS), default="B3")
    p.add_argument("--negate", action="store_true")

    p = command("two-torsion", "real 2-torsion of the Hessian")
    p.add_argument("--k", required=True)
    p.add_argument("--zero", choices=list(INFLEXIONS), default="B3")

    p = command("zeros", "zeros of G_A on the boundary arcs")
    p.add_argument("--k", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--pieces", action="store_true", help="also classify the pieces of C2 by visibility")

    p = command("visible", "visibility of a boundary ray, or the visible extremity")
    p.add_argument("--k", required=True)
    p.add_argument("--component", default="HYBRID[B1B2]")
    p.add_argument("--a", required=True)
    p.add_argument("--d0", help="boundary ray; omit for the visible extremity")

    p = command("classify-fermat", "case of the k=0 table")
    p.add_argument("--a", help="affine point a,b,1")
    p.add_argument("--grid-a", help="lo,hi")
    p.add_argument("--grid-b", help="lo,hi")
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--facts", action="store_true", help="check the case facts on the grid")

    p = command("km2", "facts for E = (-1, mu, 0) at k = -2")
    p.add_argument("--mu", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--check", action="store_true", help="run the sampled fact check")
    p.add_argument("--m")
    p.add_argument("--r")
    p.add_argument("--c2")
    p.add_argument("--d")
    p.add_argument("--e")

    p = command("lambda-bound", "bound lambda0 for D - lambda E")
    p.add_argument("--k", required=True)
    p.add_argument("--component", default="HYBRID[B1B2]")
    p.add_argument("--e", required=True)
    p.add_argument("--d", required=True)

    p = command("pole", "solve T(D, D, .) = l in a component")
    p.add_argument("--k", required=True)
    p.add_argument("--component", default="HYBRID[B1B2]")
    p.add_argument("--l", required=True)

    p = command("enumerate", "integral classes with bounded norm and cubic value")
    p.add_argument("--k", required=True)
    p.add_argument("--region", default="all")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--range", required=True, dest="cubic_range")

    p = command("figure", "render a figure to SVG")
    p.add_argument("--preset", choices=FigurePresetFactory.get_available_presets())
    p.add_argument("--k")
    p.add_argument("--viewport", help="xmin,xmax,ymin,ymax")
    p.add_argument("--layers", help=f"comma-separated subset of {','.join(LAYERS)}")
    p.add_argument("--a")
    p.add_argument("--out", required=True)

    p = command("verify", "acceptance suites")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    p.add_argument("--quick", action="store_true", help="reduced sample sizes")

    return parser


# ---------------------------------------------------------------------------------
# Commands: each returns (outputs, residuals, warnings)
# ---------------------------------------------------------------------------------

Result = Tuple[Dict[str, Any], Dict[str, float], List[str]]


def cmd_eval(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    P = _point(args.point)
    if args.form == "F":
        value = hesse_cubic(k, tol=tol).evaluate(P)
    elif args.form == "H":
        hesse_cubic(k, tol=tol)
        value = hesse_hessian(k, tol).evaluate(P)
    else:
        if not args.a:
            raise ArgumentError("--form G needs --a")
        value = polar_quadric(hesse_cubic(k, tol=tol), _point(args.a))(P)
    return {"value": value}, {}, []


def cmd_hessian(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    hesse_cubic(k, tol=tol)
    H = hesse_hessian(k, tol)
    outputs: Dict[str, Any] = {"coeffs": H.to_list()}
    residuals = {}
    if abs(k) > tol.degenerate_k_band:
        kp = hessian_parameter(k, tol)
        rng = SplitMix64(args.seed if args.seed is not None else default_seed())
        pts = np.array([[rng.uniform_in(-1.0, 1.0) for _ in range(3)] for _ in range(200)])
        rhs = -54.0 * k * k * hesse_cubic(kp, allow_degenerate=True).evaluate_many(pts)
        outputs["k_prime"] = kp
        residuals["identity"] = float(np.max(np.abs(H.evaluate_many(pts) - rhs)) / H.scale)
    return outputs, residuals, []


def cmd_siblings(args, tol: Tolerances) -> Result:
    kp = parse_scalar(args.kprime)
    ks = siblings(kp, allow_boundary=args.allow_boundary)
    outputs: Dict[str, Any] = {"siblings": list(ks)}
    if kp > 1.0:
        outputs["e_levels"] = list(e_levels(kp))
    residuals = {"round_trip": max(abs(hessian_parameter(k, tol) - kp) for k in ks)}
    return outputs, residuals, []


def cmd_components(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    outputs = atlas_to_dict(k, tol)
    if args.point:
        outputs["component_of"] = component_of(k, _point(args.point), tol)
    return outputs, {}, []


def cmd_steinian(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    U = _point(args.point)
    image = steinian_map(k, U, tol)
    line_residual, defect = verify_steinian_tangency(k, U, tol)
    return {"alpha": image.to_list()}, {"tangent_line": line_residual, "tangency": defect}, []


def cmd_group(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    ctx = GroupLawContext.for_hessian(k, args.zero, tol)
    if args.negate:
        return {"negative": group_negate(ctx, _point(args.p1)).to_list()}, {}, []
    if not args.p2:
        raise ArgumentError("group needs --p2 (or --negate)")
    total = group_add(ctx, _point(args.p1), _point(args.p2))
    return {"sum": total.to_list()}, {"on_curve": abs(ctx.curve.normalized_value(total))}, []


def cmd_two_torsion(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    ctx = GroupLawContext.for_hessian(k, args.zero, tol)
    points = two_torsion(ctx)
    return {"points": [P.to_list() for P in points]}, {}, []


def cmd_zeros(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    report = ga_zero_count(k, _point(args.a), tol)
    outputs = report.to_dict()
    if args.pieces:
        outputs["pieces"] = classify_c2_pieces(k, _point(args.a), tol)
    warnings = list(report.notes)
    if report.agree is False:
        warnings.append("sampled counts differ from the case table")
    return outputs, {}, warnings


def cmd_visible(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    comp = find_component(k, args.component, tol)
    A = _point(args.a)
    if args.d0:
        return {"visible": visible(comp, A, _point(args.d0))}, {}, []
    return {"extremity": [e.to_dict() for e in visible_extremity(comp, A)]}, {}, []


def cmd_classify_fermat(args, tol: Tolerances) -> Result:
    if args.a:
        return fermat_classify(_point(args.a), tol).to_dict(), {}, []
    if not (args.grid_a and args.grid_b):
        raise ArgumentError("classify-fermat needs --a or --grid-a and --grid-b")
    df, summary = fermat_grid_summary(parse_range(args.grid_a), parse_range(args.grid_b), args.n,
                                      with_facts=args.facts, tol=tol)
    return {"summary": summary, "rows": int(len(df))}, {}, []


def cmd_km2(args, tol: Tolerances) -> Result:
    mu = parse_scalar(args.mu)
    t, s = km2_functions(mu)
    outputs: Dict[str, Any] = {"t": t, "s": s}
    if args.check:
        seed = args.seed if args.seed is not None else default_seed()
        outputs["facts"] = km2_fact_check(mu, args.samples, seed=seed, tol=tol)
    bound_flags = (args.m, args.r, args.c2, args.d, args.e)
    if any(bound_flags):
        if not all(bound_flags):
            raise ArgumentError("the c2 bound needs --m, --r, --c2, --d and --e")
        outputs["c2_bound"] = km2_c2_bound_check(parse_scalar(args.m), parse_scalar(args.r),
                                                 parse_vector(args.c2), parse_vector(args.d), parse_vector(args.e))
    return outputs, {}, []


def cmd_lambda_bound(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    comp = find_component(k, args.component, tol)
    result = lambda_bound(k, comp, _point(args.e), _point(args.d), tol=tol)
    return result.to_dict(), {}, []


def cmd_pole(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    comp = find_component(k, args.component, tol)
    l = parse_vector(args.l)
    D = pole_solve(k, comp, l, tol)
    return {"D": D.to_list()}, {"relative": pole_residual(k, D, l)}, []


def cmd_enumerate(args, tol: Tolerances) -> Result:
    k = parse_scalar(args.k)
    found = enumerate_integral(k, args.region, args.bound, parse_range(args.cubic_range), tol)
    return {"count": len(found), "classes": [E.to_list() for E in found]}, {}, []


def cmd_figure(args, tol: Tolerances) -> Result:
    if args.preset:
        spec = FigurePresetFactory.create(args.preset)
    else:
        if not (args.k and args.viewport and args.layers):
            raise ArgumentError("figure needs --preset or --k, --viewport and --layers")
        spec = FigureSpec(
            k=parse_scalar(args.k),
            viewport=parse_vector(args.viewport, 4),
            layers=frozenset(l.strip() for l in args.layers.split(",")),
            a_point=_point(args.a) if args.a else None,
        )
    svg = render_figure(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    return {"path": str(out), "bytes": len(svg.encode("utf-8")), "shaded_regions": count_shaded_regions(svg)}, {}, []


COMMANDS: Dict[str, Callable[[argparse.Namespace, Tolerances], Result]] = {
    "eval": cmd_eval,
    "hessian": cmd_hessian,
    "siblings": cmd_siblings,
    "components": cmd_components,
    "steinian": cmd_steinian,
    "group": cmd_group,
    "two-torsion": cmd_two_torsion,
    "zeros": cmd_zeros,
    "visible": cmd_visible,
    "classify-fermat": cmd_classify_fermat,
    "km2": cmd_km2,
    "lambda-bound": cmd_lambda_bound,
    "pole": cmd_pole,
    "enumerate": cmd_enumerate,
    "figure": cmd_figure,
}


# ---------------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------------

def _inputs(args: argparse.Namespace) -> Dict[str, Any]:
    """Flags as given, so the invocation can be replayed."""
    return {name: value for name, value in vars(args).items()
            if name not in ("op", "json") and value not in (None, False, [])}


def argv_from_inputs(op: str, inputs: Dict[str, Any]) -> List[str]:
    """Rebuild an argv from the echoed inputs of a JSON envelope."""
    argv = [op]
    for name, value in inputs.items():
        flag = "--" + ("range" if name == "cubic_range" else name.replace("_", "-"))
        if value is True:
            argv.append(flag)
        elif isinstance(value, list):
            for item in value:
                argv += [flag, str(item)]
        else:
            argv += [flag, str(value)]
    return argv + ["--json"]


def _human(op: str, outputs: Dict[str, Any], residuals: Dict[str, float], warnings: List[str]) -> str:
    lines = [f"[OK] {op}"]
    for key, value in outputs.items():
        lines.append(f"  {key}: {json.dumps(to_plain(value))}")
    for key, value in residuals.items():
        lines.append(f"  residual {key}: {value:.3e}")
    lines += [f"[WARN] {w}" for w in warnings]
    return "\n".join(lines)


def _envelope(op: str, inputs: Dict[str, Any], outputs, residuals, warnings, error=None) -> str:
    body = {"op": op, "inputs": inputs, "outputs": outputs, "residuals": residuals, "warnings": warnings}
    if error is not None:
        body["error"] = error
    return json.dumps(to_plain(body))


def _run_verify(args, tol: Tolerances) -> Tuple[int, str]:
    runner = VerificationRunner(seed=args.seed, tolerances=tol, quick=args.quick, echo=False)
    results = runner.run(args.suite)
    code = 0 if runner.all_passed else 1
    if args.json:
        outputs = {"seed": runner.seed, "passed": runner.all_passed, "criteria": [r.to_dict() for r in results]}
        return code, _envelope("verify", _inputs(args), outputs, {}, [])
    lines = ["=" * 60, f"verify --suite {args.suite} --seed {runner.seed}", "=" * 60]
    lines += [f"[{'OK' if r.passed else 'FAILED'}] {r.id} {r.title}" for r in results]
    lines += ["=" * 60, f"{sum(r.passed for r in results)}/{len(results)} criteria passed"]
    return code, "\n".join(lines)


def run(argv: List[str]) -> Tuple[int, str]:
    """
    Execute one invocation.

    Returns:
        (exit code, output text): 0 on success, 1 on a domain error
        (the error name is in the output), 2 on a bad command line
    """
    try:
        args = build_parser().parse_args(argv)
        tol = Tolerances.from_env().with_overrides(parse_assignments(args.tol))
    except (ArgumentError, ValueError) as e:
        return 2, f"[FAILED] ArgumentError: {e}"

    if args.op == "verify":
        return _run_verify(args, tol)

    inputs = _inputs(args)
    try:
        result = ErrorHandler().execute(COMMANDS[args.op], args, tol)
    except np.linalg.LinAlgError as e:
        # a ValueError subclass, but never a bad flag
        result = error_dict(NumericalFailure.wrap(e), "cli")
    except (ArgumentError, ValueError) as e:
        if args.json:
            return 2, _envelope(args.op, inputs, {}, {}, [], {"name": "ArgumentError", "message": str(e)})
        return 2, f"[FAILED] ArgumentError: {e}"
    except Exception as e:
        log(f"{args.op} failed unexpectedly: {type(e).__name__}: {e}", "WARN")
        result = error_dict(NumericalFailure.wrap(e), "cli")

    if is_error(result):
        error = {"name": result["error"], "message": result["message"]}
        if "sample" in result:
            error["sample"] = result["sample"]
        if args.json:
            return 1, _envelope(args.op, inputs, {}, {}, [], error)
        return 1, f"[FAILED] {result['error']}: {result['message']}"

    outputs, residuals, warnings = result
    if args.json:
        return 0, _envelope(args.op, inputs, outputs, residuals, warnings)
    return 0, _human(args.op, outputs, residuals, warnings)


def main():
    """Main execution function."""
    code, text = run(sys.argv[1:])
    print(text)
    sys.exit(code)


if __name__ == "__main__":
    main()
