"""Command-line entry point: ``oqw {validate,simulate,sweep,analyze,optimize,compare}``.

Every subcommand also accepts ``--config FILE`` with a JSON object whose keys
are the long option names (``half_window``, ``alpha_grid``, ...); flags given
on the command line override the file. Input errors exit with status 2.
"""

from __future__ import annotations

import argparse
import ast
import csv
import json
import math
import operator
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import analytics
from .graph import (
    Family,
    InputError,
    file_family,
    lattice_family,
    line_family,
    load_graph_json,
    uncovered_edges,
    validate_oriented,
    validate_tessellation,
)
from .operators import WalkParams, evolution_step_plan
from .oracle import ORACLE_MAX_N, compare_trials, dense_step
from .simulator import (
    basis_state,
    corner4_state,
    evolve,
    line_initial_state,
    sweep,
    thread_count,
)
from .transport import LineStats, family_stats

COMPARE_TOL = 1e-10

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def parse_angle(text: str | float) -> float:
    """Radians from a number or an arithmetic expression in ``pi`` (``3*pi/4``)."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ValueError(node)

    try:
        value = ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle is not finite: {text!r}")
    return value


def parse_grid(text: str | Sequence[float]) -> list[float]:
    """``start:stop:step`` (inclusive of ``stop``), or a single angle."""
    if isinstance(text, (list, tuple)):
        return [parse_angle(v) for v in text]
    parts = str(text).split(":")
    if len(parts) == 1:
        return [parse_angle(parts[0])]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}")
    start, stop, inc = (parse_angle(p) for p in parts)
    if inc <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"grid needs step > 0 and stop >= start: {text!r}")
    count = int(math.floor((stop - start) / inc + 1e-6)) + 1
    return [start + i * inc for i in range(count)]


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(value)
    return f"{float(value):.17g}"


def write_csv(path: str | None, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    handle = open(path, "w", newline="") if path and path != "-" else sys.stdout
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    finally:
        if handle is not sys.stdout:
            handle.close()


# -- families and initial states ----------------------------------------------------


def build_family(args, steps: int | None = None) -> Family:
    name = args.family
    if name in ("line-uniform", "line-alternating"):
        M = args.half_window
        if M is None:
            M = max(2, 2 * (steps or 0) + 2)
        return line_family(name.split("-", 1)[1], M)
    if name == "lattice":
        return lattice_family(args.n)
    if name.startswith("file:"):
        return file_family(name[len("file:"):])
    raise InputError(f"unknown family {name!r}")


def _complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", ""))
    except ValueError:
        raise InputError(f"not a complex amplitude: {text!r}") from None


def parse_amplitudes(spec: str) -> tuple[complex, complex]:
    """``plus`` or ``ab:<a>,<b>``, normalized."""
    if spec == "plus":
        a, b = 1.0, 1.0
    elif spec.startswith("ab:"):
        parts = spec[3:].split(",")
        if len(parts) != 2:
            raise InputError(f"expected ab:<a>,<b>, got {spec!r}")
        a, b = (_complex(p) for p in parts)
    else:
        raise InputError(f"initial state {spec!r} is not a two-site state (plus or ab:a,b)")
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    if norm == 0:
        raise InputError("initial amplitudes are both zero")
    return a / norm, b / norm


def initial_state(family: Family, spec: str) -> np.ndarray:
    if spec == "corner4":
        if family.kind != "lattice":
            raise InputError("initial state corner4 needs the lattice family")
        return corner4_state(family)
    if spec.startswith("site:"):
        raw = spec[5:].split(",")
        try:
            coord = [int(v) for v in raw]
        except ValueError:
            raise InputError(f"bad site spec {spec!r}") from None
        if family.kind == "lattice" and len(coord) == 2:
            return basis_state(family.vertex_count, family.vertex(coord))
        if len(coord) != 1:
            raise InputError(f"bad site spec {spec!r}")
        return basis_state(family.vertex_count, family.vertex(coord[0]))
    if family.kind == "lattice":
        raise InputError(f"initial state {spec!r} is not available on the lattice")
    a, b = parse_amplitudes(spec)
    if family.kind == "line":
        return line_initial_state(family, a, b)
    psi = np.zeros(family.vertex_count, dtype=np.complex128)
    psi[0], psi[1] = a, b
    return psi


def _coord_columns(family: Family) -> tuple[list[str], np.ndarray]:
    coords = family.coordinates()
    if family.kind == "lattice":
        return ["x", "y"], coords
    return (["x"] if family.kind == "line" else ["vertex"]), coords[:, None]


# -- subcommands --------------------------------------------------------------------


def cmd_validate(args) -> int:
    if args.file:
        graph, tessellations = load_graph_json(args.file)
        label = args.file
    else:
        family = build_family(args)
        graph, tessellations = family.graph, list(family.cover.tessellations)
        label = family.name
    problems = list(validate_oriented(graph).violations)
    if not problems:
        for i, tess in enumerate(tessellations):
            problems += [f"tessellation {i}: {v}" for v in validate_tessellation(graph, tess).violations]
    if problems:
        for p in problems:
            print(f"{label}: {p}", file=sys.stderr)
        return 2
    if tessellations:
        from .graph import TessellationCover

        missing = uncovered_edges(TessellationCover(graph, tuple(tessellations)))
        for u, v in missing:
            print(f"warning: uncovered edge {u}-{v}", file=sys.stderr)
    print(f"{label}: ok ({graph.vertex_count} vertices, {len(graph.arcs)} arcs, "
          f"{len(tessellations)} tessellations)")
    return 0


def _dump_operators(path: str, family: Family, params: WalkParams) -> None:
    N = family.vertex_count
    if N > ORACLE_MAX_N:
        raise InputError(f"operator dump limited to N <= {ORACLE_MAX_N}, got {N}")
    plan = evolution_step_plan(family.cover, params)
    def mat(U):
        return {"real": U.real.tolist(), "imag": U.imag.tolist()}
    step_matrix = np.eye(N, dtype=np.complex128)
    for op in plan:
        step_matrix = op.to_dense() @ step_matrix
    doc = {
        "alpha": params.alpha,
        "theta": params.theta,
        "local_unitaries": [dict(name=op.tessellation.name, **mat(op.to_dense())) for op in plan],
        "step": mat(step_matrix),
        "oracle_step": mat(dense_step(family.cover, params)),
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def cmd_simulate(args) -> int:
    family = build_family(args, args.steps)
    params = WalkParams(args.alpha, args.theta)
    psi0 = initial_state(family, args.initial)
    if args.dump_operators:
        _dump_operators(args.dump_operators, family, params)
    result = evolve(family.cover, params, psi0, args.steps, record=args.record_distributions)
    dist = result.final_distribution
    stats = family_stats(family, dist, args.steps, allow_wrap=args.allow_wrap)
    if args.out:
        names, coords = _coord_columns(family)
        if args.record_distributions:
            rows = ([t, *coords[v], p]
                    for t, probs in enumerate(result.distributions)
                    for v, p in enumerate(probs))
            write_csv(args.out, ["t", *names, "probability"], rows)
        else:
            write_csv(args.out, [*names, "probability"],
                      ([*coords[v], p] for v, p in enumerate(dist)))
    summary = {"t": args.steps, "alpha": params.alpha, "theta": params.theta, **stats.as_row()}
    if isinstance(stats, LineStats) and args.steps > 0:
        summary["abs_mean_rate"] = abs(stats.mean_x) / args.steps
    print(" ".join(f"{k}={fmt(v)}" for k, v in summary.items()))
    return 0


def _grid(args) -> list[WalkParams]:
    alphas = args.alpha_grid if args.alpha_grid is not None else [args.alpha]
    thetas = args.theta_grid if args.theta_grid is not None else [args.theta]
    return [WalkParams(a, t) for a in alphas for t in thetas]


def cmd_sweep(args) -> int:
    family = build_family(args, args.steps)
    psi0 = initial_state(family, args.initial)
    allow = args.allow_wrap

    def stats(fam, dist, steps):
        return family_stats(fam, dist, steps, allow_wrap=allow)

    rows = sweep(family, _grid(args), psi0, args.steps, stats, workers=thread_count())
    header = ["t", "alpha", "theta", *rows[0][1].as_row().keys()]
    write_csv(args.out, header,
              ([args.steps, p.alpha, p.theta, *s.as_row().values()] for p, s in rows))
    return 0


def cmd_analyze(args) -> int:
    if args.table in ("dispersion", "reduced"):
        params = WalkParams(args.alpha, args.theta)
        if args.k_points < 2:
            raise InputError("--k-points must be at least 2")
        ks = np.linspace(-math.pi, math.pi, args.k_points)
        if args.table == "dispersion":
            write_csv(args.out, ["k", "lambda"],
                      ([k, analytics.dispersion(args.model, k, params)] for k in ks))
        else:
            fn = analytics.reduced_u_line1 if args.model == "line1" else analytics.reduced_u_line2
            header = ["k"] + [f"{part}_u{i}{j}" for i in range(2) for j in range(2)
                              for part in ("re", "im")]

            def row(k):
                u = fn(k, params)
                return [k] + [getattr(u[i, j], part) for i in range(2) for j in range(2)
                              for part in ("real", "imag")]

            write_csv(args.out, header, (row(k) for k in ks))
        return 0
    a, b = parse_amplitudes(args.initial)
    rows = []
    for p in _grid(args):
        rows.append([p.alpha, p.theta, analytics.asymptotic_mean_line1(a, b, p),
                     analytics.asymptotic_second_moment(p)])
    write_csv(args.out, ["alpha", "theta", "mean_rate", "second_moment_rate"], rows)
    return 0


def cmd_optimize(args) -> int:
    a, b = parse_amplitudes(args.initial)
    alpha, theta, rate = analytics.optimize_line_transport(a, b)
    print(f"alpha={fmt(alpha)} theta={fmt(theta)} cos_theta={fmt(math.cos(theta))} "
          f"rate={fmt(rate)}")
    return 0


def cmd_compare(args) -> int:
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    results = compare_trials(args.seed, args.trials)
    worst = max(gap for _, gap in results)
    if args.verbose:
        for label, gap in results:
            print(f"{label}: {gap:.3e}")
    status = "ok" if worst <= COMPARE_TOL else "FAIL"
    print(f"seed={args.seed} trials={args.trials} cases={len(results)} "
          f"max_deviation={worst:.3e} tolerance={COMPARE_TOL:.0e} {status}")
    return 0 if worst <= COMPARE_TOL else 1


# -- parser ---------------------------------------------------------------------------


def _add_family(p: argparse.ArgumentParser, default: str = "line-uniform") -> None:
    p.add_argument("--family", default=default,
                   help="line-uniform | line-alternating | lattice | file:<path>")
    p.add_argument("--half-window", type=int, default=None,
                   help="line half window M (default 2*steps+2)")
    p.add_argument("--n", type=int, default=16, help="lattice parameter n, side 2n (default 16)")
    p.add_argument("--allow-wrap", action="store_true",
                   help="accept lattice runs with steps >= n/2 (torus unwrap not unique)")


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=parse_angle, default=0.0, help="orientation phase (default 0)")
    p.add_argument("--theta", type=parse_angle, default=math.pi / 4,
                   help="hopping angle (default pi/4)")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="oqw", description="Quantum walks on oriented graphs: simulation, analytics and transport.")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="JSON file of option defaults")
        p.set_defaults(func=func)
        subs[name] = p
        return p

    p = add("validate", cmd_validate, "check a graph/cover document or built-in family")
    p.add_argument("--file", help="graph JSON (vertex_count, arcs, tessellations)")
    _add_family(p)

    p = add("simulate", cmd_simulate, "evolve one walk and write its distribution")
    _add_family(p)
    _add_params(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--initial", default="plus",
                   help="plus | ab:<a>,<b> | corner4 | site:<v> | site:<x>,<y>")
    p.add_argument("--record-distributions", action="store_true",
                   help="write every step in long format (t, coordinates, probability)")
    p.add_argument("--out", help="CSV path for the distribution")
    p.add_argument("--dump-operators", metavar="PATH",
                   help="write dense local/step operators as JSON (N <= 64)")

    p = add("sweep", cmd_sweep, "transport statistics over an (alpha, theta) grid")
    _add_family(p)
    _add_params(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--initial", default="plus")
    p.add_argument("--alpha-grid", type=parse_grid, default=None, help="start:stop:step")
    p.add_argument("--theta-grid", type=parse_grid, default=None, help="start:stop:step")
    p.add_argument("--out", help="CSV path (default stdout)")

    p = add("analyze", cmd_analyze, "closed-form tables: dispersion, reduced operator, rates")
    p.add_argument("--table", choices=["dispersion", "reduced", "rates"], default="dispersion")
    p.add_argument("--model", choices=["line1", "line2"], default="line1")
    _add_params(p)
    p.add_argument("--k-points", type=int, default=201)
    p.add_argument("--initial", default="plus", help="plus | ab:<a>,<b> (rates table)")
    p.add_argument("--alpha-grid", type=parse_grid, default=None)
    p.add_argument("--theta-grid", type=parse_grid, default=None)
    p.add_argument("--out", help="CSV path (default stdout)")

    p = add("optimize", cmd_optimize, "maximize the asymptotic line drift")
    p.add_argument("--initial", default="plus", help="plus | ab:<a>,<b>")

    p = add("compare", cmd_compare, "block-structured step vs dense oracle")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--verbose", action="store_true")
    return parser, subs


def _config_path(argv: Sequence[str]) -> str | None:
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if arg.startswith("--config="):
            return arg.split("=", 1)[1]
    return None


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        config = _config_path(argv)
        if config and argv and argv[0] in subs:
            try:
                data = json.loads(Path(config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot load config {config}: {exc}") from exc
            if not isinstance(data, dict):
                raise InputError(f"config {config} must hold a JSON object")
            subs[argv[0]].set_defaults(**{k.replace("-", "_"): v for k, v in data.items()})
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        for name in ("alpha_grid", "theta_grid"):
            value = getattr(args, name, None)
            if value is not None and not isinstance(value, list):
                setattr(args, name, parse_grid(value))
        for name in ("alpha", "theta"):
            value = getattr(args, name, None)
            if isinstance(value, str):
                setattr(args, name, parse_angle(value))
        return args.func(args)
    except (InputError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
