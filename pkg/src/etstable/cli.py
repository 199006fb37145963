"""Command-line interface: JSON in, JSON or CSV out.

Exit codes: 0 success, 1 validation failure, 2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import approx, limits, measures, simulate
from .charfn import CfGrid, cf_sup_distance, char_exponents, default_grid
from .errors import DivergentIntegral, EtsError, InvalidInput, QuadratureFailure
from .measures import AtomicMeasure, EtsSpec

EXIT_OK, EXIT_INVALID, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
DEMO_GRID_POINTS = 61


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# I/O helpers


def _load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _Fail(EXIT_INPUT, f"{path}: invalid JSON ({exc})") from None


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _float_list(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise _Fail(EXIT_INPUT, f"{what}: expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str, what: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise _Fail(EXIT_INPUT, f"{what}: expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise _Fail(EXIT_INPUT, f"{what}: need positive integers")
    return vals


def _load_grid(path: str | None, d: int) -> np.ndarray:
    if path is None:
        return default_grid(d).points
    data = _load_json(path)
    if isinstance(data, dict):
        data = data.get("points")
    try:
        pts = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise _Fail(EXIT_INPUT, f"{path}: grid must be a list of points") from None
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] != d or len(pts) == 0 or not np.all(np.isfinite(pts)):
        raise _Fail(EXIT_INPUT, f"{path}: grid must be a nonempty list of finite {d}-vectors")
    return pts


def _demo_grid(d: int) -> CfGrid:
    return CfGrid.line(-3.0, 3.0, DEMO_GRID_POINTS) if d == 1 else default_grid(d)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v) + 0.0) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands; each returns (exit_code, payload, diagnostics)


def cmd_validate(args):
    fields = measures.ets_fields_from_json(_load_json(args.spec))
    problems = [msg for _, msg in measures.spec_problems(**fields)]
    report = None
    alpha = fields["alpha"]
    if alpha < 2:
        nu = fields["nu"]
        finite = nu.finite_part() if alpha <= 0 else nu
        R, stable = measures.extended_to_rosinski(finite, alpha)
        report = measures.validate_rosinski(R, alpha).to_dict()
        report["stable_mass"] = stable.total_mass
    valid = not problems and (report is None or report["valid"])
    payload = {"valid": valid, "problems": problems, "rosinski": report}
    return (EXIT_OK if valid else EXIT_INVALID), _dump_json(payload), "; ".join(problems)


def cmd_cf(args):
    spec = measures.ets_from_json(_load_json(args.spec))
    pts = _load_grid(args.grid, spec.dimension)
    C = char_exponents(spec, pts)
    d = spec.dimension
    header = [f"z{i + 1}" for i in range(d)] + ["re_C", "im_C", "abs_CF"]
    rows = [[*z, c.real, c.imag, float(np.exp(c.real))] for z, c in zip(pts.tolist(), C)]
    return EXIT_OK, _csv(header, rows), f"{len(rows)} grid points"


def _rosinski_input(data):
    if isinstance(data, dict) and "R" in data:
        R = measures.measure_from_json(data["R"])
        sp = data.get("stable_part")
        stable = measures.measure_from_json(sp) if sp is not None else AtomicMeasure.empty(R.dimension)
        return R, stable
    R = measures.measure_from_json(data)
    return R, AtomicMeasure.empty(R.dimension)


def _require(value, flag):
    if value is None:
        raise _Fail(EXIT_INPUT, f"{flag} is required for this transform")
    return value


def cmd_transform(args):
    data = _load_json(args.input)
    src, dst = args.source, args.target
    alpha, p = args.alpha, args.p
    if src == "extended" and isinstance(data, dict) and "nu" in data:
        fields = measures.ets_fields_from_json(data)
        alpha = fields["alpha"] if alpha is None else alpha
        p = fields["p"] if p is None else p
        data = measures.measure_to_json(fields["nu"])
    if src == "tempering":
        tspec = measures.tempering_from_json(data)
        R, stable = measures.tempering_to_rosinski(tspec, _require(alpha, "--alpha"), _require(p, "--p"))
    elif src == "rosinski":
        R, stable = _rosinski_input(data)
    else:
        nu = measures.measure_from_json(data)
        if dst == "extended":
            return EXIT_OK, _dump_json(measures.measure_to_json(nu.canonical())), ""
        R, stable = measures.extended_to_rosinski(nu, _require(alpha, "--alpha"))
    if dst == "rosinski":
        out = {"R": measures.measure_to_json(R.canonical()), "stable_part": measures.measure_to_json(stable.canonical())}
    else:
        out = measures.measure_to_json(measures.rosinski_to_extended(R, stable, _require(alpha, "--alpha")))
    return EXIT_OK, _dump_json(out), ""


def cmd_approximate(args):
    spec = measures.ets_from_json(_load_json(args.spec))
    nu_n = approx.discretize_extended_measure(spec.nu, args.n, spec.alpha, spec.p)
    comps = approx.to_elementary_sum(nu_n, spec.alpha, spec.p)
    grid = _demo_grid(spec.dimension)
    gap = approx.elementary_sum_gap(spec, comps, grid)
    payload = {
        "n": args.n,
        "components": [c.to_json() for c in comps],
        "A": spec.A.tolist(),
        "shift": spec.b.tolist(),
        "cf_gap": {"grid_points": len(grid), "sup_abs_difference": gap},
    }
    return EXIT_OK, _dump_json(payload), f"{len(comps)} components, sup CF gap {gap:.6e}"


def cmd_simulate(args):
    spec = measures.ets_from_json(_load_json(args.spec))
    cfg = simulate.SamplerConfig(seed=args.seed, truncation_tau=args.tau, n_paths=args.paths,
                                 discretize_n=args.discretize_n)
    X = simulate.sample_ets(spec, cfg)
    grid = default_grid(spec.dimension)
    ecf = simulate.empirical_cf(X, grid)
    cf = np.exp(char_exponents(spec, grid))
    gaps = np.abs(ecf - cf)
    envelope = 4.0 / np.sqrt(cfg.n_paths)
    if args.cf_out:
        header = [f"z{i + 1}" for i in range(spec.dimension)] + ["re_ecf", "im_ecf", "re_cf", "im_cf", "abs_gap"]
        rows = [[*z, e.real, e.imag, c.real, c.imag, g] for z, e, c, g in zip(grid.points.tolist(), ecf, cf, gaps)]
        Path(args.cf_out).write_text(_csv(header, rows))
    diag = f"max |ECF - CF| = {gaps.max():.4e} over {len(grid)} points (4/sqrt(n) = {envelope:.4e})"
    return EXIT_OK, simulate.samples_to_csv(X), diag


def _sequence_files(directory: str) -> list[Path]:
    path = Path(directory)
    if not path.is_dir():
        raise _Fail(EXIT_INPUT, f"{directory} is not a directory")
    files = list(path.glob("*.json"))
    if not files:
        raise _Fail(EXIT_INPUT, f"{directory} holds no .json files")

    def key(f: Path):
        m = re.search(r"(\d+)", f.stem)
        return (int(m.group(1)) if m else -1, f.name)

    return sorted(files, key=key)


def cmd_check_limit(args):
    files = _sequence_files(args.sequence)
    seq = [measures.ets_from_json(_load_json(str(f))) for f in files]
    target = measures.ets_from_json(_load_json(args.target))
    indices = []
    for pos, f in enumerate(files, start=1):
        m = re.search(r"(\d+)", f.stem)
        indices.append(int(m.group(1)) if m else pos)
    if len(set(indices)) != len(indices):
        indices = list(range(1, len(files) + 1))
    eps = _float_list(args.epsilons, "--epsilons") if args.epsilons else limits.DEFAULT_EPSILONS
    report = limits.check_limit_conditions(seq, target, eps, args.delta, indices=indices)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return EXIT_OK, _dump_json(report.to_dict()), report.render_table()


def cmd_demo(args):
    n_list = _int_list(args.n_list, "--n-list")
    if args.demo == "gaussian-limit":
        A = np.atleast_2d(np.array(_load_json(args.A), dtype=float))
        d = A.shape[0]
        target = EtsSpec.gaussian(A, alpha=args.alpha, p=args.p)
        make = lambda n: approx.gaussian_seed_sequence(A, n, args.alpha, args.p, args.m_nodes)
    else:
        sigma = measures.measure_from_json(_load_json(args.sigma))
        d = sigma.dimension
        target = approx.stable_target(sigma, args.alpha, args.p)
        make = lambda n: approx.stable_seed_sequence(sigma, args.alpha, n, args.p,
                                                     args.m_nodes if args.m_nodes else 64)
    grid = _demo_grid(d)
    rows = [[n, cf_sup_distance(make(n), target, grid)] for n in n_list]
    return EXIT_OK, _csv(["n", "sup_cf_gap"], rows), ""


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the payload here instead of stdout")
    common.add_argument("--quiet", action="store_true", help="suppress diagnostics on stderr")

    parser = argparse.ArgumentParser(prog="etstable", description="Extended tempered stable laws.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a spec and report its mass functional")
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cf", parents=[common], help="characteristic exponent on a grid (CSV)")
    p.add_argument("spec")
    p.add_argument("--grid", help="JSON list of points (default: built-in grid)")
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("transform", parents=[common], help="convert between measure representations")
    p.add_argument("input")
    p.add_argument("--from", dest="source", required=True, choices=["tempering", "rosinski", "extended"])
    p.add_argument("--to", dest="target", required=True, choices=["rosinski", "extended"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--p", type=float)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("approximate", parents=[common], help="elementary-component decomposition")
    p.add_argument("spec")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("simulate", parents=[common], help="draw samples (CSV)")
    p.add_argument("spec")
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tau", type=float, default=1e-3)
    p.add_argument("--discretize-n", type=int, default=simulate.SamplerConfig.discretize_n)
    p.add_argument("--cf-out", help="write the empirical-CF gap table (CSV) here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check-limit", parents=[common], help="convergence diagnostics for a sequence")
    p.add_argument("--sequence", required=True, help="directory of spec JSON files")
    p.add_argument("--target", required=True)
    p.add_argument("--epsilons", help="comma-separated, strictly decreasing")
    p.add_argument("--delta", type=float, default=limits.DEFAULT_DELTA)
    p.add_argument("--csv", help="also write the table as CSV here")
    p.set_defaults(func=cmd_check_limit)

    p = sub.add_parser("demo", help="limit demonstrations (CSV of n, sup CF gap)")
    demos = p.add_subparsers(dest="demo", required=True)
    for name in ("gaussian-limit", "stable-limit"):
        q = demos.add_parser(name, parents=[common])
        q.add_argument("--alpha", type=float, required=True)
        q.add_argument("--p", type=float, required=True)
        if name == "gaussian-limit":
            q.add_argument("--A", required=True, help="JSON matrix")
        else:
            q.add_argument("--sigma", required=True, help="JSON measure on the unit sphere")
        q.add_argument("--n-list", default="5,10,20,50")
        q.add_argument("--m-nodes", type=int)
        q.set_defaults(func=cmd_demo)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    quiet = getattr(args, "quiet", False)
    try:
        code, payload, diag = args.func(args)
    except _Fail as exc:
        code, payload, diag = exc.code, "", str(exc)
    except (QuadratureFailure, DivergentIntegral) as exc:
        code, payload, diag = EXIT_NUMERIC, "", f"numerical failure: {exc}"
    except (InvalidInput, EtsError, ValueError, TypeError) as exc:
        code, payload, diag = EXIT_INPUT, "", f"input error: {exc}"
    if payload:
        if args.out:
            try:
                Path(args.out).write_text(payload)
            except OSError as exc:
                code, diag = EXIT_INPUT, f"cannot write {args.out}: {exc.strerror}"
        else:
            sys.stdout.write(payload)
    if diag and not quiet:
        print(diag.rstrip("\n"), file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())
