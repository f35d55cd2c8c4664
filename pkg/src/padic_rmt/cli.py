"""Command-line front end.

Exit codes: 0 success, 1 bad configuration or usage, 2 numeric failure
(a criterion failed, or precision escalation hit its cap), 3 I/O error.
Identical command line and seed produce byte-identical output files; the
only run-dependent value (a timestamp) is isolated in the metadata JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .ensembles import EnsembleSpec
from .errors import PadicRmtError, PrecisionExhausted
from .hall_littlewood import (
    corner_distribution,
    hl_p_eval,
    kth_corner_distribution,
)
from .padic import Signature
from .presets import build_preset, preset_names
from .processes import as_source, run_coupled_trajectory
from .rng import RngStream
from .selftest import run_selftest
from .stats import (
    ExperimentConfig,
    Tolerances,
    run_bounded_difference_experiment,
    run_clt_experiment,
    run_lln_experiment,
    tv_distance,
)
from .symplectic import is_balanced

TRAJECTORY_SCHEMA = "padic-rmt-trajectory v1"


def _parse_signature(text: str) -> Signature:
    return Signature(tuple(int(x) for x in text.replace(" ", "").split(",")))


def _seed_from(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("PADIC_RMT_SEED")
    return int(env) if env else 2024


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SystemExit(_fail(1, f"cannot read config: {exc}"))
    except json.JSONDecodeError as exc:
        raise SystemExit(_fail(1, f"config is not valid JSON: {exc}"))


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _source_from_args(args):
    if getattr(args, "config", None):
        obj = _load_json(args.config)
        return EnsembleSpec.from_json(obj)
    if getattr(args, "preset", None):
        try:
            return build_preset(args.preset)
        except KeyError as exc:
            raise SystemExit(_fail(1, str(exc)))
    raise SystemExit(_fail(1, "give --preset or --config (see --help)"))


# ---------------------------------------------------------------------------
# simulate / gsp-simulate
# ---------------------------------------------------------------------------


def _write_trajectory_csv(path: Path, traj, check_balanced: bool) -> None:
    n = traj.n
    header = (
        ["k"]
        + [f"lambda_{i}" for i in range(1, n + 1)]
        + [f"v_{i}" for i in range(1, n + 1)]
        + [f"w_{i}" for i in range(1, n + 1)]
        + [f"margin_{i}" for i in range(1, n)]
        + ["sn_last"]
    )
    lines = [f"# schema {TRAJECTORY_SCHEMA}", ",".join(header)]
    for step in traj.steps:
        if check_balanced and not is_balanced(step.lam):
            raise PadicRmtError(
                f"step {step.k}: product signature {step.lam.parts} not balanced"
            )
        row = (
            [step.k]
            + list(step.lam.parts)
            + list(step.v)
            + list(step.corner_weights)
            + list(step.split_margins)
            + [step.sn_last]
        )
        lines.append(",".join(str(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def cmd_simulate(args, symplectic: bool = False) -> int:
    source_spec = _source_from_args(args)
    seed = _seed_from(args)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        return _fail(3, f"cannot create output directory: {exc}")
    source = as_source(source_spec)
    check_balanced = symplectic or (
        isinstance(source_spec, EnsembleSpec) and source_spec.is_symplectic
    )
    meta = {
        "schema": TRAJECTORY_SCHEMA,
        "seed": seed,
        "k_max": args.kmax,
        "trials": args.trials,
        "with_interpolation": bool(args.with_interpolation),
        "source": source.describe(),
        "escalations": [],
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    try:
        for trial in range(args.trials):
            traj = run_coupled_trajectory(
                source,
                args.kmax,
                RngStream(seed, trial),
                with_interpolation=args.with_interpolation,
            )
            meta["escalations"].extend(
                {"trial": trial, "step": k, "from": a, "to": b}
                for k, a, b in traj.escalations
            )
            _write_trajectory_csv(out / f"trajectory_{trial:04d}.csv", traj, check_balanced)
    except PrecisionExhausted as exc:
        return _fail(2, f"precision escalation cap reached: {exc}")
    except PadicRmtError as exc:
        return _fail(2, str(exc))
    try:
        (out / "metadata.json").write_text(json.dumps(meta, indent=2) + "\n")
    except OSError as exc:
        return _fail(3, f"cannot write metadata: {exc}")
    print(f"wrote {args.trials} trajectory file(s) to {out}")
    return 0


# ---------------------------------------------------------------------------
# corner-dist / hl-eval
# ---------------------------------------------------------------------------


def cmd_corner_dist(args) -> int:
    try:
        sig = _parse_signature(args.signature)
    except ValueError:
        return _fail(1, f"not a signature: {args.signature!r}")
    t = Fraction(1, args.p)
    level = args.level
    try:
        if level == 2:
            dist = corner_distribution(sig, t)
        else:
            dist = kth_corner_distribution(sig, level, t)
    except (ValueError, PadicRmtError) as exc:
        return _fail(1, str(exc))
    print(f"corner level {level} of a bi-invariant matrix with SN {sig.parts}, p={args.p}")
    for entry in dist.to_json_entries():
        print(f"  {tuple(entry['signature'])}: {entry['prob']}")
    if args.monte_carlo:
        from .ensembles import sample_bi_invariant
        from .padic import corner, smith_singular_numbers

        rng = RngStream(_seed_from(args), 0)
        counts: dict[Signature, int] = {}
        for i in range(args.monte_carlo):
            mat = sample_bi_invariant(sig, len(sig), len(sig), args.p, None, rng, ("mc", i))
            sn = smith_singular_numbers(corner(mat, level))
            counts[sn] = counts.get(sn, 0) + 1
        tv = tv_distance(counts, dist)
        print(f"empirical ({args.monte_carlo} samples):")
        for sn in sorted(counts, key=lambda s: s.parts, reverse=True):
            print(f"  {sn.parts}: {counts[sn] / args.monte_carlo:.5f}")
        print(f"TV distance: {float(tv):.5f}")
    return 0


def cmd_hl_eval(args) -> int:
    try:
        sig = _parse_signature(args.signature)
        points = [Fraction(x) for x in args.points.replace(" ", "").split(",")]
        t = Fraction(args.t)
    except (ValueError, ZeroDivisionError):
        return _fail(1, "bad signature, points, or t")
    try:
        val = hl_p_eval(sig, points, t)
    except PadicRmtError as exc:
        return _fail(1, str(exc))
    print(val)
    return 0


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def _experiment_config(args) -> ExperimentConfig:
    if args.config:
        obj = _load_json(args.config)
        cfg = ExperimentConfig.from_json(obj)
    else:
        if not args.preset:
            raise SystemExit(_fail(1, "give --preset or --config"))
        cfg = ExperimentConfig(
            preset=args.preset,
            k_max=args.kmax,
            trials=args.trials,
            master_seed=_seed_from(args),
            tolerances=Tolerances(),
            jobs=args.jobs,
            expect_split=(args.preset != "paper-counterexample"),
        )
    return cfg


def _run_experiment(args, runner, kind: str) -> int:
    try:
        cfg = _experiment_config(args)
    except (ValueError, KeyError) as exc:
        return _fail(1, str(exc))
    try:
        report = runner(cfg)
    except PadicRmtError as exc:
        return _fail(2, str(exc))
    text = json.dumps(report.to_json(), indent=2)
    if args.out:
        try:
            Path(args.out).write_text(text + "\n")
        except OSError as exc:
            return _fail(3, str(exc))
    print(f"{kind}: {'PASS' if report.passed else 'FAIL'}")
    for c in report.criteria:
        mark = "ok" if c["passed"] else "FAIL"
        print(f"  [{mark}] {c['name']}: estimate {c['estimate']}, target {c.get('target')}")
    for note in report.notes:
        print(f"  note: {note}")
    if not report.passed and not (kind == "bounded-diff" and not cfg.expect_split):
        return 2
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padic-rmt",
        description=(
            "Exact singular-number computations and Monte-Carlo experiments "
            "for products of random matrices over the p-adic numbers."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, trials_default: int, kmax_default: int):
        sp.add_argument("--preset", choices=preset_names(), help="named step law")
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, default=None, help="master seed (or PADIC_RMT_SEED)")
        sp.add_argument("--kmax", type=int, default=kmax_default)
        sp.add_argument("--trials", type=int, default=trials_default)
        sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    sp = sub.add_parser("simulate", help="write coupled-trajectory CSV files")
    add_common(sp, 1, 200)
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--with-interpolation", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("gsp-simulate", help="simulate a symplectic-similitude ensemble")
    add_common(sp, 1, 200)
    sp.add_argument("--out", required=True)
    sp.add_argument("--with-interpolation", action="store_true")
    sp.set_defaults(func=lambda a: cmd_simulate(a, symplectic=True))

    sp = sub.add_parser("corner-dist", help="exact corner-signature law")
    sp.add_argument("--signature", required=True, help='e.g. "1,0,0"')
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--level", type=int, default=2, help="corner index (2 = one row shorter)")
    sp.add_argument("--monte-carlo", type=int, default=0, metavar="N")
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_corner_dist)

    sp = sub.add_parser("hl-eval", help="evaluate a symmetric-function value exactly")
    sp.add_argument("--signature", required=True)
    sp.add_argument("--points", required=True, help='e.g. "1,1/2,1/4"')
    sp.add_argument("--t", required=True, help='e.g. "1/2"')
    sp.set_defaults(func=cmd_hl_eval)

    for name, runner in (
        ("lln", run_lln_experiment),
        ("clt", run_clt_experiment),
        ("bounded-diff", run_bounded_difference_experiment),
    ):
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        add_common(sp, 50, 1000)
        sp.add_argument("--out", help="write the report JSON here")
        sp.set_defaults(func=lambda a, r=runner, n=name: _run_experiment(a, r, n))

    sp = sub.add_parser("selftest", help="run the exact identity checklist")
    sp.add_argument("--filter", default="", help="only checks whose name contains this")
    sp.set_defaults(func=lambda a: run_selftest(a.filter))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; our contract says 1
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except PadicRmtError as exc:
        return _fail(2, str(exc))


if __name__ == "__main__":
    sys.exit(main())
