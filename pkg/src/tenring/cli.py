"""Command-line interface: decompose tensors, synthesize test data, and run
the benchmark experiments.

Exit codes: 0 success, 2 usage error (bad/missing flags), 1 runtime failure
with a machine-readable ``{"error": {...}}`` JSON object on stdout.
"""

import argparse
import json
import sys
from pathlib import Path
from time import perf_counter

from . import bench
from .io import read_tensor, run_record, write_run_record, write_tensor
from .solvers import VARIANTS, AlsConfig, decompose
from .synthetic import CORE_KINDS, SynthSpec, make_dataset
from .validation import check_element_budget, check_ranks


class CliError(Exception):
    """Runtime CLI failure carrying a machine-readable payload."""

    def __init__(self, kind, message):
        self.kind = kind
        super().__init__(message)


def _fail(exc):
    kind = getattr(exc, "kind", type(exc).__name__)
    print(json.dumps({"error": {"type": kind, "message": str(exc)}}))
    return 1


def _parse_ranks(text, order):
    try:
        ranks = [int(tok) for tok in text.split(",") if tok.strip()]
        return check_ranks(ranks, order)
    except ValueError as exc:
        raise CliError("BadRanks", str(exc)) from exc


def _parse_seed(text):
    if text is None:
        return None
    parts = [int(tok) for tok in text.split(",") if tok.strip()]
    return parts[0] if len(parts) == 1 else tuple(parts)


def cmd_decompose(args):
    try:
        x = read_tensor(args.input)
    except (OSError, ValueError) as exc:
        return _fail(exc)
    try:
        ranks = _parse_ranks(args.ranks, x.ndim)
        config = AlsConfig(
            ranks=ranks,
            max_iters=args.max_iters,
            tol=args.tol,
            seed=_parse_seed(args.seed),
            error_mode=args.error,
        )
        t0 = perf_counter()
        cores, report = decompose(x, args.variant, config)
        total = perf_counter() - t0
    except Exception as exc:  # budget, degenerate solve, bad config
        return _fail(exc)

    out = Path(args.out)
    cores_dir = Path(args.cores_dir) if args.cores_dir \
        else out.parent / (out.stem + "_cores")
    cores_dir.mkdir(parents=True, exist_ok=True)
    core_paths = []
    for n, core in enumerate(cores):
        p = cores_dir / f"core_{n:03d}.dten"
        write_tensor(p, core)
        core_paths.append(str(p))

    echo = {
        "input": str(args.input),
        "dims": list(x.shape),
        "ranks": ranks,
        "variant": args.variant,
        "max_iters": args.max_iters,
        "tol": args.tol,
        "seed": args.seed,
        "error_mode": args.error,
        "cores": core_paths,
    }
    write_run_record(out, run_record(echo, report, total))
    final = report.final_error
    print(f"wrote {out} ({report.n_iters} iterations, "
          f"final error {final if final is not None else 'not tracked'})")
    return 0


def cmd_synth(args):
    spec = SynthSpec(
        order=args.order,
        dim=args.dim,
        rank=args.rank,
        kind=args.kind,
        noise=args.noise,
        gamma=args.gamma,
        theta=args.theta,
        dof=args.dof,
        seed=_parse_seed(args.seed),
    )
    try:
        spec.validate()
        check_element_budget([spec.dim] * spec.order)
        x, cores = make_dataset(spec)
    except Exception as exc:
        return _fail(exc)
    write_tensor(args.out, x)
    if args.truth_cores:
        truth = Path(args.truth_cores)
        truth.mkdir(parents=True, exist_ok=True)
        for n, core in enumerate(cores):
            write_tensor(truth / f"core_{n:03d}.dten", core)
    print(f"wrote {args.out} (shape {'x'.join(str(d) for d in x.shape)})")
    return 0


def cmd_bench(args):
    try:
        rows = bench.run_experiment(
            args.experiment,
            scale=args.scale,
            trials=args.trials,
            seed=args.seed,
            max_iters=args.max_iters,
            parallel=args.parallel_trials,
            progress=lambda msg: print(msg, file=sys.stderr),
        )
        bench.write_csv(args.out, rows)
    except Exception as exc:
        return _fail(exc)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tenring",
        description="Tensor-ring decomposition solvers and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="fit a ring decomposition to a tensor file")
    p.add_argument("input", help="input tensor (.dten)")
    p.add_argument("--variant", choices=VARIANTS, default="qrne")
    p.add_argument("--ranks", required=True,
                   help="comma-separated bond dimensions, one per mode")
    p.add_argument("--max-iters", type=int, default=20)
    p.add_argument("--tol", type=float, default=0.0)
    p.add_argument("--seed", default=None)
    p.add_argument("--error", choices=("exact", "cheap", "none"), default="exact")
    p.add_argument("--out", required=True, help="run record JSON path")
    p.add_argument("--cores-dir", default=None,
                   help="where to write the fitted cores (default: <out>_cores/)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("synth", help="generate a synthetic tensor file")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--kind", choices=CORE_KINDS, default="gaussian")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.5,
                   help="column congruence for --kind congruent")
    p.add_argument("--theta", type=float, default=0.5,
                   help="correlation decay for --kind student_t")
    p.add_argument("--dof", type=int, default=1,
                   help="degrees of freedom for --kind student_t")
    p.add_argument("--seed", default=None)
    p.add_argument("--out", required=True, help="output tensor path")
    p.add_argument("--truth-cores", default=None,
                   help="optional directory for the generating cores")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="run a benchmark experiment to CSV")
    p.add_argument("--experiment", choices=bench.EXPERIMENTS, required=True)
    p.add_argument("--scale", choices=bench.SCALES, default="desk")
    p.add_argument("--trials", type=int, default=None,
                   help="trials per cell (default depends on experiment/scale)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=20)
    p.add_argument("--parallel-trials", type=int, default=0,
                   help="run this many trials concurrently (0 = sequential)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
