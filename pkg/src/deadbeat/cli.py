"""Command-line front end.

Exit codes: 0 success, 1 model/domain errors (unobservable pair, state
outside the domain), 2 usage errors (bad flags, malformed system files).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, linear, nonlinear
from .subspaces import InvalidInputError

EXAMPLE_SYSTEMS = {
    "rotation": {"A": [[0.0, -1.0], [1.0, 0.0]], "C": [[0.0, 1.0]]},
    "cyclic": {"A": [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
               "C": [[1.0, 0.0, 0.0]]},
    "identity": {"A": [[1.0, 0.0], [0.0, 1.0]], "C": [[1.0, 0.0]]},
}


class UsageError(Exception):
    pass


def fmt(v) -> str:
    return f"{float(v) + 0.0:.17g}"  # + 0.0 drops the sign of -0.0


def fmt_vec(v) -> str:
    return ",".join(fmt(x) for x in np.asarray(v).reshape(-1))


def parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def read_system(path, tol) -> linear.LinearSystem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        context = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise UsageError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {context}"
        ) from exc
    try:
        return linear.LinearSystem.from_dict(data, tol)
    except (InvalidInputError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    sys_ = read_system(args.system, args.tol)
    pbh = linear.pbh_deadbeat_observable(sys_)
    chain = linear.subspace_chain(sys_)
    sets = chain[sys_.n].dim == 0
    dims = ",".join(str(d) for d in chain.dims)
    yn = {True: "yes", False: "no"}
    print(f"PBH test: {yn[pbh]}")
    print(f"S_n = {{0}}: {yn[sets]}")
    print(f"tests agree: {yn[pbh == sets]}")
    print(f"deadbeat observable: {yn[pbh and sets]}; dims S: {dims}")
    return 0


def cmd_gain(args) -> int:
    sys_ = read_system(args.system, args.tol)
    methods = ["alg1", "ackermann"] if args.method == "both" else [args.method]
    fn = {"alg1": linear.deadbeat_gain, "ackermann": linear.ackermann_gain}
    for m in methods:
        g = fn[m](sys_)
        print(f"{m}: L = [{fmt_vec(g.L)}]; residual = {fmt(g.residual)}")
    return 0


def cmd_simulate(args) -> int:
    sys_ = read_system(args.system, args.tol)
    if args.geometric:
        observer = "geometric"
    elif args.method == "ackermann":
        observer = linear.ackermann_gain(sys_).L
    else:
        observer = "deadbeat"
    trace = linear.simulate_cascade(sys_, observer, args.x0, args.xhat0, args.steps)
    _emit_trace(trace, args.out)
    return 0


def _read_inputs(arg: str, steps):
    try:
        value = float(arg)
    except ValueError:
        pass
    else:
        if steps is None:
            raise UsageError("--steps is required with a constant --u")
        return np.full(steps, value)
    try:
        text = Path(arg).read_text()
    except OSError as exc:
        raise UsageError(f"--u: not a number and not a readable file: {arg}") from exc
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError as exc:
        raise UsageError(f"{arg}: {exc}") from exc


def cmd_nonlinear(args) -> int:
    system = nonlinear.get_example(args.example)
    inputs = None
    if system.has_input:
        if args.u is None:
            raise UsageError("--u is required for the with-input example")
        inputs = _read_inputs(args.u, args.steps)
    elif args.steps is None:
        raise UsageError("--steps is required")
    trace = nonlinear.run_observer(system, args.x0, args.xhat0, inputs, args.steps)
    _emit_trace(trace, args.out)
    return 0


def _emit_trace(trace, out) -> None:
    fh, close = _open_out(out)
    try:
        trace.write_csv(fh)
    finally:
        if close:
            fh.close()
    h = trace.deadbeat_horizon
    msg = f"deadbeat horizon: {'none' if h is None else h}"
    print(msg, file=sys.stderr if not close else sys.stdout)


def cmd_bench(args) -> int:
    config = bench.BenchConfig(args.n_min, args.n_max, args.trials, args.seed)
    report = bench.run_benchmark(config, workers=args.workers)
    if args.out:
        Path(f"{args.out}.csv").write_text(report.to_csv())
        Path(f"{args.out}.txt").write_text(report.to_table())
        print(f"wrote {args.out}.csv and {args.out}.txt")
    else:
        sys.stdout.write(report.to_table())
        sys.stdout.write(report.to_csv())
    return 0


def cmd_example(args) -> int:
    sys_ = linear.LinearSystem.from_dict(EXAMPLE_SYSTEMS[args.name])
    if args.out:
        linear.dump_system(sys_, args.out)
    else:
        json.dump(sys_.to_dict(), sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    tol_help = "absolute singular-value cutoff for every rank decision"
    p = argparse.ArgumentParser(prog="deadbeat", description=__doc__.splitlines()[0])
    p.add_argument("--tol", type=float, default=None, help=tol_help)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help=tol_help)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="deadbeat observability by PBH and by the subspace chain")
    c.add_argument("system")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("gain", parents=[common], help="deadbeat gain and nilpotency residual")
    g.add_argument("system")
    g.add_argument("--method", choices=["alg1", "ackermann", "both"], default="alg1")
    g.set_defaults(func=cmd_gain)

    s = sub.add_parser("simulate", parents=[common], help="plant/observer cascade, CSV trace")
    s.add_argument("system")
    s.add_argument("--x0", type=parse_vector, required=True)
    s.add_argument("--xhat0", type=parse_vector, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--geometric", action="store_true",
                   help="use the set-intersection update instead of a gain")
    s.add_argument("--method", choices=["alg1", "ackermann"], default="alg1")
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_simulate)

    n = sub.add_parser("nonlinear", help="worked nonlinear deadbeat observers")
    n.add_argument("--example", choices=sorted(nonlinear.EXAMPLES), required=True)
    n.add_argument("--x0", type=parse_vector, required=True)
    n.add_argument("--xhat0", type=parse_vector, required=True)
    n.add_argument("--steps", type=int)
    n.add_argument("--u", help="constant input or a file of input values")
    n.add_argument("--out", help="CSV path (default: stdout)")
    n.set_defaults(func=cmd_nonlinear)

    b = sub.add_parser("bench", help="alg1 vs ackermann win rates")
    b.add_argument("--n-min", type=int, default=3)
    b.add_argument("--n-max", type=int, default=10)
    b.add_argument("--trials", type=int, default=10_000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", help="output prefix; writes PREFIX.csv and PREFIX.txt")
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("example", help="write a named example system file")
    e.add_argument("name", choices=sorted(EXAMPLE_SYSTEMS))
    e.add_argument("--out")
    e.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"deadbeat {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (linear.NotObservableError, linear.DegeneracyError, nonlinear.DomainError,
            bench.GeneratorError) as exc:
        print(f"deadbeat {args.command}: {exc}", file=sys.stderr)
        return 1
    except (InvalidInputError, ValueError) as exc:
        # bad shapes in flags (wrong-length --x0 and similar)
        print(f"deadbeat {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
