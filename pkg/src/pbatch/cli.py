"""Command line entry point.

Exit codes: 0 ran, 1 usage error, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import __version__
from .bench.experiment import load_specs, run_experiment
from .bench.generate import GenSpec, generate_instance, parse_sigma
from .bench.io import format_instance, read_instance, result_to_dict, write_instance
from .bounds import pr_bound
from .colgen import CgConfig, price_and_branch
from .errors import BadSigma, InstanceError, ParseError, PBatchError
from .oracle import export_milp, exact_optimum

EXIT_OK, EXIT_USAGE, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="ascii")


def _load(args):
    inst = read_instance(args.instance)
    if args.machines is not None:
        inst = inst.with_machines(args.machines)
    return inst


def cmd_gen(args) -> int:
    spec = GenSpec(n=args.n, sigma=args.sigma, capacity=args.capacity, machines=args.machines or 1,
                   seed=args.seed, replicas=args.replicas)
    if args.out is None:
        if spec.replicas != 1:
            raise UsageError("gen: --out DIR is required when --replicas > 1")
        sys.stdout.write(format_instance(generate_instance(spec, 0)))
        return EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for r in range(spec.replicas):
        name = f"n{spec.n}_s{spec.sigma}_C{spec.capacity}_m{spec.machines}_seed{spec.seed}_r{r}.txt"
        write_instance(generate_instance(spec, r), out / name)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args)
    config = CgConfig(ub_time_limit=args.time_limit_ub)
    res = price_and_branch(inst, config)
    payload = result_to_dict(res, inst, config, pr=pr_bound(inst).value)
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    res = exact_optimum(_load(args))
    payload = {"optimum": res.optimum, "schedule": res.schedule.to_lists(),
               "partitions_explored": res.partitions_explored}
    _emit(json.dumps(payload) + "\n", args.out)
    return EXIT_OK


def cmd_export_milp(args) -> int:
    _emit(export_milp(_load(args)), args.out)
    return EXIT_OK


def cmd_pr(args) -> int:
    bound = pr_bound(_load(args))
    _emit(json.dumps(asdict(bound)) + "\n", args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.spec is not None:
        try:
            data = json.loads(Path(args.spec).read_text())
            specs, cfg = load_specs(data)
        except (json.JSONDecodeError, TypeError) as exc:
            raise ParseError(0, f"bad bench spec: {exc}") from None
        config = CgConfig(**cfg)
    else:
        if args.n is None or args.sigma is None:
            raise UsageError("bench: give a spec file or both --n and --sigma")
        specs = [GenSpec(n=args.n, sigma=args.sigma, capacity=args.capacity, machines=args.machines or 1,
                         seed=args.seed, replicas=args.replicas)]
        config = CgConfig()
    if args.time_limit_ub is not None:
        config = replace(config, ub_time_limit=args.time_limit_ub)
    out = args.out or "."
    report = run_experiment(specs, config, workers=args.workers, out_dir=out)
    for row in report.summary:
        print(json.dumps(asdict(row)))
    if report.ratio_violations:
        print(f"CG-LB/PR below 1 on {report.ratio_violations} instance(s); see {out}/detail.csv",
              file=sys.stderr)
        return 3
    return EXIT_OK


def _sigma(text):
    try:
        return parse_sigma(text)
    except BadSigma as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pbatch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def instance_cmd(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("instance", help="instance text file")
        p.add_argument("--machines", type=int, help="override the machine count in the file")
        p.add_argument("--out", help="output file (default stdout)")
        p.set_defaults(func=func)
        return p

    def gen_flags(p, required):
        p.add_argument("--n", type=int, required=required)
        p.add_argument("--sigma", type=_sigma, required=required, help="size distribution 1-4")
        p.add_argument("--capacity", type=int, default=10)
        p.add_argument("--machines", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--replicas", type=int, default=10)

    p = sub.add_parser("gen", help="generate random instances")
    gen_flags(p, required=True)
    p.add_argument("--out", help="directory for the instance files")
    p.set_defaults(func=cmd_gen)

    p = instance_cmd("solve", cmd_solve, "column generation bound and price-and-branch schedule")
    p.add_argument("--time-limit-ub", type=float, help="seconds for the upper-bound search")
    instance_cmd("oracle", cmd_oracle, "exact optimum by enumeration (small n)")
    instance_cmd("export-milp", cmd_export_milp, "write the compact MILP in LP format")
    instance_cmd("pr", cmd_pr, "preemptive relaxation lower bound")

    p = sub.add_parser("bench", help="run an experiment and write summary.csv and detail.csv")
    p.add_argument("spec", nargs="?", help="JSON bench spec file")
    gen_flags(p, required=False)
    p.add_argument("--time-limit-ub", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output directory (default .)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, InstanceError, OSError, PBatchError, ValueError) as exc:
        print(f"pbatch: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
