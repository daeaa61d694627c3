"""``wmi`` command line: solve, gen, bench and verify.

Exit codes: 0 success, 2 usage/configuration/instance errors, 3 when no
sampled point was ever accepted (zero coverage).  ``wmi verify`` exits 1
when a check fails.  ``WMI_SEED`` supplies the seed when ``--seed`` is
absent.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

from .errors import DeadlineExceeded, WmiError, ZeroCoverageError
from .estimator import approx_wmi, approx_wmi_dep
from .generator import GenConfig, gen_instance
from .instance import read_instance, serialize_instance
from .klm import BoolDnf, klm_wmc
from .sampler import DEFAULT_STEPS, SAMPLERS
from .verify import SUITES, run_suite
from .volume import DEFAULT_CAP, ORACLES

CSV_HEADER = ["instance", "m", "n", "k", "W", "epsilon", "delta", "mode", "oracle", "estimate",
              "trials", "seconds", "seed"]
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_COVERAGE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _seed(value):
    if value is not None:
        return value
    env = os.environ.get("WMI_SEED")
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise argparse.ArgumentTypeError(f"WMI_SEED must be an integer, got {env!r}")


def _fmt(x) -> str:
    return f"{x:.10g}" if isinstance(x, float) else str(x)


def _csv_writer(path):
    """Writer appending to ``path`` (header written once) or to stdout for ``-``."""
    if path in (None, "-"):
        handle = sys.stdout
    else:
        new = not Path(path).exists() or Path(path).stat().st_size == 0
        handle = open(path, "a", encoding="utf-8", newline="")
        if new:
            csv.writer(handle, lineterminator="\n").writerow(CSV_HEADER)
    if handle is sys.stdout:
        csv.writer(handle, lineterminator="\n").writerow(CSV_HEADER)
    return handle, csv.writer(handle, lineterminator="\n")


def _solve_once(phi, w, args, seed, timeout=None):
    """Returns ``(mode, value, trials, payload)`` for one run."""
    mode = args.mode or ("indep" if w.independent else "dep")
    if mode == "wmc":
        est = klm_wmc(BoolDnf.from_hybrid(phi), w.wb, args.epsilon, args.delta, seed=seed)
        return mode, est.value, est.diagnostics["trials"], {"mode": mode, **est.to_json()}
    fn = approx_wmi_dep if mode == "dep" else approx_wmi
    report = fn(phi, w, args.epsilon, args.delta, args.oracle, seed, walk_steps=args.walk_steps,
                cap=args.cap, threads=args.threads, sampler=args.sampler, timeout=timeout)
    return mode, report.value, report.trials_used, report.to_json()


def cmd_solve(args) -> int:
    seed = _seed(args.seed)
    phi, w = read_instance(args.input)
    start = time.monotonic()
    mode, value, trials, payload = _solve_once(phi, w, args, seed, args.timeout)
    seconds = time.monotonic() - start
    if args.json:
        print(json.dumps(payload, indent=1, default=float))
    else:
        print(f"estimate {_fmt(value)}")
        print(f"mode {mode}  oracle {args.oracle}  eps {args.epsilon}  delta {args.delta}  "
              f"trials {trials}  seconds {seconds:.3f}  seed {seed}")
        diag = payload.get("estimate", payload).get("diagnostics", {})
        if diag:
            print("diagnostics " + " ".join(f"{k}={_fmt(v)}" for k, v in sorted(diag.items())))
    if args.csv:
        handle, writer = _csv_writer(args.csv)
        writer.writerow([Path(args.input).stem, phi.m_bools, phi.n_reals, phi.k, phi.width,
                         args.epsilon, args.delta, mode, args.oracle, _fmt(value), trials,
                         f"{seconds:.3f}", seed])
        if handle is not sys.stdout:
            handle.close()
    return EXIT_OK


def cmd_gen(args) -> int:
    cfg = GenConfig(args.bools, args.reals, args.width, seed=_seed(args.seed), L=args.L,
                    privileged_prob=args.privileged_prob, box_hi=args.box_hi,
                    clauses=args.clauses)
    inst = gen_instance(cfg)
    text = serialize_instance(inst.formula, inst.weight)
    if args.output in (None, "-"):
        print(text)
    else:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


def _pairs(text):
    out = []
    for item in text.split(","):
        try:
            e, d = item.split(":")
            out.append((float(e), float(d)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected EPS:DELTA pairs, got {item!r}")
    return out


def _ints(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def cmd_bench(args) -> int:
    seed = _seed(args.seed) or 0
    handle, writer = _csv_writer(args.csv)
    try:
        for size in args.sizes:
            for width in args.widths:
                m = size // 2
                inst = gen_instance(GenConfig(m, size - m, width, seed=seed))
                phi, w = inst.formula, inst.weight
                name = f"s{size}-w{width}-seed{seed}"
                for eps, delta in args.epsdelta:
                    for run in range(args.runs):
                        run_seed = seed + run
                        solve_args = argparse.Namespace(**{**vars(args), "epsilon": eps,
                                                           "delta": delta, "mode": None})
                        start = time.monotonic()
                        try:
                            mode, value, trials, _ = _solve_once(phi, w, solve_args, run_seed,
                                                                 args.timeout)
                            shown = _fmt(value)
                        except DeadlineExceeded:
                            mode, shown, trials = "indep", "timeout", 0
                        except ZeroCoverageError:
                            mode, shown, trials = "indep", "zero-coverage", 0
                        writer.writerow([name, phi.m_bools, phi.n_reals, phi.k, width, eps,
                                         delta, mode, args.oracle, shown, trials,
                                         f"{time.monotonic() - start:.3f}", run_seed])
                        handle.flush()
    finally:
        if handle is not sys.stdout:
            handle.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = _seed(args.seed) or 0
    results = run_suite(args.suite, seed, echo=lambda line: print(line, flush=True))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_FAIL if failed else EXIT_OK


def _solver_flags(p):
    p.add_argument("--oracle", choices=ORACLES, default="mc",
                   help="clause-weight oracle (default: mc; box clauses are always exact)")
    p.add_argument("--walk-steps", type=int, default=DEFAULT_STEPS,
                   help=f"hit-and-run steps per sample (default: {DEFAULT_STEPS})")
    p.add_argument("--threads", type=int, default=1,
                   help="workers for per-clause weights (default: 1)")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                   help=f"draw cap of the Monte Carlo volume oracle (default: {DEFAULT_CAP})")
    p.add_argument("--sampler", choices=SAMPLERS, default="auto",
                   help="'auto' samples box clauses exactly, 'hit-and-run' always walks "
                        "(default: auto)")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: $WMI_SEED, else fresh entropy)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wmi", description="Approximate weighted model integration on DNFs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="estimate the WMI of an instance file")
    p.add_argument("--input", required=True, help="instance JSON file")
    p.add_argument("--epsilon", type=float, required=True, help="relative error target")
    p.add_argument("--delta", type=float, required=True, help="failure probability")
    p.add_argument("--mode", choices=("indep", "dep", "wmc"), default=None,
                   help="estimator (default: indep, or dep for conditioned weights)")
    p.add_argument("--timeout", type=float, default=None, help="seconds (default: none)")
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true", help="print the full report as JSON")
    out.add_argument("--csv", metavar="PATH", help="append a CSV row to PATH ('-' for stdout)")
    _solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--bools", type=int, required=True, help="Boolean variable count")
    p.add_argument("--reals", type=int, required=True, help="real variable count")
    p.add_argument("--width", type=int, required=True, help="literal slots per clause")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: $WMI_SEED, else fresh entropy)")
    p.add_argument("--clauses", type=int, default=None,
                   help="clause count (default: floor((m+n+20)/W))")
    p.add_argument("--L", type=float, default=2.0,
                   help="constraint size is Geom(1/L) (default: 2)")
    p.add_argument("--privileged-prob", type=float, default=0.5,
                   help="chance of the privileged slot allocation (default: 0.5)")
    p.add_argument("--box-hi", type=float, default=10.0,
                   help="upper bound of every real variable (default: 10)")
    p.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="benchmark generated instances, one CSV row per run")
    p.add_argument("--sizes", type=_ints, default=[100], help="m+n values (default: 100)")
    p.add_argument("--widths", type=_ints, default=[3, 5, 8, 13],
                   help="clause widths (default: 3,5,8,13)")
    p.add_argument("--epsdelta", type=_pairs, default=[(0.35, 0.25)],
                   help="EPS:DELTA pairs (default: 0.35:0.25)")
    p.add_argument("--runs", type=int, default=5, help="runs per setting (default: 5)")
    p.add_argument("--timeout", type=float, default=None,
                   help="per-run limit in seconds (default: none)")
    p.add_argument("--csv", default="-", help="output CSV (default: stdout)")
    _solver_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--suite", choices=tuple(SUITES), default="small",
                   help="small (criteria 1-7) or full (1-9) (default: small)")
    p.add_argument("--seed", type=int, default=None, help="seed offset (default: $WMI_SEED or 0)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", 1) < 1 or getattr(args, "walk_steps", 1) < 1:
            raise argparse.ArgumentTypeError("--threads and --walk-steps must be positive")
        return args.func(args)
    except ZeroCoverageError as exc:
        print(f"wmi: zero coverage: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_COVERAGE
    except (WmiError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"wmi: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
