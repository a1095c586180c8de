"""Command-line frontend: ``python3 -m stabdistill <command>``.

Exit codes: 0 success, 1 protocol-level failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .field_phase import is_prime
from .protocol import distill
from .stabilizer import enumerate_stabilizers
from .states import InvalidMixture, InvalidState, isotropic, load_state, offline, random_pure_in_band
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CSV_COLUMNS = ["family", "d", "parameter", "input_fidelity", "reached", "n_iterations", "efficiency"]
RANDOM_COLUMNS = CSV_COLUMNS + ["seed", "bin", "bin_mean_efficiency"]


class UsageError(Exception):
    pass


def prime(text: str) -> int:
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("d must be prime") from None
    if not is_prime(d):
        raise argparse.ArgumentTypeError("d must be prime")
    return d


def prime_list(text: str) -> list[int]:
    return [prime(t) for t in text.split(",") if t.strip()]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


# --- sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    family: str
    d: int
    p_from: float
    p_to: float
    step: float
    samples: int = 100
    bin_width: float = 0.01
    seed: int = 0
    target: float = 0.999
    max_iter: int = 200
    nonbds: str = "twirl"
    workers: int = 1

    def validate(self):
        if self.family not in ("isotropic", "offline", "random"):
            raise UsageError(f"unknown family {self.family!r}")
        if self.family == "offline" and self.d != 3:
            raise UsageError("the offline family is defined for d = 3 only")
        if self.step <= 0:
            raise UsageError("--step must be positive")
        if self.p_to < self.p_from:
            raise UsageError("--p-to must not be below --p-from")
        if self.samples < 1:
            raise UsageError("--samples must be >= 1")
        if self.bin_width <= 0:
            raise UsageError("bin width must be positive")
        if not 0 < self.target < 1:
            raise UsageError("--target must lie in (0, 1)")
        if self.max_iter < 1:
            raise UsageError("--max-iter must be >= 1")
        lo = -1 / (self.d**2 - 1) if self.family == "isotropic" else 0.0
        if self.p_from < lo - 1e-12 or self.p_to > 1 + 1e-12:
            raise UsageError(f"parameter grid must lie in [{lo:.6g}, 1] for {self.family}")


def grid(start: float, stop: float, step: float) -> list[float]:
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _family_row(args) -> list:
    family, d, p, target, max_iter, nonbds = args
    state = isotropic(d, p) if family == "isotropic" else offline(p)
    run = distill(state, target, max_iter, nonbds)
    return [family, d, p, state.fidelity(), run.reached_target, run.n_iterations, run.efficiency]


def _random_row(args) -> list:
    d, lo, hi, seed, bin_idx, target, max_iter, nonbds = args
    state = random_pure_in_band(d, lo, hi, seed)
    run = distill(state, target, max_iter, nonbds)
    centre = round((lo + hi) / 2, 12)
    return ["random", d, centre, state.fidelity(), run.reached_target, run.n_iterations,
            run.efficiency, seed, bin_idx]


def _map(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(fn, tasks, chunksize=8))


def sweep_rows(cfg: SweepConfig) -> tuple[list[str], list[list]]:
    """Header and rows, in grid order, for a validated config."""
    cfg.validate()
    common = (cfg.target, cfg.max_iter, cfg.nonbds)
    if cfg.family != "random":
        tasks = [(cfg.family, cfg.d, p) + common for p in grid(cfg.p_from, cfg.p_to, cfg.step)]
        return CSV_COLUMNS, _map(_family_row, tasks, cfg.workers)

    edges = grid(cfg.p_from, cfg.p_to, cfg.bin_width)
    if edges[-1] < cfg.p_to - 1e-12:
        edges.append(cfg.p_to)
    tasks = []
    for b, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        for i in range(cfg.samples):
            # one integer seed per row, derived from (master seed, bin, draw)
            seed = int(np.random.SeedSequence([cfg.seed, b, i]).generate_state(1)[0])
            tasks.append((cfg.d, lo, hi, seed, b) + common)
    rows = _map(_random_row, tasks, cfg.workers)
    for b in range(len(edges) - 1):
        block = rows[b * cfg.samples : (b + 1) * cfg.samples]
        mean = float(np.mean([r[6] for r in block]))
        for r in block:
            r.append(mean)
    return RANDOM_COLUMNS, rows


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


# --- commands -----------------------------------------------------------------


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_enumerate(args) -> int:
    lines = ["index,k1,k2,l1,l2"]
    stabs = enumerate_stabilizers(args.d)
    for i, st in enumerate(stabs):
        lines.append(",".join(str(v) for v in (i, *st.generator.flat)))
    _emit("\n".join(lines) + "\n", args.out)
    print(f"{len(stabs)} stabilizers for d={args.d}", file=sys.stderr)
    return EXIT_OK


def cmd_distill(args) -> int:
    if args.state is None:
        raise UsageError("--state is required")
    try:
        state = load_state(args.state)
    except (OSError, json.JSONDecodeError, InvalidState, InvalidMixture, ValueError) as exc:
        raise UsageError(f"cannot read state file {args.state}: {exc}") from None
    if not 0 < args.target < 1:
        raise UsageError("--target must lie in (0, 1)")
    if args.max_iter < 1:
        raise UsageError("--max-iter must be >= 1")
    run = distill(state, args.target, args.max_iter, args.nonbds)
    _emit(json.dumps(run.to_dict(), indent=2) + "\n", args.out)
    return EXIT_OK if run.reached_target else EXIT_FAIL


def cmd_sweep(args) -> int:
    if args.family is None:
        raise UsageError("--family is required")
    d = 3 if args.family == "offline" and args.d is None else (args.d or 2)
    random_family = args.family == "random"
    cfg = SweepConfig(
        family=args.family,
        d=d,
        p_from=args.p_from if args.p_from is not None else 0.0,
        p_to=args.p_to if args.p_to is not None else 1.0,
        step=args.step if args.step is not None else 0.01,
        samples=args.samples,
        bin_width=args.bins,
        seed=args.seed,
        target=args.target,
        max_iter=args.max_iter,
        nonbds=args.nonbds,
        workers=args.workers,
    )
    if random_family and args.step is not None:
        raise UsageError("the random family uses --bins, not --step")
    header, rows = sweep_rows(cfg)
    _emit(write_csv(header, rows), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    ds = args.d or [2, 3]
    suites = list(SUITES) if args.suite == "all" else [args.suite]
    lines, ok = [], True
    for name in suites:
        for check in run_suite(name, ds, seed=args.seed):
            lines.append(f"[{name}] {check.line()}")
            ok &= check.passed
    lines.append("all checks passed" if ok else "FAILURES present")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabdistill", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def run_flags(p):
        p.add_argument("--target", type=float, default=0.999)
        p.add_argument("--max-iter", type=int, default=200)
        p.add_argument("--nonbds", choices=("twirl", "diag"), default="twirl")

    p = sub.add_parser("enumerate", help="list all two-copy stabilizers")
    p.add_argument("--d", type=prime, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("distill", help="run FIMAX on a state file, JSON report")
    p.add_argument("--state")
    run_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("sweep", help="efficiency over a state family, CSV")
    p.add_argument("--family", choices=("isotropic", "offline", "random"))
    p.add_argument("--d", type=prime)
    p.add_argument("--p-from", type=float)
    p.add_argument("--p-to", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--samples", type=int, default=100, help="random family: draws per bin")
    p.add_argument("--bins", type=float, default=0.01, help="random family: fidelity bin width")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    run_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="numerical invariant suites")
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    p.add_argument("--d", type=prime_list)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"stabdistill {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
