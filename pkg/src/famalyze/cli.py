"""Command line entry point: ``famalyze analyze|gen-test|bench|oracle-check``."""

from __future__ import annotations

import argparse
import sys

from .driver import DEFAULT_TIMEOUT, EXIT_OK, EXIT_USAGE, gen_test, run_analyze, run_bench, run_oracle_check
from .engine import BACKENDS, AnalysisOptions
from .numdom import DOMAINS


def _positive(kind):
    def check(text: str):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"{text} is not positive")
        return v
    return check


def _grid(text: str) -> list[tuple[int, int]]:
    cells = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            n, k = (int(x) for x in part.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad grid cell {part!r}, expected n,k") from None
        cells.append((n, k))
    if not cells:
        raise argparse.ArgumentTypeError("empty grid")
    return cells


def _analysis_args(p: argparse.ArgumentParser, default_backend: str = "tree") -> None:
    p.add_argument("--lifted", choices=BACKENDS, default=default_backend, help="lifted representation")
    p.add_argument("--leaf-domain", choices=sorted(DOMAINS), default="polyhedra")
    p.add_argument("--node-domain", choices=sorted(DOMAINS), default="interval")
    p.add_argument("--widen-delay", type=int, default=2)
    p.add_argument("--narrow-iters", type=int, default=2)
    p.add_argument("--enum-cap", type=_positive(int), default=1_000_000)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timeout", type=_positive(float), default=DEFAULT_TIMEOUT, help="seconds")


def _options(args) -> AnalysisOptions:
    return AnalysisOptions(backend=args.lifted, leaf_domain=args.leaf_domain, node_domain=args.node_domain,
                           widen_delay=args.widen_delay, narrow_iters=args.narrow_iters,
                           enum_cap=args.enum_cap, timeout=args.timeout)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="famalyze", description="Numerical analysis of program families.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="infer invariants and check asserts")
    a.add_argument("file")
    _analysis_args(a)

    g = sub.add_parser("gen-test", help="emit the test_n^k family")
    g.add_argument("--n", type=_positive(int), required=True)
    g.add_argument("--k", type=_positive(int), required=True)
    g.add_argument("--out")

    b = sub.add_parser("bench", help="time tuple and tree analyses of test_n^k")
    b.add_argument("--grid", type=_grid, required=True, help='cells "n1,k1;n2,k2"')
    b.add_argument("--repeat", type=_positive(int), default=1)
    b.add_argument("--jobs", type=_positive(int), default=1, help="parallel cells; skews timings")
    _analysis_args(b)

    o = sub.add_parser("oracle-check", help="compare the lifted analysis against per-variant analyses")
    o.add_argument("file")
    _analysis_args(o)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # `bench --gen n,k` is accepted as a shorthand for `--grid`
    if argv and argv[0] == "bench" and "--gen" in argv and "--grid" not in argv:
        argv[argv.index("--gen")] = "--grid"
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        if args.command == "gen-test":
            text = gen_test(args.n, args.k)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        opts = _options(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "bench":
        code, out = run_bench(args.grid, opts, args.repeat, args.timeout, args.format, args.jobs)
    else:
        try:
            with open(args.file) as fh:
                source = fh.read()
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        run = run_analyze if args.command == "analyze" else run_oracle_check
        code, out = run(source, args.file, opts, args.format)
    stream = sys.stderr if out.startswith("error:") else sys.stdout
    print(out, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
