"""Benchmark family generator, benchmark harness and command execution."""

from __future__ import annotations

import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

from .engine import AnalysisOptions, analyze, analyze_brute, compare
from .errors import AnalysisTimeout, CapExceeded, FamalyzeError, NonTermination
from .frontend import ast as A
from .frontend import parse
from .report import compare_text, to_json, to_text

DEFAULT_TIMEOUT = 300.0

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


def gen_test(n: int, k: int) -> str:
    """Family with features A1..An over [0,k-1] and one `#if` per feature."""
    if n < 1 or k < 1:
        raise ValueError("gen_test needs n >= 1 and k >= 1")
    lines = [f"#feature A{i} in [0,{k - 1}]" for i in range(1, n + 1)]
    lines.append("int i := 0;")
    lines += [f"#if (A{i} == 0) i := i + 1; #else i := 0; #endif" for i in range(1, n + 1)]
    return "\n".join(lines) + "\n"


# -- benchmarking ---------------------------------------------------------------------

@dataclass
class BenchRecord:
    program: str
    n: int
    k: int
    backend: str
    domains: str
    wall_time: float
    outcome: str  # ok, timeout or cap
    size: int | None = None  # leaves of the final tree, or the tuple width
    runs: list[float] = field(default_factory=list)


def _final_size(result) -> int:
    state = result.states[result.program.exit_label]
    return state.leaf_count() if hasattr(state, "leaf_count") else len(state)


def bench_cell(n: int, k: int, backend: str, opts: AnalysisOptions, repeat: int = 1,
               timeout: float = DEFAULT_TIMEOUT) -> BenchRecord:
    program = parse(gen_test(n, k), name=f"test_{n}^{k}")
    cell_opts = replace(opts, backend=backend, timeout=timeout)
    domains = f"{opts.leaf_domain}/{opts.node_domain}" if backend == "tree" else opts.leaf_domain
    runs, size, outcome = [], None, "ok"
    for _ in range(repeat):
        start = time.monotonic()
        try:
            result = analyze(program, cell_opts)
        except AnalysisTimeout:
            runs.append(time.monotonic() - start)
            outcome = "timeout"
            break
        except CapExceeded:
            runs.append(time.monotonic() - start)
            outcome = "cap"
            break
        runs.append(time.monotonic() - start)
        size = _final_size(result)
    return BenchRecord(program.name, n, k, backend, domains, statistics.fmean(runs), outcome, size, runs)


def bench(grid: list[tuple[int, int]], backends=("tuple", "tree"), opts: AnalysisOptions = AnalysisOptions(),
          repeat: int = 1, timeout: float = DEFAULT_TIMEOUT, jobs: int = 1) -> list[BenchRecord]:
    """Time every (cell, backend); ``jobs > 1`` runs cells in worker processes (not for timing)."""
    if not grid:
        raise ValueError("benchmark grid is empty")
    cells = [(n, k, b, opts, repeat, timeout) for n, k in grid for b in backends]
    if jobs <= 1:
        return [bench_cell(*c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_bench_cell_args, cells))


def _bench_cell_args(args) -> BenchRecord:
    return bench_cell(*args)


def summarize(records: list[BenchRecord]) -> list[dict]:
    """One row per (n, k): times per backend and the tuple/tree speedup."""
    rows: dict[tuple[int, int], dict] = {}
    for r in records:
        row = rows.setdefault((r.n, r.k), {"n": r.n, "k": r.k})
        row[r.backend] = r.wall_time if r.outcome == "ok" else r.outcome
        row[f"{r.backend}_size"] = r.size
    for row in rows.values():
        tu, tr = row.get("tuple"), row.get("tree")
        if isinstance(tu, float) and isinstance(tr, float) and tr > 0:
            row["speedup"] = tu / tr
        elif "tuple" in row and not isinstance(tu, float):
            row["speedup"] = "infeasible"
    return list(rows.values())


def summary_text(records: list[BenchRecord]) -> str:
    def fmt(v):
        return f"{v:.3f}" if isinstance(v, float) else str(v if v is not None else "-")

    lines = [f"{'n':>3} {'k':>3} {'tuple s':>10} {'width':>7} {'tree s':>10} {'leaves':>7} {'speedup':>10}"]
    for row in summarize(records):
        lines.append(f"{row['n']:>3} {row['k']:>3} {fmt(row.get('tuple')):>10} {fmt(row.get('tuple_size')):>7} "
                     f"{fmt(row.get('tree')):>10} {fmt(row.get('tree_size')):>7} {fmt(row.get('speedup')):>10}")
    return "\n".join(lines)


# -- commands -------------------------------------------------------------------------

def _affine_features(program: A.Program) -> bool:
    conds = list(program.constraints)
    conds += [s.cond for s in A.iter_stmts(program.body) if isinstance(s, A.IfDef)]
    return all(A.is_affine(c) for c in conds)


def run_analyze(source: str, name: str, opts: AnalysisOptions, fmt: str = "text") -> tuple[int, str]:
    try:
        program = parse(source, name=name)
    except FamalyzeError as e:
        return EXIT_USAGE, f"error: {e}"
    try:
        result = analyze(program, opts)
    except (CapExceeded, AnalysisTimeout, NonTermination) as e:
        return EXIT_LIMIT, f"error: {e}"
    out = json.dumps(to_json(result), indent=2) if fmt == "json" else to_text(result)
    return (EXIT_OK if result.all_valid() else EXIT_ASSERT), out


def run_oracle_check(source: str, name: str, opts: AnalysisOptions, fmt: str = "text") -> tuple[int, str]:
    try:
        program = parse(source, name=name)
    except FamalyzeError as e:
        return EXIT_USAGE, f"error: {e}"
    try:
        result = analyze(program, replace(opts, backend="tree" if opts.backend == "brute" else opts.backend))
        oracle = analyze_brute(program, opts)
    except (CapExceeded, AnalysisTimeout, NonTermination) as e:
        return EXIT_LIMIT, f"error: {e}"
    report = compare(result, oracle)
    affine = _affine_features(program)
    ok = report.sound and (report.exact or not affine)
    if fmt == "json":
        out = json.dumps({"program": name, "affine": affine, "counts": report.counts(),
                          "failures": [{"label": l, "config": k.as_dict(), "class": c}
                                       for l, k, c in report.failures()]}, indent=2)
    else:
        out = compare_text(report)
    return (EXIT_OK if ok else EXIT_ASSERT), out


def run_bench(grid, opts: AnalysisOptions, repeat: int, timeout: float, fmt: str = "text",
              jobs: int = 1) -> tuple[int, str]:
    records = bench(grid, opts=opts, repeat=repeat, timeout=timeout, jobs=jobs)
    if fmt == "json":
        return EXIT_OK, json.dumps({"records": [asdict(r) for r in records], "summary": summarize(records)}, indent=2)
    return EXIT_OK, summary_text(records)
