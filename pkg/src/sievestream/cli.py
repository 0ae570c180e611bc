"""Batch front end: generate, solve, compare, sweep, and bound from files.

Exit codes: 0 on success, 2 for usage or parse problems, 3 for infeasible or
contract violations.  ``SIEVE_THREADS`` caps sweep parallelism (0 = auto).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import baselines, bounds, solvers
from .apps.citation import DetectionModel, build_literature_instance, generate_citation_graph
from .apps.news import build_news_instance, generate_news_corpus
from .decomposable import two_pass_decomposable
from .errors import (
    ContractViolationError,
    FileFormatError,
    InfeasibleSolutionError,
    InvalidElementError,
    InvalidInstanceError,
    InvalidParameterError,
)
from .formats import (
    dump_citation_files,
    dump_instance,
    dump_json,
    load_citation_files,
    load_instance,
)
from .knapsack import standardize

USAGE_EXIT = 2
INFEASIBLE_EXIT = 3

VARY_ROW = {"recency": 0, "pagerank": 1, "refs": 2}


def thread_cap() -> int:
    """Worker count from SIEVE_THREADS; 0 or unset means one per CPU."""
    raw = os.environ.get("SIEVE_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidParameterError(f"SIEVE_THREADS must be an integer, got {raw!r}")
    if cap < 0:
        raise InvalidParameterError("SIEVE_THREADS must be >= 0")
    return cap if cap > 0 else (os.cpu_count() or 1)


def _parse_range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidParameterError("--range must look like lo:hi:step")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0:
        raise InvalidParameterError("--range step must be positive")
    values = []
    v = lo
    while v <= hi * (1.0 + 1e-12):
        values.append(round(v, 12))
        v += step
    if not values:
        raise InvalidParameterError("--range produced no budget points")
    return values


def _parse_id_set(text: str):
    try:
        return sorted({int(tok) for tok in text.split(",") if tok.strip()})
    except ValueError:
        raise InvalidParameterError("--set must be a comma-separated id list")


def _check_epsilon(eps: float, d: int) -> None:
    if not 0.0 < eps < 1.0 / (1 + 2 * d):
        raise InvalidParameterError(
            f"epsilon must lie in (0, 1/(1+2d)) = (0, {1.0 / (1 + 2 * d):.6g}) for d={d}"
        )


def _load_problem(args):
    """Resolve the input flags into (objective, instance, id map, extras)."""
    if args.instance:
        loaded = load_instance(args.instance)
        n = loaded.instance.n
        return loaded.objective, loaded.instance, np.arange(1, n + 1), {
            "kind": loaded.kind,
            "decomposable": loaded.decomposable,
        }
    if not (args.edges and args.meta and args.config):
        raise InvalidParameterError(
            "need either --instance or the citation trio --edges/--meta/--config"
        )
    graph, config = load_citation_files(args.edges, args.meta, args.config)
    model = DetectionModel.from_graph(
        graph, config["sources"], config["t_max"], config["weights"]
    )
    scores = baselines.biased_pagerank(graph, model.sources).scores
    built = build_literature_instance(graph, model, config["budgets"], scores=scores)
    return built.objective, built.instance, built.kept, {
        "kind": "citation",
        "graph": graph,
        "model": model,
        "config": config,
        "scores": scores,
        "built": built,
    }


def _result_record(selection, value, metrics, report, kept, eps, instance, extra=None):
    record = {
        "solution": sorted(int(kept[j - 1]) for j in selection),
        "value": float(value),
        "online_bound": float(report.online_bound),
        "offline_bound": float(report.offline_bound),
        "epsilon": eps,
        "d": instance.d,
        "budgets": [float(b) for b in instance.budgets],
        "metrics": {
            "elements_seen": metrics.elements_seen,
            "oracle_calls": metrics.oracle_calls,
            "peak_stored_elements": metrics.peak_stored_elements,
            "max_grid_size": metrics.max_grid_size,
            "passes": metrics.passes,
        },
    }
    if extra:
        record.update(extra)
    return record


def cmd_solve(args) -> int:
    objective, instance, kept, extras = _load_problem(args)
    _check_epsilon(args.epsilon, instance.d)
    std = standardize(instance)
    stream = list(range(1, instance.n + 1))
    start = time.perf_counter()
    if extras.get("decomposable") is not None:
        if args.delta is None:
            raise InvalidParameterError(
                "average_coverage instances need --delta for the sampled two-pass scheme"
            )
        selection, metrics = two_pass_decomposable(
            extras["decomposable"],
            std,
            stream,
            args.epsilon,
            args.delta,
            args.seed,
            faithful_early_exit=args.faithful_early_exit,
        )
        value = objective.evaluate(selection)
    else:
        selection, metrics = solvers.stream_dknapsack(
            objective,
            std,
            stream,
            args.epsilon,
            faithful_early_exit=args.faithful_early_exit,
        )
        value = objective.evaluate(selection)
    wall = time.perf_counter() - start
    report = bounds.online_bound(objective, std, selection, eps=args.epsilon)
    record = _result_record(
        selection, value, metrics, report, kept, args.epsilon, instance,
        extra={"wall_time_s": wall},
    )
    dump_json(record, args.out)
    return 0


def cmd_bound(args) -> int:
    objective, instance, kept, _ = _load_problem(args)
    std = standardize(instance)
    ids = _parse_id_set(args.set)
    original_to_column = {int(orig): col + 1 for col, orig in enumerate(kept)}
    try:
        columns = [original_to_column[j] for j in ids]
    except KeyError as exc:
        raise InfeasibleSolutionError(f"id {exc.args[0]} is not a selectable element")
    report = bounds.online_bound(objective, std, columns, eps=args.epsilon)
    dump_json(
        {
            "solution": ids,
            "value": report.solution_value,
            "online_bound": report.online_bound,
            "offline_bound": report.offline_bound,
            "per_row": [
                {"k": r.k, "lambda": r.lam, "delta": r.delta} for r in report.per_row
            ],
        },
        args.out,
    )
    return 0


def cmd_compare(args) -> int:
    objective, instance, kept, extras = _load_problem(args)
    _check_epsilon(args.epsilon, instance.d)
    std = standardize(instance)
    stream = list(range(1, instance.n + 1))
    rows = []

    def run(name, fn):
        calls0 = objective.eval_count
        start = time.perf_counter()
        selection = fn()
        wall = time.perf_counter() - start
        calls = objective.eval_count - calls0
        value = objective.evaluate(selection)
        rows.append([name, value, calls, wall])

    run(
        "streaming",
        lambda: solvers.stream_dknapsack(
            objective, std, stream, args.epsilon,
            faithful_early_exit=args.faithful_early_exit,
        )[0],
    )
    run("greedy_knapsack", lambda: baselines.greedy_knapsack(objective, std, args.enum_depth))
    if instance.n <= args.brute_limit:
        run("brute_force", lambda: baselines.brute_force_opt(objective, std).optimum_set)
    if extras.get("kind") == "citation":
        scores = extras["scores"][kept - 1]
        run(
            "pagerank",
            lambda: baselines.pagerank_recommend(
                extras["graph"], extras["model"].sources, std, scores=scores
            ),
        )

    greedy_value = rows[1][1]
    lines = ["solver,value,normalized_value,oracle_calls,wall_time_s"]
    for name, value, calls, wall in rows:
        norm = value / greedy_value if greedy_value > 0 else float("nan")
        lines.append(f"{name},{value:.10g},{norm:.10g},{calls},{wall:.6f}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _sweep_point(graph, model, scores, budgets, eps):
    built = build_literature_instance(graph, model, budgets, scores=scores)
    objective, instance = built.objective, built.instance
    std = standardize(instance)
    stream = list(range(1, instance.n + 1))
    selection, _ = solvers.stream_dknapsack(objective, std, stream, eps)
    value = objective.evaluate(selection)
    report = bounds.online_bound(objective, std, selection)
    pr_sel = baselines.pagerank_recommend(
        graph, model.sources, std, scores=scores[built.kept - 1]
    )
    pr_value = objective.evaluate(pr_sel)
    return value, report.online_bound, pr_value


def cmd_sweep(args) -> int:
    if args.instance:
        raise InvalidParameterError("sweep operates on citation inputs (--edges/--meta/--config)")
    _, _, _, extras = _load_problem(args)
    graph, model, config = extras["graph"], extras["model"], extras["config"]
    scores = extras["scores"]
    _check_epsilon(args.epsilon, 3)
    points = _parse_range(args.range)
    row = VARY_ROW[args.vary]

    def budgets_for(point):
        budgets = list(config["budgets"])
        budgets[row] = point
        return budgets

    workers = min(thread_cap(), len(points))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(
            pool.map(
                lambda p: _sweep_point(graph, model, scores, budgets_for(p), args.epsilon),
                points,
            )
        )
    lines = ["budget,streaming,bound,pagerank,rel_gap"]
    for point, (value, bound, pr_value) in zip(points, results):
        gap = (bound - value) / bound if bound > 0 else 0.0
        lines.append(f"{point:g},{value:.10g},{bound:.10g},{pr_value:.10g},{gap:.10g}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def cmd_gen(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    if args.kind == "instance":
        _gen_instance(args, out_dir, rng)
    elif args.kind == "news":
        corpus = generate_news_corpus(
            n_articles=args.articles, n_features=args.features, seed=args.seed
        )
        built = build_news_instance(corpus, args.budget)
        dump_instance(
            out_dir / "news_instance.json",
            built.instance,
            covers=[list(map(int, f)) for f in corpus.features],
            objective_kind="weighted_log_coverage",
            feature_weights=corpus.preference,
        )
    else:
        graph, sources = generate_citation_graph(
            n=args.n, n_sources=args.sources, seed=args.seed
        )
        dump_citation_files(
            out_dir, graph, sources, t_max=args.t_max, budgets=args.budgets or [20, 10, 20]
        )
    return 0


def _gen_instance(args, out_dir, rng):
    from .knapsack import KnapsackInstance

    n, d = args.n, args.d
    budgets = rng.uniform(4.0, 8.0, size=d) * rng.uniform(1.0, 2.0)
    weights = np.vstack([rng.uniform(1.0, b / 2.0, size=n) for b in budgets])
    universe = max(4, int(1.5 * n))
    covers = [
        sorted(int(u) for u in rng.choice(universe, size=rng.integers(1, 5), replace=False))
        for _ in range(n)
    ]
    inst = KnapsackInstance(weights=weights, budgets=budgets)
    dump_instance(
        out_dir / "instance.json", inst, covers=covers, objective_kind=args.objective
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sievestream",
        description="Streaming submodular maximization under multiple knapsack budgets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_inputs(p):
        p.add_argument("--instance", help="instance JSON file")
        p.add_argument("--edges", help="citation arcs TSV (src<TAB>dst)")
        p.add_argument("--meta", help="paper metadata TSV (id<TAB>age_days<TAB>ref_count)")
        p.add_argument("--config", help="citation config JSON (sources, t_max, budgets)")

    solve = sub.add_parser("solve", help="run the one-pass streaming solver")
    add_inputs(solve)
    solve.add_argument("--epsilon", type=float, required=True)
    solve.add_argument("--faithful-early-exit", action="store_true")
    solve.add_argument("--delta", type=float, help="sampling failure bound (average_coverage)")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--out", required=True)
    solve.set_defaults(fn=cmd_solve)

    compare = sub.add_parser("compare", help="streaming vs greedy/brute/pagerank table")
    add_inputs(compare)
    compare.add_argument("--epsilon", type=float, required=True)
    compare.add_argument("--enum-depth", type=int, choices=(0, 1, 2, 3), default=1)
    compare.add_argument("--brute-limit", type=int, default=12)
    compare.add_argument("--faithful-early-exit", action="store_true")
    compare.add_argument("--out", required=True)
    compare.set_defaults(fn=cmd_compare)

    sweep = sub.add_parser("sweep", help="budget sensitivity curves (citation inputs)")
    add_inputs(sweep)
    sweep.add_argument("--vary", choices=tuple(VARY_ROW), required=True)
    sweep.add_argument("--range", required=True, help="lo:hi:step budget values")
    sweep.add_argument("--epsilon", type=float, required=True)
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(fn=cmd_sweep)

    gen = sub.add_parser("gen", help="write synthetic inputs")
    gen.add_argument("kind", choices=("instance", "news", "citation"))
    gen.add_argument("--n", type=int, default=12, help="elements (instance) or papers (citation)")
    gen.add_argument("--d", type=int, default=2, help="constraint rows (instance)")
    gen.add_argument(
        "--objective", choices=("coverage", "average_coverage"), default="coverage"
    )
    gen.add_argument("--articles", type=int, default=200)
    gen.add_argument("--features", type=int, default=480)
    gen.add_argument("--budget", type=float, default=20.0, help="word budget (news)")
    gen.add_argument("--sources", type=int, default=5)
    gen.add_argument("--t-max", type=float, default=50.0)
    gen.add_argument("--budgets", type=float, nargs=3, help="citation budgets (age, score, refs)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")
    gen.set_defaults(fn=cmd_gen)

    bound = sub.add_parser("bound", help="certified optimum bound for a given set")
    add_inputs(bound)
    bound.add_argument("--set", required=True, help="comma-separated element ids")
    bound.add_argument("--epsilon", type=float, help="also fill the a-priori bound")
    bound.add_argument("--out", required=True)
    bound.set_defaults(fn=cmd_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (FileFormatError, InvalidParameterError, InvalidElementError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (InvalidInstanceError, InfeasibleSolutionError, ContractViolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INFEASIBLE_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
