#!/usr/bin/env python3
"""Compiled kernel vs pure-Python engine on the one-pass streaming solver.

Runs the same instances through both paths, checks the outputs agree, and
prints wall times and speedups.  The compiled path needs the extension
(`pip install -e .` builds it); without it this script reports pure-only
timings.
"""

import argparse
import time

import numpy as np

import sievestream as sv
from sievestream.apps.citation import (
    DetectionModel,
    build_literature_instance,
    generate_citation_graph,
)
from sievestream.apps.news import build_news_instance, generate_news_corpus


def time_path(obj_factory, std, stream, eps, use_kernel):
    obj = obj_factory()
    start = time.perf_counter()
    selected, metrics = sv.stream_dknapsack(obj, std, stream, eps, use_kernel=use_kernel)
    elapsed = time.perf_counter() - start
    return selected, obj_factory().evaluate(selected), metrics, elapsed


def coverage_case(n, seed):
    rng = np.random.default_rng(seed)
    universe = max(n // 2, 4)
    covers = [
        set(map(int, rng.choice(universe, size=int(rng.integers(1, 5)), replace=False)))
        for _ in range(n)
    ]
    budgets = np.array([50.0, 60.0])
    weights = np.vstack([rng.uniform(1.0, 10.0, size=n) for _ in budgets])
    std = sv.standardize(sv.KnapsackInstance(weights=weights, budgets=budgets))
    return (lambda: sv.make_coverage_objective(covers)), std, 0.1


def news_case(n, seed):
    corpus = generate_news_corpus(n, n_features=480, seed=seed)
    built = build_news_instance(corpus, budget=40.0)
    from sievestream.apps.news import news_objective

    std = sv.standardize(built.instance)
    return (lambda: news_objective(corpus)), std, 0.1


def citation_case(n, seed):
    graph, sources = generate_citation_graph(n, 5, seed=seed)
    model = DetectionModel.from_graph(graph, sources, t_max=50.0)
    scores = sv.biased_pagerank(graph, sources).scores
    built = build_literature_instance(graph, model, budgets=(25.0, 10.0, 30.0), scores=scores)
    from sievestream.apps.citation import citation_objective

    kept_model = DetectionModel(
        sources=model.sources,
        weights=model.weights,
        t_max=model.t_max,
        distances=model.distances[built.kept - 1],
    )
    std = sv.standardize(built.instance)
    return (lambda: citation_objective(kept_model)), std, 0.05


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--coverage-n", type=int, default=100_000)
    parser.add_argument("--news-n", type=int, default=5_000)
    parser.add_argument("--citation-n", type=int, default=3_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    cases = [
        ("coverage", *coverage_case(args.coverage_n, args.seed)),
        ("news", *news_case(args.news_n, args.seed)),
        ("citation", *citation_case(args.citation_n, args.seed)),
    ]

    print(f"compiled kernel available: {sv.HAVE_KERNEL}")
    print(f"{'family':<10} {'n':>8} {'pure [s]':>10} {'kernel [s]':>11} "
          f"{'speedup':>8}  agreement")
    for name, factory, std, eps in cases:
        stream = list(range(1, std.n + 1))
        sel_p, val_p, met_p, t_pure = time_path(factory, std, stream, eps, use_kernel=False)
        if not sv.HAVE_KERNEL:
            print(f"{name:<10} {std.n:>8} {t_pure:>10.3f} {'-':>11} {'-':>8}  pure only")
            continue
        sel_k, val_k, met_k, t_kern = time_path(factory, std, stream, eps, use_kernel=True)
        same_set = sel_k == sel_p
        close = abs(val_k - val_p) <= 1e-9 * max(1.0, abs(val_p))
        agreement = "identical" if same_set else ("value match" if close else "MISMATCH")
        print(
            f"{name:<10} {std.n:>8} {t_pure:>10.3f} {t_kern:>11.3f} "
            f"{t_pure / max(t_kern, 1e-9):>7.1f}x  {agreement}"
        )
        if not (same_set or close):
            raise SystemExit(f"paths disagree on {name}: {val_p} vs {val_k}")


if __name__ == "__main__":
    main()
