"""On-disk formats: instances, citation graphs, results, and plot data.

All JSON is UTF-8 with sorted keys and a fixed indent so generated files are
byte-reproducible under a seed.  Instance files carry the constraint matrix
along with the objective family; citation networks are an edge TSV plus a
metadata TSV plus a small JSON config for sources, weights, horizon, and
budgets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .apps.citation import CitationGraph
from .errors import FileFormatError
from .knapsack import KnapsackInstance
from .objectives import Objective, make_coverage_objective, make_modular_objective

__all__ = [
    "LoadedInstance",
    "load_instance",
    "dump_instance",
    "load_citation_files",
    "dump_citation_files",
    "dump_json",
]

OBJECTIVE_KINDS = (
    "coverage",
    "weighted_log_coverage",
    "cardinality",
    "average_coverage",
)


def dump_json(payload, path) -> None:
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _require(cond: bool, message: str):
    if not cond:
        raise FileFormatError(message)


@dataclass
class LoadedInstance:
    """Parsed instance file: objective plus constraints plus raw covers."""

    objective: Objective
    instance: KnapsackInstance
    kind: str
    covers: list
    decomposable: object | None = None  # set for average_coverage instances


def load_instance(path) -> LoadedInstance:
    """Parse an instance JSON file.

    Raises :class:`FileFormatError` with a location hint on malformed input;
    constraint violations (nonpositive weights, weights over budget) surface
    as instance errors.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    _require(isinstance(doc, dict), f"{path}: top level must be a JSON object")
    for key in ("d", "budgets", "elements"):
        _require(key in doc, f"{path}: missing required key {key!r}")
    d = doc["d"]
    budgets = doc["budgets"]
    elements = doc["elements"]
    _require(isinstance(d, int) and d >= 1, f"{path}: d must be a positive integer")
    _require(
        isinstance(budgets, list) and len(budgets) == d,
        f"{path}: budgets must list exactly d={d} values",
    )
    _require(isinstance(elements, list), f"{path}: elements must be a list")
    kind = doc.get("objective", "coverage")
    _require(kind in OBJECTIVE_KINDS, f"{path}: unknown objective kind {kind!r}")

    n = len(elements)
    weights = np.zeros((d, n))
    covers: list = []
    for pos, el in enumerate(elements):
        _require(isinstance(el, dict), f"{path}: element #{pos + 1} must be an object")
        _require(
            el.get("id") == pos + 1,
            f"{path}: element #{pos + 1} must carry id {pos + 1} (ids are dense, 1-based)",
        )
        w = el.get("weights")
        _require(
            isinstance(w, list) and len(w) == d,
            f"{path}: element {pos + 1} needs {d} weights",
        )
        weights[:, pos] = w
        covers.append([int(u) for u in el.get("features", [])])

    decomposable = None
    if kind == "coverage":
        objective = make_coverage_objective(covers)
    elif kind == "cardinality":
        objective = make_modular_objective(np.ones(n))
    elif kind == "average_coverage":
        decomposable = _average_coverage(covers)
        objective = decomposable.combined()
    else:
        fw = doc.get("feature_weights")
        _require(
            isinstance(fw, list) and fw,
            f"{path}: weighted_log_coverage needs a feature_weights list",
        )
        from .apps.news import NewsCorpus, news_objective

        corpus = NewsCorpus(
            n_features=len(fw),
            features=covers,
            word_counts=np.maximum(weights[0].astype(np.int64), 1),
            preference=np.asarray(fw, dtype=np.float64),
        )
        objective = news_objective(corpus)
    instance = KnapsackInstance(weights=weights, budgets=np.asarray(budgets, dtype=np.float64))
    return LoadedInstance(
        objective=objective,
        instance=instance,
        kind=kind,
        covers=covers,
        decomposable=decomposable,
    )


def _average_coverage(covers):
    """Per-element coverage satisfaction, averaged over the ground set.

    Component i scores the fraction of element i's own universe ids that the
    selection covers (1 when i covers nothing), so each component is bounded
    by 1 and the average is ground-set dependent.
    """
    from .decomposable import DecomposableObjective

    sets = [frozenset(c) for c in covers]

    def component(i):
        own = sets[i - 1]

        def fi(ids):
            if not own:
                return 1.0
            hit = set()
            for j in ids:
                hit |= sets[j - 1] & own
            return len(hit) / len(own)

        return fi

    return DecomposableObjective([component(i) for i in range(1, len(sets) + 1)])


def dump_instance(path, instance: KnapsackInstance, covers=None, objective_kind="coverage",
                  feature_weights=None) -> None:
    """Write an instance JSON file (the inverse of :func:`load_instance`)."""
    doc = {
        "d": instance.d,
        "budgets": [float(b) for b in instance.budgets],
        "objective": objective_kind,
        "elements": [
            {
                "id": j + 1,
                "weights": [float(w) for w in instance.weights[:, j]],
                **(
                    {"features": [int(u) for u in covers[j]]}
                    if covers is not None
                    else {}
                ),
            }
            for j in range(instance.n)
        ],
    }
    if feature_weights is not None:
        doc["feature_weights"] = [float(w) for w in feature_weights]
    dump_json(doc, path)


def load_citation_files(edges_path, meta_path, config_path):
    """Read a citation network from its three files.

    Returns (graph, config dict) where config carries ``sources``,
    ``weights`` (may be None for uniform), ``t_max``, and ``budgets``.
    """
    meta_rows = []
    for lineno, line in enumerate(Path(meta_path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        _require(
            len(parts) == 3,
            f"{meta_path}: line {lineno}: expected id<TAB>age_days<TAB>ref_count",
        )
        try:
            meta_rows.append((int(parts[0]), float(parts[1]), int(parts[2])))
        except ValueError:
            raise FileFormatError(f"{meta_path}: line {lineno}: non-numeric field") from None
    _require(bool(meta_rows), f"{meta_path}: no metadata rows")
    meta_rows.sort()
    ids = [r[0] for r in meta_rows]
    n = len(ids)
    _require(ids == list(range(1, n + 1)), f"{meta_path}: ids must be dense 1..n")

    arcs = []
    for lineno, line in enumerate(Path(edges_path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        _require(len(parts) == 2, f"{edges_path}: line {lineno}: expected src<TAB>dst")
        try:
            arcs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise FileFormatError(f"{edges_path}: line {lineno}: non-numeric vertex id") from None

    graph = CitationGraph(
        n=n,
        arcs=np.asarray(arcs, dtype=np.int64).reshape(-1, 2),
        age_days=np.asarray([r[1] for r in meta_rows]),
        ref_counts=np.asarray([r[2] for r in meta_rows], dtype=np.int64),
    )

    try:
        config = json.loads(Path(config_path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{config_path}: line {exc.lineno}: {exc.msg}") from None
    _require(isinstance(config, dict), f"{config_path}: top level must be a JSON object")
    for key in ("sources", "t_max", "budgets"):
        _require(key in config, f"{config_path}: missing required key {key!r}")
    _require(
        isinstance(config["budgets"], list) and len(config["budgets"]) == 3,
        f"{config_path}: budgets must list three values (age, score, references)",
    )
    return graph, {
        "sources": [int(a) for a in config["sources"]],
        "weights": config.get("weights"),
        "t_max": float(config["t_max"]),
        "budgets": [float(b) for b in config["budgets"]],
    }


def dump_citation_files(out_dir, graph: CitationGraph, sources, t_max, budgets,
                        weights=None, prefix="citation") -> dict:
    """Write edges/meta/config files; returns their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    edges_path = out_dir / f"{prefix}_edges.tsv"
    meta_path = out_dir / f"{prefix}_meta.tsv"
    config_path = out_dir / f"{prefix}_config.json"
    edges_path.write_text(
        "".join(f"{int(u)}\t{int(v)}\n" for u, v in graph.arcs), encoding="utf-8"
    )
    meta_path.write_text(
        "".join(
            f"{j + 1}\t{graph.age_days[j]:g}\t{int(graph.ref_counts[j])}\n"
            for j in range(graph.n)
        ),
        encoding="utf-8",
    )
    config = {
        "sources": [int(a) for a in sources],
        "t_max": float(t_max),
        "budgets": [float(b) for b in budgets],
    }
    if weights is not None:
        config["weights"] = [float(w) for w in weights]
    dump_json(config, config_path)
    return {"edges": edges_path, "meta": meta_path, "config": config_path}
