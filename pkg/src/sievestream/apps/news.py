"""Reading-list selection: weighted log-saturating feature coverage.

Each article carries a set of features and a word count.  The utility of a
selection is sum_t w_t * ln(1 + #selected articles with feature t): the
preference weights w push valuable features, while the log saturates
repeated coverage of the same feature.  The single constraint row is the
total word count against the reading budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameterError
from ..knapsack import KnapsackInstance
from ..objectives import Objective
from . import BuiltInstance

__all__ = ["NewsCorpus", "news_objective", "build_news_instance", "generate_news_corpus"]


@dataclass
class NewsCorpus:
    """Articles as feature-id lists plus word counts and feature preferences."""

    n_features: int
    features: list  # per article, array of 0-based feature ids
    word_counts: np.ndarray  # per article, int >= 1
    preference: np.ndarray  # per feature, nonnegative weight

    def __post_init__(self):
        self.word_counts = np.asarray(self.word_counts, dtype=np.int64)
        self.preference = np.asarray(self.preference, dtype=np.float64)
        if (self.word_counts < 1).any():
            raise InvalidParameterError("word counts must be >= 1")
        if (self.preference < 0).any():
            raise InvalidParameterError("preference weights must be nonnegative")
        if self.preference.shape != (self.n_features,):
            raise InvalidParameterError("need one preference weight per feature")
        norm = []
        for f in self.features:
            arr = np.unique(np.asarray(f, dtype=np.int32))
            if arr.size and (arr[0] < 0 or arr[-1] >= self.n_features):
                raise InvalidParameterError("feature ids must lie in [0, n_features)")
            norm.append(arr)
        self.features = norm
        if len(self.features) != len(self.word_counts):
            raise InvalidParameterError("need one word count per article")

    @property
    def n_articles(self) -> int:
        return len(self.features)


class _NewsObjective(Objective):
    def __init__(self, features, preference):
        self._features = features
        self._w = preference
        super().__init__(len(features), self._value, name="news")

    def _value(self, ids):
        if not ids:
            return 0.0
        feats = np.concatenate([self._features[j - 1] for j in ids])
        counts = np.bincount(feats, minlength=len(self._w))
        return float(self._w @ np.log1p(counts))

    def kernel_payload(self):
        indptr = np.zeros(self.ground_size + 1, dtype=np.int64)
        flat = []
        for j, f in enumerate(self._features, start=1):
            flat.extend(int(t) for t in f)
            indptr[j] = len(flat)
        return ("logfeatures", indptr, np.asarray(flat, dtype=np.int32), self._w)


def news_objective(corpus: NewsCorpus) -> Objective:
    """Monotone submodular reading utility over the corpus articles."""
    return _NewsObjective(corpus.features, corpus.preference)


def build_news_instance(corpus: NewsCorpus, budget: float) -> BuiltInstance:
    """Word-count knapsack over the articles that fit the reading budget.

    Articles longer than the budget can never be selected and are dropped;
    the returned mapping records them.
    """
    if corpus.n_articles == 0 or budget < corpus.word_counts.min():
        raise InvalidParameterError("budget admits no article at all")
    keep = corpus.word_counts <= budget * (1.0 + 1e-12)
    kept = np.flatnonzero(keep) + 1
    dropped = np.flatnonzero(~keep) + 1
    feats = [corpus.features[j - 1] for j in kept]
    words = corpus.word_counts[kept - 1]
    obj = _NewsObjective(feats, corpus.preference)
    inst = KnapsackInstance(
        weights=words[None, :].astype(np.float64), budgets=np.array([float(budget)])
    )
    return BuiltInstance(objective=obj, instance=inst, kept=kept, dropped=dropped)


def generate_news_corpus(
    n_articles: int,
    n_features: int = 480,
    seed=0,
    min_features: int = 3,
    max_features: int = 12,
    zipf_exponent: float = 1.1,
) -> NewsCorpus:
    """Synthetic corpus: Zipf-popular features, uniform {1..5} word counts.

    Feature popularity follows rank^(-zipf_exponent); each article draws a
    uniform number of distinct features from that law.  Preference weights
    are uniform on [0, 1).
    """
    if n_articles < 1 or n_features < max_features:
        raise InvalidParameterError("need n_articles >= 1 and n_features >= max_features")
    rng = np.random.default_rng(seed)
    ranks = np.arange(1, n_features + 1, dtype=np.float64)
    popularity = ranks**-zipf_exponent
    popularity /= popularity.sum()
    features = []
    for _ in range(n_articles):
        g = int(rng.integers(min_features, max_features + 1))
        features.append(np.sort(rng.choice(n_features, size=g, replace=False, p=popularity)))
    word_counts = rng.integers(1, 6, size=n_articles)
    preference = rng.uniform(0.0, 1.0, size=n_features)
    return NewsCorpus(
        n_features=n_features,
        features=features,
        word_counts=word_counts,
        preference=preference,
    )
