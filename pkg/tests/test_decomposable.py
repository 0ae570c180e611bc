import numpy as np
import pytest

from sievestream import (
    DecomposableObjective,
    KnapsackInstance,
    check_monotone_submodular,
    make_coverage_objective,
    required_sample_size,
    reservoir_sample,
    standardize,
    stream_dknapsack,
    two_pass_decomposable,
)
from sievestream.errors import ContractViolationError, InvalidParameterError


def facility_components(similarity):
    """One bounded component per customer: best similarity to any pick."""

    def component(i):
        row = similarity[i - 1]

        def fi(ids):
            return max((row[j - 1] for j in ids), default=0.0)

        return fi

    return [component(i) for i in range(1, len(similarity) + 1)]


def toy_problem(seed, n=30, b=3.0):
    rng = np.random.default_rng(seed)
    sim = rng.uniform(0.0, 1.0, size=(n, n))
    np.fill_diagonal(sim, 1.0)
    dec = DecomposableObjective(facility_components(sim))
    std = standardize(KnapsackInstance(weights=np.ones((1, n)), budgets=np.array([b])))
    return dec, std


class TestRequiredSampleSize:
    def test_formula_value_capped(self):
        # raw value ceil(32 * (2 ln 100 + ln 4)) = 340, capped at n = 100
        assert required_sample_size(0.5, 0.5, 2.0, 100) == 100

    def test_formula_value_uncapped(self):
        raw = 2 * 0.5**-2 * 4 * (2 * np.log(10**6) + np.log(4.0))
        assert required_sample_size(0.5, 0.5, 2.0, 10**6) == int(np.ceil(raw))

    def test_positivity_and_guards(self):
        assert required_sample_size(0.99, 0.99, 1.0, 2) >= 1
        with pytest.raises(InvalidParameterError):
            required_sample_size(1.0, 0.5, 1.0, 10)
        with pytest.raises(InvalidParameterError):
            required_sample_size(0.5, 0.0, 1.0, 10)
        with pytest.raises(InvalidParameterError):
            required_sample_size(0.5, 0.5, 0.5, 10)

    def test_cap_at_ground_size(self):
        assert required_sample_size(0.1, 0.1, 5.0, 7) == 7


class TestReservoirSample:
    def test_short_stream_kept_whole(self):
        assert reservoir_sample([1, 2, 3], 5, seed=0) == {1, 2, 3}

    def test_size_zero(self):
        assert reservoir_sample(range(100), 0, seed=0) == set()

    def test_exact_size(self):
        assert len(reservoir_sample(range(1, 101), 10, seed=42)) == 10

    def test_determinism(self):
        a = reservoir_sample(range(1, 1001), 25, seed=7)
        b = reservoir_sample(range(1, 1001), 25, seed=7)
        assert a == b

    def test_inclusion_frequencies_roughly_uniform(self):
        # smaller companion to the acceptance-scale chi-square check
        draws = 20000
        counts = np.zeros(10)
        for s in range(draws):
            for item in reservoir_sample(range(1, 11), 3, seed=s):
                counts[item - 1] += 1
        freq = counts / draws
        assert np.all(np.abs(freq - 0.3) < 0.015)

    def test_pair_inclusion_frequencies(self):
        draws = 20000
        pair = 0
        for s in range(draws):
            sample = reservoir_sample(range(1, 11), 3, seed=s)
            if 1 in sample and 2 in sample:
                pair += 1
        # P(both of two fixed ids in a uniform 3-subset of 10) = 1/15
        assert pair / draws == pytest.approx(1 / 15, abs=0.01)


class TestTwoPassDecomposable:
    def test_identical_components_match_plain_solver(self):
        cov = make_coverage_objective({1: {0, 1}, 2: {1, 2}, 3: {3}})
        full = 4.0  # max value, used to keep components in [0, 1]

        def fi(ids):
            return cov._fn(frozenset(ids)) / full

        dec = DecomposableObjective([fi, fi, fi])
        std = standardize(
            KnapsackInstance(weights=np.ones((1, 3)), budgets=np.array([2.0]))
        )
        stream = [1, 2, 3]
        got, metrics = two_pass_decomposable(dec, std, stream, 0.1, 0.2, seed=5,
                                             sample_size=2)
        ref, _ = stream_dknapsack(dec.combined(), std, stream, 0.1, use_kernel=False)
        assert got == ref
        assert metrics.passes == 2

    def test_full_sample_equals_exact_objective(self):
        dec, std = toy_problem(seed=1, n=12)
        stream = list(range(1, 13))
        got, _ = two_pass_decomposable(dec, std, stream, 0.3, 0.2, seed=9,
                                       sample_size=12)
        ref, _ = stream_dknapsack(dec.combined(), std, stream, 0.3, use_kernel=False)
        assert got == ref

    def test_deterministic_under_seed(self):
        dec, std = toy_problem(seed=2, n=20)
        stream = list(range(1, 21))
        a, _ = two_pass_decomposable(dec, std, stream, 0.2, 0.2, seed=11, sample_size=6)
        b, _ = two_pass_decomposable(dec, std, stream, 0.2, 0.2, seed=11, sample_size=6)
        assert a == b

    def test_unbounded_component_detected(self):
        dec = DecomposableObjective([lambda ids: 3.0, lambda ids: 0.0])
        std = standardize(
            KnapsackInstance(weights=np.ones((1, 2)), budgets=np.array([1.0]))
        )
        with pytest.raises(ContractViolationError):
            two_pass_decomposable(dec, std, [1, 2], 0.2, 0.2, seed=0)

    def test_one_shot_iterator_rejected(self):
        dec, std = toy_problem(seed=3, n=5)
        with pytest.raises(InvalidParameterError):
            two_pass_decomposable(dec, std, iter([1, 2, 3, 4, 5]), 0.2, 0.2, seed=0)

    def test_sampled_surrogate_stays_monotone_submodular(self):
        dec, std = toy_problem(seed=4, n=15)
        surrogate = dec.sampled(reservoir_sample(range(1, 16), 5, seed=2))
        assert check_monotone_submodular(surrogate, 300, seed=8).passed

    def test_subsampled_runs_usually_hit_the_inequality(self):
        # aggressive subsampling (far below the bound-driven size) still
        # succeeds in most runs; seeds fixed so the measurement is stable
        dec, std = toy_problem(seed=6, n=20)
        stream = list(range(1, 21))
        full = dec.combined()
        from sievestream import brute_force_opt

        opt = brute_force_opt(full, std).optimum_value
        eps, delta = 0.25, 0.2
        hits = 0
        runs = 40
        for s in range(runs):
            sel, _ = two_pass_decomposable(dec, std, stream, eps, delta, seed=s,
                                           sample_size=5)
            surrogate = dec.sampled(reservoir_sample(stream, 5, seed=s))
            if surrogate.evaluate(sel) >= (1 / 3 - eps) * (opt - eps) - 1e-9:
                hits += 1
        assert hits / runs >= 1 - delta
