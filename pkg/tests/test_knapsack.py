import numpy as np
import pytest

from sievestream import (
    KnapsackInstance,
    classify_big_element,
    is_feasible,
    make_coverage_objective,
    standardize,
)
from sievestream.errors import InvalidInstanceError

from .conftest import INSTANCE_A_COVERS


def make_instance(weights, budgets):
    return KnapsackInstance(weights=np.array(weights, dtype=float),
                            budgets=np.array(budgets, dtype=float))


def test_standardize_two_row_example():
    std = standardize(make_instance([[2, 4], [1, 5]], [10, 5]))
    assert np.allclose(std.weights, [[1, 2], [1, 5]])
    assert std.budget == pytest.approx(5.0)
    assert std.scale_record.reference_budget == 10.0
    assert std.scale_record.weight_divisor == 2.0


def test_standardize_cardinality_already_standard():
    std = standardize(make_instance([[1, 1, 1]], [3]))
    assert np.allclose(std.weights, 1.0)
    assert std.budget == pytest.approx(3.0)


def test_standardize_single_row_example():
    std = standardize(make_instance([[3, 2]], [6]))
    assert np.allclose(std.weights, [[1.5, 1.0]])
    assert std.budget == pytest.approx(3.0)


def test_standardize_idempotent():
    rng = np.random.default_rng(11)
    for _ in range(200):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(1, 10))
        budgets = rng.uniform(1.0, 20.0, size=d)
        weights = np.vstack([rng.uniform(0.01, b, size=n) for b in budgets])
        std = standardize(make_instance(weights, budgets))
        again = standardize(
            make_instance(std.weights, np.full(std.d, std.budget))
        )
        assert np.allclose(again.weights, std.weights, rtol=1e-12)
        assert again.budget == pytest.approx(std.budget, rel=1e-12)


def test_standardize_preserves_feasibility():
    rng = np.random.default_rng(23)
    checked = 0
    while checked < 1000:
        d = int(rng.integers(1, 4))
        n = int(rng.integers(1, 12))
        budgets = rng.uniform(1.0, 15.0, size=d)
        weights = np.vstack([rng.uniform(0.05, b, size=n) for b in budgets])
        inst = make_instance(weights, budgets)
        std = standardize(inst)
        for _ in range(5):
            subset = [j for j in range(1, n + 1) if rng.random() < 0.5]
            raw_ok = bool(
                (weights[:, np.asarray(subset, dtype=int) - 1].sum(axis=1)
                 <= budgets * (1 + 1e-12)).all()
            ) if subset else True
            assert raw_ok == is_feasible(std, subset)
            checked += 1


def test_standardized_feasible_sets_are_small():
    # every weight >= 1, so a feasible set has at most floor(b) elements
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(1, 12))
        budgets = rng.uniform(1.0, 9.0, size=d)
        weights = np.vstack([rng.uniform(0.2, b, size=n) for b in budgets])
        std = standardize(make_instance(weights, budgets))
        assert std.weights.min() >= 1.0 - 1e-12
        subset = [j for j in range(1, n + 1) if rng.random() < 0.5]
        if is_feasible(std, subset):
            assert len(subset) <= std.budget * (1 + 1e-12)


def test_feasibility_examples(instance_a):
    _, std = instance_a
    assert is_feasible(std, set())
    assert is_feasible(std, {1, 2, 4})
    assert not is_feasible(std, {2, 3})


def test_invalid_instances_rejected():
    with pytest.raises(InvalidInstanceError):
        make_instance([[0.0, 1.0]], [2])
    with pytest.raises(InvalidInstanceError):
        make_instance([[1.0, 1.0]], [-1])
    with pytest.raises(InvalidInstanceError):
        make_instance([[5.0, 1.0]], [2])  # weight over its budget
    with pytest.raises(InvalidInstanceError):
        KnapsackInstance(weights=np.zeros((0, 3)), budgets=np.zeros(0))  # d = 0


def test_big_element_examples(instance_a):
    obj, std = instance_a
    hit = classify_big_element(std, 3, obj.evaluate({3}), v=5.0)
    assert hit is not None
    assert hit.row == 0  # first constraint row
    assert hit.value_per_weight == pytest.approx(4 / 3)
    assert classify_big_element(std, 1, obj.evaluate({1}), v=5.0) is None
    assert classify_big_element(std, 3, obj.evaluate({3}), v=14.0) is None


def test_big_element_weight_test_is_strict(instance_a):
    # element 2 sits exactly at b/2 on row 2 and must not count as big
    obj, std = instance_a
    assert classify_big_element(std, 2, obj.evaluate({2}), v=5.0) is None


def test_empty_instance_standardizes():
    obj = make_coverage_objective(INSTANCE_A_COVERS)
    std = standardize(make_instance(np.zeros((2, 0)) + 1.0, [3, 4]))
    assert std.n == 0
    assert is_feasible(std, set())
    assert obj is not None
