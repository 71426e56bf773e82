"""Greedy deletion explanations.

Verified here: the fixture's deletion order (f2, f1, f3 by removal
precision with descending-index ties), the resulting AXp {f1, f3}, the
threshold-0.93 result {f3}, and on seeded random trees that every output
is weak at its threshold and deletion-minimal, with the threshold-1 output
certified subset-minimal by brute force.
"""

import random
from fractions import Fraction

import pytest

from paxdt import (
    compute_approx_paxp,
    compute_axp,
    conditional_precision,
    is_deletion_minimal,
    make_instance,
    order_features,
    parse_tree,
)
from paxdt.bruteforce import bf_all_paxps
from paxdt.greedy import instance_candidates
from treegen import random_tree_doc, random_instance_values


def test_fixture_order(fixture_tree, fixture_instance):
    # removing f3 leaves {f1,f2}: precision 1/2; removing f1 or f2 leaves
    # precision 1 each; the 1-vs-1 tie breaks to the higher index
    assert order_features(fixture_tree, fixture_instance) == (1, 0, 2)
    assert order_features(fixture_tree, fixture_instance, tie_break="asc") == (0, 1, 2)
    with pytest.raises(ValueError, match="unknown tie_break"):
        order_features(fixture_tree, fixture_instance, tie_break="up")


def test_fixture_axp(fixture_tree, fixture_instance):
    axp = compute_axp(fixture_tree, fixture_instance)
    assert axp.features == (0, 2)
    assert axp.precision == Fraction(1)
    assert axp.kind == "AXp"
    assert axp.subset_minimal is True
    assert axp.feature_names(fixture_tree) == ["f1", "f3"]
    # the symmetric twin comes out under the ascending tie-break
    other = compute_approx_paxp(fixture_tree, fixture_instance, 1,
                                order=(0, 1, 2))
    assert other.features == (1, 2)


def test_fixture_approx(fixture_tree, fixture_instance):
    ap = compute_approx_paxp(fixture_tree, fixture_instance, "0.93")
    assert ap.features == (2,)
    assert ap.precision == Fraction(15, 16)
    assert ap.kind == "ApproxPAXp"
    assert ap.subset_minimal is None
    assert ap.delta == Fraction(93, 100)
    low = compute_approx_paxp(fixture_tree, fixture_instance, "0.6")
    assert low.features == ()
    assert low.precision == Fraction(21, 32)


def test_order_override_validation(fixture_tree, fixture_instance):
    with pytest.raises(ValueError, match="permutation"):
        compute_approx_paxp(fixture_tree, fixture_instance, "0.93", order=(0, 1))


def test_is_deletion_minimal(fixture_tree, fixture_instance):
    assert is_deletion_minimal(fixture_tree, fixture_instance, {2}, "0.93")
    assert not is_deletion_minimal(fixture_tree, fixture_instance, {0, 2}, "0.93")
    assert is_deletion_minimal(fixture_tree, fixture_instance, {0, 2}, 1)
    with pytest.raises(ValueError, match="not a weak explanation"):
        is_deletion_minimal(fixture_tree, fixture_instance, {0}, "0.93")


def test_instance_candidates(fixture_tree, fixture_instance):
    assert instance_candidates(fixture_tree, fixture_instance) == (0, 1, 2)
    short = make_instance(fixture_tree, [1, 1, 1])
    assert instance_candidates(fixture_tree, short) == (0, 1)


def test_random_outputs_weak_and_deletion_minimal():
    rng = random.Random(1313)
    deltas = [Fraction(17, 20), Fraction(93, 100), Fraction(1)]
    for _ in range(40):
        tree = parse_tree(random_tree_doc(rng, max_points=128))
        inst = make_instance(tree, random_instance_values(rng, tree))
        for delta in deltas:
            exp = compute_approx_paxp(tree, inst, delta)
            assert exp.precision >= delta
            assert exp.precision == conditional_precision(tree, inst, frozenset(exp.features))
            assert is_deletion_minimal(tree, inst, exp.features, delta)
            resorted = compute_approx_paxp(tree, inst, delta, resort=True)
            assert resorted.precision >= delta
            assert is_deletion_minimal(tree, inst, resorted.features, delta)


def test_random_axp_is_subset_minimal():
    rng = random.Random(1717)
    for _ in range(25):
        tree = parse_tree(random_tree_doc(rng, max_points=96, max_features=4))
        inst = make_instance(tree, random_instance_values(rng, tree))
        axp = compute_axp(tree, inst)
        minimal = bf_all_paxps(tree, inst, 1)
        assert frozenset(axp.features) in minimal
