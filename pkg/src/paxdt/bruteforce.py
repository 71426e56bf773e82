"""Brute-force reference oracle.

Computes precisions, minimal explanations and minimum sizes by enumerating
the whole feature space point by point. Exponential and proud of it: this
module exists to cross-check the counting and search code on small inputs,
and everything else in the package is tested against it.
"""

from fractions import Fraction
from itertools import combinations, product

from .counting import parse_threshold


class BudgetError(RuntimeError):
    """The enumeration would exceed the point budget."""


def _check_budget(tree, budget):
    n = tree.space.total_points()
    if n > budget:
        raise BudgetError(
            f"feature space has {n} points, over the budget of {budget}"
        )
    return n


def bf_class_probability(tree, instance, budget=10**6):
    """Fraction of all points classified as the instance's class."""
    _check_budget(tree, budget)
    hits = 0
    total = 0
    for point in product(*(range(len(f)) for f in tree.space)):
        total += 1
        if tree.classify(point) == instance.label:
            hits += 1
    return Fraction(hits, total)


def bf_conditional_precision(tree, instance, fixed, budget=10**6):
    """Precision of `fixed` by enumerating the free features only."""
    fixed = frozenset(fixed)
    free = [i for i in range(len(tree.space)) if i not in fixed]
    n = 1
    for i in free:
        n *= len(tree.space[i])
    if n > budget:
        raise BudgetError(f"{n} completions, over the budget of {budget}")
    point = list(instance.point)
    hits = 0
    total = 0
    for combo in product(*(range(len(tree.space[i])) for i in free)):
        for i, v in zip(free, combo):
            point[i] = v
        total += 1
        if tree.classify(point) == instance.label:
            hits += 1
    return Fraction(hits, total)


def bf_subset_precisions(tree, instance, candidates, budget=10**6):
    """Precision of every subset of `candidates`, as {frozenset: Fraction}."""
    candidates = sorted(candidates)
    if len(candidates) > 20:
        raise BudgetError(f"{len(candidates)} candidates, over the subset limit of 20")
    out = {}
    for r in range(len(candidates) + 1):
        for combo in combinations(candidates, r):
            key = frozenset(combo)
            out[key] = bf_conditional_precision(tree, instance, key, budget)
    return out


def bf_all_paxps(tree, instance, delta, budget=10**6):
    """All subset-minimal weak explanations at `delta`, by full subset scan.

    Candidates are the features tested on the instance's consistent path.
    A set is kept iff it is weak and no proper subset is weak. Result is
    sorted by (size, sorted members).
    """
    delta = parse_threshold(delta)
    candidates = sorted(tree.consistent_path(instance.point).tested)
    precisions = bf_subset_precisions(tree, instance, candidates, budget)
    weak = {key for key, prec in precisions.items() if prec >= delta}
    minimal = []
    for key in weak:
        if any(other < key for other in weak):
            continue
        minimal.append(key)
    return sorted(minimal, key=lambda s: (len(s), sorted(s)))


def bf_min_size(tree, instance, delta, budget=10**6):
    """(size, witness) of a minimum-cardinality weak explanation at `delta`.

    The witness is the lexicographically smallest weak set of that size.
    """
    delta = parse_threshold(delta)
    candidates = sorted(tree.consistent_path(instance.point).tested)
    if len(candidates) > 20:
        raise BudgetError(f"{len(candidates)} candidates, over the subset limit of 20")
    for r in range(len(candidates) + 1):
        for combo in combinations(candidates, r):
            prec = bf_conditional_precision(tree, instance, frozenset(combo), budget)
            if prec >= delta:
                return r, tuple(combo)
    raise AssertionError("the full tested set always has precision 1")
