"""Exact model counting over tree paths.

Everything here is integer/rational arithmetic: counts are unbounded ints,
probabilities are Fractions, and the precision threshold comparison is done
by cross-multiplication. No binary floats anywhere.
"""

from fractions import Fraction


def parse_threshold(text):
    """Parse a probability threshold from decimal or rational text.

    Accepts "0.93", "1", "93/100". Floats are rejected: the caller must
    supply the textual form so the value is exact.
    """
    if isinstance(text, Fraction):
        value = text
    elif isinstance(text, int) and not isinstance(text, bool):
        value = Fraction(text)
    elif isinstance(text, str):
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"cannot parse threshold {text!r}: {e}") from None
    elif isinstance(text, float):
        raise TypeError(
            "threshold must be given as text (e.g. '0.93'), not a float"
        )
    else:
        raise TypeError(f"cannot parse threshold from {type(text).__name__}")
    if not 0 <= value <= 1:
        raise ValueError(f"threshold {value} outside [0, 1]")
    return value


def feature_factor(tree, path, i, point, fixed):
    """Count of values of feature i admitted by `path` when features in
    `fixed` are pinned to the point's values.

    Cases: a fixed feature contributes 1 if the path admits its value
    (or does not test it) and 0 otherwise; a free feature contributes the
    path's effective set size if tested, else its full domain size.
    """
    eff = path.literals.get(i)
    if i in fixed:
        if eff is None or point[i] in eff:
            return 1
        return 0
    if eff is None:
        return len(tree.space[i])
    return len(eff)


def path_model_count(tree, path, point, fixed):
    """Number of points that are consistent with `path` and agree with
    `point` on the features in `fixed`. Product of per-feature factors.
    """
    n = 1
    for i in range(len(tree.space)):
        n *= feature_factor(tree, path, i, point, fixed)
        if n == 0:
            return 0
    return n


def path_probability(tree, path, point, fixed):
    """path_model_count normalized by the count of points agreeing on `fixed`."""
    free_total = 1
    for i in range(len(tree.space)):
        if i not in fixed:
            free_total *= len(tree.space[i])
    return Fraction(path_model_count(tree, path, point, fixed), free_total)


def _count_sums(tree, instance, fixed):
    """(matching, total) counts over points agreeing with the instance on
    `fixed`: `matching` counts points the tree sends to the instance's
    class, `total` counts all of them.

    Walks each path once, starting from the product of free-domain sizes
    and replacing the full-domain factor of each tested free feature by its
    effective-set size.
    """
    space = tree.space
    fixed = frozenset(fixed)
    point = instance.point
    base = 1
    for i in range(len(space)):
        if i not in fixed:
            base *= len(space[i])
    matching = 0
    total = 0
    for path in tree.paths:
        cnt = base
        for i, eff, esize in path.items:
            if i in fixed:
                if point[i] not in eff:
                    cnt = 0
                    break
            else:
                cnt = cnt // len(space[i]) * esize
        if cnt:
            total += cnt
            if path.label == instance.label:
                matching += cnt
    return matching, total


def class_probability(tree, instance):
    """Unconditioned probability that a uniform point gets the instance's class."""
    matching, total = _count_sums(tree, instance, frozenset())
    return Fraction(matching, total)


def conditional_precision(tree, instance, fixed):
    """Probability that a uniform point agreeing with the instance on the
    features in `fixed` is classified as the instance's class.

    Exact Fraction; the denominator (count of agreeing points) is always
    the full product of free-domain sizes, so it is never zero.
    """
    for i in fixed:
        if not 0 <= i < len(tree.space):
            raise ValueError(f"feature index {i} out of range")
    matching, total = _count_sums(tree, instance, fixed)
    return Fraction(matching, total)


def is_weak_paxp(tree, instance, fixed, delta):
    """Exact test precision(fixed) >= delta via cross-multiplication."""
    delta = parse_threshold(delta)
    matching, total = _count_sums(tree, instance, frozenset(fixed))
    # matching/total >= p/q  <=>  matching*q >= p*total  (all non-negative)
    return matching * delta.denominator >= delta.numerator * total
