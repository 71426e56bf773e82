"""Greedy deletion-based explanations.

compute_axp drops features while precision stays exactly 1; with a lower
threshold compute_approx_paxp drops features while precision stays >= delta.
Both return deletion-minimal sets: no single remaining feature can be
dropped. For thresholds below 1 the weak-explanation predicate is not
monotone, so deletion-minimal does not imply subset-minimal; use
minsolver.is_paxp to certify subset minimality when it matters.
"""

from fractions import Fraction

from .counting import conditional_precision, parse_threshold


class Explanation:
    """An explanation: a set of feature indices with its exact precision."""

    __slots__ = ("kind", "features", "precision", "delta", "subset_minimal")

    def __init__(self, kind, features, precision, delta, subset_minimal=None):
        self.kind = kind
        self.features = tuple(sorted(features))
        self.precision = precision
        self.delta = delta
        self.subset_minimal = subset_minimal

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def feature_names(self, tree):
        return [tree.space[i].name for i in self.features]

    def __repr__(self):
        return (
            f"Explanation({self.kind!r}, features={list(self.features)!r}, "
            f"precision={self.precision}, delta={self.delta})"
        )


def order_features(tree, instance, x0=None, tie_break="desc"):
    """Deletion order heuristic: try dropping high-precision features first.

    For each candidate j, computes the precision after removing j alone from
    x0; candidates are sorted by that precision, highest first (dropping
    them is least damaging). Equal precisions are broken by feature index,
    descending by default.
    """
    if x0 is None:
        x0 = instance_candidates(tree, instance)
    x0 = sorted(x0)
    removal = {
        j: conditional_precision(tree, instance, frozenset(x0) - {j}) for j in x0
    }
    if tie_break == "desc":
        return tuple(sorted(x0, key=lambda j: (removal[j], j), reverse=True))
    if tie_break == "asc":
        return tuple(sorted(x0, key=lambda j: (-removal[j], j)))
    raise ValueError(f"unknown tie_break {tie_break!r}")


def instance_candidates(tree, instance):
    """Features tested on the instance's consistent path, sorted.

    Features off that path never change the prediction count, so they can
    always be dropped first; explanations are subsets of this set.
    """
    return tuple(sorted(tree.consistent_path(instance.point).tested))


def compute_approx_paxp(tree, instance, delta, order=None, resort=False):
    """Greedy deletion-minimal weak explanation with precision >= delta.

    Starts from the consistent path's tested features (always a weak
    explanation: precision 1), visits candidates in `order` (default: the
    order_features heuristic), and drops each one whose removal keeps
    precision >= delta. With resort=True the heuristic is recomputed on the
    surviving set after every successful drop.
    """
    delta = parse_threshold(delta)
    x0 = instance_candidates(tree, instance)
    if order is None:
        order = order_features(tree, instance, x0)
    else:
        order = tuple(order)
        if sorted(order) != list(x0):
            raise ValueError("order must be a permutation of the tested features")
    current = set(x0)
    queue = list(order)
    while queue:
        j = queue.pop(0)
        if j not in current:
            continue
        trial = frozenset(current) - {j}
        if conditional_precision(tree, instance, trial) >= delta:
            current = set(trial)
            if resort and current:
                queue = [
                    f for f in order_features(tree, instance, tuple(sorted(current)))
                    if f in current
                ]
    precision = conditional_precision(tree, instance, frozenset(current))
    kind = "AXp" if delta == 1 else "ApproxPAXp"
    return Explanation(kind, current, precision, delta,
                       subset_minimal=True if delta == 1 else None)


def compute_axp(tree, instance, order=None):
    """Greedy abductive explanation: deletion-minimal set with precision 1.

    With threshold 1 the weak predicate is monotone, so the result is also
    subset-minimal.
    """
    return compute_approx_paxp(tree, instance, Fraction(1), order=order)


def is_deletion_minimal(tree, instance, features, delta):
    """True iff `features` is weak at `delta` and no single drop stays weak."""
    delta = parse_threshold(delta)
    features = frozenset(features)
    if conditional_precision(tree, instance, features) < delta:
        raise ValueError("feature set is not a weak explanation at this threshold")
    for j in features:
        if conditional_precision(tree, instance, features - {j}) >= delta:
            return False
    return True
