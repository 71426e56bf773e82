"""Minimum-size and subset-minimality decision procedures.

The central question answered here: is there a weak explanation of size at
most k? The builtin oracle answers it by exact integer arithmetic over a
DFS of candidate subsets; the smt backends delegate to an external solver
through the encodings in `smt` and revalidate every witness locally.
compute_min_paxp wraps the oracle in a binary search on k.
"""

from itertools import combinations

from .counting import conditional_precision, is_weak_paxp, parse_threshold
from .greedy import Explanation, instance_candidates


class BackendError(RuntimeError):
    """A backend produced an unusable or inconsistent answer."""


class OracleAnswer:
    """Answer to a size-bounded existence query."""

    __slots__ = ("satisfiable", "witness")

    def __init__(self, satisfiable, witness=None):
        self.satisfiable = satisfiable
        self.witness = tuple(witness) if witness is not None else None

    def __repr__(self):
        return f"OracleAnswer({self.satisfiable}, witness={self.witness})"


class BuiltinOracle:
    """Exact existence oracle for one (tree, instance) pair.

    Subsets of the tested features are explored in lexicographic preorder
    (each set is visited before its supersets, extended by ascending
    feature index). Per-path counts are maintained incrementally: fixing a
    feature divides each consistent path count by the feature's factor and
    zeroes paths whose literal excludes the instance value. The total count
    of agreeing points needs no per-path bookkeeping: it is always the
    product of the free domain sizes.

    At the final bound of a binary search every weak set within the bound
    has exactly the minimum size, so the first witness in preorder is the
    lexicographically smallest minimum-size one; answers are cached per
    (threshold, bound) and reused for smaller bounds when still canonical.
    """

    def __init__(self, tree, instance):
        self.tree = tree
        self.instance = instance
        self.candidates = instance_candidates(tree, instance)
        sizes = tree.space.domain_sizes()
        total = 1
        for s in sizes:
            total *= s
        self.total0 = total
        p_paths = [p for p in tree.paths if p.label == instance.label]
        base = []
        for path in p_paths:
            c = total
            for i, _, esize in path.items:
                c = c // sizes[i] * esize
            base.append(c)
        self.base_counts = base
        point = instance.point
        self.dom_of = [sizes[i] for i in self.candidates]
        self.divisors = []
        for i in self.candidates:
            col = []
            for path in p_paths:
                eff = path.literals.get(i)
                if eff is None:
                    col.append(sizes[i])
                elif point[i] in eff:
                    col.append(len(eff))
                else:
                    col.append(0)  # fixing i kills this path
            self.divisors.append(col)
        self._cache = {}

    def exists_of_size(self, delta, bound):
        """Is there a weak explanation with at most `bound` features?

        Returns an OracleAnswer; a satisfiable answer carries the first
        witness in subset preorder.
        """
        delta = parse_threshold(delta)
        if bound < 0:
            raise ValueError(f"negative size bound {bound}")
        bound = min(bound, len(self.candidates))
        key = (delta, bound)
        if key not in self._cache:
            self._cache[key] = self._from_cache(delta, bound) or self._search(delta, bound)
        return self._cache[key]

    def _from_cache(self, delta, bound):
        # an answer computed at a larger bound stays canonical for this one:
        # unsat propagates down, and a witness that fits the smaller bound
        # has had every preorder predecessor of admissible size checked
        for (d, b), ans in self._cache.items():
            if d != delta or b < bound:
                continue
            if not ans.satisfiable:
                return OracleAnswer(False)
            if len(ans.witness) <= bound:
                return OracleAnswer(True, ans.witness)
        return None

    def _search(self, delta, bound):
        p = delta.numerator
        q = delta.denominator
        counts = self.base_counts
        den = self.total0
        if sum(counts) * q >= p * den:
            return OracleAnswer(True, ())
        if bound == 0:
            return OracleAnswer(False)
        m = len(self.candidates)
        prefix = []

        def extend(start, counts, den, depth):
            for pos in range(start, m):
                divs = self.divisors[pos]
                nxt = [c // d if d else 0 for c, d in zip(counts, divs)]
                nden = den // self.dom_of[pos]
                prefix.append(self.candidates[pos])
                if sum(nxt) * q >= p * nden:
                    return True
                if depth + 1 < bound and extend(pos + 1, nxt, nden, depth + 1):
                    return True
                prefix.pop()
            return False

        if extend(0, counts, den, 0):
            return OracleAnswer(True, tuple(prefix))
        return OracleAnswer(False)


def _smt_oracle_answer(tree, instance, delta, bound, encoding, config):
    from . import smt

    problem = smt.emit_encoding(tree, instance, delta, bound, encoding=encoding)
    # solve_external revalidates any witness by exact counting
    return smt.solve_external(problem, config)


def exists_weak_paxp_of_size(tree, instance, delta, k, backend="builtin",
                             encoding="mult", config=None):
    """Decide whether a weak explanation with at most k features exists.

    backend "builtin" uses exact local search; "smt" emits the chosen
    encoding and runs the configured external solver, revalidating any
    witness with local arithmetic before trusting it.
    """
    delta = parse_threshold(delta)
    if backend == "builtin":
        return BuiltinOracle(tree, instance).exists_of_size(delta, k)
    if backend == "smt":
        return _smt_oracle_answer(tree, instance, delta, k, encoding, config)
    raise ValueError(f"unknown backend {backend!r}")


def compute_min_paxp(tree, instance, delta, backend="builtin",
                     encoding="mult", config=None):
    """Minimum-cardinality weak explanation, by binary search on the bound.

    The search interval starts at [0, |tested features|]; the upper end is
    always satisfiable since fixing the whole tested set gives precision 1.
    Minimum-size weak sets are subset-minimal by construction: every proper
    subset is smaller than the minimum and therefore not weak.
    """
    delta = parse_threshold(delta)
    tested = instance_candidates(tree, instance)
    oracle = BuiltinOracle(tree, instance) if backend == "builtin" else None
    lo, hi = 0, len(tested)
    witness = tuple(tested)
    while lo < hi:
        mid = (lo + hi) // 2
        if oracle is not None:
            ans = oracle.exists_of_size(delta, mid)
        else:
            ans = _smt_oracle_answer(tree, instance, delta, mid, encoding, config)
        if ans.satisfiable:
            hi = mid
            witness = ans.witness
        else:
            lo = mid + 1
    precision = conditional_precision(tree, instance, frozenset(witness))
    if precision < delta:
        raise BackendError("search returned a witness below the threshold")
    return Explanation("MinPAXp", witness, precision, delta, subset_minimal=True)


def is_paxp(tree, instance, features, delta, backend="builtin",
            encoding="mult", config=None):
    """Certify subset minimality of a weak explanation.

    True iff `features` is weak at `delta` and no proper subset is. The
    builtin backend scans proper subsets by increasing size; the smt
    backend asks the solver for a weak proper subset and believes only a
    revalidated model (unsat means minimal).
    """
    delta = parse_threshold(delta)
    features = frozenset(features)
    if not is_weak_paxp(tree, instance, features, delta):
        raise ValueError("feature set is not a weak explanation at this threshold")
    if not features:
        return True
    if backend == "builtin":
        ordered = sorted(features)
        for r in range(len(ordered)):
            for combo in combinations(ordered, r):
                if is_weak_paxp(tree, instance, frozenset(combo), delta):
                    return False
        return True
    if backend == "smt":
        from . import smt

        problem = smt.emit_minimality_check(tree, instance, delta, features,
                                            encoding=encoding)
        result = smt.solve_external(problem, config)
        # a satisfiable answer carries a revalidated weak proper subset
        return not result.satisfiable
    raise ValueError(f"unknown backend {backend!r}")
