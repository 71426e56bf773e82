"""SMT-LIB2 emission of the size-bounded existence query, plus a local
evaluator and an external-solver bridge.

Two encodings of the same counts: "mult" builds each path count as a
product of ite-terms (nonlinear integer logic), "add" unrolls the product
into per-domain-value running sums (linear integer logic). Variable u_j is
true iff feature j is universal (free); an explanation is the set of
features whose u_j is false. Emitted text is deterministic: features
ascending, paths in tree order, fixed variable names.
"""

import os
import re
import shlex
import subprocess
import tempfile

from .counting import is_weak_paxp, parse_threshold
from .greedy import instance_candidates
from .minsolver import BackendError, OracleAnswer

ENV_SOLVER = "PAXDT_SMT_SOLVER"

LOGICS = {"mult": "QF_NIA", "add": "QF_LIA"}

_MODEL_RE = re.compile(
    r"\(\s*define-fun\s+u_(\d+)\s*\(\s*\)\s*Bool\s+(true|false)"
)


class SolverBridgeConfig:
    """How to reach the external solver: executable plus time limit."""

    __slots__ = ("executable", "time_limit", "logics")

    def __init__(self, executable=None, time_limit=60.0):
        self.executable = executable
        self.time_limit = time_limit
        self.logics = dict(LOGICS)

    @classmethod
    def from_env(cls, time_limit=60.0):
        return cls(os.environ.get(ENV_SOLVER) or None, time_limit)


class EncodingProblem:
    """Emitted SMT-LIB2 text plus the metadata needed to interpret answers."""

    def __init__(self, text, encoding, kind, tree, instance, delta, bound,
                 u_names, path_count_names, path_is_p, hard_names,
                 assert_roles, target=None):
        self.text = text
        self.encoding = encoding
        self.logic = LOGICS[encoding]
        self.kind = kind  # "size" or "minimality"
        self.tree = tree
        self.instance = instance
        self.delta = delta
        self.bound = bound
        self.u_names = tuple(u_names)
        self.path_count_names = tuple(path_count_names)
        self.path_is_p = tuple(path_is_p)
        self.hard_names = tuple(hard_names)
        self.assert_roles = tuple(assert_roles)
        self.target = frozenset(target) if target is not None else None
        self._parsed = None

    def __repr__(self):
        return (
            f"EncodingProblem({self.encoding!r}, kind={self.kind!r}, "
            f"bound={self.bound}, features={len(self.u_names)})"
        )


class EvaluationResult:
    """Concrete evaluation of a problem under a full u-assignment."""

    __slots__ = ("path_counts", "threshold_ok", "cardinality_ok", "hard_ok",
                 "fixed_count")

    def __init__(self, path_counts, threshold_ok, cardinality_ok, hard_ok,
                 fixed_count):
        self.path_counts = tuple(path_counts)
        self.threshold_ok = threshold_ok
        self.cardinality_ok = cardinality_ok
        self.hard_ok = hard_ok
        self.fixed_count = fixed_count


def _sum_expr(terms):
    if len(terms) == 1:
        return terms[0]
    return "(+ " + " ".join(terms) + ")"


def _prod_expr(terms):
    if len(terms) == 1:
        return terms[0]
    return "(* " + " ".join(terms) + ")"


def _closing_asserts(tree, instance, delta, bound, count_names, roles):
    """Hard clauses, threshold, optional cardinality, final directives."""
    m = len(tree.space)
    tested = set(instance_candidates(tree, instance))
    lines = []
    for j in range(m):
        if j not in tested:
            lines.append(f"(assert u_{j + 1})")
            roles.append("hard")
    p = delta.numerator
    q = delta.denominator
    p_terms = [name for name, path in zip(count_names, tree.paths)
               if path.label == instance.label]
    q_terms = [name for name, path in zip(count_names, tree.paths)
               if path.label != instance.label]
    sp = _sum_expr(p_terms)
    sq = _sum_expr(q_terms)
    lines.append(
        f"(assert (>= (* {q} {sp}) (+ (* {p} {sp}) (* {p} {sq}))))"
    )
    roles.append("threshold")
    if bound is not None:
        card = _sum_expr([f"(ite u_{j + 1} 0 1)" for j in range(m)])
        lines.append(f"(assert (<= {card} {bound}))")
        roles.append("cardinality")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    hard = [f"u_{j + 1}" for j in range(m) if j not in tested]
    return lines, hard


def _mult_definitions(tree, instance):
    """One eta_<k> per path: the product of per-feature ite factors."""
    space = tree.space
    point = instance.point
    lines = []
    names = []
    for k, path in enumerate(tree.paths, start=1):
        factors = []
        for j in range(len(space)):
            eff = path.literals.get(j)
            if eff is None:
                n1, n0 = len(space[j]), 1
            else:
                n1 = len(eff)
                n0 = 1 if point[j] in eff else 0
            factors.append(f"(ite u_{j + 1} {n1} {n0})")
        name = f"eta_{k}"
        lines.append(f"(define-fun {name} () Int {_prod_expr(factors)})")
        names.append(name)
    return lines, names


def _add_definitions(tree, instance):
    """Per path, running sums over each feature's domain values.

    s_<j>_<l>_<k> is the count using features 1..j with the first l values
    of feature j's domain; a value contributes the previous feature count
    when it is the instance's value, contributes it only under u_j when it
    is a different admissible value, and is skipped when the path excludes
    it.
    """
    space = tree.space
    point = instance.point
    m = len(space)
    lines = []
    names = []
    for k, path in enumerate(tree.paths, start=1):
        lines.append(f"(define-fun eta_0_{k} () Int 1)")
        for j in range(1, m + 1):
            eff = path.literals.get(j - 1)
            prev_eta = f"eta_{j - 1}_{k}"
            lines.append(f"(define-fun s_{j}_0_{k} () Int 0)")
            r = len(space[j - 1])
            for l in range(1, r + 1):
                pos = l - 1
                prev_s = f"s_{j}_{l - 1}_{k}"
                if eff is not None and pos not in eff:
                    body = prev_s
                elif pos == point[j - 1]:
                    body = f"(+ {prev_s} {prev_eta})"
                else:
                    body = f"(+ {prev_s} (ite u_{j} {prev_eta} 0))"
                lines.append(f"(define-fun s_{j}_{l}_{k} () Int {body})")
            lines.append(f"(define-fun eta_{j}_{k} () Int s_{j}_{r}_{k})")
        names.append(f"eta_{m}_{k}")
    return lines, names


def _emit(tree, instance, delta, bound, encoding, kind, target=None):
    delta = parse_threshold(delta)
    m = len(tree.space)
    u_names = [f"u_{j + 1}" for j in range(m)]
    lines = [f"(set-logic {LOGICS[encoding]})"]
    lines.extend(f"(declare-const {u} Bool)" for u in u_names)
    if encoding == "mult":
        defs, count_names = _mult_definitions(tree, instance)
    elif encoding == "add":
        defs, count_names = _add_definitions(tree, instance)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    lines.extend(defs)
    roles = []
    if kind == "size":
        closing, hard = _closing_asserts(tree, instance, delta, bound,
                                         count_names, roles)
    else:
        closing, hard = _minimality_asserts(tree, instance, delta, target,
                                            count_names, roles)
    lines.extend(closing)
    text = "\n".join(lines) + "\n"
    return EncodingProblem(
        text, encoding, kind, tree, instance, delta, bound, u_names,
        count_names, [p.label == instance.label for p in tree.paths],
        hard, roles, target=target,
    )


def _minimality_asserts(tree, instance, delta, target, count_names, roles):
    """Everything outside `target` stays universal; at least one member of
    `target` must be freed; same threshold, no cardinality bound."""
    m = len(tree.space)
    target = sorted(target)
    lines = []
    hard = []
    for j in range(m):
        if j not in target:
            lines.append(f"(assert u_{j + 1})")
            roles.append("hard")
            hard.append(f"u_{j + 1}")
    freed = [f"u_{j + 1}" for j in target]
    if len(freed) == 1:
        lines.append(f"(assert {freed[0]})")
    else:
        lines.append(f"(assert (or {' '.join(freed)}))")
    roles.append("subset")
    p = delta.numerator
    q = delta.denominator
    p_terms = [name for name, path in zip(count_names, tree.paths)
               if path.label == instance.label]
    q_terms = [name for name, path in zip(count_names, tree.paths)
               if path.label != instance.label]
    sp = _sum_expr(p_terms)
    sq = _sum_expr(q_terms)
    lines.append(
        f"(assert (>= (* {q} {sp}) (+ (* {p} {sp}) (* {p} {sq}))))"
    )
    roles.append("threshold")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return lines, hard


def emit_mult_encoding(tree, instance, delta, k):
    """Size-bounded existence query, product form (QF_NIA)."""
    if k < 0:
        raise ValueError(f"negative size bound {k}")
    return _emit(tree, instance, delta, k, "mult", "size")


def emit_add_encoding(tree, instance, delta, k):
    """Size-bounded existence query, running-sum form (QF_LIA)."""
    if k < 0:
        raise ValueError(f"negative size bound {k}")
    return _emit(tree, instance, delta, k, "add", "size")


def emit_encoding(tree, instance, delta, k, encoding="mult"):
    if encoding == "mult":
        return emit_mult_encoding(tree, instance, delta, k)
    if encoding == "add":
        return emit_add_encoding(tree, instance, delta, k)
    raise ValueError(f"unknown encoding {encoding!r}")


def emit_minimality_check(tree, instance, delta, features, encoding="mult"):
    """Query: does a weak proper subset of `features` exist? unsat means
    `features` is subset-minimal."""
    features = frozenset(features)
    if not features:
        raise ValueError("minimality check needs a non-empty feature set")
    tested = set(instance_candidates(tree, instance))
    if not features <= tested:
        raise ValueError("features must be tested on the consistent path")
    return _emit(tree, instance, delta, None, encoding, "minimality",
                 target=features)


# -- local evaluation -------------------------------------------------------


def _tokenize(text):
    out = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in "()":
            out.append(c)
            i += 1
        elif c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _parse_forms(tokens):
    forms = []
    stack = []
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise ValueError("unbalanced ')' in problem text")
            done = tuple(stack.pop())
            if stack:
                stack[-1].append(done)
            else:
                forms.append(done)
        else:
            if not stack:
                raise ValueError(f"stray atom {tok!r} at top level")
            stack[-1].append(tok)
    if stack:
        raise ValueError("unbalanced '(' in problem text")
    return forms


def _eval_term(expr, env):
    if isinstance(expr, str):
        if expr == "true":
            return True
        if expr == "false":
            return False
        if expr in env:
            return env[expr]
        try:
            return int(expr)
        except ValueError:
            raise ValueError(f"unbound name {expr!r}") from None
    op, *args = expr
    if op == "ite":
        c, a, b = (_eval_term(x, env) for x in args)
        return a if c else b
    if op == "+":
        return sum(_eval_term(x, env) for x in args)
    if op == "*":
        out = 1
        for x in args:
            out *= _eval_term(x, env)
        return out
    if op == "-":
        vals = [_eval_term(x, env) for x in args]
        if len(vals) == 1:
            return -vals[0]
        out = vals[0]
        for v in vals[1:]:
            out -= v
        return out
    if op in (">=", "<=", "=", ">", "<"):
        a, b = (_eval_term(x, env) for x in args)
        return {">=": a >= b, "<=": a <= b, "=": a == b,
                ">": a > b, "<": a < b}[op]
    if op == "and":
        return all(_eval_term(x, env) for x in args)
    if op == "or":
        return any(_eval_term(x, env) for x in args)
    if op == "not":
        return not _eval_term(args[0], env)
    raise ValueError(f"unsupported operator {op!r}")


def evaluate_encoding(problem, assignment):
    """Run the emitted text under a complete u-assignment.

    assignment: mapping or sequence, feature index (0-based) -> bool.
    Returns an EvaluationResult with the per-path counts in tree order.
    """
    m = len(problem.u_names)
    if not isinstance(assignment, dict):
        assignment = dict(enumerate(assignment))
    env = {}
    for j in range(m):
        if j not in assignment:
            raise ValueError(f"assignment missing feature {j}")
        env[f"u_{j + 1}"] = bool(assignment[j])
    if problem._parsed is None:
        problem._parsed = _parse_forms(_tokenize(problem.text))
    declared = set()
    assert_values = []
    for form in problem._parsed:
        head = form[0]
        if head in ("set-logic", "check-sat", "get-model"):
            continue
        if head == "declare-const":
            declared.add(form[1])
            continue
        if head == "define-fun":
            name, params, _sort, body = form[1], form[2], form[3], form[4]
            if params != ():
                raise ValueError(f"unexpected parameters on {name}")
            env[name] = _eval_term(body, env)
            continue
        if head == "assert":
            assert_values.append(_eval_term(form[1], env))
            continue
        raise ValueError(f"unsupported form {head!r}")
    if declared != set(problem.u_names):
        raise ValueError("declared variables do not match the problem")
    threshold_ok = None
    cardinality_ok = True
    hard_ok = True
    for role, value in zip(problem.assert_roles, assert_values):
        if role == "threshold":
            threshold_ok = bool(value)
        elif role == "cardinality":
            cardinality_ok = bool(value)
        else:
            hard_ok = hard_ok and bool(value)
    counts = tuple(env[name] for name in problem.path_count_names)
    fixed = sum(1 for j in range(m) if not env[f"u_{j + 1}"])
    return EvaluationResult(counts, threshold_ok, cardinality_ok, hard_ok, fixed)


# -- external solver bridge -------------------------------------------------


def _revalidate(problem, fixed):
    tree = problem.tree
    instance = problem.instance
    delta = problem.delta
    fixed = frozenset(fixed)
    if problem.kind == "size":
        if len(fixed) > problem.bound:
            raise BackendError(
                f"solver model fixes {len(fixed)} features, bound was {problem.bound}"
            )
        tested = set(instance_candidates(tree, instance))
        if not fixed <= tested:
            raise BackendError("solver model fixes a feature off the path")
    else:
        if not fixed < problem.target:
            raise BackendError("solver model is not a proper subset")
    if not is_weak_paxp(tree, instance, fixed, delta):
        raise BackendError(
            f"solver model {sorted(fixed)} fails the precision threshold"
        )


def solve_external(problem, config=None):
    """Run the configured solver on the problem and decode its answer.

    Any witness is revalidated with exact local counting before being
    trusted. Solver trouble (missing executable, timeout, garbage output)
    raises BackendError; it is never reported as unsat.
    """
    if config is None:
        config = SolverBridgeConfig.from_env()
    if not config.executable:
        raise BackendError(
            f"no external solver configured; set {ENV_SOLVER} or pass one explicitly"
        )
    cmd = shlex.split(config.executable)
    tmp = tempfile.NamedTemporaryFile(
        "w", suffix=".smt2", prefix="paxdt_", delete=False
    )
    try:
        tmp.write(problem.text)
        tmp.close()
        try:
            proc = subprocess.run(
                cmd + [tmp.name],
                capture_output=True,
                text=True,
                timeout=config.time_limit,
            )
        except FileNotFoundError:
            raise BackendError(f"solver executable not found: {cmd[0]}") from None
        except subprocess.TimeoutExpired:
            raise BackendError(
                f"solver timed out after {config.time_limit}s"
            ) from None
        out = proc.stdout
        status = None
        for line in out.splitlines():
            line = line.strip()
            if line in ("sat", "unsat", "unknown"):
                status = line
                break
        if status == "unsat":
            return OracleAnswer(False)
        if status != "sat":
            detail = (out or proc.stderr or "").strip().splitlines()
            head = detail[0] if detail else "no output"
            raise BackendError(f"unrecognized solver output: {head}")
        m = len(problem.u_names)
        fixed = []
        for num, value in _MODEL_RE.findall(out):
            j = int(num)
            if not 1 <= j <= m:
                raise BackendError(f"solver model names unknown variable u_{num}")
            if value == "false":
                fixed.append(j - 1)
        fixed = tuple(sorted(set(fixed)))
        _revalidate(problem, fixed)
        return OracleAnswer(True, fixed)
    finally:
        os.unlink(tmp.name)
