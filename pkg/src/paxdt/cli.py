"""Command-line interface: explain, emit-smt, verify, stats.

All reports are JSON with exact rationals: every probability appears as a
"num/den" string plus a 6-place decimal rendered by integer rounding; the
fraction is authoritative. Exit codes: 0 success, 2 usage, 3 bad input,
4 backend failure, 5 verification failure.
"""

import argparse
import json
import sys
import time
from fractions import Fraction

from . import counting
from .bruteforce import (
    BudgetError,
    bf_class_probability,
    bf_conditional_precision,
    bf_min_size,
)
from .counting import parse_threshold
from .greedy import compute_approx_paxp, compute_axp, is_deletion_minimal
from .minsolver import BackendError, compute_min_paxp, is_paxp
from .model import SchemaError, ValidationError, load_tree, make_instance
from .smt import ENV_SOLVER, SolverBridgeConfig, emit_encoding

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_BACKEND = 4
EXIT_VERIFY = 5


def render_fraction(value):
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def render_decimal(value, places=6):
    """Exact decimal string with round-half-up, no binary floats."""
    value = Fraction(value)
    scale = 10 ** places
    q, r = divmod(value.numerator * scale, value.denominator)
    if 2 * r >= value.denominator:
        q += 1
    digits = f"{q:0{places + 1}d}"
    return digits[:-places] + "." + digits[-places:]


def rational_block(value):
    return {"fraction": render_fraction(value), "decimal": render_decimal(value)}


def _split_backend(name):
    if name == "builtin":
        return "builtin", "mult"
    if name == "smt-mult":
        return "smt", "mult"
    if name == "smt-add":
        return "smt", "add"
    raise ValueError(f"unknown backend {name!r}")


def _parse_instance_row(tree, row, where):
    fields = [f.strip() for f in row.split(",")]
    m = len(tree.space)
    if len(fields) == m:
        return make_instance(tree, fields)
    if len(fields) == m + 1:
        return make_instance(tree, fields[:m], expected=fields[m])
    raise ValidationError(
        f"{where}: expected {m} values (optionally a trailing class), got {len(fields)}"
    )


def _load_instances(parser, tree, args):
    rows = []
    for row in args.instance or []:
        rows.append((row, "--instance"))
    if getattr(args, "instances", None):
        try:
            with open(args.instances, "r", encoding="utf-8") as fh:
                for ln, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    rows.append((line, f"{args.instances}:{ln}"))
        except OSError as e:
            parser.error(f"cannot read instances file: {e}")
    if not rows:
        parser.error("no instances given; use --instance or --instances")
    return [_parse_instance_row(tree, row, where) for row, where in rows]


def _parse_deltas(parser, values, default="1"):
    texts = values if values else [default]
    out = []
    for text in texts:
        try:
            out.append((text, parse_threshold(text)))
        except (ValueError, TypeError) as e:
            parser.error(f"bad --delta: {e}")
    return out


def _emit_report(report, out_path):
    text = json.dumps(report, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _record(tree, instance, explanation, elapsed):
    return {
        "instance": list(instance.raw),
        "class": instance.label,
        "path_depth": tree.consistent_path(instance.point).depth(),
        "kind": explanation.kind,
        "features": explanation.feature_names(tree),
        "size": len(explanation.features),
        "precision": rational_block(explanation.precision),
        "delta": render_fraction(explanation.delta),
        "is_subset_minimal": explanation.subset_minimal,
        "time_sec": round(elapsed, 6),
    }


def _aggregate(records):
    """One block per (kind, delta), recomputable from the records."""
    groups = {}
    for rec in records:
        groups.setdefault((rec["kind"], rec["delta"]), []).append(rec)
    blocks = []
    for (kind, delta), recs in groups.items():
        sizes = [r["size"] for r in recs]
        precs = [Fraction(r["precision"]["fraction"]) for r in recs]
        flags = [r["is_subset_minimal"] for r in recs if r["is_subset_minimal"] is not None]
        n = len(recs)
        block = {
            "kind": kind,
            "delta": delta,
            "count": n,
            "length": {
                "max": max(sizes),
                "min": min(sizes),
                "avg": rational_block(Fraction(sum(sizes), n)),
            },
            "avg_precision": rational_block(sum(precs) / n),
            "m_subset": rational_block(Fraction(sum(1 for f in flags if f), len(flags)))
            if flags else None,
            "avg_time_sec": round(sum(r["time_sec"] for r in recs) / n, 6),
        }
        blocks.append(block)
    return blocks


def cmd_explain(parser, args):
    tree = load_tree(args.tree)
    instances = _load_instances(parser, tree, args)
    deltas = _parse_deltas(parser, args.delta)
    backend, encoding = _split_backend(args.backend)
    config = _solver_config(args) if backend == "smt" else None
    records = []
    violations = []
    for inst in instances:
        for _, delta in deltas:
            produced = {}
            if args.mode in ("axp", "all"):
                t0 = time.perf_counter()
                exp = compute_axp(tree, inst)
                records.append(_record(tree, inst, exp, time.perf_counter() - t0))
            if args.mode in ("approx", "all"):
                t0 = time.perf_counter()
                exp = compute_approx_paxp(tree, inst, delta)
                records.append(_record(tree, inst, exp, time.perf_counter() - t0))
                produced["approx"] = exp
            if args.mode in ("min", "all"):
                t0 = time.perf_counter()
                exp = compute_min_paxp(tree, inst, delta, backend=backend,
                                       encoding=encoding, config=config)
                records.append(_record(tree, inst, exp, time.perf_counter() - t0))
                produced["min"] = exp
            if args.mode == "all":
                if len(produced["min"]) > len(produced["approx"]):
                    violations.append(
                        f"instance {list(inst.raw)}: minimum size "
                        f"{len(produced['min'])} exceeds greedy size "
                        f"{len(produced['approx'])}"
                    )
    report = {
        "command": "explain",
        "tree": args.tree,
        "mode": args.mode,
        "backend": args.backend,
        "records": records,
        "aggregates": _aggregate(records),
    }
    if violations:
        report["violations"] = violations
    _emit_report(report, args.out)
    if violations:
        for v in violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_emit_smt(parser, args):
    tree = load_tree(args.tree)
    instances = _load_instances(parser, tree, args)
    if len(instances) != 1:
        parser.error("emit-smt takes exactly one instance")
    deltas = _parse_deltas(parser, args.delta)
    if len(deltas) != 1:
        parser.error("emit-smt takes exactly one --delta")
    problem = emit_encoding(tree, instances[0], deltas[0][1], args.k,
                            encoding=args.encoding)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(problem.text)
    else:
        sys.stdout.write(problem.text)
    return EXIT_OK


def cmd_verify(parser, args):
    tree = load_tree(args.tree)
    instances = _load_instances(parser, tree, args)
    deltas = _parse_deltas(parser, args.delta)
    records = []
    failures = 0
    skipped = 0
    for inst in instances:
        problems = []
        checks = 0
        try:
            checks += 1
            lhs = counting.conditional_precision(tree, inst, frozenset())
            rhs = bf_class_probability(tree, inst, budget=args.budget)
            if lhs != rhs:
                problems.append(f"class probability {lhs} != brute force {rhs}")
            for _, delta in deltas:
                checks += 1
                exp = compute_approx_paxp(tree, inst, delta)
                fixed = frozenset(exp.features)
                bfp = bf_conditional_precision(tree, inst, fixed, budget=args.budget)
                if counting.conditional_precision(tree, inst, fixed) != bfp:
                    problems.append(f"precision mismatch on {sorted(fixed)}")
                if exp.precision < delta:
                    problems.append(f"greedy output below delta {delta}")
                if not is_deletion_minimal(tree, inst, fixed, delta):
                    problems.append(f"greedy output not deletion-minimal at {delta}")
                checks += 1
                mp = compute_min_paxp(tree, inst, delta)
                size, witness = bf_min_size(tree, inst, delta, budget=args.budget)
                if len(mp.features) != size or mp.features != witness:
                    problems.append(
                        f"minimum size {len(mp.features)} {mp.features} != "
                        f"brute force {size} {witness}"
                    )
            status = "ok" if not problems else "mismatch: " + "; ".join(problems)
        except BudgetError:
            status = "skipped: budget"
            skipped += 1
        if status.startswith("mismatch"):
            failures += 1
        records.append({
            "instance": list(inst.raw),
            "class": inst.label,
            "checks": checks,
            "status": status,
        })
    report = {
        "command": "verify",
        "tree": args.tree,
        "records": records,
        "failures": failures,
        "skipped": skipped,
    }
    _emit_report(report, args.out)
    return EXIT_VERIFY if failures else EXIT_OK


def cmd_stats(parser, args):
    tree = load_tree(args.tree)
    instances = _load_instances(parser, tree, args)
    deltas = _parse_deltas(parser, args.delta)
    backend, encoding = _split_backend(args.backend)
    config = _solver_config(args) if backend == "smt" else None
    records = []
    for _, delta in deltas:
        for inst in instances:
            t0 = time.perf_counter()
            exp = compute_approx_paxp(tree, inst, delta)
            exp.subset_minimal = is_paxp(tree, inst, exp.features, delta,
                                         backend=backend, encoding=encoding,
                                         config=config)
            records.append(_record(tree, inst, exp, time.perf_counter() - t0))
    report = {
        "command": "stats",
        "tree": args.tree,
        "records": records,
        "aggregates": _aggregate(records),
    }
    _emit_report(report, args.out)
    return EXIT_OK


def _solver_config(args):
    executable = getattr(args, "solver", None)
    if executable:
        return SolverBridgeConfig(executable=executable)
    return SolverBridgeConfig.from_env()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="paxdt",
        description="Exact probabilistic abductive explanations for decision trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, backend=True):
        p.add_argument("--tree", required=True, help="tree interchange JSON file")
        p.add_argument("--instance", action="append",
                       help="comma-separated feature values, optional trailing class")
        p.add_argument("--instances", help="file with one instance per line")
        p.add_argument("--delta", action="append",
                       help="precision threshold as decimal text (repeatable)")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        if backend:
            p.add_argument("--backend", default="builtin",
                           choices=["builtin", "smt-mult", "smt-add"])
            p.add_argument("--solver",
                           help=f"external solver command (default: ${ENV_SOLVER})")

    p_explain = sub.add_parser("explain", help="compute explanations")
    common(p_explain)
    p_explain.add_argument("--mode", default="approx",
                           choices=["axp", "approx", "min", "all"])
    p_explain.set_defaults(func=cmd_explain)

    p_emit = sub.add_parser("emit-smt", help="write one SMT-LIB2 problem")
    common(p_emit, backend=False)
    p_emit.add_argument("--encoding", default="mult", choices=["mult", "add"])
    p_emit.add_argument("--k", type=int, required=True,
                        help="bound on the number of fixed features")
    p_emit.set_defaults(func=cmd_emit_smt)

    p_verify = sub.add_parser("verify",
                              help="cross-check against brute-force enumeration")
    common(p_verify, backend=False)
    p_verify.add_argument("--budget", type=int, default=10 ** 6,
                          help="enumeration budget in points")
    p_verify.set_defaults(func=cmd_verify)

    p_stats = sub.add_parser("stats", help="aggregate explanation statistics")
    common(p_stats)
    p_stats.set_defaults(func=cmd_stats)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except (SchemaError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except BackendError as e:
        print(f"backend error: {e}", file=sys.stderr)
        return EXIT_BACKEND
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
