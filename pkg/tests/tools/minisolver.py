#!/usr/bin/env python3
"""Tiny SMT-LIB2 solver for test use: reads one problem file, enumerates
all assignments of the declared Bool constants, and prints sat plus a
model, or unsat. Supports exactly the fragment the package emits
(declare-const Bool, 0-ary define-fun Int/Bool, ite/+/*/-/comparisons/
and/or/not), but shares no code with it; this is an independent check of
the emitted text.

Usage: minisolver.py FILE.smt2
"""

import itertools
import re
import sys

MAX_VARS = 22

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def read_forms(text):
    # strip comments, then parse nested lists via recursive descent
    text = re.sub(r";[^\n]*", "", text)
    tokens = _TOKEN.findall(text)
    pos = [0]

    def parse():
        tok = tokens[pos[0]]
        pos[0] += 1
        if tok == "(":
            items = []
            while tokens[pos[0]] != ")":
                items.append(parse())
            pos[0] += 1
            return items
        if tok == ")":
            raise SyntaxError("unexpected ')'")
        return tok

    forms = []
    while pos[0] < len(tokens):
        forms.append(parse())
    return forms


def evaluate(node, env):
    if isinstance(node, str):
        if node == "true":
            return True
        if node == "false":
            return False
        if node in env:
            return env[node]
        return int(node)
    head = node[0]
    args = node[1:]
    if head == "ite":
        return evaluate(args[1] if evaluate(args[0], env) else args[2], env)
    if head == "and":
        return all(evaluate(a, env) for a in args)
    if head == "or":
        return any(evaluate(a, env) for a in args)
    if head == "not":
        return not evaluate(args[0], env)
    vals = [evaluate(a, env) for a in args]
    if head == "+":
        return sum(vals)
    if head == "*":
        r = 1
        for v in vals:
            r *= v
        return r
    if head == "-":
        if len(vals) == 1:
            return -vals[0]
        r = vals[0]
        for v in vals[1:]:
            r -= v
        return r
    if head == ">=":
        return vals[0] >= vals[1]
    if head == "<=":
        return vals[0] <= vals[1]
    if head == ">":
        return vals[0] > vals[1]
    if head == "<":
        return vals[0] < vals[1]
    if head == "=":
        return vals[0] == vals[1]
    raise ValueError(f"unsupported operator: {head}")


def main(argv):
    if len(argv) != 2:
        print("usage: minisolver.py FILE.smt2", file=sys.stderr)
        return 2
    with open(argv[1], "r", encoding="utf-8") as fh:
        forms = read_forms(fh.read())

    variables = []
    defines = []
    asserts = []
    want_model = False
    for form in forms:
        head = form[0]
        if head == "declare-const":
            name, sort = form[1], form[2]
            if sort != "Bool":
                print(f"error: only Bool constants supported, got {sort}",
                      file=sys.stderr)
                return 1
            variables.append(name)
        elif head == "define-fun":
            name, params, _sort, body = form[1], form[2], form[3], form[4]
            if params:
                print("error: only 0-ary define-fun supported", file=sys.stderr)
                return 1
            defines.append((name, body))
        elif head == "assert":
            asserts.append(form[1])
        elif head == "get-model":
            want_model = True
        elif head in ("set-logic", "check-sat", "set-option", "set-info"):
            continue
        else:
            print(f"error: unsupported form {head}", file=sys.stderr)
            return 1

    if len(variables) > MAX_VARS:
        print(f"error: {len(variables)} variables, limit {MAX_VARS}",
              file=sys.stderr)
        return 1

    for bits in itertools.product((True, False), repeat=len(variables)):
        env = dict(zip(variables, bits))
        for name, body in defines:
            env[name] = evaluate(body, env)
        if all(evaluate(a, env) for a in asserts):
            print("sat")
            if want_model:
                print("(model")
                for v in variables:
                    flag = "true" if env[v] else "false"
                    print(f"  (define-fun {v} () Bool {flag})")
                print(")")
            return 0
    print("unsat")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
