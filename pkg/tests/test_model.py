"""Interchange parsing, validation and path construction.

Verified here: the canonical fixture parses to 5 paths in document DFS
order with folded literal sets; every structural invariant has a test that
breaks it and checks the reported message; random generated documents
always parse and their internal nodes partition the split feature's domain.
"""

import copy
import random

import pytest

from paxdt import (
    SchemaError,
    ValidationError,
    all_instances,
    make_instance,
    parse_tree,
)
from treegen import random_tree_doc


def small_doc():
    return {
        "features": [
            {"name": "a", "domain": [1, 2]},
            {"name": "b", "domain": [1, 2, 3]},
        ],
        "classes": ["0", "1"],
        "nodes": [
            {"id": 1, "feature": 0, "edges": [
                {"values": [1], "child": 2},
                {"values": [2], "child": 3},
            ]},
            {"id": 2, "leaf": "0"},
            {"id": 3, "leaf": "1"},
        ],
        "root": 1,
    }


def test_fixture_structure(fixture_tree):
    tree = fixture_tree
    assert len(tree.nodes) == 9
    assert tree.classes == ("0", "1")
    assert [len(f) for f in tree.space] == [4, 4, 2]
    got = [(p.nodes, p.label) for p in tree.paths]
    assert got == [
        ((1, 2, 4), "0"),
        ((1, 2, 5), "1"),
        ((1, 3, 6), "1"),
        ((1, 3, 7, 8), "0"),
        ((1, 3, 7, 9), "1"),
    ]
    assert tree.paths[3].tested == frozenset({0, 1, 2})
    assert tree.paths[0].items == ((0, frozenset({0}), 1), (1, frozenset({0}), 1))
    assert tree.paths[3].depth() == 3


def test_fixture_classify(fixture_tree):
    tree = fixture_tree
    inst = make_instance(tree, [4, 4, 2], expected="1")
    assert inst.point == (3, 3, 1)
    assert inst.label == "1"
    assert tree.consistent_path(inst.point).nodes == (1, 3, 7, 9)
    assert tree.classify((0, 0, 0)) == "0"
    assert tree.classify((0, 1, 0)) == "1"
    assert tree.classify((2, 0, 1)) == "1"
    assert tree.classify((1, 2, 0)) == "0"


def test_instance_string_values_and_mismatch(fixture_tree):
    inst = make_instance(fixture_tree, ["4", " 4", "2"], expected=1)
    assert inst.point == (3, 3, 1)
    with pytest.raises(ValidationError, match="does not match tree prediction"):
        make_instance(fixture_tree, [4, 4, 2], expected="0")
    with pytest.raises(ValidationError, match="not in domain"):
        make_instance(fixture_tree, [4, 4, 9])
    with pytest.raises(ValidationError, match="expected 3"):
        make_instance(fixture_tree, [4, 4])


def test_interval_domains():
    doc = small_doc()
    doc["features"][1]["domain"] = {"min": 1, "max": 3}
    tree = parse_tree(doc)
    assert tree.space[1].values == (1, 2, 3)
    doc["features"][1]["domain"] = [{"min": 1, "max": 2}, 3]
    assert parse_tree(doc).space[1].values == (1, 2, 3)
    doc["nodes"][0]["edges"][0]["values"] = {"min": 1, "max": 1}
    assert parse_tree(doc).classify((0, 0)) == "0"


def test_path_sets(fixture_tree):
    p, q = fixture_tree.path_sets("1")
    assert [x.index for x in p] == [1, 2, 4]
    assert [x.index for x in q] == [0, 3]
    with pytest.raises(ValidationError, match="unknown class"):
        fixture_tree.path_sets("7")


def test_cover_error(fixture_doc):
    doc = copy.deepcopy(fixture_doc)
    doc["nodes"][0]["edges"][1]["values"] = [2, 3]
    with pytest.raises(ValidationError) as e:
        parse_tree(doc)
    assert str(e.value) == "edges do not cover domain at node 1"


def test_overlap_error():
    doc = small_doc()
    doc["nodes"][0]["edges"][1]["values"] = [1, 2]
    with pytest.raises(ValidationError, match="edges overlap at node 1"):
        parse_tree(doc)


def test_constant_classifier():
    doc = small_doc()
    doc["nodes"][2]["leaf"] = "0"
    with pytest.raises(ValidationError) as e:
        parse_tree(doc)
    assert str(e.value) == "classifier is constant"
    lonely = {
        "features": [{"name": "a", "domain": [1, 2]}],
        "classes": ["0", "1"],
        "nodes": [{"id": 1, "leaf": "0"}],
        "root": 1,
    }
    with pytest.raises(ValidationError, match="classifier is constant"):
        parse_tree(lonely)


def test_structure_errors():
    doc = small_doc()
    doc["nodes"].append({"id": 3, "leaf": "0"})
    with pytest.raises(ValidationError, match="duplicate node id 3"):
        parse_tree(doc)

    doc = small_doc()
    doc["nodes"][0]["edges"][1]["child"] = 9
    with pytest.raises(ValidationError, match="unknown child id 9"):
        parse_tree(doc)

    doc = small_doc()
    doc["root"] = 5
    with pytest.raises(ValidationError, match="unknown root id 5"):
        parse_tree(doc)

    doc = small_doc()
    doc["nodes"][0]["edges"][1]["values"] = [2]
    doc["nodes"][0]["edges"].append({"values": [], "child": 3})
    with pytest.raises(ValidationError, match="empty edge value set at node 1"):
        parse_tree(doc)

    doc = small_doc()
    doc["nodes"][0]["edges"][0]["values"] = [1, 1]
    with pytest.raises(ValidationError, match="duplicate edge value 1 at node 1"):
        parse_tree(doc)

    doc = small_doc()
    doc["nodes"][0]["edges"][0]["values"] = [7]
    with pytest.raises(ValidationError, match="not in domain"):
        parse_tree(doc)

    doc = small_doc()
    doc["classes"] = ["0"]
    with pytest.raises(ValidationError, match="at least two classes"):
        parse_tree(doc)

    doc = small_doc()
    doc["classes"] = ["0", "0"]
    with pytest.raises(ValidationError, match="duplicate class"):
        parse_tree(doc)

    doc = small_doc()
    doc["nodes"][1]["leaf"] = "9"
    with pytest.raises(ValidationError, match="unknown class '9' at leaf 2"):
        parse_tree(doc)


def test_indegree_errors():
    doc = small_doc()
    doc["nodes"][0]["edges"][1]["child"] = 2
    doc["nodes"][0]["edges"][1]["values"] = [2]
    with pytest.raises(ValidationError, match="node 2 has 2 incoming edges"):
        parse_tree(doc)

    doc = small_doc()
    doc["nodes"].append({"id": 4, "leaf": "1"})
    with pytest.raises(ValidationError, match="unreachable node 4"):
        parse_tree(doc)

    doc = small_doc()
    doc["nodes"][0]["edges"][1] = {"values": [2], "child": 1}
    doc["nodes"].pop()
    with pytest.raises(ValidationError, match="root has an incoming edge"):
        parse_tree(doc)


def test_dead_path_error():
    doc = {
        "features": [{"name": "a", "domain": [1, 2, 3]}],
        "classes": ["0", "1"],
        "nodes": [
            {"id": 1, "feature": 0, "edges": [
                {"values": [1], "child": 2},
                {"values": [2, 3], "child": 3},
            ]},
            {"id": 2, "leaf": "0"},
            {"id": 3, "feature": 0, "edges": [
                {"values": [1], "child": 4},
                {"values": [2, 3], "child": 5},
            ]},
            {"id": 4, "leaf": "1"},
            {"id": 5, "leaf": "1"},
        ],
        "root": 1,
    }
    with pytest.raises(ValidationError, match="dead path.*'a'.*node 4"):
        parse_tree(doc)


def test_schema_errors():
    with pytest.raises(SchemaError, match="invalid JSON"):
        parse_tree("{nope")
    with pytest.raises(SchemaError, match="missing field 'features'"):
        parse_tree({"classes": ["0", "1"], "nodes": [], "root": 1})
    doc = small_doc()
    del doc["nodes"][1]["leaf"]
    with pytest.raises(SchemaError, match="missing field 'feature'"):
        parse_tree(doc)
    doc = small_doc()
    doc["features"][0]["domain"] = {"min": 3, "max": 1}
    with pytest.raises(SchemaError, match="empty interval"):
        parse_tree(doc)
    doc = small_doc()
    doc["features"][0]["domain"] = [1.5, 2.5]
    with pytest.raises(SchemaError, match="integers or strings"):
        parse_tree(doc)


def test_random_docs_parse_and_partition():
    rng = random.Random(1105)
    for _ in range(120):
        doc = random_tree_doc(rng)
        tree = parse_tree(doc)
        for node in tree.nodes.values():
            if not hasattr(node, "edges"):
                continue
            union = set()
            total = 0
            for values, _ in node.edges:
                union |= values
                total += len(values)
            assert total == len(union) == len(tree.space[node.feature])
        for path in tree.paths:
            for i, eff, esize in path.items:
                assert 0 < esize == len(eff)
                assert eff <= set(range(len(tree.space[i])))


def test_folded_literals_match_edges():
    rng = random.Random(2207)
    for _ in range(60):
        doc = random_tree_doc(rng, retest_prob=0.6)
        tree = parse_tree(doc)
        for path in tree.paths:
            expect = {}
            for a, b in zip(path.nodes, path.nodes[1:]):
                node = tree.nodes[a]
                for values, child in node.edges:
                    if child == b:
                        prev = expect.get(node.feature)
                        expect[node.feature] = values if prev is None else prev & values
            assert expect == path.literals


def test_all_instances_cover_space(fixture_tree):
    points = list(all_instances(fixture_tree))
    assert len(points) == 32 == fixture_tree.space.total_points()
    assert len({p.point for p in points}) == 32
    ones = sum(1 for p in points if p.label == "1")
    assert ones == 21
