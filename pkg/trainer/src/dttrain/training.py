"""CSV to interchange-format decision tree training.

Columns are discretized to finite ordered domains first, the tree is learned
on the discretized positions, and every threshold split is rewritten as a
pair of value-set edges over the domain. The rewrite is semantics
preserving: position p goes left iff p <= threshold, so the exported tree
classifies exactly like the in-memory model on every discretized row.
"""

import csv
import json
import random
from bisect import bisect_right

import numpy as np
from sklearn.tree import DecisionTreeClassifier

MAX_EXPORT_INSTANCES = 500


class TrainingError(ValueError):
    """Unusable input: unreadable CSV, degenerate labels, bad config."""


class TrainingConfig:
    __slots__ = ("max_depth", "seed", "bins")

    def __init__(self, max_depth=16, seed=0, bins=8):
        if max_depth < 1:
            raise TrainingError(f"max depth must be >= 1, got {max_depth}")
        if bins < 2:
            raise TrainingError(f"bin count must be >= 2, got {bins}")
        self.max_depth = max_depth
        self.seed = seed
        self.bins = bins


class ColumnCodec:
    """Maps one CSV column to an ordered finite domain and back.

    kind "int": few distinct integers, kept verbatim as the domain.
    kind "binned": numeric values cut into ordered bins, domain is bin ids.
    kind "cat": anything else, domain is the sorted distinct strings.
    """

    __slots__ = ("name", "kind", "domain", "_index", "_cuts")

    def __init__(self, name, kind, domain, cuts=None):
        self.name = name
        self.kind = kind
        self.domain = tuple(domain)
        self._index = {v: i for i, v in enumerate(self.domain)}
        self._cuts = cuts or []

    def encode(self, text):
        text = text.strip()
        if self.kind == "int":
            return self._index[int(text)]
        if self.kind == "binned":
            return bisect_right(self._cuts, float(text))
        return self._index[text]

    def display(self, position):
        return self.domain[position]


def _bin_cuts(values, bins):
    """Interior cut points for at most `bins` ordered bins."""
    uniq = sorted(set(values))
    if len(uniq) <= bins:
        return [(a + b) / 2.0 for a, b in zip(uniq, uniq[1:])]
    qs = [i / bins for i in range(1, bins)]
    cuts = np.quantile(np.asarray(values, dtype=float), qs)
    return sorted({float(c) for c in cuts})


def build_codec(name, texts, bins):
    vals = [t.strip() for t in texts]
    for v in vals:
        if "," in v:
            raise TrainingError(
                f"column '{name}' has a value containing a comma: {v!r}"
            )
    try:
        ints = [int(v) for v in vals]
    except ValueError:
        ints = None
    if ints is not None:
        uniq = sorted(set(ints))
        if len(uniq) <= bins:
            return ColumnCodec(name, "int", uniq)
        cuts = _bin_cuts(ints, bins)
        return ColumnCodec(name, "binned", range(len(cuts) + 1), cuts)
    try:
        floats = [float(v) for v in vals]
    except ValueError:
        floats = None
    if floats is not None:
        cuts = _bin_cuts(floats, bins)
        return ColumnCodec(name, "binned", range(len(cuts) + 1), cuts)
    return ColumnCodec(name, "cat", sorted(set(vals)))


def load_csv(path):
    """(feature names, data rows, label name); the last column is the label."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            table = [row for row in reader if row]
    except (OSError, UnicodeDecodeError, csv.Error) as e:
        raise TrainingError(f"cannot read CSV {path}: {e}") from None
    if len(table) < 2:
        raise TrainingError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in table[0]]
    if len(header) < 2:
        raise TrainingError(f"{path}: need at least one feature column and a label")
    width = len(header)
    for ln, row in enumerate(table[1:], start=2):
        if len(row) != width:
            raise TrainingError(
                f"{path}:{ln}: row has {len(row)} fields, header has {width}"
            )
    return header[:-1], table[1:], header[-1]


class TrainedTree:
    """Learned model plus everything needed to export it."""

    __slots__ = ("model", "codecs", "positions", "labels", "config")

    def __init__(self, model, codecs, positions, labels, config):
        self.model = model
        self.codecs = codecs
        self.positions = positions
        self.labels = labels
        self.config = config

    def interchange_doc(self):
        t = self.model.tree_
        nodes = []
        leaf_labels = set()
        for i in range(t.node_count):
            left = int(t.children_left[i])
            right = int(t.children_right[i])
            if left < 0:
                idx = int(np.argmax(t.value[i][0]))
                label = str(self.model.classes_[idx])
                leaf_labels.add(label)
                nodes.append({"id": i + 1, "leaf": label})
                continue
            f = int(t.feature[i])
            thr = float(t.threshold[i])
            dom = self.codecs[f].domain
            low = [dom[p] for p in range(len(dom)) if p <= thr]
            high = [dom[p] for p in range(len(dom)) if p > thr]
            nodes.append({
                "id": i + 1,
                "feature": f,
                "edges": [
                    {"values": low, "child": left + 1},
                    {"values": high, "child": right + 1},
                ],
            })
        if len(leaf_labels) < 2:
            raise TrainingError(
                "training produced a constant classifier; "
                "the data does not separate the classes at this depth"
            )
        return {
            "features": [
                {"name": c.name, "domain": list(c.domain)} for c in self.codecs
            ],
            "classes": [str(c) for c in self.model.classes_],
            "nodes": nodes,
            "root": 1,
        }

    def instance_lines(self):
        """Up to 500 training rows, rewritten to domain values, with the
        model's predicted class appended."""
        preds = self.model.predict(
            np.asarray(self.positions, dtype=float)
        )
        rng = random.Random(self.config.seed)
        n = len(self.positions)
        picked = sorted(rng.sample(range(n), min(MAX_EXPORT_INSTANCES, n)))
        lines = []
        for i in picked:
            vals = [
                str(codec.display(p))
                for codec, p in zip(self.codecs, self.positions[i])
            ]
            lines.append(",".join(vals) + "," + str(preds[i]))
        return lines


def train(csv_path, config=None):
    config = config or TrainingConfig()
    names, rows, _ = load_csv(csv_path)
    labels = [row[-1].strip() for row in rows]
    for lab in labels:
        if "," in lab:
            raise TrainingError(f"label contains a comma: {lab!r}")
    if len(set(labels)) < 2:
        raise TrainingError(
            f"labels are all {labels[0]!r}; need at least two classes"
        )
    codecs = [
        build_codec(name, [row[c] for row in rows], config.bins)
        for c, name in enumerate(names)
    ]
    positions = [
        tuple(codec.encode(row[c]) for c, codec in enumerate(codecs))
        for row in rows
    ]
    model = DecisionTreeClassifier(
        criterion="gini",
        max_depth=config.max_depth,
        random_state=config.seed,
    )
    model.fit(np.asarray(positions, dtype=float), np.asarray(labels))
    return TrainedTree(model, codecs, positions, labels, config)


def train_and_export(csv_path, config=None):
    """(interchange JSON text, instances file text) for one CSV."""
    trained = train(csv_path, config)
    doc_text = json.dumps(trained.interchange_doc(), indent=2) + "\n"
    instances_text = "\n".join(trained.instance_lines()) + "\n"
    return doc_text, instances_text
