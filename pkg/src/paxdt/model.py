"""Decision-tree data model over finite discrete feature spaces.

Trees come in as a JSON interchange document (see `parse_tree`), get fully
validated, and are then immutable: safe to share across threads and reused
by every other module. Feature values are interned to dense position ids at
parse time; all counting downstream works on ids only and reports map back
to the original labels.
"""

import json
from itertools import product


class SchemaError(ValueError):
    """Document does not match the interchange schema (missing/badly typed field)."""


class ValidationError(ValueError):
    """Document parses but violates a structural invariant."""


class FeatureSpec:
    """One feature: a name and an ordered, duplicate-free finite domain."""

    __slots__ = ("name", "values", "_pos")

    def __init__(self, name, values):
        self.name = name
        self.values = tuple(values)
        if not self.values:
            raise ValidationError(f"empty domain for feature '{name}'")
        self._pos = {}
        for i, v in enumerate(self.values):
            if v in self._pos:
                raise ValidationError(f"duplicate value {v!r} in domain of feature '{name}'")
            self._pos[v] = i

    def __len__(self):
        return len(self.values)

    def position(self, raw):
        """Map a raw value (or its string form) to its dense position id."""
        if isinstance(raw, bool):
            raise ValidationError(f"value {raw!r} not in domain of feature '{self.name}'")
        if raw in self._pos:
            return self._pos[raw]
        if isinstance(raw, str):
            stripped = raw.strip()
            if stripped in self._pos:
                return self._pos[stripped]
            try:
                as_int = int(stripped)
            except ValueError:
                as_int = None
            if as_int is not None and as_int in self._pos:
                return self._pos[as_int]
        raise ValidationError(f"value {raw!r} not in domain of feature '{self.name}'")

    def __repr__(self):
        return f"FeatureSpec({self.name!r}, {list(self.values)!r})"


class FeatureSpace:
    """Ordered collection of features; the product of domains is the point space."""

    __slots__ = ("features",)

    def __init__(self, features):
        self.features = tuple(features)
        if not self.features:
            raise ValidationError("feature space is empty")

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def __getitem__(self, i):
        return self.features[i]

    def total_points(self):
        n = 1
        for f in self.features:
            n *= len(f)
        return n

    def domain_sizes(self):
        return tuple(len(f) for f in self.features)


class InternalNode:
    __slots__ = ("id", "feature", "edges", "route")

    def __init__(self, node_id, feature, edges):
        self.id = node_id
        self.feature = feature
        self.edges = tuple(edges)  # (frozenset of positions, child id)
        self.route = {}
        for values, child in self.edges:
            for p in values:
                self.route[p] = child


class LeafNode:
    __slots__ = ("id", "label")

    def __init__(self, node_id, label):
        self.id = node_id
        self.label = label


class TreePath:
    """A root-to-leaf path with its folded literal map.

    items holds one (feature, effective set, set size) triple per tested
    feature, sorted by feature index; repeated tests along the path are
    already intersected.
    """

    __slots__ = ("index", "nodes", "label", "items", "literals", "tested")

    def __init__(self, index, nodes, label, literals):
        self.index = index
        self.nodes = tuple(nodes)
        self.label = label
        self.literals = dict(literals)
        self.items = tuple(
            (i, frozenset(s), len(s)) for i, s in sorted(literals.items())
        )
        self.tested = frozenset(literals)

    def depth(self):
        """Number of internal nodes along the path."""
        return len(self.nodes) - 1

    def __repr__(self):
        return f"TreePath({list(self.nodes)!r}, label={self.label!r})"


class DecisionTree:
    """Validated decision tree. Immutable after construction."""

    def __init__(self, space, classes, nodes, root):
        self.space = space
        self.classes = tuple(classes)
        self.nodes = dict(nodes)
        self.root = root
        self._validate_structure()
        self.paths = self._build_paths()
        self._path_by_leaf = {p.nodes[-1]: p for p in self.paths}
        labels = {p.label for p in self.paths}
        if len(labels) < 2:
            raise ValidationError("classifier is constant")

    # -- validation -----------------------------------------------------

    def _validate_structure(self):
        if self.root not in self.nodes:
            raise ValidationError(f"unknown root id {self.root}")
        indegree = {nid: 0 for nid in self.nodes}
        for node in self.nodes.values():
            if isinstance(node, InternalNode):
                for _, child in node.edges:
                    if child not in self.nodes:
                        raise ValidationError(f"unknown child id {child} at node {node.id}")
                    indegree[child] += 1
        if indegree[self.root] != 0:
            raise ValidationError("root has an incoming edge")
        for nid, deg in indegree.items():
            if nid == self.root:
                continue
            if deg == 0:
                raise ValidationError(f"unreachable node {nid}")
            if deg > 1:
                raise ValidationError(f"node {nid} has {deg} incoming edges")
        # in-degree constraints leave no room for reachable cycles, but walk
        # with a visited set anyway so a bug cannot hang parsing
        seen = set()
        stack = [self.root]
        while stack:
            nid = stack.pop()
            if nid in seen:
                raise ValidationError(f"cycle through node {nid}")
            seen.add(nid)
            node = self.nodes[nid]
            if isinstance(node, InternalNode):
                stack.extend(child for _, child in node.edges)
        for nid in self.nodes:
            if nid not in seen:
                raise ValidationError(f"unreachable node {nid}")

    def _build_paths(self):
        paths = []
        stack = [(self.root, [self.root], {})]
        # DFS following document edge order; use an explicit stack pushed in
        # reverse so traversal order matches recursion
        while stack:
            nid, trail, lits = stack.pop()
            node = self.nodes[nid]
            if isinstance(node, LeafNode):
                paths.append(TreePath(len(paths), trail, node.label, lits))
                continue
            for values, child in reversed(node.edges):
                if node.feature in lits:
                    eff = lits[node.feature] & values
                    if not eff:
                        name = self.space[node.feature].name
                        raise ValidationError(
                            f"dead path: empty effective set for feature "
                            f"'{name}' reaching node {child}"
                        )
                else:
                    eff = values
                new_lits = dict(lits)
                new_lits[node.feature] = eff
                stack.append((child, trail + [child], new_lits))
        return tuple(paths)

    # -- queries ---------------------------------------------------------

    def classify(self, point):
        """Class label of the unique path consistent with the point."""
        node = self.nodes[self.root]
        while isinstance(node, InternalNode):
            node = self.nodes[node.route[point[node.feature]]]
        return node.label

    def consistent_path(self, point):
        """The unique root-to-leaf path whose every literal the point satisfies."""
        node = self.nodes[self.root]
        while isinstance(node, InternalNode):
            node = self.nodes[node.route[point[node.feature]]]
        return self._path_by_leaf[node.id]

    def path_sets(self, label):
        """Split paths into (predicting `label`, all others), in tree order."""
        if label not in self.classes:
            raise ValidationError(f"unknown class {label!r}")
        p = tuple(path for path in self.paths if path.label == label)
        q = tuple(path for path in self.paths if path.label != label)
        return p, q

    def num_nodes(self):
        return len(self.nodes)


class Instance:
    """A point (as position ids) plus its predicted class label."""

    __slots__ = ("point", "label", "raw")

    def __init__(self, point, label, raw):
        self.point = tuple(point)
        self.label = label
        self.raw = tuple(raw)

    def __repr__(self):
        return f"Instance({list(self.raw)!r}, class={self.label!r})"


def make_instance(tree, values, expected=None):
    """Build an Instance from raw feature values, verifying the class.

    values: one raw value (or string form) per feature.
    expected: optional class label; a mismatch with the tree's prediction
    is an error, per the instance-consistency invariant.
    """
    space = tree.space
    if len(values) != len(space):
        raise ValidationError(
            f"instance has {len(values)} values, expected {len(space)}"
        )
    point = tuple(space[i].position(v) for i, v in enumerate(values))
    label = tree.classify(point)
    if expected is not None:
        exp = str(expected).strip() if isinstance(expected, str) else str(expected)
        if exp != label:
            raise ValidationError(
                f"instance class {exp!r} does not match tree prediction {label!r}"
            )
    raw = tuple(space[i].values[point[i]] for i in range(len(space)))
    return Instance(point, label, raw)


def all_instances(tree):
    """Iterate every point of the feature space as an Instance (tests/stats)."""
    for point in product(*(range(len(f)) for f in tree.space)):
        raw = tuple(tree.space[i].values[p] for i, p in enumerate(point))
        yield Instance(point, tree.classify(point), raw)


# -- interchange parsing ---------------------------------------------------


def _expand_values(entry, what):
    """A values entry is a list of ints/strings or an inclusive integer interval."""
    if isinstance(entry, dict):
        if set(entry) != {"min", "max"}:
            raise SchemaError(f"{what}: interval object must have exactly 'min' and 'max'")
        lo, hi = entry["min"], entry["max"]
        if not isinstance(lo, int) or not isinstance(hi, int) or isinstance(lo, bool) or isinstance(hi, bool):
            raise SchemaError(f"{what}: interval bounds must be integers")
        if lo > hi:
            raise SchemaError(f"{what}: empty interval [{lo}, {hi}]")
        return list(range(lo, hi + 1))
    if not isinstance(entry, list):
        raise SchemaError(f"{what} must be a list or an interval object")
    out = []
    for v in entry:
        if isinstance(v, dict):
            out.extend(_expand_values(v, what))
        elif isinstance(v, int) and not isinstance(v, bool):
            out.append(v)
        elif isinstance(v, str):
            out.append(v)
        else:
            raise SchemaError(f"{what}: values must be integers or strings")
    return out


def _require(doc, field, typ):
    if field not in doc:
        raise SchemaError(f"missing field '{field}'")
    if not isinstance(doc[field], typ):
        raise SchemaError(f"field '{field}' has wrong type")
    return doc[field]


def parse_tree(document):
    """Parse and validate an interchange document (JSON text or dict).

    Returns a DecisionTree (its FeatureSpace is `tree.space`).
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}") from None
    elif isinstance(document, dict):
        doc = document
    else:
        raise SchemaError("document must be JSON text or a dict")
    if not isinstance(doc, dict):
        raise SchemaError("document root must be an object")

    feats_raw = _require(doc, "features", list)
    if not feats_raw:
        raise SchemaError("field 'features' is empty")
    feats = []
    for fd in feats_raw:
        if not isinstance(fd, dict):
            raise SchemaError("feature entries must be objects")
        name = _require(fd, "name", str)
        if "domain" not in fd:
            raise SchemaError(f"missing field 'domain' for feature '{name}'")
        domain = _expand_values(fd["domain"], f"domain of feature '{name}'")
        feats.append(FeatureSpec(name, domain))
    space = FeatureSpace(feats)

    classes_raw = _require(doc, "classes", list)
    classes = []
    for c in classes_raw:
        if isinstance(c, bool) or not isinstance(c, (str, int)):
            raise SchemaError("class labels must be strings or integers")
        label = str(c)
        if label in classes:
            raise ValidationError(f"duplicate class {label!r}")
        classes.append(label)
    if len(classes) < 2:
        raise ValidationError("at least two classes required")

    nodes_raw = _require(doc, "nodes", list)
    root = _require(doc, "root", int)
    nodes = {}
    for nd in nodes_raw:
        if not isinstance(nd, dict):
            raise SchemaError("node entries must be objects")
        nid = _require(nd, "id", int)
        if nid in nodes:
            raise ValidationError(f"duplicate node id {nid}")
        if "leaf" in nd:
            if "feature" in nd or "edges" in nd:
                raise SchemaError(f"node {nid} must be either a leaf or an internal node")
            label = nd["leaf"]
            if isinstance(label, bool) or not isinstance(label, (str, int)):
                raise SchemaError(f"leaf label at node {nid} must be a string or integer")
            label = str(label)
            if label not in classes:
                raise ValidationError(f"unknown class {label!r} at leaf {nid}")
            nodes[nid] = LeafNode(nid, label)
            continue
        feature = _require(nd, "feature", int)
        if isinstance(feature, bool) or not 0 <= feature < len(space):
            raise ValidationError(f"unknown feature index {feature} at node {nid}")
        spec = space[feature]
        edges_raw = _require(nd, "edges", list)
        if not edges_raw:
            raise ValidationError(f"edges do not cover domain at node {nid}")
        edges = []
        seen_positions = set()
        for ed in edges_raw:
            if not isinstance(ed, dict) or "values" not in ed or "child" not in ed:
                raise SchemaError(f"edge at node {nid} must have 'values' and 'child'")
            child = ed["child"]
            if not isinstance(child, int) or isinstance(child, bool):
                raise SchemaError(f"edge child at node {nid} must be an integer id")
            values = _expand_values(ed["values"], f"edge values at node {nid}")
            if not values:
                raise ValidationError(f"empty edge value set at node {nid}")
            positions = set()
            for v in values:
                if v not in spec._pos:
                    raise ValidationError(
                        f"edge value {v!r} not in domain of feature '{spec.name}' at node {nid}"
                    )
                p = spec._pos[v]
                if p in positions:
                    raise ValidationError(f"duplicate edge value {v!r} at node {nid}")
                positions.add(p)
            if positions & seen_positions:
                raise ValidationError(f"edges overlap at node {nid}")
            seen_positions |= positions
            edges.append((frozenset(positions), child))
        if seen_positions != set(range(len(spec))):
            raise ValidationError(f"edges do not cover domain at node {nid}")
        nodes[nid] = InternalNode(nid, feature, edges)

    if not nodes:
        raise SchemaError("field 'nodes' is empty")
    if len(nodes) == 1:
        only = next(iter(nodes.values()))
        if isinstance(only, LeafNode):
            raise ValidationError("classifier is constant")
    return DecisionTree(space, classes, nodes, root)


def load_tree(path):
    """Parse a tree from a file path."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tree(fh.read())
