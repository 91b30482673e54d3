"""Rooted planar tree combinatorics for stratified disk-parameter spaces.

Two cell complexes are enumerated here.  The first ("N") consists of stable
rooted planar trees whose interior vertices carry a monotone time value in
[0,1]; a cell is a tree together with the partition of its vertices into the
time-0 class ("m"), the interior class ("f", time strictly between 0 and 1)
and the time-1 class ("mprime").  The second ("L") additionally distinguishes
one f-vertex and gains an extra interval coordinate.

Vertices are identified by their path from the root: a tuple of child
indices, () being the interior vertex adjacent to the root edge.  Tree shapes
are nested tuples whose leaves are the labels 1..k in planar order; that
nested tuple is also the canonical normal form used for deduplication.

Interior valence counts the parent edge, so stability (no 2-valent vertices)
means every interior node has at least two children.  Codimension-one facet
descriptions deliberately allow 2-valent vertices: they encode broken-strip
configurations that bound the top cell without being cells themselves.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidArity, InvalidInput, OrderDegenerate

M, F, MPRIME = "m", "f", "mprime"
_RANK = {M: 0, F: 1, MPRIME: 2}


# ---------------------------------------------------------------------------
# tree shapes


def _subtree_shapes(labels, allow_leaf):
    if len(labels) == 1 and allow_leaf:
        yield labels[0]
    if len(labels) < 2:
        return
    for cuts in _compositions_of_block(len(labels)):
        blocks = []
        pos = 0
        for size in cuts:
            blocks.append(labels[pos : pos + size])
            pos += size
        for kids in itertools.product(
            *(_subtree_shapes(b, allow_leaf=True) for b in blocks)
        ):
            yield tuple(kids)


def _compositions_of_block(n):
    """Ordered tuples of positive integers summing to n, with >= 2 parts."""
    for r in range(2, n + 1):
        for cuts in itertools.combinations(range(1, n), r - 1):
            prev = 0
            parts = []
            for c in cuts:
                parts.append(c - prev)
                prev = c
            parts.append(n - prev)
            yield tuple(parts)


def shape_key(shape):
    """Total order on shapes so enumeration output is canonical."""
    if isinstance(shape, int):
        return (0, shape)
    return (1, tuple(shape_key(c) for c in shape))


@dataclass(frozen=True)
class RibbonTree:
    """A stable rooted planar tree with k labeled leaves."""

    k: int
    shape: tuple

    def vertices(self):
        """dict: path -> node, interior vertices only, depth-first order."""
        out = {}

        def walk(node, path):
            if isinstance(node, int):
                return
            out[path] = node
            for i, child in enumerate(node):
                walk(child, path + (i,))

        walk(self.shape, ())
        return out

    def node_at(self, path):
        node = self.shape
        for i in path:
            node = node[i]
        return node

    def children_count(self, path):
        return len(self.node_at(path))

    def valence(self, path):
        # parent edge (the root edge for path ()) plus child edges
        return self.children_count(path) + 1

    def leaves_under(self, path):
        labels = []

        def walk(node):
            if isinstance(node, int):
                labels.append(node)
                return
            for child in node:
                walk(child)

        walk(self.node_at(path))
        return labels

    def min_leaf(self, path):
        return min(self.leaves_under(path))

    def is_stable(self):
        return all(self.valence(p) >= 3 for p in self.vertices())


def enumerate_trees(k):
    """All stable rooted planar trees with k leaves, canonically ordered."""
    if k < 2:
        raise InvalidArity(f"need k >= 2 leaves for a stable domain, got {k}")
    labels = tuple(range(1, k + 1))
    shapes = set(_subtree_shapes(labels, allow_leaf=False))
    return [RibbonTree(k, s) for s in sorted(shapes, key=shape_key)]


def partial_order(tree):
    """Weak root-path order: (a, b) in the relation iff the path from a to
    the root passes through b, i.e. b is a weak ancestor of a."""
    pairs = set()
    for a in tree.vertices():
        for cut in range(len(a) + 1):
            pairs.add((a, a[:cut]))
    return frozenset(pairs)


# ---------------------------------------------------------------------------
# decorated trees and strata


@dataclass
class DecoratedTree:
    """Tree plus vertex classes, optionally with exact time values, a
    distinguished f-vertex, and a frozen interval parameter."""

    tree: RibbonTree
    classes: dict
    rho: dict | None = None
    delta: tuple | None = None
    s_value: Fraction | None = None

    def validate(self, allow_semistable=False):
        verts = self.tree.vertices()
        if set(self.classes) != set(verts):
            raise InvalidInput("classes must cover exactly the interior vertices")
        if not allow_semistable and not self.tree.is_stable():
            raise InvalidInput("tree has a 2-valent interior vertex")
        for path in verts:
            cls = self.classes[path]
            if cls not in _RANK:
                raise InvalidInput(f"unknown vertex class {cls!r}")
            if path:
                parent = path[:-1]
                if _RANK[cls] > _RANK[self.classes[parent]]:
                    raise InvalidInput(
                        f"class rank must not increase away from the root: "
                        f"{path} is {cls}, parent is {self.classes[parent]}"
                    )
        if self.rho is not None:
            for path, value in self.rho.items():
                if not 0 <= value <= 1:
                    raise InvalidInput(f"time value {value} outside [0,1] at {path}")
                cls = self.classes[path]
                expected = M if value == 0 else MPRIME if value == 1 else F
                if cls != expected:
                    raise InvalidInput(
                        f"time value {value} at {path} inconsistent with class {cls}"
                    )
                if path and self.rho[path] > self.rho[path[:-1]]:
                    raise InvalidInput(f"time values must not decrease toward the root at {path}")
        # the time-1 region is rootward-closed, hence connected through the
        # root vertex; assert rather than trust the monotone constraint
        ones = [p for p, c in self.classes.items() if c == MPRIME]
        if ones:
            assert () in ones, "time-1 class must contain the root vertex"
            assert all(self.classes[p[:-1]] == MPRIME for p in ones if p)
        if self.delta is not None and self.classes.get(self.delta) != F:
            raise InvalidInput("distinguished vertex must have class f")
        return self

    def dimension(self):
        not_f = sum(1 for c in self.classes.values() if c != F)
        base = self.tree.k - 1 - not_f
        return base + (1 if self.delta is not None else 0)

    def stratum_signature(self):
        """Canonical cell datum for a concrete decorated tree: shape, class
        partition, and the weak order of the interior time values.  Ties
        among f-vertices are preserved as blocks, not broken."""
        classes = tuple(sorted(self.classes.items()))
        weak = ()
        if self.rho is not None:
            fs = [(v, p) for p, v in self.rho.items() if self.classes[p] == F]
            blocks = []
            for value, group in itertools.groupby(sorted(fs), key=lambda t: t[0]):
                blocks.append(tuple(sorted(p for _, p in group)))
            weak = tuple(blocks)
        return (self.tree.shape, classes, weak)

    def to_dict(self):
        return {
            "k": self.tree.k,
            "shape": _shape_to_json(self.tree.shape),
            "classes": {format_path(p): c for p, c in sorted(self.classes.items())},
            "rho": None
            if self.rho is None
            else {format_path(p): str(v) for p, v in sorted(self.rho.items())},
            "delta": None if self.delta is None else format_path(self.delta),
            "s_value": None if self.s_value is None else str(self.s_value),
            "dimension": self.dimension(),
        }


def format_path(path):
    return "/".join(str(i) for i in path) if path else "."


def _shape_to_json(shape):
    if isinstance(shape, int):
        return shape
    return [_shape_to_json(c) for c in shape]


def _monotone_classings(tree):
    """All maps vertices -> {m, f, mprime} whose rank does not increase
    away from the root."""
    paths = sorted(tree.vertices(), key=len)  # parents before children
    assignments = [{}]
    for path in paths:
        nxt = []
        for partial in assignments:
            cap = 2 if not path else _RANK[partial[path[:-1]]]
            for cls, rank in _RANK.items():
                if rank <= cap:
                    p2 = dict(partial)
                    p2[path] = cls
                    nxt.append(p2)
        assignments = nxt
    return assignments


def representative_rho(tree, classes):
    """Exact time values realizing a classing: 0 on m, 1 on mprime, and a
    depth-graded interior value on f so that values rise toward the root."""
    rho = {}
    for path, cls in classes.items():
        if cls == M:
            rho[path] = Fraction(0)
        elif cls == MPRIME:
            rho[path] = Fraction(1)
        else:
            rho[path] = Fraction(1, len(path) + 2)
    return rho


def enumerate_strata_N(k):
    """All cells: (decorated tree, dimension), every stable shape with every
    monotone classing."""
    strata = []
    for tree in enumerate_trees(k):
        for classes in _monotone_classings(tree):
            dec = DecoratedTree(tree, classes).validate()
            strata.append((dec, dec.dimension()))
    return strata


def enumerate_strata_L(k):
    """Cells of the order-decorated complex: an N-cell plus a choice of
    distinguished f-vertex; dimension goes up by one."""
    strata = []
    for dec, _ in enumerate_strata_N(k):
        f_vertices = sorted(p for p, c in dec.classes.items() if c == F)
        for delta in f_vertices:
            marked = DecoratedTree(dec.tree, dict(dec.classes), delta=delta).validate()
            strata.append((marked, marked.dimension()))
    return strata


# ---------------------------------------------------------------------------
# orders on interior vertices


def total_order(tree, rho):
    """Sort interior vertices by (smallest leaf label underneath, time
    value).  Raises OrderDegenerate when two vertices tie on both."""
    paths = sorted(tree.vertices())
    keyed = sorted(paths, key=lambda p: (tree.min_leaf(p), rho[p], p))
    ties = [
        (a, b)
        for a, b in zip(keyed, keyed[1:])
        if tree.min_leaf(a) == tree.min_leaf(b) and rho[a] == rho[b]
    ]
    if ties:
        raise OrderDegenerate(
            "equal time values inside a leaf-label class leave the order undefined",
            ties=ties,
        )
    return keyed


def s_parametrization(tree, rho, delta, s):
    """Interval-parameter assignment: 1 on the vertices strictly below the
    distinguished vertex in the total order, s on the vertex itself, 0 on
    the rest."""
    order = total_order(tree, rho)
    if delta not in order:
        raise InvalidInput(f"distinguished vertex {delta} is not an interior vertex")
    idx = order.index(delta)
    below = set(order[:idx])
    out = {}
    for path in order:
        if path == delta:
            out[path] = s
        elif path in below:
            out[path] = 1
        else:
            out[path] = 0
    return out


# ---------------------------------------------------------------------------
# codimension-one facets of the top cell


@dataclass(frozen=True)
class Facet:
    space: str  # "N" or "L"
    facet_type: str  # N-type-1 | N-type-2 | L-type-1 | L-type-2 | L-type-3
    relation_term: tuple
    child: DecoratedTree = field(compare=False)
    parent_dimension: int
    child_dimension: int
    rho_constant: int | None = None

    def to_dict(self):
        return {
            "space": self.space,
            "facet_type": self.facet_type,
            "relation_term": _term_to_json(self.relation_term),
            "child": self.child.to_dict(),
            "parent_dimension": self.parent_dimension,
            "child_dimension": self.child_dimension,
            "rho_constant": self.rho_constant,
        }


def _term_to_json(term):
    return [list(x) if isinstance(x, tuple) else x for x in term]


def _corolla_or_leaf(labels):
    if len(labels) == 1:
        return labels[0]
    return tuple(labels)


def _fm_child(k, n, m):
    """Two-level tree: f-root with an m-corolla inserted after position n."""
    labels = list(range(1, k + 1))
    inner = tuple(labels[n : n + m])  # always a node, even when m = 1
    root = tuple(labels[:n]) + (inner,) + tuple(labels[n + m :])
    tree = RibbonTree(k, root)
    classes = {(): F, (n,): M}
    return DecoratedTree(tree, classes).validate(allow_semistable=True)


def _mf_child(k, parts, marked=None):
    """Two-level tree: product root over one f-vertex per block.  Blocks of
    size one become 2-valent f-vertices (broken input strips)."""
    labels = list(range(1, k + 1))
    kids = []
    pos = 0
    for s in parts:
        kids.append(tuple(labels[pos : pos + s]))
        pos += s
    tree = RibbonTree(k, tuple(kids))
    classes = {(): MPRIME}
    for i in range(len(parts)):
        classes[(i,)] = F
    delta = None if marked is None else (marked - 1,)
    return DecoratedTree(tree, classes, delta=delta).validate(allow_semistable=True)


def boundary_facets_N(k):
    """Every codimension-one boundary piece of the top N-cell, labeled by
    the composition term it realizes.

    The first family inserts an m-ary product corolla at time 0 under the
    f-root (inner position n); arity-1 insertions are input strip breaks.
    The second family breaks the f-root into one f-piece per composition
    block under a product root at time 1; the single-block composition is
    the output strip break.  The all-time-0 and all-time-1 sub-cases are
    tagged via ``rho_constant``.
    """
    if k < 2:
        raise InvalidArity(f"need k >= 2, got {k}")
    top_dim = k - 1
    facets = []
    for m in range(1, k + 1):
        for n in range(0, k - m + 1):
            child = _fm_child(k, n, m)
            facets.append(
                Facet(
                    space="N",
                    facet_type="N-type-1",
                    relation_term=("fm", n, m),
                    child=child,
                    parent_dimension=top_dim,
                    child_dimension=child.dimension(),
                    rho_constant=0 if (n == 0 and m == k) else None,
                )
            )
    for parts in _all_compositions(k):
        child = _mf_child(k, parts)
        facets.append(
            Facet(
                space="N",
                facet_type="N-type-2",
                relation_term=("mf", parts),
                child=child,
                parent_dimension=top_dim,
                child_dimension=child.dimension(),
                rho_constant=1 if parts == (1,) * k else None,
            )
        )
    return facets


def boundary_facets_L(k):
    """Codimension-one boundary of the top order-decorated cell: product
    breaks above the distinguished vertex (one marked block), product
    corollas inserted below it, and the two interval endpoints."""
    if k < 2:
        raise InvalidArity(f"need k >= 2, got {k}")
    top_dim = k
    facets = []
    for parts in _all_compositions(k):
        for i in range(1, len(parts) + 1):
            child = _mf_child(k, parts, marked=i)
            facets.append(
                Facet(
                    space="L",
                    facet_type="L-type-1",
                    relation_term=("mfh", parts, i),
                    child=child,
                    parent_dimension=top_dim,
                    child_dimension=child.dimension(),
                )
            )
    for m in range(1, k + 1):
        for n in range(0, k - m + 1):
            child = _fm_child(k, n, m)
            child = DecoratedTree(child.tree, child.classes, delta=()).validate(
                allow_semistable=True
            )
            facets.append(
                Facet(
                    space="L",
                    facet_type="L-type-2",
                    relation_term=("hm", n, m),
                    child=child,
                    parent_dimension=top_dim,
                    child_dimension=child.dimension(),
                )
            )
    corolla = RibbonTree(k, tuple(range(1, k + 1)))
    for endpoint, tag in ((0, "f"), (1, "g")):
        child = DecoratedTree(
            corolla, {(): F}, s_value=Fraction(endpoint)
        ).validate()
        facets.append(
            Facet(
                space="L",
                facet_type="L-type-3",
                relation_term=("endpoint", tag),
                child=child,
                parent_dimension=top_dim,
                child_dimension=child.dimension(),
            )
        )
    return facets


def _all_compositions(d):
    if d == 0:
        yield ()
        return
    for first in range(1, d + 1):
        for rest in _all_compositions(d - first):
            yield (first,) + rest
