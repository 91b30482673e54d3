"""Finite A-infinity data over the integers and its governing relations.

A category here is a finite basis of composable generators plus sparse
integer tables for the product maps; functors and homotopies are further
sparse tables.  Three verifiers evaluate the quadratic product relation, the
functor relation, and the homotopy relation termwise on every composable
basis tuple up to an arity cap, returning exact integer residuals.

Sign exponents come from :mod:`floerbench.signs`; nothing here touches
floating point except optional action values carried along for filtration
bookkeeping.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from . import signs
from .errors import InvalidInput, WeightMismatch

SCHEMA = "floerbench-ainfty-1"


@dataclass
class ChordBasisElement:
    id: str
    source: str
    target: str
    degree: int
    action: float | None = None
    label: str | None = None


class AInftyCategory:
    """Objects, graded hom bases, and product tables keyed by arity."""

    def __init__(self, objects, generators, maps, name="category"):
        self.name = name
        self.objects = list(objects)
        self.generators = {g.id: g for g in generators}
        if len(self.generators) != len(generators):
            raise InvalidInput("duplicate generator ids")
        for g in generators:
            if g.source not in self.objects or g.target not in self.objects:
                raise InvalidInput(f"generator {g.id} references unknown objects")
        # maps: arity -> {tuple of input ids: {output id: coeff}}
        self.maps = {int(k): dict(v) for k, v in maps.items()}
        self._validate_tables()

    def _validate_tables(self):
        for arity, table in self.maps.items():
            for inputs, combo in table.items():
                if len(inputs) != arity:
                    raise InvalidInput(f"table key {inputs} has wrong arity {arity}")
                self._check_composable(inputs)
                shift = 2 - arity
                want = sum(self.generators[x].degree for x in inputs) + shift
                src = self.generators[inputs[0]].source
                dst = self.generators[inputs[-1]].target
                for out, coeff in combo.items():
                    g = self.generators[out]
                    if g.degree != want:
                        raise InvalidInput(
                            f"m^{arity}{inputs} -> {out}: degree {g.degree}, expected {want}"
                        )
                    if (g.source, g.target) != (src, dst):
                        raise InvalidInput(f"m^{arity}{inputs} -> {out}: object mismatch")
                    if not isinstance(coeff, int):
                        raise InvalidInput("coefficients must be integers")

    def _check_composable(self, inputs):
        for a, b in zip(inputs, inputs[1:]):
            if self.generators[a].target != self.generators[b].source:
                raise InvalidInput(f"tuple {inputs} is not composable at {a}|{b}")

    def m(self, inputs):
        """Product of a composable id tuple as an integer combination."""
        return dict(self.maps.get(len(inputs), {}).get(tuple(inputs), {}))

    def composable_tuples(self, arity):
        ids = list(self.generators)
        for tup in itertools.product(ids, repeat=arity):
            if all(
                self.generators[a].target == self.generators[b].source
                for a, b in zip(tup, tup[1:])
            ):
                yield tup

    def degrees(self, inputs):
        return [self.generators[x].degree for x in inputs]

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "category",
            "name": self.name,
            "objects": self.objects,
            "generators": [
                {
                    "id": g.id,
                    "source": g.source,
                    "target": g.target,
                    "degree": g.degree,
                    "action": g.action,
                    "label": g.label,
                }
                for g in self.generators.values()
            ],
            "maps": _tables_to_json(self.maps),
        }

    @classmethod
    def from_dict(cls, doc):
        gens = [
            ChordBasisElement(
                d["id"],
                d["source"],
                d["target"],
                d["degree"],
                d.get("action"),
                d.get("label"),
            )
            for d in doc["generators"]
        ]
        return cls(doc["objects"], gens, _tables_from_json(doc["maps"]), doc.get("name", "category"))


def _tables_to_json(maps):
    out = []
    for arity in sorted(maps):
        for inputs, combo in sorted(maps[arity].items()):
            out.append({"arity": arity, "inputs": list(inputs), "output": dict(combo)})
    return out


def _tables_from_json(entries):
    maps = {}
    for e in entries:
        table = maps.setdefault(int(e["arity"]), {})
        table[tuple(e["inputs"])] = {k: int(v) for k, v in e["output"].items()}
    return maps


class AInftyFunctor:
    """Object map plus morphism-level tables of every arity."""

    def __init__(self, source, target, object_map, maps, name="functor"):
        self.name = name
        self.source = source
        self.target = target
        self.object_map = dict(object_map)
        for o in source.objects:
            if self.object_map.get(o) not in target.objects:
                raise InvalidInput(f"object map misses source object {o!r}")
        self.maps = {int(k): dict(v) for k, v in maps.items()}
        self._validate_tables()

    def _validate_tables(self):
        for arity, table in self.maps.items():
            for inputs, combo in table.items():
                self.source._check_composable(inputs)
                shift = 1 - arity
                want = sum(self.source.generators[x].degree for x in inputs) + shift
                src = self.object_map[self.source.generators[inputs[0]].source]
                dst = self.object_map[self.source.generators[inputs[-1]].target]
                for out, coeff in combo.items():
                    g = self.target.generators[out]
                    if g.degree != want:
                        raise InvalidInput(
                            f"f^{arity}{inputs} -> {out}: degree {g.degree}, expected {want}"
                        )
                    if (g.source, g.target) != (src, dst):
                        raise InvalidInput(f"f^{arity}{inputs} -> {out}: object mismatch")
                    if not isinstance(coeff, int):
                        raise InvalidInput("coefficients must be integers")

    def f(self, inputs):
        return dict(self.maps.get(len(inputs), {}).get(tuple(inputs), {}))

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "functor",
            "name": self.name,
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "object_map": self.object_map,
            "maps": _tables_to_json(self.maps),
        }

    @classmethod
    def from_dict(cls, doc):
        src = AInftyCategory.from_dict(doc["source"])
        dst = AInftyCategory.from_dict(doc["target"])
        return cls(src, dst, doc["object_map"], _tables_from_json(doc["maps"]), doc.get("name", "functor"))


class AInftyHomotopy:
    """Degree -k tables joining two functors with the same object map."""

    def __init__(self, F, G, maps, name="homotopy"):
        self.name = name
        if F.source is not G.source and F.source.to_dict() != G.source.to_dict():
            raise WeightMismatch("homotopy endpoints must share a source category")
        if F.object_map != G.object_map:
            raise WeightMismatch("homotopy endpoints must share the object map")
        self.F = F
        self.G = G
        self.maps = {int(k): dict(v) for k, v in maps.items()}
        self._validate_tables()

    def _validate_tables(self):
        src, dst, omap = self.F.source, self.F.target, self.F.object_map
        for arity, table in self.maps.items():
            for inputs, combo in table.items():
                src._check_composable(inputs)
                want = sum(src.generators[x].degree for x in inputs) - arity
                for out in combo:
                    g = dst.generators[out]
                    if g.degree != want:
                        raise InvalidInput(
                            f"h^{arity}{inputs} -> {out}: degree {g.degree}, expected {want}"
                        )
                    if (g.source, g.target) != (
                        omap[src.generators[inputs[0]].source],
                        omap[src.generators[inputs[-1]].target],
                    ):
                        raise InvalidInput(f"h^{arity}{inputs} -> {out}: object mismatch")

    def h(self, inputs):
        return dict(self.maps.get(len(inputs), {}).get(tuple(inputs), {}))

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "homotopy",
            "name": self.name,
            "f": self.F.to_dict(),
            "g": self.G.to_dict(),
            "maps": _tables_to_json(self.maps),
        }

    @classmethod
    def from_dict(cls, doc):
        F = AInftyFunctor.from_dict(doc["f"])
        G = AInftyFunctor.from_dict(doc["g"])
        return cls(F, G, _tables_from_json(doc["maps"]), doc.get("name", "homotopy"))


# ---------------------------------------------------------------------------
# linear-combination plumbing


def _acc(into, combo, coeff):
    for k, v in combo.items():
        c = into.get(k, 0) + coeff * v
        if c:
            into[k] = c
        else:
            into.pop(k, None)


def _apply_multilinear(fn, slots):
    """Apply a basis-tuple map to a tuple whose entries are ids or integer
    combinations, expanding multilinearly."""
    pure = []
    for s in slots:
        pure.append([(s, 1)] if isinstance(s, str) else list(s.items()))
    out = {}
    for choice in itertools.product(*pure):
        coeff = 1
        for _, c in choice:
            coeff *= c
        if coeff:
            _acc(out, fn(tuple(x for x, _ in choice)), coeff)
    return out


@dataclass
class ResidualReport:
    check: str
    passed: bool
    checked: int
    failures: list = field(default_factory=list)

    def to_dict(self):
        return {
            "check": self.check,
            "passed": self.passed,
            "checked": self.checked,
            "failures": [
                {"arity": d, "inputs": list(t), "residual": dict(r)}
                for d, t, r in self.failures
            ],
        }


# ---------------------------------------------------------------------------
# relation verifiers


def verify_ainfty(cat, k_max):
    """Signed double sum of nested products on every composable tuple."""
    failures = []
    checked = 0
    for d in range(1, k_max + 1):
        for tup in cat.composable_tuples(d):
            checked += 1
            mu = cat.degrees(tup)
            residual = {}
            for n, m in _insertions(d):
                inner = cat.m(tup[n : n + m])
                slots = tup[:n] + (inner,) + tup[n + m :]
                term = _apply_multilinear(cat.m, slots)
                _acc(residual, term, (-1) ** signs.ddagger(mu, n))
            if residual:
                failures.append((d, tup, residual))
    return ResidualReport("ainfty", not failures, checked, failures)


def verify_functor(F, k_max):
    """Functor relation: inner-product terms against composition-block
    terms; residual zero iff F is a homomorphism up to the cap."""
    src, dst = F.source, F.target
    failures = []
    checked = 0
    for d in range(1, k_max + 1):
        for tup in src.composable_tuples(d):
            checked += 1
            mu = src.degrees(tup)
            residual = {}
            for n, m in _insertions(d):
                inner = src.m(tup[n : n + m])
                slots = tup[:n] + (inner,) + tup[n + m :]
                term = _apply_multilinear(F.f, slots)
                _acc(residual, term, (-1) ** ((signs.ddagger(mu, n) + 1) % 2))
            for parts in _compositions(d):
                blocks = _split(tup, parts)
                images = [F.f(b) for b in blocks]
                term = _apply_multilinear(dst.m, tuple(images))
                _acc(residual, term, 1)
            if residual:
                failures.append((d, tup, residual))
    return ResidualReport("functor", not failures, checked, failures)


def verify_homotopy(H, k_max, club_reading="ell", h_arity_sign=False):
    """Homotopy relation: the difference of the two functors against the
    homotopy-insertion terms and the mixed composition-block terms.

    ``club_reading`` selects the subscript reading of the block sign (see
    :func:`floerbench.signs.club`).  ``h_arity_sign`` probes the variant
    where every arity-k homotopy table is rescaled by (-1)^k; the default
    (no rescale) is the one that reduces to the classical chain-homotopy
    identity at arity 1.
    """
    F, G = H.F, H.G
    src, dst = F.source, F.target

    def h(inputs):
        combo = H.h(inputs)
        if h_arity_sign and len(inputs) % 2:
            return {k: -v for k, v in combo.items()}
        return combo

    failures = []
    checked = 0
    for d in range(1, k_max + 1):
        for tup in src.composable_tuples(d):
            checked += 1
            mu = src.degrees(tup)
            residual = {}
            _acc(residual, F.f(tup), 1)
            _acc(residual, G.f(tup), -1)
            for n, m in _insertions(d):
                inner = src.m(tup[n : n + m])
                slots = tup[:n] + (inner,) + tup[n + m :]
                term = _apply_multilinear(h, slots)
                _acc(residual, term, -((-1) ** signs.ddagger(mu, n)))
            for parts in _compositions(d):
                blocks = _split(tup, parts)
                for i in range(1, len(parts) + 1):
                    images = []
                    for j, b in enumerate(blocks, start=1):
                        if j < i:
                            images.append(F.f(b))
                        elif j == i:
                            images.append(h(b))
                        else:
                            images.append(G.f(b))
                    term = _apply_multilinear(dst.m, tuple(images))
                    sign = signs.club(mu, parts, i, reading=club_reading)
                    _acc(residual, term, -((-1) ** sign))
            if residual:
                failures.append((d, tup, residual))
    return ResidualReport("homotopy", not failures, checked, failures)


def compose_functors(F2, F1, d_max=None):
    """Block-composition of functor tables; no signs enter."""
    if F1.target.to_dict() != F2.source.to_dict():
        raise WeightMismatch("functors are not composable")
    caps = [a for a in F1.maps] + [a for a in F2.maps]
    if d_max is None:
        d_max = max(caps, default=0)
    maps = {}
    for d in range(1, d_max + 1):
        table = {}
        for tup in F1.source.composable_tuples(d):
            out = {}
            for parts in _compositions(d):
                blocks = _split(tup, parts)
                images = [F1.f(b) for b in blocks]
                _acc(out, _apply_multilinear(F2.f, tuple(images)), 1)
            if out:
                table[tup] = out
        if table:
            maps[d] = table
    omap = {o: F2.object_map[F1.object_map[o]] for o in F1.source.objects}
    return AInftyFunctor(
        F1.source, F2.target, omap, maps, name=f"{F2.name}*{F1.name}"
    )


def _insertions(d):
    for m in range(1, d + 1):
        for n in range(0, d - m + 1):
            yield n, m


def _compositions(d):
    if d == 0:
        yield ()
        return
    for first in range(1, d + 1):
        for rest in _compositions(d - first):
            yield (first,) + rest


def _split(tup, parts):
    blocks = []
    pos = 0
    for s in parts:
        blocks.append(tup[pos : pos + s])
        pos += s
    return blocks


# ---------------------------------------------------------------------------
# symbolic term expansions (the algebra-side route of the facet pairing)


def functor_relation_terms(d):
    """Multiset of term labels in the arity-d functor relation, using the
    same loops the verifier walks."""
    terms = [("fm", n, m) for n, m in _insertions(d)]
    terms += [("mf", parts) for parts in _compositions(d)]
    return terms


def homotopy_relation_terms(d):
    """Multiset of term labels in the arity-d homotopy relation, including
    the two endpoint terms coming from the functors themselves."""
    terms = [("endpoint", "f"), ("endpoint", "g")]
    terms += [("hm", n, m) for n, m in _insertions(d)]
    terms += [
        ("mfh", parts, i)
        for parts in _compositions(d)
        for i in range(1, len(parts) + 1)
    ]
    return terms


# ---------------------------------------------------------------------------
# fixtures


def dga_fixture():
    """Two-generator differential graded algebra packaged as a category:
    generators c (degree 0) and e (degree 1), dc = e, products cc = c,
    ce = e, ec = ee = 0.  The binary table carries the twist
    m2(x, y) = (-1)^{deg x} x.y that turns graded Leibniz into the arity-2
    relation."""
    gens = [
        ChordBasisElement("c", "pt", "pt", 0),
        ChordBasisElement("e", "pt", "pt", 1),
    ]
    maps = {
        1: {("c",): {"e": 1}},
        2: {("c", "c"): {"c": 1}, ("c", "e"): {"e": 1}},
    }
    return AInftyCategory(["pt"], gens, maps, name="dga")


def identity_functor(cat):
    maps = {1: {(x,): {x: 1} for x in cat.generators}}
    return AInftyFunctor(cat, cat, {o: o for o in cat.objects}, maps, name="id")


def zero_functor(cat):
    return AInftyFunctor(cat, cat, {o: o for o in cat.objects}, {}, name="zero")


def theta_functor(cat=None):
    """Endofunctor of the dga fixture with nonvanishing arity-2 and arity-3
    corrections; satisfies the functor relation through arity 3."""
    cat = cat or dga_fixture()
    maps = {
        1: {("c",): {"c": 1}, ("e",): {"e": 1}},
        2: {
            ("c", "e"): {"c": 1},
            ("e", "c"): {"c": 1},
            ("e", "e"): {"e": 1},
        },
        3: {
            ("e", "c", "e"): {"c": 1},
            ("e", "e", "c"): {"c": 1},
            ("e", "e", "e"): {"e": 1},
        },
    }
    return AInftyFunctor(cat, cat, {"pt": "pt"}, maps, name="theta")


def theta_homotopy():
    """Homotopy from the theta endofunctor to the identity; the only
    nonzero table is h2(e, e) = c.  Satisfies the homotopy relation through
    arity 3 with the default block-sign reading, and fails at arity 3 under
    the alternative reading."""
    cat = dga_fixture()
    F = theta_functor(cat)
    G = identity_functor(cat)
    return AInftyHomotopy(F, G, {2: {("e", "e"): {"c": 1}}}, name="theta-to-id")


def chain_homotopy_fixture():
    """Classical arity-1 situation: two-term complex Z.a -> Z.b with
    da = b, f = id, g = 0, h(b) = a, so f - g = hd + dh."""
    gens = [
        ChordBasisElement("a", "pt", "pt", 0),
        ChordBasisElement("b", "pt", "pt", 1),
    ]
    cat = AInftyCategory(["pt"], gens, {1: {("a",): {"b": 1}}}, name="two-term")
    F = identity_functor(cat)
    G = zero_functor(cat)
    return AInftyHomotopy(F, G, {1: {("b",): {"a": 1}}}, name="classic")


# ---------------------------------------------------------------------------
# Morse-Bott packaging


@dataclass
class MorseBottComplex:
    """Basis of the wrapped complex for a flat model: the cellular cochain
    basis of the 2-torus (the constant-chord family) plus one generator per
    nonconstant chord class, filtered by action."""

    constant_basis: list
    nonconstant_basis: list
    action_gap: float
    subcomplex: str = "constant-family"

    def ranks(self):
        out = {}
        for g in self.constant_basis:
            out[g.degree] = out.get(g.degree, 0) + 1
        return out

    def to_dict(self):
        def row(g):
            return {
                "id": g.id,
                "degree": g.degree,
                "action": g.action,
                "label": g.label,
            }

        return {
            "constant_basis": [row(g) for g in self.constant_basis],
            "nonconstant_basis": [row(g) for g in self.nonconstant_basis],
            "action_gap": self.action_gap,
            "subcomplex": self.subcomplex,
        }


def build_morse_bott_complex(spectrum, degrees=None):
    """Assemble the generator basis from a chord spectrum.

    ``spectrum`` is a list of chord classes as produced by
    :mod:`floerbench.spectra`; exactly one must be the constant family.
    ``degrees`` optionally maps a chord label to its integer degree (the
    grading module computes these; they are not guessed here, in which case
    nonconstant generators get degree 0 recorded as a placeholder label).
    """
    constants = [c for c in spectrum if c.constant_family]
    if len(constants) != 1:
        raise InvalidInput("spectrum must contain exactly one constant family")
    cells = [
        ChordBasisElement("cell:point", "T", "T", 0, action=0.0, label="0-cell"),
        ChordBasisElement("cell:alpha", "T", "T", 1, action=0.0, label="1-cell"),
        ChordBasisElement("cell:beta", "T", "T", 1, action=0.0, label="1-cell"),
        ChordBasisElement("cell:top", "T", "T", 2, action=0.0, label="2-cell"),
    ]
    noncon = []
    gap = None
    for c in spectrum:
        if c.constant_family:
            continue
        gap = float(c.energy) if gap is None else min(gap, float(c.energy))
        deg = 0 if degrees is None else degrees[c.label()]
        noncon.append(
            ChordBasisElement(
                f"chord:{c.label()}", "T", "T", deg,
                action=float(c.action), label=c.label(),
            )
        )
    noncon.sort(key=lambda g: (-g.action, g.id))
    if gap is not None:
        for g in noncon:
            assert g.action <= -gap + 1e-12, "nonconstant chord above the action gap"
    return MorseBottComplex(cells, noncon, 0.0 if gap is None else gap)


def load_document(path_or_doc):
    """Read a JSON document and build the right object from its kind tag."""
    if isinstance(path_or_doc, (str, bytes)):
        with open(path_or_doc) as fh:
            doc = json.load(fh)
    else:
        doc = path_or_doc
    kind = doc.get("kind")
    if kind == "category":
        return AInftyCategory.from_dict(doc)
    if kind == "functor":
        return AInftyFunctor.from_dict(doc)
    if kind == "homotopy":
        return AInftyHomotopy.from_dict(doc)
    raise InvalidInput(f"unknown document kind {kind!r}")
