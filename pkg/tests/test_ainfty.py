"""Relation verifiers on the hand-built fixtures, composition, negative
controls, and the JSON documents."""

import json

import numpy as np
import pytest

from floerbench import ainfty, spectra
from floerbench.errors import InvalidInput, WeightMismatch


@pytest.fixture
def dga():
    return ainfty.dga_fixture()


def test_degree_validation_rejects_bad_tables():
    gens = [
        ainfty.ChordBasisElement("c", "pt", "pt", 0),
        ainfty.ChordBasisElement("e", "pt", "pt", 1),
    ]
    with pytest.raises(InvalidInput):
        # m1 must raise degree by one; c -> c does not
        ainfty.AInftyCategory(["pt"], gens, {1: {("c",): {"c": 1}}})
    with pytest.raises(InvalidInput):
        ainfty.AInftyCategory(["pt"], gens, {2: {("c", "c"): {"e": 1}}})


def test_composability_validation():
    gens = [
        ainfty.ChordBasisElement("x", "A", "B", 0),
        ainfty.ChordBasisElement("y", "A", "B", 0),
    ]
    with pytest.raises(InvalidInput):
        # x then y is not composable: both run A -> B
        ainfty.AInftyCategory(["A", "B"], gens, {2: {("x", "y"): {}}})


def test_arity_one_relation_is_differential_squared(dga):
    # d(dc) = d(e) = 0, termwise
    first = dga.m(("c",))
    assert first == {"e": 1}
    second = {}
    for gen, coeff in first.items():
        for out, c2 in dga.m((gen,)).items():
            second[out] = second.get(out, 0) + coeff * c2
    assert not any(second.values())
    assert ainfty.verify_ainfty(dga, 1).passed


def test_dga_relation_holds_through_arity_five(dga):
    rep = ainfty.verify_ainfty(dga, 5)
    assert rep.passed
    assert rep.checked == 62
    assert rep.failures == []


def test_breaking_the_product_localizes_the_failure(dga):
    maps = {1: dict(dga.maps[1]), 2: dict(dga.maps[2])}
    maps[2][("c", "e")] = {"e": -1}  # flips graded Leibniz for this pair
    broken = ainfty.AInftyCategory(
        dga.objects, list(dga.generators.values()), maps
    )
    rep = ainfty.verify_ainfty(broken, 3)
    assert not rep.passed
    bad_tuples = {t for _, t, _ in rep.failures}
    assert ("c", "c") in bad_tuples or ("c", "e") in bad_tuples
    # residuals are exact integers
    for _, _, residual in rep.failures:
        assert all(isinstance(v, int) for v in residual.values())


def test_identity_functor_passes(dga):
    assert ainfty.verify_functor(ainfty.identity_functor(dga), 5).passed


def test_theta_functor_passes_through_arity_three(dga):
    assert ainfty.verify_functor(ainfty.theta_functor(dga), 3).passed


def test_theta_functor_is_a_truncated_fixture(dga):
    # the tables stop at arity 3; the relation genuinely needs an arity-4
    # correction, so the capped check at 4 must fail rather than lie
    rep = ainfty.verify_functor(ainfty.theta_functor(dga), 4)
    assert not rep.passed


def test_homotopy_fixture_passes_with_default_block_signs():
    rep = ainfty.verify_homotopy(ainfty.theta_homotopy(), 3)
    assert rep.passed
    assert rep.checked == 14


def test_alternative_club_reading_fails_at_arity_three():
    rep = ainfty.verify_homotopy(ainfty.theta_homotopy(), 3, club_reading="lam")
    assert not rep.passed
    arity, inputs, residual = rep.failures[0]
    assert arity == 3
    assert inputs == ("c", "e", "e")
    assert residual == {"c": -2}


def test_classical_chain_homotopy_reduction():
    H = ainfty.chain_homotopy_fixture()
    assert ainfty.verify_homotopy(H, 1).passed
    # rescaling every odd-arity homotopy table by -1 breaks f - g = hd + dh
    assert not ainfty.verify_homotopy(H, 1, h_arity_sign=True).passed


def test_homotopy_endpoint_functors_must_share_object_map(dga):
    F = ainfty.identity_functor(dga)
    other = ainfty.AInftyCategory(
        ["q"],
        [
            ainfty.ChordBasisElement("c", "q", "q", 0),
            ainfty.ChordBasisElement("e", "q", "q", 1),
        ],
        {1: {("c",): {"e": 1}}, 2: {("c", "c"): {"c": 1}, ("c", "e"): {"e": 1}}},
    )
    G = ainfty.AInftyFunctor(
        dga, other, {"pt": "q"}, {1: {(x,): {x: 1} for x in "ce"}}
    )
    with pytest.raises(WeightMismatch):
        ainfty.AInftyHomotopy(F, G, {})


def test_compose_with_identity_is_identity(dga):
    F = ainfty.theta_functor(dga)
    left = ainfty.compose_functors(ainfty.identity_functor(dga), F, d_max=3)
    right = ainfty.compose_functors(F, ainfty.identity_functor(dga), d_max=3)
    assert left.maps == F.maps
    assert right.maps == F.maps


def test_composite_arity_two_expansion(dga):
    F = ainfty.theta_functor(dga)
    FF = ainfty.compose_functors(F, F, d_max=2)
    # f2_comp(x, y) = f1(f2(x,y)) + f2(f1 x, f1 y) with f1 = id
    assert FF.f(("e", "e")) == {"e": 2}
    assert FF.f(("c", "e")) == {"c": 2}


def test_theta_squared_still_satisfies_the_relation(dga):
    FF = ainfty.compose_functors(
        ainfty.theta_functor(dga), ainfty.theta_functor(dga), d_max=3
    )
    assert ainfty.verify_functor(FF, 3).passed


def _random_zero_product_category(rng, tag, objects=2, gens=3):
    objs = [f"{tag}{i}" for i in range(objects)]
    basis = []
    for i in range(gens):
        src, dst = rng.choice(objs), rng.choice(objs)
        basis.append(
            ainfty.ChordBasisElement(f"{tag}g{i}", src, dst, int(rng.integers(0, 3)))
        )
    return ainfty.AInftyCategory(objs, basis, {})


def _random_functor(rng, src, dst, arity_cap=3):
    omap = {o: rng.choice(dst.objects) for o in src.objects}
    maps = {}
    for d in range(1, arity_cap + 1):
        table = {}
        for tup in src.composable_tuples(d):
            want = sum(src.generators[x].degree for x in tup) + 1 - d
            s = omap[src.generators[tup[0]].source]
            t = omap[src.generators[tup[-1]].target]
            outs = {
                g.id: int(rng.integers(-2, 3))
                for g in dst.generators.values()
                if g.degree == want and (g.source, g.target) == (s, t)
            }
            outs = {k: v for k, v in outs.items() if v}
            if outs:
                table[tup] = outs
        if table:
            maps[d] = table
    return ainfty.AInftyFunctor(src, dst, omap, maps)


def test_twenty_randomized_compositions_remain_functors():
    rng = np.random.default_rng(42)
    for _ in range(20):
        A = _random_zero_product_category(rng, "a")
        B = _random_zero_product_category(rng, "b")
        C = _random_zero_product_category(rng, "c")
        F1 = _random_functor(rng, A, B)
        F2 = _random_functor(rng, B, C)
        assert ainfty.verify_functor(F1, 3).passed
        assert ainfty.verify_functor(F2, 3).passed
        composite = ainfty.compose_functors(F2, F1, d_max=3)
        assert ainfty.verify_functor(composite, 3).passed


def test_compose_requires_matching_middle(dga):
    other = _random_zero_product_category(np.random.default_rng(0), "z")
    F = ainfty.identity_functor(dga)
    G = ainfty.identity_functor(other)
    with pytest.raises(WeightMismatch):
        ainfty.compose_functors(G, F)


# ---------------------------------------------------------------------------
# relation term expansions


def test_relation_term_counts():
    assert len(ainfty.functor_relation_terms(2)) == 5
    assert len(ainfty.functor_relation_terms(3)) == 10
    assert len(ainfty.homotopy_relation_terms(2)) == 8
    assert len(ainfty.homotopy_relation_terms(3)) == 16


def test_homotopy_terms_include_both_endpoints():
    terms = ainfty.homotopy_relation_terms(4)
    assert ("endpoint", "f") in terms
    assert ("endpoint", "g") in terms


# ---------------------------------------------------------------------------
# Morse-Bott packaging


def test_morse_bott_complex_shape():
    spectrum = spectra.enumerate_chords_T3()
    mb = ainfty.build_morse_bott_complex(spectrum)
    assert mb.ranks() == {0: 1, 1: 2, 2: 1}
    assert len(mb.nonconstant_basis) == 8
    assert mb.action_gap == 0.5
    assert mb.subcomplex == "constant-family"
    actions = [g.action for g in mb.nonconstant_basis]
    assert actions == sorted(actions, key=lambda a: -a)
    assert all(a <= -mb.action_gap for a in actions)


def test_morse_bott_complex_with_no_nonconstant_chords():
    spectrum = spectra.enumerate_chords_T3(cutoff="-1/4")
    mb = ainfty.build_morse_bott_complex(spectrum)
    assert mb.ranks() == {0: 1, 1: 2, 2: 1}
    assert mb.nonconstant_basis == []
    assert mb.action_gap == 0.0


def test_morse_bott_complex_accepts_supplied_degrees():
    spectrum = spectra.enumerate_chords_T3(cutoff=-2)
    degrees = {c.label(): 1 for c in spectrum if not c.constant_family}
    mb = ainfty.build_morse_bott_complex(spectrum, degrees=degrees)
    assert {g.degree for g in mb.nonconstant_basis} == {1}


def test_morse_bott_complex_requires_one_constant_family():
    spectrum = [c for c in spectra.enumerate_chords_T3() if not c.constant_family]
    with pytest.raises(InvalidInput):
        ainfty.build_morse_bott_complex(spectrum)


# ---------------------------------------------------------------------------
# documents


def test_json_round_trip_category(dga, tmp_path):
    p = tmp_path / "cat.json"
    p.write_text(json.dumps(dga.to_dict()))
    back = ainfty.load_document(str(p))
    assert isinstance(back, ainfty.AInftyCategory)
    assert back.to_dict() == dga.to_dict()


def test_json_round_trip_functor_and_homotopy(tmp_path):
    H = ainfty.theta_homotopy()
    doc = json.loads(json.dumps(H.to_dict()))
    back = ainfty.load_document(doc)
    assert isinstance(back, ainfty.AInftyHomotopy)
    assert ainfty.verify_homotopy(back, 3).passed
    F = ainfty.load_document(H.F.to_dict())
    assert ainfty.verify_functor(F, 3).passed


def test_unknown_document_kind_rejected():
    with pytest.raises(InvalidInput):
        ainfty.load_document({"kind": "mystery"})
