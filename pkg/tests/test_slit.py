"""Slit-domain construction, the one-form checks, inversion, and gluing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floerbench import slit
from floerbench.errors import (
    InvalidInput,
    NumericFailure,
    SingularPoint,
    UnbalancedWeights,
    WeightMismatch,
)


def test_two_input_worked_example_is_exact():
    sm = slit.build_slit_map((0.0, 1.0), (1.0, 1.0))
    assert sm.w0 == 2.0
    assert sm.critical_points == (0.5,)
    assert sm.slit_params[0] == pytest.approx(-2 * math.log(2) / math.pi, abs=1e-15)
    assert sm.slit_levels == (1.0,)
    assert sm.boundary_levels() == (2.0, 1.0, 0.0)


def test_validation_errors():
    with pytest.raises(InvalidInput):
        slit.build_slit_map((1.0, 0.0), (1.0, 1.0))
    with pytest.raises(InvalidInput):
        slit.build_slit_map((0.0,), (1.0, 1.0))
    with pytest.raises(UnbalancedWeights):
        slit.build_slit_map((0.0, 1.0), (1.0, -1.0))
    with pytest.raises(InvalidInput):
        slit.build_slit_map((), ())


def test_single_input_is_a_plain_strip():
    sm = slit.build_slit_map((0.0,), (1.5,))
    assert sm.critical_points == ()
    assert sm.slit_params == ()
    assert sm.boundary_levels() == (1.5, 0.0)
    assert slit.verify_beta_conditions(sm, grid=80).passed


def test_critical_points_interlace_punctures():
    sm = slit.build_slit_map((0.0, 0.4, 1.1, 3.0), (0.7, 1.2, 0.5, 2.0))
    assert len(sm.critical_points) == 3
    for z, lo, hi in zip(sm.critical_points, sm.punctures, sm.punctures[1:]):
        assert lo < z < hi
        assert abs(sm.F_prime(z + 0j)) < 1e-12


def test_beta_conditions_on_the_worked_example():
    sm = slit.build_slit_map((0.0, 1.0), (1.0, 1.0))
    rep = slit.verify_beta_conditions(sm)
    assert rep.passed
    assert rep.closed_max < 1e-9
    assert rep.coclosed_max < 1e-9
    assert rep.boundary_max == 0.0
    assert all(v < 1e-6 for v in rep.end_max.values())


def test_small_weight_end_sampling_stays_off_the_puncture():
    # with w = 0.7 the chart radius at the default depth would round into
    # the puncture itself; the verifier must clamp rather than emit NaN
    sm = slit.build_slit_map((0.0, 0.9, 2.1), (1.0, 0.7, 1.3))
    rep = slit.verify_beta_conditions(sm)
    assert rep.passed
    assert all(math.isfinite(v) for v in rep.end_max.values())


def test_beta_components_match_the_potential_gradient():
    sm = slit.build_slit_map((0.0, 0.8, 2.0), (1.0, 0.5, 1.5))
    x, y = 0.3, 0.7
    g = sm.F_prime(x + 1j * y)
    bx, by = sm.beta(x, y)
    assert bx == pytest.approx(np.imag(g))
    assert by == pytest.approx(np.real(g))
    jx, jy = sm.beta_j(x, y)
    assert jx == pytest.approx(-np.real(g))
    assert jy == pytest.approx(np.imag(g))


def test_beta_is_rejected_at_punctures():
    sm = slit.build_slit_map((0.0, 1.0), (1.0, 1.0))
    with pytest.raises(SingularPoint):
        sm.beta(0.0, 0.0)
    with pytest.raises(SingularPoint):
        sm.beta_j(1.0, 0.0)
    with pytest.raises(SingularPoint):
        sm.beta(np.array([0.3, 1.0]), np.array([0.2, 0.0]))
    bx, by = sm.beta(1.0, 0.5)  # same x off the axis is fine
    assert np.isfinite(bx) and np.isfinite(by)


def test_corrupted_field_fails_verification():
    class Corrupted(slit.SlitMap):
        def F_prime(self, zeta):
            # conj is not holomorphic, so the field stops being closed
            return super().F_prime(zeta) + 0.05 * np.conj(np.asarray(zeta))

    sm = slit.build_slit_map((0.0, 1.0), (1.0, 1.0))
    bad = Corrupted(sm.punctures, sm.weights, sm.w0, sm.critical_points,
                    sm.slit_params, sm.slit_levels)
    rep = slit.verify_beta_conditions(bad, grid=80)
    assert not rep.passed
    assert rep.closed_max > 1e-2
    assert rep.coclosed_max < 1e-6


def test_input_end_chart_lands_near_its_puncture():
    sm = slit.build_slit_map((0.0, 1.0, 2.5), (1.0, 2.0, 0.5))
    for j, a in enumerate(sm.punctures, start=1):
        z = sm.input_end(j, -8.0, np.array([0.25, 0.5, 0.75]))
        assert np.all(np.imag(z) > 0)
        assert np.all(np.abs(z - a) < 1e-3)


@given(
    st.integers(min_value=2, max_value=3),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=12, deadline=None)
def test_translation_and_scaling_equivariance(k, seed):
    rng = np.random.default_rng(seed)
    w = tuple(rng.uniform(0.5, 2.0, k))
    a = tuple(np.cumsum(rng.uniform(0.4, 1.5, k)))
    base = slit.build_slit_map(a, w)
    shifted = slit.build_slit_map(tuple(x + 2.5 for x in a), w)
    assert np.allclose(shifted.slit_params, base.slit_params, atol=1e-12)
    lam = 1.0 + float(rng.uniform(0.1, 2.0))
    scaled = slit.build_slit_map(tuple(x * lam for x in a), w)
    offset = sum(w) / math.pi * math.log(lam)
    assert np.allclose(
        scaled.slit_params, np.array(base.slit_params) + offset, atol=1e-10
    )


def test_inversion_recovers_the_worked_example_exactly():
    target = (-2 * math.log(2) / math.pi,)
    punctures = slit.invert_slit_params((1.0, 1.0), target)
    assert punctures[0] == 0.0
    assert punctures[1] == pytest.approx(1.0, abs=1e-12)


def test_inversion_round_trip():
    rng = np.random.default_rng(19)
    for _ in range(8):
        k = int(rng.integers(2, 4))
        w = tuple(rng.uniform(0.5, 2.0, k))
        a = (0.0,) + tuple(np.cumsum(rng.uniform(0.3, 2.0, k - 1)))
        target = slit.build_slit_map(a, w).slit_params
        back = slit.invert_slit_params(w, target)
        assert max(abs(x - y) for x, y in zip(a, back)) < 1e-10


def test_inversion_input_validation_and_failure_surface():
    with pytest.raises(InvalidInput):
        slit.invert_slit_params((1.0, 1.0), (0.0, 0.0))
    with pytest.raises(UnbalancedWeights):
        slit.invert_slit_params((1.0, 0.0), (0.0,))
    assert slit.invert_slit_params((2.0,), ()) == (0.0,)
    with pytest.raises(NumericFailure) as err:
        slit.invert_slit_params((1.0, 2.0, 1.0), (-30.0, -1.0), max_iter=1)
    assert err.value.residual is not None


def test_inversion_fails_cleanly_past_float_resolution():
    # these parameters need a gap ratio around exp(-50), which double
    # precision cannot separate; the solver must stall, not crash
    with pytest.raises(NumericFailure) as err:
        slit.invert_slit_params((0.5, 1.5, 2.0), (5.0, -25.0))
    assert err.value.residual is None or err.value.residual < 1.0


def test_gluing_weight_compatibility():
    inner = slit.build_slit_map((0.0, 1.0), (1.0, 1.0))
    outer = slit.build_slit_map((0.0, 1.5), (1.0, 1.0))
    with pytest.raises(WeightMismatch):
        slit.glue_slit_maps(outer, inner, 1, 4.0)


def test_gluing_needs_enough_neck():
    inner = slit.build_slit_map((0.0, 40.0), (1.0, 1.0))
    outer = slit.build_slit_map((0.0, 1.5), (2.0, 1.0))
    with pytest.raises(InvalidInput):
        slit.glue_slit_maps(outer, inner, 1, 0.5)


def test_glued_data_is_spliced():
    inner = slit.build_slit_map((0.0, 1.0), (1.0, 1.0))
    outer = slit.build_slit_map((0.0, 1.5), (2.0, 1.0))
    glued = slit.glue_slit_maps(outer, inner, 1, 5.0)
    assert glued.weights == (1.0, 1.0, 1.0)
    assert len(glued.punctures) == 3
    assert glued.punctures[0] == 0.0
    assert glued.punctures[2] == 1.5


def test_gluing_weight_arithmetic_is_associative():
    u = slit.build_slit_map((0.0, 1.0), (0.25, 0.5))
    v = slit.build_slit_map((0.0, 1.0), (0.75, 1.25))
    w = slit.build_slit_map((0.0, 1.0), (2.0, 1.0))
    # neck lengths only place the punctures; the weight splice must agree
    inner_first = slit.glue_slit_maps(w, slit.glue_slit_maps(v, u, 1, 8.0), 1, 4.0)
    outer_first = slit.glue_slit_maps(slit.glue_slit_maps(w, v, 1, 4.0), u, 1, 8.0)
    assert inner_first.weights == outer_first.weights == (0.25, 0.5, 1.25, 1.0)
    assert inner_first.w0 == outer_first.w0 == 3.0

    # disjoint slots commute as well
    p = slit.build_slit_map((0.0, 1.0), (0.5, 0.5))
    left = slit.glue_slit_maps(slit.glue_slit_maps(w, v, 1, 5.0), p, 3, 5.0)
    right = slit.glue_slit_maps(slit.glue_slit_maps(w, p, 2, 5.0), v, 1, 5.0)
    assert left.weights == right.weights == (0.75, 1.25, 0.5, 0.5)


def test_gluing_residual_decreases():
    inner = slit.build_slit_map((0.0, 1.0), (1.0, 1.0))
    outer = slit.build_slit_map((0.0, 1.5), (2.0, 1.0))
    rows = slit.gluing_residual(outer, inner, 1, (2.0, 4.0, 8.0, 16.0))
    residuals = [r["residual"] for r in rows]
    assert all(b < a for a, b in zip(residuals, residuals[1:]))
    assert residuals[-1] < 1e-6


def test_prediction_keeps_outer_parameters():
    inner = slit.build_slit_map((0.0, 1.0, 2.0), (1.0, 0.5, 0.5))
    outer = slit.build_slit_map((0.0, 1.0, 2.2), (1.0, 2.0, 1.0))
    pred = slit.predicted_glued_params(outer, inner, 2, 6.0)
    # inner has 3 punctures, so outer slit 2 lands at position 2 + (3-1)
    assert len(pred) == len(outer.slit_params) + len(inner.slit_params)
    assert pred[0] == outer.slit_params[0]
    assert pred[-1] == outer.slit_params[1]
