import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soiltip.soil_model import (
    ParamError,
    RespirationKind,
    SoilParams,
    equilibrium,
    frozen_jacobian,
    params_from_mapping,
    params_to_text,
    respiration,
    respiration_derivative,
    respiration_log_derivative,
    rhs,
    scalar_kernels,
    t_a_inst,
)

# Reference values from a separate 30-digit mpmath evaluation of the printed formulas.
EPS = 0.0641025641025641025641
K = 0.129461538461538461538
B = 72.2844923588473273262
TE_M101 = -1.95086155674390932981
CE_M101 = 126.149358426757668497
CE_0 = 49.9994972353518179352
TA_INST = 0.423364081791504675173
RS_TABLE = {
    -20.0: 0.0016,
    0.0: 0.01,
    10.0: 0.025,
    50.0: 0.976562499828201308190,
    70.0: 5.54865056818181818182,
    90.0: 6.71088628194084000518e-7,
}


def test_derived_constants(params):
    assert params.eps == pytest.approx(EPS, rel=1e-14)
    assert params.k == pytest.approx(K, rel=1e-14)
    assert params.b == pytest.approx(B, rel=1e-14)


def test_default_parameter_values(params):
    # default entries and the Q10 = 2.5 growth law
    assert (params.mu, params.lam, params.A, params.Pi) == (2.5e6, 5.049e6, 3.9e7, 1.055)
    assert params.alpha == pytest.approx(math.log(2.5) / 10)
    assert (params.Rs0, params.c, params.Tstar) == (0.01, 10.0, 70.0)


@pytest.mark.parametrize("T,expected", sorted(RS_TABLE.items()))
def test_modified_respiration_matches_reference(params, T, expected):
    assert respiration(T, params) == pytest.approx(expected, rel=1e-12)


def test_monotone_respiration_is_q10(params):
    p = params.with_(respiration_kind=RespirationKind.MONOTONE)
    T = np.linspace(-30, 40, 15)
    np.testing.assert_allclose(respiration(T, p), 0.01 * 2.5 ** (T / 10), rtol=1e-13)


def test_clamped_respiration_vanishes_at_or_below_zero(params):
    p = params.with_(respiration_kind=RespirationKind.MODIFIED_CLAMPED)
    assert respiration(-5.0, p) == 0.0
    assert respiration(0.0, p) == 0.0
    assert respiration(5.0, p) == pytest.approx(respiration(5.0, params))


def test_respiration_peaks_at_tstar(params):
    T = np.linspace(60, 80, 20001)
    assert T[np.argmax(respiration(T, params))] == pytest.approx(params.Tstar, abs=2e-3)


def test_respiration_rejects_non_finite(params):
    with pytest.raises(ValueError):
        respiration(float("nan"), params)


def test_equilibrium_reference_values(params):
    e = equilibrium(-10.1, params)
    assert e.T == pytest.approx(TE_M101, abs=1e-13)
    assert e.C == pytest.approx(CE_M101, rel=1e-12)
    assert equilibrium(0.0, params).C == pytest.approx(CE_0, rel=1e-12)


def test_equilibrium_at_cold_start(params):
    assert equilibrium(-10.1, params).T == pytest.approx(-1.95, abs=0.01)


def test_t_a_inst_reference(params):
    assert t_a_inst(params) == pytest.approx(TA_INST, abs=1e-13)


def test_equilibrium_missing_when_clamped_below_zero(params):
    p = params.with_(respiration_kind=RespirationKind.MODIFIED_CLAMPED)
    with pytest.raises(ParamError):
        equilibrium(-20.0, p)


@given(st.floats(-15, 10), st.floats(-5, 5))
def test_equilibrium_shifts_with_air_temperature(Ta, delta):
    p = SoilParams()
    assert equilibrium(Ta + delta, p).T - equilibrium(Ta, p).T == pytest.approx(delta, abs=1e-12)


@given(st.floats(-15, 10))
def test_equilibrium_zeroes_the_vector_field(Ta):
    p = SoilParams()
    e = equilibrium(Ta, p)
    f1, f2 = rhs(e.T, e.C, Ta, p)
    assert abs(f1) < 1e-10 and abs(f2) < 1e-10


@given(st.floats(-15, 10))
@settings(max_examples=40)
def test_equilibrium_is_linearly_stable(Ta):
    p = SoilParams()
    e = equilibrium(Ta, p)
    assert np.all(np.linalg.eigvals(frozen_jacobian(e.T, e.C, Ta, p)).real < 0)


@given(st.floats(-30, 100))
def test_log_derivative_matches_finite_difference(T):
    p = SoilParams()
    h = 1e-5
    fd = (math.log(respiration(T + h, p)) - math.log(respiration(T - h, p))) / (2 * h)
    assert respiration_log_derivative(T, p) == pytest.approx(fd, rel=1e-6, abs=1e-9)


@given(st.floats(-10, 90), st.floats(1, 400), st.floats(-15, 10))
@settings(max_examples=60)
def test_jacobian_matches_finite_difference(T, C, Ta):
    p = SoilParams()
    J = frozen_jacobian(T, C, Ta, p)
    h = 1e-6

    def F(x):
        f1, f2 = rhs(x[0], x[1], Ta, p)
        return np.array([f1 / p.eps, f2])

    x = np.array([T, C])
    fd = np.column_stack([(F(x + h * e) - F(x - h * e)) / (2 * h) for e in np.eye(2)])
    np.testing.assert_allclose(J, fd, rtol=1e-6, atol=1e-6 * np.max(np.abs(J)))


def test_scalar_kernels_agree_with_vectorised(params):
    for kind in RespirationKind:
        p = params.with_(respiration_kind=kind)
        rs, g = scalar_kernels(p)
        for T in (-5.0, 0.5, 20.0, 71.0):
            assert rs(T) == pytest.approx(float(respiration(T, p)), rel=1e-13)
            if float(respiration(T, p)) > 0:
                assert g(T) == pytest.approx(float(respiration_log_derivative(T, p)), rel=1e-12, abs=1e-15)


def test_derivative_is_rs_times_log_derivative(params):
    T = np.linspace(-10, 90, 11)
    np.testing.assert_allclose(
        respiration_derivative(T, params), respiration(T, params) * respiration_log_derivative(T, params), rtol=1e-14
    )


@pytest.mark.parametrize("field", ["mu", "lam", "A", "Pi", "alpha", "Rs0", "c"])
def test_non_positive_parameters_rejected(field):
    with pytest.raises(ParamError):
        SoilParams(**{field: 0.0})


def test_parameter_text_round_trip(params):
    p = params.with_(Tstar=50.0, respiration_kind=RespirationKind.MONOTONE)
    lines = dict(line.split("=", 1) for line in params_to_text(p).splitlines())
    assert params_from_mapping(lines) == p


def test_unknown_parameter_key_rejected():
    with pytest.raises(ParamError):
        params_from_mapping({"gamma": 1.0})
