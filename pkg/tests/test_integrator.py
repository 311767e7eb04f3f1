import math

import numpy as np
import pytest

from soiltip.forcing import sech_pulse, tanh_shift
from soiltip.integrator import (
    BracketError,
    IntegratorConfig,
    System,
    bisect_bracket,
    bisect_parameter,
    compactified_system,
    desing_system,
    frozen_system,
    integrate,
    integrate_to_event,
    layer_system,
    read_trajectory_csv,
    write_trajectory_csv,
)
from soiltip.soil_model import equilibrium


def _decay_system(params):
    return System("decay", lambda t, y: [-y[0], -2.0 * y[1]], ("T", "C"), params)


def test_linear_decay_matches_exact_solution(params):
    tr = integrate(_decay_system(params), [1.0, 2.0], (0.0, 5.0), t_eval=np.linspace(0, 5, 11))
    np.testing.assert_allclose(tr["T"], np.exp(-tr.t), rtol=1e-9)
    np.testing.assert_allclose(tr["C"], 2 * np.exp(-2 * tr.t), rtol=1e-9)
    assert tr.termination == "t_end"


def test_event_location(params):
    tr, hit = integrate_to_event(_decay_system(params), [1.0, 1.0], lambda t, y: y[0] - 0.5, (0.0, 10.0))
    assert hit.t == pytest.approx(math.log(2.0), abs=1e-9)
    assert tr.termination == "event"


def test_missing_event_returns_none(params):
    _, hit = integrate_to_event(_decay_system(params), [1.0, 1.0], lambda t, y: y[0] + 1.0, (0.0, 1.0))
    assert hit is None


def test_blow_up_guard(params):
    grow = System("grow", lambda t, y: [y[0] ** 2, 0.0], ("T", "C"), params)
    tr = integrate(grow, [1.0, 0.0], (0.0, 2.0))
    assert tr.termination == "blow-up"
    assert tr.t[-1] < 1.0


def test_frozen_system_relaxes_to_equilibrium(params):
    e = equilibrium(0.0, params)
    tr = integrate(frozen_system(params, 0.0), [e.T + 0.5, e.C - 1.0], (0.0, 3000.0))
    assert tr.final[0] == pytest.approx(e.T, abs=1e-6)
    assert tr.final[1] == pytest.approx(e.C, abs=1e-5)


def test_compactified_s_follows_tanh(params):
    f = tanh_shift(5.0, 0.2)
    e = equilibrium(0.0, params)
    s0 = math.tanh(0.5 * 0.2 * -30.0)
    tr = integrate(compactified_system(params, f), [e.T, e.C, s0], (0.0, 60.0), t_eval=np.linspace(0, 60, 7))
    np.testing.assert_allclose(tr["s"], np.tanh(0.5 * 0.2 * (tr.t - 30.0)), atol=1e-9)


def test_invariant_planes_stay_invariant(params):
    f = tanh_shift(5.0, 0.2)
    e = equilibrium(5.0, params)
    tr = integrate(compactified_system(params, f), [e.T, e.C, 1.0], (0.0, 10.0))
    assert np.all(tr["s"] == 1.0)
    np.testing.assert_allclose(tr["T"], e.T, atol=1e-9)


def test_layer_system_freezes_carbon(params):
    f = sech_pulse(15.0, 20.0)
    sysm = layer_system(params, f)
    assert sysm.extra["C"] == pytest.approx(equilibrium(0.0, params).C)
    assert sysm.labels == ("T", "s")


def test_desing_reverse_negates_field(params):
    f = tanh_shift(1.5, 0.11)
    fwd, rev = desing_system(params, f), desing_system(params, f, reverse=True)
    np.testing.assert_allclose(rev.rhs(0.0, [8.0, -0.2]), -np.array(fwd.rhs(0.0, [8.0, -0.2])))


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=1e-3)
    with pytest.raises(ValueError):
        IntegratorConfig(abs_tol=0.0)
    h = IntegratorConfig().halved()
    assert h.rel_tol == 5e-11 and h.abs_tol == 5e-13


def test_csv_round_trip_is_exact(tmp_path, params):
    f = tanh_shift(5.0, 0.1)
    e = equilibrium(0.0, params)
    tr = integrate(compactified_system(params, f), [e.T, e.C, -0.9], (0.0, 5.0))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(tr, path)
    back = read_trajectory_csv(path)
    assert list(back) == ["t", "T", "C", "s", "Ta"]
    np.testing.assert_array_equal(back["T"], tr["T"])
    np.testing.assert_array_equal(back["s"], tr["s"])
    write_trajectory_csv(tr, tmp_path / "again.csv")
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


def test_layer_csv_carries_frozen_carbon(tmp_path, params):
    f = sech_pulse(15.0, 20.0)
    sysm = layer_system(params, f)
    tr = integrate(sysm, [equilibrium(0.0, params).T, -0.5], (0.0, 1.0))
    write_trajectory_csv(tr, tmp_path / "l.csv")
    back = read_trajectory_csv(tmp_path / "l.csv")
    assert np.all(back["C"] == sysm.extra["C"])


def test_bisection_brackets_a_threshold():
    br = bisect_bracket(lambda x: x > math.pi, 0.0, 10.0, 1e-12)
    assert br.lo <= math.pi <= br.hi
    assert br.width <= 1e-12
    assert all(a >= b for a, b in zip(br.widths, br.widths[1:]))
    assert bisect_parameter(lambda x: x > 2.0, (0.0, 3.0), 1e-10) == pytest.approx(2.0, abs=1e-10)


def test_bisection_keeps_third_class_side():
    br = bisect_bracket(lambda x: 0 if x < 1 else (1 if x < 1.001 else 2), 0.0, 4.0, 1e-9)
    assert br.class_lo == 0 and br.class_hi == 1
    assert br.lo <= 1.0 <= br.hi


def test_bisection_same_class_raises():
    with pytest.raises(BracketError):
        bisect_bracket(lambda x: True, 0.0, 1.0, 1e-3)
