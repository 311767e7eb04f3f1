"""Acceptance gate: one test per criterion, each at its stated tolerance.

Each test logs a PASS/FAIL line (collected in the terminal summary) and
then asserts it. Runtimes are checked against the stated budgets where the
budget applies to this machine; the diagram budget is stated for 8 workers
and is reported, not asserted.
"""

import math
import time

import numpy as np
import pytest

from soiltip import desing, tipping
from soiltip.forcing import compactify, decompactify, forcing_in_s, sech_pulse, tanh_shift
from soiltip.geometry import critical_manifold, df1_dT_on_manifold, fold_temperatures
from soiltip.integrator import IntegratorConfig
from soiltip.soil_model import SoilParams, equilibrium, frozen_jacobian, rhs, t_a_inst

P = SoilParams()
TC = tipping.TippingClass


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_01_closed_forms(record):
    with Timer() as tm:
        eps = P.eps
        Te = equilibrium(-10.1, P).T
        inst = t_a_inst(P)
    ok = 0.0640 <= eps <= 0.0642 and abs(Te + 1.95) <= 0.01 and abs(inst - 0.423364) <= 1e-4 and tm.elapsed < 1
    record("1 closed forms", ok, f"eps={eps:.10f} Te(-10.1)={Te:.6f} t_a_inst={inst:.10f} ({tm.elapsed:.3f}s)")


def test_criterion_02_frozen_canard(record):
    target = 54.287996178057110
    mids = []
    with Timer() as tm:
        for rtol in (1e-8, 1e-10, 1e-12):
            cfg = IntegratorConfig(rel_tol=rtol, abs_tol=rtol * 1e-2)
            mids.append(tipping.frozen_canard_search(0.0, 0.0, P, tol=1e-10, cfg=cfg).mid)
    errs = [abs(m - target) for m in mids]
    in_range = 54.28795 <= mids[-1] <= 54.28805
    monotone = all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))
    ok = in_range and monotone and tm.elapsed < 60
    record(
        "2 frozen canard",
        ok,
        "boundaries " + ", ".join(f"{m:.10f}" for m in mids) + f" vs [54.28795, 54.28805] ({tm.elapsed:.1f}s)",
    )


def test_criterion_03_simple_case(record):
    with Timer() as tm:
        rsn = desing.r_sn(1.5, P)
        rc = desing.critical_rate_simple(1.5, P)
    ok = abs(rsn - 0.107194) <= 5e-4 and abs(rc - 0.111459) <= 5e-4 and tm.elapsed < 300
    record("3 simple case", ok, f"r_sn={rsn:.7f} r_c={rc:.7f} ({tm.elapsed:.1f}s)")


def test_criterion_04_degenerate_point(record):
    with Timer() as tm:
        Ta_c, r_c = desing.degenerate_point(P)
    ok = abs(Ta_c - 2.1594) <= 5e-3 and abs(r_c - 0.07665) <= 5e-4 and tm.elapsed < 900
    record("4 degenerate point", ok, f"Ta_plus_c={Ta_c:.6f} r_c={r_c:.7f} ({tm.elapsed:.1f}s)")


def test_criterion_05_complicated_case(record):
    with Timer() as tm:
        cr = desing.critical_range_complicated(3.5, P)
        inside = 0.5 * (cr.r_sn + cr.r_ns)
        chain = desing.real_faux_bookkeeping(inside, 3.5, P)
    ok = abs(cr.r_ns - 0.052266) <= 5e-4 and chain == ["S1", "FN", "S2", "FS", "S1"] and tm.elapsed < 600
    record(
        "5 complicated case",
        ok,
        f"range=({cr.r_sn:.7f}, {cr.r_ns:.7f}] bookkeeping at r={inside:.6f}: {'-'.join(chain)} ({tm.elapsed:.1f}s)",
    )


def test_criterion_06_heatwave_fast(record):
    with Timer() as tm:
        r_layer = tipping.layer_critical_rate(15.0, P)
        lower, upper = tipping.critical_range_bounds(sech_pulse(15.0, 1.0), 15.0, P, r_range=(1.0, 30.0), which="last")
    lo, hi = min(lower.r_lo, upper.r_lo), max(lower.r_hi, upper.r_hi)
    contains = lo - 0.1 <= 12.9123 <= hi + 0.1
    ok = abs(r_layer - 15.1674) <= 0.05 and contains and tm.elapsed < 600
    record(
        "6 heatwave fast case",
        ok,
        f"layer r_c={r_layer:.5f}; eps>0 brackets [{lower.r_lo:.5f}, {lower.r_hi:.5f}] ({lower.kind}) "
        f"and [{upper.r_lo:.5f}, {upper.r_hi:.5f}] ({upper.kind}) ({tm.elapsed:.1f}s)",
    )


def test_criterion_07_global_warming_transition(record):
    with Timer() as tm:
        f = tanh_shift(5.0, 1.0)
        lower, upper = tipping.critical_range_bounds(f, 5.0, P)
        c_lo = tipping.classify_rate(f, 0.02, P)
        c_hi = tipping.classify_rate(f, 0.1, P)
    lo, hi = lower.r_lo, upper.r_hi
    ok = lo - 1e-3 <= 0.0454218 <= hi + 1e-3 and c_lo is TC.TRACKING and c_hi is TC.RTIPPING and tm.elapsed < 300
    record(
        "7 global warming transition",
        ok,
        f"critical range [{lo:.7f}, {hi:.7f}]; r=0.02 {c_lo.name}, r=0.1 {c_hi.name} ({tm.elapsed:.1f}s)",
    )


def test_criterion_08_scenarios(record):
    with Timer() as tm:
        s2 = tipping.scenario_run("fig2").summary
        s3 = tipping.scenario_run("fig3").summary
        s4 = tipping.scenario_run("fig4").summary
    fig2 = (
        s2.onset_year is not None
        and abs(s2.onset_year - 10.0) <= 0.5
        and s2.duration_years > 10
        and s2.hot_mean_T is not None
        and abs(s2.hot_mean_T - 70.0) <= 5.0
    )
    fig3 = s3.mean_warming_at_tip is not None and abs(s3.mean_warming_at_tip - 1.1) <= 0.3
    fig4 = abs(s4.duration_years - 50.0) <= 15.0 and abs(s4.final_T - s4.final_Ta) <= 3.0
    ok = fig2 and fig3 and fig4 and tm.elapsed < 120
    record(
        "8 scenario properties",
        ok,
        f"fig2 onset={s2.onset_year:.3f} duration={s2.duration_years:.2f}y hot_mean_T={s2.hot_mean_T:.2f} [{'ok' if fig2 else 'miss'}]; "
        f"fig3 warming_at_S3_entry={s3.mean_warming_at_tip:.3f} (at lower-fold threshold {s3.mean_warming_at_threshold:.3f}) [{'ok' if fig3 else 'miss'}]; "
        f"fig4 duration={s4.duration_years:.1f}y final T-Ta={s4.final_T - s4.final_Ta:.2f} [{'ok' if fig4 else 'miss'}] ({tm.elapsed:.1f}s)",
    )


def _fd_jacobian(fn, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h * max(1.0, abs(x[i]))
        cols.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * e[i]))
    return np.array(cols).T


def test_criterion_09_invariants(record):
    rng = np.random.default_rng(20261014)
    notes = []
    with Timer() as tm:
        # manifold residuals
        worst = 0.0
        for Ta in np.linspace(-15, 10, 11):
            cm = critical_manifold(float(Ta), P, n=401)
            worst = max(worst, float(np.max(np.abs(cm.residual()))))
        notes.append(f"residual {worst:.1e}")
        ok_res = worst < 1e-10
        # time orientation on S1, S2, S3
        m = desing.reduced_model(3.0, P)
        ok_time = True
        for _ in range(200):
            s = rng.uniform(-0.95, 0.95)
            Ta = m.ta(s)
            T1, T2 = fold_temperatures(Ta, P)
            T = rng.uniform(Ta + 0.5, 85.0)
            if min(abs(T - T1), abs(T - T2)) < 1e-3:
                continue
            on_s2 = T1 < T < T2
            ok_time &= (desing.desing_rhs(T, s, 0.1, 3.0, P)[1] < 0) == on_s2
            ok_time &= (df1_dT_on_manifold(T, Ta, P) > 0) == on_s2
        notes.append(f"orientation {'ok' if ok_time else 'bad'}")
        # Jacobians against finite differences
        worst_j = 0.0
        for _ in range(20):
            T, C, Ta = rng.uniform(-5, 80), rng.uniform(30, 150), rng.uniform(-10, 10)
            J = frozen_jacobian(T, C, Ta, P)
            Jfd = _fd_jacobian(lambda x: np.array(rhs(x[0], x[1], Ta, P)) / np.array([P.eps, 1.0]), [T, C])
            worst_j = max(worst_j, float(np.max(np.abs(J - Jfd)) / np.max(np.abs(J))))
        notes.append(f"jacobian rel {worst_j:.1e}")
        ok_jac = worst_j < 1e-6
        # compactification round trips
        worst_c = 0.0
        for nu, r in ((1.0, 0.05), (0.5, 15.0)):
            t = rng.uniform(-6.0, 6.0, 200) / (nu * r)
            worst_c = max(worst_c, float(np.max(np.abs(decompactify(nu, r, compactify(nu, r, t)) - t) / np.maximum(1.0, np.abs(t)))))
        notes.append(f"round trip {worst_c:.1e}")
        ok_rt = worst_c < 1e-10
        # classification under tolerance halving
        cfg = IntegratorConfig(dense=True)
        amps = [1.0, 2.0, 3.0, 4.0, 5.0]
        rates = np.geomspace(0.02, 0.3, 5)
        a = tipping.regular_diagram("TanhShift", amps, rates, P, cfg=cfg)
        b = tipping.regular_diagram("TanhShift", amps, rates, P, cfg=cfg.halved())
        flips = int(np.sum(a.classes != b.classes))
        notes.append(f"tolerance-halving flips {flips}/25")
        ok_cls = flips == 0 and not a.failures
    ok = ok_res and ok_time and ok_jac and ok_rt and ok_cls and tm.elapsed < 300
    record("9 invariant suites", ok, "; ".join(notes) + f" ({tm.elapsed:.1f}s)")


def test_criterion_10_diagram_structure(record):
    with Timer() as tm:
        pulse = tipping.regular_diagram("SechPulse", [15.0], np.geomspace(0.01, 30.0, 60), P)
        trans = pulse.column_transitions(15.0)
        # the secondary tongue sits just below the main region; the gap is a few 1e-5 wide in r
        shift = tipping.regular_diagram(
            "TanhShift",
            np.round(np.arange(9.0, 9.6001, 0.05), 10),
            np.round(np.arange(0.0315, 0.0340001, 2.5e-5), 10),
            P,
        )
        iso = shift.isolated_clusters()
    ok_pulse = (
        len(trans) == 2 and trans[0][2] == TC.RTIPPING and trans[1][1] == TC.RTIPPING and 10.0 < trans[1][0] < 16.0
    )
    tongue = [c for c in iso if c["cells"] >= 20 and c["amplitude"][0] <= 9.5 <= c["amplitude"][1]]
    ok_shift = len(tongue) >= 1 and not shift.failures
    desc = ", ".join(f"{c['cells']} cells Ta+ {c['amplitude'][0]:.2f}-{c['amplitude'][1]:.2f} r {c['rate'][0]:.5f}-{c['rate'][1]:.5f}" for c in tongue)
    record(
        "10 diagram structure",
        ok_pulse and ok_shift,
        f"sech column transitions at r=" + ", ".join(f"{r:.4g}" for r, _, _ in trans)
        + f"; tanh isolated tongue: {desc or 'none'} ({tm.elapsed:.0f}s on this machine, budget stated for 200x200 with 8 workers)",
    )
