import math

import numpy as np
import pytest

from conftest import make_summary, toy_summary
from oracles import ee_grid_max
from ris_overhead.ee_opt import evaluate_ee, solve_ee, solve_ee_fixed_y, y_grid
from ris_overhead.exceptions import InfeasibleError
from ris_overhead.overhead import ResourceAllocation, feedback_rate, total_power
from ris_overhead.phase_opt import Scheme
from ris_overhead.rate_opt import evaluate_rate, solve_rate


@pytest.fixture(scope="module")
def inst():
    s = make_summary(n_ris=50)
    return s, solve_ee(s)


def test_zero_power_gives_zero(inst):
    s, _ = inst
    pr = s.params
    bf = 1e6
    pf = 5.0
    y = feedback_rate(s.a, pf, bf)
    assert evaluate_ee(s, ResourceAllocation(0.0, pf, pr.b_max - bf, bf, y)) == 0.0


def test_disabled_formula():
    s = make_summary(scheme=Scheme.IDENTITY)
    pr = s.params
    p, b = 3.0, 5e7
    want = s.beta * b * math.log2(1 + p * s.c / b) / (s.beta * pr.mu * p + s.p_c)
    assert evaluate_ee(s, ResourceAllocation(p, 0.0, b, 0.0)) == pytest.approx(want, rel=1e-14)


def test_matches_rate_over_power(inst):
    s, _ = inst
    pr = s.params
    a = ResourceAllocation(4.0, 2.0, 0.99 * pr.b_max, 0.01 * pr.b_max)
    a = ResourceAllocation(a.p, a.p_f, a.b, a.b_f, feedback_rate(s.a, a.p_f, a.b_f))
    want = evaluate_rate(s, a) / total_power(pr, s, a)
    assert evaluate_ee(s, a) == pytest.approx(want, rel=1e-9)


def test_result_invariants(inst):
    s, r = inst
    pr = s.params
    a = r.alloc
    assert r.ee == pytest.approx(r.rate / r.p_tot, rel=1e-9)
    assert a.y >= s.y_min
    assert a.p + a.p_f <= pr.p_max * (1 + 1e-12)
    assert a.b + a.b_f == pytest.approx(pr.b_max, rel=1e-12)
    # the relaxed throughput constraint is tight
    assert feedback_rate(s.a, a.p_f, a.b_f) == pytest.approx(a.y, rel=1e-6)
    assert abs(r.certificate) <= 1e-7
    lam = np.array(r.lambdas)
    assert np.all(np.diff(lam) >= -1e-12 * lam.max())
    assert len(lam) <= 52


def test_matches_grid_oracle(inst):
    s, r = inst
    g = ee_grid_max(s, n=120, zooms=3)
    assert r.ee >= g * (1 - 1e-3)
    assert r.ee <= g * (1 + 1e-3)


def test_disabled_matches_grid_oracle():
    s = make_summary(scheme=Scheme.IDENTITY)
    r = solve_ee(s)
    g = ee_grid_max(s, n=300, zooms=3)
    assert r.ee == pytest.approx(g, rel=1e-3)
    assert r.ee >= g * (1 - 1e-9)


def test_resolution_robust(inst):
    s, r = inst
    assert solve_ee(s, 400).ee == pytest.approx(r.ee, rel=5e-3)


def test_dominates_rate_optimum(inst):
    s, r = inst
    ro = solve_rate(s).alloc
    ro = ResourceAllocation(ro.p, ro.p_f, ro.b, ro.b_f, feedback_rate(s.a, ro.p_f, ro.b_f))
    assert r.ee >= evaluate_ee(s, ro) * (1 - 1e-9)


def test_fixed_y_boundary_and_domain(inst):
    s, _ = inst
    edge = solve_ee_fixed_y(s, s.y_min)
    assert edge.ee == 0.0
    with pytest.raises(ValueError):
        solve_ee_fixed_y(s, 0.5 * s.y_min)
    with pytest.raises(ValueError):
        solve_ee_fixed_y(s, 2 * s.y_max)


def test_fixed_y_certificates(inst):
    s, r = inst
    for y in y_grid(s, 200)[1:200:37]:
        res = solve_ee_fixed_y(s, y)
        assert abs(res.certificate) <= 1e-7
        assert res.alloc.y == y


def test_line_search_grid(inst):
    s, _ = inst
    g = y_grid(s, 4)
    assert g[0] == s.y_min
    np.testing.assert_allclose(np.diff(g), (s.y_max - s.y_min) / 4)


def test_objective_increasing_in_y(inst):
    s, r = inst
    pr = s.params
    a = r.alloc
    vals = []
    for y in np.linspace(s.y_min * 1.01, a.y, 20):
        vals.append(evaluate_ee(s, ResourceAllocation(a.p, a.p_f, a.b, a.b_f, y)))
    assert np.all(np.diff(vals) > 0)


def test_toy_infeasible():
    with pytest.raises(InfeasibleError):
        solve_ee(make_summary(p_max=1e-12))
