from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st
from scipy.optimize import linprog

from dkglab import feasibility as fz


def test_main_condition_example():
    res = fz.check_main(fz.FeasibilityProblem(2, -0.3, 0.3))
    assert not res
    assert res.conditions == {"s>-1/2+1/(2p)": False, "r<=1+s": True, "r>=|s|": True, "r>2/p-1": True}
    assert fz.check_main(fz.FeasibilityProblem(2, 0, 0.5))


def test_problem_validation():
    with pytest.raises(ValueError):
        fz.FeasibilityProblem(1, 0, 1)
    with pytest.raises(ValueError):
        fz.FeasibilityProblem(2.5, 0, 1)
    with pytest.raises(ValueError):
        fz.FeasibilityProblem(2, 0, 1, eps=0)
    assert fz.FeasibilityProblem(F(3, 2), 0, 1, F(1, 100)).exact
    assert not fz.FeasibilityProblem(1.5, 0, 1).exact


def test_find_sigma_rho_example():
    prob = fz.FeasibilityProblem(2, 0, 0.5)
    pair = fz.find_sigma_rho(prob)
    assert pair is not None
    assert all(fz.validate_pair(prob, pair.sigma, pair.rho).values())
    assert len(fz.working_conditions(prob, pair.sigma, pair.rho)) == 17


def test_near_endpoint_needs_small_eps():
    # with eps = 0.01 the bounds rho > 1/p and rho <= 1 - eps leave no room
    assert fz.find_sigma_rho(fz.FeasibilityProblem(1.01, 0, 1, 0.01)) is None
    pair = fz.find_sigma_rho(fz.FeasibilityProblem(1.01, 0, 1, 0.001))
    assert pair is not None and pair.rho_choice == "1/p+eps"


def test_exact_arithmetic_returns_fractions():
    prob = fz.FeasibilityProblem(F(2), F(0), F(1, 2), F(1, 100))
    pair = fz.find_sigma_rho(prob)
    assert isinstance(pair.sigma, F) and isinstance(pair.rho, F)
    assert all(fz.validate_pair(prob, pair.sigma, pair.rho).values())


def test_comparison_margin():
    c = fz.Comparison(1.0 + 1e-13, 1.0, True)
    assert c.holds(exact=True) and not c.holds(exact=False)
    assert fz.Comparison(1.0, 1.0, False).holds(exact=False)
    assert not fz.Comparison(F(1), F(1), True).holds(exact=True)


def test_p2_slice_matches_predicate_exactly():
    # 200 x 200 rational grid, exact arithmetic on both sides
    ss = [F(-1) + F(3 * i, 199) for i in range(200)]
    rs = [F(-1, 2) + F(7 * j, 2 * 199) for j in range(200)]
    for s in ss:
        for r in rs:
            assert bool(fz.check_main(fz.FeasibilityProblem(F(2), s, r))) == fz.p2_predicate(s, r)


def test_region_contains_s0_r1_for_all_p():
    p = sympy.symbols("p", positive=True)
    dom = sympy.Interval.Lopen(1, 2)
    s, r = 0, 1
    conds = [s > -sympy.Rational(1, 2) + 1 / (2 * p), r <= 1 + s, r >= abs(s), r > 2 / p - 1]
    for c in conds:
        if c in (sympy.true, True):
            continue
        assert sympy.solveset(c, p, dom) == dom


# --- independent oracle: linear programming on the same seventeen conditions --------

def _affine(prob):
    # d(sigma, rho) = lhs - rhs is affine; recover coefficients from three evaluations
    at = lambda a, b: fz.working_conditions(prob, a, b)
    base, ds, dr = at(0.0, 0.0), at(1.0, 0.0), at(0.0, 1.0)
    rows = []
    for k, c in base.items():
        d0 = c.lhs - c.rhs
        rows.append((ds[k].lhs - ds[k].rhs - d0, dr[k].lhs - dr[k].rhs - d0, d0, c.strict))
    q = 1 / prob.p
    rows += [(1, 0, -q, True), (-1, 0, 1, True), (0, 1, -q, True), (0, -1, 1, True)]
    return rows


def lp_slack(prob):
    """max t such that every strict condition holds with slack t; None when a closed one fails."""
    A, b = [], []
    for a_s, a_r, d0, strict in _affine(prob):
        # a_s*sigma + a_r*rho + d0 >= t (strict) or >= 0
        A.append([-a_s, -a_r, 1.0 if strict else 0.0])
        b.append(d0)
    res = linprog([0, 0, -1], A_ub=A, b_ub=b, bounds=[(None, None), (None, None), (None, 1.0)])
    return None if res.status == 2 else -res.fun


@settings(max_examples=300, deadline=None)
@given(st.floats(1.01, 2.0), st.floats(-0.6, 2.0), st.floats(-0.2, 3.0), st.sampled_from([0.001, 0.01, 0.05]))
def test_find_sigma_rho_agrees_with_lp(p, s, r, eps):
    prob = fz.FeasibilityProblem(p, s, r, eps)
    t = lp_slack(prob)
    assume(t is None or abs(t) > 1e-7)
    pair = fz.find_sigma_rho(prob)
    assert (pair is not None) == (t is not None and t > 0)
    if pair is not None:
        assert all(fz.validate_pair(prob, pair.sigma, pair.rho).values())


@settings(max_examples=100, deadline=None)
@given(st.fractions(F(101, 100), F(2)), st.fractions(F(-1, 4), F(2)), st.fractions(F(0), F(3)))
def test_returned_pairs_validate_exactly(p, s, r):
    prob = fz.FeasibilityProblem(p, s, r, F(1, 1000))
    pair = fz.find_sigma_rho(prob)
    if pair is not None:
        assert all(fz.validate_pair(prob, pair.sigma, pair.rho).values())


def test_sweep_small():
    rep = fz.verify_prop11(n=12)
    assert rep.inside > 0 and rep.successes == rep.inside == rep.revalidated
    assert rep.eps == pytest.approx(0.25e-3)
    d = rep.as_dict()
    assert d["success_rate"] == 1.0 and d["failures"] == []


def test_inside_with_margin():
    assert fz.inside_with_margin(2.0, 0.0, 0.5, 1e-3)
    assert not fz.inside_with_margin(2.0, 0.0, 0.0005, 1e-3)
    ps, ss, rs = fz.sweep_grid(4)
    assert ps[0] > 1.0 and ps[-1] == 2.0 and len(ss) == len(rs) == 4


def test_scaling_limits():
    rep = fz.scaling_exponents(fz.FeasibilityProblem(1.001, 0, 1, 0.001))
    assert rep.sigma_scale == pytest.approx(-0.5, abs=1e-3)
    assert rep.lambda_scale == pytest.approx(0.5, abs=1e-3)
    ex = fz.scaling_exponents(fz.FeasibilityProblem(F(2), F(0), F(1), F(1, 100)))
    assert ex.sigma_scale == 0 and ex.lambda_scale == 1
    assert ex.s_at_sigma_min == F(-1, 4) and ex.r_at_lambda_min == F(1, 4)
    assert fz.scaling_exponents(fz.FeasibilityProblem(F(3, 2), 0, 1, F(1, 100))).r_at_lambda_min == F(1, 3)


def test_region_boundary_p2():
    segs = {s.label: s for s in fz.region_boundary(F(2))}
    left = segs["s = -1/2 + 1/(2p)"]
    assert (left.start, left.end) == ((F(-1, 4), F(1, 4)), (F(-1, 4), F(3, 4)))
    assert segs["r = -s"].end == (F(-1, 4), F(1, 4))
    assert segs["r = 2/p - 1"].degenerate
    assert left.points.shape == (64, 2)
    with pytest.raises(ValueError):
        fz.region_boundary(2, resolution=8)


def test_region_boundary_points_sit_on_the_closure():
    for p in (1.2, 1.6, 2.0):
        for seg in fz.region_boundary(p):
            for s, r in seg.points:
                c = fz.main_conditions(fz.FeasibilityProblem(p, float(s), float(r)))
                assert all(x.lhs - x.rhs >= -1e-9 for x in c.values())


def test_region_csv_rows():
    rows = fz.region_csv_rows(2.0, 20)
    assert len(rows) == 400
    for s, r, ok, sigma, rho in rows:
        assert ok == fz.p2_predicate(s, r)
        if not ok:
            assert sigma is None and rho is None
    assert np.isclose(rows[0][0], -1.0)
