from math import isqrt

import pytest

from biquadsq.arith import factor
from biquadsq.classify import classify_m
from biquadsq.pell import (
    NoConsistentBranchError,
    PellSolution,
    case_analysis,
    cf_sqrt,
    convergents,
    fundamental_solution,
    solve_target,
)


def nonsquares(limit):
    return [d for d in range(2, limit + 1) if isqrt(d) ** 2 != d]


def pell_solutions_by_scan(D, N, y_max):
    """Oracle: direct scan of y for x^2 - D*y^2 = N."""
    out = []
    for y in range(1, y_max + 1):
        x2 = N + D * y * y
        if x2 >= 0:
            x = isqrt(x2)
            if x * x == x2:
                out.append((x, y))
    return out


def test_cf_sqrt_fixtures():
    assert (cf_sqrt(3).a0, cf_sqrt(3).period) == (1, (1, 2))
    assert (cf_sqrt(2).a0, cf_sqrt(2).period) == (1, (2,))


def test_cf_sqrt_rejects_squares():
    with pytest.raises(ValueError):
        cf_sqrt(4)
    with pytest.raises(ValueError):
        cf_sqrt(1)


def test_cf_period_is_canonical():
    for d in nonsquares(300):
        cf = cf_sqrt(d)
        assert cf.period[-1] == 2 * cf.a0
        # no earlier term closes the period
        assert all(a != 2 * cf.a0 for a in cf.period[:-1])


def test_convergents_approach_the_root():
    cf = cf_sqrt(13)
    pairs = []
    for i, (p, q) in enumerate(convergents(cf)):
        pairs.append((p, q))
        if i >= 6:
            break
    for p, q in pairs[-2:]:
        assert abs(p * p - 13 * q * q) < 2 * 13  # classical convergent bound


def test_fundamental_fixtures():
    assert (fundamental_solution(3).x, fundamental_solution(3).y) == (2, 1)
    assert (fundamental_solution(51).x, fundamental_solution(51).y) == (50, 7)
    assert (fundamental_solution(2).x, fundamental_solution(2).y) == (3, 2)


def test_fundamental_minimality_by_scan():
    for d in nonsquares(200):
        sol = fundamental_solution(d)
        assert sol.x * sol.x - d * sol.y * sol.y == 1
        assert pell_solutions_by_scan(d, 1, sol.y - 1) == []


def test_solve_target_fixtures():
    s = solve_target(3, -2)
    assert (s.x, s.y) == (1, 1)
    s = solve_target(51, -2)
    assert (s.x, s.y) == (7, 1)
    assert solve_target(7, -2) is None


def test_solve_target_agrees_with_scan():
    for d in nonsquares(200):
        for target in (-1, 2, -2):
            sol = solve_target(d, target)
            if sol is not None:
                assert sol.x * sol.x - d * sol.y * sol.y == target
            else:
                assert pell_solutions_by_scan(d, target, 10**4) == []


def test_pell_solution_validates():
    with pytest.raises(ValueError):
        PellSolution(3, 1, 3, 1)
    with pytest.raises(ValueError):
        PellSolution(3, -2, 1, 0)


def test_case_analysis_m3():
    t = case_analysis(3)
    assert (t.x0, t.y0, t.parity_case) == (2, 1, "y0_odd")
    hit = t.consistent_branch()
    assert (hit.d_plus, hit.d_minus) == (3, 1)
    assert (t.a, t.b, t.residual) == (1, 1, -2)
    assert t.b**2 - 3 * t.a**2 == -2


def test_case_analysis_m51():
    t = case_analysis(51)
    assert (t.x0, t.y0) == (50, 7)
    hit = t.consistent_branch()
    assert (hit.d_plus, hit.d_minus) == (51, 1)
    assert (t.a, t.b, t.residual) == (1, 7, -2)


def test_case_analysis_m7_out_of_pattern():
    # 7 = 7 (mod 8) fails the pattern, and the argument shows why: the
    # realized split is x0+1 = a^2, x0-1 = 7*b^2 with residual +2.
    t = case_analysis(7)
    assert (t.x0, t.y0) == (8, 3)
    hit = t.consistent_branch()
    assert (hit.d_plus, hit.d_minus) == (1, 7)
    assert (t.a, t.b, t.residual) == (1, 3, 2)
    assert t.b**2 - 7 * t.a**2 == 2


def test_case_analysis_m15_mixed_split():
    t = case_analysis(15)
    hit = t.consistent_branch()
    assert (hit.d_plus, hit.d_minus) == (5, 3)
    assert t.residual is None
    assert 5 * hit.a**2 - 3 * hit.b**2 == 2


def test_case_analysis_every_branch_annotated():
    for m in (3, 51, 15, 7, 35, 91):
        t = case_analysis(m)
        consistent = [b for b in t.branches if b.consistent]
        assert len(consistent) == 1
        for b in t.branches:
            if not b.consistent:
                assert b.contradiction is not None


def test_case_analysis_requires_squarefree():
    with pytest.raises(ValueError):
        case_analysis(12)
    with pytest.raises(ValueError):
        case_analysis(9, factor(9))


def test_pattern_matches_have_minus_two_branch():
    """Every pattern m up to 500 lands on the full-divisor split with -2."""
    for m in range(2, 501):
        try:
            report = classify_m(m)
        except ValueError:
            continue
        if report.pattern == "none":
            continue
        t = case_analysis(m)
        assert t.residual == -2, m
        assert t.b**2 - m * t.a**2 == -2
        direct = solve_target(m, -2)
        assert direct is not None
        for b in t.branches:
            if not b.consistent:
                assert "jacobi" in b.contradiction or "minimality" in b.contradiction
