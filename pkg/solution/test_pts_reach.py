#!/usr/bin/env python3
"""
Test Probabilistic Reachability

This script checks exact reachability probabilities, bounded-step
approximants, hitting times, discounted values and gamma sweeps.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add the current directory to Python path
sys.path.append(str(Path(__file__).parent))

from corank.config import default_gamma_schedule
from corank.model_io import parse_model
from corank.pts import (
    INF,
    PtsCoalgebra,
    branching_ladder,
    expected_hitting_time,
    gamma_sweep,
    pts_reach_exact,
    pts_reach_iter,
    reach_step,
    solve_discounted,
    sweep_to_csv,
)

FIXTURES = Path(__file__).parent / "data" / "fixtures"


def load_pts(name: str) -> PtsCoalgebra:
    return parse_model((FIXTURES / name).read_text()).body


def test_exact_reach_values():
    reach = pts_reach_exact(load_pts("ex2_8.lvs"))
    assert reach.to_dict() == {"x0": Fraction(1, 2), "x1": 1, "x2": 1, "x3": 0}
    assert pts_reach_exact(load_pts("rptsnonas.lvs"))["x0"] == Fraction(1, 2)


def test_exact_reach_is_a_fixed_point():
    for name in ("ex2_8.lvs", "rptsnonas.lvs", "two_fixed_points.lvs"):
        pts = load_pts(name)
        reach = pts_reach_exact(pts)
        assert reach_step(pts)(reach) == reach


def test_empty_accepting_set():
    pts = load_pts("empty_acc.lvs")
    assert set(pts_reach_exact(pts).values()) == {0}
    assert set(expected_hitting_time(pts).values()) == {INF}


def test_bounded_approximants():
    pts = load_pts("ex2_8.lvs")
    assert set(pts_reach_iter(pts, 0).values()) == {0}
    assert pts_reach_iter(pts, 1).to_dict() == {"x0": 0, "x1": 0, "x2": 1, "x3": 0}
    third = pts_reach_iter(pts, 3)
    assert third["x1"] == Fraction(3, 4)
    assert third["x0"] == Fraction(1, 4)
    exact = pts_reach_exact(pts)
    previous = pts_reach_iter(pts, 0)
    for n in range(1, 12):
        current = pts_reach_iter(pts, n)
        assert all(previous[s] <= current[s] <= exact[s] for s in pts.states)
        previous = current
    with pytest.raises(ValueError):
        pts_reach_iter(pts, -1)


def test_hitting_times():
    times = expected_hitting_time(load_pts("ex2_8.lvs"))
    assert times["x1"] == 2
    assert times["x2"] == 0
    assert times["x0"] == INF and times["x3"] == INF


def test_discounted_closed_form():
    pts = load_pts("rptsnonas.lvs")
    for k in range(10):
        gamma = Fraction(k, 10)
        values = solve_discounted(pts, gamma)
        assert values["x0"] == gamma / (3 - gamma)
        assert values["x1"] == 1 and values["x2"] == 0


def test_discounted_at_zero_is_the_indicator():
    pts = load_pts("ex2_8.lvs")
    assert solve_discounted(pts, Fraction(0)).to_dict() == {"x0": 0, "x1": 0, "x2": 1, "x3": 0}


def test_discounted_example_value():
    values = solve_discounted(load_pts("ex2_8.lvs"), Fraction(1, 2))
    assert values["x1"] == Fraction(1, 3)
    assert values["x0"] == Fraction(1, 12)


def test_discount_factor_range():
    pts = load_pts("ex2_8.lvs")
    for gamma in (Fraction(1), Fraction(-1, 2), Fraction(3, 2)):
        with pytest.raises(ValueError):
            solve_discounted(pts, gamma)
    with pytest.raises(ValueError):
        gamma_sweep(pts, [])


def test_default_sweep_converges():
    schedule = default_gamma_schedule()
    assert len(schedule) == 20 and schedule[-1] == 1 - Fraction(1, 2 ** 20)
    result = gamma_sweep(load_pts("rptsnonas.lvs"), schedule)
    assert Fraction(1, 2) - result.supremum["x0"] <= Fraction(1, 2 ** 18)
    assert result.supremum["x0"] <= Fraction(1, 2)
    column = [row["x0"] for _, row in result.rows]
    assert column == sorted(column)


def test_ladder_sweep_converges():
    ladder = branching_ladder(4)
    assert pts_reach_exact(ladder)["x"] == Fraction(15, 16)
    result = gamma_sweep(ladder, default_gamma_schedule())
    assert Fraction(15, 16) - result.supremum["x"] <= Fraction(1, 2 ** 16)


def test_ladder_hitting_times():
    times = expected_hitting_time(branching_ladder(2))
    assert times["x"] == INF
    assert times["x_2_1"] == 3
    assert times["x_1_2"] == 0


def test_sweep_is_deterministic_across_workers():
    pts = branching_ladder(3)
    schedule = default_gamma_schedule(12)
    serial = gamma_sweep(pts, schedule, workers=1)
    parallel = gamma_sweep(pts, schedule, workers=4)
    assert serial.rows == parallel.rows
    assert sweep_to_csv(serial) == sweep_to_csv(parallel)


def test_sweep_csv_format():
    result = gamma_sweep(load_pts("rptsnonas.lvs"), [Fraction(0), Fraction(1, 2)])
    assert sweep_to_csv(result).splitlines() == [
        "gamma,x0,x1,x2",
        "0,0,1,0",
        "1/2,1/5,1,0",
        "sup,1/5,1,0",
    ]


def main():
    """Main function"""
    print("🚀 Probabilistic Reachability Test")
    print("=" * 60)
    tests = [
        test_exact_reach_values,
        test_exact_reach_is_a_fixed_point,
        test_empty_accepting_set,
        test_bounded_approximants,
        test_hitting_times,
        test_discounted_closed_form,
        test_discounted_at_zero_is_the_indicator,
        test_discounted_example_value,
        test_discount_factor_range,
        test_default_sweep_converges,
        test_ladder_sweep_converges,
        test_ladder_hitting_times,
        test_sweep_is_deterministic_across_workers,
        test_sweep_csv_format,
    ]
    failures = 0
    for test in tests:
        try:
            test()
            print(f"   ✅ {test.__name__}")
        except AssertionError as e:
            failures += 1
            print(f"   ❌ {test.__name__}: {e}")

    if failures == 0:
        print("\n🎉 All reachability tests passed!")
    else:
        print(f"\n❌ {failures} reachability tests failed.")
    return failures == 0


if __name__ == "__main__":
    main()
