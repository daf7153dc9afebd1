#!/usr/bin/env python3
"""
Test Supermartingale Certificates

This script checks the additive, multiplicative, distribution-valued and
discounted certificates on the worked example systems, together with the
dominance and multiplicative-to-additive conversion results.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add the current directory to Python path
sys.path.append(str(Path(__file__).parent))

from corank.errors import CertificateInvalidError, CoverageError, HorizonError, ValueBelowFloorError
from corank.model_io import parse_certificate, parse_model
from corank.pts import (
    INF,
    AdditiveCert,
    DistCert,
    MultiplicativeCert,
    NonCountingCert,
    PtsCoalgebra,
    TailSpec,
    additive_fixed_witnesses,
    additive_step,
    branching_ladder,
    check_additive,
    check_distribution_ranking,
    check_multiplicative,
    check_noncounting,
    convert_multiplicative,
    ladder_distribution_cert,
    ladder_noncounting_cert,
    multiplicative_fixed_witnesses,
    multiplicative_step,
    synthesize_hitting_distribution,
    two_fixed_point_pts,
    verify_additive_dominates,
)
from corank.pts.tails import GeoTail
from corank.reports import Verdict

FIXTURES = Path(__file__).parent / "data" / "fixtures"


def load_pts(name: str) -> PtsCoalgebra:
    return parse_model((FIXTURES / name).read_text()).body


def load_cert(name: str):
    return parse_certificate((FIXTURES / name).read_text()).certificate


def test_additive_certificate_on_example():
    report = check_additive(load_pts("ex2_8.lvs"), load_cert("ex2_11.crt"))
    assert report.verdict == Verdict.PASS
    assert report.bound == {"x0": 0, "x1": 1, "x2": 1, "x3": 0}


def test_additive_violation_is_reported():
    pts = load_pts("ex2_8.lvs")
    cert = AdditiveCert(Fraction(1), {"x0": INF, "x1": Fraction(1), "x2": 0, "x3": INF})
    report = check_additive(pts, cert)
    assert report.verdict == Verdict.FAIL
    assert report.violated_states() == ["x1"]
    assert report.violations[0].expected == Fraction(3, 2)


def test_two_additive_fixed_points():
    pts = load_pts("two_fixed_points.lvs")
    finite = check_additive(pts, load_cert("two_fixed_b1.crt"))
    partial = check_additive(pts, load_cert("two_fixed_b2.crt"))
    assert finite.passed and partial.passed
    assert set(finite.bound.values()) == {1}
    assert partial.bound == {"x0": 0, "x1": 0, "x2": 1, "x3": 1}


def test_additive_witnesses_are_exact_fixed_points():
    pts = two_fixed_point_pts()
    for epsilon in (Fraction(1), Fraction(1, 2), Fraction(3)):
        for cert in additive_fixed_witnesses(epsilon):
            table = additive_step(pts, epsilon)(cert.values)
            assert table.to_dict() == cert.values
            assert check_additive(pts, cert).passed


def test_multiplicative_certificate_on_example():
    pts = load_pts("two_fixed_points.lvs")
    assert check_multiplicative(pts, load_cert("two_fixed_mult.crt")).verdict == Verdict.PASS


def test_multiplicative_witnesses_are_exact_fixed_points():
    pts = two_fixed_point_pts()
    for alpha in (Fraction(3, 4), Fraction(9, 10)):
        for cert in multiplicative_fixed_witnesses(alpha, Fraction(1)):
            table = multiplicative_step(pts, alpha, Fraction(1))(cert.values)
            assert table.to_dict() == cert.values
            assert check_multiplicative(pts, cert).passed
    with pytest.raises(ValueError):
        multiplicative_fixed_witnesses(Fraction(1, 2), Fraction(1))


def test_multiplicative_floor_is_enforced():
    pts = two_fixed_point_pts()
    cert = MultiplicativeCert(Fraction(3, 4), Fraction(1), {
        "x0": Fraction(5, 3), "x1": Fraction(3, 2), "x2": Fraction(1, 2), "x3": Fraction(3, 4),
    })
    report = check_multiplicative(pts, cert)
    assert report.verdict == Verdict.FAIL
    assert any(v.reason == "below-delta" and v.state == "x2" for v in report.violations)
    with pytest.raises(ValueBelowFloorError):
        convert_multiplicative(pts, cert, Fraction(1))


def test_certificate_parameters_are_validated():
    with pytest.raises(CertificateInvalidError):
        AdditiveCert(Fraction(0), {})
    with pytest.raises(CertificateInvalidError):
        MultiplicativeCert(Fraction(1), Fraction(1), {})
    with pytest.raises(CertificateInvalidError):
        NonCountingCert(Fraction(1, 2), {"x0": Fraction(3, 2)})
    with pytest.raises(CoverageError):
        check_additive(load_pts("ex2_8.lvs"), AdditiveCert(Fraction(1), {"x0": INF}))


def test_noncounting_certificate_on_example():
    pts = load_pts("rptsnonas.lvs")
    report = check_noncounting(pts, load_cert("rptsnonas_ncrank.crt"), with_reference=True)
    assert report.verdict == Verdict.PASS
    assert report.bound["x0"] == Fraction(3, 7)
    assert report.bound["x0"] <= report.reference["x0"]


def test_noncounting_violation():
    pts = load_pts("rptsnonas.lvs")
    cert = NonCountingCert(Fraction(9, 10), {"x0": Fraction(1, 2), "x1": 1, "x2": 0})
    report = check_noncounting(pts, cert)
    assert report.violated_states() == ["x0"]


def test_distribution_certificate_on_example():
    pts = load_pts("rptsnonas.lvs")
    report = check_distribution_ranking(pts, load_cert("rptsnonas_drank.crt"))
    assert report.verdict == Verdict.PASS
    assert report.horizon == 32
    assert report.bound["x0"] == Fraction(1, 2)


def test_distribution_tail_from_zero_fails():
    report = check_distribution_ranking(load_pts("rptsnonas.lvs"), load_cert("rptsnonas_drank_geo0.crt"))
    assert report.verdict == Verdict.FAIL
    assert report.violations[0].state == "x0"
    assert report.violations[0].reason == "a=0"


def test_distribution_all_infinite_passes():
    pts = load_pts("ex2_8.lvs")
    cert = DistCert({s: TailSpec.at_infinity() for s in pts.states}, 16)
    report = check_distribution_ranking(pts, cert)
    assert report.verdict == Verdict.PASS
    assert set(report.bound.values()) == {0}


def test_distribution_horizon_is_validated():
    pts = load_pts("ex2_8.lvs")
    with pytest.raises(HorizonError):
        DistCert({s: TailSpec.at_infinity() for s in pts.states}, 0)
    cert = DistCert({s: TailSpec.at_infinity() for s in pts.states}, 4)
    with pytest.raises(HorizonError):
        check_distribution_ranking(pts, cert, horizon=0)


def test_tail_spec_masses():
    tail = TailSpec(geo=GeoTail(1, Fraction(1, 3), Fraction(1, 3)), inf_mass=Fraction(1, 2))
    assert tail.cdf(-1) == 0 and tail.cdf(0) == 0
    assert tail.cdf(2) == Fraction(1, 3) + Fraction(1, 9)
    assert tail.finite_mass == Fraction(1, 2)
    with pytest.raises(ValueError):
        TailSpec(atoms={0: Fraction(1, 2)})
    with pytest.raises(ValueError):
        GeoTail(0, Fraction(1, 2), Fraction(1))


def test_atoms_stay_below_the_geometric_tail():
    below = TailSpec(atoms={0: Fraction(1, 4)}, geo=GeoTail(1, Fraction(1, 4), Fraction(1, 2)),
                     inf_mass=Fraction(1, 4))
    assert below.cdf(0) == Fraction(1, 4)
    assert below.cdf(1) == Fraction(1, 2)
    for index in (1, 2):
        with pytest.raises(ValueError):
            TailSpec(atoms={index: Fraction(1, 4)}, geo=GeoTail(1, Fraction(1, 4), Fraction(1, 2)),
                     inf_mass=Fraction(1, 4))


def test_synthesized_hitting_distribution():
    for name in ("rptsnonas.lvs", "ex2_8.lvs"):
        pts = load_pts(name)
        values = synthesize_hitting_distribution(pts, 8)
        report = check_distribution_ranking(pts, DistCert(values, 8), with_reference=True)
        assert report.passed
        assert report.verdict == Verdict.VERIFIED_UP_TO_HORIZON
        assert report.bound == report.reference
    spec = synthesize_hitting_distribution(load_pts("rptsnonas.lvs"), 8)["x0"]
    assert spec.atoms[1] == Fraction(1, 3) and spec.atoms[8] == Fraction(1, 3 ** 8)
    assert spec.inf_mass == Fraction(1, 2)


def test_ladder_certificates():
    for k in (1, 2, 3):
        ladder = branching_ladder(k)
        dist = check_distribution_ranking(ladder, ladder_distribution_cert(k, 4))
        assert dist.verdict == Verdict.PASS
        assert dist.bound["x"] == 1 - Fraction(1, 2 ** k)
        gamma = Fraction(9, 10)
        discounted = check_noncounting(ladder, ladder_noncounting_cert(k, gamma))
        assert discounted.passed
        expected = sum((gamma ** (2 ** i) / 2 ** i for i in range(1, k + 1)), Fraction(0))
        assert discounted.bound["x"] == expected


def test_additive_dominates_hitting_time():
    pts = load_pts("ex2_8.lvs")
    report = verify_additive_dominates(pts, load_cert("ex2_11.crt"))
    assert report.passed
    assert report.metadata["scaled_hitting_time"]["x1"] == 2
    for cert in additive_fixed_witnesses(Fraction(1, 2)):
        assert verify_additive_dominates(two_fixed_point_pts(), cert).passed
    bad = AdditiveCert(Fraction(1), {"x0": INF, "x1": Fraction(1), "x2": 0, "x3": INF})
    with pytest.raises(CertificateInvalidError):
        verify_additive_dominates(pts, bad)


def test_conversion_of_the_example_certificate():
    pts = two_fixed_point_pts()
    result = convert_multiplicative(pts, load_cert("two_fixed_mult.crt"), Fraction(1, 2))
    assert result.report.passed
    assert result.additive.values["x3"] == 0
    # b = delta maps to epsilon
    assert result.additive.values["x2"] == Fraction(1, 2)
    assert result.precision_bits == 128


def test_conversion_one_contraction_above_the_floor():
    pts = PtsCoalgebra.build(["u", "v"], {"u": {"v": 1}, "v": {"v": 1}}, ["v"])
    cert = MultiplicativeCert(Fraction(1, 2), Fraction(1), {"u": Fraction(2), "v": Fraction(1, 2)})
    result = convert_multiplicative(pts, cert, Fraction(1, 2))
    assert result.additive.values["u"] == 1
    assert result.report.passed


def test_conversion_keeps_infinite_values():
    pts = two_fixed_point_pts()
    _, infinite = multiplicative_fixed_witnesses(Fraction(3, 4), Fraction(1))
    result = convert_multiplicative(pts, infinite, Fraction(1))
    assert result.additive.values["x0"] == INF and result.additive.values["x1"] == INF
    assert check_additive(pts, result.additive).passed


def main():
    """Main function"""
    print("🚀 Supermartingale Certificate Test")
    print("=" * 60)
    tests = [
        test_additive_certificate_on_example,
        test_additive_violation_is_reported,
        test_two_additive_fixed_points,
        test_additive_witnesses_are_exact_fixed_points,
        test_multiplicative_certificate_on_example,
        test_multiplicative_witnesses_are_exact_fixed_points,
        test_multiplicative_floor_is_enforced,
        test_certificate_parameters_are_validated,
        test_noncounting_certificate_on_example,
        test_noncounting_violation,
        test_distribution_certificate_on_example,
        test_distribution_tail_from_zero_fails,
        test_distribution_all_infinite_passes,
        test_distribution_horizon_is_validated,
        test_tail_spec_masses,
        test_atoms_stay_below_the_geometric_tail,
        test_synthesized_hitting_distribution,
        test_ladder_certificates,
        test_additive_dominates_hitting_time,
        test_conversion_of_the_example_certificate,
        test_conversion_one_contraction_above_the_floor,
        test_conversion_keeps_infinite_values,
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
        print("\n🎉 All certificate tests passed!")
    else:
        print(f"\n❌ {failures} certificate tests failed.")
    return failures == 0


if __name__ == "__main__":
    main()
