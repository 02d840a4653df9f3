import pytest

from curvstab import harness
from curvstab.errors import FitIllConditioned, ModelUnavailable
from curvstab.harness import Verdict, VerificationReport
from curvstab.spectral_forms import FunctionalId


def test_verdict_ladder():
    assert VerificationReport.compare("a", 1.0, "", 1.0 + 5e-6, 0.0).verdict is Verdict.CONFIRMED
    assert VerificationReport.compare("b", 1.0, "", 1.0 + 5e-4, 0.0).verdict is Verdict.INCONCLUSIVE
    assert VerificationReport.compare("c", 1.0, "", 2.0, 0.0).verdict is Verdict.REFUTED
    # a large oracle error widens the confirmation band
    assert VerificationReport.compare("d", 1.0, "", 1.005, 1e-3).verdict is Verdict.CONFIRMED


@pytest.mark.parametrize("case, expected", [
    ("ric_conformal_s3s3", 39.0),
    ("ric_conformal_s3s3_swapped", 39.0),
    ("s_conformal_s3s3", 162.0),
    ("ric_conformal_s3s5", 100.0),
    ("s_conformal_s5s3", 148.5),
    ("s_mixedtt_su2su2", -96.0),
    ("r_conformal_s3s3_composition", -6.0),
])
def test_confirmed_cases(case, expected):
    r = harness.verify_case(case)
    assert r.predicted == pytest.approx(expected)
    assert r.verdict is Verdict.CONFIRMED, r


def test_mixed_ric_display_refuted_with_both_anchors():
    r = harness.verify_case("ric_mixedtt_su2su2")
    assert r.predicted == pytest.approx(16.0)
    assert abs(r.oracle) < 1e-6
    assert r.verdict is Verdict.REFUTED
    assert any("anchor A" in n for n in r.notes) and any("anchor B" in n for n in r.notes)
    alt = harness.verify_case("ric_mixedtt_su2su2_alt")
    assert alt.predicted == pytest.approx(48.0)
    assert alt.verdict is Verdict.REFUTED


def test_rcheck_pairing_refutes_both_forms():
    for case, pred in (("rcheck_mixedtt_su2su2", 0.0), ("rcheck_mixedtt_su2su2_stated", -16.0)):
        r = harness.verify_case(case)
        assert r.predicted == pytest.approx(pred)
        assert r.oracle == pytest.approx(16.0, rel=1e-6)
        assert r.verdict is Verdict.REFUTED


def test_pointwise_weyl_cases():
    for case in ("w2_pointwise_product_chart", "w2_pointwise_product_chart_s4h3"):
        r = harness.verify_case(case)
        assert r.verdict is Verdict.CONFIRMED
        assert abs(r.oracle) <= 1e-10


def test_unavailable_and_unknown_cases():
    with pytest.raises(ModelUnavailable):
        harness.verify_case("ric_conformal_s3h3")
    with pytest.raises(KeyError):
        harness.verify_case("nope")


def test_cases_are_bitwise_reproducible():
    a = harness.verify_case("ft_conformal_s3s3(t=0.25)")
    b = harness.verify_case("ft_conformal_s3s3(t=0.25)")
    assert a == b


def test_predicted_coefficients_reproduce_unit_values():
    for f, expected in ((FunctionalId.ric(), 39.0), (FunctionalId.s(), 162.0)):
        c = harness.predicted_coefficients(f, 3, 3)
        mono = harness._monomials(3.0, 2.0, 2.0)
        assert sum(a * b for a, b in zip(c, mono)) == pytest.approx(expected)


def test_continuation_rejects_degenerate_radii():
    with pytest.raises(FitIllConditioned):
        harness.fit_continuation(FunctionalId.ric(), radius_pairs=((1.0, 1.0), (1.3, 1.3), (2.0, 2.0)))


def test_consistency_suite_residuals():
    reports = harness.consistency_suite(samples=30, seed=3)
    assert len(reports) == 90
    assert max(r.discrepancy for r in reports) <= 1e-12


def test_every_refuted_case_cites_both_anchors():
    refuted = []
    for case in harness.case_ids():
        r = harness.verify_case(case)
        if r.verdict is Verdict.REFUTED:
            refuted.append(case)
            assert any(n.startswith("anchor A") for n in r.notes), case
            assert any(n.startswith("anchor B") for n in r.notes), case
    assert set(refuted) == {"ric_mixedtt_su2su2", "ric_mixedtt_su2su2_alt", "rcheck_mixedtt_su2su2",
                            "rcheck_mixedtt_su2su2_stated", "r_mixedtt_su2su2_composition"}
