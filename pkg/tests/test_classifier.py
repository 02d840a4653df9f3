import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvstab.classifier import (
    RegionGrid,
    Status,
    StabilityVerdict,
    catalog,
    check_catalog,
    classify,
    classify_warped,
    factor_ric_stability,
    region_product,
    region_scan,
)
from curvstab.spectral_forms import (
    ConformalScale,
    EinsteinFactor,
    FactorTT,
    FunctionalId,
    MixedTT,
    ProductSpace,
    TriState,
    hessian,
    opposite_threshold,
)

RIC = FunctionalId.ric()


def sphere_hyp(n, m, ratio):
    """S^n rescaled to lambda = m - 1 times H^m with mu/(m-1) = ratio."""
    return region_product(RIC, n, m, ratio)


def test_factor_rule_examples():
    assert factor_ric_stability(EinsteinFactor.hyperbolic(4)) is TriState.YES
    assert factor_ric_stability(EinsteinFactor.hyperbolic(6, 3.0)) is TriState.NO
    assert factor_ric_stability(EinsteinFactor.sphere(7)) is TriState.YES
    assert factor_ric_stability(EinsteinFactor.hyperbolic(6)) is TriState.UNKNOWN


def test_warped_examples():
    assert classify_warped(ProductSpace.of(EinsteinFactor.sphere(3), EinsteinFactor.sphere(3))).status is Status.STABLE
    assert classify_warped(sphere_hyp(5, 5, 2.5)).status is Status.STABLE
    v = classify_warped(sphere_hyp(5, 5, 1.0))
    assert v.status is Status.UNSTABLE
    (w,) = v.witnesses
    assert isinstance(w.direction, ConformalScale)
    assert (w.direction.source_factor, w.direction.target_factor) == (1, 0)
    assert w.value < 0


def test_warped_reports_non_critical():
    v = classify_warped(ProductSpace.of(EinsteinFactor.sphere(3), EinsteinFactor.sphere(5)))
    assert v.status is Status.NOT_CRITICAL


def test_warped_auto_rescale():
    p = ProductSpace.of(EinsteinFactor.sphere(3), EinsteinFactor.sphere(3, 2.0))
    assert classify_warped(p, auto_rescale=True).status is Status.STABLE


def test_classify_examples():
    p = ProductSpace.of(EinsteinFactor.sphere(3, math.sqrt(2.0 / 3.0)), EinsteinFactor.hyperbolic(4, 4.5))
    v = classify(RIC, p)
    assert v.status is Status.STABLE
    assert any(a.provenance == "known-case table" for a in v.assumptions)
    ft = ProductSpace.of(
        EinsteinFactor.abstract(3, 1.0, ft_stable={"*": "yes"}, ric_stable="yes"),
        EinsteinFactor.abstract(3, -1.0, ft_stable={"*": "yes"}, ric_stable="yes"))
    assert classify(FunctionalId.ft(-0.2), ft).status is Status.STABLE
    r = classify(FunctionalId.riem(), ProductSpace.of(EinsteinFactor.sphere(6), EinsteinFactor.hyperbolic(6, 3.0)))
    assert r.status is Status.UNSTABLE


def test_five_five_assumptions_list_factor_rule():
    v = classify(RIC, ProductSpace.of(EinsteinFactor.sphere(5), EinsteinFactor.hyperbolic(5, 10.0)))
    assert v.status is Status.STABLE
    facts = " | ".join(a.fact for a in v.assumptions)
    assert "hyperbolic dim 5" in facts


def test_missing_mu_is_indeterminate():
    v = classify(RIC, ProductSpace.of(EinsteinFactor.sphere(5), EinsteinFactor.hyperbolic(5)))
    assert v.status is Status.INDETERMINATE and v.missing


def test_verdict_invariants_enforced():
    with pytest.raises(ValueError):
        StabilityVerdict(Status.UNSTABLE)
    with pytest.raises(ValueError):
        StabilityVerdict(Status.STABLE, witnesses=(object(),))


def test_ric_sweep_flips_at_threshold():
    T = max(2 * (5 - 4) / 5, opposite_threshold(5))
    ratios = np.linspace(0.5, 3.0, 11)
    statuses = [classify(RIC, sphere_hyp(5, 5, r)).status for r in ratios]
    for r, s in zip(ratios, statuses):
        assert s is (Status.STABLE if r > T else Status.UNSTABLE)
    assert classify(RIC, sphere_hyp(5, 5, T)).status is Status.MARGINAL


def test_ft_region_scan_n3():
    rows = region_scan(FunctionalId.ft(0.0), RegionGrid((3,), (3,), t=(-0.4, -1 / 3, -0.33, 0.0)))
    assert [r.status for r in rows] == ["Unstable", "Unstable", "Stable", "Stable"]


def test_ft_small_mu_contradicts_unconditional_n3_claim():
    # for n = 3 and t in (-1/3, -7/48) the exact discriminant is positive, so small mu fails
    rows = region_scan(FunctionalId.ft(0.0), RegionGrid((3,), (3,), mu_ratio=(0.3,), t=(-0.3,)))
    assert rows[0].status == "Unstable"


def test_region_scan_order_and_empty_grid():
    rows = region_scan(RIC, RegionGrid((5,), (5,), mu_ratio=tuple(np.arange(0.5, 3.01, 0.5))))
    assert [r.mu_ratio for r in rows] == list(np.arange(0.5, 3.01, 0.5))
    assert [r.status for r in rows] == ["Unstable"] * 2 + ["Stable"] * 4
    assert region_scan(RIC, RegionGrid((), ())) == []


def test_region_scan_errors_become_cells():
    rows = region_scan(RIC, RegionGrid((5,), (5,), mu_ratio=(-1.0,)))
    assert rows[0].status.startswith("Error:")


def test_catalog_contents_and_cross_check():
    entries = catalog()
    assert len(entries) == 9
    assert sum(e.expected is Status.STABLE for e in entries) == 7
    for entry, observed in check_catalog():
        assert observed and all(s is entry.expected for s in observed), entry.item


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 10), st.integers(3, 10), st.floats(0.05, 4.0), st.floats(0.01, 2.0))
def test_monotone_in_mu(n, m, ratio, step):
    a = classify(RIC, sphere_hyp(n, m, ratio)).status
    b = classify(RIC, sphere_hyp(n, m, ratio + step)).status
    if a is Status.STABLE:
        assert b is Status.STABLE


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 10), st.integers(3, 10), st.floats(0.05, 4.0), st.floats(-1.0, 1.0))
def test_witness_soundness(n, m, ratio, t):
    for functional, product in ((RIC, sphere_hyp(n, m, ratio)),
                                (FunctionalId.ft(t), region_product(FunctionalId.ft(t), n, m, ratio))):
        v = classify(functional, product)
        if v.status is not Status.UNSTABLE:
            continue
        for w in v.witnesses:
            if isinstance(w.direction, FactorTT):
                assert w.value == -math.inf
            assert hessian(functional, product, w.direction).value < 0
