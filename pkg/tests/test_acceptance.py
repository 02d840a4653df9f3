"""One test per acceptance criterion, each at its stated tolerance and time budget."""

import math
import time

import numpy as np
import pytest

from curvstab import harness
from curvstab.classifier import Status, catalog, check_catalog, classify, region_product
from curvstab.geometry import (
    ConformalPerturbation,
    LieGroupModel,
    MixedTTPerturbation,
    ProductSpheres,
    fd_first_derivative,
    fd_second_variation,
    hyperbolic_product,
    invariants,
)
from curvstab.harness import Verdict
from curvstab.spectral_forms import (
    NEG_INF,
    EinsteinFactor,
    FunctionalId,
    ProductSpace,
    RicWarped,
    ft_coefficients,
    stability_polynomial,
    threshold_c,
)

RIC, S = FunctionalId.ric(), FunctionalId.s()


def _conclude(record, number, checks, elapsed, budget):
    """``checks`` is a list of ``(ok, description)``; the time budget is one more check."""
    checks = checks + [(elapsed < budget, f"runtime {elapsed:.2f}s < {budget}s")]
    failed = [d for ok, d in checks if not ok]
    detail = "; ".join(failed) if failed else "; ".join(d for _, d in checks)
    record(number, not failed, detail)
    assert not failed, detail


def test_criterion_01_threshold_exactness(record_criterion):
    t0 = time.perf_counter()
    c5 = threshold_c(5)
    p = stability_polynomial(RicWarped(5), 0.5)
    checks = [
        (abs(c5 - 0.5) <= 1e-12, f"c(5) = {c5!r}"),
        (abs(p) <= 1e-12, f"p(5, 0.5) = {p!r}"),
        (threshold_c(3) == NEG_INF and threshold_c(4) == NEG_INF, "c(3), c(4) vacuous"),
    ]
    _conclude(record_criterion, 1, checks, time.perf_counter() - t0, 1.0)


def test_criterion_02_sphere_hyperbolic_flip(record_criterion):
    t0 = time.perf_counter()
    n, m = 5, 5
    T = max(2 * (m - 4) / m, ((n + 2) + math.sqrt(9 * n * n - 20 * n - 28)) / (2 * (n + 1)))
    ratios = np.linspace(0.5, 3.0, 100)
    wrong = []
    for r in ratios:
        st = classify(RIC, region_product(RIC, n, m, float(r))).status
        want = Status.STABLE if r > T else Status.UNSTABLE
        if st is not want:
            wrong.append((float(r), st.value))
    boundary = classify(RIC, region_product(RIC, n, m, T)).status
    checks = [
        (abs(T - 1.4041) < 1e-4, f"threshold {T:.6f}"),
        (not wrong, f"{100 - len(wrong)}/100 sweep points on the correct side" + (f", first wrong {wrong[0]}" if wrong else "")),
        (boundary is Status.MARGINAL, f"boundary status {boundary.value}"),
    ]
    _conclude(record_criterion, 2, checks, time.perf_counter() - t0, 1.0)


def _ft_pair():
    flags = {"*": "yes"}
    return ProductSpace.of(EinsteinFactor.abstract(3, 1.0, ft_stable=flags, ric_stable="yes"),
                           EinsteinFactor.abstract(3, -1.0, ft_stable=flags, ric_stable="yes"))


def test_criterion_03_ft_case_tree_n3(record_criterion):
    t0 = time.perf_counter()
    p = _ft_pair()
    inside = np.linspace(-1 / 3, 1 / 3, 41)[1:-1]
    bad_inside = [float(t) for t in inside if classify(FunctionalId.ft(float(t)), p).status is not Status.STABLE]
    outside = [-1 / 3, -0.34, -0.4, -1.0, -3.0]
    bad_outside = [t for t in outside if classify(FunctionalId.ft(t), p).status is not Status.UNSTABLE]
    D = lambda t: ft_coefficients(3, t)[4]
    root = 7 / 204
    checks = [
        (not bad_inside, f"Stable at {len(inside) - len(bad_inside)}/{len(inside)} sampled t in (-1/3, 1/3)"),
        (not bad_outside, f"Unstable at t <= -1/3 ({len(outside) - len(bad_outside)}/{len(outside)})"),
        (abs(D(root)) <= 1e-12 and D(root - 1e-6) < 0 < D(root + 1e-6), "D(3, t) changes sign at 7/204"),
    ]
    _conclude(record_criterion, 3, checks, time.perf_counter() - t0, 1.0)


def test_criterion_04_conformal_oracle(record_criterion):
    t0 = time.perf_counter()
    model = ProductSpheres.of((3, 3), None, ConformalPerturbation(0, 1))
    ric = fd_second_variation(RIC, model).value
    s = fd_second_variation(S, model).value
    checks = [(abs(ric - 39) <= 1e-4 * 39, f"Ric {ric:.10f} vs 39"),
              (abs(s - 162) <= 1e-4 * 162, f"S {s:.10f} vs 162")]
    for t in (-0.5, 0.25, 1.0):
        v = fd_second_variation(FunctionalId.ft(t), model).value
        want = 39 + 162 * t
        checks.append((abs(v - want) <= 1e-4 * abs(want), f"Ft({t}) {v:.10f} vs {want}"))
    _conclude(record_criterion, 4, checks, time.perf_counter() - t0, 120.0)


def test_criterion_05_mixed_tt_oracle(record_criterion):
    t0 = time.perf_counter()
    model = LieGroupModel.su2_product((1.0, 1.0), MixedTTPerturbation(0, 3))
    fd = fd_second_variation(RIC, model)
    alt = harness.verify_case("ric_mixedtt_su2su2_alt")
    anchors = sum(any(n.startswith(f"anchor {k}") for n in alt.notes) for k in "AB")
    checks = [
        (abs(fd.value - 16) <= 1e-4 * 16, f"finite-difference Ric {fd.value:.3e} vs display 16"),
        (alt.verdict in (Verdict.REFUTED, Verdict.CONFIRMED) and anchors == 2,
         f"alternative line recorded {alt.verdict.value} with {anchors} anchors"),
    ]
    _conclude(record_criterion, 5, checks, time.perf_counter() - t0, 60.0)


def test_criterion_06_continuation(record_criterion):
    t0 = time.perf_counter()
    reports = harness.continuation_suite()
    worst = max(reports, key=lambda r: r.discrepancy)
    checks = [(len(reports) == 12, f"{len(reports)} fitted coefficients"),
              (worst.discrepancy <= 1e-4, f"worst relative discrepancy {worst.discrepancy:.2e} ({worst.case_id})")]
    _conclude(record_criterion, 6, checks, time.perf_counter() - t0, 300.0)


def test_criterion_07_conformal_flatness(record_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for dims in ((3, 3), (4, 3)):
        chart = hyperbolic_product(*dims)
        for _ in range(20):
            worst = max(worst, abs(invariants(chart.curvature_at(chart.sample_point(rng))).weyl_sq))
    w = invariants(LieGroupModel.su2_product().curvature_at()).weyl_sq
    checks = [(worst <= 1e-10, f"max |W|^2 on product charts {worst:.1e}"),
              (abs(w - 9.6) <= 1e-9, f"|W|^2 on unit S3 x S3 = {w!r} vs stated 9.6")]
    _conclude(record_criterion, 7, checks, time.perf_counter() - t0, 10.0)


def test_criterion_08_identity_suites(record_criterion):
    t0 = time.perf_counter()
    add = harness.additivity_suite(100, seed=11)
    weyl = harness.weyl_suite(100, seed=12)
    dec = [r for r in weyl if r.case_id.startswith("weyl_decomposition")]
    ft = [r for r in weyl if r.case_id.startswith("weyl_ft")]
    checks = [(len(x) == 100 and max(r.discrepancy for r in x) <= 1e-12,
               f"{name}: {len(x)} samples, max {max(r.discrepancy for r in x):.1e}")
              for name, x in (("additivity", add), ("Weyl decomposition", dec), ("Weyl/F_t decomposition", ft))]
    _conclude(record_criterion, 8, checks, time.perf_counter() - t0, 5.0)


def test_criterion_09_catalog(record_criterion):
    t0 = time.perf_counter()
    rows = check_catalog()
    bad = [e.item for e, obs in rows if not obs or any(s is not e.expected for s in obs)]
    stable = sum(e.expected is Status.STABLE for e, _ in rows)
    unstable = sum(e.expected is Status.UNSTABLE for e, _ in rows)
    items = {e.item for e in catalog()}
    checks = [(stable == 7 and unstable == 2, f"{stable} stable and {unstable} unstable families"),
              ({"stable-7", "unstable-SH"} <= items, "includes mu > 2(m-1) and the unstable window"),
              (not bad, f"{len(rows) - len(bad)}/{len(rows)} families reproduced" + (f", failing {bad}" if bad else ""))]
    _conclude(record_criterion, 9, checks, time.perf_counter() - t0, 5.0)


def test_criterion_10_criticality(record_criterion):
    t0 = time.perf_counter()
    conformal = ProductSpheres.of((3, 3), None, ConformalPerturbation(0, 1))
    mixed = LieGroupModel.su2_product((1.0, 1.0), MixedTTPerturbation(0, 3))
    worst, where = 0.0, ""
    for f in (RIC, S, FunctionalId.ft(-0.5), FunctionalId.ft(0.25), FunctionalId.riem()):
        for name, model in (("conformal", conformal), ("mixed", mixed)):
            d = abs(fd_first_derivative(f, model))
            if d >= worst:
                worst, where = d, f"{f} {name}"
    checks = [(worst <= 1e-8, f"max |first derivative| {worst:.1e} ({where})")]
    _conclude(record_criterion, 10, checks, time.perf_counter() - t0, 60.0)
