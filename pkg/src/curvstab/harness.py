"""Closed forms against numerical oracles, plus algebraic identity suites.

A case pairs a closed-form prediction with an oracle value carrying an error
estimate.  Verdict ladder: *Confirmed* when the relative discrepancy is at most
``max(1e-5, 10 x relative oracle error)``, *Refuted* when it exceeds 100x that
bound, *Inconclusive* in between.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import FitIllConditioned, ModelUnavailable
from .geometry.curvature import invariants
from .geometry.functionals import fd_first_derivative, fd_rcheck_pairing, fd_second_variation
from .geometry.models import (
    ConformalPerturbation,
    FactorScaling,
    LieGroupModel,
    MixedTTPerturbation,
    ProductSpheres,
    hyperbolic_product,
)
from .spectral_forms import (
    ConformalScale,
    EinsteinFactor,
    FunctionalId,
    MixedTT,
    ProductSpace,
    composition_value,
    conformal_terms,
    hessian_conformal,
    hessian_mixed_tt,
    lemma_term,
)

CONFIRM_FLOOR = 1e-5


class Verdict(str, Enum):
    CONFIRMED = "Confirmed"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class VerificationReport:
    case_id: str
    predicted: float
    predicted_source: str
    oracle: float
    oracle_error: float
    discrepancy: float
    verdict: Verdict
    notes: tuple[str, ...] = ()

    @classmethod
    def compare(cls, case_id: str, predicted: float, source: str, oracle: float,
                oracle_error: float, notes=(), scale: float = 1.0) -> "VerificationReport":
        denom = max(abs(predicted), abs(oracle), scale)
        discrepancy = abs(predicted - oracle) / denom
        bound = max(CONFIRM_FLOOR, 10.0 * oracle_error / denom)
        if discrepancy <= bound:
            verdict = Verdict.CONFIRMED
        elif discrepancy > 100.0 * bound:
            verdict = Verdict.REFUTED
        else:
            verdict = Verdict.INCONCLUSIVE
        return cls(case_id, float(predicted), source, float(oracle), float(oracle_error),
                   float(discrepancy), verdict, tuple(notes))


# -- spectral data of the oracle models ----------------------------------------------


def sphere_product_space(dims, radii) -> ProductSpace:
    return ProductSpace.of(*[EinsteinFactor.sphere(n, r) for n, r in zip(dims, radii)])


def _conformal_case(case_id: str, functional: FunctionalId, dims=(3, 3), radii=(1.0, 1.0),
                    source: int = 0, target: int = 1) -> VerificationReport:
    model = ProductSpheres.of(dims, radii, ConformalPerturbation(source, target))
    product = sphere_product_space(dims, radii)
    report = hessian_conformal(functional, product, ConformalScale(source, target, model.eigenvalue()))
    fd = fd_second_variation(functional, model)
    return VerificationReport.compare(
        case_id, report.value, report.source, fd.value, fd.error,
        notes=(f"f on factor {source} (mu = {model.eigenvalue():.17g}) scaling factor {target}",
               f"finite-difference step {fd.step:.6g}, {fd.nodes} quadrature nodes"))


def _su2_model(radii=(1.0, 1.0)) -> LieGroupModel:
    return LieGroupModel.su2_product(radii, MixedTTPerturbation(0, 3))


def _killing_direction(radius: float = 1.0) -> float:
    """Hodge eigenvalue of a unit Killing 1-form on S^3(radius): 2 lambda = 4/radius^2."""
    return 4.0 / radius**2


FIRST_DISPLAY = "mixed TT Ric form, equal case: Q + 8 lambda^2 - 5 lambda (nu0 + nu1)"
ALT_LINE = ("alternative line in the same derivation: ||D*D a0||^2 + ||D*D a1||^2 "
            "- lambda(||D a0||^2 + ||D a1||^2) + 12 lambda^2")


def case_ric_mixedtt() -> VerificationReport:
    product = sphere_product_space((3, 3), (1.0, 1.0))
    nu = _killing_direction()
    report = hessian_mixed_tt(FunctionalId.ric(), product, MixedTT(nu, nu))
    fd = fd_second_variation(FunctionalId.ric(), _su2_model())
    return VerificationReport.compare(
        "ric_mixedtt_su2su2", report.value, FIRST_DISPLAY, fd.value, fd.error,
        notes=(f"anchor A: {FIRST_DISPLAY}", f"anchor B: {ALT_LINE}",
               "direction: symmetrized product of unit left-invariant coframe elements on the two factors"))


def case_ric_mixedtt_alt() -> VerificationReport:
    lam, nu = 2.0, _killing_direction()
    rough_sq = (nu - lam) ** 2   # D*D a = (nu - lambda) a for an eigenform
    grad_sq = nu - lam           # ||D a||^2 = nu - lambda
    predicted = 2 * rough_sq - 2 * lam * grad_sq + 12 * lam**2
    fd = fd_second_variation(FunctionalId.ric(), _su2_model())
    return VerificationReport.compare(
        "ric_mixedtt_su2su2_alt", predicted, ALT_LINE, fd.value, fd.error,
        notes=(f"anchor A: {FIRST_DISPLAY}", f"anchor B: {ALT_LINE}"))


def case_s_mixedtt() -> VerificationReport:
    product = sphere_product_space((3, 3), (1.0, 1.0))
    nu = _killing_direction()
    report = hessian_mixed_tt(FunctionalId.s(), product, MixedTT(nu, nu))
    fd = fd_second_variation(FunctionalId.s(), _su2_model())
    return VerificationReport.compare("s_mixedtt_su2su2", report.value, report.source, fd.value, fd.error)


def _rcheck_case(case_id: str, variant: str) -> VerificationReport:
    product = sphere_product_space((3, 3), (1.0, 1.0))
    nu = _killing_direction()
    predicted = lemma_term("RcheckPrime", MixedTT(nu, nu), product, variant=variant)
    fd = fd_rcheck_pairing(_su2_model())
    label = {"generic": "generic-curvature intermediate: 2(||D a0||^2 - ||D a1||^2) - 2 lambda_0 + 2 lambda_1",
             "stated": "curvature +-1 form: 2 nu0 - 2 nu1 - 4(n0 + n1 - 2)"}[variant]
    other = "stated" if variant == "generic" else "generic"
    return VerificationReport.compare(
        case_id, predicted, label, fd.value, fd.error,
        notes=(f"anchor A: {label}",
               f"anchor B: {other} form = {lemma_term('RcheckPrime', MixedTT(nu, nu), product, variant=other):.17g}",
               "oracle: pointwise amplitude derivative of Rcheck paired with h, times the volume"))


def case_w2_pointwise(dims=(3, 3), points: int = 20, seed: int = 0) -> VerificationReport:
    chart = hyperbolic_product(*dims)
    rng = np.random.default_rng(seed)
    worst, scale = 0.0, 0.0
    for _ in range(points):
        b = chart.curvature_at(chart.sample_point(rng))
        inv = invariants(b)
        n = b.dim
        raw = inv.riemann_sq - 4.0 / (n - 2) * (inv.ricci_sq - inv.scalar**2 / (2.0 * (n - 1)))
        worst = max(worst, abs(raw))
        scale = max(scale, inv.riemann_sq)
    return VerificationReport.compare(
        f"w2_pointwise_product_chart_{dims[0]}_{dims[1]}", 0.0, "conformal flatness of S^k x H^m",
        worst, 0.0, notes=(f"max |W|^2 over {points} random chart points, |R|^2 = {scale:.6g}",),
        scale=scale)


def case_r_conformal_composition() -> VerificationReport:
    product = sphere_product_space((3, 3), (1.0, 1.0))
    direction = ConformalScale(0, 1, 3.0)
    predicted = composition_value(FunctionalId.riem(), product, direction)
    fd = fd_second_variation(FunctionalId.riem(), ProductSpheres.of((3, 3), None, ConformalPerturbation(0, 1)))
    labels = ", ".join(t.label for t in conformal_terms(FunctionalId.riem(), product, direction))
    return VerificationReport.compare(
        "r_conformal_s3s3_composition", predicted, f"operator composition ({labels})", fd.value, fd.error,
        notes=("diagnostic: full-curvature closed form is tabulated only at S^n x H^n; "
               "this checks its building blocks at a constructible product",))


def case_r_mixedtt_composition() -> VerificationReport:
    product = sphere_product_space((3, 3), (1.0, 1.0))
    nu = _killing_direction()
    predicted = composition_value(FunctionalId.riem(), product, MixedTT(nu, nu))
    fd = fd_second_variation(FunctionalId.riem(), _su2_model())
    return VerificationReport.compare(
        "r_mixedtt_su2su2_composition", predicted,
        "operator composition: 2 DeltaDdDr - 2 RcheckPrime(curvature +-1 form) + VolumeConstraint",
        fd.value, fd.error,
        notes=("anchor A: curl-curl pairing for mixed directions", "anchor B: RcheckPrime curvature +-1 form",
               "diagnostic only: the tabulated mixed full-curvature form assumes S^n x H^n"))


def _unavailable(name: str) -> Callable[[], VerificationReport]:
    def run() -> VerificationReport:
        raise ModelUnavailable(f"{name}: compact hyperbolic quotients have no global model here")
    return run


CASES: dict[str, Callable[[], VerificationReport]] = {
    "ric_conformal_s3s3": lambda: _conformal_case("ric_conformal_s3s3", FunctionalId.ric()),
    "ric_conformal_s3s3_swapped": lambda: _conformal_case(
        "ric_conformal_s3s3_swapped", FunctionalId.ric(), source=1, target=0),
    "s_conformal_s3s3": lambda: _conformal_case("s_conformal_s3s3", FunctionalId.s()),
    **{f"ft_conformal_s3s3(t={t!r})": (lambda t=t: _conformal_case(
        f"ft_conformal_s3s3(t={t!r})", FunctionalId.ft(t))) for t in (-0.5, 0.25, 1.0)},
    "ric_conformal_s3s5": lambda: _conformal_case(
        "ric_conformal_s3s5", FunctionalId.ric(), (3, 5), (1.0, math.sqrt(2.0)), 0, 1),
    "ric_conformal_s5s3": lambda: _conformal_case(
        "ric_conformal_s5s3", FunctionalId.ric(), (3, 5), (1.0, math.sqrt(2.0)), 1, 0),
    "s_conformal_s3s5": lambda: _conformal_case(
        "s_conformal_s3s5", FunctionalId.s(), (3, 5), (1.0, math.sqrt(2.0)), 0, 1),
    "s_conformal_s5s3": lambda: _conformal_case(
        "s_conformal_s5s3", FunctionalId.s(), (3, 5), (1.0, math.sqrt(2.0)), 1, 0),
    "ric_mixedtt_su2su2": case_ric_mixedtt,
    "ric_mixedtt_su2su2_alt": case_ric_mixedtt_alt,
    "s_mixedtt_su2su2": case_s_mixedtt,
    "rcheck_mixedtt_su2su2": lambda: _rcheck_case("rcheck_mixedtt_su2su2", "generic"),
    "rcheck_mixedtt_su2su2_stated": lambda: _rcheck_case("rcheck_mixedtt_su2su2_stated", "stated"),
    "w2_pointwise_product_chart": lambda: case_w2_pointwise((3, 3)),
    "w2_pointwise_product_chart_s4h3": lambda: case_w2_pointwise((4, 3)),
    "r_conformal_s3s3_composition": case_r_conformal_composition,
    "r_mixedtt_su2su2_composition": case_r_mixedtt_composition,
}

UNAVAILABLE = {
    "ric_conformal_s3h3": _unavailable("ric_conformal_s3h3"),
    "ric_mixedtt_s3h3": _unavailable("ric_mixedtt_s3h3"),
}


def case_ids() -> list[str]:
    return list(CASES)


def verify_case(case_id: str) -> VerificationReport:
    if case_id in UNAVAILABLE:
        return UNAVAILABLE[case_id]()
    try:
        run = CASES[case_id]
    except KeyError:
        raise KeyError(f"unknown verification case {case_id!r}") from None
    return run()


def verify_all() -> list[VerificationReport]:
    return [verify_case(c) for c in CASES]


# -- continuation in the Einstein constants --------------------------------------------

MONOMIALS = ("mu^2", "mu*lamA", "mu*lamB", "lamA^2", "lamA*lamB", "lamB^2")


def predicted_coefficients(functional: FunctionalId, nA: int, nB: int) -> np.ndarray:
    """Coefficients of the operator composition in :data:`MONOMIALS` (f on A scaling B)."""
    # the composition is a quadratic form in (mu, lamA, lamB): recover it by exact probing
    # at points above the Lichnerowicz bound (abstract factors carry no other constraint)
    rng = np.random.default_rng(12345)
    rows, vals = [], []
    for _ in range(12):
        la, lb = rng.uniform(-2.0, 2.0, size=2)
        mu = max(nA * la / (nA - 1), 0.0) + rng.uniform(0.5, 4.0)
        product = ProductSpace.of(EinsteinFactor.abstract(nA, la), EinsteinFactor.abstract(nB, lb))
        rows.append(_monomials(mu, la, lb))
        vals.append(composition_value(functional, product, ConformalScale(0, 1, mu)))
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(vals), rcond=None)
    return coef


def _monomials(mu, la, lb):
    return [mu * mu, mu * la, mu * lb, la * la, la * lb, lb * lb]


@dataclass
class ContinuationData:
    rows: list[list[float]] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _radius_sweep_data(functional: FunctionalId, dims, radius_pairs, degrees) -> ContinuationData:
    data = ContinuationData()
    nA, nB = dims
    for r0, r1 in radius_pairs:
        scaling = ProductSpheres.of(dims, (r0, r1), FactorScaling(1))
        vol = scaling.reference_volume
        grad = fd_first_derivative(functional, scaling) / (nB * vol)
        predicted_grad = _gradient_coefficient(functional, dims, (r0, r1))
        data.notes.append(f"radii ({r0}, {r1}): measured gradient coefficient {grad:.10g} "
                          f"(closed form {predicted_grad:.10g})")
        for k in degrees:
            model = ProductSpheres.of(dims, (r0, r1), ConformalPerturbation(0, 1, degree=k))
            fd = fd_second_variation(functional, model, check_critical=False)
            # away from criticality the constraint contributes c_B n_B (n_B/2 - 2) ||f||^2
            value = fd.value - grad * nB * (nB / 2.0 - 2.0)
            mu = model.eigenvalue()
            data.rows.append(_monomials(mu, (nA - 1) / r0**2, (nB - 1) / r1**2))
            data.values.append(value)
            data.errors.append(fd.error)
    return data


def _gradient_coefficient(functional, dims, radii) -> float:
    from .spectral_forms import gradient_coefficients
    product = sphere_product_space(dims, radii)
    c = gradient_coefficients(functional, product)
    return c[1]


def fit_continuation(functional: FunctionalId, dims=(3, 3),
                     radius_pairs=((1.0, 1.3), (1.3, 1.7), (1.7, 1.0)),
                     degrees=(1, 2, 3), min_separation: float = 1e-3) -> list[VerificationReport]:
    """Fit oracle values at several radii to the monomials of the closed form and compare."""
    ratios = sorted(r1 / r0 for r0, r1 in radius_pairs)
    if len(ratios) < 3 or min(b - a for a, b in zip(ratios, ratios[1:])) < min_separation \
            or any(abs(r - 1.0) < min_separation for r in ratios):
        raise FitIllConditioned("radius pairs must give >= 3 well separated, non-equal radius ratios")
    data = _radius_sweep_data(functional, dims, radius_pairs, degrees)
    A, y = np.array(data.rows), np.array(data.values)
    if np.linalg.cond(A) > 1e10:
        raise FitIllConditioned(f"design matrix condition number {np.linalg.cond(A):.3g}")
    fitted, *_ = np.linalg.lstsq(A, y, rcond=None)
    # propagate the stencil error bound through the pseudo-inverse
    pinv = np.linalg.pinv(A)
    fit_err = np.abs(pinv) @ np.array(data.errors)
    predicted = predicted_coefficients(functional, *dims)
    scale = max(np.abs(predicted).max(), 1.0)
    name = str(functional).lower()
    return [VerificationReport.compare(
        f"continuation_{name}[{mono}]", p, "operator composition, general Einstein constants",
        f, e, notes=tuple(data.notes), scale=scale)
        for mono, p, f, e in zip(MONOMIALS, predicted, fitted, fit_err)]


def continuation_suite(functionals=None, **kw) -> list[VerificationReport]:
    """Ric and S conformal Hessians over a radius sweep (negative constants by continuation)."""
    functionals = functionals or (FunctionalId.ric(), FunctionalId.s())
    out = []
    for f in functionals:
        out.extend(fit_continuation(f, **kw))
    return out


# -- identity suites -----------------------------------------------------------------


def _identity(case_id: str, lhs: float, rhs: float, source: str, scale: float) -> VerificationReport:
    return VerificationReport.compare(case_id, lhs, source, rhs, 0.0, scale=scale)


def _random_critical_product(rng) -> tuple[ProductSpace, str]:
    if rng.random() < 0.5:
        lam = rng.uniform(0.2, 5.0)
        n0, n1 = rng.integers(3, 13, size=2)
        return ProductSpace.of(EinsteinFactor.abstract(int(n0), lam), EinsteinFactor.abstract(int(n1), lam)), "equal"
    lam = rng.uniform(0.2, 5.0)
    n = int(rng.integers(3, 13))
    signs = (1.0, -1.0) if rng.random() < 0.5 else (-1.0, 1.0)
    return ProductSpace.of(EinsteinFactor.abstract(n, signs[0] * lam),
                           EinsteinFactor.abstract(n, signs[1] * lam)), "opposite"


def _random_direction(rng, product: ProductSpace):
    if rng.random() < 0.5:
        a = int(rng.integers(0, 2))
        f = product.factors[a]
        lam = f.einstein_const
        low = f.dim * lam / (f.dim - 1) if lam > 0 else 0.0
        return ConformalScale(a, 1 - a, low + rng.uniform(0.01, 20.0))
    nus = [_oneform_floor(f) + rng.uniform(0.01, 20.0) for f in product.factors]
    extra = rng.uniform(0.0, 5.0, size=2)
    return MixedTT(nus[0], nus[1], nus[0] ** 2 + extra[0], nus[1] ** 2 + extra[1])


def _oneform_floor(f: EinsteinFactor) -> float:
    return max(2.0 * f.einstein_const, f.mu_oneform or 0.0, 0.0)


def _hess(functional, product, direction):
    if isinstance(direction, ConformalScale):
        return hessian_conformal(functional, product, direction)
    return hessian_mixed_tt(functional, product, direction)


def additivity_suite(samples: int = 100, seed: int = 0) -> list[VerificationReport]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(samples):
        product, case = _random_critical_product(rng)
        direction = _random_direction(rng, product)
        t = float(rng.uniform(-2.0, 2.0))
        ft = _hess(FunctionalId.ft(t), product, direction)
        ric = _hess(FunctionalId.ric(), product, direction)
        s = _hess(FunctionalId.s(), product, direction)
        scale = max(ft.scale, ric.scale, abs(t) * s.scale)
        out.append(_identity(f"additivity[{i}]", ft.value, ric.value + t * s.value,
                             f"Ft(t) vs Ric + t S, {case} case, {type(direction).__name__}", scale))
    return out


def _random_space_form_product(rng) -> ProductSpace:
    n0 = int(rng.integers(3, 10))
    n1 = int(rng.integers(3, 10)) if rng.random() < 0.85 else 1
    sphere = EinsteinFactor.sphere(n0)
    other = EinsteinFactor.circle() if n1 == 1 else EinsteinFactor.space_form(n1, -1.0)
    return ProductSpace.of(sphere, other) if rng.random() < 0.5 else ProductSpace.of(other, sphere)


def weyl_suite(samples: int = 100, seed: int = 1) -> list[VerificationReport]:
    """Both Weyl decompositions on curvature +-1 products, mixed TT directions."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(samples):
        product = _random_space_form_product(rng)
        nus = [_oneform_floor(f) + rng.uniform(0.01, 20.0) for f in product.factors]
        extra = rng.uniform(0.0, 5.0, size=2)
        d = MixedTT(nus[0], nus[1], nus[0] ** 2 + extra[0], nus[1] ** 2 + extra[1])
        N = product.total_dim
        w2 = hessian_mixed_tt(FunctionalId.w2(), product, d)
        r = hessian_mixed_tt(FunctionalId.riem(), product, d)
        ric = composition_value(FunctionalId.ric(), product, d)
        s = composition_value(FunctionalId.s(), product, d)
        t0 = -1.0 / (2.0 * (N - 1))
        ft0 = composition_value(FunctionalId.ft(t0), product, d)
        scale = max(w2.scale, r.scale, abs(ric), abs(s))
        rhs1 = r.value - 4.0 / (N - 2) * (ric - s / (2.0 * (N - 1)))
        out.append(_identity(f"weyl_decomposition[{i}]", w2.value, rhs1,
                             f"W2 form vs R - 4/(n-2)(Ric - S/(2(n-1))), dims {product.dims}", scale))
        rhs2 = w2.value + 4.0 / (N - 2) * ft0
        out.append(_identity(f"weyl_ft_decomposition[{i}]", r.value, rhs2,
                             f"R form vs W2 + 4/(n-2) F_t0, t0 = {t0:.17g}, dims {product.dims}", scale))
    return out


def consistency_suite(samples: int = 100, seed: int = 0) -> list[VerificationReport]:
    return additivity_suite(samples, seed) + weyl_suite(samples, seed + 1)
