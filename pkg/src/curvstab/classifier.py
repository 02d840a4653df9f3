"""Theorem-level stability verdicts for products of Einstein manifolds.

Verdicts are assembled from the closed-form second variations in
:mod:`spectral_forms`: every negative quadratic-form value found is returned
as a witness, and every fact about an individual factor that a verdict relies
on is recorded together with where it came from.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

from .errors import CurvstabError, InvalidSpectralData
from .spectral_forms import (
    NEG_INF,
    REL_TOL,
    ConformalScale,
    EinsteinFactor,
    FactorKind,
    FactorTT,
    FunctionalId,
    FunctionalKind,
    MixedTT,
    ProductSpace,
    QuadraticFormReport,
    TriState,
    VariationDirection,
    ft_coefficients,
    ft_discriminant,
    hessian_conformal,
    hessian_factor_tt,
    is_critical,
    opposite_threshold,
    threshold_c,
)


class Status(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"
    NOT_CRITICAL = "NotCritical"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class Assumption:
    fact: str
    provenance: str  # "user-supplied", "known-case table", "theorem", "closed form"


@dataclass(frozen=True)
class Witness:
    direction: VariationDirection
    value: float


@dataclass(frozen=True)
class StabilityVerdict:
    status: Status
    witnesses: tuple[Witness, ...] = ()
    assumptions: tuple[Assumption, ...] = ()
    margin: float | None = None
    missing: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.status is Status.UNSTABLE:
            if not self.witnesses or not all(w.value < 0 for w in self.witnesses):
                raise ValueError("an Unstable verdict needs strictly negative witnesses")
        if self.status is Status.STABLE and self.witnesses:
            raise ValueError("a Stable verdict carries no witnesses")


@dataclass
class _Collector:
    """Accumulates evidence while a verdict is being assembled."""

    witnesses: list[Witness] = field(default_factory=list)
    marginal: list[Witness] = field(default_factory=list)
    assumptions: list[Assumption] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    def assume(self, fact: str, provenance: str):
        a = Assumption(fact, provenance)
        if a not in self.assumptions:
            self.assumptions.append(a)

    def record(self, report: QuadraticFormReport):
        value = report.value
        self.values.append(value)
        if math.isinf(value):
            if value < 0:
                self.witnesses.append(Witness(report.direction, value))
            return
        if abs(value) <= REL_TOL * report.scale:
            self.marginal.append(Witness(report.direction, value))
        elif value < 0:
            self.witnesses.append(Witness(report.direction, value))

    def verdict(self, positive_claimed: bool = True) -> StabilityVerdict:
        margin = min(self.values) if self.values else None
        common = dict(assumptions=tuple(self.assumptions), margin=margin,
                      missing=tuple(self.missing), notes=tuple(self.notes))
        if self.witnesses:
            return StabilityVerdict(Status.UNSTABLE, tuple(self.witnesses), **common)
        if self.missing or not positive_claimed:
            return StabilityVerdict(Status.INDETERMINATE, tuple(self.marginal), **common)
        if self.marginal:
            return StabilityVerdict(Status.MARGINAL, tuple(self.marginal), **common)
        return StabilityVerdict(Status.STABLE, (), **common)


def _not_critical(reason: str) -> StabilityVerdict:
    return StabilityVerdict(Status.NOT_CRITICAL, notes=(reason,))


def _indeterminate(reason: str, missing: Iterable[str] = ()) -> StabilityVerdict:
    return StabilityVerdict(Status.INDETERMINATE, missing=tuple(missing), notes=(reason,))


# -- single factors ----------------------------------------------------------------


def _ric_factor_rule(factor: EinsteinFactor) -> tuple[TriState, str, str]:
    """(state, fact, provenance) for the Ric-stability of one factor."""
    kind, n, lam = factor.kind, factor.dim, factor.einstein_const
    hyperbolic = kind is FactorKind.HYPERBOLIC or (
        kind is FactorKind.SPACE_FORM and factor.sectional is not None and factor.sectional < 0)
    if kind is FactorKind.SPHERE or (kind is FactorKind.SPACE_FORM and (factor.sectional or 0) > 0):
        if n >= 3:
            return TriState.YES, f"spherical space form of dim {n} is Ric-stable", "known-case table"
    elif kind is FactorKind.COMPLEX_PROJECTIVE:
        if n >= 4:
            return TriState.YES, f"complex projective space of real dim {n} is Ric-stable", "known-case table"
    elif hyperbolic and n >= 3:
        if n in (3, 4):
            return TriState.YES, f"hyperbolic quotient of dim {n} is Ric-stable", "known-case table"
        bound = 2.0 * (n - 4) / n
        if factor.mu_fn is None:
            return TriState.UNKNOWN, f"hyperbolic quotient of dim {n}: first eigenvalue needed", "known-case table"
        ratio = factor.mu_fn / abs(lam)
        if ratio > bound:
            return TriState.YES, f"hyperbolic dim {n}: mu/|lambda| = {ratio:.17g} > {bound:.17g}", "known-case table"
        return TriState.NO, f"hyperbolic dim {n}: mu/|lambda| = {ratio:.17g} <= {bound:.17g}", "known-case table"
    state = factor.ric_stable
    return state, f"{kind.value} factor of dim {n}: Ric-stability flag '{state.value}'", "user-supplied"


def factor_ric_stability(factor: EinsteinFactor) -> TriState:
    return _ric_factor_rule(factor)[0]


def _consume_factor(col: _Collector, product: ProductSpace, index: int,
                    functional: FunctionalId, state: TriState, fact: str, provenance: str):
    if state is TriState.YES:
        col.assume(fact, provenance)
    elif state is TriState.NO:
        col.assume(fact, provenance)
        # the witness carries its own bound, so feeding it back needs no factor flag
        col.record(hessian_factor_tt(functional, product, FactorTT(index, NEG_INF)))
    else:
        col.missing.append(f"factors[{index}]: stability of the factor for {functional}")


# -- Ric --------------------------------------------------------------------------


def _rescale_for_ric(product: ProductSpace) -> tuple[ProductSpace, str | None]:
    l0, l1 = product.lambdas[:2]
    if l0 == 0 or l1 == 0 or math.isclose(abs(l0), abs(l1), rel_tol=REL_TOL):
        return product, None
    c = abs(l1) / abs(l0)
    f1 = product.factors[1].rescaled(c)
    return ProductSpace((product.factors[0], f1)), f"factor 1 rescaled by {c:.17g} so that |lambda_1| = |lambda_0|"


def _warped_directions(product: ProductSpace) -> list[tuple[int, int]]:
    return [(0, 1), (1, 0)]


def classify_warped(product: ProductSpace, auto_rescale: bool = False) -> StabilityVerdict:
    """Ric restricted to doubly warped product directions ``f g_B``, ``f`` on the other factor."""
    if len(product.factors) != 2:
        return _indeterminate("warped-product criterion is stated for two factors")
    if min(product.dims) < 3:
        return _indeterminate("warped-product criterion needs factor dimensions >= 3")
    notes = []
    if auto_rescale:
        product, note = _rescale_for_ric(product)
        if note:
            notes.append(note)
    l0, l1 = product.lambdas
    if l0 == 0 or l1 == 0:
        return _indeterminate("a Ricci-flat factor admits no normalization")
    if not product.ric_critical():
        return _not_critical("|lambda_0| != |lambda_1|")
    col = _Collector(notes=notes)
    lam = abs(l0)
    equal = math.isclose(l0, l1, rel_tol=REL_TOL)
    for a, b in _warped_directions(product):
        src, tgt = product.factors[a], product.factors[b]
        # which spectral data each sign case needs; missing data only matters if the bound binds
        if equal and l0 > 0:
            col.assume("both Einstein constants positive: warped directions positive by Lichnerowicz", "theorem")
            if src.mu_fn is None:
                continue
            threshold = NEG_INF
        elif equal:
            threshold = threshold_c(tgt.dim)
            col.assume(f"f on factor {a} scaling factor {b}: needs mu_{a}/|lambda| > c({tgt.dim})", "theorem")
        elif tgt.einstein_const > 0:
            threshold = opposite_threshold(tgt.dim)
            col.assume(f"f on factor {a} scaling factor {b}: needs mu_{a}/lambda > T({tgt.dim})", "theorem")
        else:
            threshold = NEG_INF  # f on the positive factor: positive since mu/lambda > 1
        if src.mu_fn is None:
            if threshold == NEG_INF:
                continue
            col.missing.append(f"factors[{a}].mu_fn")
            continue
        report = hessian_conformal(FunctionalId.ric(), product, ConformalScale(a, b, src.mu_fn))
        col.record(report)
        col.notes.append(f"f on factor {a} scaling factor {b}: value {report.value:.17g}"
                         f" (x = {src.mu_fn / lam:.17g}, threshold {threshold:.17g})")
    return col.verdict()


def _classify_ric(product: ProductSpace, auto_rescale: bool) -> StabilityVerdict:
    functional = FunctionalId.ric()
    if len(product.factors) > 2:
        lams = product.lambdas
        if not all(l > 0 for l in lams) or not all(math.isclose(l, lams[0], rel_tol=REL_TOL) for l in lams):
            if product.ric_critical():
                return _indeterminate("multi-factor products are classified only when all Einstein "
                                      "constants are equal and positive")
            return _not_critical("Einstein constants differ in absolute value")
        col = _Collector()
        col.assume("equal positive Einstein constants: iterated pairing keeps each partial product "
                   "Einstein, warped directions positive", "theorem")
        for i, f in enumerate(product.factors):
            if f.dim < 3:
                return _indeterminate("factor dimensions must be >= 3")
            state, fact, prov = _ric_factor_rule(f)
            _consume_factor(col, product, i, functional, state, fact, prov)
        col.assume("mixed TT directions positive", "theorem")
        return col.verdict()

    if auto_rescale:
        product, note = _rescale_for_ric(product)
    else:
        note = None
    if min(product.dims) < 3:
        return _indeterminate("factor dimensions must be >= 3")
    if not product.ric_critical():
        return _not_critical("|lambda_0| != |lambda_1| (use auto-rescale to normalize)")
    warped = classify_warped(product)
    col = _Collector(witnesses=list(warped.witnesses) if warped.status is Status.UNSTABLE else [],
                     marginal=list(warped.witnesses) if warped.status is not Status.UNSTABLE else [],
                     assumptions=list(warped.assumptions), missing=list(warped.missing),
                     notes=([note] if note else []) + list(warped.notes))
    if warped.margin is not None:
        col.values.append(warped.margin)
    for i, f in enumerate(product.factors):
        state, fact, prov = _ric_factor_rule(f)
        _consume_factor(col, product, i, functional, state, fact, prov)
    col.assume("mixed TT directions positive", "theorem")
    return col.verdict()


# -- F_t ---------------------------------------------------------------------------


def _ft_tree_nontrivial(n: int, t: float) -> tuple[bool, bool]:
    """Which eigenvalue conditions the case tree leaves open: (on mu_1, on mu_0).

    Only meaningful for ``t > -(n+1)/(4n)``.  Uses the tabulated discriminant.
    """
    if n == 3:
        return False, False
    t_d = -(9.0 * n * n - 20.0 * n - 28.0) / (4.0 * n * (8.0 * n - 7.0))
    on_mu1 = t >= t_d
    on_mu0 = n >= 5 and t_d <= t < -11.0 / (16.0 * n)
    return on_mu1, on_mu0


def _ray_positive(n: int, t: float, branch: int, x: float) -> bool:
    """Whether ``p_branch > 0`` on the whole ray ``[x, inf)`` (exact discriminant)."""
    a, b0, b1, c, _ = ft_coefficients(n, t)
    b = b0 if branch == 0 else b1
    if a <= 0:
        return False
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return True
    return x > (-b + math.sqrt(disc)) / (2.0 * a)


def _classify_ft_opposite(product: ProductSpace, t: float) -> StabilityVerdict:
    functional = FunctionalId.ft(t)
    pos = 0 if product.lambdas[0] > 0 else 1
    neg = 1 - pos
    n = product.dims[0]
    lam = abs(product.lambdas[0])
    a, b0, b1, c, D = ft_coefficients(n, t)
    col = _Collector()

    # factor-level F_t facts
    blanket = n == 3 and -1.0 / 3.0 < t < 1.0 / 3.0
    for i, f in enumerate(product.factors):
        state = f.ft_stability(t)
        if state is TriState.UNKNOWN and blanket:
            col.assume(f"factor {i}: 3-dimensional Einstein factor is F_t-stable for |t| < 1/3", "known-case table")
            continue
        fact = f"factor {i}: F_t-stability flag '{state.value}' at t = {t!r}"
        _consume_factor(col, product, i, functional, state, fact, "user-supplied")
    col.assume("mixed TT directions positive", "theorem")

    # conformal directions.  branch 0: f on the negative factor scaling the positive one
    # (x = mu_neg/lambda); branch 1: f on the positive factor scaling the negative one.
    roles = {0: (neg, pos), 1: (pos, neg)}
    if a <= REL_TOL * (abs(4.0 * t * n) + n + 1.0):  # t <= -(n+1)/(4n), up to rounding
        src, tgt = roles[1]
        f = product.factors[src]
        mu = f.mu_fn if f.mu_fn is not None else f.dim * f.einstein_const / (f.dim - 1)
        col.record(hessian_conformal(functional, product, ConformalScale(src, tgt, mu)))
        col.notes.append("leading coefficient (4t+1)n+1 <= 0: the polynomial for functions on the "
                         "positive factor is negative for every eigenvalue")
        return col.verdict()

    tree_open = dict(zip((0, 1), _ft_tree_nontrivial(n, t)))
    for branch in (0, 1):
        src, tgt = roles[branch]
        f = product.factors[src]
        if f.mu_fn is None:
            if tree_open[branch]:
                col.missing.append(f"factors[{src}].mu_fn")
            else:
                col.assume(f"f on factor {src} scaling factor {tgt}: positive by the case tree "
                           f"(no eigenvalue condition at n = {n}, t = {t!r})", "theorem")
            continue
        x = f.mu_fn / lam
        report = hessian_conformal(functional, product, ConformalScale(src, tgt, f.mu_fn))
        col.record(report)
        if report.value > 0 and not _ray_positive(n, t, branch, x):
            col.missing.append(f"factors[{src}]: higher eigenvalues (polynomial negative on part of "
                               f"[{x:.17g}, inf))")
        if tree_open[branch]:
            r_tab = (-(b0 if branch == 0 else b1) + math.sqrt(max(D, 0.0))) / (2.0 * a)
            tree_ok = x > r_tab
            if tree_ok != (report.value > 0):
                col.notes.append(f"case-tree threshold {r_tab:.17g} (tabulated discriminant) disagrees "
                                 f"with the exact polynomial at x = {x:.17g}")
        elif report.value <= 0:
            col.notes.append(f"case tree claims positivity for f on factor {src} at n = {n}, t = {t!r}, "
                             f"but the exact polynomial is {report.value:.17g} at x = {x:.17g}")
    return col.verdict()


def _classify_ft(product: ProductSpace, t: float, auto_rescale: bool) -> StabilityVerdict:
    if t == 0.0:
        return _classify_ric(product, auto_rescale)
    if len(product.factors) != 2:
        return _indeterminate("F_t is classified for two-factor products only")
    if min(product.dims) < 3:
        return _indeterminate("factor dimensions must be >= 3")
    functional = FunctionalId.ft(t)
    if not is_critical(functional, product):
        return _not_critical(f"product is not critical for {functional}")
    l0, l1 = product.lambdas
    if l0 * l1 < 0:
        return _classify_ft_opposite(product, t)
    # same-sign products: no theorem, but negative closed-form values still decide instability
    col = _Collector()
    for a, b in _warped_directions(product):
        f = product.factors[a]
        if f.mu_fn is not None:
            col.record(hessian_conformal(functional, product, ConformalScale(a, b, f.mu_fn)))
    col.notes.append("no theorem-level criterion for F_t at same-sign products")
    return col.verdict(positive_claimed=False)


# -- R, W2, WnHalf -------------------------------------------------------------------


def _space_form_pair(product: ProductSpace) -> tuple[int, int] | None:
    """(sphere index, hyperbolic index) when the product is S^k x H^m with |K| = 1."""
    if len(product.factors) != 2:
        return None
    ks = [f.sectional for f in product.factors]
    if any(k is None for k in ks):
        return None
    if math.isclose(ks[0], 1.0, rel_tol=REL_TOL) and math.isclose(ks[1], -1.0, rel_tol=REL_TOL):
        return 0, 1
    if math.isclose(ks[1], 1.0, rel_tol=REL_TOL) and math.isclose(ks[0], -1.0, rel_tol=REL_TOL):
        return 1, 0
    return None


def _classify_riem(product: ProductSpace) -> StabilityVerdict:
    pair = _space_form_pair(product)
    if pair is None or product.dims[0] != product.dims[1]:
        return _indeterminate("R is classified only at S^n x H^n with curvatures +1 and -1")
    s, h = pair
    n = product.dims[0]
    col = _Collector()
    col.assume("TT directions positive", "theorem")
    if n in (3, 4):
        col.assume(f"n = {n}: conformal directions positive for every eigenvalue", "theorem")
        return col.verdict()
    hyp = product.factors[h]
    if hyp.mu_fn is None:
        col.missing.append(f"factors[{h}].mu_fn")
        return col.verdict()
    col.assume(f"criterion mu > sqrt((n-1)(n-4)) = {math.sqrt((n - 1) * (n - 4)):.17g}", "theorem")
    col.record(hessian_conformal(FunctionalId.riem(), product, ConformalScale(h, s, hyp.mu_fn)))
    return col.verdict()


def _classify_weyl(product: ProductSpace, functional: FunctionalId) -> StabilityVerdict:
    pair = _space_form_pair(product)
    if len(product.factors) == 2 and 1 in product.dims:
        big = product.factors[0] if product.dims[1] == 1 else product.factors[1]
        if big.sectional is not None and math.isclose(abs(big.sectional), 1.0, rel_tol=REL_TOL):
            return StabilityVerdict(Status.INDETERMINATE, notes=(
                "circle case: mixed TT form is positive, but no theorem-level verdict",))
    if pair is None:
        return _indeterminate(f"{functional} is classified only at S^k x H^(n-k) space forms")
    k, m = product.factors[pair[0]].dim, product.factors[pair[1]].dim
    if k < 3 or m < 3:
        return _indeterminate("needs k, n-k >= 3")
    return StabilityVerdict(Status.STABLE, assumptions=(
        Assumption(f"S^{k} x H^{m} is conformally flat, hence a global minimum", "theorem"),
        Assumption("TT directions positive", "theorem")))


# -- dispatch ----------------------------------------------------------------------


def classify(functional: FunctionalId, product: ProductSpace, auto_rescale: bool = False) -> StabilityVerdict:
    k = functional.kind
    if k is FunctionalKind.RIC:
        return _classify_ric(product, auto_rescale)
    if k is FunctionalKind.FT:
        return _classify_ft(product, functional.t, auto_rescale)
    if k is FunctionalKind.R:
        return _classify_riem(product)
    if k in (FunctionalKind.W2, FunctionalKind.WN_HALF):
        return _classify_weyl(product, functional)
    return _indeterminate(f"no stability criterion for {functional}")


# -- region scans ------------------------------------------------------------------


@dataclass(frozen=True)
class RegionGrid:
    """Parameter ranges; ``mu_ratio`` is ``mu/|lambda|`` of the negatively curved factor."""

    n0: tuple[int, ...]
    n1: tuple[int, ...]
    mu_ratio: tuple[float | None, ...] = (None,)
    t: tuple[float | None, ...] = (None,)


@dataclass(frozen=True)
class RegionRow:
    n0: int
    n1: int
    mu_ratio: float | None
    t: float | None
    status: str
    detail: str = ""


def region_product(functional: FunctionalId, n0: int, n1: int, mu_ratio: float | None) -> ProductSpace:
    """The product family scanned for each functional (see :func:`region_scan`)."""
    if functional.kind is FunctionalKind.FT:
        # opposite-sign Einstein factors, lambda = +-1, flagged F_t-stable
        stable = (("*", TriState.YES),)
        pos = EinsteinFactor.abstract(n0, 1.0, ft_stable=stable, ric_stable=TriState.YES)
        mu = None if mu_ratio is None else mu_ratio
        neg = EinsteinFactor.abstract(n1, -1.0, mu_fn=mu, ft_stable=stable, ric_stable=TriState.YES)
        return ProductSpace.of(pos, neg)
    # S^n0 (rescaled so lambda = n1 - 1) x H^n1 with mu = ratio (n1 - 1)
    mu = None if mu_ratio is None else mu_ratio * (n1 - 1)
    radius = math.sqrt((n0 - 1) / (n1 - 1))
    return ProductSpace.of(EinsteinFactor.sphere(n0, radius), EinsteinFactor.hyperbolic(n1, mu))


def region_scan(functional: FunctionalId, grid: RegionGrid,
                builder: Callable[..., ProductSpace] = region_product) -> list[RegionRow]:
    """One verdict per grid point, in grid order; per-point errors become status cells."""
    rows = []
    ts = grid.t if functional.kind is FunctionalKind.FT else (None,)
    for n0, n1, mu, t in itertools.product(grid.n0, grid.n1, grid.mu_ratio, ts):
        try:
            f = FunctionalId.ft(t) if functional.kind is FunctionalKind.FT else functional
            verdict = classify(f, builder(f, n0, n1, mu))
            rows.append(RegionRow(n0, n1, mu, t, verdict.status.value,
                                  "; ".join(verdict.missing + verdict.notes[:1])))
        except CurvstabError as exc:
            rows.append(RegionRow(n0, n1, mu, t, f"Error:{type(exc).__name__}", str(exc)))
    return rows


# -- catalog -----------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    item: str
    family: str
    functional: FunctionalId
    expected: Status
    samples: Callable[[], list[ProductSpace]]


def _hyp(n: int, ratio: float | None, lam: float | None = None) -> EinsteinFactor:
    """Hyperbolic quotient with ``mu/|lambda| = ratio``, rescaled to Einstein constant ``lam``."""
    f = EinsteinFactor.hyperbolic(n, None if ratio is None else ratio * (n - 1))
    return f if lam is None else f.rescaled(abs(f.einstein_const) / abs(lam))


def _sphere(n: int, lam: float) -> EinsteinFactor:
    return EinsteinFactor.sphere(n, math.sqrt((n - 1) / lam))


def _cp(m: int, lam: float) -> EinsteinFactor:
    f = EinsteinFactor.complex_projective(m)
    return f.rescaled(f.einstein_const / lam)


def _item1():
    return [ProductSpace.of(*[_sphere(n, 2.0) for n in dims]) for dims in ((3, 3), (3, 5), (4, 6, 7), (3, 3, 3, 3))]


def _item2():
    return [ProductSpace.of(*[_cp(m, 6.0) for m in ms]) for ms in ((2, 2), (2, 3), (2, 3, 4))]


def _item3():
    return [ProductSpace.of(_hyp(a, None, 2.0), _hyp(b, None, 2.0)) for a, b in ((3, 3), (3, 4), (4, 4))]


def _item4():
    out = [ProductSpace.of(_sphere(3, 6.0), _cp(2, 6.0)), ProductSpace.of(_sphere(5, 4.0), _cp(3, 4.0), _sphere(4, 4.0))]
    # mixed signs: the warped threshold is vacuous when the spherical factor is 3-dimensional
    out += [ProductSpace.of(_sphere(3, 2.0), _hyp(3, None)), ProductSpace.of(_sphere(3, 3.0), _hyp(4, None))]
    return out


def _item5():
    out = []
    for n, m in ((5, 5), (6, 8), (4, 7)):
        r1 = max(threshold_c(m), 2.0 - 8.0 / n) + 0.25
        r2 = max(threshold_c(n), 2.0 - 8.0 / m) + 0.25
        out.append(ProductSpace.of(_hyp(n, r1, 6.0), _hyp(m, r2, 6.0)))
    return out


def _sh_bound(n: int, m: int) -> float:
    return max(2.0 * (m - 4) / m, opposite_threshold(n))


def _item6():
    return [ProductSpace.of(_sphere(n, m - 1.0), _hyp(m, _sh_bound(n, m) + d))
            for n, m, d in ((5, 5, 0.01), (6, 3, 0.2), (3, 7, 0.5), (8, 6, 1.0))]


def _item7():
    return [ProductSpace.of(_sphere(n, m - 1.0), _hyp(m, 2.0 + d)) for n, m, d in ((3, 3, 0.01), (5, 5, 0.1), (9, 6, 1.0), (4, 12, 0.5))]


def _unstable_hh():
    out = []
    for n, m in ((5, 6), (6, 6), (8, 9)):
        lo, hi = 2.0 - 8.0 / n, threshold_c(m)
        out.append(ProductSpace.of(_hyp(n, 0.5 * (lo + hi), 6.0), _hyp(m, threshold_c(n) + 1.0, 6.0)))
    return out


def _unstable_sh():
    out = []
    for n, m in ((5, 5), (7, 6), (12, 9)):
        lo, hi = 2.0 * (m - 4) / m, opposite_threshold(n)
        out.append(ProductSpace.of(_sphere(n, m - 1.0), _hyp(m, 0.5 * (lo + hi))))
    return out


def catalog() -> list[CatalogEntry]:
    ric = FunctionalId.ric()
    S, U = Status.STABLE, Status.UNSTABLE
    return [
        CatalogEntry("stable-1", "products of spheres S^n_i, n_i >= 3", ric, S, _item1),
        CatalogEntry("stable-2", "products of CP^m_i, m_i >= 2", ric, S, _item2),
        CatalogEntry("stable-3", "products of hyperbolic quotients of dimension 3 or 4", ric, S, _item3),
        CatalogEntry("stable-4", "products mixing the factors of items 1-3 (equal-sign, or 3-dim sphere with H^3/H^4)", ric, S, _item4),
        CatalogEntry("stable-5", "H^n x H^m, n, m >= 4, mu_i/(n_i-1) above max{c(n_j), 2 - 8/n_i}", ric, S, _item5),
        CatalogEntry("stable-6", "S^n x H^m with mu/(m-1) above max{2(m-4)/m, T(n)}", ric, S, _item6),
        CatalogEntry("stable-7", "S^n x H^m with mu > 2(m-1)", ric, S, _item7),
        CatalogEntry("unstable-HH", "H^n x H^m with 2 - 8/n < mu_1/(n-1) < c(m)", ric, U, _unstable_hh),
        CatalogEntry("unstable-SH", "S^n x H^m with 2(m-4)/m < mu/(m-1) < T(n)", ric, U, _unstable_sh),
    ]


def check_catalog() -> list[tuple[CatalogEntry, list[Status]]]:
    """Live cross-check: the status ``classify`` assigns to every sample of every entry."""
    return [(e, [classify(e.functional, p).status for p in e.samples()]) for e in catalog()]
