"""Closed-form second variations of quadratic curvature functionals.

Everything here is a pure function of spectral data: factor dimensions,
Einstein constants, Laplace eigenvalues on functions, and the Rayleigh
quotients of co-closed one-forms.  Directions are normalized so that the
function ``f`` (or each one-form ``alpha_i``) has unit L^2 norm; for
``h = f g_B`` this gives ``||Delta f||^2 = mu^2`` and ``||df||^2 = mu``, and
for ``h = alpha_0 . alpha_1`` it gives ``||h||^2 = 2``.

Each report carries a term-by-term breakdown assembled from the individual
linearized operators (curl-curl of Ricci, rough Laplacian of Ricci, Ricci
square, ...), while the headline value is evaluated from the closed-form
display for the relevant sign case.  Agreement of the two is an invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Union

from .errors import (
    DomainError,
    InvalidSpectralData,
    MissingFactorData,
    NotCritical,
    UnsupportedCombination,
)

REL_TOL = 1e-12
NEG_INF = -math.inf


def _close(a: float, b: float, tol: float = REL_TOL) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# -- factors and products ------------------------------------------------------


class FactorKind(str, Enum):
    SPHERE = "Sphere"
    HYPERBOLIC = "HyperbolicQuotient"
    COMPLEX_PROJECTIVE = "ComplexProjective"
    ABSTRACT = "AbstractEinstein"
    SPACE_FORM = "SpaceForm"


class TriState(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class EinsteinFactor:
    """One closed Einstein factor, described only by its spectral data.

    ``ft_stable`` maps a key to a tri-state: keys are ``repr(float(t))`` for
    individual values of ``t`` or ``"*"`` for a fact valid at every ``t``.
    """

    kind: FactorKind
    dim: int
    einstein_const: float
    sectional: float | None = None
    mu_fn: float | None = None
    mu_oneform: float | None = None
    ric_stable: TriState = TriState.UNKNOWN
    ft_stable: tuple[tuple[str, TriState], ...] = ()

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "kind", FactorKind(self.kind))
        set_(self, "ric_stable", TriState(self.ric_stable))
        ft = self.ft_stable
        if isinstance(ft, Mapping):
            ft = ft.items()
        set_(self, "ft_stable", tuple(sorted((str(k), TriState(v)) for k, v in ft)))
        for name in ("einstein_const", "sectional", "mu_fn", "mu_oneform"):
            v = getattr(self, name)
            if v is not None:
                v = float(v)
                if not math.isfinite(v):
                    raise InvalidSpectralData(f"{name} must be finite")
                set_(self, name, v)
        self._validate()

    def _validate(self):
        n, lam, K = self.dim, self.einstein_const, self.sectional
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise InvalidSpectralData(f"dim must be a positive integer, got {n!r}")
        if self.kind in (FactorKind.SPHERE, FactorKind.SPACE_FORM):
            if K is None:
                raise InvalidSpectralData(f"{self.kind.value} factor needs a sectional curvature")
        if K is not None and not _close(lam, (n - 1) * K):
            raise InvalidSpectralData(
                f"Einstein constant {lam} inconsistent with (n-1)K = {(n - 1) * K}"
            )
        if self.kind is FactorKind.SPHERE:
            if K <= 0:
                raise InvalidSpectralData("sphere needs positive sectional curvature")
            if self.mu_fn is not None and not _close(self.mu_fn, n * K):
                raise InvalidSpectralData(f"sphere first eigenvalue must be nK = {n * K}")
        if self.kind is FactorKind.HYPERBOLIC and lam >= 0:
            raise InvalidSpectralData("hyperbolic quotient needs a negative Einstein constant")
        if self.kind is FactorKind.COMPLEX_PROJECTIVE and (lam <= 0 or n % 2):
            raise InvalidSpectralData("complex projective factor needs even dim and lambda > 0")
        if self.mu_fn is not None:
            if self.mu_fn <= 0:
                raise InvalidSpectralData("mu_fn must be positive")
            if lam > 0 and n > 1 and self.mu_fn < n * lam / (n - 1) * (1 - REL_TOL):
                raise InvalidSpectralData(
                    f"mu_fn = {self.mu_fn} violates the Lichnerowicz bound {n * lam / (n - 1)}"
                )
        if self.mu_oneform is not None:
            if self.mu_oneform < 0:
                raise InvalidSpectralData("mu_oneform must be nonnegative")
            if lam > 0 and self.mu_oneform < lam * (1 - REL_TOL):
                raise InvalidSpectralData(
                    f"mu_oneform = {self.mu_oneform} below the Bochner bound lambda = {lam}"
                )

    # constructors -------------------------------------------------------
    @classmethod
    def sphere(cls, dim: int, radius: float = 1.0) -> "EinsteinFactor":
        K = 1.0 / radius**2
        return cls(
            FactorKind.SPHERE, dim, (dim - 1) * K, sectional=K, mu_fn=dim * K,
            mu_oneform=2.0 * (dim - 1) * K if dim > 1 else None,
            ric_stable=TriState.YES if dim >= 3 else TriState.UNKNOWN,
        )

    @classmethod
    def hyperbolic(cls, dim: int, mu: float | None = None, *, mu_oneform=None,
                   ric_stable=TriState.UNKNOWN, ft_stable=()) -> "EinsteinFactor":
        return cls(FactorKind.HYPERBOLIC, dim, -(dim - 1.0), sectional=-1.0, mu_fn=mu,
                   mu_oneform=mu_oneform, ric_stable=ric_stable, ft_stable=ft_stable)

    @classmethod
    def space_form(cls, dim: int, sectional: float, mu: float | None = None, **kw):
        return cls(FactorKind.SPACE_FORM, dim, (dim - 1) * sectional, sectional=sectional,
                   mu_fn=mu, **kw)

    @classmethod
    def circle(cls) -> "EinsteinFactor":
        return cls(FactorKind.SPACE_FORM, 1, 0.0, sectional=0.0)

    @classmethod
    def complex_projective(cls, complex_dim: int) -> "EinsteinFactor":
        """Fubini-Study metric with holomorphic sectional curvature 4."""
        m = complex_dim
        return cls(FactorKind.COMPLEX_PROJECTIVE, 2 * m, 2.0 * (m + 1), mu_fn=4.0 * (m + 1),
                   ric_stable=TriState.YES if m >= 2 else TriState.UNKNOWN)

    @classmethod
    def abstract(cls, dim: int, einstein_const: float, **kw) -> "EinsteinFactor":
        return cls(FactorKind.ABSTRACT, dim, einstein_const, **kw)

    # helpers --------------------------------------------------------------
    @property
    def is_space_form(self) -> bool:
        return self.sectional is not None

    @property
    def riemann_sq(self) -> float:
        """Pointwise |R|^2 = 2 n (n-1) K^2 of a constant-curvature factor."""
        if self.sectional is None:
            raise UnsupportedCombination("|R|^2 is only determined for constant curvature factors")
        return 2.0 * self.dim * (self.dim - 1) * self.sectional**2

    def ft_stability(self, t: float) -> TriState:
        facts = dict(self.ft_stable)
        return facts.get(repr(float(t)), facts.get("*", TriState.UNKNOWN))

    def rescaled(self, c: float) -> "EinsteinFactor":
        """Data of the factor after ``g -> c g``."""
        if c <= 0:
            raise DomainError("rescaling factor must be positive")
        K = None if self.sectional is None else self.sectional / c
        return EinsteinFactor(
            self.kind, self.dim, self.einstein_const / c, sectional=K,
            mu_fn=None if self.mu_fn is None else self.mu_fn / c,
            mu_oneform=None if self.mu_oneform is None else self.mu_oneform / c,
            ric_stable=self.ric_stable, ft_stable=self.ft_stable,
        )


@dataclass(frozen=True)
class ProductSpace:
    factors: tuple[EinsteinFactor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise InvalidSpectralData("a product needs at least two factors")

    @classmethod
    def of(cls, *factors: EinsteinFactor) -> "ProductSpace":
        return cls(tuple(factors))

    @property
    def total_dim(self) -> int:
        return sum(f.dim for f in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def lambdas(self) -> tuple[float, ...]:
        return tuple(f.einstein_const for f in self.factors)

    @property
    def scalar(self) -> float:
        return sum(f.dim * f.einstein_const for f in self.factors)

    @property
    def ricci_sq(self) -> float:
        return sum(f.dim * f.einstein_const**2 for f in self.factors)

    @property
    def riemann_sq(self) -> float:
        return sum(f.riemann_sq for f in self.factors)

    def ric_critical(self, tol: float = REL_TOL) -> bool:
        a = [abs(x) for x in self.lambdas]
        return all(_close(x, a[0], tol) for x in a)

    def factor(self, i: int) -> EinsteinFactor:
        if not 0 <= i < len(self.factors):
            raise InvalidSpectralData(f"factor index {i} out of range")
        return self.factors[i]


# -- directions and functionals --------------------------------------------------


@dataclass(frozen=True)
class ConformalScale:
    """``h = f g_target`` with ``f`` a unit-norm eigenfunction (eigenvalue ``mu``) on ``source``."""

    source_factor: int
    target_factor: int
    mu: float
    norm_f: float = 1.0

    def __post_init__(self):
        if self.source_factor == self.target_factor:
            raise InvalidSpectralData("conformal direction needs distinct source and target")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise InvalidSpectralData("mu must be positive (f has mean zero)")
        if self.norm_f != 1.0:
            raise InvalidSpectralData("norm_f is fixed to 1")


@dataclass(frozen=True)
class MixedTT:
    """``h = alpha_0 . alpha_1`` for unit co-closed forms with Rayleigh quotients ``nu0``, ``nu1``."""

    nu0: float
    nu1: float
    norm_laplacian_sq0: float | None = None
    norm_laplacian_sq1: float | None = None

    def __post_init__(self):
        for v in (self.nu0, self.nu1):
            if not (v >= 0 and math.isfinite(v)):
                raise InvalidSpectralData("nu_i must be finite and nonnegative")
        for nu, sq in ((self.nu0, self.norm_laplacian_sq0), (self.nu1, self.norm_laplacian_sq1)):
            if sq is not None and sq < nu * nu * (1 - REL_TOL):
                raise InvalidSpectralData("||Delta alpha||^2 < <Delta alpha, alpha>^2 violates Cauchy-Schwarz")

    @property
    def nus(self) -> tuple[float, float]:
        return (self.nu0, self.nu1)

    @property
    def laplacian_sqs(self) -> tuple[float, float]:
        n0 = self.nu0**2 if self.norm_laplacian_sq0 is None else self.norm_laplacian_sq0
        n1 = self.nu1**2 if self.norm_laplacian_sq1 is None else self.norm_laplacian_sq1
        return (n0, n1)

    @property
    def quartic(self) -> float:
        """``||Delta a0||^2 + ||Delta a1||^2 + 2 <Delta a0, a0><Delta a1, a1>``."""
        s0, s1 = self.laplacian_sqs
        return s0 + s1 + 2.0 * self.nu0 * self.nu1

    def swapped(self) -> "MixedTT":
        return MixedTT(self.nu1, self.nu0, self.norm_laplacian_sq1, self.norm_laplacian_sq0)

    def validate(self, product: ProductSpace, strict_bochner: bool = False) -> None:
        for i, nu in enumerate(self.nus):
            f = product.factor(i)
            lam = f.einstein_const
            if lam > 0:
                bad = nu <= lam if strict_bochner else nu < lam * (1 - REL_TOL)
                if bad:
                    raise InvalidSpectralData(
                        f"nu{i} = {nu} violates the Bochner bound against lambda = {lam}"
                    )
            if f.mu_oneform is not None and nu < f.mu_oneform * (1 - REL_TOL):
                raise InvalidSpectralData(f"nu{i} below the first one-form eigenvalue of factor {i}")


@dataclass(frozen=True)
class FactorTT:
    """A TT-tensor pulled back from one factor, known only through its Hessian lower bound."""

    factor: int
    factor_hessian_lower_bound: float | None = None


VariationDirection = Union[ConformalScale, MixedTT, FactorTT]


class FunctionalKind(str, Enum):
    RIC = "Ric"
    S = "S"
    FT = "Ft"
    R = "R"
    W2 = "W2"
    WN_HALF = "WnHalf"


@dataclass(frozen=True)
class FunctionalId:
    kind: FunctionalKind
    t: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", FunctionalKind(self.kind))
        if self.kind is FunctionalKind.FT:
            if self.t is None or not math.isfinite(float(self.t)):
                raise DomainError("Ft needs a finite parameter t")
            object.__setattr__(self, "t", float(self.t))
        elif self.t is not None:
            raise DomainError(f"{self.kind.value} takes no parameter")

    @classmethod
    def ric(cls):
        return cls(FunctionalKind.RIC)

    @classmethod
    def s(cls):
        return cls(FunctionalKind.S)

    @classmethod
    def ft(cls, t: float):
        return cls(FunctionalKind.FT, t)

    @classmethod
    def riem(cls):
        return cls(FunctionalKind.R)

    @classmethod
    def w2(cls):
        return cls(FunctionalKind.W2)

    @classmethod
    def wn_half(cls):
        return cls(FunctionalKind.WN_HALF)

    @classmethod
    def parse(cls, text: str) -> "FunctionalId":
        text = text.strip()
        if text.startswith("Ft(") and text.endswith(")"):
            return cls.ft(float(text[3:-1]))
        try:
            return cls(FunctionalKind(text))
        except ValueError:
            raise DomainError(f"unknown functional {text!r}") from None

    def __str__(self) -> str:
        return f"Ft({self.t!r})" if self.kind is FunctionalKind.FT else self.kind.value

    @property
    def ricci_weight(self) -> float:
        """Coefficient of the Ricci part when the functional is Ric + t S (Ft(0) is Ric)."""
        return 1.0

    @property
    def scalar_weight(self) -> float:
        if self.kind is FunctionalKind.FT:
            return self.t
        return 0.0

    @property
    def is_ric_like(self) -> bool:
        return self.kind is FunctionalKind.RIC or (self.kind is FunctionalKind.FT and self.t == 0.0)


# -- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """One labeled contribution ``delta * D + sum(linear_i * L_i) + constant``.

    ``D`` is ``||Delta f||^2`` (conformal) or the quartic combination
    ``||Delta a0||^2 + ||Delta a1||^2 + 2 nu0 nu1`` (mixed); ``L`` is
    ``(||df||^2,)`` or ``(nu0, nu1)``.
    """

    label: str
    delta: float
    linear: tuple[float, ...]
    constant: float

    def scaled(self, c: float, label: str | None = None) -> "Term":
        return Term(label or self.label, c * self.delta, tuple(c * x for x in self.linear),
                    c * self.constant)

    def contribution(self, delta_quantity: float, linear_quantities: tuple[float, ...]) -> float:
        return (self.delta * delta_quantity
                + sum(a * b for a, b in zip(self.linear, linear_quantities)) + self.constant)


@dataclass(frozen=True)
class QuadraticFormReport:
    functional: FunctionalId
    direction: VariationDirection
    value: float
    terms: tuple[Term, ...] = ()
    defined: bool = True
    delta_quantity: float = 0.0
    linear_quantities: tuple[float, ...] = ()
    source: str = ""
    notes: tuple[str, ...] = ()

    def contributions(self) -> list[tuple[str, float]]:
        return [(t.label, t.contribution(self.delta_quantity, self.linear_quantities))
                for t in self.terms]

    def terms_total(self) -> float:
        return math.fsum(c for _, c in self.contributions())

    @property
    def scale(self) -> float:
        """Magnitude against which rounding in ``value`` should be judged."""
        parts = [abs(c) for _, c in self.contributions()]
        return max([abs(self.value)] + parts + [1e-300])


def _undefined(functional, direction, why: str) -> QuadraticFormReport:
    return QuadraticFormReport(functional, direction, math.nan, (), False, source="", notes=(why,))


# -- building blocks: conformal directions --------------------------------------


@dataclass(frozen=True)
class _Conf:
    nA: int
    nB: int
    lamA: float
    lamB: float
    n: int
    mu: float
    KA: float | None
    KB: float | None

    @property
    def s(self):
        return self.nA * self.lamA + self.nB * self.lamB

    @property
    def ric_sq(self):
        return self.nA * self.lamA**2 + self.nB * self.lamB**2


def _conf_data(product: ProductSpace, d: ConformalScale) -> _Conf:
    if len(product.factors) != 2:
        raise UnsupportedCombination("closed forms are available for two-factor products only")
    A, B = product.factor(d.source_factor), product.factor(d.target_factor)
    if A.einstein_const > 0 and A.dim > 1:
        bound = A.dim * A.einstein_const / (A.dim - 1)
        if d.mu < bound * (1 - REL_TOL):
            raise InvalidSpectralData(f"mu = {d.mu} below the Lichnerowicz bound {bound}")
    if A.mu_fn is not None and d.mu < A.mu_fn * (1 - REL_TOL):
        raise InvalidSpectralData(f"mu = {d.mu} below the first eigenvalue {A.mu_fn} of the source")
    return _Conf(A.dim, B.dim, A.einstein_const, B.einstein_const, product.total_dim, d.mu,
                 A.sectional, B.sectional)


def _conf_block(term_id: str, c: _Conf) -> Term:
    nB, lA, lB, mu = c.nB, c.lamA, c.lamB, c.mu
    if term_id == "DeltaDdDr":
        return Term(term_id, nB, (-nB * (lA + lB),), 0.0)
    if term_id == "DstarDr":
        return Term(term_id, nB / 2.0, (-nB * lB,), 0.0)
    if term_id == "RcircR":
        return Term(term_id, 0.0, (lB * nB,), -lB * lB * nB)
    if term_id == "RcheckPrime":
        if c.KB is None:
            raise UnsupportedCombination("RcheckPrime needs a constant-curvature target factor")
        return Term(term_id, 0.0, (0.0,), -2.0 * nB * (nB - 1) * c.KB**2)
    if term_id == "GradS":
        return _sum_terms(term_id, _conf_scalar_terms(c))
    raise DomainError(f"unknown term id {term_id!r}")


def _sum_terms(label: str, terms) -> Term:
    terms = list(terms)
    width = len(terms[0].linear)
    return Term(label, math.fsum(t.delta for t in terms),
                tuple(math.fsum(t.linear[i] for t in terms) for i in range(width)),
                math.fsum(t.constant for t in terms))


def _conf_ric_terms(c: _Conf) -> list[Term]:
    nB, lA, lB = c.nB, c.lamA, c.lamB
    return [
        _conf_block("DeltaDdDr", c),
        _conf_block("DstarDr", c).scaled(-1.0),
        _conf_block("RcircR", c).scaled(-2.0),
        Term("ScalarLaplacian", nB * nB / 2.0, (-nB * nB * lB / 2.0,), 0.0),
        Term("RicciNormVariation", 0.0, (nB * nB * (lA + lB) / 2.0,), -nB * nB * lB * lB),
        Term("VolumeConstraint", 0.0, (0.0,), 2.0 / c.n * c.ric_sq * nB),
    ]


def _conf_scalar_terms(c: _Conf) -> list[Term]:
    nB, lB, s = c.nB, c.lamB, c.s
    return [
        Term("ScalarLaplacian", 2.0 * nB * nB, (-2.0 * nB * nB * lB,), 0.0),
        Term("ScalarTimesRicci", 0.0, (-2.0 * nB * nB * lB,), 2.0 * nB * nB * lB * lB),
        Term("RicciVariation", 0.0, (-s * nB,), 0.0),
        Term("ScalarVariation", 0.0, (s * nB * nB,), -s * nB * nB * lB),
        Term("VolumeConstraint", 0.0, (0.0,), 2.0 * nB * s * s / c.n),
    ]


def _conf_riem_terms(c: _Conf) -> list[Term]:
    if c.KA is None or c.KB is None:
        raise UnsupportedCombination("the full-curvature functional needs constant-curvature factors")
    nA, nB = c.nA, c.nB
    rA = 2.0 * nA * (nA - 1) * c.KA**2
    rB = 2.0 * nB * (nB - 1) * c.KB**2
    return [
        _conf_block("DeltaDdDr", c).scaled(2.0),
        _conf_block("RcheckPrime", c).scaled(-2.0),
        Term("RiemannNormVariation", 0.0, (0.0,), -nB * rB),
        Term("VolumeConstraint", 0.0, (0.0,), 2.0 / c.n * (rA + rB) * nB),
    ]


def conformal_terms(functional: FunctionalId, product: ProductSpace,
                    direction: ConformalScale) -> list[Term]:
    """Operator-level decomposition, valid for any Einstein constants (no criticality check)."""
    c = _conf_data(product, direction)
    k = functional.kind
    if k is FunctionalKind.RIC:
        return _conf_ric_terms(c)
    if k is FunctionalKind.S:
        return _conf_scalar_terms(c)
    if k is FunctionalKind.FT:
        return _conf_ric_terms(c) + [t.scaled(functional.t, "t*" + t.label)
                                     for t in _conf_scalar_terms(c)]
    if k is FunctionalKind.R:
        return _conf_riem_terms(c)
    if k is FunctionalKind.W2:
        n = c.n
        return (_conf_riem_terms(c)
                + [t.scaled(-4.0 / (n - 2), "Ric:" + t.label) for t in _conf_ric_terms(c)]
                + [t.scaled(2.0 / ((n - 2) * (n - 1)), "S:" + t.label) for t in _conf_scalar_terms(c)])
    raise UnsupportedCombination(f"no conformal decomposition for {functional}")


# -- building blocks: mixed TT directions ----------------------------------------


def _mixed_block(term_id: str, product: ProductSpace, d: MixedTT, variant: str = "stated") -> Term:
    l0, l1 = product.lambdas[:2]
    if term_id == "DeltaDdDr":
        a = -2.5 * (l0 + l1)
        return Term(term_id, 2.0, (a, a), 4.0 * l0 * l1)
    if term_id == "DstarDr":
        return Term(term_id, 1.0, (-(3 * l0 + 5 * l1) / 2.0, -(3 * l1 + 5 * l0) / 2.0), 4.0 * l0 * l1)
    if term_id == "RcircR":
        return Term(term_id, 0.0, (l0 + l1, l0 + l1), -2.0 * l0 * l1)
    if term_id == "RcheckPrime":
        f0, f1 = product.factor(0), product.factor(1)
        if not (f0.is_space_form and f1.is_space_form):
            raise UnsupportedCombination("RcheckPrime needs constant-curvature factors")
        if variant == "stated":
            ok = all(abs(abs(f.sectional) - 1.0) <= REL_TOL or f.dim == 1 for f in (f0, f1))
            if not ok:
                raise UnsupportedCombination("the stated form needs sectional curvatures of modulus 1")
            n0, n1 = f0.dim, f1.dim
            return Term(term_id, 0.0, (2.0, -2.0), -4.0 * (n0 + n1 - 2))
        if variant == "generic":
            # 2(||D a0||^2 - ||D a1||^2) - 2 lambda_0 + 2 lambda_1, with ||D a||^2 = nu - lambda
            return Term(term_id, 0.0, (2.0, -2.0), -4.0 * l0 + 4.0 * l1)
        raise DomainError(f"unknown RcheckPrime variant {variant!r}")
    if term_id == "GradS":
        return _sum_terms(term_id, _mixed_scalar_terms(product))
    raise DomainError(f"unknown term id {term_id!r}")


def _mixed_ric_terms(product: ProductSpace, d: MixedTT) -> list[Term]:
    return [
        _mixed_block("DeltaDdDr", product, d),
        _mixed_block("DstarDr", product, d).scaled(-1.0),
        _mixed_block("RcircR", product, d).scaled(-2.0),
        Term("VolumeConstraint", 0.0, (0.0, 0.0), 2.0 / product.total_dim * product.ricci_sq * 2.0),
    ]


def _mixed_scalar_terms(product: ProductSpace) -> list[Term]:
    s, n = product.scalar, product.total_dim
    return [
        Term("RicciVariation", 0.0, (-2.0 * s, -2.0 * s), 0.0),
        Term("VolumeConstraint", 0.0, (0.0, 0.0), 2.0 * s * s / n * 2.0),
    ]


def _mixed_riem_terms(product: ProductSpace, d: MixedTT) -> list[Term]:
    return [
        _mixed_block("DeltaDdDr", product, d).scaled(2.0),
        _mixed_block("RcheckPrime", product, d, "stated").scaled(-2.0),
        Term("VolumeConstraint", 0.0, (0.0, 0.0),
             2.0 / product.total_dim * product.riemann_sq * 2.0),
    ]


def mixed_terms(functional: FunctionalId, product: ProductSpace, direction: MixedTT) -> list[Term]:
    """Operator-level decomposition for ``alpha_0 . alpha_1`` (no criticality check)."""
    if len(product.factors) != 2:
        raise UnsupportedCombination("closed forms are available for two-factor products only")
    k = functional.kind
    if k is FunctionalKind.RIC:
        return _mixed_ric_terms(product, direction)
    if k is FunctionalKind.S:
        return _mixed_scalar_terms(product)
    if k is FunctionalKind.FT:
        return _mixed_ric_terms(product, direction) + [
            t.scaled(functional.t, "t*" + t.label) for t in _mixed_scalar_terms(product)]
    if k is FunctionalKind.R:
        return _mixed_riem_terms(product, direction)
    if k in (FunctionalKind.W2, FunctionalKind.WN_HALF):
        n = product.total_dim
        return (_mixed_riem_terms(product, direction)
                + [t.scaled(-4.0 / (n - 2), "Ric:" + t.label) for t in _mixed_ric_terms(product, direction)]
                + [t.scaled(2.0 / ((n - 2) * (n - 1)), "S:" + t.label)
                   for t in _mixed_scalar_terms(product)])
    raise UnsupportedCombination(f"no mixed decomposition for {functional}")


# -- building-block entry point ------------------------------------------------

TERM_IDS = ("DeltaDdDr", "DstarDr", "RcircR", "RcheckPrime", "GradS")


def composition_value(functional: FunctionalId, product: ProductSpace,
                      direction: VariationDirection) -> float:
    """Sum of the operator-level terms, without any criticality requirement."""
    if isinstance(direction, ConformalScale):
        c = _conf_data(product, direction)
        terms, dq, lq = conformal_terms(functional, product, direction), c.mu**2, (c.mu,)
    elif isinstance(direction, MixedTT):
        if functional.kind in (FunctionalKind.R, FunctionalKind.W2, FunctionalKind.WN_HALF):
            product, direction = _oriented(product, direction)
        terms, dq, lq = mixed_terms(functional, product, direction), direction.quartic, direction.nus
    else:
        raise UnsupportedCombination(f"{type(direction).__name__} has no operator-level terms")
    return math.fsum(t.contribution(dq, lq) for t in terms)


def lemma_term(term_id: str, direction: VariationDirection, product: ProductSpace,
               variant: str = "stated") -> float:
    """L^2 pairing of one linearized operator with the direction (unit-norm normalization).

    ``variant`` only affects ``RcheckPrime`` on mixed directions: ``"stated"`` is the
    closed form for factors of curvature +-1, ``"generic"`` the intermediate identity
    valid for constant curvature of either sign and any radius.
    """
    if term_id not in TERM_IDS:
        raise DomainError(f"unknown term id {term_id!r}")
    if isinstance(direction, ConformalScale):
        c = _conf_data(product, direction)
        if term_id == "RcheckPrime":
            B = product.factor(direction.target_factor)
            if not B.is_space_form:
                raise UnsupportedCombination("RcheckPrime needs a constant-curvature target factor")
        return _conf_block(term_id, c).contribution(c.mu**2, (c.mu,))
    if isinstance(direction, MixedTT):
        if len(product.factors) != 2:
            raise UnsupportedCombination("closed forms are available for two-factor products only")
        direction.validate(product)
        return _mixed_block(term_id, product, direction, variant).contribution(
            direction.quartic, direction.nus)
    raise UnsupportedCombination(f"{type(direction).__name__} has no building-block terms")


# -- gradients and criticality ---------------------------------------------------


def gradient_coefficients(functional: FunctionalId, product: ProductSpace) -> tuple[float, ...]:
    """Coefficients ``c_j`` with constrained gradient ``sum_j c_j g_j`` at the product metric.

    The metric is critical exactly when all ``c_j`` coincide (they then vanish,
    since the constrained gradient is trace-free).
    """
    n, lams, s = product.total_dim, product.lambdas, product.scalar
    ric = tuple(-2.0 * l * l + 2.0 / n * product.ricci_sq for l in lams)
    scal = tuple(-2.0 * s * l + 2.0 / n * s * s for l in lams)
    k = functional.kind
    if k is FunctionalKind.RIC:
        return ric
    if k is FunctionalKind.S:
        return scal
    if k is FunctionalKind.FT:
        return tuple(a + functional.t * b for a, b in zip(ric, scal))
    riem = tuple(-2.0 * (f.riemann_sq / f.dim) + 2.0 / n * product.riemann_sq
                 for f in product.factors)
    if k is FunctionalKind.R:
        return riem
    if k in (FunctionalKind.W2, FunctionalKind.WN_HALF):
        return tuple(r - 4.0 / (n - 2) * (a - b / (2.0 * (n - 1)))
                     for r, a, b in zip(riem, ric, scal))
    raise UnsupportedCombination(str(functional))


def is_critical(functional: FunctionalId, product: ProductSpace, tol: float = 1e-10) -> bool:
    c = gradient_coefficients(functional, product)
    scale = max([1.0] + [abs(x) for x in c] + [product.ricci_sq, product.scalar**2])
    return max(c) - min(c) <= tol * scale


def _sign_case(product: ProductSpace) -> str:
    l0, l1 = product.lambdas[:2]
    if _close(l0, l1):
        return "equal"
    if _close(l0, -l1):
        return "opposite"
    return "other"


# -- Hessians ------------------------------------------------------------------


def _report(functional, direction, value, terms, dq, lq, source, notes=()) -> QuadraticFormReport:
    return QuadraticFormReport(functional, direction, float(value), tuple(terms), True, float(dq),
                               tuple(float(x) for x in lq), source, tuple(notes))


def _ric_conformal_display(c: _Conf, case: str) -> float:
    nB, mu = c.nB, c.mu
    lam = abs(c.lamB)
    if case == "opposite":
        return (nB * (nB + 1) / 2.0 * mu * mu - c.lamB * nB * (nB + 2) / 2.0 * mu
                - lam * lam * nB * (nB - 4))
    # equal case; the Einstein constant enters the middle term with its sign
    return (nB * (nB + 1) / 2.0 * mu * mu + c.lamB * nB * (nB - 6) / 2.0 * mu
            - lam * lam * nB * (nB - 4))


def _scalar_conformal_display(c: _Conf, case: str) -> float:
    nB, mu, lam, n = c.nB, c.mu, abs(c.lamB), c.n
    if case == "opposite":
        return 2.0 * nB * nB * (mu * mu - 2.0 * c.lamB * mu + lam * lam)
    return (2.0 * nB * nB * mu * mu + c.lamB * (n * nB * (nB - 1) - 4 * nB * nB) * mu
            + nB * lam * lam * (2 * nB - n * (nB - 2)))


def _ft_conformal_display(c: _Conf, case: str, t: float) -> float:
    nB, mu, lam, n = c.nB, c.mu, abs(c.lamB), c.n
    if case == "opposite":
        m = nB
        return (m * ((4 * t + 1) * m + 1) / 2.0 * mu * mu
                - c.lamB * m * ((8 * t + 1) * m + 2) / 2.0 * mu
                + lam * lam * m * (m * (2 * t - 1) + 4))
    lamE = c.lamB
    return (nB * ((4 * t + 1) * nB + 1) / 2.0 * mu * mu
            + lamE * nB / 2.0 * (2 * t * (n * (nB - 1) - 4 * nB) + nB - 6) * mu
            - lam * lam * nB * (t * (n * (nB - 2) - 2 * nB) + nB - 4))


def _riem_conformal_ok(product: ProductSpace) -> bool:
    f0, f1 = product.factors
    return (f0.is_space_form and f1.is_space_form and f0.dim == f1.dim
            and abs(abs(f0.sectional) - 1.0) <= REL_TOL and _close(f0.sectional, -f1.sectional))


def hessian_conformal(functional: FunctionalId, product: ProductSpace,
                      direction: ConformalScale) -> QuadraticFormReport:
    """Second variation along ``h = f g_B`` per unit ``||f||^2``."""
    c = _conf_data(product, direction)
    dq, lq = c.mu**2, (c.mu,)
    case = _sign_case(product)
    k = functional.kind
    if k is FunctionalKind.WN_HALF:
        return _undefined(functional, direction,
                          "WnHalf is conformally invariant; only trace-free TT directions are tabulated")
    if k in (FunctionalKind.RIC, FunctionalKind.S, FunctionalKind.FT) and not is_critical(functional, product):
        raise NotCritical(f"product is not critical for {functional}")
    terms = conformal_terms(functional, product, direction) if k is not FunctionalKind.W2 or _riem_conformal_ok(product) else []
    if k is FunctionalKind.RIC or (k is FunctionalKind.FT and functional.t == 0.0):
        value = _ric_conformal_display(c, case)
        return _report(functional, direction, value, terms, dq, lq, f"warped Ric form, {case} case")
    if k is FunctionalKind.S:
        if case == "equal" or (case == "opposite" and c.nA == c.nB):
            value = _scalar_conformal_display(c, case)
            return _report(functional, direction, value, terms, dq, lq, f"scalar form, {case} case")
        value = math.fsum(t.contribution(dq, lq) for t in terms)
        return _report(functional, direction, value, terms, dq, lq, "scalar operator composition",
                       ("no tabulated display for this sign pattern; operator composition used",))
    if k is FunctionalKind.FT:
        if case == "equal" or (case == "opposite" and c.nA == c.nB):
            value = _ft_conformal_display(c, case, functional.t)
            return _report(functional, direction, value, terms, dq, lq, f"Ft warped form, {case} case")
        value = math.fsum(t.contribution(dq, lq) for t in terms)
        return _report(functional, direction, value, terms, dq, lq, "Ric + t S operator composition",
                       ("no tabulated display for this sign pattern; operator composition used",))
    if k is FunctionalKind.R:
        if not _riem_conformal_ok(product):
            raise UnsupportedCombination(
                "full-curvature conformal form needs S^n x H^n space forms of curvature +-1")
        n = c.nB
        value = 2.0 * n * c.mu**2 - 2.0 * n * (n - 1) * (n - 4)
        return _report(functional, direction, value, terms, dq, lq, "full-curvature conformal form")
    if k is FunctionalKind.W2:
        if not _riem_conformal_ok(product):
            return _undefined(functional, direction,
                              "W2 conformal form is only available by composition at S^n x H^n")
        n = c.n
        parts = [hessian_conformal(FunctionalId.riem(), product, direction).value,
                 hessian_conformal(FunctionalId.ric(), product, direction).value,
                 hessian_conformal(FunctionalId.s(), product, direction).value]
        value = parts[0] - 4.0 / (n - 2) * (parts[1] - parts[2] / (2.0 * (n - 1)))
        return _report(functional, direction, value, terms, dq, lq,
                       "Weyl decomposition R - 4/(n-2)(Ric - S/(2(n-1)))")
    raise UnsupportedCombination(str(functional))


def _oriented(product: ProductSpace, direction: MixedTT):
    """Positively curved factor first, a circle factor last (as the Weyl displays assume)."""
    f0, f1 = product.factors
    if f0.dim == 1 and f1.dim > 1 or (f0.sectional or 0.0) < 0 and (f1.sectional or 0.0) > 0:
        return ProductSpace((f1, f0)), direction.swapped()
    return product, direction


def _weyl_mixed_ok(product: ProductSpace) -> bool:
    f0, f1 = product.factors
    if not (f0.is_space_form and f1.is_space_form):
        return False
    if f0.dim >= 3 and f1.dim >= 3:
        return _close(f0.sectional, 1.0) and _close(f1.sectional, -1.0)
    if f0.dim >= 3 and f1.dim == 1:
        return _close(abs(f0.sectional), 1.0)
    return False


def _w2_mixed_display(n0: int, n1: int, d: MixedTT) -> float:
    n = n0 + n1
    nu0, nu1 = d.nus
    return (4.0 * (n - 3) / (n - 2) * d.quartic
            + (5.0 * (n1 - n0) + 4.0 * (n0 - 2 * n1 + 1) / (n - 2)) * nu0
            + (5.0 * (n1 - n0) + 4.0 * (2 * n0 - n1 - 1) / (n - 2)) * nu1
            + 8.0 * (n1 - n0) ** 2 * (n - 1) / (n * (n - 2)) + 8.0 * (n - 2)
            + 8.0 * (n0 * (n0 - 1) + n1 * (n1 - 1)) / n
            - 8.0 * (n1 - 1) * (n0 - 1) * (n - 4) / (n - 2)
            - 16.0 * (n0 * (n0 - 1) ** 2 + n1 * (n1 - 1) ** 2) / (n * (n - 2)))


def _riem_mixed_display(n0: int, n1: int, d: MixedTT) -> float:
    n = n0 + n1
    nu0, nu1 = d.nus
    return (4.0 * d.quartic - 8.0 * (n0 - 1) * (n1 - 1) + 8.0 * (n - 2)
            + (5.0 * (n1 - n0) - 4.0) * nu0 + (5.0 * (n1 - n0) + 4.0) * nu1
            + 8.0 / n * (n0 * (n0 - 1) + n1 * (n1 - 1)))


def hessian_mixed_tt(functional: FunctionalId, product: ProductSpace, direction: MixedTT,
                     strict_bochner: bool = False) -> QuadraticFormReport:
    """Second variation along ``h = alpha_0 . alpha_1`` with ``||alpha_i|| = 1``."""
    if len(product.factors) != 2:
        raise UnsupportedCombination("closed forms are available for two-factor products only")
    direction.validate(product, strict_bochner)
    k = functional.kind
    if k in (FunctionalKind.W2, FunctionalKind.WN_HALF, FunctionalKind.R):
        oriented, d = _oriented(product, direction)
        if not _weyl_mixed_ok(oriented):
            raise UnsupportedCombination("Weyl mixed form needs S^n0 x H^n1 (or a circle factor)")
        if oriented.factors[0].sectional < 0:
            raise UnsupportedCombination(
                "the tabulated Weyl display assumes the non-circle factor has curvature +1")
        n0, n1 = oriented.dims
        terms = mixed_terms(functional, oriented, d)
        dq, lq = d.quartic, d.nus
        if k is FunctionalKind.R:
            value = _riem_mixed_display(n0, n1, d)
            return _report(functional, direction, value, terms, dq, lq,
                           "full-curvature mixed form (curvature +-1)")
        value = _w2_mixed_display(n0, n1, d)
        notes = ["nu0 coefficient taken as 5(n1-n0) + 4(n0-2n1+1)/(n-2), the value forced by the Weyl decomposition"]
        if k is FunctionalKind.WN_HALF:
            notes.append("value is the W2 form; the WnHalf form is this times ||W||^((n-4)/2) (positivity-equivalent)")
        return _report(functional, direction, value, terms, dq, lq, "Weyl mixed form", notes)
    if not is_critical(functional, product):
        raise NotCritical(f"product is not critical for {functional}")
    terms = mixed_terms(functional, product, direction)
    dq, lq = direction.quartic, direction.nus
    case = _sign_case(product)
    l0, l1 = product.lambdas
    nu0, nu1 = direction.nus
    Q = direction.quartic
    if k is FunctionalKind.RIC or (k is FunctionalKind.FT and case == "opposite"
                                   and (functional.t == 0.0 or product.dims[0] == product.dims[1])):
        if case == "equal":
            lam = l0
            value = Q + 8.0 * lam * lam - 5.0 * lam * (nu0 + nu1)
            return _report(functional, direction, value, terms, dq, lq,
                           "mixed Ric form, equal case (first display)")
        value = Q - l0 * nu0 - l1 * nu1
        src = "mixed Ric form, opposite case"
        notes = ("Ft reduces to Ric here because the scalar part vanishes",) if k is FunctionalKind.FT else ()
        return _report(functional, direction, value, terms, dq, lq, src, notes)
    if k is FunctionalKind.S:
        s, n = product.scalar, product.total_dim
        if case == "equal":
            value = 2.0 * l0 * n * (2.0 * l0 - nu0 - nu1)
        else:
            value = 4.0 * s * s / n - 2.0 * s * (nu0 + nu1)
        return _report(functional, direction, value, terms, dq, lq, f"mixed scalar form, {case} case")
    if k is FunctionalKind.FT:
        t, n = functional.t, product.total_dim
        if case == "equal":
            lam = l0
            value = Q + 4.0 * lam * lam * (2.0 + t * n) - lam * (5.0 + 2.0 * t * n) * (nu0 + nu1)
            return _report(functional, direction, value, terms, dq, lq, "mixed Ft form, equal case")
        value = math.fsum(x.contribution(dq, lq) for x in terms)
        return _report(functional, direction, value, terms, dq, lq, "Ric + t S operator composition",
                       ("no tabulated display for this sign pattern; operator composition used",))
    raise UnsupportedCombination(str(functional))


def hessian_factor_tt(functional: FunctionalId, product: ProductSpace,
                      direction: FactorTT) -> QuadraticFormReport:
    """Hessian lower bound on TT-tensors pulled back from one factor (delegated to the factor)."""
    f = product.factor(direction.factor)
    bound = direction.factor_hessian_lower_bound
    if bound is not None:
        return QuadraticFormReport(functional, direction, float(bound), (), True,
                                   source="factor-level bound (supplied)")
    stable = f.ric_stable if functional.is_ric_like else (
        f.ft_stability(functional.t) if functional.kind is FunctionalKind.FT else TriState.UNKNOWN)
    if stable is TriState.NO:
        return QuadraticFormReport(functional, direction, NEG_INF, (), True,
                                   source="factor known unstable (sentinel)")
    raise MissingFactorData(f"no Hessian bound for TT-tensors of factor {direction.factor}")


def hessian(functional: FunctionalId, product: ProductSpace,
            direction: VariationDirection) -> QuadraticFormReport:
    if isinstance(direction, ConformalScale):
        return hessian_conformal(functional, product, direction)
    if isinstance(direction, MixedTT):
        return hessian_mixed_tt(functional, product, direction)
    if isinstance(direction, FactorTT):
        return hessian_factor_tt(functional, product, direction)
    raise DomainError(f"unknown direction {direction!r}")


# -- thresholds and polynomials ----------------------------------------------------


def threshold_c(a: int) -> float:
    """Largest root of ``(a+1)x^2 - (a-6)x - 2(a-4)``; ``-inf`` when the condition is vacuous."""
    if a < 3:
        raise DomainError("threshold_c needs a >= 3")
    if a in (3, 4):
        return NEG_INF
    return (a - 6 + math.sqrt(9.0 * a * a - 36.0 * a + 4.0)) / (2.0 * (a + 1))


def opposite_threshold(n0: int) -> float:
    """Bound on ``mu_1/lambda`` for ``f`` on the negative factor scaling the positive one."""
    disc = 9.0 * n0 * n0 - 20.0 * n0 - 28.0
    if disc < 0:
        return NEG_INF
    return ((n0 + 2) + math.sqrt(disc)) / (2.0 * (n0 + 1))


@dataclass(frozen=True)
class RicWarped:
    a: int


@dataclass(frozen=True)
class FtOpposite:
    n: int
    t: float
    branch: int = 0


def ft_coefficients(n: int, t: float) -> tuple[float, float, float, float, float]:
    """``(a, b0, b1, c, D)`` for the opposite-sign F_t polynomials ``a x^2 + b_i x + c``.

    ``D = 4nt(8n-7) + 9n^2 - 20n - 28`` is the tabulated expression; see
    :func:`ft_discriminant` for ``b_i^2 - 4ac`` itself.
    """
    if n < 3:
        raise DomainError("ft_coefficients needs n >= 3")
    a = (4.0 * t + 1.0) * n + 1.0
    b0 = -((8.0 * t + 1.0) * n + 2.0)
    c = 2.0 * (2.0 * t - 1.0) * n + 8.0
    D = 4.0 * n * t * (8 * n - 7) + (9.0 * n * n - 20.0 * n - 28.0)
    return a, b0, -b0, c, D


def ft_discriminant(n: int, t: float) -> float:
    """Exact discriminant ``b_i^2 - 4ac = 16nt(2n-7) + 9n^2 - 20n - 28``."""
    a, b0, _, c, _ = ft_coefficients(n, t)
    return b0 * b0 - 4.0 * a * c


def stability_polynomial(kind: RicWarped | FtOpposite, x: float) -> float:
    if x < 0:
        raise DomainError("stability polynomials are evaluated at x >= 0")
    if isinstance(kind, RicWarped):
        a = kind.a
        if a < 3:
            raise DomainError("RicWarped needs a >= 3")
        return (a + 1) * x * x - (a - 6) * x - 2.0 * (a - 4)
    if isinstance(kind, FtOpposite):
        if kind.branch not in (0, 1):
            raise DomainError("branch must be 0 or 1")
        a, b0, b1, c, _ = ft_coefficients(kind.n, kind.t)
        b = b0 if kind.branch == 0 else b1
        return a * x * x + b * x + c
    raise DomainError(f"unknown polynomial kind {kind!r}")


def ft_branch_root(n: int, t: float, branch: int) -> float:
    """Largest real root of ``p_branch`` (``-inf`` if none); uses the exact discriminant."""
    a, b0, b1, c, _ = ft_coefficients(n, t)
    b = b0 if branch == 0 else b1
    disc = b * b - 4.0 * a * c
    if a <= 0:
        return math.inf
    if disc < 0:
        return NEG_INF
    return (-b + math.sqrt(disc)) / (2.0 * a)
