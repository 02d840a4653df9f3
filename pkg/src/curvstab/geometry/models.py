"""Concrete metric models used by the numerical oracle.

Chart models assemble their metric from :mod:`jets` so that curvature uses
exact coordinate derivatives; the only finite differences anywhere in the
oracle are taken in the perturbation amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from ..errors import DegenerateMetric, DomainError, ModelUnavailable
from .curvature import CurvatureBundle, chart_curvature, lie_algebra_curvature
from .jets import Jet, cos, sin, stack


def sphere_volume(dim: int, radius: float = 1.0) -> float:
    """Volume of the round ``dim``-sphere of the given radius."""
    return 2.0 * math.pi ** ((dim + 1) / 2) / math.gamma((dim + 1) / 2) * radius**dim


def gegenbauer(degree: int, alpha: float, x):
    """Gegenbauer polynomial ``C_k^alpha(x)``; ``x`` may be a float or a Jet."""
    if degree == 0:
        return 1.0 + 0.0 * x
    prev, cur = 1.0 + 0.0 * x, 2.0 * alpha * x
    for k in range(2, degree + 1):
        prev, cur = cur, (2.0 * (k + alpha - 1) * x * cur - (k + 2 * alpha - 2) * prev) / k
    return cur


def zonal_mean_square(dim: int, degree: int) -> float:
    """Mean of ``C_k^{(n-1)/2}(cos theta)^2`` over the round ``dim``-sphere."""
    alpha = (dim - 1) / 2.0
    lg = math.lgamma
    # int_{-1}^{1} C_k(x)^2 (1-x^2)^(alpha-1/2) dx
    norm = math.exp(
        math.log(math.pi) + (1 - 2 * alpha) * math.log(2.0) + lg(degree + 2 * alpha)
        - lg(degree + 1) - 2 * lg(alpha)
    ) / (degree + alpha)
    weight = math.sqrt(math.pi) * math.exp(lg(dim / 2.0) - lg((dim + 1) / 2.0))
    return norm / weight


# -- chart factors ----------------------------------------------------------


@dataclass(frozen=True)
class SphereFactor:
    """Round sphere in hyperspherical angles ``(theta_1, ..., theta_n)``.

    ``theta_1`` is the polar angle, so ``cos(theta_1)`` is a first harmonic.
    """

    dim: int
    radius: float = 1.0

    @property
    def sectional(self) -> float:
        return 1.0 / self.radius**2

    def block(self, coords: list[Jet]) -> list[Jet]:
        diag = []
        warp = self.radius**2 + 0.0 * coords[0]
        for k in range(self.dim):
            diag.append(warp)
            warp = warp * sin(coords[k]) * sin(coords[k])
        return diag

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(0.3, math.pi - 0.3, size=self.dim)

    def reference_point(self) -> np.ndarray:
        return np.full(self.dim, math.pi / 2)


@dataclass(frozen=True)
class HyperbolicChart:
    """Poincare ball model of curvature ``-1/radius^2``; pointwise use only."""

    dim: int
    radius: float = 1.0

    @property
    def sectional(self) -> float:
        return -1.0 / self.radius**2

    def block(self, coords: list[Jet]) -> list[Jet]:
        rho2 = coords[0] * coords[0]
        for c in coords[1:]:
            rho2 = rho2 + c * c
        conf = 4.0 * self.radius**2 / ((1.0 - rho2) * (1.0 - rho2))
        return [conf] * self.dim

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        v = rng.normal(size=self.dim)
        return v / np.linalg.norm(v) * rng.uniform(0.0, 0.8)

    def reference_point(self) -> np.ndarray:
        return np.zeros(self.dim)


ChartFactor = Union[SphereFactor, HyperbolicChart]


# -- perturbations ---------------------------------------------------------


@dataclass(frozen=True)
class ConformalPerturbation:
    """``g -> g + t f g_target`` with ``f`` a zonal harmonic on ``source``.

    ``coefficient`` multiplies the Gegenbauer polynomial; ``None`` means the
    value that makes ``||f||_{L^2(M)} = 1``.
    """

    source: int
    target: int
    amplitude: float = 0.0
    degree: int = 1
    coefficient: float | None = None


@dataclass(frozen=True)
class FactorScaling:
    """``g -> g + t g_factor`` (a constant rescaling of one factor)."""

    factor: int
    amplitude: float = 0.0


@dataclass(frozen=True)
class MixedTTPerturbation:
    """``g -> g + t c (e^a (x) e^b + e^b (x) e^a)`` for frame indices ``a``, ``b``.

    ``coefficient = None`` normalizes ``c`` so that the one-forms ``e^a`` and
    ``e^b`` have unit L^2 norm on their own factors.
    """

    index0: int
    index1: int
    amplitude: float = 0.0
    coefficient: float | None = None


# -- chart products --------------------------------------------------------


@dataclass(frozen=True)
class ProductChart:
    """Riemannian product of chart factors; evaluated pointwise."""

    factors: tuple[ChartFactor, ...]

    integrable = False

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def offsets(self) -> list[int]:
        return list(np.cumsum((0,) + self.dims[:-1]))

    def _blocks(self, coords: list[Jet]) -> list[list[Jet]]:
        out, start = [], 0
        for f in self.factors:
            out.append(f.block(coords[start:start + f.dim]))
            start += f.dim
        return out

    def metric_jet(self, point) -> Jet:
        coords = Jet.variables(point)
        diag = [c for block in self._blocks(coords) for c in block]
        d = len(diag)
        rows = []
        for i in range(d):
            rows.append(stack([diag[i] if i == j else 0.0 for j in range(d)], d))
        return Jet(
            np.stack([r.val for r in rows]),
            np.stack([r.grad for r in rows]),
            np.stack([r.hess for r in rows]),
        )

    def curvature_at(self, point) -> CurvatureBundle:
        return chart_curvature(self.metric_jet(point))

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        return np.concatenate([f.sample_point(rng) for f in self.factors])


@dataclass(frozen=True)
class ProductSpheres(ProductChart):
    """Product of round spheres, optionally perturbed along one direction family."""

    perturbation: ConformalPerturbation | FactorScaling | None = None

    integrable = True

    def __post_init__(self):
        if not all(isinstance(f, SphereFactor) for f in self.factors):
            raise DomainError("ProductSpheres accepts SphereFactor entries only")
        p = self.perturbation
        if isinstance(p, ConformalPerturbation):
            k = len(self.factors)
            if not (0 <= p.source < k and 0 <= p.target < k) or p.source == p.target:
                raise DomainError("conformal perturbation needs distinct source/target factors")
            if self.factors[p.source].dim < 2:
                raise DomainError("source factor must have dimension >= 2")
            if p.degree < 1:
                raise DomainError("harmonic degree must be >= 1 (mean-zero)")

    @classmethod
    def of(cls, dims, radii=None, perturbation=None) -> "ProductSpheres":
        radii = radii if radii is not None else [1.0] * len(dims)
        return cls(tuple(SphereFactor(n, r) for n, r in zip(dims, radii)), perturbation)

    def with_amplitude(self, t: float) -> "ProductSpheres":
        if self.perturbation is None:
            raise DomainError("model has no perturbation")
        return replace(self, perturbation=replace(self.perturbation, amplitude=t))

    @property
    def reference_volume(self) -> float:
        return float(np.prod([sphere_volume(f.dim, f.radius) for f in self.factors]))

    # spectral data of the conformal direction
    def eigenvalue(self) -> float:
        p = self.perturbation
        src = self.factors[p.source]
        return p.degree * (p.degree + src.dim - 1) / src.radius**2

    def harmonic_coefficient(self) -> float:
        p = self.perturbation
        if p.coefficient is not None:
            return p.coefficient
        mean_sq = zonal_mean_square(self.factors[p.source].dim, p.degree)
        return 1.0 / math.sqrt(mean_sq * self.reference_volume)

    def harmonic(self, theta):
        p = self.perturbation
        src = self.factors[p.source]
        return self.harmonic_coefficient() * gegenbauer(p.degree, (src.dim - 1) / 2.0, cos(theta))

    def direction_scale(self) -> float:
        """Largest pointwise size of the unit-amplitude perturbation relative to g."""
        p = self.perturbation
        if isinstance(p, FactorScaling):
            return 1.0
        alpha = (self.factors[p.source].dim - 1) / 2.0
        return self.harmonic_coefficient() * abs(gegenbauer(p.degree, alpha, 1.0))

    def symmetry_factor(self) -> int:
        p = self.perturbation
        return p.source if isinstance(p, ConformalPerturbation) else 0

    def metric_jet(self, point) -> Jet:
        coords = Jet.variables(point)
        blocks = self._blocks(coords)
        p = self.perturbation
        if isinstance(p, ConformalPerturbation) and p.amplitude != 0.0:
            theta = coords[self.offsets()[p.source]]
            scale = 1.0 + p.amplitude * self.harmonic(theta)
            blocks[p.target] = [scale * c for c in blocks[p.target]]
        elif isinstance(p, FactorScaling) and p.amplitude != 0.0:
            blocks[p.factor] = [(1.0 + p.amplitude) * c for c in blocks[p.factor]]
        diag = [c for block in blocks for c in block]
        d = len(diag)
        rows = [stack([diag[i] if i == j else 0.0 for j in range(d)], d) for i in range(d)]
        return Jet(
            np.stack([r.val for r in rows]),
            np.stack([r.grad for r in rows]),
            np.stack([r.hess for r in rows]),
        )

    def node_point(self, theta: float) -> np.ndarray:
        """Chart point with the symmetry angle at ``theta`` and all other angles at pi/2."""
        point = np.concatenate([f.reference_point() for f in self.factors])
        point[self.offsets()[self.symmetry_factor()]] = theta
        return point

    def angular_measure(self) -> float:
        """Volume of the orbits fixed by the symmetry angle, per unit of sqrt(det g)."""
        a = self.symmetry_factor()
        out = sphere_volume(self.factors[a].dim - 1)
        for j, f in enumerate(self.factors):
            if j != a:
                out *= sphere_volume(f.dim)
        return out


def hyperbolic_product(sphere_dim: int, hyperbolic_dim: int) -> ProductChart:
    return ProductChart((SphereFactor(sphere_dim), HyperbolicChart(hyperbolic_dim)))


# -- Lie groups --------------------------------------------------------------


def su2_structure(radius: float = 1.0) -> np.ndarray:
    """su(2) in an orthonormal frame of the round 3-sphere of the given radius."""
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 2.0 / radius
        c[j, i, k] = -2.0 / radius
    return c


@dataclass(frozen=True)
class LieGroupModel:
    """Left-invariant metric on a compact Lie group given by frame data.

    ``metric`` is the base metric on the frame; ``volume`` is the total volume
    at that base metric.  ``blocks`` lists the frame indices of each factor.
    """

    structure: np.ndarray
    metric: np.ndarray
    volume: float
    blocks: tuple[tuple[int, ...], ...]
    factor_volumes: tuple[float, ...]
    perturbation: MixedTTPerturbation | None = None
    integrable: bool = field(default=True, init=False)

    @classmethod
    def su2_product(cls, radii=(1.0, 1.0), perturbation=None) -> "LieGroupModel":
        k = len(radii)
        d = 3 * k
        c = np.zeros((d, d, d))
        for i, r in enumerate(radii):
            s = slice(3 * i, 3 * i + 3)
            c[s, s, s] = su2_structure(r)
        vols = tuple(sphere_volume(3, r) for r in radii)
        blocks = tuple(tuple(range(3 * i, 3 * i + 3)) for i in range(k))
        return cls(c, np.eye(d), float(np.prod(vols)), blocks, vols, perturbation)

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    @property
    def reference_volume(self) -> float:
        return self.volume

    def factor_of(self, index: int) -> int:
        for i, b in enumerate(self.blocks):
            if index in b:
                return i
        raise DomainError(f"frame index {index} out of range")

    def with_amplitude(self, t: float) -> "LieGroupModel":
        if self.perturbation is None:
            raise DomainError("model has no perturbation")
        return replace(self, perturbation=replace(self.perturbation, amplitude=t))

    def direction(self) -> np.ndarray:
        """Frame components of the unit-amplitude perturbation tensor."""
        p = self.perturbation
        fa, fb = self.factor_of(p.index0), self.factor_of(p.index1)
        if fa == fb:
            raise DomainError("mixed perturbation must couple two different factors")
        coef = p.coefficient
        if coef is None:
            coef = 1.0 / math.sqrt(self.factor_volumes[fa] * self.factor_volumes[fb])
        h = np.zeros_like(self.metric)
        h[p.index0, p.index1] = h[p.index1, p.index0] = coef
        return h

    def direction_scale(self) -> float:
        return float(np.abs(self.direction()).max())

    def current_metric(self) -> np.ndarray:
        g = self.metric.copy()
        if self.perturbation is not None and self.perturbation.amplitude != 0.0:
            g = g + self.perturbation.amplitude * self.direction()
        return g

    def curvature_at(self, point=None) -> CurvatureBundle:
        # left-invariant: every point carries the same frame data
        return lie_algebra_curvature(self.structure, self.current_metric())

    def current_volume(self) -> float:
        g = self.current_metric()
        det = np.linalg.det(g) / np.linalg.det(self.metric)
        if det <= 0:
            raise DegenerateMetric("perturbed Lie-group metric is degenerate")
        return self.volume * math.sqrt(det)


MetricModel = Union[ProductSpheres, ProductChart, LieGroupModel]


def require_integrable(model) -> None:
    if not getattr(model, "integrable", False):
        from ..errors import NotIntegrable

        raise NotIntegrable(f"{type(model).__name__} is chart-only; global integrals unavailable")


def require_constructible(model) -> None:
    if isinstance(model, ProductChart) and any(
        isinstance(f, HyperbolicChart) for f in model.factors
    ) and getattr(model, "integrable", False):
        raise ModelUnavailable("hyperbolic factors have no global model")
