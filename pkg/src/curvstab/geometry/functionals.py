"""Integrated curvature functionals and their amplitude derivatives.

The normalized functional is ``Phi(t) = V(t)^{(4-n)/n} F(g_t)``; it is scale
invariant, so its critical points are critical points of ``F`` on unit-volume
metrics.  Derivatives are multiplied back by ``V_0^{(n-4)/n}`` so that they
compare directly with Hessians evaluated at the (non-unit) volume ``V_0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import (
    NotCritical,
    QuadratureNotConverged,
    StepSelectionFailed,
    UnsupportedCombination,
)
from ..spectral_forms import FunctionalId, FunctionalKind
from .curvature import CurvatureBundle, invariants, rcheck
from .models import LieGroupModel, ProductSpheres, require_integrable

QUAD_TOL = 1e-10
MIN_NODES = 16
MAX_NODES = 1024


def density(functional: FunctionalId, bundle: CurvatureBundle) -> float:
    """Pointwise integrand of ``functional`` (|r|^2, s^2, |R|^2, |W|^2, or |r|^2 + t s^2)."""
    inv = invariants(bundle)
    k = functional.kind
    if k is FunctionalKind.RIC:
        return inv.ricci_sq
    if k is FunctionalKind.S:
        return inv.scalar**2
    if k is FunctionalKind.FT:
        return inv.ricci_sq + functional.t * inv.scalar**2
    if k is FunctionalKind.R:
        return inv.riemann_sq
    if k is FunctionalKind.W2:
        # unclamped norm identity: the clamp would put a kink into the amplitude dependence
        n = bundle.dim
        return inv.riemann_sq - 4.0 / (n - 2) * (inv.ricci_sq - inv.scalar**2 / (2.0 * (n - 1)))
    raise UnsupportedCombination(f"no integrated form for {functional}")


def _theta_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w


def _sphere_quadrature(functional, model: ProductSpheres, nodes: int) -> tuple[float, float, float]:
    """``(F, V, C)`` by the polar-angle rule; other angles sit where their weights are 1.

    ``C`` integrates |R|^2 + |r|^2 + s^2 and sets the absolute scale of ``F``.
    """
    theta, w = _theta_rule(nodes)
    f_vals, v_vals, c_vals = [], [], []
    for th in theta:
        bundle = model.curvature_at(model.node_point(th))
        vol = math.sqrt(np.linalg.det(bundle.metric))
        inv = invariants(bundle)
        v_vals.append(vol)
        f_vals.append(density(functional, bundle) * vol)
        c_vals.append((inv.riemann_sq + inv.ricci_sq + inv.scalar**2) * vol)
    scale = model.angular_measure()
    return tuple(scale * float(np.dot(w, v)) for v in (f_vals, v_vals, c_vals))


def _sphere_integrals(functional, model: ProductSpheres, nodes: int) -> tuple[float, float]:
    F, V, _ = _sphere_quadrature(functional, model, nodes)
    return F, V


def resolve_nodes(functional: FunctionalId, model, tol: float | None = None) -> int:
    """Smallest doubling of the node count at which successive values agree to ``tol``."""
    if not isinstance(model, ProductSpheres):
        return 1
    tol = QUAD_TOL if tol is None else tol
    nodes = MIN_NODES
    prev = _sphere_quadrature(functional, model, nodes)
    while nodes < MAX_NODES:
        nodes *= 2
        cur = _sphere_quadrature(functional, model, nodes)
        floors = (cur[2], cur[1])  # F relative to the curvature scale, V to itself
        if all(abs(a - b) <= tol * max(abs(a), abs(b), fl)
               for a, b, fl in zip(cur[:2], prev[:2], floors)):
            return nodes
        prev = cur
    raise QuadratureNotConverged(f"no agreement to {tol} with {MAX_NODES} nodes")


def integrals(functional: FunctionalId, model, nodes: int | None = None) -> tuple[float, float]:
    """``(F(g), Vol(g))`` for an integrable model."""
    require_integrable(model)
    if isinstance(model, LieGroupModel):
        vol = model.current_volume()
        return density(functional, model.curvature_at()) * vol, vol
    if nodes is None:
        nodes = resolve_nodes(functional, model)
    return _sphere_integrals(functional, model, nodes)


def functional_value(functional: FunctionalId, model, normalized: bool = False,
                     nodes: int | None = None) -> float:
    """Integral of the curvature density; ``normalized`` multiplies by ``V^{(4-n)/n}``."""
    F, V = integrals(functional, model, nodes)
    if not normalized:
        return F
    n = model.dim
    return V ** ((4.0 - n) / n) * F


# -- amplitude derivatives ---------------------------------------------------------


@dataclass(frozen=True)
class FDResult:
    value: float
    error: float
    first_derivative: float
    step: float
    nodes: int

    @property
    def relative_error(self) -> float:
        return self.error / max(abs(self.value), 1.0)


def _base_step(model) -> float:
    return np.finfo(float).eps ** (1.0 / 6.0) / model.direction_scale()


def _phi_factory(functional, model, nodes):
    n = model.dim
    v0 = model.reference_volume
    rescale = v0 ** ((n - 4.0) / n)
    cache: dict[float, float] = {}

    def phi(t: float) -> float:
        if t not in cache:
            cache[t] = rescale * functional_value(functional, model.with_amplitude(t), True, nodes)
        return cache[t]

    return phi


def _stencil_nodes(functional, model, step: float) -> int:
    # resolve once at the widest stencil point, then hold fixed: a node count that
    # changes between stencil points would inject quadrature noise into the difference
    if not isinstance(model, ProductSpheres):
        return 1
    wide = max(resolve_nodes(functional, model.with_amplitude(s * 2.0 * step)) for s in (-1, 1))
    return min(2 * wide, MAX_NODES)


def _second(phi, h: float) -> float:
    return (-phi(2 * h) + 16 * phi(h) - 30 * phi(0.0) + 16 * phi(-h) - phi(-2 * h)) / (12 * h * h)


def _first(phi, h: float) -> float:
    return (phi(-2 * h) - 8 * phi(-h) + 8 * phi(h) - phi(2 * h)) / (12 * h)


def fd_first_derivative(functional: FunctionalId, model, step: float | None = None,
                        nodes: int | None = None) -> float:
    """``V_0^{(n-4)/n} d/dt Phi`` at ``t = 0`` (fourth-order central stencil)."""
    require_integrable(model)
    h = step if step is not None else _base_step(model)
    if nodes is None:
        nodes = _stencil_nodes(functional, model, h)
    phi = _phi_factory(functional, model, nodes)
    return _first(phi, h)


def fd_second_variation(functional: FunctionalId, model, step: float | None = None,
                        nodes: int | None = None, rel_tol: float = 1e-5,
                        critical_tol: float = 1e-6, check_critical: bool = True) -> FDResult:
    """Second amplitude derivative of the normalized functional at ``t = 0``.

    Five-point stencils at ``h`` and ``h/2`` combined by Richardson extrapolation;
    the reported error is the difference of the two raw estimates.
    """
    require_integrable(model)
    h = step if step is not None else _base_step(model)
    if nodes is None:
        nodes = _stencil_nodes(functional, model, h)
    phi = _phi_factory(functional, model, nodes)
    coarse, fine = _second(phi, h), _second(phi, h / 2)
    value = (16.0 * fine - coarse) / 15.0
    error = abs(fine - coarse)
    first = _first(phi, h / 2)
    scale = max(1.0, abs(value))
    if error > rel_tol * scale:
        raise StepSelectionFailed(f"stencil estimates disagree by {error:.3e} (value {value:.6g})")
    if check_critical and abs(first) > critical_tol * scale:
        raise NotCritical(f"first derivative {first:.3e} is not negligible; metric not critical")
    return FDResult(value=value, error=error, first_derivative=first, step=h, nodes=nodes)


def fd_rcheck_pairing(model: LieGroupModel, step: float | None = None) -> FDResult:
    """``<Rcheck'(h), h>_{L^2}`` by differentiating ``Rcheck`` at one point (homogeneous model)."""
    h_dir = model.direction()
    h = step if step is not None else 1e-3 / model.direction_scale()
    vol = model.reference_volume

    cache: dict[float, float] = {}

    def pairing(t: float) -> float:
        if t not in cache:
            cache[t] = float(np.sum(rcheck(model.with_amplitude(t).curvature_at()) * h_dir)) * vol
        return cache[t]

    def deriv(s: float) -> float:
        return (pairing(-2 * s) - 8 * pairing(-s) + 8 * pairing(s) - pairing(2 * s)) / (12 * s)

    coarse, fine = deriv(h), deriv(h / 2)
    return FDResult(value=(16.0 * fine - coarse) / 15.0, error=abs(fine - coarse),
                    first_derivative=math.nan, step=h, nodes=1)
