import math

import numpy as np
import pytest

from curvstab.errors import NotCritical, NotIntegrable, StepSelectionFailed, UnsupportedCombination
from curvstab.geometry import (
    ConformalPerturbation,
    LieGroupModel,
    MixedTTPerturbation,
    ProductSpheres,
    fd_first_derivative,
    fd_second_variation,
    functional_value,
    hyperbolic_product,
)
from curvstab.geometry.functionals import density, resolve_nodes
from curvstab.geometry.models import FactorScaling, gegenbauer, sphere_volume, zonal_mean_square
from curvstab.spectral_forms import FunctionalId

V33 = (2 * math.pi**2) ** 2


def test_unit_product_values():
    model = ProductSpheres.of((3, 3))
    assert functional_value(FunctionalId.ric(), model) == pytest.approx(24 * V33, rel=1e-12)
    assert functional_value(FunctionalId.s(), model) == pytest.approx(144 * V33, rel=1e-12)
    assert functional_value(FunctionalId.riem(), model) == pytest.approx(24 * V33, rel=1e-12)


def test_lie_model_integrates_by_homogeneity():
    lie = LieGroupModel.su2_product()
    for f in (FunctionalId.ric(), FunctionalId.s(), FunctionalId.ft(0.3), FunctionalId.w2()):
        chart = functional_value(f, ProductSpheres.of((3, 3)))
        assert functional_value(f, lie) == pytest.approx(chart, rel=1e-10)


@pytest.mark.parametrize("dim", [3, 4, 5])
def test_weyl_functional_vanishes_on_round_sphere(dim):
    value = functional_value(FunctionalId.w2(), ProductSpheres.of((dim,)))
    ric = functional_value(FunctionalId.ric(), ProductSpheres.of((dim,)))
    assert abs(value) <= 1e-12 * ric


@pytest.mark.parametrize("functional", [FunctionalId.ric(), FunctionalId.s(), FunctionalId.riem()])
def test_normalized_value_is_scale_invariant(functional):
    vals = [functional_value(functional, ProductSpheres.of((3, 5), (math.sqrt(c), math.sqrt(2 * c))),
                             normalized=True) for c in (0.5, 1.0, 2.0)]
    assert max(vals) - min(vals) <= 1e-9 * abs(vals[1])


def test_perturbed_value_is_quadrature_converged():
    model = ProductSpheres.of((3, 3), None, ConformalPerturbation(0, 1)).with_amplitude(0.05)
    n = resolve_nodes(FunctionalId.ric(), model)
    a = functional_value(FunctionalId.ric(), model, nodes=n)
    b = functional_value(FunctionalId.ric(), model, nodes=2 * n)
    assert a == pytest.approx(b, rel=1e-10)


def test_harmonic_normalization_is_unit_l2():
    model = ProductSpheres.of((3, 2), (1.2, 0.7), ConformalPerturbation(0, 1, degree=2))
    # int f^2 over M by the same one-angle reduction used for the functionals
    x, w = np.polynomial.legendre.leggauss(64)
    theta = 0.5 * math.pi * (x + 1)
    f = np.array([model.harmonic(t) for t in theta])
    radius = model.factors[0].radius
    weight = np.sin(theta) ** 2 * radius**3
    integral = 0.5 * math.pi * np.dot(w, f**2 * weight) * sphere_volume(2) * sphere_volume(2, 0.7)
    assert integral == pytest.approx(1.0, rel=1e-12)


def test_zonal_mean_square_matches_quadrature():
    for dim, k in ((3, 1), (4, 2), (5, 3)):
        alpha = (dim - 1) / 2
        x, w = np.polynomial.legendre.leggauss(80)
        th = 0.5 * math.pi * (x + 1)
        num = np.dot(w, gegenbauer(k, alpha, np.cos(th)) ** 2 * np.sin(th) ** (dim - 1))
        den = np.dot(w, np.sin(th) ** (dim - 1))
        assert zonal_mean_square(dim, k) == pytest.approx(num / den, rel=1e-12)


def test_chart_only_models_rejected():
    with pytest.raises(NotIntegrable):
        functional_value(FunctionalId.ric(), hyperbolic_product(3, 3))


def test_density_rejects_weyl_power():
    b = LieGroupModel.su2_product().curvature_at()
    with pytest.raises(UnsupportedCombination):
        density(FunctionalId.wn_half(), b)


def test_fd_matches_closed_value_first_harmonic():
    fd = fd_second_variation(FunctionalId.ric(), ProductSpheres.of((3, 3), None, ConformalPerturbation(0, 1)))
    assert fd.value == pytest.approx(39.0, rel=1e-6)
    assert fd.relative_error < 1e-6
    assert abs(fd.first_derivative) < 1e-8


def test_fd_not_critical_along_factor_scaling():
    model = ProductSpheres.of((3, 3), (1.0, 1.3), FactorScaling(1))
    with pytest.raises(NotCritical):
        fd_second_variation(FunctionalId.ric(), model)
    assert abs(fd_first_derivative(FunctionalId.ric(), model)) > 1.0


def test_fd_step_failure_is_reported():
    model = ProductSpheres.of((3, 3), None, ConformalPerturbation(0, 1))
    with pytest.raises(StepSelectionFailed):
        fd_second_variation(FunctionalId.ric(), model, rel_tol=1e-16)


def test_fd_lie_model_killing_direction_values():
    model = LieGroupModel.su2_product((1.0, 1.0), MixedTTPerturbation(0, 3))
    s = fd_second_variation(FunctionalId.s(), model)
    assert s.value == pytest.approx(-96.0, rel=1e-6)
    ric = fd_second_variation(FunctionalId.ric(), model)
    assert abs(ric.value) < 1e-6
