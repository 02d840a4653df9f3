"""Explicit model metrics, their curvature, and integrated functionals."""

from .curvature import CurvatureBundle, InvariantSet, chart_curvature, invariants, lie_algebra_curvature
from .functionals import FDResult, fd_first_derivative, fd_rcheck_pairing, fd_second_variation, functional_value
from .models import (
    ConformalPerturbation,
    FactorScaling,
    HyperbolicChart,
    LieGroupModel,
    MixedTTPerturbation,
    ProductChart,
    ProductSpheres,
    SphereFactor,
    hyperbolic_product,
)


def curvature_at(model, point=None) -> CurvatureBundle:
    return model.curvature_at(point)
