"""Riemann tensor assembly in coordinate charts and on Lie algebras.

Index convention: ``riemann[i, j, k, l]`` is the all-lower tensor with
sectional curvature ``K(e_i, e_j) = R_ijij / |e_i ^ e_j|^2`` (positive on
round spheres) and Ricci ``r_jl = g^{ik} R_ijkl``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateMetric
from .jets import Jet


@dataclass(frozen=True)
class CurvatureBundle:
    metric: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    basis: str = "coordinate"

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    @property
    def inverse_metric(self) -> np.ndarray:
        return np.linalg.inv(self.metric)

    def symmetry_residuals(self) -> dict[str, float]:
        """Relative residuals of the algebraic Riemann symmetries and the Ricci contraction."""
        R = self.riemann
        scale = max(np.abs(R).max(), 1e-300)
        gi = self.inverse_metric
        ric = np.einsum("ik,ijkl->jl", gi, R)
        return {
            "antisym_first_pair": np.abs(R + R.transpose(1, 0, 2, 3)).max() / scale,
            "antisym_second_pair": np.abs(R + R.transpose(0, 1, 3, 2)).max() / scale,
            "pair_exchange": np.abs(R - R.transpose(2, 3, 0, 1)).max() / scale,
            "bianchi": np.abs(
                R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
            ).max() / scale,
            "ricci_contraction": np.abs(ric - self.ricci).max() / max(np.abs(ric).max(), 1.0),
        }


@dataclass(frozen=True)
class InvariantSet:
    scalar: float
    ricci_sq: float
    riemann_sq: float
    weyl_sq: float


def _check_positive(g: np.ndarray) -> None:
    eig = np.linalg.eigvalsh(0.5 * (g + g.T))
    if eig.min() <= 0.0:
        raise DegenerateMetric(f"metric not positive definite (min eigenvalue {eig.min():.3e})")


def _bundle_from_riemann(g: np.ndarray, R: np.ndarray, basis: str) -> CurvatureBundle:
    gi = np.linalg.inv(g)
    ric = np.einsum("ik,ijkl->jl", gi, R)
    ric = 0.5 * (ric + ric.T)
    s = float(np.einsum("jl,jl", gi, ric))
    return CurvatureBundle(metric=g, riemann=R, ricci=ric, scalar=s, basis=basis)


def chart_curvature(metric: Jet) -> CurvatureBundle:
    """Curvature from a matrix-valued metric jet (exact first and second derivatives)."""
    g = metric.val
    _check_positive(g)
    gi = np.linalg.inv(g)
    dg = metric.grad    # dg[i, j, k] = d_k g_ij
    ddg = metric.hess   # ddg[i, j, k, l] = d_k d_l g_ij

    # first kind: gam1[k, i, j] = 1/2 (d_i g_jk + d_j g_ik - d_k g_ij)
    gam1 = 0.5 * (
        np.einsum("jki->kij", dg) + np.einsum("ikj->kij", dg) - np.einsum("ijk->kij", dg)
    )
    gam2 = np.einsum("mk,kij->mij", gi, gam1)

    R = 0.5 * (
        np.einsum("imkl->iklm", ddg)
        + np.einsum("klim->iklm", ddg)
        - np.einsum("ilkm->iklm", ddg)
        - np.einsum("kmil->iklm", ddg)
    )
    R += np.einsum("pkl,pim->iklm", gam1, gam2) - np.einsum("pkm,pil->iklm", gam1, gam2)
    return _bundle_from_riemann(g, R, "coordinate")


def lie_algebra_curvature(structure: np.ndarray, metric: np.ndarray) -> CurvatureBundle:
    """Curvature of a left-invariant metric in a left-invariant frame.

    ``structure[a, b, c]`` holds ``C^c_ab`` with ``[E_a, E_b] = C^c_ab E_c``;
    ``metric[a, b] = <E_a, E_b>``.  The Levi-Civita connection comes from
    Koszul's formula, which for left-invariant fields only involves brackets.
    """
    g = np.asarray(metric, dtype=float)
    _check_positive(g)
    C = np.asarray(structure, dtype=float)
    gi = np.linalg.inv(g)
    cl = np.einsum("abd,dc->abc", C, g)  # <[E_a, E_b], E_c>
    # <nabla_{E_a} E_b, E_c> = 1/2 (<[a,b],c> - <[b,c],a> + <[c,a],b>)
    low = 0.5 * (cl - np.einsum("bca->abc", cl) + np.einsum("cab->abc", cl))
    conn = np.einsum("abd,dc->abc", low, gi)  # nabla_{E_a} E_b = conn[a, b, c] E_c
    # R(E_a, E_b) E_c = nabla_a nabla_b E_c - nabla_b nabla_a E_c - nabla_[a,b] E_c
    rv = (
        np.einsum("bcd,ade->abce", conn, conn)
        - np.einsum("acd,bde->abce", conn, conn)
        - np.einsum("abd,dce->abce", C, conn)
    )
    rm = np.einsum("abce,ef->abcf", rv, g)  # <R(E_a,E_b)E_c, E_f>
    R = rm.transpose(0, 1, 3, 2)            # R_abcd = <R(E_a,E_b)E_d, E_c>
    return _bundle_from_riemann(g, R, "frame")


def raise_all(bundle: CurvatureBundle) -> np.ndarray:
    gi = bundle.inverse_metric
    return np.einsum("abcd,ae,bf,cg,dh->efgh", bundle.riemann, gi, gi, gi, gi, optimize=True)


def rcheck(bundle: CurvatureBundle) -> np.ndarray:
    """``Rcheck_pq = R_p^{ijk} R_qijk``."""
    gi = bundle.inverse_metric
    R = bundle.riemann
    return np.einsum("pijk,qabc,ia,jb,kc->pq", R, R, gi, gi, gi, optimize=True)


def invariants(bundle: CurvatureBundle) -> InvariantSet:
    """Scalar curvature, |Ric|^2, |Rm|^2 and |W|^2 (the last through the norm identity)."""
    n = bundle.dim
    gi = bundle.inverse_metric
    s = bundle.scalar
    ric_sq = float(np.einsum("ab,cd,ac,bd", bundle.ricci, bundle.ricci, gi, gi))
    riem_sq = float(np.einsum("abcd,abcd", bundle.riemann, raise_all(bundle)))
    if n < 3:
        weyl_sq = 0.0
    else:
        weyl_sq = riem_sq - 4.0 / (n - 2) * (ric_sq - s * s / (2.0 * (n - 1)))
        scale = max(riem_sq, 1.0)
        if abs(weyl_sq) <= 1e-10 * scale:
            weyl_sq = 0.0
    return InvariantSet(scalar=s, ricci_sq=ric_sq, riemann_sq=riem_sq, weyl_sq=weyl_sq)


def kulkarni_nomizu(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``(a o b)_ijkl = 1/2 (a_ik b_jl + a_jl b_ik - a_il b_jk - a_jk b_il)``."""
    return 0.5 * (
        np.einsum("ik,jl->ijkl", a, b)
        + np.einsum("jl,ik->ijkl", a, b)
        - np.einsum("il,jk->ijkl", a, b)
        - np.einsum("jk,il->ijkl", a, b)
    )


def weyl_tensor(bundle: CurvatureBundle) -> np.ndarray:
    """Full Weyl tensor; only used to cross-check the norm identity in low dimension."""
    n = bundle.dim
    g, ric, s = bundle.metric, bundle.ricci, bundle.scalar
    traceless = ric - s / n * g
    return (
        bundle.riemann
        - 2.0 / (n - 2) * kulkarni_nomizu(traceless, g)
        - s / (n * (n - 1)) * kulkarni_nomizu(g, g)
    )
