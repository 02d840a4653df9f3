"""Order-2 truncated Taylor arithmetic over numpy arrays.

A :class:`Jet` carries a value together with its gradient and Hessian with
respect to a fixed set of ``dim`` coordinates.  Values may be arrays of any
shape; derivative axes are appended on the right, so ``grad`` has shape
``value.shape + (dim,)`` and ``hess`` has shape ``value.shape + (dim, dim)``.

Metric component functions built from these jets give exact first and second
coordinate derivatives, which is all the Christoffel/Riemann assembly needs.
"""

from __future__ import annotations

import numpy as np


class Jet:
    __slots__ = ("val", "grad", "hess")
    __array_priority__ = 100.0

    def __init__(self, val, grad, hess):
        self.val = np.asarray(val, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @property
    def dim(self) -> int:
        return self.grad.shape[-1]

    @classmethod
    def constant(cls, value, dim: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        return cls(value, np.zeros(value.shape + (dim,)), np.zeros(value.shape + (dim, dim)))

    @classmethod
    def variables(cls, point) -> list["Jet"]:
        """Independent coordinate jets ``x_0, ..., x_{d-1}`` at ``point``."""
        point = np.asarray(point, dtype=float)
        dim = point.size
        eye = np.eye(dim)
        zero = np.zeros((dim, dim))
        return [cls(point[k], eye[k], zero) for k in range(dim)]

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.dim)

    def __add__(self, other):
        other = self._lift(other)
        return Jet(self.val + other.val, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        a, b = self.val[..., None], other.val[..., None]
        ga, gb = self.grad, other.grad
        hess = (
            self.hess * b[..., None]
            + other.hess * a[..., None]
            + ga[..., :, None] * gb[..., None, :]
            + gb[..., :, None] * ga[..., None, :]
        )
        return Jet(self.val * other.val, ga * b + gb * a, hess)

    __rmul__ = __mul__

    def _chain(self, f0, f1, f2) -> "Jet":
        # f(u): f'(u) grad u,  f''(u) grad u grad u^T + f'(u) hess u
        d1 = np.asarray(f1)[..., None]
        d2 = np.asarray(f2)[..., None, None]
        g = self.grad
        return Jet(
            f0,
            d1 * g,
            d2 * (g[..., :, None] * g[..., None, :]) + d1[..., None] * self.hess,
        )

    def reciprocal(self) -> "Jet":
        v = self.val
        return self._chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, p: float):
        v = self.val
        return self._chain(v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))

    def sin(self) -> "Jet":
        return self._chain(np.sin(self.val), np.cos(self.val), -np.sin(self.val))

    def cos(self) -> "Jet":
        return self._chain(np.cos(self.val), -np.sin(self.val), -np.cos(self.val))

    def sqrt(self) -> "Jet":
        return self**0.5

    def __repr__(self) -> str:
        return f"Jet(val={self.val!r})"


def sin(x):
    return x.sin() if isinstance(x, Jet) else np.sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet) else np.cos(x)


def stack(jets, dim: int) -> Jet:
    """Stack scalar-valued jets (or plain numbers) into one array-valued jet."""
    lifted = [j if isinstance(j, Jet) else Jet.constant(j, dim) for j in jets]
    return Jet(
        np.stack([j.val for j in lifted]),
        np.stack([j.grad for j in lifted]),
        np.stack([j.hess for j in lifted]),
    )
