"""Smooth closed-form functions with analytic derivatives up to second order.

These drive interpolation studies and eigenvalue error identities.  Every
function object exposes value / gradient / hessian, vectorized over leading
point axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polynomial import Polynomial


@dataclass(frozen=True)
class SineProduct:
    """amplitude * prod_i sin(m_i pi x_i) on the unit box."""

    modes: tuple
    amplitude: float = 1.0

    def __post_init__(self):
        if any(not isinstance(m, (int, np.integer)) or m < 1 for m in self.modes):
            raise ValueError(f"modes must be positive integers, got {self.modes!r}")

    @property
    def dim(self) -> int:
        return len(self.modes)

    def _trig(self, x):
        pts = np.asarray(x, dtype=float)
        freq = np.pi * np.asarray(self.modes, dtype=float)
        arg = pts * freq
        return np.sin(arg), np.cos(arg), freq

    def value(self, x):
        s, _, _ = self._trig(x)
        return self.amplitude * np.prod(s, axis=-1)

    def gradient(self, x):
        s, c, freq = self._trig(x)
        # One sine factor swapped for its derivative per component; the
        # product over the remaining axes is rebuilt to stay safe at zeros.
        out = np.empty_like(s)
        for a in range(self.dim):
            rest = np.prod(np.delete(s, a, axis=-1), axis=-1)
            out[..., a] = freq[a] * c[..., a] * rest
        return self.amplitude * out

    def hessian(self, x):
        s, c, freq = self._trig(x)
        shape = s.shape[:-1] + (self.dim, self.dim)
        out = np.empty(shape)
        for a in range(self.dim):
            for b in range(self.dim):
                factors = []
                for axis in range(self.dim):
                    order = (axis == a) + (axis == b)
                    if order == 0:
                        factors.append(s[..., axis])
                    elif order == 1:
                        factors.append(freq[axis] * c[..., axis])
                    else:
                        factors.append(-(freq[axis] ** 2) * s[..., axis])
                out[..., a, b] = np.prod(np.stack(factors, axis=-1), axis=-1)
        return self.amplitude * out


def unit_box_eigenfunction(modes) -> SineProduct:
    """L2-normalized sine product on the unit box."""
    modes = tuple(int(m) for m in modes)
    return SineProduct(modes, amplitude=2.0 ** (len(modes) / 2.0))


def sine_eigenvalue(modes) -> float:
    """Biharmonic eigenvalue of the matching sine product: (sum m_i^2)^2 pi^4."""
    return float(sum(m * m for m in modes)) ** 2 * np.pi ** 4


@dataclass(frozen=True)
class PolynomialFunction:
    """Polynomial in physical coordinates wrapped with analytic derivatives."""

    poly: Polynomial

    @property
    def dim(self) -> int:
        return self.poly.dim

    def value(self, x):
        pts = np.asarray(x, dtype=float)
        vals = self.poly(pts.reshape(-1, self.dim))
        return np.asarray(vals).reshape(pts.shape[:-1])

    def gradient(self, x):
        pts = np.asarray(x, dtype=float)
        flat = pts.reshape(-1, self.dim)
        out = np.empty(flat.shape)
        for a in range(self.dim):
            out[:, a] = self.poly.diff(a)(flat)
        return out.reshape(pts.shape)

    def hessian(self, x):
        pts = np.asarray(x, dtype=float)
        flat = pts.reshape(-1, self.dim)
        out = np.empty((flat.shape[0], self.dim, self.dim))
        for a in range(self.dim):
            for b in range(a, self.dim):
                vals = self.poly.diff(a).diff(b)(flat)
                out[:, a, b] = vals
                out[:, b, a] = vals
        return out.reshape(pts.shape[:-1] + (self.dim, self.dim))


@dataclass(frozen=True)
class ScaledFunction:
    """base function times a constant factor."""

    base: object
    factor: float

    @property
    def dim(self) -> int:
        return self.base.dim

    def value(self, x):
        return self.factor * self.base.value(x)

    def gradient(self, x):
        return self.factor * self.base.gradient(x)

    def hessian(self, x):
        return self.factor * self.base.hessian(x)
