"""Gauss-Legendre quadrature on the reference box [-1, 1]^dim and its facets."""

from dataclasses import dataclass

import numpy as np

# Tabulated Legendre nodes lose accuracy for very large orders; everything in
# this package integrates polynomials of modest degree, so cap the 1D rule.
MAX_POINTS_1D = 16


@dataclass(frozen=True)
class QuadRule:
    """Point set and weights embedded in dim-dimensional coordinates.

    For volume rules the weights sum to 2**dim.  Facet rules pin one
    coordinate at +-1 and their weights sum to 2**(dim - 1).
    """

    dim: int
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.points.ndim != 2 or self.points.shape[1] != self.dim:
            raise ValueError("points must have shape (npts, dim)")
        if self.weights.shape != (self.points.shape[0],):
            raise ValueError("weights must have shape (npts,)")

    @property
    def num_points(self) -> int:
        return self.points.shape[0]


def gauss_legendre_1d(n: int) -> QuadRule:
    """Classical n-point Gauss-Legendre rule on [-1, 1], exact to degree 2n - 1."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_POINTS_1D:
        raise ValueError(f"point count must be an integer in [1, {MAX_POINTS_1D}], got {n!r}")
    x, w = np.polynomial.legendre.leggauss(int(n))
    return QuadRule(1, x.reshape(-1, 1), w.copy())


def tensor_rule(dim: int, n_per_axis: int) -> QuadRule:
    """Tensor product of 1D Gauss rules over [-1, 1]^dim."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    line = gauss_legendre_1d(n_per_axis)
    x1 = line.points[:, 0]
    grids = np.meshgrid(*([x1] * dim), indexing="ij")
    # Reverse the stacking order so axis 0 varies fastest in the flat listing.
    pts = np.stack([g.reshape(-1) for g in grids], axis=1)[:, ::-1].copy()
    wgrids = np.meshgrid(*([line.weights] * dim), indexing="ij")
    w = np.ones(pts.shape[0])
    for g in wgrids:
        w = w * g.reshape(-1)
    return QuadRule(dim, pts, w)


def facet_rule(dim: int, axis: int, side: int, n_per_axis: int) -> QuadRule:
    """Gauss rule on the facet of [-1, 1]^dim where coordinate `axis` is pinned at `side`.

    Points are returned in full dim-dimensional coordinates.
    """
    if dim < 2:
        raise ValueError("facet rules need dim >= 2")
    if not 0 <= axis < dim:
        raise ValueError(f"axis out of range for dim={dim}: {axis}")
    if side not in (-1, 1):
        raise ValueError(f"side must be -1 or +1, got {side!r}")
    base = tensor_rule(dim - 1, n_per_axis)
    pts = np.empty((base.num_points, dim))
    free = [a for a in range(dim) if a != axis]
    pts[:, free] = base.points
    pts[:, axis] = float(side)
    return QuadRule(dim, pts, base.weights.copy())


def integrate_monomial_box(exponents) -> float:
    """Exact integral of prod_i xi_i**e_i over [-1, 1]^len(exponents).

    Odd exponents integrate to zero; even ones contribute 2 / (e + 1).
    """
    val = 1.0
    for e in exponents:
        if not isinstance(e, (int, np.integer)) or e < 0:
            raise ValueError(f"exponents must be nonnegative integers, got {e!r}")
        if e % 2 == 1:
            return 0.0
        val *= 2.0 / (e + 1)
    return val
