"""Rectangular Morley reference element on [-1, 1]^dim.

The shape space is P2 enriched with the pure cubes xi_i**3 (plus the mixed
cube xi_1*xi_2*xi_3 in 3D), giving 8 functions in 2D and 14 in 3D.  Degrees
of freedom are point values at the corners followed by mean outward normal
derivatives over the facets.  The nodal basis comes from inverting the
generalized Vandermonde matrix of the degrees of freedom applied to the
monomial basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .polynomial import Polynomial

VERTEX_VALUE = "vertex-value"
FACET_NORMAL_MEAN = "facet-mean-normal-derivative"

# Cubic shape functions: derivatives of order > 3 vanish identically, so
# requesting them is almost always a bug in the caller.
MAX_DERIVATIVE_ORDER = 3

# Unisolvence guard; the actual condition numbers are < 5 in both dimensions.
MAX_VANDERMONDE_COND = 1e8

SHAPE_MONOMIALS = {
    2: (
        (0, 0),
        (1, 0), (0, 1),
        (2, 0), (1, 1), (0, 2),
        (3, 0), (0, 3),
    ),
    3: (
        (0, 0, 0),
        (1, 0, 0), (0, 1, 0), (0, 0, 1),
        (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2),
        (3, 0, 0), (0, 3, 0), (0, 0, 3),
        (1, 1, 1),
    ),
}


def reference_corners(dim: int) -> np.ndarray:
    """Corners of [-1, 1]^dim with axis 0 toggling fastest."""
    out = np.empty((2 ** dim, dim))
    for c in range(2 ** dim):
        for a in range(dim):
            out[c, a] = 1.0 if (c >> a) & 1 else -1.0
    return out


@dataclass(frozen=True)
class DofFunctional:
    """One degree of freedom: a corner value or a facet mean normal derivative.

    Facet functionals use the outward normal of the reference cell, so
    normal_sign equals the side (+1 or -1) of the pinned coordinate.
    """

    kind: str
    point: tuple = None
    axis: int = None
    side: int = None
    normal_sign: float = None

    def apply(self, f: Polynomial) -> float:
        """Evaluate the functional on a polynomial, exactly."""
        if self.kind == VERTEX_VALUE:
            return float(f(np.array(self.point)))
        if self.kind == FACET_NORMAL_MEAN:
            return self.normal_sign * f.diff(self.axis).facet_mean(self.axis, self.side)
        raise ValueError(f"unknown functional kind {self.kind!r}")


def _reference_dofs(dim: int):
    dofs = []
    for corner in reference_corners(dim):
        dofs.append(DofFunctional(kind=VERTEX_VALUE, point=tuple(corner)))
    for axis in range(dim):
        for side in (-1, 1):
            dofs.append(
                DofFunctional(
                    kind=FACET_NORMAL_MEAN,
                    axis=axis,
                    side=side,
                    normal_sign=float(side),
                )
            )
    return tuple(dofs)


@dataclass(frozen=True)
class ReferenceElement:
    dim: int
    monomials: tuple
    dofs: tuple
    coeffs: np.ndarray  # coeffs[i, j]: monomial j weight in nodal basis function i
    basis: tuple
    cond: float

    @property
    def ndof(self) -> int:
        return len(self.dofs)

    @property
    def num_vertex_dofs(self) -> int:
        return 2 ** self.dim

    @property
    def facet_dof_mask(self) -> np.ndarray:
        return np.array([d.kind == FACET_NORMAL_MEAN for d in self.dofs])

    def apply_dof(self, i: int, f: Polynomial) -> float:
        return self.dofs[i].apply(f)

    def eval_basis(self, alpha, points) -> np.ndarray:
        """Tabulate d^alpha of every basis function at reference points.

        Returns shape (npts, ndof), or (ndof,) for a single point.
        """
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dim or any(a < 0 for a in alpha):
            raise ValueError(f"bad multi-index {alpha} for dim={self.dim}")
        if sum(alpha) > MAX_DERIVATIVE_ORDER:
            raise ValueError(
                f"derivative order {sum(alpha)} exceeds {MAX_DERIVATIVE_ORDER}; "
                "shape functions are cubic"
            )
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts.reshape(1, -1)
        out = np.empty((pts.shape[0], self.ndof))
        for j, phi in enumerate(self.basis):
            out[:, j] = phi.diff_multi(alpha)(pts)
        return out[0] if single else out


@lru_cache(maxsize=None)
def build_reference_element(dim: int) -> ReferenceElement:
    """Construct the nodal basis and verify unisolvence."""
    if dim not in SHAPE_MONOMIALS:
        raise ValueError(f"dim must be one of {sorted(SHAPE_MONOMIALS)}, got {dim!r}")
    monomials = SHAPE_MONOMIALS[dim]
    dofs = _reference_dofs(dim)
    ndof = len(dofs)
    if len(monomials) != ndof:
        raise AssertionError("shape space dimension must match the DOF count")

    vand = np.empty((ndof, ndof))
    for i, dof in enumerate(dofs):
        for j, exps in enumerate(monomials):
            vand[i, j] = dof.apply(Polynomial.monomial(dim, exps))
    cond = float(np.linalg.cond(vand))
    if not np.isfinite(cond) or cond > MAX_VANDERMONDE_COND:
        raise ArithmeticError(
            f"degrees of freedom are not unisolvent on the shape space (cond={cond:.3e})"
        )
    coeffs = np.linalg.inv(vand).T

    basis = tuple(
        Polynomial(dim, {exps: coeffs[i, j] for j, exps in enumerate(monomials)})
        for i in range(ndof)
    )
    # Nodal property must hold to rounding; fail loudly otherwise.
    delta = np.array([[dof.apply(phi) for phi in basis] for dof in dofs])
    err = np.max(np.abs(delta - np.eye(ndof)))
    if err > 1e-12:
        raise ArithmeticError(f"nodal basis verification failed (max deviation {err:.3e})")

    return ReferenceElement(dim, monomials, dofs, coeffs, basis, cond)


def physical_dof_scaling(element: ReferenceElement, h: float) -> np.ndarray:
    """Scale factors turning reference DOFs into physical ones on a cell of half-width h.

    Vertex values are invariant under the affine map; facet mean normal
    derivatives pick up a factor 1/h.
    """
    if h <= 0:
        raise ValueError(f"half-width must be positive, got {h!r}")
    scale = np.ones(element.ndof)
    scale[element.facet_dof_mask] = 1.0 / h
    return scale
