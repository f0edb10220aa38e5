"""Uniform Cartesian meshes of square (2D) or cubic (3D) cells on a box domain.

Entities are numbered lexicographically with axis 0 varying fastest.  Facets
are grouped by normal axis: all facets normal to axis 0 first, then axis 1,
and so on.  Global facet orientation is the positive coordinate direction of
the normal axis; elements see each facet with a sign (+1 when the global
normal is their outward normal, -1 otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SUPPORTED_DIMS = (2, 3)


@dataclass(frozen=True)
class CartesianMesh:
    dim: int
    n: int
    lower: tuple
    upper: tuple

    # -- sizes ---------------------------------------------------------------

    @property
    def side_length(self) -> float:
        return self.upper[0] - self.lower[0]

    @property
    def cell_width(self) -> float:
        return self.side_length / self.n

    @property
    def half_width(self) -> float:
        """Half the cell width; the scaling parameter of the affine cell map."""
        return 0.5 * self.cell_width

    @property
    def num_vertices(self) -> int:
        return (self.n + 1) ** self.dim

    @property
    def num_elements(self) -> int:
        return self.n ** self.dim

    @property
    def facets_per_axis(self) -> int:
        return (self.n + 1) * self.n ** (self.dim - 1)

    @property
    def num_facets(self) -> int:
        return self.dim * self.facets_per_axis

    # -- index arithmetic ------------------------------------------------------

    def _check_element(self, e: int):
        if not 0 <= e < self.num_elements:
            raise IndexError(f"element id {e} out of range [0, {self.num_elements})")

    def element_multi_index(self, e: int) -> tuple:
        self._check_element(e)
        idx = []
        for _ in range(self.dim):
            idx.append(e % self.n)
            e //= self.n
        return tuple(idx)

    def vertex_id(self, multi) -> int:
        vid = 0
        stride = 1
        for v in multi:
            vid += v * stride
            stride *= self.n + 1
        return vid

    def vertex_multi_index(self, v: int) -> tuple:
        if not 0 <= v < self.num_vertices:
            raise IndexError(f"vertex id {v} out of range [0, {self.num_vertices})")
        idx = []
        for _ in range(self.dim):
            idx.append(v % (self.n + 1))
            v //= self.n + 1
        return tuple(idx)

    def facet_id(self, axis: int, multi) -> int:
        """Facet normal to `axis`; multi[axis] in 0..n, other entries in 0..n-1."""
        fid = 0
        stride = 1
        for a, m in enumerate(multi):
            radix = self.n + 1 if a == axis else self.n
            fid += m * stride
            stride *= radix
        return axis * self.facets_per_axis + fid

    def facet_axis_and_multi(self, f: int) -> tuple:
        if not 0 <= f < self.num_facets:
            raise IndexError(f"facet id {f} out of range [0, {self.num_facets})")
        axis, rem = divmod(f, self.facets_per_axis)
        idx = []
        for a in range(self.dim):
            radix = self.n + 1 if a == axis else self.n
            idx.append(rem % radix)
            rem //= radix
        return axis, tuple(idx)

    # -- incidence ---------------------------------------------------------------

    def element_vertices(self, e: int) -> np.ndarray:
        """Corner vertex ids in reference corner order (axis 0 toggles fastest)."""
        cell = self.element_multi_index(e)
        out = np.empty(2 ** self.dim, dtype=np.int64)
        for corner in range(2 ** self.dim):
            multi = tuple(cell[a] + ((corner >> a) & 1) for a in range(self.dim))
            out[corner] = self.vertex_id(multi)
        return out

    def element_facets(self, e: int):
        """Pairs (facet id, sign) in local order (axis0-, axis0+, axis1-, ...).

        Sign +1 means the global facet normal is outward for this element.
        """
        cell = self.element_multi_index(e)
        out = []
        for axis in range(self.dim):
            for side, sign in ((0, -1.0), (1, 1.0)):
                multi = list(cell)
                multi[axis] = cell[axis] + side
                out.append((self.facet_id(axis, multi), sign))
        return tuple(out)

    def boundary_flags(self):
        """Boolean masks (vertex_on_boundary, facet_on_boundary)."""
        vflags = np.zeros(self.num_vertices, dtype=bool)
        for v in range(self.num_vertices):
            multi = self.vertex_multi_index(v)
            vflags[v] = any(m == 0 or m == self.n for m in multi)
        fflags = np.zeros(self.num_facets, dtype=bool)
        for f in range(self.num_facets):
            axis, multi = self.facet_axis_and_multi(f)
            fflags[f] = multi[axis] == 0 or multi[axis] == self.n
        return vflags, fflags

    # -- geometry -------------------------------------------------------------

    def vertex_coords(self, v: int) -> np.ndarray:
        multi = self.vertex_multi_index(v)
        return np.array([self.lower[a] + m * self.cell_width for a, m in enumerate(multi)])

    def element_geometry(self, e: int):
        """Center of the cell and the half-width h of its affine map."""
        cell = self.element_multi_index(e)
        center = np.array(
            [self.lower[a] + (c + 0.5) * self.cell_width for a, c in enumerate(cell)]
        )
        return center, self.half_width

    def facet_geometry(self, f: int):
        """Normal axis and midpoint of the facet."""
        axis, multi = self.facet_axis_and_multi(f)
        center = np.empty(self.dim)
        for a, m in enumerate(multi):
            if a == axis:
                center[a] = self.lower[a] + m * self.cell_width
            else:
                center[a] = self.lower[a] + (m + 0.5) * self.cell_width
        return axis, center


def build_mesh(dim: int, n: int, domain=None) -> CartesianMesh:
    """Mesh the box `domain` (default unit box) with n cells per axis.

    The element construction needs square cells, so the box must have equal
    extents on every axis.
    """
    if dim not in SUPPORTED_DIMS:
        raise ValueError(f"dim must be one of {SUPPORTED_DIMS}, got {dim!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"cell count per axis must be a positive integer, got {n!r}")
    if domain is None:
        lower = (0.0,) * dim
        upper = (1.0,) * dim
    else:
        lower = tuple(float(x) for x in domain[0])
        upper = tuple(float(x) for x in domain[1])
        if len(lower) != dim or len(upper) != dim:
            raise ValueError("domain bounds must match dim")
    extents = [u - l for l, u in zip(lower, upper)]
    if any(ext <= 0 for ext in extents):
        raise ValueError(f"domain must have positive extent on every axis, got {extents}")
    ref = extents[0]
    if any(abs(ext - ref) > 1e-12 * abs(ref) for ext in extents):
        raise ValueError(f"cells must be square: unequal box extents {extents}")
    return CartesianMesh(int(dim), int(n), lower, upper)
