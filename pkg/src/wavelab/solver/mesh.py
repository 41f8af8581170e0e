"""Conforming rectangular element grid with per-element media and damping."""

import numpy as np

from ..errors import ConfigurationError
from ..media import is_acoustic
from ..operators import ReferenceElement1D

SIDES = ("west", "east", "south", "north")


def _count_elements(lo, hi, size, what):
    span = hi - lo
    count = span / size
    rounded = round(count)
    if rounded < 1 or abs(count - rounded) > 1e-9 * max(1.0, abs(count)):
        raise ConfigurationError(
            f"element size {size} does not divide the {what} extent {span}")
    return int(rounded)


class Mesh:
    """K x L grid of affine elements holding media, impedances and damping.

    Element (kx, ly) spans [x_edges[kx], x_edges[kx+1]] x
    [y_edges[ly], y_edges[ly+1]].  Nodal data arrays are indexed
    (kx, ly, field, i, j) with i the x-node and j the y-node.
    """

    def __init__(self, x_edges, y_edges, degree, media_grid, boundary_r,
                 profiles=(), interior_box=None):
        self.x_edges = np.asarray(x_edges, dtype=float)
        self.y_edges = np.asarray(y_edges, dtype=float)
        self.K = len(self.x_edges) - 1
        self.L = len(self.y_edges) - 1
        self.ref = ReferenceElement1D(degree)
        self.N = degree
        self.n = degree + 1
        self.boundary_r = dict(boundary_r)
        for side in SIDES:
            r = self.boundary_r.get(side)
            if r is None or abs(r) > 1.0:
                raise ConfigurationError(
                    f"boundary reflection coefficient for {side!r} must be "
                    f"in [-1, 1], got {r}")
        self.profiles = tuple(profiles)
        self.interior_box = interior_box  # (x0, x1, y0, y1) without layers

        self.dx = np.diff(self.x_edges)
        self.dy = np.diff(self.y_edges)
        self.qx = 2.0 / self.dx
        self.ry = 2.0 / self.dy
        self.jac = 0.25 * np.outer(self.dx, self.dy)

        q = self.ref.nodes
        # nodal coordinates, (K, n) and (L, n)
        self.xn = self.x_edges[:-1, None] + 0.5 * self.dx[:, None] * (1.0 + q)
        self.yn = self.y_edges[:-1, None] + 0.5 * self.dy[:, None] * (1.0 + q)

        self._install_media(media_grid)
        self._install_damping()

    # -- media ------------------------------------------------------------

    def _install_media(self, media_grid):
        media_grid = np.asarray(media_grid, dtype=object)
        if media_grid.shape != (self.K, self.L):
            raise ConfigurationError(
                f"media grid shape {media_grid.shape} does not match the "
                f"{self.K}x{self.L} element grid")
        self.media = media_grid
        first = media_grid[0, 0]
        self.acoustic = is_acoustic(first)
        cm0 = first.coefficient_matrices()
        self.m = cm0.m
        self.fields = cm0.fields
        self.A_x = cm0.A_x
        self.A_y = cm0.A_y
        self.Pmat = np.empty((self.K, self.L, self.m, self.m))
        self.Pinv = np.empty_like(self.Pmat)
        # per-element, per-axis impedances for the face characteristics
        self.Z_normal = {"x": np.empty((self.K, self.L)),
                         "y": np.empty((self.K, self.L))}
        self.Z_tangential = {"x": np.empty((self.K, self.L)),
                             "y": np.empty((self.K, self.L))}
        c_max = 0.0
        for kx in range(self.K):
            for ly in range(self.L):
                med = media_grid[kx, ly]
                if is_acoustic(med) != self.acoustic:
                    raise ConfigurationError(
                        "piecewise media must share the same system type")
                cm = med.coefficient_matrices()
                self.Pmat[kx, ly] = cm.P
                self.Pinv[kx, ly] = np.linalg.inv(cm.P)
                for axis in ("x", "y"):
                    imp = med.impedances(axis)
                    self.Z_normal[axis][kx, ly] = imp.normal
                    self.Z_tangential[axis][kx, ly] = (
                        imp.tangential if imp.tangential is not None else 0.0)
                c_max = max(c_max, med.wave_speeds().c_p)
        self.c_max = c_max

    # -- damping ----------------------------------------------------------

    def _install_damping(self):
        self.d_x = np.zeros((self.K, self.n))
        self.d_y = np.zeros((self.L, self.n))
        gx = np.ones((self.K, self.n))
        gy = np.ones((self.L, self.n))
        self.alpha_x = 0.0
        self.alpha_y = 0.0
        for prof in self.profiles:
            if prof.axis == "x":
                self.d_x += prof.damping_at(self.xn)
                self.alpha_x = prof.alpha
                gx += (prof.gamma - 1.0) * self._ramp(prof, self.xn)
            else:
                self.d_y += prof.damping_at(self.yn)
                self.alpha_y = prof.alpha
                gy += (prof.gamma - 1.0) * self._ramp(prof, self.yn)
        self.inv_gamma_x = 1.0 / gx
        self.inv_gamma_y = 1.0 / gy
        self.active_x = np.where(self.d_x.max(axis=1) > 0.0)[0]
        self.active_y = np.where(self.d_y.max(axis=1) > 0.0)[0]

    @staticmethod
    def _ramp(prof, xi):
        """Smooth 0..1 ramp through the layer (same monomial as the damping),
        so gamma != 1 joins the interior continuously."""
        if prof.side == "high":
            depth = (xi - prof.interior_extent) / prof.width
        else:
            depth = (prof.interior_extent - xi) / prof.width
        return np.clip(depth, 0.0, 1.0) ** prof.exponent

    # -- geometry helpers ---------------------------------------------------

    @property
    def extents(self):
        return (self.x_edges[0], self.x_edges[-1],
                self.y_edges[0], self.y_edges[-1])

    def element_of_point(self, x, y):
        x0, x1, y0, y1 = self.extents
        if not (x0 <= x <= x1 and y0 <= y <= y1):
            raise ValueError(f"point ({x}, {y}) is outside the mesh")
        kx = min(int(np.searchsorted(self.x_edges, x, side="right")) - 1,
                 self.K - 1)
        ly = min(int(np.searchsorted(self.y_edges, y, side="right")) - 1,
                 self.L - 1)
        return max(kx, 0), max(ly, 0)

    def node_coordinates(self):
        """Full nodal coordinate arrays of shape (K, L, n, n)."""
        X = np.broadcast_to(self.xn[:, None, :, None],
                            (self.K, self.L, self.n, self.n))
        Y = np.broadcast_to(self.yn[None, :, None, :],
                            (self.K, self.L, self.n, self.n))
        return X, Y

    def element_range_for_box(self, box):
        """Element index ranges (kx0, kx1, ly0, ly1) covering a coordinate box
        whose edges must lie on element boundaries."""
        x0, x1, y0, y1 = box

        def locate(edges, v):
            i = int(np.argmin(np.abs(edges - v)))
            if abs(edges[i] - v) > 1e-9 * max(1.0, abs(v)):
                raise ConfigurationError(
                    f"box edge {v} does not lie on an element boundary")
            return i

        return (locate(self.x_edges, x0), locate(self.x_edges, x1),
                locate(self.y_edges, y0), locate(self.y_edges, y1))


def build_mesh(x0, x1, y0, y1, element_size, degree, media_grid_fn,
               boundary_r, profiles=()):
    """Tile [x0,x1] x [y0,y1] with square-count-validated elements.

    ``media_grid_fn(xc, yc)`` returns the medium for the element centered at
    (xc, yc).
    """
    K = _count_elements(x0, x1, element_size, "x")
    L = _count_elements(y0, y1, element_size, "y")
    x_edges = x0 + element_size * np.arange(K + 1)
    y_edges = y0 + element_size * np.arange(L + 1)
    # exact tiling of the stated extents
    x_edges[-1] = x1
    y_edges[-1] = y1
    grid = np.empty((K, L), dtype=object)
    for kx in range(K):
        for ly in range(L):
            xc = 0.5 * (x_edges[kx] + x_edges[kx + 1])
            yc = 0.5 * (y_edges[ly] + y_edges[ly + 1])
            grid[kx, ly] = media_grid_fn(xc, yc)
    return Mesh(x_edges, y_edges, degree, grid, boundary_r, profiles)
