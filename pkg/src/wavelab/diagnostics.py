"""Energy norms, L-infinity series, receiver sampling and PML error measures."""

from dataclasses import dataclass

import numpy as np

from .operators import lagrange_eval


def discrete_energy(U, mesh):
    """Medium-weighted discrete energy 1/2 sum h_i h_j J (U^T P^{-1} U)."""
    h = mesh.ref.weights
    PU = np.einsum("klab,klbij->klaij", mesh.Pinv, U)
    per_elem = np.einsum("klaij,klaij,i,j->kl", U, PU, h, h)
    return 0.5 * float(np.sum(mesh.jac * per_elem))


def weighted_l2(U, mesh):
    """Quadrature L2 norm sqrt(sum h_i h_j J |U|^2) over all fields."""
    h = mesh.ref.weights
    per_elem = np.einsum("klaij,klaij,i,j->kl", U, U, h, h)
    return float(np.sqrt(np.sum(mesh.jac * per_elem)))


def linf_norm(U, selector, mesh=None):
    """Max nodal magnitude of a selected field.

    Selectors: "p" (acoustic pressure), "vmag" (absolute particle velocity
    sqrt(vx^2 + vy^2)), "all" (max over every component), or an integer
    field index.
    """
    U = np.asarray(U)
    if selector == "all":
        return float(np.max(np.abs(U))) if U.size else 0.0
    if selector == "p":
        return float(np.max(np.abs(U[..., 0, :, :])))
    if selector == "vmag":
        if mesh is not None and mesh.acoustic:
            vx, vy = U[..., 1, :, :], U[..., 2, :, :]
        else:
            vx, vy = U[..., 0, :, :], U[..., 1, :, :]
        return float(np.sqrt(np.max(vx ** 2 + vy ** 2)))
    return float(np.max(np.abs(U[..., int(selector), :, :])))


def receiver_sample(U, mesh, location):
    """Tensor-product Lagrange evaluation of all fields at a point."""
    x, y = location
    kx, ly = mesh.element_of_point(x, y)
    q = 2.0 * (x - mesh.x_edges[kx]) / mesh.dx[kx] - 1.0
    r = 2.0 * (y - mesh.y_edges[ly]) / mesh.dy[ly] - 1.0
    ex = lagrange_eval(mesh.ref.nodes, q)
    ey = lagrange_eval(mesh.ref.nodes, r)
    return np.einsum("mij,i,j->m", U[kx, ly], ex, ey)


@dataclass
class ErrorSeries:
    times: np.ndarray
    linf: np.ndarray
    l2: np.ndarray

    def max_linf(self):
        return float(self.linf.max()) if self.linf.size else 0.0


def reference_validity_horizon(interior_box, reference_extents, c_max,
                               element_size):
    """Time until spurious reflections from the reference-domain boundary can
    re-enter the interior box: out-and-back travel distance over c_max, less
    a one-element safety margin."""
    ix0, ix1, iy0, iy1 = interior_box
    rx0, rx1, ry0, ry1 = reference_extents
    gaps = [g for g in (ix0 - rx0, rx1 - ix1, iy0 - ry0, ry1 - iy1) if g > 0]
    if not gaps:
        return 0.0
    dist = min(gaps)
    return max(0.0, (2.0 * dist - element_size) / c_max)


def _history_block(record, box):
    kx0, kx1, ly0, ly1 = record.mesh.element_range_for_box(box)
    ox0, _, oy0, _ = record.interior_range
    return record.history[:, kx0 - ox0:kx1 - ox0, ly0 - oy0:ly1 - oy0]


def pml_error(record, reference, interior_box, horizon=None, field=None):
    """L-infinity and L2 differences against a reference run on an interior box.

    Both runs must carry field history on meshes that agree (element size and
    degree) over ``interior_box``; times must line up sample-for-sample.
    Entries beyond the caller-supplied validity ``horizon`` are dropped.
    """
    if record.history is None or reference.history is None:
        raise ValueError("both runs must be recorded with record_fields=True")
    mesh_a, mesh_b = record.mesh, reference.mesh
    if mesh_a.N != mesh_b.N:
        raise ValueError("runs use different polynomial degrees")
    n = min(len(record.history_times), len(reference.history_times))
    ta = record.history_times[:n]
    tb = reference.history_times[:n]
    if not np.allclose(ta, tb, rtol=0, atol=1e-9):
        raise ValueError("recorded time grids do not line up")
    A = _history_block(record, interior_box)[:n]
    B = _history_block(reference, interior_box)[:n]
    if A.shape != B.shape:
        raise ValueError(
            f"interior histories have different shapes {A.shape} vs {B.shape}")
    if horizon is not None:
        keep = ta <= horizon + 1e-12
        ta, A, B = ta[keep], A[keep], B[keep]

    diff = A - B
    if field is None:
        field = record.linf_field
    h = mesh_a.ref.weights
    kx0, kx1, ly0, ly1 = mesh_a.element_range_for_box(interior_box)
    jac = mesh_a.jac[kx0:kx1, ly0:ly1]
    linf = np.array([linf_norm(d, field, mesh_a) for d in diff])
    per = np.einsum("tklaij,tklaij,i,j->tkl", diff, diff, h, h)
    l2 = np.sqrt(np.sum(per * jac, axis=(1, 2)))
    return ErrorSeries(times=ta, linf=linf, l2=l2)
