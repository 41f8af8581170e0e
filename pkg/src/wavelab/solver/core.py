"""Semi-discrete RHS, time stepping and the experiment run loop.

Element-local nodal arrays are shaped (K, L, m, n, n).  The U equation and
the PML auxiliary equations share the per-axis volume flux derivative
V_xi = (1/gamma_xi) A_xi D_xi U and the per-axis fluctuation injection
F_xi = H_xi^{-1} (e(-1) FL_xi + e(+1) FR_xi):

    dU/dt    = P (V_x + V_y - d_x w_x - d_y w_y - F_x - F_y)
    dw_xi/dt = V_xi - (d_xi + alpha_xi) w_xi - theta_xi F_xi

Auxiliary fields are stored only on elements overlapping a layer.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import diagnostics
from ..errors import UnstableRunError
from ..operators import lagrange_eval
from . import fluxes


@dataclass
class SolverConfig:
    theta_x: float = 1.0
    theta_y: float = 1.0
    cfl: float = 0.9
    final_time: float = 0.0
    stop_time: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.theta_x <= 1.0 and 0.0 <= self.theta_y <= 1.0):
            raise ValueError("theta must lie in [0, 1]")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("CFL must lie in (0, 1]")


@dataclass
class SimState:
    t: float
    U: np.ndarray
    w_x: np.ndarray  # (n_active_x, L, m, n, n)
    w_y: np.ndarray  # (K, n_active_y, m, n, n)

    def copy(self):
        return SimState(self.t, self.U.copy(), self.w_x.copy(),
                        self.w_y.copy())


def zero_state(mesh):
    n, m = mesh.n, mesh.m
    U = np.zeros((mesh.K, mesh.L, m, n, n))
    w_x = np.zeros((len(mesh.active_x), mesh.L, m, n, n))
    w_y = np.zeros((mesh.K, len(mesh.active_y), m, n, n))
    return SimState(t=0.0, U=U, w_x=w_x, w_y=w_y)


# -- semi-discrete right-hand side -------------------------------------------


def _volume_terms(mesh, U):
    D = mesh.ref.D
    DxU = np.einsum("pi,klmij->klmpj", D, U)
    Vx = np.einsum("ab,klbij->klaij", mesh.A_x, DxU)
    Vx *= (mesh.qx[:, None] * mesh.inv_gamma_x)[:, None, None, :, None]
    DyU = np.einsum("pj,klmij->klmip", D, U)
    Vy = np.einsum("ab,klbij->klaij", mesh.A_y, DyU)
    Vy *= (mesh.ry[:, None] * mesh.inv_gamma_y)[None, :, None, None, :]
    return Vx, Vy


def _x_fluctuations(mesh, U):
    """Per-element FL/FR vectors on west/east faces, shape (K, L, m, n)."""
    Uw = U[:, :, :, 0, :]
    Ue = U[:, :, :, -1, :]
    Zn = mesh.Z_normal["x"][..., None]
    r_w = mesh.boundary_r["west"]
    r_e = mesh.boundary_r["east"]
    if mesh.acoustic:
        FR_i, FL_i = fluxes.acoustic_face_fluctuations(
            "x",
            Ue[:-1, :, 0], Ue[:-1, :, 1], Zn[:-1],
            Uw[1:, :, 0], Uw[1:, :, 1], Zn[1:])
        FL_b = fluxes.acoustic_boundary_fluctuation(
            "x", "west", Uw[0, :, 0], Uw[0, :, 1], Zn[0], r_w)
        FR_b = fluxes.acoustic_boundary_fluctuation(
            "x", "east", Ue[-1, :, 0], Ue[-1, :, 1], Zn[-1], r_e)
    else:
        Zt = mesh.Z_tangential["x"][..., None]
        args_m = (Ue[:-1, :, 2], Ue[:-1, :, 4], Ue[:-1, :, 0], Ue[:-1, :, 1],
                  Zn[:-1], Zt[:-1])
        args_p = (Uw[1:, :, 2], Uw[1:, :, 4], Uw[1:, :, 0], Uw[1:, :, 1],
                  Zn[1:], Zt[1:])
        FR_i, FL_i = fluxes.elastic_face_fluctuations("x", *args_m, *args_p)
        FL_b = fluxes.elastic_boundary_fluctuation(
            "x", "west", Uw[0, :, 2], Uw[0, :, 4], Uw[0, :, 0], Uw[0, :, 1],
            Zn[0], Zt[0], r_w)
        FR_b = fluxes.elastic_boundary_fluctuation(
            "x", "east", Ue[-1, :, 2], Ue[-1, :, 4], Ue[-1, :, 0],
            Ue[-1, :, 1], Zn[-1], Zt[-1], r_e)
    FL = np.empty((mesh.K, mesh.L, mesh.m, mesh.n))
    FR = np.empty_like(FL)
    FL[1:] = FL_i
    FL[0] = FL_b
    FR[:-1] = FR_i
    FR[-1] = FR_b
    return FL, FR


def _y_fluctuations(mesh, U):
    Us = U[:, :, :, :, 0]
    Un = U[:, :, :, :, -1]
    Zn = mesh.Z_normal["y"][..., None]
    r_s = mesh.boundary_r["south"]
    r_n = mesh.boundary_r["north"]
    if mesh.acoustic:
        FR_i, FL_i = fluxes.acoustic_face_fluctuations(
            "y",
            Un[:, :-1, 0], Un[:, :-1, 2], Zn[:, :-1],
            Us[:, 1:, 0], Us[:, 1:, 2], Zn[:, 1:])
        FL_b = fluxes.acoustic_boundary_fluctuation(
            "y", "south", Us[:, 0, 0], Us[:, 0, 2], Zn[:, 0], r_s)
        FR_b = fluxes.acoustic_boundary_fluctuation(
            "y", "north", Un[:, -1, 0], Un[:, -1, 2], Zn[:, -1], r_n)
    else:
        Zt = mesh.Z_tangential["y"][..., None]
        args_m = (Un[:, :-1, 3], Un[:, :-1, 4], Un[:, :-1, 1], Un[:, :-1, 0],
                  Zn[:, :-1], Zt[:, :-1])
        args_p = (Us[:, 1:, 3], Us[:, 1:, 4], Us[:, 1:, 1], Us[:, 1:, 0],
                  Zn[:, 1:], Zt[:, 1:])
        FR_i, FL_i = fluxes.elastic_face_fluctuations("y", *args_m, *args_p)
        FL_b = fluxes.elastic_boundary_fluctuation(
            "y", "south", Us[:, 0, 3], Us[:, 0, 4], Us[:, 0, 1], Us[:, 0, 0],
            Zn[:, 0], Zt[:, 0], r_s)
        FR_b = fluxes.elastic_boundary_fluctuation(
            "y", "north", Un[:, -1, 3], Un[:, -1, 4], Un[:, -1, 1],
            Un[:, -1, 0], Zn[:, -1], Zt[:, -1], r_n)
    FL = np.empty((mesh.K, mesh.L, mesh.m, mesh.n))
    FR = np.empty_like(FL)
    FL[:, 1:] = FL_i
    FL[:, 0] = FL_b
    FR[:, :-1] = FR_i
    FR[:, -1] = FR_b
    return FL, FR


def _injection_x(mesh, FL, FR):
    """H_x^{-1} (e(-1) FL + e(+1) FR), nonzero only on face nodes."""
    F = np.zeros((mesh.K, mesh.L, mesh.m, mesh.n, mesh.n))
    h = mesh.ref.weights
    scale = mesh.qx[:, None, None, None]
    F[:, :, :, 0, :] = scale * FL / h[0]
    F[:, :, :, -1, :] = scale * FR / h[-1]
    return F


def _injection_y(mesh, FL, FR):
    F = np.zeros((mesh.K, mesh.L, mesh.m, mesh.n, mesh.n))
    h = mesh.ref.weights
    scale = mesh.ry[None, :, None, None]
    F[:, :, :, :, 0] = scale * FL / h[0]
    F[:, :, :, :, -1] = scale * FR / h[-1]
    return F


def rhs(state, mesh, config):
    """Time derivatives (dU, dw_x, dw_y) of the semi-discrete system."""
    U = state.U
    Vx, Vy = _volume_terms(mesh, U)
    Fx = _injection_x(mesh, *_x_fluctuations(mesh, U))
    Fy = _injection_y(mesh, *_y_fluctuations(mesh, U))

    body = Vx + Vy - Fx - Fy
    ax = mesh.active_x
    ay = mesh.active_y
    if ax.size:
        dx_nodes = mesh.d_x[ax][:, None, None, :, None]
        body[ax] -= dx_nodes * state.w_x
        dw_x = (Vx[ax] - (dx_nodes + mesh.alpha_x) * state.w_x
                - config.theta_x * Fx[ax])
    else:
        dw_x = np.zeros_like(state.w_x)
    if ay.size:
        dy_nodes = mesh.d_y[ay][None, :, None, None, :]
        body[:, ay] -= dy_nodes * state.w_y
        dw_y = (Vy[:, ay] - (dy_nodes + mesh.alpha_y) * state.w_y
                - config.theta_y * Fy[:, ay])
    else:
        dw_y = np.zeros_like(state.w_y)

    dU = np.einsum("klab,klbij->klaij", mesh.Pmat, body)
    return dU, dw_x, dw_y


# -- time stepping ------------------------------------------------------------


def timestep_formula(cfl, degree, c_max, min_elem, dim=2):
    """dt = CFL / (sqrt(dim) (2N+1) c_max) * min element size."""
    return cfl / (np.sqrt(dim) * (2 * degree + 1) * c_max) * min_elem


def timestep(config, mesh):
    min_elem = min(mesh.dx.min(), mesh.dy.min())
    return timestep_formula(config.cfl, mesh.N, mesh.c_max, min_elem)


def rk4_step(y, dt, f):
    """Classical four-stage Runge-Kutta update of a tuple of arrays."""
    k1 = f(y)
    k2 = f(tuple(a + 0.5 * dt * b for a, b in zip(y, k1)))
    k3 = f(tuple(a + 0.5 * dt * b for a, b in zip(y, k2)))
    k4 = f(tuple(a + dt * b for a, b in zip(y, k3)))
    return tuple(a + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
                 for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


def advance(state, dt, mesh, config):
    """One RK4 step; returns a new SimState at t + dt."""

    def f(y):
        tmp = SimState(state.t, y[0], y[1], y[2])
        return rhs(tmp, mesh, config)

    U, w_x, w_y = rk4_step((state.U, state.w_x, state.w_y), dt, f)
    return SimState(state.t + dt, U, w_x, w_y)


# -- initial data --------------------------------------------------------------


def gaussian_pulse(mesh, center=None, width_sq=9.0):
    """exp(-ln 2 ((x-cx)^2 + (y-cy)^2) / width_sq) on the nodes."""
    if center is None:
        x0, x1, y0, y1 = mesh.interior_box or mesh.extents
        center = (0.0, 0.5 * (y0 + y1))
    X, Y = mesh.node_coordinates()
    cx, cy = center
    return np.exp(-np.log(2.0) * ((X - cx) ** 2 + (Y - cy) ** 2) / width_sq)


def standing_mode(mesh, nx=1, ny=1, t=0.0):
    """Exact closed-box mode of a uniform acoustic medium with p = 0 walls.

    p = sin(kx (x - x0)) sin(ky (y - y0)) cos(w t),
    v_xi = -(k_xi / (rho w)) cos/sin ... sin(w t); returns nodal U.
    """
    assert mesh.acoustic
    med = mesh.media[0, 0]
    rho, c = med.rho, med.c
    x0, x1, y0, y1 = mesh.extents
    kx = nx * np.pi / (x1 - x0)
    ky = ny * np.pi / (y1 - y0)
    w = c * np.hypot(kx, ky)
    X, Y = mesh.node_coordinates()
    sx, cxv = np.sin(kx * (X - x0)), np.cos(kx * (X - x0))
    sy, cyv = np.sin(ky * (Y - y0)), np.cos(ky * (Y - y0))
    U = np.zeros((mesh.K, mesh.L, 3, mesh.n, mesh.n))
    U[:, :, 0] = sx * sy * np.cos(w * t)
    U[:, :, 1] = -(kx / (rho * w)) * cxv * sy * np.sin(w * t)
    U[:, :, 2] = -(ky / (rho * w)) * sx * cyv * np.sin(w * t)
    return U


def initial_state(mesh, init=None):
    """Build the t = 0 state; PML auxiliary fields start at zero."""
    state = zero_state(mesh)
    init = init or {"type": "gaussian-pulse"}
    kind = init.get("type", "gaussian-pulse")
    if kind == "zero":
        return state
    if kind == "gaussian-pulse":
        f = gaussian_pulse(mesh, center=init.get("center"),
                           width_sq=init.get("width_sq", 9.0))
        if mesh.acoustic:
            state.U[:, :, 0] = f
        else:
            state.U[:, :, 0] = f
            state.U[:, :, 1] = f
        return state
    if kind == "standing-mode":
        state.U[:] = standing_mode(mesh, init.get("nx", 1), init.get("ny", 1))
        return state
    raise ValueError(f"unknown initial condition {kind!r}")


# -- run loop -------------------------------------------------------------------


@dataclass
class RunRecord:
    times: np.ndarray = None
    linf: np.ndarray = None
    energy: np.ndarray = None
    dt: float = 0.0
    n_steps: int = 0
    status: str = "completed"
    blowup_time: float | None = None
    receiver_locations: list = field(default_factory=list)
    receiver_series: np.ndarray = None
    snapshots: dict = field(default_factory=dict)
    history_times: np.ndarray = None
    history: np.ndarray = None
    interior_range: tuple | None = None
    final_state: SimState = None
    mesh: object = None
    linf_field: str = ""


def _receiver_stencils(mesh, locations):
    out = []
    for (x, y) in locations:
        kx, ly = mesh.element_of_point(x, y)
        q = 2.0 * (x - mesh.x_edges[kx]) / mesh.dx[kx] - 1.0
        r = 2.0 * (y - mesh.y_edges[ly]) / mesh.dy[ly] - 1.0
        out.append((kx, ly, lagrange_eval(mesh.ref.nodes, q),
                    lagrange_eval(mesh.ref.nodes, r)))
    return out


def run(mesh, config, initial=None, receivers=(), snapshot_times=(),
        record_fields=False, history_stride=None, divergence_factor=1e4):
    """Step the system to the final (or stop) time, recording diagnostics.

    Raises UnstableRunError carrying the partial record if the state leaves
    the finite range or the monitored L-infinity norm exceeds
    ``divergence_factor`` times its initial value; the record is attached to
    the exception so growth histories remain available.
    """
    state = initial_state(mesh, initial) if not isinstance(initial, SimState) \
        else initial
    dt_max = timestep(config, mesh)
    n_steps = max(1, int(np.ceil(config.final_time / dt_max - 1e-12)))
    dt = config.final_time / n_steps
    stop_time = config.stop_time if config.stop_time is not None \
        else config.final_time
    linf_field = "p" if mesh.acoustic else "vmag"

    if record_fields:
        if mesh.interior_box is not None:
            kx0, kx1, ly0, ly1 = mesh.element_range_for_box(mesh.interior_box)
        else:
            kx0, kx1, ly0, ly1 = 0, mesh.K, 0, mesh.L
        stride = history_stride or max(1, n_steps // 400)
    else:
        kx0 = kx1 = ly0 = ly1 = 0
        stride = 0

    stencils = _receiver_stencils(mesh, receivers)
    snap_steps = {int(round(t / dt)): t for t in snapshot_times}

    times, linfs, energies = [], [], []
    rec_series = [[] for _ in stencils]
    hist_t, hist = [], []
    record = RunRecord(dt=dt, n_steps=n_steps,
                       receiver_locations=list(receivers), mesh=mesh,
                       linf_field=linf_field)

    def sample(step):
        t = step * dt
        times.append(t)
        linfs.append(diagnostics.linf_norm(state.U, linf_field, mesh))
        energies.append(diagnostics.discrete_energy(state.U, mesh))
        for i, (kx, ly, ex, ey) in enumerate(stencils):
            rec_series[i].append(
                np.einsum("mij,i,j->m", state.U[kx, ly], ex, ey))
        if step in snap_steps:
            record.snapshots[snap_steps[step]] = state.U.copy()
        if record_fields and step % stride == 0:
            hist_t.append(t)
            hist.append(state.U[kx0:kx1, ly0:ly1].copy())

    def finalize(status, blowup=None):
        record.times = np.array(times)
        record.linf = np.array(linfs)
        record.energy = np.array(energies)
        record.status = status
        record.blowup_time = blowup
        if stencils:
            record.receiver_series = np.array(rec_series)
        if record_fields:
            record.history_times = np.array(hist_t)
            record.history = np.array(hist)
            record.interior_range = (kx0, kx1, ly0, ly1)
        record.final_state = state
        return record

    sample(0)
    linf_bound = divergence_factor * linfs[0] if linfs[0] > 0 else np.inf
    for step in range(1, n_steps + 1):
        if (step - 1) * dt >= stop_time - 1e-12:
            break
        state = advance(state, dt, mesh, config)
        if not np.isfinite(state.U).all():
            finalize("unstable", blowup=state.t)
            raise UnstableRunError(
                f"non-finite state at t = {state.t:.6g} s",
                time=state.t, record=record)
        sample(step)
        if linfs[-1] > linf_bound:
            finalize("unstable", blowup=state.t)
            raise UnstableRunError(
                f"L-infinity norm diverged ({linfs[-1]:.3g} > "
                f"{divergence_factor:g} x initial) at t = {state.t:.6g} s",
                time=state.t, record=record)
    return finalize("completed")
