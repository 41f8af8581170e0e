"""Reference-element machinery: GLL quadrature, derivative matrix, SBP norm.

All operators live on the reference interval [-1, 1].  Physical elements are
affine images of the reference square; metric factors are applied by the
caller (see :func:`tensor_apply` and :class:`AffineMap`).
"""

import numpy as np

from .errors import NumericalFailureError

MAX_DEGREE = 12

_NEWTON_TOL = 1e-15
_NEWTON_MAXIT = 100


def _legendre_table(n, x):
    """Legendre polynomials P_0..P_n evaluated at x, shape (n+1, len(x))."""
    x = np.asarray(x, dtype=float)
    P = np.zeros((n + 1,) + x.shape)
    P[0] = 1.0
    if n >= 1:
        P[1] = x
    for k in range(1, n):
        P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1)
    return P


def gll_nodes_weights(N):
    """Gauss-Lobatto-Legendre nodes and weights for polynomial degree N.

    The N+1 nodes are the roots of (1 - q^2) P'_N(q), found by Newton
    iteration from Chebyshev-Gauss-Lobatto initial guesses.  Weights are
    h_m = 2 / (N (N+1) P_N(q_m)^2); the rule is exact for polynomials of
    degree <= 2N - 1.
    """
    if not 1 <= N <= MAX_DEGREE:
        raise ValueError(f"degree N must be in [1, {MAX_DEGREE}], got {N}")
    n = N + 1
    q = -np.cos(np.pi * np.arange(n) / N)
    for _ in range(_NEWTON_MAXIT):
        P = _legendre_table(N, q)
        # zeros of (1-q^2) P'_N coincide with zeros of q P_N - P_{N-1}
        dq = (q * P[N] - P[N - 1]) / (n * P[N])
        q = q - dq
        if np.max(np.abs(dq)) < _NEWTON_TOL:
            break
    else:
        raise NumericalFailureError(
            f"GLL Newton iteration did not converge for N={N}",
            residuals=np.abs(dq),
        )
    q[0], q[-1] = -1.0, 1.0
    P = _legendre_table(N, q)
    h = 2.0 / (N * n * P[N] ** 2)
    return q, h


def lagrange_weights(nodes):
    """Barycentric weights of the Lagrange basis on the given nodes."""
    nodes = np.asarray(nodes, dtype=float)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def lagrange_eval(nodes, x):
    """Values of all Lagrange basis polynomials at point x, shape (len(nodes),).

    At a node this returns the exact coordinate vector.
    """
    nodes = np.asarray(nodes, dtype=float)
    w = lagrange_weights(nodes)
    d = x - nodes
    hit = np.abs(d) < 1e-14
    if hit.any():
        out = np.zeros_like(nodes)
        out[np.argmax(hit)] = 1.0
        return out
    terms = w / d
    return terms / terms.sum()


def derivative_matrix_from_nodes(nodes):
    """Nodal differentiation matrix D_{ij} = L'_j(q_i) via barycentric form."""
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    w = lagrange_weights(nodes)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (w[j] / w[i]) / (nodes[i] - nodes[j])
    # negative row sums make D exact on constants
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


class ReferenceElement1D:
    """Degree-N GLL collocation operators on [-1, 1].

    Attributes:
        N: polynomial degree
        nodes: N+1 GLL nodes
        weights: quadrature weights h_m (diagonal of the norm H)
        D: differentiation matrix
        Q: H @ D, satisfying the SBP property Q + Q^T = B(1,1) - B(-1,-1)
        e_left, e_right: boundary projection vectors (coordinate vectors on GLL)
    """

    def __init__(self, N):
        nodes, weights = gll_nodes_weights(N)
        self.N = N
        self.nodes = nodes
        self.weights = weights
        self.D = derivative_matrix_from_nodes(nodes)
        self.Q = np.diag(weights) @ self.D
        self.e_left = lagrange_eval(nodes, -1.0)
        self.e_right = lagrange_eval(nodes, 1.0)

    @property
    def H(self):
        return np.diag(self.weights)

    def sbp_residual(self):
        """Max-norm defect of Q + Q^T = B(1,1) - B(-1,-1)."""
        B = np.outer(self.e_right, self.e_right) - np.outer(self.e_left, self.e_left)
        return np.max(np.abs(self.Q + self.Q.T - B))


def derivative_matrix(N):
    """Build the degree-N reference element with its differentiation matrix."""
    return ReferenceElement1D(N)


def tensor_apply(op, axis, field, metric=1.0):
    """Apply a 1D operator along one tensor axis of nodal data.

    ``field`` has its two trailing axes indexing (x-node, y-node); any leading
    axes (fields, elements) are carried along.  Equivalent to the Kronecker
    action (op x I for axis 0, I x op for axis 1) scaled by ``metric``.
    """
    op = np.asarray(op)
    field = np.asarray(field)
    n = op.shape[0]
    if axis == 0:
        if field.shape[-2] != n:
            raise ValueError(
                f"field x-extent {field.shape[-2]} does not match operator size {n}")
        out = np.einsum("ab,...bj->...aj", op, field)
    elif axis == 1:
        if field.shape[-1] != n:
            raise ValueError(
                f"field y-extent {field.shape[-1]} does not match operator size {n}")
        out = np.einsum("ab,...ib->...ia", op, field)
    else:
        raise ValueError(f"axis must be 0 or 1, got {axis}")
    return metric * out if metric != 1.0 else out


_FACE_SLICES = {
    "west": (0, slice(None)),
    "east": (-1, slice(None)),
    "south": (slice(None), 0),
    "north": (slice(None), -1),
}


def face_trace(field, face):
    """Boundary trace of nodal data on one face of the reference square.

    On GLL nodes the projection vectors e(+-1) are coordinate vectors, so the
    trace is the corresponding boundary row/column of the nodal array.
    """
    try:
        ix, iy = _FACE_SLICES[face]
    except KeyError:
        raise ValueError(f"unknown face {face!r}") from None
    return np.asarray(field)[..., ix, iy]


class AffineMap:
    """Affine map between a physical rectangle and the reference square."""

    def __init__(self, x0, x1, y0, y1):
        if not (x1 > x0 and y1 > y0):
            raise ValueError("element bounds must be increasing")
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.dx = x1 - x0
        self.dy = y1 - y0
        self.qx = 2.0 / self.dx
        self.ry = 2.0 / self.dy
        self.jacobian = 0.25 * self.dx * self.dy

    def to_physical(self, q, r):
        return (self.x0 + 0.5 * self.dx * (1.0 + np.asarray(q)),
                self.y0 + 0.5 * self.dy * (1.0 + np.asarray(r)))

    def to_reference(self, x, y):
        return (2.0 * (np.asarray(x) - self.x0) / self.dx - 1.0,
                2.0 * (np.asarray(y) - self.y0) / self.dy - 1.0)
