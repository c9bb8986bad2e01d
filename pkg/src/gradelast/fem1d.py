"""One-dimensional finite elements on uniform interval meshes.

Provides Lagrange P1/P2 (H1-conforming) and cubic Hermite (H2-conforming)
spaces, operator/load assembly, essential-constraint handling, direct sparse
solves with optional nullspace deflation, and discrete Sobolev norms.  The
same transverse machinery is reused per tangential Fourier mode by the strip
solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    FredholmIncompatibilityError,
    InvalidArgumentError,
    SingularSystemError,
)


@dataclass(frozen=True)
class IntervalMesh:
    """Uniform mesh of [0, L] with n elements."""

    L: float
    n: int

    def __post_init__(self):
        if self.L <= 0:
            raise InvalidArgumentError(f"length must be positive, got {self.L}")
        if self.n < 2:
            raise InvalidArgumentError(f"need at least 2 elements, got {self.n}")

    @property
    def h(self):
        return self.L / self.n

    @property
    def nodes(self):
        return np.linspace(0.0, self.L, self.n + 1)

    def refine(self):
        return IntervalMesh(self.L, 2 * self.n)


def gauss_rule(npts):
    """Gauss-Legendre points/weights on [0, 1]."""
    t, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (t + 1.0), 0.5 * w


_DEFAULT_QUAD = {"P1": 2, "P2": 4, "Hermite3": 5}
_CONFORMITY = {"P1": 1, "P2": 1, "Hermite3": 2}


class FeSpace:
    """Scalar finite element space on an IntervalMesh."""

    def __init__(self, mesh: IntervalMesh, family: str):
        if family not in _DEFAULT_QUAD:
            raise InvalidArgumentError(f"unknown family {family!r}")
        self.mesh = mesh
        self.family = family
        n = mesh.n
        if family == "P1":
            self.ndof = n + 1
            self.elem_dofs = np.stack([np.arange(n), np.arange(n) + 1], axis=1)
        elif family == "P2":
            self.ndof = 2 * n + 1
            base = 2 * np.arange(n)
            self.elem_dofs = np.stack([base, base + 1, base + 2], axis=1)
        else:  # Hermite3: (value, slope) per node
            self.ndof = 2 * (n + 1)
            base = 2 * np.arange(n)
            self.elem_dofs = np.stack([base, base + 1, base + 2, base + 3], axis=1)

    @property
    def conformity(self):
        return _CONFORMITY[self.family]

    @property
    def nd(self):
        return self.elem_dofs.shape[1]

    def shape_values(self, t, deriv=0):
        """Reference shape functions at points t in [0, 1]; physical derivatives."""
        t = np.asarray(t, dtype=float)
        h = self.mesh.h
        if self.family == "P1":
            table = {
                0: [1 - t, t],
                1: [-np.ones_like(t) / h, np.ones_like(t) / h],
            }
        elif self.family == "P2":
            table = {
                0: [2 * t * t - 3 * t + 1, 4 * t * (1 - t), 2 * t * t - t],
                1: [(4 * t - 3) / h, (4 - 8 * t) / h, (4 * t - 1) / h],
                2: [4 / h ** 2 + 0 * t, -8 / h ** 2 + 0 * t, 4 / h ** 2 + 0 * t],
            }
        else:
            table = {
                0: [1 - 3 * t ** 2 + 2 * t ** 3, h * (t - 2 * t ** 2 + t ** 3),
                    3 * t ** 2 - 2 * t ** 3, h * (t ** 3 - t ** 2)],
                1: [(-6 * t + 6 * t ** 2) / h, 1 - 4 * t + 3 * t ** 2,
                    (6 * t - 6 * t ** 2) / h, 3 * t ** 2 - 2 * t],
                2: [(-6 + 12 * t) / h ** 2, (-4 + 6 * t) / h,
                    (6 - 12 * t) / h ** 2, (6 * t - 2) / h],
                3: [12 / h ** 3 + 0 * t, 6 / h ** 2 + 0 * t,
                    -12 / h ** 3 + 0 * t, 6 / h ** 2 + 0 * t],
            }
        if deriv not in table:
            raise InvalidArgumentError(
                f"derivative order {deriv} not available on {self.family}")
        return np.stack(table[deriv], axis=-1)  # (..., nd)

    def max_deriv(self):
        return {"P1": 1, "P2": 2, "Hermite3": 3}[self.family]

    # -- boundary dof bookkeeping ------------------------------------------
    def boundary_value_dofs(self):
        """Dofs carrying the function value at x=0 and x=L."""
        if self.family == "P1":
            return [0, self.ndof - 1]
        if self.family == "P2":
            return [0, self.ndof - 1]
        return [0, self.ndof - 2]

    def boundary_slope_dofs(self):
        if self.family != "Hermite3":
            raise InvalidArgumentError("slope dofs exist only on Hermite3")
        return [1, self.ndof - 1]

    def node_value_dofs(self):
        """Dofs carrying nodal values, in node order (all families)."""
        if self.family == "P1":
            return np.arange(self.ndof)
        if self.family == "P2":
            return np.arange(0, self.ndof, 2)
        return np.arange(0, self.ndof, 2)

    def dof_coordinates(self):
        """Coordinates associated with each dof (Lagrange: location; Hermite: node)."""
        nodes = self.mesh.nodes
        if self.family == "P1":
            return nodes.copy()
        if self.family == "P2":
            return np.linspace(0.0, self.mesh.L, self.ndof)
        return np.repeat(nodes, 2)

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, coeffs, x, deriv=0):
        coeffs = np.asarray(coeffs)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        h = self.mesh.h
        e = np.clip((x / h).astype(int), 0, self.mesh.n - 1)
        t = x / h - e
        N = self.shape_values(t, deriv)  # (npts, nd)
        vals = np.einsum('pa,pa->p', N, coeffs[self.elem_dofs[e]])
        return vals

    def interpolate(self, f, df=None):
        """Nodal interpolant of a callable (Hermite needs the derivative too)."""
        nodes = self.mesh.nodes
        if self.family == "P1":
            return np.asarray([f(x) for x in nodes], dtype=float)
        if self.family == "P2":
            xs = self.dof_coordinates()
            return np.asarray([f(x) for x in xs], dtype=float)
        if df is None:
            raise InvalidArgumentError("Hermite interpolation needs the derivative")
        out = np.empty(self.ndof)
        out[0::2] = [f(x) for x in nodes]
        out[1::2] = [df(x) for x in nodes]
        return out

    def trace_row(self, x, deriv=0):
        """Row vector r with r @ coeffs = (d/dx)^deriv u(x)."""
        h = self.mesh.h
        e = min(max(int(x / h), 0), self.mesh.n - 1)
        t = x / h - e
        N = self.shape_values(np.array([t]), deriv)[0]
        row = np.zeros(self.ndof)
        row[self.elem_dofs[e]] = N
        return row


@dataclass
class DiscreteField:
    """Coefficients over a scalar FeSpace."""

    space: FeSpace
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs)
        if self.coeffs.shape != (self.space.ndof,):
            raise InvalidArgumentError("coefficient vector size mismatch")

    def __call__(self, x, deriv=0):
        return self.space.evaluate(self.coeffs, x, deriv)


def assemble_operator(space: FeSpace, dtest: int, dtrial: int, coeff=None, quad=None):
    """Sparse matrix of  sum_e int coeff * D^dtest(phi_a) D^dtrial(phi_b)."""
    if max(dtest, dtrial) > space.conformity:
        raise InvalidArgumentError(
            f"derivative order {max(dtest, dtrial)} exceeds conformity of {space.family}")
    nq = quad or _DEFAULT_QUAD[space.family]
    t, w = gauss_rule(nq)
    h = space.mesh.h
    Nt = space.shape_values(t, dtest)   # (nq, nd)
    Ntr = space.shape_values(t, dtrial)
    n_el = space.mesh.n
    if coeff is None:
        elem = np.einsum('q,qa,qb->ab', w * h, Nt, Ntr)
        elems = np.broadcast_to(elem, (n_el, *elem.shape))
    else:
        xq = (np.arange(n_el)[:, None] + t[None, :]) * h
        c = coeff(xq) if callable(coeff) else np.full_like(xq, float(coeff))
        elems = np.einsum('eq,q,qa,qb->eab', c, w * h, Nt, Ntr)
    return _scatter(space, elems)


def _scatter(space, elems):
    nd = space.nd
    rows = np.repeat(space.elem_dofs, nd, axis=1).ravel()
    cols = np.tile(space.elem_dofs, (1, nd)).ravel()
    A = sp.coo_matrix((np.asarray(elems).ravel(), (rows, cols)),
                      shape=(space.ndof, space.ndof))
    return A.tocsr()


def assemble_load(space: FeSpace, f, quad=None):
    nq = quad or _DEFAULT_QUAD[space.family]
    t, w = gauss_rule(nq)
    h = space.mesh.h
    N = space.shape_values(t, 0)
    n_el = space.mesh.n
    xq = (np.arange(n_el)[:, None] + t[None, :]) * h
    fv = f(xq) if callable(f) else np.full_like(xq, float(f))
    elems = np.einsum('eq,q,qa->ea', fv, w * h, N)
    b = np.zeros(space.ndof)
    np.add.at(b, space.elem_dofs.ravel(), elems.ravel())
    return b


# ---------------------------------------------------------------------------
# Linear solves.

@dataclass
class SparseSystem:
    """Assembled sparse system with essential constraints and optional deflation."""

    A: sp.spmatrix
    b: np.ndarray
    fixed: dict = field(default_factory=dict)
    deflation: np.ndarray | None = None

    def solve(self):
        return solve_linear(self.A, self.b, fixed=self.fixed, deflation=self.deflation)


def apply_essential(A, b, fixed):
    """Symmetric elimination of {dof: value} constraints.

    Returns (A_ff, b_f, free, x_template) where x_template carries the fixed values.
    """
    n = A.shape[0]
    fixed_idx = np.array(sorted(fixed), dtype=int)
    if len(fixed_idx) != len(set(fixed_idx.tolist())):
        raise InvalidArgumentError("duplicate constraints")
    mask = np.ones(n, dtype=bool)
    mask[fixed_idx] = False
    free = np.nonzero(mask)[0]
    x = np.zeros(n, dtype=np.result_type(A.dtype, b.dtype))
    for k, v in fixed.items():
        x[k] = v
    A = A.tocsc()
    b_f = np.asarray(b, dtype=x.dtype)[free] - A[:, fixed_idx][free] @ x[fixed_idx]
    A_ff = A[:, free][free]
    return A_ff, b_f, free, x


def solve_linear(A, b, fixed=None, deflation=None, rel_tol=1e-10):
    """Direct sparse solve with constraint elimination and optional deflation.

    ``deflation`` is a (ndof, m) basis of the operator nullspace (applied after
    constraint elimination); the right-hand side must be orthogonal to it or a
    :class:`FredholmIncompatibilityError` is raised, and the returned solution
    is orthogonal to the basis.
    """
    fixed = fixed or {}
    A = sp.csr_matrix(A)
    b = np.asarray(b)
    A_ff, b_f, free, x = apply_essential(A, b, fixed)
    if deflation is not None:
        Z = np.atleast_2d(np.asarray(deflation, dtype=float))
        if Z.shape[0] != A.shape[0]:
            Z = Z.T
        Zf = Z[free]
        # orthonormalize for a well-scaled bordered system
        Qz, _ = np.linalg.qr(Zf)
        scale = max(np.linalg.norm(b_f), 1e-300)
        incompat = np.linalg.norm(Qz.T @ b_f)
        if incompat > 1e-8 * scale:
            raise FredholmIncompatibilityError(
                f"right-hand side has nullspace component {incompat:.3e} (rel {incompat / scale:.3e})")
        m = Qz.shape[1]
        K = sp.bmat([[A_ff, sp.csr_matrix(Qz)],
                     [sp.csr_matrix(Qz.T), None]], format='csc')
        rhs = np.concatenate([b_f, np.zeros(m)])
        sol = spla.spsolve(K, rhs)
        xf = sol[:len(b_f)]
        xf = xf - Qz @ (Qz.T @ xf)
    else:
        import warnings
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", spla.MatrixRankWarning)
                xf = spla.spsolve(A_ff.tocsc(), b_f)
        except (RuntimeError, spla.MatrixRankWarning) as exc:
            raise SingularSystemError(str(exc)) from exc
        if not np.all(np.isfinite(xf)):
            raise SingularSystemError("factorization produced non-finite values")
    res = np.linalg.norm(A_ff @ xf - b_f)
    if res > rel_tol * max(np.linalg.norm(b_f), 1.0):
        raise SingularSystemError(f"large residual {res:.3e}: system singular or ill-posed")
    x[free] = xf
    return x


# ---------------------------------------------------------------------------
# Norms.

def norm_matrices(space: FeSpace, t: int):
    """Mass-type matrices [M_0 .. M_t] for the discrete H^t norm."""
    if t < 0 or t > 2:
        raise InvalidArgumentError(f"unsupported Sobolev order {t}")
    if t > space.conformity:
        raise InvalidArgumentError(
            f"H^{t} norm unavailable on {space.family} (conformity {space.conformity})")
    return [assemble_operator(space, j, j) for j in range(t + 1)]


def sobolev_norm(field: DiscreteField, t: int):
    mats = norm_matrices(field.space, t)
    c = field.coeffs
    return float(np.sqrt(sum(np.real(np.vdot(c, M @ c)) for M in mats)))


def sobolev_seminorm(field: DiscreteField, t: int):
    M = norm_matrices(field.space, t)[-1]
    c = field.coeffs
    return float(np.sqrt(np.real(np.vdot(c, M @ c))))
