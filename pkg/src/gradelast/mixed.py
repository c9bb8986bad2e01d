"""Augmented second-order system in the pair (displacement, strain gradient).

The fourth-order problem is rewritten as a first-order-in-operators system
for (u, nu) where nu carries the strain gradient as an independent
H1-conforming unknown.  The assembled block operator is

    A_minus = [[K, -C], [C^T,  Hm]]     (solvable; antisymmetric coupling)
    A_plus  = [[K, -C], [-C^T, -Hm]]    (exactly symmetric; inspection only)

with K the classical elastic stiffness, Hm the rank-6-weighted algebraic
coupling of nu with itself (coercive in L2), and C the cross form
integral (div mu(nu)) : grad(test u).  Two boundary regimes are supported:
the clamped set (displacement values essential, weighted trace of nu
essential via a local nullspace change of unknowns) and the free set
(volume form only, rigid motions deflated, loads must be self-equilibrated).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .constitutive import GradientParams, LameParams, build_H
from .errors import InvalidArgumentError
from .fem1d import FeSpace, IntervalMesh, assemble_load, assemble_operator, gauss_rule, solve_linear
from .fem2d import RectangleGrid
from .tensors import sym_component_index, sym_expansion_matrix, sym_triadic_dim


def _unit(a, d):
    e = [0] * d
    e[a] = 1
    return tuple(e)


def elasticity_terms(d, lame: LameParams):
    """Term list of the classical stiffness: (ctest, dtest, ctrial, dtrial, coeff)."""
    mu, lam = lame.mu, lame.lam
    terms = []
    for a in range(d):
        for c in range(d):
            terms.append((c, _unit(a, d), c, _unit(a, d), mu))
            terms.append((a, _unit(c, d), c, _unit(a, d), mu))
    for c in range(d):
        for e in range(d):
            terms.append((e, _unit(e, d), c, _unit(c, d), lam))
    return terms


def cross_terms(d, h):
    """Term list of integral (div mu(nu)) : grad(test u).

    Test index is the displacement component, trial index is the reduced
    strain-gradient component.
    """
    Hm = h.matrix()
    comp_index = sym_component_index(d)
    red_of = {}
    for m, (a, b, c) in enumerate(comp_index):
        red_of[(a, b, c)] = m
        red_of[(a, c, b)] = m

    def flat(i, j, k):
        return (i * d + j) * d + k

    terms = []
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for a in range(d):
                    for b in range(d):
                        for c in range(d):
                            w = Hm[flat(i, j, k), flat(a, b, c)]
                            if w == 0.0:
                                continue
                            terms.append((k, _unit(j, d), red_of[(a, b, c)], _unit(i, d), w))
    return terms


def reduced_quadratic_weight(h):
    """Quadratic-form matrix of the rank-6 tensor on reduced component storage."""
    E = sym_expansion_matrix(h.d)
    W = E.T @ h.matrix() @ E
    # the rank-6 symmetries hold to rounding; enforce them exactly so the
    # assembled plus-variant is symmetric to the bit
    return 0.5 * (W + W.T)


# ---------------------------------------------------------------------------
# Domains.

@dataclass(frozen=True)
class IntervalDomain:
    L: float
    n: int
    family: str = "P2"

    @property
    def d(self):
        return 1

    def space(self):
        return FeSpace(IntervalMesh(self.L, self.n), self.family)


@dataclass(frozen=True)
class RectangleDomain:
    grid: RectangleGrid

    @property
    def d(self):
        return 2


@dataclass
class MixedSystem:
    """Assembled mixed operator with constraint and deflation bookkeeping."""

    domain: object
    lame: LameParams
    params: GradientParams
    sign: int
    boundary_set: int
    K: sp.spmatrix          # displacement block
    C: sp.spmatrix          # cross block (u-test rows, nu-trial columns)
    Hm: sp.spmatrix         # nu-nu block
    T: sp.spmatrix          # reduction map, full dofs = T @ reduced unknowns
    deflation: np.ndarray | None
    ndof_scalar: int
    n_s: int

    def matrix(self, sign=None):
        sign = self.sign if sign is None else sign
        if sign == -1:
            A = sp.bmat([[self.K, -self.C], [self.C.T, self.Hm]], format="csr")
        elif sign == +1:
            A = sp.bmat([[self.K, -self.C], [-self.C.T, -self.Hm]], format="csr")
        else:
            raise InvalidArgumentError(f"sign must be +1 or -1, got {sign}")
        return (self.T.T @ A @ self.T).tocsr()

    def symmetric_part_blocks(self):
        """The symmetric part of the minus-variant: block diagonal (K, Hm), reduced."""
        S = sp.block_diag([self.K, self.Hm], format="csr")
        return (self.T.T @ S @ self.T).tocsr()


@dataclass
class MixedState:
    domain: object
    u: np.ndarray       # (d, ndof_scalar)
    nu: np.ndarray      # (n_s, ndof_scalar)
    system: MixedSystem


# ---------------------------------------------------------------------------
# Assembly.

def _scalar_op(domain):
    """Returns op(dtest, dtrial) -> sparse scalar matrix, plus the scalar dof count."""
    if isinstance(domain, IntervalDomain):
        space = domain.space()

        def op(dtest, dtrial):
            return assemble_operator(space, dtest[0], dtrial[0])

        return op, space.ndof
    if isinstance(domain, RectangleDomain):
        return domain.grid.operator, domain.grid.ndof
    raise InvalidArgumentError(f"unsupported domain {type(domain).__name__}")


def _accumulate(terms, op, n, nfields_test, nfields_trial, dtype=float):
    blocks = [[None] * nfields_trial for _ in range(nfields_test)]
    agg = {}
    for (ct, dt, cr, dr, w) in terms:
        key = (ct, cr, dt, dr)
        agg[key] = agg.get(key, 0.0) + w
    for (ct, cr, dt, dr), w in agg.items():
        if w == 0.0:
            continue
        M = w * op(dt, dr)
        if blocks[ct][cr] is None:
            blocks[ct][cr] = M.astype(dtype)
        else:
            blocks[ct][cr] = blocks[ct][cr] + M
    zero = sp.csr_matrix((n, n), dtype=dtype)
    blocks = [[b if b is not None else zero for b in row] for row in blocks]
    return sp.bmat(blocks, format="csr")


def assemble_mixed(domain, lame: LameParams, params: GradientParams,
                   sign=-1, boundary_set=1) -> MixedSystem:
    """Galerkin blocks of the augmented system on an interval or rectangle.

    For the clamped set the returned reduction map eliminates boundary
    displacement values and changes the boundary strain-gradient unknowns to
    a basis of the kernel of the weighted-trace constraint.  For the free set
    no constraints are applied and the rigid motions are attached as a
    deflation basis.
    """
    if sign not in (-1, +1):
        raise InvalidArgumentError("sign must be +1 or -1")
    if boundary_set not in (1, 2):
        raise InvalidArgumentError("boundary set must be 1 or 2")
    if params.is_zero:
        raise InvalidArgumentError(
            "the augmented system needs a nonzero gradient tensor; "
            "use the classical path for the degenerate limit")
    d = domain.d
    if boundary_set == 1 and d != 1:
        raise InvalidArgumentError(
            "the clamped set on a plain 2D rectangle is not supported; "
            "use the strip solver for the 2D clamped problems")
    h = build_H(params, d)
    op, n = _scalar_op(domain)
    n_s = sym_triadic_dim(d)
    K = _accumulate(elasticity_terms(d, lame), op, n, d, d)
    K = 0.5 * (K + K.T)
    C = _accumulate(cross_terms(d, h), op, n, d, n_s)
    W = reduced_quadratic_weight(h)
    M0 = op((0,) * d, (0,) * d)
    Hm = sp.kron(sp.csr_matrix(W), M0, format="csr")
    Hm = 0.5 * (Hm + Hm.T)

    N = (d + n_s) * n
    deflation = None
    if boundary_set == 1:
        # 1D: displacement values and the strain-gradient value vanish at the ends
        space = domain.space()
        drop = set()
        for dof in space.boundary_value_dofs():
            drop.add(dof)              # u block
            drop.add(n + dof)          # nu block (single reduced component)
        keep = [i for i in range(N) if i not in drop]
        T = sp.csr_matrix((np.ones(len(keep)), (keep, np.arange(len(keep)))),
                          shape=(N, len(keep)))
    else:
        T = sp.identity(N, format="csr")
        deflation = rigid_basis(domain, n, n_s)
    return MixedSystem(domain=domain, lame=lame, params=params, sign=sign,
                       boundary_set=boundary_set, K=K, C=C, Hm=Hm, T=T,
                       deflation=deflation, ndof_scalar=n, n_s=n_s)


def rigid_basis(domain, n, n_s):
    """Columns spanning (rigid displacement, zero strain gradient)."""
    d = domain.d
    N = (d + n_s) * n
    if d == 1:
        Z = np.zeros((N, 1))
        Z[:n, 0] = 1.0
        return Z
    coords = domain.grid.dof_coords()
    Z = np.zeros((N, 3))
    Z[:n, 0] = 1.0                      # x-translation
    Z[n:2 * n, 1] = 1.0                 # y-translation
    Z[:n, 2] = -coords[:, 1]            # rotation (-y, x)
    Z[n:2 * n, 2] = coords[:, 0]
    return Z


def load_vector(system: MixedSystem, f):
    """Right-hand side (force in the displacement block, zero in the nu block).

    ``f`` is a scalar/callable for 1D or a tuple of two callables f(x, y) for
    the rectangle.
    """
    domain = system.domain
    n, n_s, d = system.ndof_scalar, system.n_s, domain.d
    b = np.zeros((d + n_s) * n)
    if d == 1:
        b[:n] = assemble_load(domain.space(), f)
    else:
        for c in range(2):
            b[c * n:(c + 1) * n] = domain.grid.load_vector(f[c])
    return b


def solve_mixed(system: MixedSystem, f) -> MixedState:
    """Direct solve of the minus-variant; the plus-variant is inspection-only."""
    if system.sign != -1:
        raise InvalidArgumentError("only the minus-variant is solvable")
    A = system.matrix()
    b_full = load_vector(system, f)
    b = system.T.T @ b_full
    Z = None
    if system.deflation is not None:
        Z = system.T.T @ system.deflation
    x = solve_linear(A, b, deflation=Z)
    full = system.T @ x
    n, n_s, d = system.ndof_scalar, system.n_s, system.domain.d
    u = full[:d * n].reshape(d, n)
    nu = full[d * n:].reshape(n_s, n)
    return MixedState(domain=system.domain, u=u, nu=nu, system=system)


def solve_classical(domain, lame: LameParams, f):
    """Clamped classical elasticity on the same discretization (degenerate limit)."""
    d = domain.d
    op, n = _scalar_op(domain)
    K = _accumulate(elasticity_terms(d, lame), op, n, d, d)
    if d != 1:
        raise InvalidArgumentError("the classical path is provided in 1D only")
    space = domain.space()
    b = assemble_load(space, f)
    fixed = {dof: 0.0 for dof in space.boundary_value_dofs()}
    x = solve_linear(K, b, fixed=fixed)
    return x.reshape(1, n)


# ---------------------------------------------------------------------------
# Diagnostics.

def energy(state: MixedState):
    """Elastic plus gradient energy: u.K.u + nu.Hm.nu (nonnegative)."""
    s = state.system
    u = state.u.reshape(-1)
    nu = state.nu.reshape(-1)
    return float(u @ (s.K @ u) + nu @ (s.Hm @ nu))


def constraint_residual(state: MixedState):
    """L2 distance between the independent strain gradient and the one of u."""
    domain = state.domain
    if isinstance(domain, IntervalDomain):
        return _constraint_residual_1d(state)
    return _constraint_residual_rect(state)


def _constraint_residual_1d(state):
    space = state.domain.space()
    mesh = space.mesh
    t, w = gauss_rule(4)
    total = 0.0
    for e in range(mesh.n):
        xq = (e + t) * mesh.h
        upp = space.evaluate(state.u[0], xq, 2)
        nu = space.evaluate(state.nu[0], xq, 0)
        total += np.sum(w * mesh.h * (nu - upp) ** 2)
    return float(np.sqrt(total))


def _constraint_residual_rect(state):
    grid = state.domain.grid
    xq, wx, yq, wy = grid.quadrature_grid(nq=3)
    W2 = np.outer(wx, wy)
    # second derivatives of u on the quadrature grid
    dd = {}
    for c in range(2):
        for (p, q) in ((2, 0), (1, 1), (0, 2)):
            dd[(p, q, c)] = grid.evaluate(state.u[c], xq, yq, dx=p, dy=q)

    def hess(i, j, k):
        p = (i == 0) + (j == 0)
        q = (i == 1) + (j == 1)
        return dd[(p, q, k)]

    comp_index = sym_component_index(2)
    total = 0.0
    for m, (i, j, k) in enumerate(comp_index):
        target = 0.5 * (hess(i, j, k) + hess(i, k, j))
        got = grid.evaluate(state.nu[m], xq, yq)
        mult = 1.0 if j == k else 2.0
        total += mult * np.sum(W2 * (got - target) ** 2)
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# Periodic strip: per-mode complex mixed solve (clamped boundary regime).

@dataclass
class StripMixedState:
    u: object               # StripField
    nu: np.ndarray          # complex (2K+1, 6, ndof_y)
    grid: object
    lame: LameParams
    params: GradientParams


def _strip_trace_kernel(h):
    """Basis of the kernel of the weighted-trace constraint on edge values.

    The constraint couples the six reduced strain-gradient components at an
    edge node through the two rows n.n : H : nu; its kernel has dimension 4.
    """
    E = sym_expansion_matrix(2)
    G = (h.matrix() @ E)[[6, 7], :]     # rows (y, y, c) in flat ordering
    Q = sla.null_space(G)
    if Q.shape[1] != 4:
        raise InvalidArgumentError("degenerate weighted-trace constraint")
    return Q


def _strip_reduction(grid, h):
    """Sparse map from reduced unknowns to the full per-mode dof vector."""
    n = grid.ndof_y
    N = 8 * n
    vdofs = grid.space.boundary_value_dofs()
    drop = {c * n + v for c in range(2) for v in vdofs}
    edge_groups = [[(2 + m) * n + v for m in range(6)] for v in vdofs]
    in_group = {dof for grp in edge_groups for dof in grp}
    Q = _strip_trace_kernel(h)
    rows, cols, vals = [], [], []
    col = 0
    for dof in range(N):
        if dof in drop or dof in in_group:
            continue
        rows.append(dof)
        cols.append(col)
        vals.append(1.0)
        col += 1
    for grp in edge_groups:
        for j in range(Q.shape[1]):
            for m, dof in enumerate(grp):
                rows.append(dof)
                cols.append(col)
                vals.append(Q[m, j])
            col += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(N, col))


def solve_mixed_strip(f, lame: LameParams, params: GradientParams,
                      sign=-1) -> StripMixedState:
    """Per-mode mixed solve on the periodic strip, clamped boundary regime.

    Tangential derivatives act as ik on trial functions and -ik on tests; the
    transverse factors reuse the 1D element matrices.  Edge displacement
    values are eliminated and the edge strain-gradient unknowns are rotated
    into the kernel of the weighted-trace constraint.
    """
    if sign != -1:
        raise InvalidArgumentError("only the minus-variant is solvable")
    if params.is_zero:
        raise InvalidArgumentError("the augmented system needs a nonzero gradient tensor")
    from .strip import ModeAssembler, StripField
    grid = f.grid
    h = build_H(params, 2)
    asm = ModeAssembler(grid, lame, h=h)
    n = asm.n
    D = asm.D
    W = reduced_quadratic_weight(h)
    Hm = sp.kron(sp.csr_matrix(W), D[0, 0], format="csr").astype(complex)
    kterms = elasticity_terms(2, lame)
    cterms = cross_terms(2, h)
    T = _strip_reduction(grid, h)
    u_out = StripField(grid)
    nu_out = np.zeros((2 * grid.K + 1, 6, n), dtype=complex)
    M00 = D[0, 0]
    for k in grid.modes:

        def op(dt, dr):
            fac = np.conj((1j * k) ** dt[0]) * (1j * k) ** dr[0]
            return fac * D[dt[1], dr[1]]

        K = _mode_blocks(kterms, op, n, 2, 2)
        C = _mode_blocks(cterms, op, n, 2, 6)
        A = sp.bmat([[K, -C], [C.conj().T, Hm]], format="csr")
        b = np.zeros(8 * n, dtype=complex)
        for c in range(2):
            b[c * n:(c + 1) * n] = M00 @ f.mode(k)[c]
        A_red = (T.T @ A @ T).tocsc()
        x = T @ spla.splu(A_red).solve(T.T @ b)
        u_out.coeffs[k + grid.K] = x[:2 * n].reshape(2, n)
        nu_out[k + grid.K] = x[2 * n:].reshape(6, n)
    return StripMixedState(u=u_out, nu=nu_out, grid=grid, lame=lame, params=params)


def _mode_blocks(terms, op, n, nt, nr):
    blocks = [[None] * nr for _ in range(nt)]
    agg = {}
    for (ct, dt, cr, dr, w) in terms:
        key = (ct, cr, dt, dr)
        agg[key] = agg.get(key, 0.0) + w
    for (ct, cr, dt, dr), w in agg.items():
        if w == 0.0:
            continue
        M = w * op(dt, dr)
        blocks[ct][cr] = M if blocks[ct][cr] is None else blocks[ct][cr] + M
    zero = sp.csr_matrix((n, n), dtype=complex)
    blocks = [[b if b is not None else zero for b in row] for row in blocks]
    return sp.bmat(blocks, format="csr")


def strip_constraint_residual(state: StripMixedState):
    """L2 distance between the independent strain gradient and the one of u."""
    grid = state.grid
    space = grid.space
    t, w = gauss_rule(4)
    h_y = space.mesh.h
    n_el = space.mesh.n
    # tabulated y-derivative shape values on the quadrature points
    N = {q: space.shape_values(t, q) for q in range(3)}
    comp_index = sym_component_index(2)
    total = 0.0
    for k in grid.modes:
        u = state.u.mode(k)
        nu = state.nu[k + grid.K]
        for e in range(n_el):
            dofs = space.elem_dofs[e]

            def dval(coeffs, q):
                return N[q] @ coeffs[dofs]

            # second derivatives d_i d_j u_c with d = (ik, d/dy)
            hess = {}
            for c in range(2):
                hess[(0, 0, c)] = (1j * k) ** 2 * dval(u[c], 0)
                hess[(0, 1, c)] = (1j * k) * dval(u[c], 1)
                hess[(1, 0, c)] = hess[(0, 1, c)]
                hess[(1, 1, c)] = dval(u[c], 2)
            for m, (i, j, c) in enumerate(comp_index):
                target = 0.5 * (hess[(i, j, c)] + hess[(i, c, j)])
                got = dval(nu[m], 0)
                mult = 1.0 if j == c else 2.0
                total += mult * np.sum(w * h_y * np.abs(got - target) ** 2)
    return float(np.sqrt(2 * np.pi * total))


def smallest_ritz_value(system: MixedSystem):
    """Smallest generalized eigenvalue of the symmetric part against the
    natural Gram (H1 for displacement components, L2 for the strain gradient)."""
    S = system.symmetric_part_blocks().toarray()
    op, n = _scalar_op(system.domain)
    d, n_s = system.domain.d, system.n_s
    gram_u = sum(op(_unit(a, d), _unit(a, d)) for a in range(d)) + op((0,) * d, (0,) * d)
    mass = op((0,) * d, (0,) * d)
    B = sp.block_diag([gram_u] * d + [mass] * n_s, format="csr")
    B = (system.T.T @ B @ system.T).toarray()
    vals = sla.eigh(0.5 * (S + S.T), 0.5 * (B + B.T), eigvals_only=True)
    return float(vals[0])


def nullspace_dimension(system: MixedSystem, tol=1e-8):
    """Numerical nullspace dimension of the reduced minus-variant operator."""
    A = system.matrix().toarray()
    svals = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(svals <= tol * svals[0]))
