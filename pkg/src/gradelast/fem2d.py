"""Tensor-product scalar elements on a rectangle.

Scalar Q2 (biquadratic) spaces built as tensor products of the 1D quadratic
space in each direction; every bilinear form with separated derivative orders
becomes a Kronecker product of global 1D matrices.  Used by the mixed solver
for the free-boundary rigid-motion problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgumentError
from .fem1d import FeSpace, IntervalMesh, gauss_rule


@dataclass(frozen=True)
class RectangleGrid:
    """Uniform rectangle [0, Lx] x [0, Ly] with nx x ny biquadratic elements."""

    Lx: float
    Ly: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.Lx <= 0 or self.Ly <= 0:
            raise InvalidArgumentError("rectangle side lengths must be positive")

    @cached_property
    def sx(self):
        return FeSpace(IntervalMesh(self.Lx, self.nx), "P2")

    @cached_property
    def sy(self):
        return FeSpace(IntervalMesh(self.Ly, self.ny), "P2")

    @property
    def ndof(self):
        return self.sx.ndof * self.sy.ndof

    def operator(self, dtest, dtrial):
        """Sparse scalar form with separated derivative orders.

        ``dtest`` and ``dtrial`` are (x-order, y-order) pairs; the result is
        the Kronecker product of the corresponding global 1D matrices with
        x-major degree-of-freedom ordering.
        """
        from .fem1d import assemble_operator
        gx = assemble_operator(self.sx, dtest[0], dtrial[0])
        gy = assemble_operator(self.sy, dtest[1], dtrial[1])
        return sp.kron(gx, gy, format="csr")

    def dof_coords(self):
        """(ndof, 2) coordinates in x-major ordering."""
        xs = self.sx.dof_coordinates()
        ys = self.sy.dof_coordinates()
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    def load_vector(self, f, nq=4):
        """Linear form of a callable f(x, y) by tensor Gauss quadrature."""
        tx, wx = gauss_rule(nq)
        ty, wy = gauss_rule(nq)
        hx, hy = self.sx.mesh.h, self.sy.mesh.h
        Nx = self.sx.shape_values(tx, 0)  # (nq, 3)
        Ny = self.sy.shape_values(ty, 0)
        b = np.zeros((self.sx.ndof, self.sy.ndof))
        xq = (np.arange(self.nx)[:, None] + tx[None, :]) * hx  # (nx, nq)
        yq = (np.arange(self.ny)[:, None] + ty[None, :]) * hy
        for ex in range(self.nx):
            for ey in range(self.ny):
                F = f(xq[ex][:, None], yq[ey][None, :])  # (nq, nq)
                elem = np.einsum('p,q,pq,pa,qb->ab', wx * hx, wy * hy, F, Nx, Ny)
                ia = self.sx.elem_dofs[ex]
                ib = self.sy.elem_dofs[ey]
                b[np.ix_(ia, ib)] += elem
        return b.ravel()

    def evaluate(self, coeffs, x, y, dx=0, dy=0):
        """Values of (d/dx)^dx (d/dy)^dy of the field on the grid x cross y."""
        coeffs = np.asarray(coeffs).reshape(self.sx.ndof, self.sy.ndof)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        Ex = _eval_matrix(self.sx, x, dx)
        Ey = _eval_matrix(self.sy, y, dy)
        return Ex @ coeffs @ Ey.T

    def quadrature_grid(self, nq=4):
        """Per-element tensor quadrature points and weights over the rectangle."""
        tx, wx = gauss_rule(nq)
        ty, wy = gauss_rule(nq)
        hx, hy = self.sx.mesh.h, self.sy.mesh.h
        xq = ((np.arange(self.nx)[:, None] + tx[None, :]) * hx).ravel()
        yq = ((np.arange(self.ny)[:, None] + ty[None, :]) * hy).ravel()
        wxs = np.tile(wx * hx, self.nx)
        wys = np.tile(wy * hy, self.ny)
        return xq, wxs, yq, wys


def _eval_matrix(space, pts, deriv):
    rows = np.zeros((len(pts), space.ndof))
    for r, p in enumerate(pts):
        rows[r] = space.trace_row(float(p), deriv)
    return rows
