"""Reference solvers for the fourth-order gradient problem and its classical limit.

Three independent paths serve as ground truth for the reformulations: a
closed-form one-dimensional bar solution, a C1-conforming Galerkin solver of
the one-dimensional fourth-order equation, and per-mode direct solvers on the
periodic strip (fourth-order perturbed and second-order classical).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .constitutive import LameParams, build_H, gradient_params_for_simple_model
from .errors import InvalidArgumentError
from .fem1d import (
    DiscreteField,
    FeSpace,
    IntervalMesh,
    assemble_load,
    assemble_operator,
    solve_linear,
)
from .strip import ModeAssembler, StripField, StripGrid


@dataclass
class OracleSolution:
    """A reference solution with provenance metadata."""

    u: object  # DiscreteField (1D) or StripField (strip)
    method: str
    g: float
    resolution: int
    extra: dict = dc_field(default_factory=dict)


# ---------------------------------------------------------------------------
# 1D closed form.

def _cosh_ratio(a, b):
    """cosh(a)/cosh(b) for b >= |a| without overflow."""
    return (np.exp(a - b) + np.exp(-a - b)) / (1.0 + np.exp(-2.0 * b))


def closed_form_1d(f, g, L, E):
    """Callables (u, u') for the uniformly loaded gradient bar with simple ends.

    Solves E (u'' - g^2 u'''') = -f on (0, L) with u = 0 and u'' = 0 at both
    ends; g = 0 gives the classical parabola.
    """
    if L <= 0:
        raise InvalidArgumentError(f"need L > 0, got {L}")
    if g < 0:
        raise InvalidArgumentError(f"need g >= 0, got {g}")

    if g == 0:

        def u(x):
            return (f / (2 * E)) * x * (L - x)

        def du(x):
            return (f / (2 * E)) * (L - 2 * np.asarray(x, dtype=float))

        return u, du

    b = L / (2 * g)

    def u(x):
        x = np.asarray(x, dtype=float)
        layer = 1.0 - _cosh_ratio((x - L / 2) / g, b)
        return (f / (2 * E)) * x * (L - x) - g * g * (f / E) * layer

    def du(x):
        x = np.asarray(x, dtype=float)
        # d/dx of the cosh ratio is sinh(.)/ (g cosh(b))
        a = (x - L / 2) / g
        sinh_ratio = (np.exp(a - b) - np.exp(-a - b)) / (1.0 + np.exp(-2.0 * b))
        return (f / (2 * E)) * (L - 2 * x) + g * (f / E) * sinh_ratio

    return u, du


def solve_1d_closed_form(f, g, L, lame: LameParams, n=256) -> OracleSolution:
    """Closed-form bar solution interpolated onto a C1 element space."""
    E = lame.p_wave
    u, du = closed_form_1d(f, g, L, E)
    space = FeSpace(IntervalMesh(L, n), "Hermite3")
    coeffs = space.interpolate(u, du)
    return OracleSolution(u=DiscreteField(space, coeffs), method="closed-form",
                          g=g, resolution=n, extra={"callable": u, "dcallable": du})


# ---------------------------------------------------------------------------
# 1D Galerkin fourth-order solver.

def solve_1d_hermite(f, g, L, lame: LameParams, n=128, boundary_set=1) -> OracleSolution:
    """C1 Galerkin solution of E(u'' - g^2 u'''') = -f with simple ends.

    Weak form: integral E (u' v' + g^2 u'' v'') = integral f v with the end
    values constrained to zero; the weighted second-derivative condition is
    natural and left free.
    """
    if boundary_set != 1:
        raise InvalidArgumentError("only the clamped-value boundary set is supported here")
    if g < 0:
        raise InvalidArgumentError(f"need g >= 0, got {g}")
    E = lame.p_wave
    space = FeSpace(IntervalMesh(L, n), "Hermite3")
    A = E * (assemble_operator(space, 1, 1) + g * g * assemble_operator(space, 2, 2))
    b = assemble_load(space, f)
    fixed = {d: 0.0 for d in space.boundary_value_dofs()}
    coeffs = solve_linear(A, b, fixed=fixed)
    return OracleSolution(u=DiscreteField(space, coeffs), method="hermite-1d",
                          g=g, resolution=n)


# ---------------------------------------------------------------------------
# Strip solvers.

def _solve_dirichlet_block(A, b, fixed_idx):
    """Sparse complex solve with homogeneous essential dofs eliminated."""
    import scipy.sparse.linalg as spla_

    n = A.shape[0]
    mask = np.ones(n, dtype=bool)
    mask[list(fixed_idx)] = False
    free = np.nonzero(mask)[0]
    x = np.zeros(n, dtype=complex)
    lu = spla_.splu(A[np.ix_(free, free)].tocsc())
    x[free] = lu.solve(b[free].astype(complex))
    return x


def solve_strip_classical(f: StripField, lame: LameParams) -> OracleSolution:
    """Per-mode Navier solve with homogeneous Dirichlet edges."""
    grid = f.grid
    asm = ModeAssembler(grid, lame)
    M = asm.mass_block()
    fixed = asm.edge_value_dofs()
    out = StripField(grid)
    for k in grid.modes:
        b = M @ f.mode(k).reshape(-1)
        x = _solve_dirichlet_block(asm.navier_block(k), b, fixed)
        out.coeffs[k + grid.K] = x.reshape(2, grid.ndof_y)
    return OracleSolution(u=out, method="strip-spectral", g=0.0, resolution=grid.n_y)


def solve_strip_fourth(f: StripField, g, lame: LameParams) -> OracleSolution:
    """Per-mode direct solve of the perturbed fourth-order strip problem.

    Weak form per mode: Navier form plus the strain-gradient form of the
    one-length-scale model, with edge values essential and the weighted
    second-derivative condition natural.
    """
    if g <= 0:
        raise InvalidArgumentError(f"need g > 0 for the perturbed problem, got {g}")
    grid = f.grid
    if grid.family != "Hermite3":
        raise InvalidArgumentError("the fourth-order strip solver needs a C1 transverse space")
    h = build_H(gradient_params_for_simple_model(g, lame), 2)
    asm = ModeAssembler(grid, lame, h=h)
    M = asm.mass_block()
    fixed = asm.edge_value_dofs()
    out = StripField(grid)
    for k in grid.modes:
        A = asm.navier_block(k) + asm.gradient_block(k)
        b = M @ f.mode(k).reshape(-1)
        x = _solve_dirichlet_block(A, b, fixed)
        out.coeffs[k + grid.K] = x.reshape(2, grid.ndof_y)
    return OracleSolution(u=out, method="strip-spectral", g=g, resolution=grid.n_y)
