"""Augmented (displacement, strain-gradient) system: assembly and solves."""

import numpy as np
import pytest

from gradelast.constitutive import (
    GradientParams,
    LameParams,
    gradient_params_for_simple_model,
)
from gradelast.errors import FredholmIncompatibilityError, InvalidArgumentError
from gradelast.fem1d import sobolev_norm
from gradelast.fem2d import RectangleGrid
from gradelast.mixed import (
    IntervalDomain,
    RectangleDomain,
    assemble_mixed,
    constraint_residual,
    nullspace_dimension,
    smallest_ritz_value,
    solve_classical,
    solve_mixed,
    solve_mixed_strip,
    strip_constraint_residual,
)
from gradelast.oracle import closed_form_1d, solve_strip_fourth
from gradelast.strip import StripField, StripGrid, project_profile, strip_error, strip_norm

LAME = LameParams(lam=1.0, mu=1.0)
G = 0.1
PARAMS = gradient_params_for_simple_model(G, LAME)


def test_rejects_degenerate_inputs():
    dom = IntervalDomain(1.0, 16)
    with pytest.raises(InvalidArgumentError):
        assemble_mixed(dom, LAME, GradientParams(0, 0, 0, 0, 0))
    rect = RectangleDomain(RectangleGrid(1.0, 1.0, 4, 4))
    with pytest.raises(InvalidArgumentError):
        assemble_mixed(rect, LAME, PARAMS, boundary_set=1)


def test_plus_variant_exactly_symmetric():
    for dom in (IntervalDomain(1.0, 12),
                RectangleDomain(RectangleGrid(1.0, 1.0, 3, 3))):
        bset = 1 if isinstance(dom, IntervalDomain) else 2
        sys_ = assemble_mixed(dom, LAME, PARAMS, boundary_set=bset)
        A = sys_.matrix(sign=+1)
        d = (A - A.T).tocoo()
        assert d.nnz == 0 or np.abs(d.data).max() == 0.0


def test_minus_variant_solution_matches_closed_form():
    dom = IntervalDomain(1.0, 128)
    sys_ = assemble_mixed(dom, LAME, PARAMS, sign=-1, boundary_set=1)
    state = solve_mixed(sys_, lambda x: np.ones_like(x))
    u_exact, _ = closed_form_1d(1.0, G, 1.0, LAME.p_wave)
    space = dom.space()
    xs = space.dof_coordinates()
    vals = space.evaluate(state.u[0], xs)
    err = np.abs(vals - u_exact(xs)).max()
    assert err < 1e-5 * np.abs(u_exact(xs)).max()


def test_constraint_residual_refines_at_first_order():
    res = []
    for n in (16, 32, 64):
        dom = IntervalDomain(1.0, n)
        sys_ = assemble_mixed(dom, LAME, PARAMS, sign=-1, boundary_set=1)
        state = solve_mixed(sys_, lambda x: np.ones_like(x))
        res.append(constraint_residual(state))
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert orders.min() > 0.9


def test_smallest_ritz_value_positive_and_mesh_stable():
    vals = []
    for n in (8, 16, 32):
        dom = IntervalDomain(1.0, n)
        sys_ = assemble_mixed(dom, LAME, PARAMS, sign=-1, boundary_set=1)
        vals.append(smallest_ritz_value(sys_))
    vals = np.array(vals)
    assert vals.min() > 0
    assert np.ptp(vals) < 0.1 * vals.mean()


def test_free_boundary_nullspace_dimensions():
    dom1 = IntervalDomain(1.0, 12)
    sys1 = assemble_mixed(dom1, LAME, PARAMS, sign=-1, boundary_set=2)
    assert nullspace_dimension(sys1) == 1
    dom2 = RectangleDomain(RectangleGrid(1.0, 1.0, 3, 3))
    sys2 = assemble_mixed(dom2, LAME, PARAMS, sign=-1, boundary_set=2)
    assert nullspace_dimension(sys2) == 3


def test_free_boundary_rejects_unbalanced_load():
    dom = IntervalDomain(1.0, 12)
    sys_ = assemble_mixed(dom, LAME, PARAMS, sign=-1, boundary_set=2)
    with pytest.raises(FredholmIncompatibilityError):
        solve_mixed(sys_, lambda x: np.ones_like(x))


def test_free_boundary_accepts_balanced_load():
    dom = IntervalDomain(1.0, 24)
    sys_ = assemble_mixed(dom, LAME, PARAMS, sign=-1, boundary_set=2)
    state = solve_mixed(sys_, lambda x: np.sin(2 * np.pi * x))
    # the rigid component is deflated away and the solution stays finite
    assert abs(state.u[0].sum()) < 1e-8 * max(np.abs(state.u[0]).max(), 1.0)
    assert np.isfinite(state.u[0]).all()


def test_classical_limit_solver():
    dom = IntervalDomain(1.0, 64)
    u = solve_classical(dom, LAME, lambda x: np.ones_like(x))
    u_exact, _ = closed_form_1d(1.0, 0.0, 1.0, LAME.p_wave)
    space = dom.space()
    xs = space.dof_coordinates()
    vals = space.evaluate(u[0], xs)
    assert np.abs(vals - u_exact(xs)).max() < 1e-9


def _strip_load(grid):
    f = StripField(grid)
    p0 = project_profile(grid.space, lambda y: np.sin(np.pi * y))
    p1 = project_profile(grid.space, lambda y: y * (1 - y))
    f.set_mode(0, np.stack([p0, np.zeros_like(p0)]))
    f.set_mode(1, np.stack([0.5 * p1, 0.3j * p0]))
    return f


def test_strip_mixed_matches_fourth_order_solver():
    grid = StripGrid(K=3, n_y=16)
    f = _strip_load(grid)
    state = solve_mixed_strip(f, LAME, PARAMS)
    oracle = solve_strip_fourth(f, G, LAME)
    rel = strip_error(state.u, oracle.u, 0) / strip_norm(oracle.u, 0)
    assert rel < 1e-5
    assert state.u.is_conjugate_symmetric(tol=1e-9)


def test_strip_mixed_constraint_residual_refines():
    res = []
    for n_y in (8, 16, 32):
        grid = StripGrid(K=2, n_y=n_y)
        state = solve_mixed_strip(_strip_load(grid), LAME, PARAMS)
        res.append(strip_constraint_residual(state))
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert orders.min() > 0.9


def test_strip_mixed_rejects_plus_variant():
    grid = StripGrid(K=1, n_y=8)
    with pytest.raises(InvalidArgumentError):
        solve_mixed_strip(StripField(grid), LAME, PARAMS, sign=+1)
