#!/usr/bin/env python3
"""Refinement study of the augmented (u, nu) solver against the fourth-order
references, on the interval and on the strip.

Prints displacement errors and constraint residuals per refinement level,
plus the smallest Ritz value of the symmetric part across meshes.
"""

import argparse

import numpy as np

from gradelast.constitutive import LameParams, gradient_params_for_simple_model
from gradelast.mixed import (
    IntervalDomain,
    assemble_mixed,
    constraint_residual,
    smallest_ritz_value,
    solve_mixed,
    solve_mixed_strip,
    strip_constraint_residual,
)
from gradelast.oracle import closed_form_1d, solve_strip_fourth
from gradelast.strip import StripField, StripGrid, project_profile, strip_error, strip_norm


def interval_study(g, levels):
    lame = LameParams(lam=1.0, mu=1.0)
    params = gradient_params_for_simple_model(g, lame)
    u_exact, _ = closed_form_1d(1.0, g, 1.0, lame.p_wave)
    print(f"interval, g = {g}")
    print(f"{'n':>6} {'rel L2 error':>14} {'constraint':>12} {'ritz':>10}")
    for n in levels:
        dom = IntervalDomain(1.0, n)
        sys_ = assemble_mixed(dom, lame, params)
        state = solve_mixed(sys_, lambda x: np.ones_like(x))
        xs = np.linspace(0, 1, 1025)
        diff = dom.space().evaluate(state.u[0], xs) - u_exact(xs)
        rel = np.sqrt(np.trapezoid(diff ** 2, xs) / np.trapezoid(u_exact(xs) ** 2, xs))
        print(f"{n:>6} {rel:>14.3e} {constraint_residual(state):>12.3e} "
              f"{smallest_ritz_value(sys_):>10.6f}")


def strip_study(g, levels, modes):
    lame = LameParams(lam=1.0, mu=1.0)
    params = gradient_params_for_simple_model(g, lame)
    print(f"strip, g = {g}, K = {modes}")
    print(f"{'n_y':>6} {'rel L2 error':>14} {'constraint':>12}")
    for n_y in levels:
        grid = StripGrid(K=modes, n_y=n_y)
        f = StripField(grid)
        p0 = project_profile(grid.space, lambda y: np.sin(np.pi * y))
        p1 = project_profile(grid.space, lambda y: y * (1 - y))
        f.set_mode(0, np.stack([p0, np.zeros_like(p0)]))
        f.set_mode(1, np.stack([0.5 * p1, 0.3j * p0]))
        state = solve_mixed_strip(f, lame, params)
        ref = solve_strip_fourth(f, g, lame)
        rel = strip_error(state.u, ref.u, 0) / strip_norm(ref.u, 0)
        print(f"{n_y:>6} {rel:>14.3e} {strip_constraint_residual(state):>12.3e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g", type=float, default=0.1, help="internal length")
    ap.add_argument("--modes", type=int, default=4, help="strip modes")
    args = ap.parse_args()
    interval_study(args.g, [16, 32, 64, 128])
    print()
    strip_study(args.g, [8, 16, 32, 64], args.modes)


if __name__ == "__main__":
    main()
