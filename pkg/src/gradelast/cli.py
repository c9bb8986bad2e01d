"""Command-line harness: verification battery, configured runs, and plots.

Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
failure.  Output CSV files are bitwise-reproducible for a fixed config and
package version; wall-clock timings therefore go to the console log only and
the runtime_ms column of written files is pinned to zero.
"""

from __future__ import annotations

import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import __version__
from .errors import GradElastError, InvalidArgumentError
from .reports import CSV_COLUMNS, ConvergenceReport

EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _out_dir(out):
    """Resolve the output directory; the environment override wins."""
    out = os.environ.get("GRADELAST_OUT", out)
    try:
        os.makedirs(out, exist_ok=True)
        probe = os.path.join(out, ".write-probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        click.echo(f"error: output directory {out!r} is not writable: {exc}", err=True)
        sys.exit(EXIT_IO)
    return out


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@click.group()
@click.version_option(__version__)
def main():
    """Verified solvers for static gradient elasticity."""


@main.command()
@click.argument("criteria", nargs=-1)
@click.option("--out", default=".", show_default=True, help="Output directory.")
@click.option("--threads", default=1, show_default=True, help="Worker threads.")
@click.option("--seed", default=0, show_default=True, help="Sampling seed (u64).")
def verify(criteria, out, threads, seed):
    """Run the verification battery (optionally a named subset) and write a
    JSON summary; any failed check exits nonzero."""
    from .acceptance import run_checks
    out = _out_dir(out)
    try:
        t0 = time.perf_counter()
        records = run_checks(seed=seed, names=criteria or None)
        elapsed = time.perf_counter() - t0
    except InvalidArgumentError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    summary = [_json_ready(r) for r in records]
    path = os.path.join(out, "verify.json")
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    for r in summary:
        status = "pass" if r["pass"] else "FAIL"
        click.echo(f"{status}  {r['criterion']}")
    n_fail = sum(not r["pass"] for r in summary)
    click.echo(f"{len(summary) - n_fail}/{len(summary)} checks passed "
               f"in {elapsed:.1f}s -> {path}")
    if n_fail:
        sys.exit(EXIT_NUMERICAL)


def _load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        click.echo(f"error: cannot read config: {exc}", err=True)
        sys.exit(EXIT_IO)
    except json.JSONDecodeError as exc:
        click.echo(f"config error: invalid JSON: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    if not isinstance(cfg, dict) or "cases" not in cfg or not isinstance(cfg["cases"], list):
        click.echo("config error: expected an object with a 'cases' list", err=True)
        sys.exit(EXIT_CONFIG)
    return cfg


def _validate_case(i, case):
    if not isinstance(case, dict):
        raise InvalidArgumentError(f"case {i}: expected an object")
    cid = case.get("case_id", f"case-{i}")
    domain = case.get("domain")
    method = case.get("method")
    if domain not in ("interval", "strip"):
        raise InvalidArgumentError(f"case {cid}: domain must be interval or strip")
    if method not in ("oracle", "mixed", "pdo"):
        raise InvalidArgumentError(f"case {cid}: method must be oracle, mixed or pdo")
    if domain == "interval" and method == "pdo":
        raise InvalidArgumentError(
            f"case {cid}: the two-stage method is defined on the strip only")
    g_list = case.get("g", [0.1])
    if not isinstance(g_list, list):
        g_list = [g_list]
    if not g_list or any(not isinstance(g, (int, float)) or g <= 0 for g in g_list):
        raise InvalidArgumentError(f"case {cid}: g must be positive")
    res = case.get("resolution", 64)
    if not isinstance(res, int) or res < 8:
        raise InvalidArgumentError(f"case {cid}: resolution must be an integer >= 8")
    modes = case.get("modes", 4)
    if not isinstance(modes, int) or modes < 1:
        raise InvalidArgumentError(f"case {cid}: modes must be a positive integer")
    return {"case_id": cid, "domain": domain, "method": method,
            "g": [float(g) for g in g_list], "resolution": res, "modes": modes}


def _run_interval_case(case):
    """Interval: solver error against the closed-form bar solution, per g."""
    from .constitutive import LameParams, gradient_params_for_simple_model
    from .mixed import IntervalDomain, assemble_mixed, solve_mixed
    from .oracle import closed_form_1d, solve_1d_hermite
    lame = LameParams(lam=0.0, mu=0.5)
    rows = []
    n = case["resolution"]
    for g in case["g"]:
        u_exact, _ = closed_form_1d(1.0, g, 1.0, 1.0)
        t0 = time.perf_counter()
        if case["method"] == "oracle":
            sol = solve_1d_hermite(lambda x: np.ones_like(x), g, 1.0, lame, n=n)
            space, coeffs = sol.u.space, sol.u.coeffs
        else:
            dom = IntervalDomain(1.0, n)
            params = gradient_params_for_simple_model(g, lame)
            state = solve_mixed(assemble_mixed(dom, lame, params),
                                lambda x: np.ones_like(x))
            space, coeffs = dom.space(), state.u[0]
        ms = 1e3 * (time.perf_counter() - t0)
        xs = np.linspace(0.0, 1.0, 4 * n + 1)
        diff = space.evaluate(coeffs, xs) - u_exact(xs)
        err = float(np.sqrt(np.trapezoid(diff ** 2, xs)))
        rows.append(dict(case_id=case["case_id"], domain="interval",
                         method=case["method"], g=g, h_or_ny=n, t=0,
                         error=err, runtime_ms=ms))
    return rows


def _run_strip_case(case):
    """Strip: perturbation error against the classical solution, per g."""
    from .constitutive import LameParams, gradient_params_for_simple_model
    from .mixed import solve_mixed_strip
    from .oracle import solve_strip_classical, solve_strip_fourth
    from .pdo import solve_problem_iii
    from .strip import StripField, StripGrid, project_profile, strip_error
    lame = LameParams(lam=1.0, mu=1.0)
    grid = StripGrid(K=case["modes"], n_y=case["resolution"])
    f = StripField(grid)
    p = project_profile(grid.space, lambda y: np.sin(np.pi * y))
    f.set_mode(0, np.stack([p, np.zeros_like(p)]))
    f.set_mode(1, np.stack([0.4 * p, 0.2j * p]))
    u0 = solve_strip_classical(f, lame).u
    rows = []
    for g in case["g"]:
        t0 = time.perf_counter()
        if case["method"] == "oracle":
            ug = solve_strip_fourth(f, g, lame).u
        elif case["method"] == "pdo":
            ug = solve_problem_iii(f, g, lame)[1].u
        else:
            params = gradient_params_for_simple_model(g, lame)
            ug = solve_mixed_strip(f, lame, params).u
        ms = 1e3 * (time.perf_counter() - t0)
        for t in (0, 1, 2):
            rows.append(dict(case_id=case["case_id"], domain="strip",
                             method=case["method"], g=g,
                             h_or_ny=case["resolution"], t=t,
                             error=strip_error(ug, u0, t), runtime_ms=ms))
    return rows


@main.command()
@click.argument("config", type=click.Path())
@click.option("--out", default=".", show_default=True, help="Output directory.")
@click.option("--threads", default=1, show_default=True, help="Worker threads.")
@click.option("--seed", default=0, show_default=True, help="Unused by deterministic cases.")
def run(config, out, threads, seed):
    """Run the cases of a JSON config and write report.csv in the output dir."""
    out = _out_dir(out)
    cfg = _load_config(config)
    try:
        cases = [_validate_case(i, c) for i, c in enumerate(cfg["cases"])]
        if threads < 1:
            raise InvalidArgumentError("--threads must be >= 1")
    except InvalidArgumentError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    def worker(case):
        if case["domain"] == "interval":
            return _run_interval_case(case)
        return _run_strip_case(case)

    try:
        if threads == 1:
            results = [worker(c) for c in cases]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(worker, cases))
    except GradElastError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)

    rep = ConvergenceReport()
    for case, rows in zip(cases, results):
        for r in rows:
            click.echo(f"{case['case_id']}: g={r['g']} t={r['t']} "
                       f"error={r['error']:.3e} ({r['runtime_ms']:.0f} ms)")
            r = dict(r, runtime_ms=0.0)   # timings stay out of the file
            rep.add_row(**r)
    path = os.path.join(out, "report.csv")
    rep.to_csv(path)
    click.echo(f"wrote {len(rep.rows)} rows -> {path}")


def emit_plots(report: ConvergenceReport, out_dir, prefix="report"):
    """One SVG per (case, norm index): log-log error vs the sweep parameter.

    Groups with fewer than two rows, or with nonpositive data, are skipped
    with a warning; fitted slopes are annotated when defined.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    written = []
    groups = {}
    for r in rows_sorted(report.rows):
        groups.setdefault((r["case_id"], r["t"]), []).append(r)
    for (cid, t), rows in groups.items():
        if len(rows) < 2:
            click.echo(f"warning: {cid} t={t}: fewer than 2 rows, plot skipped", err=True)
            continue
        gs = sorted({r["g"] for r in rows})
        key = "g" if len(gs) > 1 else "h_or_ny"
        xs = np.array([r[key] for r in rows], dtype=float)
        es = np.array([r["error"] for r in rows], dtype=float)
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        if np.all(es > 0) and np.all(xs > 0) and len(set(xs)) > 1:
            slope = float(np.polyfit(np.log(xs), np.log(es), 1)[0])
            label = f"slope {slope:+.2f}"
            ax.loglog(xs, es, "o-", label=label)
            ax.legend()
        else:
            ax.plot(xs, es, "o-", label="slope undefined")
            ax.legend()
        ax.set_xlabel(key)
        ax.set_ylabel(f"error (t={t})")
        ax.set_title(cid)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{prefix}-{cid}-t{t}.svg")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written


def rows_sorted(rows):
    return sorted(rows, key=lambda r: (r["case_id"], r["t"], -r["g"], r["h_or_ny"]))


@main.command()
@click.argument("report", type=click.Path())
@click.option("--out", default=".", show_default=True, help="Output directory.")
@click.option("--threads", default=1, show_default=True, help="Unused.")
@click.option("--seed", default=0, show_default=True, help="Unused.")
def plot(report, out, threads, seed):
    """Render log-log plots from a report CSV."""
    out = _out_dir(out)
    try:
        rep = ConvergenceReport.from_csv(report)
    except OSError as exc:
        click.echo(f"error: cannot read report: {exc}", err=True)
        sys.exit(EXIT_IO)
    except (InvalidArgumentError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    prefix = os.path.splitext(os.path.basename(report))[0]
    written = emit_plots(rep, out, prefix=prefix)
    for path in written:
        click.echo(f"wrote {path}")
    if not written:
        click.echo("no plots written", err=True)


if __name__ == "__main__":
    main()
