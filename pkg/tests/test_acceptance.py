"""Release gate: the full verification battery at its declared tolerances.

Each test runs one check from the battery and asserts both the numerical
verdict and the declared runtime budget.  The positivity check (03) encodes
a literature claim that admits counterexamples within its stated parameter
population; it is implemented faithfully and is expected to fail until the
claim is narrowed.
"""

import time

import pytest

from gradelast import acceptance


def _run(check, budget_s):
    t0 = time.perf_counter()
    rec = check(seed=0)
    elapsed = time.perf_counter() - t0
    assert elapsed < budget_s, f"{rec['criterion']} took {elapsed:.1f}s (budget {budget_s}s)"
    return rec


def test_criterion_01_constitutive_equivalence():
    rec = _run(acceptance.check_constitutive_equivalence, 5)
    assert rec["pass"], rec
    assert rec["measured"] <= 1e-12


def test_criterion_02_h_symmetries():
    rec = _run(acceptance.check_h_symmetries, 1)
    assert rec["pass"], rec
    assert rec["measured"] <= 1e-15


def test_criterion_03_h_positivity():
    rec = _run(acceptance.check_h_positivity, 5)
    assert rec["pass"], (
        "positivity fails on the stated parameter population; "
        f"counterexample: {rec['measured']['worst_case']} with smallest "
        f"eigenvalue {rec['measured']['min_eigenvalue']:.3f}")


def test_criterion_04_1d_oracle():
    rec = _run(acceptance.check_1d_oracle, 10)
    assert rec["pass"], rec
    m = rec["measured"]
    assert m["max_error"] <= 1e-6
    assert abs(m["midpoint"] - 0.1151347) < 1e-6
    assert m["h1_order"] >= 1.8


def test_criterion_05_mixed_vs_oracle():
    rec = _run(acceptance.check_mixed_vs_oracle, 60)
    assert rec["pass"], rec
    m = rec["measured"]
    assert m["rel_l2_1d"] <= 1e-3 and m["rel_l2_strip"] <= 1e-3
    assert m["constraint_order_1d"] >= 0.9 and m["constraint_order_strip"] >= 0.9


def test_criterion_06_operator_structure():
    rec = _run(acceptance.check_operator_structure, 30)
    assert rec["pass"], rec
    assert rec["measured"]["plus_asymmetry"] == 0.0
    assert rec["measured"]["min_ritz"] > 0


def test_criterion_07_fredholm_rigid_motions():
    rec = _run(acceptance.check_fredholm, 30)
    assert rec["pass"], rec
    m = rec["measured"]
    assert (m["dim_1d"], m["dim_2d"]) == (1, 3)
    assert m["rejects_unbalanced"] and m["residual"] <= 1e-10


def test_criterion_08_two_stage_equivalence():
    rec = _run(acceptance.check_two_stage_equivalence, 60)
    assert rec["pass"], rec
    assert rec["measured"] <= 1e-3


def test_criterion_09_t0_order_zero():
    rec = _run(acceptance.check_t0_order_zero, 30)
    assert rec["pass"], rec
    m = rec["measured"]
    assert m["halves_ratio"] <= 1.5
    assert m["t0_at_zero"] == 0.0
    assert m["raw_exponent"] >= 1.8


def test_criterion_10_rate_bounds():
    rec = _run(acceptance.check_rate_bounds, 120)
    assert rec["pass"], rec
    assert rec["measured"]["h1_slope"] >= 1.4
    assert rec["measured"]["h2_slope"] >= 0.45


def test_criterion_11_classical_degeneration():
    rec = _run(acceptance.check_classical_degeneration, 30)
    assert rec["pass"], rec
    assert rec["measured"]["monotone"]
    assert rec["measured"]["classical_error"] <= 1e-8
