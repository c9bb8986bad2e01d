import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradelast.constitutive import (
    FieldJet,
    GradientParams,
    LameParams,
    SimpleGradientParam,
    build_H,
    cauchy_stress,
    coercivity_certificate,
    double_stress_direct,
    double_stress_trace,
    gradient_params_for_simple_model,
    navier_apply,
    strain,
    traction_static,
)
from gradelast.errors import CoercivityError, InvalidArgumentError
from gradelast.tensors import sym_last_two

LAME = LameParams(lam=1.0, mu=1.0)
APARAMS = GradientParams(0.1, 0.2, 0.3, 0.4, 0.5)


class TestParams:
    def test_lame_validation(self):
        with pytest.raises(InvalidArgumentError):
            LameParams(lam=0.0, mu=-1.0)
        with pytest.raises(InvalidArgumentError):
            LameParams(lam=-1.0, mu=1.0)  # 3*lam + 2*mu < 0
        assert LameParams(lam=-0.5, mu=1.0).p_wave == 1.5

    def test_gradient_validation(self):
        with pytest.raises(InvalidArgumentError):
            GradientParams(a1=-0.1)
        assert GradientParams().is_zero
        assert APARAMS.one_d_modulus == pytest.approx(3.0)
        assert APARAMS.a_min == pytest.approx(0.1)

    def test_simple_param(self):
        with pytest.raises(InvalidArgumentError):
            SimpleGradientParam(-1.0)
        assert SimpleGradientParam(0.25).s == 4.0
        with pytest.raises(InvalidArgumentError):
            SimpleGradientParam(0.0).s

    def test_simple_model_map(self):
        p = gradient_params_for_simple_model(0.1, LAME)
        assert p.one_d_modulus == pytest.approx(0.01 * LAME.p_wave)


class TestStressPointwise:
    def test_strain_symmetry(self, rng):
        g = rng.standard_normal((3, 3))
        e = strain(g)
        assert np.allclose(e, e.T)
        assert np.allclose(e, 0.5 * (g + g.T))

    def test_cauchy_uniaxial(self):
        e = np.diag([1.0, 0.0, 0.0])
        tau = cauchy_stress(e, LAME)
        assert tau[0, 0] == pytest.approx(LAME.p_wave)
        assert tau[1, 1] == pytest.approx(LAME.lam)
        assert tau[0, 1] == 0.0

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_double_stress_symmetric_last_two(self, make_jet, d):
        jet = make_jet(d)
        mu3 = double_stress_direct(jet.hess, APARAMS)
        assert np.allclose(mu3, np.swapaxes(mu3, 1, 2), atol=1e-13)

    def test_double_stress_1d(self, make_jet):
        jet = make_jet(1)
        mu3 = double_stress_direct(jet.hess, APARAMS)
        assert mu3[0, 0, 0] == pytest.approx(
            APARAMS.one_d_modulus * jet.hess[0, 0, 0])


class TestHexadicH:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matches_direct(self, make_jet, d):
        h = build_H(APARAMS, d)
        jet = make_jet(d)
        nu = sym_last_two(jet.hess)
        assert np.allclose(h.apply(nu), double_stress_direct(jet.hess, APARAMS),
                           atol=1e-12)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matrix_form(self, make_jet, d):
        h = build_H(APARAMS, d)
        jet = make_jet(d)
        nu = sym_last_two(jet.hess)
        assert np.allclose(h.matrix() @ nu.ravel(), h.apply(nu).ravel(), atol=1e-12)

    @given(st.integers(1, 3), st.integers(0, 10 ** 6))
    @settings(max_examples=60, deadline=None)
    def test_quadratic_form_symmetric(self, d, seed):
        rng = np.random.default_rng(seed)
        h = build_H(APARAMS, d)
        a = sym_last_two(rng.standard_normal((d, d, d)))
        b = sym_last_two(rng.standard_normal((d, d, d)))
        lhs = np.sum(h.apply(a) * b)
        rhs = np.sum(h.apply(b) * a)
        assert lhs == pytest.approx(rhs, abs=1e-12, rel=1e-12)

    def test_coercivity_values(self):
        assert build_H(APARAMS, 1).c_a == pytest.approx(3.0)
        assert build_H(GradientParams(a4=1.0), 3).c_a == pytest.approx(2.0)

    def test_certificate_positive(self):
        h = build_H(APARAMS, 3)
        c = coercivity_certificate(h, n_samples=2000, rng=0)
        assert c > 0

    def test_certificate_rejects_degenerate(self):
        h = build_H(GradientParams(a1=1.0), 3)
        with pytest.raises(CoercivityError):
            coercivity_certificate(h)

    def test_zero_params(self):
        h = build_H(GradientParams(), 2)
        assert h.is_zero


class TestBoundary:
    def test_trace(self, rng):
        mu3 = rng.standard_normal((3, 3, 3))
        n = np.array([0.0, 0.0, 1.0])
        assert np.allclose(double_stress_trace(mu3, n), mu3[2, 2, :])

    def test_traction_needs_unit_normal(self, rng):
        with pytest.raises(InvalidArgumentError):
            traction_static(np.eye(3), rng.standard_normal((3, 3, 3, 3)),
                            np.array([0.0, 0.0, 2.0]))

    def test_traction_classical_limit(self, rng):
        # with zero double stress the traction is n . tau
        tau = rng.standard_normal((3, 3))
        tau = 0.5 * (tau + tau.T)
        n = np.array([1.0, 0.0, 0.0])
        p = traction_static(tau, np.zeros((3, 3, 3, 3)), n)
        assert np.allclose(p, tau[0])

    def test_traction_1d_bar(self):
        # uniform unit load on a unit bar with unit uniaxial modulus:
        # the end reaction at x = 0 balances half the load exactly
        lame = LameParams(lam=0.0, mu=0.5)  # lam + 2 mu = 1
        g = 0.1
        p = gradient_params_for_simple_model(g, lame)
        E = lame.p_wave
        L, f = 1.0, 1.0

        def u_x(x, order):
            # closed-form solution of the gradient bar problem
            c = np.cosh((x - L / 2) / g) / np.cosh(L / (2 * g))
            s = np.sinh((x - L / 2) / g) / np.cosh(L / (2 * g))
            if order == 1:
                return (f / (2 * E)) * (L - 2 * x) + g * (f / E) * s
            if order == 2:
                return -f / E + (f / E) * c
            if order == 3:
                return (f / E) * s / g
            raise AssertionError

        x0 = 0.0
        tau = cauchy_stress(np.array([[u_x(x0, 1)]]), lame)
        hess = np.array([[[u_x(x0, 2)]]])
        third = np.array([[[[u_x(x0, 3)]]]])
        # grad_mu3[l, i, j, k] = d_l mu_ijk = h * u''' in one dimension
        grad_mu3 = p.one_d_modulus * third
        n = np.array([-1.0])
        reaction = traction_static(tau, grad_mu3, n)
        assert reaction[0] == pytest.approx(-0.5, abs=1e-10)


class TestNavier:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matches_stress_divergence(self, make_jet, d):
        # navier(u) must equal the divergence of the Cauchy stress,
        # assembled independently from the Hessian
        jet = make_jet(d)
        lame = LameParams(lam=0.7, mu=1.3)
        # d_j tau_ji = mu (d_j d_j u_i + d_j d_i u_j) + lam d_i d_m u_m
        div_tau = (lame.mu * (np.einsum('jji->i', jet.hess)
                              + np.einsum('jij->i', jet.hess))
                   + lame.lam * np.einsum('imm->i', jet.hess))
        assert np.allclose(navier_apply(jet, lame), div_tau, atol=1e-12)

    def test_jet_validation(self, rng):
        hess = rng.standard_normal((3, 3, 3))  # not symmetric in derivative slots
        with pytest.raises(InvalidArgumentError):
            FieldJet(u=np.zeros(3), grad=np.zeros((3, 3)), hess=hess)
