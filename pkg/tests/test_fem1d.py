import numpy as np
import pytest

from gradelast.errors import (
    FredholmIncompatibilityError,
    InvalidArgumentError,
    SingularSystemError,
)
from gradelast.fem1d import (
    DiscreteField,
    FeSpace,
    IntervalMesh,
    assemble_load,
    assemble_operator,
    gauss_rule,
    sobolev_norm,
    sobolev_seminorm,
    solve_linear,
)


class TestMeshAndQuadrature:
    def test_mesh_validation(self):
        with pytest.raises(InvalidArgumentError):
            IntervalMesh(-1.0, 4)
        with pytest.raises(InvalidArgumentError):
            IntervalMesh(1.0, 1)

    def test_refine(self):
        m = IntervalMesh(2.0, 4)
        assert m.refine().h == pytest.approx(m.h / 2)

    @pytest.mark.parametrize("npts,deg", [(2, 3), (4, 7)])
    def test_gauss_exactness(self, npts, deg):
        t, w = gauss_rule(npts)
        for p in range(deg + 1):
            assert np.dot(w, t ** p) == pytest.approx(1.0 / (p + 1))


class TestAssembly:
    def test_p1_element_matrices(self):
        # hand-integrated single-element mass h/6 [[2,1],[1,2]] and
        # stiffness 1/h [[1,-1],[-1,1]]
        m = IntervalMesh(1.0, 2)
        V = FeSpace(m, "P1")
        M = assemble_operator(V, 0, 0).toarray()
        K = assemble_operator(V, 1, 1).toarray()
        h = m.h
        assert M[0, 0] == pytest.approx(2 * h / 6)
        assert M[0, 1] == pytest.approx(h / 6)
        assert M[1, 1] == pytest.approx(4 * h / 6)  # two elements share the node
        assert K[0, 0] == pytest.approx(1 / h)
        assert K[0, 1] == pytest.approx(-1 / h)

    @pytest.mark.parametrize("family", ["P1", "P2", "Hermite3"])
    def test_constant_in_stiffness_kernel(self, family):
        V = FeSpace(IntervalMesh(1.0, 4), family)
        K = assemble_operator(V, 1, 1)
        if family == "Hermite3":
            one = V.interpolate(lambda x: 1.0, lambda x: 0.0)
        else:
            one = V.interpolate(lambda x: 1.0)
        assert np.abs(K @ one).max() < 1e-13

    def test_variable_coefficient(self):
        # int_0^1 x * phi_a' phi_b' on P1 against the exact value for
        # the first diagonal entry: int_0^h x / h^2 = h^2/2 / h^2 = 1/2...
        V = FeSpace(IntervalMesh(1.0, 8), "P1")
        K = assemble_operator(V, 1, 1, coeff=lambda x: x)
        h = V.mesh.h
        assert K[0, 0] == pytest.approx(0.5 * h ** 2 / h ** 2)

    def test_nonconforming_rejected(self):
        V = FeSpace(IntervalMesh(1.0, 4), "P2")
        with pytest.raises(InvalidArgumentError):
            assemble_operator(V, 2, 2)

    def test_load_total(self):
        V = FeSpace(IntervalMesh(3.0, 5), "P2")
        b = assemble_load(V, 2.0)
        assert b.sum() == pytest.approx(6.0)


class TestSolve:
    def test_poisson_dirichlet(self):
        # -u'' = 1 on (0,1), u(0)=u(1)=0: u = x(1-x)/2
        V = FeSpace(IntervalMesh(1.0, 16), "P2")
        K = assemble_operator(V, 1, 1)
        b = assemble_load(V, 1.0)
        x = solve_linear(K, b, fixed={0: 0.0, V.ndof - 1: 0.0})
        assert V.evaluate(x, 0.5)[0] == pytest.approx(0.125, abs=1e-10)

    def test_beam_clamped(self):
        # u'''' = 1 clamped both ends: u = x^2 (1-x)^2 / 24
        V = FeSpace(IntervalMesh(1.0, 8), "Hermite3")
        K = assemble_operator(V, 2, 2)
        b = assemble_load(V, 1.0)
        fixed = {0: 0.0, 1: 0.0, V.ndof - 2: 0.0, V.ndof - 1: 0.0}
        x = solve_linear(K, b, fixed=fixed)
        assert V.evaluate(x, 0.5)[0] == pytest.approx(1 / 384, abs=1e-12)

    def test_inhomogeneous_essential(self):
        # u'' = 0 with u(0)=1, u(1)=3: linear interpolant
        V = FeSpace(IntervalMesh(1.0, 4), "P1")
        K = assemble_operator(V, 1, 1)
        x = solve_linear(K, np.zeros(V.ndof), fixed={0: 1.0, V.ndof - 1: 3.0})
        assert V.evaluate(x, 0.25)[0] == pytest.approx(1.5)

    def test_deflated_neumann(self):
        # pure Neumann Poisson with compatible load, solution mean-free
        V = FeSpace(IntervalMesh(1.0, 64), "P2")
        K = assemble_operator(V, 1, 1)
        b = assemble_load(V, lambda x: np.cos(np.pi * x))
        Z = np.ones((V.ndof, 1))
        x = solve_linear(K, b, deflation=Z)
        xs = np.linspace(0, 1, 101)
        exact = np.cos(np.pi * xs) / np.pi ** 2
        got = V.evaluate(x, xs)
        assert np.abs((got - got.mean()) - (exact - exact.mean())).max() < 1e-6

    def test_fredholm_violation(self):
        V = FeSpace(IntervalMesh(1.0, 8), "P1")
        K = assemble_operator(V, 1, 1)
        b = assemble_load(V, 1.0)  # total force not zero
        with pytest.raises(FredholmIncompatibilityError):
            solve_linear(K, b, deflation=np.ones((V.ndof, 1)))

    def test_singular_without_deflation(self):
        V = FeSpace(IntervalMesh(1.0, 8), "P1")
        K = assemble_operator(V, 1, 1)
        b = assemble_load(V, 1.0)
        with pytest.raises(SingularSystemError):
            solve_linear(K, b)


class TestFieldsAndNorms:
    def test_interpolation_error_small(self):
        V = FeSpace(IntervalMesh(1.0, 32), "Hermite3")
        c = V.interpolate(np.sin, np.cos)
        xs = np.linspace(0, 1, 200)
        assert np.abs(V.evaluate(c, xs) - np.sin(xs)).max() < 1e-6

    def test_h2_seminorm_sine(self):
        # |sin(pi x)|_{H^2(0,1)} = pi^2 / sqrt(2)
        V = FeSpace(IntervalMesh(1.0, 64), "Hermite3")
        c = V.interpolate(lambda x: np.sin(np.pi * x),
                          lambda x: np.pi * np.cos(np.pi * x))
        f = DiscreteField(V, c)
        assert sobolev_seminorm(f, 2) == pytest.approx(np.pi ** 2 / np.sqrt(2),
                                                       rel=1e-6)

    def test_h1_norm_sine(self):
        V = FeSpace(IntervalMesh(1.0, 64), "P2")
        c = V.interpolate(lambda x: np.sin(np.pi * x))
        f = DiscreteField(V, c)
        exact = np.sqrt(0.5 + 0.5 * np.pi ** 2)
        assert sobolev_norm(f, 1) == pytest.approx(exact, rel=1e-6)

    def test_norm_order_rejected(self):
        V = FeSpace(IntervalMesh(1.0, 8), "P1")
        f = DiscreteField(V, np.zeros(V.ndof))
        with pytest.raises(InvalidArgumentError):
            sobolev_norm(f, 2)

    def test_trace_row(self):
        V = FeSpace(IntervalMesh(1.0, 16), "Hermite3")
        c = V.interpolate(lambda x: np.sin(np.pi * x),
                          lambda x: np.pi * np.cos(np.pi * x))
        assert V.trace_row(0.0, 1) @ c == pytest.approx(np.pi)
        assert V.trace_row(1.0, 0) @ c == pytest.approx(np.sin(np.pi), abs=1e-12)

    def test_coeff_size_checked(self):
        V = FeSpace(IntervalMesh(1.0, 8), "P1")
        with pytest.raises(InvalidArgumentError):
            DiscreteField(V, np.zeros(3))
