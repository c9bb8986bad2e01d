"""Constitutive objects of isotropic gradient elasticity.

Strain, Cauchy stress, the double stress in both its explicit five-parameter
form and the condensed rank-6 form ``mu = H : grad(strain)``, the positivity
certificate of H, the static flat-boundary traction, and the Navier operator.

The permutation superscripts in the five-parameter double-stress formula are
applied as inverse permutations relative to :func:`gradelast.tensors.permute`;
that is the unique reading under which the result is symmetric in its last
two indices for every displacement field, which the theory requires.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CoercivityError, InternalConsistencyError, InvalidArgumentError
from .tensors import (
    multidot,
    permute,
    sym_last_two,
    sym_orthonormal_basis,
    sym_triadic_dim,
)


@dataclass(frozen=True)
class LameParams:
    """Classical isotropic moduli (stress units)."""

    lam: float
    mu: float

    def __post_init__(self):
        if not (self.mu > 0 and 3 * self.lam + 2 * self.mu > 0):
            raise InvalidArgumentError(
                f"need mu > 0 and 3*lam + 2*mu > 0, got lam={self.lam}, mu={self.mu}")

    @property
    def p_wave(self):
        """lam + 2*mu, the uniaxial/longitudinal modulus."""
        return self.lam + 2 * self.mu


@dataclass(frozen=True)
class GradientParams:
    """The five gradient constitutive parameters (stress * length^2 units)."""

    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 0.0
    a5: float = 0.0

    def __post_init__(self):
        if any(a < 0 for a in self.as_tuple()):
            raise InvalidArgumentError(f"gradient parameters must be >= 0, got {self.as_tuple()}")

    def as_tuple(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a5)

    @property
    def a_min(self):
        """Minimum of the nonzero parameters (0 if all vanish)."""
        nz = [a for a in self.as_tuple() if a > 0]
        return min(nz) if nz else 0.0

    @property
    def is_zero(self):
        return all(a == 0 for a in self.as_tuple())

    @property
    def one_d_modulus(self):
        """Coefficient h with mu_111 = h * u'' in one dimension."""
        return 2.0 * sum(self.as_tuple())


@dataclass(frozen=True)
class SimpleGradientParam:
    """Internal length g of the simplest gradient model (both length scales equal g)."""

    g: float

    def __post_init__(self):
        if self.g < 0:
            raise InvalidArgumentError(f"need g >= 0, got {self.g}")

    @property
    def s(self):
        if self.g == 0:
            raise InvalidArgumentError("s = 1/g undefined for the classical limit g = 0")
        return 1.0 / self.g


def gradient_params_for_simple_model(g, lame: LameParams) -> GradientParams:
    """Gradient parameters realizing the one-length-scale model operator.

    Returns a parameter set whose double-stress divergence equals
    ``g^2 * laplacian(navier(u))``, so the fourth-order equation becomes
    ``(1 - g^2 laplacian) navier(u) = -f``.  Requires lam >= 0.
    """
    if lame.lam < 0:
        raise InvalidArgumentError("simple-model parameter map needs lam >= 0")
    return GradientParams(a2=0.5 * g * g * lame.lam, a4=g * g * lame.mu)


@dataclass
class FieldJet:
    """Pointwise displacement data: value, gradient, and Hessian.

    ``grad[i, j] = d_i u_j`` and ``hess[i, j, k] = d_i d_j u_k`` (symmetric in
    the two derivative slots).
    """

    u: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.grad = np.asarray(self.grad, dtype=float)
        self.hess = np.asarray(self.hess, dtype=float)
        d = self.u.shape[0]
        if self.grad.shape != (d, d) or self.hess.shape != (d, d, d):
            raise InvalidArgumentError("jet arrays have inconsistent shapes")
        if not np.allclose(self.hess, np.swapaxes(self.hess, 0, 1), atol=1e-12):
            raise InvalidArgumentError("Hessian must be symmetric in its derivative slots")

    @property
    def d(self):
        return self.u.shape[0]


def strain(grad_u):
    grad_u = np.asarray(grad_u, dtype=float)
    return 0.5 * (grad_u + grad_u.T)


def cauchy_stress(e, p: LameParams):
    e = np.asarray(e, dtype=float)
    if not np.allclose(e, e.T, atol=1e-12):
        raise InvalidArgumentError("strain input must be symmetric")
    d = e.shape[0]
    return 2 * p.mu * e + p.lam * np.trace(e) * np.eye(d)


def double_stress_direct(hess_u, p: GradientParams):
    """Five-parameter double stress evaluated term by term from d_i d_j u_k."""
    hess_u = np.asarray(hess_u, dtype=float)
    d = hess_u.shape[0]
    if not np.allclose(hess_u, np.swapaxes(hess_u, 0, 1), atol=1e-12):
        raise InvalidArgumentError("second-derivative input must be symmetric in derivative slots")
    eye = np.eye(d)
    lap = np.einsum('mmi->i', hess_u)          # laplacian of u
    gdiv = np.einsum('kmm->k', hess_u)         # gradient of div u
    i_lap = np.einsum('ij,k->ijk', eye, lap)   # delta_ij * lap(u)_k
    i_gdiv = np.einsum('ij,k->ijk', eye, gdiv)

    # index reorderings 312 / 132 / 231 applied as inverse permutations
    p312 = lambda t: permute(t, (2, 3, 1))
    p132 = lambda t: permute(t, (1, 3, 2))
    p231 = lambda t: permute(t, (3, 1, 2))

    a1, a2, a3, a4, a5 = p.as_tuple()
    mu3 = 0.5 * a1 * (p312(i_lap) + i_gdiv + p312(i_gdiv) + p132(i_gdiv))
    mu3 += 2 * a2 * p312(i_gdiv)
    mu3 += 0.5 * a3 * (i_lap + i_gdiv + p132(i_lap) + p132(i_gdiv))
    mu3 += a4 * (hess_u + p231(hess_u))
    mu3 += 0.5 * a5 * (2 * p312(hess_u) + hess_u + p231(hess_u))
    return mu3


# ---------------------------------------------------------------------------
# The rank-6 constitutive tensor.

def _symmetry_group():
    """The 8 permutations generated by the three constitutive symmetries."""
    s23 = (1, 3, 2, 4, 5, 6)
    s45 = (1, 2, 3, 5, 4, 6)
    rev = (6, 5, 4, 3, 2, 1)
    ident = (1, 2, 3, 4, 5, 6)

    def compose(p, q):
        # superscript composition: (T^p)^q = T^(p o q) with (p o q)(i) = p(q(i))
        return tuple(p[q[i] - 1] for i in range(6))

    group = {ident}
    frontier = [ident]
    gens = [s23, s45, rev]
    while frontier:
        new = []
        for g in frontier:
            for h in gens:
                c = compose(g, h)
                if c not in group:
                    group.add(c)
                    new.append(c)
        frontier = new
    return sorted(group)


def _hess_from_sym_triadic(nu):
    """Linear extension of grad(grad(u)) in terms of nu = grad(strain)."""
    # d_i d_j u_k = nu_ijk + nu_jki - nu_kij for nu coming from a field
    return nu + np.transpose(nu, (2, 0, 1)) - np.transpose(nu, (1, 2, 0))


@dataclass
class HexadicH:
    """The rank-6 tensor H with mu = H : nu on symmetric triadics."""

    tensor: np.ndarray
    params: GradientParams
    d: int
    _c_a: float | None = field(default=None, repr=False)

    def matrix(self):
        """(d^3, d^3) matrix M with vec(mu) = M @ vec(nu) under C-order flattening."""
        d = self.d
        m = np.transpose(self.tensor, (0, 1, 2, 5, 4, 3)).reshape(d ** 3, d ** 3)
        return m

    def apply(self, nu):
        """mu = H : nu for a rank-3 tensor, via the pinned triple contraction."""
        return multidot(self.tensor, np.asarray(nu, dtype=float), 3)

    def reduced_quadratic_form(self):
        """Quadratic-form matrix on the Frobenius-orthonormal symmetric basis."""
        B = sym_orthonormal_basis(self.d)
        return B.T @ self.matrix() @ B

    @property
    def c_a(self):
        if self._c_a is None:
            self._c_a = float(np.linalg.eigvalsh(self.reduced_quadratic_form())[0])
        return self._c_a

    @property
    def is_zero(self):
        return not np.any(self.tensor)


@lru_cache(maxsize=None)
def _build_h_cached(a_tuple, d):
    params = GradientParams(*a_tuple)
    n = d ** 3
    # kernel of the map nu -> mu, column by column over the full rank-3 space
    M = np.zeros((n, n))
    for col in range(n):
        nu = np.zeros(n)
        nu[col] = 1.0
        nu = nu.reshape(d, d, d)
        hess = _hess_from_sym_triadic(nu)
        hess = 0.5 * (hess + np.swapaxes(hess, 0, 1))  # map is only used on admissible input
        M[:, col] = double_stress_direct(hess, params).reshape(-1)
    # lift to a rank-6 kernel: H[i,j,k,a,b,c] pairs with nu[c,b,a]
    H = M.reshape((d,) * 6)
    H = np.transpose(H, (0, 1, 2, 5, 4, 3))
    # average over the symmetry group
    group = _symmetry_group()
    H = sum(permute(H, g) for g in group) / len(group)
    return H


def build_H(p: GradientParams, d: int) -> HexadicH:
    """Construct the symmetric rank-6 tensor reproducing the explicit double stress."""
    if d not in (1, 2, 3):
        raise InvalidArgumentError(f"dimension must be 1, 2 or 3, got {d}")
    H = _build_h_cached(p.as_tuple(), d)
    hex_h = HexadicH(tensor=H, params=p, d=d)
    _verify_h(hex_h)
    return hex_h


def _verify_h(h: HexadicH):
    T = h.tensor
    for sigma in ((1, 3, 2, 4, 5, 6), (1, 2, 3, 5, 4, 6), (6, 5, 4, 3, 2, 1)):
        if not np.allclose(permute(T, sigma), T, atol=1e-13, rtol=0):
            raise InternalConsistencyError(f"constructed H violates symmetry {sigma}")
    # spot-check agreement with the explicit form on a few random fields
    rng = np.random.default_rng(0)
    d = h.d
    for _ in range(5):
        hess = rng.standard_normal((d, d, d))
        hess = 0.5 * (hess + np.swapaxes(hess, 0, 1))
        nu = sym_last_two(hess)
        direct = double_stress_direct(hess, h.params)
        via_h = h.apply(nu)
        scale = max(1.0, np.abs(direct).max())
        if not np.allclose(via_h, direct, atol=1e-11 * scale, rtol=0):
            raise InternalConsistencyError("H form disagrees with the explicit double stress")


def coercivity_certificate(h: HexadicH, n_samples=10_000, rng=None):
    """Smallest eigenvalue of the H quadratic form on symmetric triadics.

    Raises :class:`CoercivityError` when the form is not strictly positive.
    Also samples random unit symmetric triadics and asserts the bound holds.
    """
    p = h.params
    if p.a4 == 0 and p.a5 == 0:
        raise CoercivityError("a4 and a5 must not vanish simultaneously")
    c_a = h.c_a
    if c_a <= 0:
        raise CoercivityError(f"nonpositive smallest eigenvalue {c_a}")
    rng = np.random.default_rng(rng)
    B = sym_orthonormal_basis(h.d)
    Q = h.reduced_quadratic_form()
    z = rng.standard_normal((n_samples, B.shape[1]))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    vals = np.einsum('ni,ij,nj->n', z, Q, z)
    if vals.min() < c_a - 1e-12:
        raise InternalConsistencyError("sampled quadratic form fell below the certified bound")
    return c_a


# ---------------------------------------------------------------------------
# Boundary quantities and the Navier operator.

def double_stress_trace(mu3, n_hat):
    """Surface double stress n . mu . n."""
    mu3 = np.asarray(mu3, dtype=float)
    n_hat = np.asarray(n_hat, dtype=float)
    return np.einsum('i,ijk,j->k', n_hat, mu3, n_hat)


def traction_static(tau, grad_mu3, n_hat):
    """Static surface traction on a flat boundary patch.

    ``grad_mu3[l, i, j, k] = d_l mu_ijk``.  Curvature terms vanish on flat
    patches and are not represented; the inertial term is out of scope.
    """
    tau = np.asarray(tau, dtype=float)
    grad_mu3 = np.asarray(grad_mu3, dtype=float)
    n_hat = np.asarray(n_hat, dtype=float)
    if abs(np.linalg.norm(n_hat) - 1.0) > 1e-12:
        raise InvalidArgumentError("normal vector must have unit length")
    dmu_dn = np.einsum('l,lijk->ijk', n_hat, grad_mu3)
    # surface gradient: remove the normal part of each derivative slot
    grad_s = grad_mu3 - np.einsum('l,m,mijk->lijk', n_hat, n_hat, grad_mu3)
    p_vec = np.einsum('i,ik->k', n_hat, tau)
    p_vec = p_vec - np.einsum('i,j,ijk->k', n_hat, n_hat, dmu_dn)
    p_vec = p_vec - np.einsum('j,iijk->k', n_hat, grad_s)      # n . (div_S mu)
    p_vec = p_vec - np.einsum('j,ijik->k', n_hat, grad_s)      # n . (div_S mu^{213})
    return p_vec


def navier_apply(jet: FieldJet, p: LameParams):
    """The classical elastostatic operator mu*lap(u) + (lam+mu)*grad(div u)."""
    lap = np.einsum('mmi->i', jet.hess)
    gdiv = np.einsum('kmm->k', jet.hess)
    return p.mu * lap + (p.lam + p.mu) * gdiv
