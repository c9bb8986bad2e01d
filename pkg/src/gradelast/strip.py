"""Flat periodic strip: tangential Fourier modes times transverse 1D elements.

The strip is [0, 2pi) x [0, 1] with in-plane (d = 2) vector fields, periodic
in x and with flat edges at y = 0 and y = 1.  A field is stored modewise,
one complex transverse profile per component per retained frequency
k = -K..K; tangential derivatives become multiplications by ik, transverse
derivatives act on the 1D element space.  One assembler provides the
classical (Navier) mode blocks, the strain-gradient blocks, mass blocks and
the weighted second-derivative edge traces, so the direct fourth-order
solver, the classical solver and the two-stage scheme all share a single
discretization path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .constitutive import HexadicH, LameParams
from .errors import InvalidArgumentError
from .fem1d import FeSpace, IntervalMesh, assemble_load, assemble_operator


@dataclass(frozen=True)
class StripGrid:
    """Tangential period 2pi with modes k = -K..K; transverse [0, 1] with n_y elements."""

    K: int
    n_y: int
    family: str = "Hermite3"

    def __post_init__(self):
        if self.K < 1:
            raise InvalidArgumentError(f"need K >= 1, got {self.K}")
        if self.n_y < 8:
            raise InvalidArgumentError(f"need n_y >= 8, got {self.n_y}")

    @property
    def modes(self):
        return np.arange(-self.K, self.K + 1)

    @cached_property
    def space(self):
        return FeSpace(IntervalMesh(1.0, self.n_y), self.family)

    @property
    def ndof_y(self):
        return self.space.ndof


class StripField:
    """Modewise in-plane vector field: complex coefficients (2K+1, 2, ndof_y)."""

    def __init__(self, grid: StripGrid, coeffs=None):
        self.grid = grid
        shape = (2 * grid.K + 1, 2, grid.ndof_y)
        if coeffs is None:
            coeffs = np.zeros(shape, dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != shape:
            raise InvalidArgumentError(f"expected coefficients of shape {shape}")
        self.coeffs = coeffs

    def mode(self, k):
        K = self.grid.K
        if abs(k) > K:
            raise InvalidArgumentError(f"|k| = {abs(k)} exceeds K = {K}")
        return self.coeffs[k + K]

    def set_mode(self, k, profile, enforce_real=True):
        """Store a mode profile; mirrors the conjugate into -k for real fields."""
        K = self.grid.K
        profile = np.asarray(profile, dtype=complex)
        self.coeffs[k + K] = profile
        if enforce_real and k != 0:
            self.coeffs[-k + K] = np.conj(profile)

    def is_conjugate_symmetric(self, tol=1e-12):
        K = self.grid.K
        scale = max(np.abs(self.coeffs).max(), 1.0)
        for k in range(1, K + 1):
            if np.abs(self.coeffs[k + K] - np.conj(self.coeffs[-k + K])).max() > tol * scale:
                return False
        return True

    def copy(self):
        return StripField(self.grid, self.coeffs.copy())

    def __add__(self, other):
        return StripField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return StripField(self.grid, self.coeffs - other.coeffs)

    def __rmul__(self, alpha):
        return StripField(self.grid, alpha * self.coeffs)

    def evaluate(self, x, y, comp, deriv_y=0):
        """Point values of one component on a (x, y) grid (outer product)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        vals = np.zeros((len(x), np.atleast_1d(y).size), dtype=complex)
        space = self.grid.space
        for k in self.grid.modes:
            prof = space.evaluate(self.mode(k)[comp], y, deriv_y)
            vals += np.exp(1j * k * x)[:, None] * prof[None, :]
        return vals


def project_profile(space: FeSpace, f):
    """L2 projection of a transverse callable onto the element space."""
    M = assemble_operator(space, 0, 0)
    b = assemble_load(space, f)
    return spla.spsolve(M.tocsc(), b)


# ---------------------------------------------------------------------------
# Per-mode operator assembly.

def _nu_symbol_terms():
    """Symbolic full-index strain-gradient components on the strip.

    Returns a dict (i, j, k) -> list of (component, x_order, y_order, coeff)
    with nu_ijk = d_i e_jk and d = (ik multiplication, d/dy).
    """
    terms = {}

    def add(idx, c, p, q, w):
        terms.setdefault(idx, []).append((c, p, q, w))

    for i in range(2):
        for j in range(2):
            for k in range(2):
                # nu_ijk = 1/2 (d_i d_j u_k + d_i d_k u_j)
                for (a, b, c) in ((i, j, k), (i, k, j)):
                    p = (a == 0) + (b == 0)
                    q = (a == 1) + (b == 1)
                    add((i, j, k), c, p, q, 0.5)
    return terms


_NU_TERMS = _nu_symbol_terms()


class ModeAssembler:
    """Builds the complex transverse block operators for each tangential mode."""

    def __init__(self, grid: StripGrid, lame: LameParams, h: HexadicH | None = None):
        if h is not None and h.d != 2:
            raise InvalidArgumentError("strip problems use the d = 2 constitutive tensor")
        self.grid = grid
        self.lame = lame
        self.h = h
        space = grid.space
        pmax = space.conformity
        self.D = {(p, q): assemble_operator(space, p, q).tocsr()
                  for p in range(pmax + 1) for q in range(pmax + 1)}
        self.n = space.ndof
        self._trace = {(y0, q): space.trace_row(y0, q)
                       for y0 in (0.0, 1.0) for q in range(pmax + 1)}

    def mass_block(self):
        """Block-diagonal L2 mass over the two components (sparse)."""
        return sp.block_diag([self.D[0, 0], self.D[0, 0]], format="csr")

    def navier_block(self, k):
        """Dirichlet-form Navier operator at mode k: integral tau(u) : e(conj v)."""
        lam, mu = self.lame.lam, self.lame.mu
        D = self.D
        k2 = float(k * k)
        ik = 1j * k
        return sp.bmat([
            [(lam + 2 * mu) * k2 * D[0, 0] + mu * D[1, 1],
             mu * ik * D[1, 0] - lam * ik * D[0, 1]],
            [-mu * ik * D[0, 1] + lam * ik * D[1, 0],
             (lam + 2 * mu) * D[1, 1] + mu * k2 * D[0, 0]],
        ], format="csr")

    def gradient_block(self, k):
        """Strain-gradient form at mode k: integral nu(u) : H : nu(conj v)."""
        if self.h is None:
            raise InvalidArgumentError("no rank-6 constitutive tensor attached")
        Hm = self.h.matrix()  # (8, 8) for d = 2
        idx = {(i, j, kk): (i * 2 + j) * 2 + kk
               for i in range(2) for j in range(2) for kk in range(2)}
        fac = {}
        for t_idx, t_terms in _NU_TERMS.items():
            for r_idx, r_terms in _NU_TERMS.items():
                w = Hm[idx[t_idx], idx[r_idx]]
                if w == 0.0:
                    continue
                for (ct, pt, qt, wt) in t_terms:
                    for (cr, pr, qr, wr) in r_terms:
                        c = w * wt * wr * np.conj((1j * k) ** pt) * (1j * k) ** pr
                        if c == 0.0:
                            continue
                        key = (ct, cr, qt, qr)
                        fac[key] = fac.get(key, 0.0) + c
        blocks = [[None, None], [None, None]]
        for (ct, cr, qt, qr), c in fac.items():
            M = c * self.D[qt, qr]
            blocks[ct][cr] = M if blocks[ct][cr] is None else blocks[ct][cr] + M
        zero = sp.csr_matrix((self.n, self.n), dtype=complex)
        blocks = [[b if b is not None else zero for b in row] for row in blocks]
        return sp.bmat(blocks, format="csr")

    def laplace_block(self, k):
        """Componentwise (-Delta_k) Dirichlet form: integral grad u . grad(conj v)."""
        blk = float(k * k) * self.D[0, 0] + self.D[1, 1]
        return sp.block_diag([blk, blk], format="csr").astype(complex)

    # -- boundary rows ------------------------------------------------------
    def edge_value_dofs(self):
        """Dofs carrying component values on both edges, as flat block indices."""
        vd = self.grid.space.boundary_value_dofs()
        return [c * self.n + d for c in range(2) for d in vd]

    def gamma0_rows(self, deriv=0):
        """(4, 2n) rows extracting both components at both edges (or y-derivatives)."""
        rows = np.zeros((4, 2 * self.n))
        r = 0
        for c in range(2):
            for y0 in (0.0, 1.0):
                rows[r, c * self.n:(c + 1) * self.n] = self._trace[y0, deriv]
                r += 1
        return rows

    def gamma2_rows(self, k):
        """(4, 2n) weighted second-derivative trace: n.n : H : grad(strain) at the edges.

        Row order matches gamma0_rows: (component, edge) with edges y = 0, 1.
        The edge normals are (0, -1) and (0, 1); the quantity n.n : mu is even
        in the normal, so both edges use the same (2, 2, c) slice.
        """
        if self.h is None:
            raise InvalidArgumentError("no rank-6 constitutive tensor attached")
        Hm = self.h.matrix()
        idx = {(i, j, kk): (i * 2 + j) * 2 + kk
               for i in range(2) for j in range(2) for kk in range(2)}
        rows = np.zeros((4, 2 * self.n), dtype=complex)
        r = 0
        for c in range(2):
            for y0 in (0.0, 1.0):
                # mu_{11c} at the edge, with 1 the transverse (y) direction
                for nu_idx, terms in _NU_TERMS.items():
                    w = Hm[idx[(1, 1, c)], idx[nu_idx]]
                    if w == 0.0:
                        continue
                    for (cc, p, q, wt) in terms:
                        rows[r, cc * self.n:(cc + 1) * self.n] += \
                            w * wt * (1j * k) ** p * self._trace[y0, q]
                r += 1
        return rows


# ---------------------------------------------------------------------------
# Strip Sobolev norms.

def strip_norm(field: StripField, t: int, relative_to=None):
    """Discrete H^t norm: sum over modes of (1 + k^2)-weighted transverse norms."""
    if t not in (0, 1, 2):
        raise InvalidArgumentError(f"unsupported Sobolev order {t}")
    grid = field.grid
    space = grid.space
    if t > space.conformity:
        raise InvalidArgumentError(
            f"H^{t} norm unavailable on strip family {grid.family}")
    D = [assemble_operator(space, q, q) for q in range(t + 1)]
    total = 0.0
    for k in grid.modes:
        prof = field.mode(k)
        w = [(1.0 + k * k) ** (t - q) for q in range(t + 1)]
        for c in range(2):
            v = prof[c]
            total += sum(w[q] * np.real(np.vdot(v, D[q] @ v)) for q in range(t + 1))
    return float(np.sqrt(2 * np.pi * total))


def strip_error(a: StripField, b: StripField, t: int):
    return strip_norm(a - b, t)
