"""Dense Cartesian tensor algebra for ranks 1..6 in dimension d in {1, 2, 3}.

Tensors are plain ``numpy.ndarray`` objects with ``r`` axes of equal length
``d``.  Two conventions are fixed here and used everywhere else:

* ``permute(T, sigma)`` returns the tensor whose component at ``(i_1..i_r)``
  is the component of ``T`` at ``(i_sigma(1)..i_sigma(r))``, so that
  ``permute(A, (2, 1))[i, j] == A[j, i]``.

* ``multidot(A, B, m)`` contracts with nearest-index (Gibbs) pairing: the
  last index of ``A`` against the first index of ``B``, the second-to-last
  against the second, and so on.  For rank-3 tensors this makes
  ``multidot(permute(a, (3, 2, 1)), b, 3)`` the plain componentwise sum
  ``sum_ijk a_ijk b_ijk``.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError

MAX_RANK = 6


def _as_tensor(t):
    t = np.asarray(t, dtype=float)
    if t.ndim < 1 or t.ndim > MAX_RANK:
        raise InvalidArgumentError(f"rank {t.ndim} outside supported range 1..{MAX_RANK}")
    d = t.shape[0]
    if d not in (1, 2, 3) or any(s != d for s in t.shape):
        raise InvalidArgumentError(f"tensor axes must all have length d in {{1,2,3}}, got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise InvalidArgumentError("tensor contains NaN/Inf components")
    return t


def check_perm(sigma, rank):
    sigma = tuple(int(s) for s in sigma)
    if len(sigma) != rank or sorted(sigma) != list(range(1, rank + 1)):
        raise InvalidArgumentError(f"{sigma} is not a permutation of 1..{rank}")
    return sigma


def perm_inverse(sigma):
    inv = [0] * len(sigma)
    for k, s in enumerate(sigma):
        inv[s - 1] = k + 1
    return tuple(inv)


def permute(t, sigma):
    """Index permutation in superscript convention: out[(i_k)] = t[(i_sigma(k))]."""
    t = _as_tensor(t)
    sigma = check_perm(sigma, t.ndim)
    # numpy's transpose axes are the inverse permutation of the superscript
    axes = [s - 1 for s in perm_inverse(sigma)]
    return np.transpose(t, axes)


def multidot(a, b, m):
    """Contract the last ``m`` indices of ``a`` with the first ``m`` of ``b``, nearest pairs first."""
    a = _as_tensor(a)
    b = _as_tensor(b)
    if a.shape[0] != b.shape[0]:
        raise InvalidArgumentError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    m = int(m)
    if m < 0 or m > min(a.ndim, b.ndim):
        raise InvalidArgumentError(f"contraction multiplicity {m} exceeds min rank")
    if m == 0:
        return np.multiply.outer(a, b)
    axes_a = list(range(a.ndim - 1, a.ndim - 1 - m, -1))
    axes_b = list(range(m))
    out = np.tensordot(a, b, axes=(axes_a, axes_b))
    if out.ndim == 0:
        return float(out)
    return out


def sym_last_two(t):
    """Project a rank-3 tensor onto symmetry in its last two indices."""
    t = _as_tensor(t)
    if t.ndim != 3:
        raise InvalidArgumentError(f"expected rank 3, got rank {t.ndim}")
    return 0.5 * (t + np.swapaxes(t, 1, 2))


def frobenius(t):
    t = _as_tensor(t)
    return float(np.sqrt(np.sum(t * t)))


# ---------------------------------------------------------------------------
# Reduced representation of triadics symmetric in the last two indices.

def sym_index_pairs(d):
    """Ordered (j, k) pairs with j <= k indexing the symmetric slots."""
    return [(j, k) for j in range(d) for k in range(j, d)]


def sym_triadic_dim(d):
    return d * d * (d + 1) // 2


def sym_component_index(d):
    """List of (i, j, k) full-index triples, one per reduced component."""
    return [(i, j, k) for i in range(d) for (j, k) in sym_index_pairs(d)]


def sym_expansion_matrix(d):
    """(d^3, n_s) matrix E with vec(full) = E @ reduced (plain component values)."""
    n_s = sym_triadic_dim(d)
    E = np.zeros((d ** 3, n_s))
    for col, (i, j, k) in enumerate(sym_component_index(d)):
        E[(i * d + j) * d + k, col] = 1.0
        E[(i * d + k) * d + j, col] = 1.0
    return E


def sym_orthonormal_basis(d):
    """(d^3, n_s) matrix whose columns are Frobenius-orthonormal symmetric triadics."""
    E = sym_expansion_matrix(d)
    # columns for j == k carry a single entry set twice above; fix and normalize
    B = np.zeros_like(E)
    for col in range(E.shape[1]):
        v = np.where(E[:, col] > 0, 1.0, 0.0)
        B[:, col] = v / np.linalg.norm(v)
    return B


class SymTriadic:
    """Rank-3 tensor with enforced symmetry in the last two indices, stored reduced."""

    def __init__(self, d, reduced):
        reduced = np.asarray(reduced, dtype=float)
        if reduced.shape != (sym_triadic_dim(d),):
            raise InvalidArgumentError(
                f"reduced storage must have {sym_triadic_dim(d)} entries for d={d}")
        if not np.all(np.isfinite(reduced)):
            raise InvalidArgumentError("non-finite components")
        self.d = d
        self.reduced = reduced

    @classmethod
    def from_full(cls, t):
        t = sym_last_two(t)
        d = t.shape[0]
        vals = [t[i, j, k] for (i, j, k) in sym_component_index(d)]
        return cls(d, np.array(vals))

    def expand(self):
        d = self.d
        return (sym_expansion_matrix(d) @ self.reduced).reshape(d, d, d)

    def __eq__(self, other):
        return isinstance(other, SymTriadic) and self.d == other.d and \
            np.array_equal(self.reduced, other.reduced)
