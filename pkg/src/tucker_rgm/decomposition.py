"""Tucker representation, deterministic truncated SVD, and HOSVD retraction.

Two retraction paths are provided: :func:`hosvd` works on a dense tensor,
while :func:`compact_hosvd` retracts a stacked low-rank form without ever
materializing the dense tensor.  Both produce factors with a fixed column
sign convention so repeated runs are bit-identical.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRank
from .tensor_core import dematricize, matricize, multi_mode_product

EIGEN_GAP_RTOL = 1e-12


@dataclass
class TuckerForm:
    """Core tensor (r x r x r) plus three orthonormal factors (n_i x r)."""

    core: np.ndarray
    factors: tuple
    rank: int

    @property
    def dims(self):
        return tuple(F.shape[0] for F in self.factors)

    def full(self):
        return tucker_to_full(self)


@dataclass
class CompactForm:
    """Stacked Tucker form of width k_i <= 2r used before retraction.

    Holds the pre-retraction iterate without densifying it: factors keep
    orthonormal columns, the core absorbs everything else.
    """

    core: np.ndarray
    factors: tuple

    @property
    def dims(self):
        return tuple(F.shape[0] for F in self.factors)

    def full(self):
        return multi_mode_product(self.core, self.factors)


def _fix_column_signs(U):
    """Flip columns so the largest-magnitude entry of each is positive.

    Ties break to the lowest row index (argmax convention).  Returns the
    applied signs so a paired basis can be flipped consistently.
    """
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, signs


def top_r_left_singular(M, r):
    """Leading r left singular vectors and singular values of M.

    Computed from the symmetric eigendecomposition of the small-side Gram
    matrix ``M @ M.T``; never decomposes the long side.  Returns
    ``(U, sigmas, degenerate_gap)`` where the flag marks a (near-)tie
    between the r-th and (r+1)-th singular values.
    """
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    if r < 1 or r > n:
        raise ValueError(f"rank {r} out of range for a matrix with {n} rows")
    G = M @ M.T
    w, V = np.linalg.eigh(G)
    w = np.maximum(w[::-1], 0.0)
    V = V[:, ::-1]
    sigmas = np.sqrt(w[:r])
    U, _ = _fix_column_signs(np.ascontiguousarray(V[:, :r]))
    if r < n:
        degenerate_gap = w[r - 1] - w[r] <= EIGEN_GAP_RTOL * max(w[0], 1.0)
    else:
        degenerate_gap = False
    return U, sigmas, bool(degenerate_gap)


def hosvd(X, r):
    """Rank-(r, r, r) higher-order SVD of a dense tensor.

    Per-mode truncated SVDs give the factors; the core is the tensor
    contracted by the factor transposes.  Exact-rank input is reproduced
    exactly (up to roundoff).
    """
    if not np.any(X):
        raise DegenerateRank("HOSVD of the zero tensor is undefined")
    factors = []
    for mode in range(3):
        U, _, _ = top_r_left_singular(matricize(X, mode), r)
        factors.append(U)
    core = multi_mode_product(X, [U.T for U in factors])
    return TuckerForm(core=core, factors=tuple(factors), rank=r)


def tucker_to_full(form):
    """Dense tensor represented by a Tucker (or compact) form."""
    return multi_mode_product(form.core, form.factors)


def compact_hosvd(S, r):
    """Rank-(r, r, r) HOSVD of a compact form without densifying it.

    With orthonormal stacked factors Q_i, the Gram matrix of mode-i
    unfolding of the dense expansion equals Q_i G_i Q_i^T where G_i is the
    Gram of the small core unfolding, so the per-mode SVDs reduce to the
    k_i x k_i^2 core unfoldings and a factor rotation: O(n k^2 + k^4) work.
    """
    core = S.core
    if not np.any(core):
        raise DegenerateRank("compact HOSVD of the zero tensor is undefined")
    ks = core.shape
    if any(k < r for k in ks):
        raise ValueError(f"core dims {ks} cannot support rank {r}")
    rotations = []
    new_factors = []
    for mode in range(3):
        Uhat, _, _ = top_r_left_singular(matricize(core, mode), r)
        Xi = S.factors[mode] @ Uhat
        # sign convention is defined on the tall factor columns, same as the
        # dense path; propagate the flip into the rotation
        Xi, signs = _fix_column_signs(Xi)
        rotations.append(Uhat * signs)
        new_factors.append(Xi)
    new_core = multi_mode_product(core, [R.T for R in rotations])
    return TuckerForm(core=new_core, factors=tuple(new_factors), rank=r)


def evaluate_at(form, coords):
    """Values of a Tucker form at an (m, 3) array of 0-based coordinates.

    Contracts factor rows against the core one mode at a time, O(m r^2)
    after an O(m r^2) row gather; never builds the dense tensor.
    """
    coords = np.asarray(coords)
    if coords.size == 0:
        return np.zeros(0, dtype=np.float64)
    r = form.rank
    R0 = form.factors[0][coords[:, 0], :]
    R1 = form.factors[1][coords[:, 1], :]
    R2 = form.factors[2][coords[:, 2], :]
    # K[m, b, c] = sum_a R0[m, a] * core[a, b, c]
    K = R0 @ matricize(form.core, 0)
    K = K.reshape(-1, r, r, order="F")
    return np.einsum("mbc,mb,mc->m", K, R1, R2, optimize=True)


def subspace_distance(U, V):
    """Spectral distance between the column spans of two orthonormal bases."""
    PU = U @ U.T
    PV = V @ V.T
    return float(np.linalg.norm(PU - PV, 2))
