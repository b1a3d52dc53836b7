"""Dense 3-way tensor algebra: unfoldings, mode products, norms, extreme
singular values.

Tensors are plain ``numpy`` arrays of shape ``(n1, n2, n3)``.  The canonical
linear order of entries is Fortran order (first index fastest), which makes
the mode-0 unfolding a zero-copy reshape for Fortran-contiguous arrays.
Modes are 0-based throughout.
"""

import numpy as np

from .errors import DegenerateRank

RANK_DEFICIENCY_RTOL = 1e-12


def as_tensor3(values, dims=None):
    """Validate and return a float64 3-way tensor in Fortran order.

    Raises ValueError on wrong dimensionality, non-finite entries, or a
    shape mismatch with ``dims``.
    """
    X = np.asfortranarray(values, dtype=np.float64)
    if X.ndim != 3:
        raise ValueError(f"expected a 3-way tensor, got ndim={X.ndim}")
    if dims is not None and X.shape != tuple(dims):
        raise ValueError(f"shape {X.shape} does not match dims {tuple(dims)}")
    if min(X.shape) < 1:
        raise ValueError("all dimensions must be positive")
    if not np.isfinite(X).all():
        raise ValueError("tensor contains NaN or Inf")
    return X


def all_ones(dims):
    """All-one tensor of the given dims (test helper)."""
    return np.ones(dims, dtype=np.float64, order="F")


def matricize(X, mode):
    """Unfold a 3-way tensor along ``mode`` (0, 1 or 2).

    Row index is the mode index; the column index runs over the remaining
    indices with the lower mode varying fastest.  Mode 0 is a view for
    Fortran-contiguous input.
    """
    if mode not in (0, 1, 2):
        raise ValueError(f"mode must be 0, 1 or 2, got {mode}")
    return np.reshape(np.moveaxis(X, mode, 0), (X.shape[mode], -1), order="F")


def dematricize(M, mode, dims):
    """Inverse of :func:`matricize`: fold an unfolding back into a tensor."""
    if mode not in (0, 1, 2):
        raise ValueError(f"mode must be 0, 1 or 2, got {mode}")
    n1, n2, n3 = dims
    M = np.asarray(M, dtype=np.float64)
    rest = [d for m, d in enumerate(dims) if m != mode]
    if M.shape != (dims[mode], rest[0] * rest[1]):
        raise ValueError(
            f"matrix shape {M.shape} inconsistent with dims {tuple(dims)} "
            f"and mode {mode}"
        )
    X = np.reshape(M, (dims[mode], rest[0], rest[1]), order="F")
    return np.asfortranarray(np.moveaxis(X, 0, mode))


def mode_product(X, A, mode):
    """Contract ``mode`` of X with the columns of matrix A.

    The result has the mode dimension replaced by ``A.shape[0]``:
    entry (.., j, ..) = sum_i X[.., i, ..] * A[j, i].
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[1] != X.shape[mode]:
        raise ValueError(
            f"matrix of shape {A.shape} cannot contract mode {mode} "
            f"of tensor with shape {X.shape}"
        )
    Y = np.tensordot(A, X, axes=(1, mode))
    return np.asfortranarray(np.moveaxis(Y, 0, mode))


def multi_mode_product(X, matrices, modes=None):
    """Apply mode products for several (matrix, mode) pairs in sequence."""
    if modes is None:
        modes = range(len(matrices))
    Y = X
    for A, m in zip(matrices, modes):
        if A is not None:
            Y = mode_product(Y, A, m)
    return Y


def outer3(a, b, c):
    """Rank-one tensor with entries a[i] * b[j] * c[k]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    return np.asfortranarray(np.einsum("i,j,k->ijk", a, b, c))


def inner(X, Z):
    """Entrywise inner product of two same-shape tensors."""
    if X.shape != Z.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {Z.shape}")
    return float(np.einsum("ijk,ijk->", X, Z))


def fro_norm(X):
    return float(np.sqrt(np.einsum("ijk,ijk->", X, X))) if X.ndim == 3 \
        else float(np.linalg.norm(X))


def inf_norm(X):
    return float(np.max(np.abs(X))) if X.size else 0.0


def norms(X):
    """(Frobenius norm, infinity norm) of a tensor."""
    return fro_norm(X), inf_norm(X)


def kron(A, B):
    """Kronecker product (standard block layout)."""
    return np.kron(np.asarray(A, dtype=np.float64), np.asarray(B, dtype=np.float64))


def gram_singular_values(M):
    """All singular values of M, descending, via the eigendecomposition of
    the small-side Gram matrix M @ M.T.

    Avoids forming an SVD of the long side: for an n x n^2 unfolding only
    the n x n Gram is decomposed.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.shape[0] > M.shape[1]:
        M = M.T
    G = M @ M.T
    w = np.linalg.eigvalsh(G)
    return np.sqrt(np.maximum(w[::-1], 0.0))


def sigma_extremes(X, r):
    """Largest singular value over all unfoldings and the smallest r-th one.

    ``sigma_min`` is the r-th singular value minimized over the three
    unfoldings; inputs whose r-th singular value falls below
    ``RANK_DEFICIENCY_RTOL`` times the largest raise :class:`DegenerateRank`.
    """
    if not np.any(X):
        raise ValueError("sigma_extremes is undefined for the zero tensor")
    if r < 1:
        raise ValueError("rank bound must be >= 1")
    sig_max = 0.0
    sig_min = np.inf
    for mode in range(3):
        s = gram_singular_values(matricize(X, mode))
        if r > s.size:
            raise ValueError(f"rank {r} exceeds mode-{mode} dimension {s.size}")
        sig_max = max(sig_max, s[0])
        sig_min = min(sig_min, s[r - 1])
    if sig_min < RANK_DEFICIENCY_RTOL * sig_max:
        raise DegenerateRank(
            f"singular value {sig_min:.3e} at rank {r} is below "
            f"{RANK_DEFICIENCY_RTOL:g} * sigma_max ({sig_max:.3e})"
        )
    return sig_max, sig_min


def condition_number(X, r):
    """sigma_max / sigma_min at multilinear rank r."""
    smax, smin = sigma_extremes(X, r)
    return smax / smin
