"""Bernoulli observation model and coordinate-list sampling operators.

Masks are generated by a counter-based RNG (Philox) keyed by the seed, so
the inclusion decision for the triple with lexicographic position k is a
pure function of (seed, k): regeneration is bit-identical across processes
and platforms, independent of chunking strategy.
"""

from dataclasses import dataclass

import numpy as np

from .decomposition import evaluate_at

_CHUNK = 1 << 20


@dataclass
class Mask:
    """Sorted, deduplicated observation coordinates (0-based uint32 triples).

    ``p_nominal``/``seed`` are None for derived masks (slices, unions) that
    cannot be regenerated from a seed.
    """

    n: int
    coords: np.ndarray
    p_nominal: float | None = None
    seed: int | None = None

    @property
    def count(self):
        return self.coords.shape[0]


@dataclass
class SampleSet:
    """Observed values aligned with ``mask.coords``."""

    mask: Mask
    values: np.ndarray

    @property
    def count(self):
        return self.values.shape[0]


def _coords_from_flat(flat, n):
    i, rem = np.divmod(flat, n * n)
    j, k = np.divmod(rem, n)
    return np.column_stack([i, j, k]).astype(np.uint32)


def bernoulli_mask(n, p, seed):
    """Include each of the n^3 triples independently with probability p.

    Triples are iterated in lexicographic order; the decision for position k
    consumes exactly the k-th 64-bit word of the Philox stream keyed by
    ``seed``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    total = n**3
    if p == 0.0:
        coords = np.zeros((0, 3), dtype=np.uint32)
    elif p == 1.0:
        coords = _coords_from_flat(np.arange(total, dtype=np.int64), n)
    else:
        gen = np.random.Generator(np.random.Philox(key=int(seed)))
        hits = []
        for start in range(0, total, _CHUNK):
            u = gen.random(min(_CHUNK, total - start))
            hits.append(np.flatnonzero(u < p).astype(np.int64) + start)
        coords = _coords_from_flat(np.concatenate(hits), n)
    return Mask(n=n, coords=coords, p_nominal=float(p), seed=int(seed))


def observe(T, mask):
    """Restrict a dense tensor to the mask coordinates."""
    if T.shape != (mask.n, mask.n, mask.n):
        raise ValueError(f"tensor shape {T.shape} does not match mask n={mask.n}")
    c = mask.coords
    values = np.ascontiguousarray(T[c[:, 0], c[:, 1], c[:, 2]], dtype=np.float64)
    if not np.isfinite(values).all():
        raise ValueError("observed values contain NaN or Inf")
    return SampleSet(mask=mask, values=values)


def densify(obs, fill=0.0):
    """Dense tensor holding the sample values, zero elsewhere."""
    n = obs.mask.n
    T = np.full((n, n, n), fill, dtype=np.float64, order="F")
    c = obs.mask.coords
    T[c[:, 0], c[:, 1], c[:, 2]] = obs.values
    return T


def sparse_residual(X, obs):
    """Samples of ``expand(X) - T`` on the observed coordinates.

    Evaluates the Tucker form coordinate-wise (never densified); safe to
    parallelize over coordinate chunks since entries are independent.
    """
    if X.dims != (obs.mask.n,) * 3:
        raise ValueError(f"form dims {X.dims} do not match mask n={obs.mask.n}")
    values = evaluate_at(X, obs.mask.coords) - obs.values
    return SampleSet(mask=obs.mask, values=values)


def slice_triples(n, ell):
    """All triples with at least one index equal to ell (3n^2 - 3n + 1 of
    them), lexicographically sorted, independent of any mask."""
    if not 0 <= ell < n:
        raise ValueError(f"slice index {ell} out of range for n={n}")
    idx = np.arange(n, dtype=np.uint32)
    jj, kk = np.meshgrid(idx, idx, indexing="ij")
    full = np.column_stack(
        [np.full(n * n, ell, dtype=np.uint32), jj.ravel(), kk.ravel()]
    )
    parts = [full]
    for mode in (1, 2):
        block = np.column_stack([jj.ravel(), kk.ravel()])
        tri = np.empty((n * n, 3), dtype=np.uint32)
        rest = [m for m in range(3) if m != mode]
        tri[:, mode] = ell
        tri[:, rest[0]] = block[:, 0]
        tri[:, rest[1]] = block[:, 1]
        parts.append(tri)
    allt = np.unique(np.concatenate(parts, axis=0), axis=0)
    return allt


def split_mask_slice(mask, ell):
    """Partition the mask against the slice through index ``ell``.

    Returns (off_slice, slice_all): the observed triples with no index equal
    to ell, and the full deterministic slice set (every triple touching ell,
    observed or not).
    """
    if not 0 <= ell < mask.n:
        raise ValueError(f"slice index {ell} out of range for n={mask.n}")
    c = mask.coords
    keep = ~np.any(c == ell, axis=1)
    off = Mask(n=mask.n, coords=np.ascontiguousarray(c[keep]))
    return off, slice_triples(mask.n, ell)


def restrict(obs, keep_mask_coords):
    """SampleSet restricted to a sub-mask (coords must be a subset)."""
    c = obs.mask.coords
    keep = ~np.any(c == -1, axis=1)  # placeholder; callers use boolean masks
    raise NotImplementedError


def incoherence(factors, atol=1e-8):
    """(n/r) times the largest squared row norm over the factor matrices.

    Lies in [1, n/r] for orthonormal inputs; raises for non-orthonormal
    factors.
    """
    mu = 0.0
    for U in factors:
        n, r = U.shape
        if np.linalg.norm(U.T @ U - np.eye(r)) > atol:
            raise ValueError("factor matrix does not have orthonormal columns")
        mu = max(mu, (n / r) * float(np.max(np.sum(U * U, axis=1))))
    return mu


@dataclass
class IncoherenceReport:
    """Measured row/column/entry maxima of the unfoldings against the
    bounds implied by the incoherence parameter."""

    mu: float
    sigma_max: float
    row_2inf: tuple        # max row norm of each unfolding
    col_2inf: tuple        # max column norm of each unfolding
    entry_inf: float
    row_bound: float
    col_bound: float
    entry_bound: float

    @property
    def ok(self):
        return (
            all(v <= self.row_bound * (1 + 1e-12) for v in self.row_2inf)
            and all(v <= self.col_bound * (1 + 1e-12) for v in self.col_2inf)
            and self.entry_inf <= self.entry_bound * (1 + 1e-12)
        )


def incoherence_report(T_full, truth):
    """Check the unfolding norm bounds that incoherence implies.

    ``truth`` must be an exact Tucker decomposition of ``T_full``; the three
    measured quantities are the max row norm and max column norm of each
    unfolding and the entrywise max of the tensor.
    """
    from .tensor_core import inf_norm, matricize, sigma_extremes

    mu = incoherence(truth.factors)
    r = truth.rank
    n = truth.dims[0]
    sig_max, _ = sigma_extremes(T_full, r)
    rho = mu * r / n
    row_2inf = []
    col_2inf = []
    for mode in range(3):
        M = matricize(T_full, mode)
        row_2inf.append(float(np.max(np.linalg.norm(M, axis=1))))
        col_2inf.append(float(np.max(np.linalg.norm(M, axis=0))))
    return IncoherenceReport(
        mu=mu,
        sigma_max=sig_max,
        row_2inf=tuple(row_2inf),
        col_2inf=tuple(col_2inf),
        entry_inf=inf_norm(T_full),
        row_bound=np.sqrt(rho) * sig_max,
        col_bound=rho * sig_max,
        entry_bound=rho**1.5 * sig_max,
    )
