"""Seeded random sampling of states and unitaries.

One generator family (PCG64) backs the whole package; a fixed seed pins the
full sample sequence. Parallel sweeps derive worker seeds with
:func:`split_seed` so the split is deterministic too.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError
from .linalg import DensityMatrix, PureState


def make_rng(seed) -> np.random.Generator:
    """Generator from a 64-bit seed; passes an existing Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed)))


def split_seed(seed: int, worker: int) -> int:
    """Deterministic per-worker seed: worker ``i`` gets ``seed XOR i``."""
    return int(seed) ^ int(worker)


def haar_random_pure(dim: int, seed) -> PureState:
    """Haar-distributed pure state of the given dimension."""
    if dim < 1:
        raise DimensionError(f"dim must be >= 1, got {dim}")
    rng = make_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v), dim)


def haar_random_pure_batch(n: int, dim: int, seed) -> np.ndarray:
    """(n, dim) array of Haar-random unit vectors, one per row."""
    rng = make_rng(seed)
    v = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_density_matrix(dim: int, rank: int, seed) -> DensityMatrix:
    """Random mixed state of the requested rank (normalized Wishart)."""
    if dim < 1:
        raise DimensionError(f"dim must be >= 1, got {dim}")
    if rank < 1 or rank > dim:
        raise DimensionError(f"rank must lie in [1, {dim}], got {rank}")
    rng = make_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix._wrap(m / np.trace(m).real)


def random_density_matrix_batch(n: int, dim: int, rank: int, seed) -> np.ndarray:
    """(n, dim, dim) stack of random rank-``rank`` density matrices."""
    if rank < 1 or rank > dim:
        raise DimensionError(f"rank must lie in [1, {dim}], got {rank}")
    rng = make_rng(seed)
    g = rng.standard_normal((n, dim, rank)) + 1j * rng.standard_normal((n, dim, rank))
    m = g @ np.conj(np.swapaxes(g, 1, 2))
    m = 0.5 * (m + np.conj(np.swapaxes(m, 1, 2)))
    tr = np.trace(m, axis1=1, axis2=2).real
    return m / tr[:, None, None]


def random_unitary(dim: int, seed) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    if dim < 1:
        raise DimensionError(f"dim must be >= 1, got {dim}")
    rng = make_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = r.diagonal()
    return q * (d / np.abs(d))
