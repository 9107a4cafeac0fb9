"""Scalar complementarity measures on single-system states.

All entropic quantities use log base 2 and are reported in bits, with the
convention 0*log2(0) = 0. Probabilities below 1e-15 are treated as exact
zeros inside entropy sums.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError
from .linalg import DensityMatrix, PureState, clip_probabilities, dephase

PROB_ZERO = 1e-15


def shannon_entropy(p) -> float:
    """-sum p log2 p over a probability vector, in bits."""
    p = clip_probabilities(p)
    p = p[p > PROB_ZERO]
    if p.size == 0:
        return 0.0
    return float(-(p * np.log2(p)).sum())


def binary_entropy(x: float) -> float:
    if x <= PROB_ZERO or x >= 1.0 - PROB_ZERO:
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def vn_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits; 0 for pure states, log2(d) for I/d."""
    s = shannon_entropy(rho.eigenvalues())
    return float(min(max(s, 0.0), np.log2(rho.dim))) if rho.dim > 1 else 0.0


def rel_entropy_coherence(rho: DensityMatrix) -> float:
    """Relative entropy of coherence: entropy gained by full dephasing.

    The dephased state is diagonal, so its entropy is the Shannon entropy of
    the populations.
    """
    c = shannon_entropy(rho.diagonal()) - vn_entropy(rho)
    return max(c, 0.0)


def predictability_vn(rho: DensityMatrix) -> float:
    """Entropic which-path predictability of the populations.

    Maximum log2(d) when one population is 1; zero on a uniform diagonal.
    """
    p = np.log2(rho.dim) - shannon_entropy(rho.diagonal())
    return float(min(max(p, 0.0), np.log2(rho.dim)))


def concurrence_pure_2q(psi: PureState) -> float:
    """Two-qubit pure-state concurrence 2|a0*a3 - a1*a2|."""
    if (psi.dim_a, psi.dim_b) != (2, 2):
        raise DimensionError(f"need a 2x2 bipartite state, got ({psi.dim_a}, {psi.dim_b})")
    a = psi.amps
    return float(min(2.0 * abs(a[0] * a[3] - a[1] * a[2]), 1.0))


# sigma_y (x) sigma_y in the A-major product basis
_SY_SY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=np.complex128
)


def concurrence_mixed_2q(rho: DensityMatrix) -> float:
    """Closed-form two-qubit mixed-state concurrence (spin-flip spectrum).

    The spin-flip singular values are taken from the factored form
    L^T (sigma_y x sigma_y) L with rho = L L†, which keeps near-zero
    values at full absolute accuracy.
    """
    if rho.dim != 4:
        raise DimensionError(f"need a 4x4 two-qubit state, got dim {rho.dim}")
    w, v = np.linalg.eigh(0.5 * (rho.mat + rho.mat.conj().T))
    ell = v * np.sqrt(np.clip(w, 0.0, None))
    mu = np.linalg.svd(ell.T @ _SY_SY @ ell, compute_uv=False)
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


def eof_2q(rho: DensityMatrix) -> float:
    """Two-qubit entanglement of formation in bits, from the concurrence."""
    c = concurrence_mixed_2q(rho)
    return binary_entropy(0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c))))


def e_script_q(config) -> float:
    """Overlap-weighted geometric-mean entanglement indicator of a detector
    configuration, normalized by 1/(d_A - 1).

    The sum runs over ordered pairs j != k, so each unordered pair counts
    twice; halving the convention would halve every value.
    """
    amps = np.asarray(config.amplitudes, dtype=np.complex128)
    det = np.asarray(config.detector_states, dtype=np.complex128)
    d_a = amps.size
    if d_a < 2:
        raise DimensionError(f"need at least two paths, got d_A={d_a}")
    pops = np.abs(amps) ** 2
    overlaps = np.abs(det.conj() @ det.T)
    root = np.sqrt(np.outer(pops, pops))
    terms = root * (1.0 - overlaps)
    np.fill_diagonal(terms, 0.0)
    return float(max(terms.sum() / (d_a - 1), 0.0))
