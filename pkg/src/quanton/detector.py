"""Quanton plus path-detector model.

A configuration couples each path ``|j>_A`` to a normalized detector imprint
state ``|d_j>_B``; imprints may overlap. Measurements, in contrast, are
always orthonormal projective bases on the detector space, so the outcome
weights form a genuine probability distribution. Sorting the joint state on
a measurement outcome yields sub-ensembles of the quanton, from which the
entropic which-way knowledge, the averaged coherence, and the entropy gaps
that witness entanglement are computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import ConfigError, DimensionError, ValidationError
from .linalg import DensityMatrix, PureState, partial_trace
from .measures import (
    predictability_vn,
    rel_entropy_coherence,
    shannon_entropy,
    vn_entropy,
)
from .sampling import make_rng
from . import measures

P_DROP = 1e-12          # sub-ensembles at or below this weight are dropped


@dataclass(frozen=True)
class DetectorConfig:
    """Path amplitudes and the detector imprint state for each path.

    ``detector_states[j]`` is the (normalized, not necessarily orthogonal)
    imprint left on the detector when the quanton takes path ``j``; the
    detector space may be larger than the path space but never smaller.
    """

    amplitudes: np.ndarray
    detector_states: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        d = np.asarray(self.detector_states, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "detector_states", d)
        if d.ndim != 2 or d.shape[0] != a.size:
            raise DimensionError(
                f"need one detector state per path: amps {a.size}, states {d.shape}"
            )
        if d.shape[1] < a.size:
            raise DimensionError(
                f"detector dimension {d.shape[1]} smaller than path count {a.size}"
            )
        if abs(np.linalg.norm(a) - 1.0) > 1e-10:
            raise ValidationError("path amplitudes are not normalized")
        norms = np.linalg.norm(d, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValidationError("every detector state must be normalized")

    @property
    def dim_a(self) -> int:
        return self.amplitudes.size

    @property
    def dim_b(self) -> int:
        return self.detector_states.shape[1]


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal projective measurement basis; ``vectors[k]`` is outcome k."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.complex128)
        object.__setattr__(self, "vectors", v)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionError(f"basis must be square, got {v.shape}")
        gram = v.conj() @ v.T
        if np.max(np.abs(gram - np.eye(v.shape[0]))) > 1e-9:
            raise ValidationError("basis vectors are not orthonormal to 1e-9")

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class SubEnsembleSet:
    """Outcome-sorted decomposition (p_k, rho_k) of the quanton state."""

    entries: tuple
    basis: MeasurementBasis

    @property
    def dim_a(self) -> int:
        return self.entries[0][1].dim

    def weights(self) -> np.ndarray:
        return np.array([p for p, _ in self.entries])

    def mixture(self) -> np.ndarray:
        """Weighted recombination sum_k p_k rho_k as a raw matrix."""
        out = np.zeros((self.dim_a, self.dim_a), dtype=np.complex128)
        for p, rho in self.entries:
            out += p * rho.mat
        return out


@dataclass(frozen=True)
class ComplementarityRecord:
    """One row of a detector sweep: all measures for one configuration."""

    P: float
    C_re: float
    D: float
    C_avg: float
    E_diag: float
    E_script: float
    D_max: float
    slack_pc: float = field(default=0.0)
    slack_dc: float = field(default=0.0)


def build_joint_state(config: DetectorConfig) -> PureState:
    """Joint quanton-detector pure state sum_j a_j |j>_A (x) |d_j>_B."""
    mat = config.amplitudes[:, None] * config.detector_states
    amps = mat.reshape(-1)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError(f"joint state norm {norm:.12f} deviates from 1")
    return PureState(amps / norm, config.dim_a, config.dim_b)


def detector_basis(config: DetectorConfig) -> MeasurementBasis:
    """Orthonormal basis aligned with the detector imprints.

    For orthogonal imprints this returns the imprints themselves (completed
    to a full basis when the detector space is larger); for overlapping
    imprints it orthonormalizes them in order.
    """
    q, _ = np.linalg.qr(config.detector_states.T, mode="complete")
    for k in range(config.dim_a):
        ov = np.vdot(q[:, k], config.detector_states[k])
        if abs(ov) > 1e-12:
            q[:, k] *= ov / abs(ov)
    return MeasurementBasis(q.T)


def sort_ensemble(joint: PureState, basis: MeasurementBasis) -> SubEnsembleSet:
    """Sort a joint pure state into quanton sub-ensembles, one per outcome."""
    if basis.dim != joint.dim_b:
        raise DimensionError(
            f"basis dimension {basis.dim} does not match detector dimension {joint.dim_b}"
        )
    branches = joint.matrix() @ basis.vectors.conj().T   # column k: branch k
    probs = np.linalg.norm(branches, axis=0) ** 2
    entries = []
    for k in range(basis.dim):
        if probs[k] <= P_DROP:
            continue
        u = branches[:, k]
        entries.append((float(probs[k]), DensityMatrix._wrap(np.outer(u, u.conj()) / probs[k])))
    sub = SubEnsembleSet(tuple(entries), basis)
    if abs(sum(p for p, _ in entries) - 1.0) > 1e-10:
        raise ValidationError("outcome probabilities do not sum to 1")
    rho_a = partial_trace(joint.density(), (joint.dim_a, joint.dim_b), keep="A")
    if np.max(np.abs(sub.mixture() - rho_a.mat)) > 1e-9:
        raise ValidationError("sub-ensembles do not recombine to the quanton state")
    return sub


def distinguishability_vn(sub: SubEnsembleSet) -> float:
    """Outcome-averaged entropic which-way knowledge, in bits."""
    d_a = sub.dim_a
    s = sum(p * shannon_entropy(rho.diagonal()) for p, rho in sub.entries)
    return float(min(max(np.log2(d_a) - s, 0.0), np.log2(d_a)))


def avg_coherence(sub: SubEnsembleSet) -> float:
    """Outcome-averaged relative entropy of coherence, in bits."""
    return float(sum(p * rel_entropy_coherence(rho) for p, rho in sub.entries))


def e_gap_diag(rho_a: DensityMatrix, sub: SubEnsembleSet) -> float:
    """Population-entropy gap between the unconditioned state and its sorting.

    Zero exactly when sorting cannot sharpen the populations (separable
    joint state); reaches log2(d_A) for a maximally entangled sorting.
    """
    if np.max(np.abs(sub.mixture() - rho_a.mat)) > 1e-9:
        raise ValidationError("sub-ensembles do not recombine to rho_a")
    s = sum(p * shannon_entropy(rho.diagonal()) for p, rho in sub.entries)
    return float(shannon_entropy(rho_a.diagonal()) - s)


def e_gap_full(rho_a: DensityMatrix, sub: SubEnsembleSet) -> float:
    """Full-entropy gap variant of :func:`e_gap_diag`."""
    if np.max(np.abs(sub.mixture() - rho_a.mat)) > 1e-9:
        raise ValidationError("sub-ensembles do not recombine to rho_a")
    s = sum(p * vn_entropy(rho) for p, rho in sub.entries)
    return float(vn_entropy(rho_a) - s)


# Nelder-Mead budget for the basis search: coarse restarts, then one polish.
_NM_COARSE = (100, 1e-9, 1e-6)     # maxfev per parameter, fatol, xatol
_NM_POLISH = (400, 1e-12, 1e-8)


def maximize_distinguishability(
    joint: PureState, restarts: int = 32, seed=0
) -> tuple[float, MeasurementBasis]:
    """Search orthonormal measurement bases for the largest which-way knowledge.

    Bases are parametrized as exp(iH) with a Hermitian generator H of
    ``d_B**2`` real parameters; a simplex search runs from ``restarts``
    random generators and the best point gets a final polish. Returns the
    best value found and its basis (first-found wins ties).
    """
    if restarts < 1:
        raise ConfigError(f"restarts must be >= 1, got {restarts}")
    d_b = joint.dim_b
    psi_mat = np.ascontiguousarray(joint.matrix())
    nparam = d_b * d_b
    rng = make_rng(seed)
    starts = rng.standard_normal((restarts, nparam))
    mf, fa, xa = _NM_COARSE
    vals, thetas = kernels.maximize_dvn(psi_mat, starts, mf * nparam, fa, xa)
    best = int(np.argmax(vals))
    mf, fa, xa = _NM_POLISH
    vals2, thetas2 = kernels.maximize_dvn(
        psi_mat, thetas[best][None, :], mf * nparam, fa, xa
    )
    theta = thetas2[0] if vals2[0] >= vals[best] else thetas[best]
    basis = MeasurementBasis(kernels.basis_from_params(theta, d_b).T)
    value = distinguishability_vn(sort_ensemble(joint, basis))
    return value, basis


def uniform_overlap_config(
    d_a: int, overlap: float, amplitudes=None, d_b: int | None = None
) -> DetectorConfig:
    """Detector family with one real pairwise imprint overlap in [0, 1].

    ``overlap=0`` gives orthogonal imprints, ``overlap=1`` identical ones.
    """
    if not 0.0 <= overlap <= 1.0:
        raise ConfigError(f"overlap must lie in [0, 1], got {overlap}")
    d_b = d_a if d_b is None else d_b
    if d_b < d_a:
        raise DimensionError(f"detector dimension {d_b} smaller than {d_a}")
    if amplitudes is None:
        amplitudes = np.full(d_a, 1.0 / np.sqrt(d_a), dtype=np.complex128)
    a = np.sqrt(1.0 - overlap)
    b = (np.sqrt(1.0 + (d_a - 1) * overlap) - a) / d_a
    gram_root = a * np.eye(d_a) + b * np.ones((d_a, d_a))
    det = np.zeros((d_a, d_b), dtype=np.complex128)
    det[:, :d_a] = gram_root          # row j: the j-th imprint state
    return DetectorConfig(amplitudes, det)


def complementarity_record(
    config: DetectorConfig, restarts: int = 32, seed=0
) -> ComplementarityRecord:
    """Evaluate every measure of the record on one configuration.

    The basis-dependent quantities use the detector-aligned basis; the
    maximization uses its own random restarts.
    """
    joint = build_joint_state(config)
    rho_a = partial_trace(joint.density(), (config.dim_a, config.dim_b), keep="A")
    sub = sort_ensemble(joint, detector_basis(config))
    log_d = float(np.log2(config.dim_a))
    p = predictability_vn(rho_a)
    c_re = rel_entropy_coherence(rho_a)
    d_vn = distinguishability_vn(sub)
    c_avg = avg_coherence(sub)
    d_max, _ = maximize_distinguishability(joint, restarts=restarts, seed=seed)
    return ComplementarityRecord(
        P=p,
        C_re=c_re,
        D=d_vn,
        C_avg=c_avg,
        E_diag=e_gap_diag(rho_a, sub),
        E_script=measures.e_script_q(config),
        D_max=d_max,
        slack_pc=log_d - (p + c_re),
        slack_dc=log_d - (d_vn + c_avg),
    )
