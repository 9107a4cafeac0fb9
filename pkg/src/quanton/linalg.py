"""Dense complex linear algebra and quantum-state primitives.

Everything here targets small dimensions (a few dozen at most): states are
plain ``complex128`` NumPy arrays wrapped in light containers that enforce
the physical invariants (Hermiticity, unit trace, positivity, normalization).
Joint systems use A-major index ordering throughout: the basis vector
``|j>_A (x) |k>_B`` sits at flat index ``j * d_B + k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NotHermitianError, ValidationError

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIG_FLOOR = -1e-12
NORM_TOL = 1e-10


def _as_complex_matrix(mat) -> np.ndarray:
    m = np.asarray(mat, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValidationError("matrix contains non-finite entries")
    return m


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator."""

    mat: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        m = _as_complex_matrix(self.mat)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dim", m.shape[0])
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise NotHermitianError("density matrix is not Hermitian to 1e-10")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise ValidationError(f"trace is {np.trace(m)}, expected 1")
        w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if w[0] < -HERMITICITY_TOL:
            raise ValidationError(f"smallest eigenvalue {w[0]:.3e} is negative")

    @classmethod
    def _wrap(cls, mat: np.ndarray) -> "DensityMatrix":
        """Skip invariant checks for matrices that are valid by construction."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "mat", mat)
        object.__setattr__(obj, "dim", mat.shape[0])
        return obj

    @classmethod
    def from_pure(cls, psi: "PureState") -> "DensityMatrix":
        v = psi.amps
        return cls._wrap(np.outer(v, v.conj()))

    def diagonal(self) -> np.ndarray:
        """Real diagonal, with round-off negatives in [-1e-12, 0] clipped."""
        return clip_probabilities(self.mat.diagonal().real)

    def eigenvalues(self) -> np.ndarray:
        """Spectrum in descending order, clipped to the probability simplex."""
        w = np.linalg.eigvalsh(0.5 * (self.mat + self.mat.conj().T))
        return clip_probabilities(w[::-1])


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector with a bipartite (d_A, d_B) view.

    Single-system states use ``dim_b = 1``.
    """

    amps: np.ndarray
    dim_a: int
    dim_b: int = 1

    def __post_init__(self):
        v = np.asarray(self.amps, dtype=np.complex128).reshape(-1)
        object.__setattr__(self, "amps", v)
        if self.dim_a < 1 or self.dim_b < 1:
            raise DimensionError("subsystem dimensions must be positive")
        if v.size != self.dim_a * self.dim_b:
            raise DimensionError(
                f"{v.size} amplitudes do not fit dims ({self.dim_a}, {self.dim_b})"
            )
        if not np.isfinite(v).all():
            raise ValidationError("amplitudes contain non-finite entries")
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise ValidationError(f"norm is {np.linalg.norm(v):.12f}, expected 1")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def as_bipartite(self, dim_a: int, dim_b: int) -> "PureState":
        """Reinterpret the amplitude vector with a new subsystem split."""
        return PureState(self.amps, dim_a, dim_b)

    def matrix(self) -> np.ndarray:
        """Amplitudes as a (d_A, d_B) matrix (A-major flattening)."""
        return self.amps.reshape(self.dim_a, self.dim_b)

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Bipartite pure-state normal form: sum_k sqrt(coeffs[k]) |a_k>|b_k>."""

    coeffs: np.ndarray          # descending, sums to 1
    basis_a: np.ndarray         # columns are |a_k>
    basis_b: np.ndarray         # columns are |b_k>

    def reconstruct(self) -> PureState:
        mat = (self.basis_a * np.sqrt(self.coeffs)) @ self.basis_b.conj().T
        amps = mat.reshape(-1)
        amps = amps / np.linalg.norm(amps)
        return PureState(amps, self.basis_a.shape[0], self.basis_b.shape[0])


def clip_probabilities(p: np.ndarray) -> np.ndarray:
    """Zero out round-off negatives in [-1e-12, 0]; reject anything lower."""
    p = np.asarray(p, dtype=np.float64)
    low = p.min(initial=0.0)
    if low < EIG_FLOOR:
        raise ValidationError(f"probability {low:.3e} below clipping floor -1e-12")
    return np.where(p < 0.0, 0.0, p)


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with A-major joint indexing."""
    return np.kron(_as_complex_matrix(a), _as_complex_matrix(b))


def partial_trace(rho: DensityMatrix, dims: tuple[int, int], keep: str = "A") -> DensityMatrix:
    """Trace out one subsystem of a bipartite density matrix.

    ``dims`` is (d_A, d_B) and ``keep`` selects the surviving subsystem.
    """
    d_a, d_b = dims
    if d_a * d_b != rho.dim:
        raise DimensionError(f"dims {dims} do not factor dimension {rho.dim}")
    r = rho.mat.reshape(d_a, d_b, d_a, d_b)
    if keep in ("A", "a"):
        out = np.einsum("ijkj->ik", r)
    elif keep in ("B", "b"):
        out = np.einsum("ijil->jl", r)
    else:
        raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")
    return DensityMatrix._wrap(0.5 * (out + out.conj().T))


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrized as (m + m†)/2 to absorb round-off; deviations
    beyond 1e-8 raise :class:`NotHermitianError`.
    """
    m = _as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected square matrix, got {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > 1e-8:
        raise NotHermitianError("matrix deviates from Hermiticity beyond 1e-8")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def schmidt_decompose(psi: PureState) -> SchmidtDecomposition:
    """Schmidt form of a bipartite pure state via SVD of its amplitude matrix."""
    u, s, vh = np.linalg.svd(psi.matrix(), full_matrices=False)
    coeffs = clip_probabilities(s * s)
    # SVD already sorts singular values descending.
    return SchmidtDecomposition(coeffs=coeffs, basis_a=u, basis_b=vh.conj().T)


def purify(rho: DensityMatrix) -> PureState:
    """Bipartite pure state whose A-reduction is ``rho``.

    The ancilla dimension equals the rank of ``rho`` (eigenvalues below
    1e-12 count as zero).
    """
    w, v = hermitian_eig(rho.mat)
    w = clip_probabilities(w)
    rank = max(1, int(np.count_nonzero(w > 1e-12)))
    w = w[:rank]
    amps = (v[:, :rank] * np.sqrt(w / w.sum())).reshape(-1)
    amps = amps / np.linalg.norm(amps)
    return PureState(amps, rho.dim, rank)


def dephase(rho: DensityMatrix) -> DensityMatrix:
    """Project onto the incoherent (diagonal) states: zero all off-diagonals."""
    return DensityMatrix._wrap(np.diag(rho.mat.diagonal()))
