"""State containers and linear-algebra primitives."""

import numpy as np
import pytest

from quanton import (
    DensityMatrix,
    DimensionError,
    NotHermitianError,
    PureState,
    ValidationError,
    dephase,
    hermitian_eig,
    partial_trace,
    purify,
    schmidt_decompose,
    tensor_product,
)
from quanton.sampling import (
    haar_random_pure,
    make_rng,
    random_density_matrix,
    random_unitary,
)

BELL = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), 2, 2)


class TestContainers:
    def test_density_matrix_accepts_valid(self):
        rho = DensityMatrix(np.eye(3) / 3)
        assert rho.dim == 3

    def test_density_matrix_rejects_bad_trace(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.eye(2))

    def test_density_matrix_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            DensityMatrix(np.array([[0.5, 0.3], [0.0, 0.5]]))

    def test_density_matrix_rejects_negative(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.diag([1.5, -0.5]))

    def test_pure_state_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            PureState(np.array([1.0, 1.0]), 2)

    def test_pure_state_dim_mismatch(self):
        with pytest.raises(DimensionError):
            PureState(np.array([1.0, 0.0]), 3)

    def test_bipartite_view(self):
        psi = haar_random_pure(6, 5)
        v = psi.as_bipartite(2, 3)
        assert v.matrix().shape == (2, 3)
        assert np.allclose(v.amps, psi.amps)


class TestTensorProduct:
    def test_identity(self):
        assert np.allclose(tensor_product(np.eye(2), np.eye(2)), np.eye(4))

    def test_basis_projectors(self):
        p0 = np.diag([1.0, 0.0])
        p1 = np.diag([0.0, 1.0])
        out = tensor_product(p0, p1)
        expected = np.zeros((4, 4))
        expected[1, 1] = 1.0          # A-major joint index 0*2 + 1
        assert np.allclose(out, expected)

    def test_trace_multiplicativity(self):
        rng = make_rng(11)
        for _ in range(20):
            a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            assert abs(np.trace(tensor_product(a, b)) - np.trace(a) * np.trace(b)) < 1e-12


class TestPartialTrace:
    def test_product_state_factorizes(self):
        rho_a = random_density_matrix(2, 2, 1)
        rho_b = random_density_matrix(3, 3, 2)
        joint = DensityMatrix(tensor_product(rho_a.mat, rho_b.mat))
        assert np.allclose(partial_trace(joint, (2, 3), "A").mat, rho_a.mat, atol=1e-12)
        assert np.allclose(partial_trace(joint, (2, 3), "B").mat, rho_b.mat, atol=1e-12)

    def test_bell_state_reduces_to_maximally_mixed(self):
        red = partial_trace(BELL.density(), (2, 2), "A")
        assert np.allclose(red.mat, np.eye(2) / 2, atol=1e-12)

    def test_reduced_spectra_agree_for_pure_states(self):
        # Independent oracle: full eigensolves of both reductions.
        for seed in range(30):
            psi = haar_random_pure(12, seed).as_bipartite(3, 4)
            wa = np.linalg.eigvalsh(partial_trace(psi.density(), (3, 4), "A").mat)
            wb = np.linalg.eigvalsh(partial_trace(psi.density(), (3, 4), "B").mat)
            assert np.allclose(wa[::-1][:3], wb[::-1][:3], atol=1e-9)

    def test_trace_preserved(self):
        for seed in range(10):
            rho = random_density_matrix(6, 4, seed)
            red = partial_trace(rho, (2, 3), "B")
            assert abs(np.trace(red.mat) - 1.0) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            partial_trace(random_density_matrix(6, 2, 0), (4, 2), "A")


class TestHermitianEig:
    def test_diagonal(self):
        w, _ = hermitian_eig(np.diag([1.0, 3.0, 2.0]))
        assert np.allclose(w, [3.0, 2.0, 1.0])

    def test_known_two_level_spectrum(self):
        w, _ = hermitian_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(w, [1.0, -1.0])

    def test_reconstruction_residual(self):
        rng = make_rng(3)
        m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        m = 0.5 * (m + m.conj().T)
        w, v = hermitian_eig(m)
        assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - m)) < 1e-9 * np.linalg.norm(m)
        assert np.max(np.abs(v.conj().T @ v - np.eye(6))) < 1e-9

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSchmidt:
    def test_product_state(self):
        psi = PureState(np.kron([1, 0], [0, 1]).astype(complex), 2, 2)
        dec = schmidt_decompose(psi)
        assert abs(dec.coeffs[0] - 1.0) < 1e-12
        assert np.all(dec.coeffs[1:] < 1e-12)

    def test_bell_state(self):
        dec = schmidt_decompose(BELL)
        assert np.allclose(dec.coeffs, [0.5, 0.5], atol=1e-12)

    def test_detector_joint_state_spectrum(self):
        # Orthogonal imprints make the reduction diagonal, so the sorted
        # populations are the Schmidt coefficients (eigensolve oracle).
        a = np.sqrt(np.array([0.5, 0.3, 0.2]))
        amps = np.zeros(9, dtype=complex)
        for j in range(3):
            amps[j * 3 + j] = a[j]
        psi = PureState(amps, 3, 3)
        dec = schmidt_decompose(psi)
        oracle = np.linalg.eigvalsh(partial_trace(psi.density(), (3, 3), "A").mat)[::-1]
        assert np.allclose(dec.coeffs, oracle, atol=1e-9)
        assert np.allclose(dec.coeffs, [0.5, 0.3, 0.2], atol=1e-12)

    def test_coefficients_sum_to_one_and_reconstruct(self):
        for seed in range(20):
            psi = haar_random_pure(8, seed).as_bipartite(2, 4)
            dec = schmidt_decompose(psi)
            assert abs(dec.coeffs.sum() - 1.0) < 1e-10
            rebuilt = dec.reconstruct()
            fid = abs(np.vdot(rebuilt.amps, psi.amps)) ** 2
            assert fid > 1.0 - 1e-8


class TestPurify:
    def test_pure_state_gets_trivial_ancilla(self):
        psi = haar_random_pure(3, 9)
        out = purify(psi.density())
        assert out.dim_b == 1
        assert abs(abs(np.vdot(out.amps, psi.amps)) - 1.0) < 1e-9

    def test_maximally_mixed_qubit(self):
        out = purify(DensityMatrix(np.eye(2) / 2))
        dec = schmidt_decompose(out)
        assert np.allclose(dec.coeffs, [0.5, 0.5], atol=1e-10)

    def test_round_trip(self):
        rho = random_density_matrix(4, 3, 17)
        out = purify(rho)
        assert out.dim_b == 3
        back = partial_trace(out.density(), (4, out.dim_b), "A")
        assert np.max(np.abs(back.mat - rho.mat)) < 1e-9


class TestDephase:
    def test_diagonal_fixed_point(self):
        rho = DensityMatrix(np.diag([0.7, 0.3]))
        assert np.allclose(dephase(rho).mat, rho.mat)

    def test_plus_state(self):
        plus = PureState(np.array([1, 1]) / np.sqrt(2), 2)
        assert np.allclose(dephase(plus.density()).mat, np.eye(2) / 2)

    def test_idempotent_and_trace_preserving(self):
        for seed in range(10):
            rho = random_density_matrix(4, 4, seed)
            once = dephase(rho)
            twice = dephase(once)
            assert np.allclose(once.mat, twice.mat, atol=1e-14)
            assert abs(np.trace(once.mat) - 1.0) < 1e-10


class TestSpectrumInvariance:
    def test_unitary_conjugation_preserves_spectrum(self):
        for seed in range(15):
            rho = random_density_matrix(5, 3, seed)
            u = random_unitary(5, seed + 100)
            w1 = np.linalg.eigvalsh(rho.mat)
            w2 = np.linalg.eigvalsh(u @ rho.mat @ u.conj().T)
            assert np.allclose(w1, w2, atol=1e-9)
