"""Detector model: joint states, sorting, which-way knowledge, entropy gaps."""

import numpy as np
import pytest

from quanton import (
    ConfigError,
    DetectorConfig,
    DimensionError,
    MeasurementBasis,
    ValidationError,
    avg_coherence,
    build_joint_state,
    complementarity_record,
    detector_basis,
    distinguishability_vn,
    e_gap_diag,
    e_gap_full,
    maximize_distinguishability,
    partial_trace,
    predictability_vn,
    rel_entropy_coherence,
    schmidt_decompose,
    sort_ensemble,
    uniform_overlap_config,
    vn_entropy,
)
from quanton.sampling import make_rng, random_unitary


def random_config(d_a, d_b, rng):
    a = rng.standard_normal(d_a) + 1j * rng.standard_normal(d_a)
    a /= np.linalg.norm(a)
    det = rng.standard_normal((d_a, d_b)) + 1j * rng.standard_normal((d_a, d_b))
    det /= np.linalg.norm(det, axis=1, keepdims=True)
    return DetectorConfig(a, det)


def random_basis(d_b, rng):
    return MeasurementBasis(random_unitary(d_b, rng).T)


def reduced_a(joint):
    return partial_trace(joint.density(), (joint.dim_a, joint.dim_b), "A")


def brute_force_dvn(joint, basis):
    """Independent oracle straight from the definitions: project the full
    joint density matrix on each outcome and trace out the detector."""
    rho_ab = np.outer(joint.amps, joint.amps.conj())
    d_a, d_b = joint.dim_a, joint.dim_b
    total = 0.0
    for k in range(d_b):
        proj = np.kron(np.eye(d_a), np.outer(basis.vectors[k], basis.vectors[k].conj()))
        sel = proj @ rho_ab @ proj
        p = np.trace(sel).real
        if p < 1e-12:
            continue
        red = sel.reshape(d_a, d_b, d_a, d_b)
        rho_k = np.einsum("ijkj->ik", red) / p
        diag = np.clip(rho_k.diagonal().real, 0.0, None)
        diag = diag[diag > 1e-15]
        total += p * float(-(diag * np.log2(diag)).sum())
    return np.log2(d_a) - total


class TestConfigValidation:
    def test_unnormalized_amplitudes_rejected(self):
        with pytest.raises(ValidationError):
            DetectorConfig(np.array([1.0, 1.0]), np.eye(2, dtype=complex))

    def test_unnormalized_detector_rejected(self):
        det = np.array([[1.0, 0.0], [0.0, 2.0]], dtype=complex)
        with pytest.raises(ValidationError):
            DetectorConfig(np.array([1, 1]) / np.sqrt(2), det)

    def test_detector_space_must_fit_paths(self):
        det = np.ones((3, 2), dtype=complex) / np.sqrt(2)
        with pytest.raises(DimensionError):
            DetectorConfig(np.array([1, 1, 1]) / np.sqrt(3), det)


class TestJointState:
    def test_identical_imprints_make_product_state(self):
        config = uniform_overlap_config(3, 1.0)
        dec = schmidt_decompose(build_joint_state(config))
        assert dec.coeffs[0] > 1.0 - 1e-10
        assert np.all(dec.coeffs[1:] < 1e-10)

    def test_orthogonal_uniform_is_maximally_entangled(self):
        config = uniform_overlap_config(3, 0.0)
        dec = schmidt_decompose(build_joint_state(config))
        assert np.allclose(dec.coeffs, np.ones(3) / 3, atol=1e-10)

    def test_norm_one_on_random_configs(self):
        rng = make_rng(5)
        for _ in range(20):
            joint = build_joint_state(random_config(3, 4, rng))
            assert abs(np.linalg.norm(joint.amps) - 1.0) < 1e-10


class TestSortEnsemble:
    def test_orthogonal_imprints_in_detector_basis(self):
        a = np.sqrt(np.array([0.7, 0.3]))
        config = DetectorConfig(a, np.eye(2, dtype=complex))
        sub = sort_ensemble(build_joint_state(config), detector_basis(config))
        probs = sub.weights()
        assert np.allclose(sorted(probs), [0.3, 0.7], atol=1e-12)
        for p, rho in sub.entries:
            w = np.linalg.eigvalsh(rho.mat)
            assert abs(w[-1] - 1.0) < 1e-10       # each branch collapses a path

    def test_identical_imprints_reproduce_reduced_state(self):
        config = uniform_overlap_config(2, 1.0, amplitudes=np.array([0.6, 0.8]))
        joint = build_joint_state(config)
        rho_a = reduced_a(joint)
        rng = make_rng(1)
        for _ in range(5):
            sub = sort_ensemble(joint, random_basis(2, rng))
            for p, rho in sub.entries:
                assert np.max(np.abs(rho.mat - rho_a.mat)) < 1e-9

    def test_probabilities_sum_to_one(self):
        rng = make_rng(2)
        for _ in range(20):
            joint = build_joint_state(random_config(3, 3, rng))
            sub = sort_ensemble(joint, random_basis(3, rng))
            assert abs(sub.weights().sum() - 1.0) < 1e-10

    def test_dimension_mismatch(self):
        joint = build_joint_state(uniform_overlap_config(2, 0.5))
        with pytest.raises(DimensionError):
            sort_ensemble(joint, random_basis(3, make_rng(0)))


class TestDistinguishability:
    def test_orthogonal_imprints_reach_maximum(self):
        for d in (2, 3, 4):
            config = uniform_overlap_config(d, 0.0)
            sub = sort_ensemble(build_joint_state(config), detector_basis(config))
            assert abs(distinguishability_vn(sub) - np.log2(d)) < 1e-10

    def test_identical_imprints_equal_predictability(self):
        config = uniform_overlap_config(2, 1.0, amplitudes=np.sqrt([0.7, 0.3]))
        joint = build_joint_state(config)
        rng = make_rng(3)
        for _ in range(5):
            sub = sort_ensemble(joint, random_basis(2, rng))
            assert abs(distinguishability_vn(sub) - predictability_vn(reduced_a(joint))) < 1e-10

    def test_matches_brute_force_over_overlap_sweep(self):
        rng = make_rng(4)
        for overlap in np.linspace(0.0, 1.0, 9):
            config = uniform_overlap_config(2, overlap, amplitudes=np.sqrt([0.6, 0.4]))
            joint = build_joint_state(config)
            basis = random_basis(2, rng)
            sub = sort_ensemble(joint, basis)
            assert abs(distinguishability_vn(sub) - brute_force_dvn(joint, basis)) < 1e-10


class TestAvgCoherence:
    def test_orthogonal_imprints_detector_basis_zero(self):
        config = uniform_overlap_config(3, 0.0)
        sub = sort_ensemble(build_joint_state(config), detector_basis(config))
        assert avg_coherence(sub) < 1e-10

    def test_identical_imprints_keep_full_coherence(self):
        config = uniform_overlap_config(2, 1.0)
        joint = build_joint_state(config)
        sub = sort_ensemble(joint, random_basis(2, make_rng(6)))
        assert abs(avg_coherence(sub) - rel_entropy_coherence(reduced_a(joint))) < 1e-10

    def test_nonnegative(self):
        rng = make_rng(7)
        for _ in range(20):
            joint = build_joint_state(random_config(2, 3, rng))
            assert avg_coherence(sort_ensemble(joint, random_basis(3, rng))) >= 0.0


class TestEntropyGaps:
    def test_identical_imprints_gap_zero(self):
        config = uniform_overlap_config(2, 1.0)
        joint = build_joint_state(config)
        sub = sort_ensemble(joint, random_basis(2, make_rng(8)))
        rho_a = reduced_a(joint)
        assert abs(e_gap_diag(rho_a, sub)) < 1e-10
        assert abs(e_gap_full(rho_a, sub)) < 1e-10

    def test_orthogonal_uniform_reaches_log_d(self):
        for d in (2, 3):
            config = uniform_overlap_config(d, 0.0)
            joint = build_joint_state(config)
            sub = sort_ensemble(joint, detector_basis(config))
            rho_a = reduced_a(joint)
            assert abs(e_gap_diag(rho_a, sub) - np.log2(d)) < 1e-9
            assert abs(e_gap_full(rho_a, sub) - vn_entropy(rho_a)) < 1e-9

    def test_decomposition_identity(self):
        rng = make_rng(9)
        for _ in range(40):
            joint = build_joint_state(random_config(3, 3, rng))
            sub = sort_ensemble(joint, random_basis(3, rng))
            rho_a = reduced_a(joint)
            lhs = distinguishability_vn(sub)
            rhs = predictability_vn(rho_a) + e_gap_diag(rho_a, sub)
            assert abs(lhs - rhs) < 1e-10

    def test_gaps_nonnegative_on_random_configs(self):
        rng = make_rng(10)
        for _ in range(40):
            joint = build_joint_state(random_config(2, 4, rng))
            sub = sort_ensemble(joint, random_basis(4, rng))
            rho_a = reduced_a(joint)
            assert e_gap_diag(rho_a, sub) >= -1e-10
            assert e_gap_full(rho_a, sub) >= -1e-10

    def test_reconstruction_mismatch_rejected(self):
        config = uniform_overlap_config(2, 0.3)
        joint = build_joint_state(config)
        sub = sort_ensemble(joint, detector_basis(config))
        from quanton import DensityMatrix

        wrong = DensityMatrix(np.eye(2) / 2)
        with pytest.raises(ValidationError):
            e_gap_diag(wrong, sub)


class TestWhichWayBound:
    def test_bound_holds_for_every_basis(self):
        rng = make_rng(11)
        for _ in range(50):
            d_a = int(rng.integers(2, 4))
            joint = build_joint_state(random_config(d_a, d_a, rng))
            sub = sort_ensemble(joint, random_basis(d_a, rng))
            total = distinguishability_vn(sub) + avg_coherence(sub)
            assert total <= np.log2(d_a) + 1e-9


class TestMaximize:
    def test_orthogonal_imprints_reach_log_d(self):
        for d in (2, 3):
            joint = build_joint_state(uniform_overlap_config(d, 0.0))
            val, basis = maximize_distinguishability(joint, restarts=8, seed=0)
            assert abs(val - np.log2(d)) < 1e-6
            assert basis.dim == d

    def test_identical_imprints_give_predictability(self):
        config = uniform_overlap_config(2, 1.0, amplitudes=np.sqrt([0.8, 0.2]))
        joint = build_joint_state(config)
        val, _ = maximize_distinguishability(joint, restarts=4, seed=1)
        assert abs(val - predictability_vn(reduced_a(joint))) < 1e-6

    def test_matches_dense_grid_search(self):
        config = uniform_overlap_config(2, 0.5)
        joint = build_joint_state(config)
        val, _ = maximize_distinguishability(joint, restarts=16, seed=2)
        # Oracle: exhaustive scan of 2x2 bases |b0> = (cos t, e^{ip} sin t).
        ts = np.linspace(0.0, np.pi / 2, 281)
        ps = np.linspace(0.0, 2 * np.pi, 281)
        tt, pp = np.meshgrid(ts, ps, indexing="ij")
        b0 = np.stack([np.cos(tt), np.exp(1j * pp) * np.sin(tt)], axis=-1)
        b1 = np.stack([-np.exp(-1j * pp) * np.sin(tt), np.cos(tt)], axis=-1)
        psi = joint.matrix()
        u0 = np.einsum("ij,xyj->xyi", psi, b0.conj())
        u1 = np.einsum("ij,xyj->xyi", psi, b1.conj())
        ent = np.zeros_like(tt)
        for u in (u0, u1):
            q = np.abs(u) ** 2
            p = q.sum(axis=-1)
            with np.errstate(divide="ignore", invalid="ignore"):
                term = np.where(q > 1e-15, -q * np.log2(np.where(q > 1e-15, q, 1.0)), 0.0).sum(axis=-1)
                term += np.where(p > 1e-12, p * np.log2(np.where(p > 1e-12, p, 1.0)), 0.0)
            ent += term
        grid_best = float((1.0 - ent).max())
        assert val >= grid_best - 1e-4
        assert abs(val - grid_best) < 1e-4

    def test_result_beats_random_bases(self):
        rng = make_rng(13)
        joint = build_joint_state(random_config(2, 2, rng))
        val, _ = maximize_distinguishability(joint, restarts=8, seed=3)
        for _ in range(20):
            sub = sort_ensemble(joint, random_basis(2, rng))
            assert val >= distinguishability_vn(sub) - 1e-6

    def test_restart_guard(self):
        joint = build_joint_state(uniform_overlap_config(2, 0.0))
        with pytest.raises(ConfigError):
            maximize_distinguishability(joint, restarts=0)


class TestHierarchy:
    def test_p_below_d_below_dmax(self):
        rng = make_rng(14)
        for _ in range(10):
            joint = build_joint_state(random_config(2, 2, rng))
            rho_a = reduced_a(joint)
            sub = sort_ensemble(joint, random_basis(2, rng))
            d_val = distinguishability_vn(sub)
            d_max, _ = maximize_distinguishability(joint, restarts=8, seed=rng.integers(2**32))
            assert predictability_vn(rho_a) <= d_val + 1e-9
            assert d_val <= d_max + 1e-6


class TestSeparabilityWitness:
    def test_gap_zero_iff_product(self):
        # Forward: product families keep the maximized gap at zero.
        for overlap, amps in ((1.0, None), (0.4, np.array([0, 1], dtype=complex))):
            config = uniform_overlap_config(2, overlap, amplitudes=amps)
            joint = build_joint_state(config)
            rho_a = reduced_a(joint)
            d_max, basis = maximize_distinguishability(joint, restarts=8, seed=21)
            gap = e_gap_diag(rho_a, sort_ensemble(joint, basis))
            assert schmidt_decompose(joint).coeffs[1:].max(initial=0.0) < 1e-10
            assert abs(gap) < 1e-9
        # Reverse: entangled members of the family show a positive gap.
        for overlap in (0.0, 0.3, 0.8):
            config = uniform_overlap_config(2, overlap)
            joint = build_joint_state(config)
            rho_a = reduced_a(joint)
            d_max, basis = maximize_distinguishability(joint, restarts=8, seed=22)
            gap = e_gap_diag(rho_a, sort_ensemble(joint, basis))
            assert schmidt_decompose(joint).coeffs[1] > 1e-6
            assert gap > 1e-6


def test_complementarity_record_fields():
    rec = complementarity_record(uniform_overlap_config(2, 0.5), restarts=4, seed=5)
    assert rec.slack_pc >= -1e-10
    assert rec.slack_dc >= -1e-10
    assert rec.E_script >= 0.0
    assert rec.D_max + 1e-6 >= rec.D
