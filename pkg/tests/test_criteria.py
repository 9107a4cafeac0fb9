"""Criteria harness: production measures pass, decoys fail reproducibly."""

import numpy as np
import pytest

from quanton import ConfigError, DensityMatrix, MeasureRejectedError, theorem_monotone
from quanton.criteria import (
    REGISTRY,
    CandidateMeasure,
    ToleranceProfile,
    check_criteria,
    get_measure,
    probe_continuity,
    probe_convexity,
    probe_extremes,
    probe_permutation,
    probe_transfer,
    recheck_witness,
    register_validated,
    validated_p_vn,
)
from quanton.measures import predictability_vn

FAST = ToleranceProfile(samples=400, dims=(2, 3, 4))


class TestProductionMeasuresPass:
    def test_p_vn_all_criteria(self):
        report = check_criteria(get_measure("p_vn"), FAST, seed=1)
        assert report.overall_pass, report.verdicts

    def test_c_re_all_criteria(self):
        report = check_criteria(get_measure("c_re"), FAST, seed=2)
        assert report.overall_pass, report.verdicts


class TestDecoysFail:
    @pytest.mark.parametrize("name", ["decoy_step", "decoy_rho00", "decoy_concave"])
    def test_designed_criterion_fails_with_witness(self, name):
        measure, designed = REGISTRY[name]
        report = check_criteria(measure, FAST, seed=3)
        assert report.verdicts[designed] == "fail"
        wits = [w for w in report.witnesses if w.criterion == designed]
        assert wits
        assert recheck_witness(measure, wits[0], FAST) > 0

    def test_rho00_witness_reproduces_gap(self):
        measure, _ = REGISTRY["decoy_rho00"]
        ok, witness, _ = probe_permutation(measure, FAST, seed=4)
        assert not ok
        a, b = witness.values
        assert abs(a - b) > 1e-6
        assert recheck_witness(measure, witness, FAST) > 0


class TestIndividualProbes:
    def test_constant_measure_passes_continuity(self):
        const = CandidateMeasure("const", "P", lambda rho: 0.25)
        ok, _, _ = probe_continuity(const, FAST, seed=5)
        assert ok

    def test_step_fails_continuity(self):
        ok, witness, _ = probe_continuity(REGISTRY["decoy_step"][0], FAST, seed=6)
        assert not ok
        assert witness.violation > 0.9        # full unit jump across the step

    def test_anti_measure_fails_transfer(self):
        anti = CandidateMeasure("anti_p_vn", "P", lambda rho: -predictability_vn(rho))
        ok, witness, _ = probe_transfer(anti, FAST, seed=7)
        assert not ok
        assert recheck_witness(anti, witness, FAST) > 0

    def test_extremes_dual_checks_for_visibility(self):
        res3, res4 = probe_extremes(get_measure("c_re"), FAST, seed=8)
        assert res3[0] and res4[0]

    def test_convexity_single_state_trivial(self):
        # Any measure is trivially convex over one-element mixtures; the
        # probe must not invent violations on duplicated states.
        lin = CandidateMeasure("lin", "P", lambda rho: float(np.real(rho.mat[0, 0])))
        ok, _, _ = probe_convexity(lin, FAST, seed=9)
        assert ok


class TestHarnessContracts:
    def test_deterministic_for_fixed_seed(self):
        r1 = check_criteria(get_measure("p_vn"), FAST, seed=11)
        r2 = check_criteria(get_measure("p_vn"), FAST, seed=11)
        assert r1.verdicts == r2.verdicts
        assert r1.samples_used == r2.samples_used

    def test_raising_measure_recorded_as_c1_failure(self):
        def boom(rho):
            raise RuntimeError("broken measure")

        report = check_criteria(CandidateMeasure("boom", "P", boom), FAST, seed=12)
        assert report.verdicts["C1"] == "fail"
        assert not report.overall_pass
        assert report.witnesses

    def test_non_finite_measure_recorded_as_c1_failure(self):
        report = check_criteria(
            CandidateMeasure("nanny", "P", lambda rho: float("nan")), FAST, seed=13
        )
        assert report.verdicts["C1"] == "fail"

    def test_unknown_measure_rejected(self):
        with pytest.raises(ConfigError):
            get_measure("does_not_exist")

    def test_bad_profile_rejected(self):
        with pytest.raises(ConfigError):
            ToleranceProfile(samples=0)

    def test_bad_kind_rejected(self):
        with pytest.raises(ConfigError):
            CandidateMeasure("x", "Q", lambda rho: 0.0)


class TestRegistrationGate:
    def test_validated_p_vn_works_in_constructor(self):
        from quanton import PureState

        reg = register_validated(
            get_measure("p_vn"), dcal=lambda d: float(np.log2(d)), prof=FAST, seed=14
        )
        bell = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), 2, 2)
        assert abs(theorem_monotone(reg, bell) - 1.0) < 1e-10

    def test_decoy_rejected_by_constructor(self):
        from quanton import PureState

        reg = register_validated(
            REGISTRY["decoy_rho00"][0], dcal=lambda d: 1.0, prof=FAST, seed=15
        )
        bell = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), 2, 2)
        assert not reg.report.overall_pass
        with pytest.raises(MeasureRejectedError):
            theorem_monotone(reg, bell)

    def test_default_validated_helper(self):
        reg = validated_p_vn(seed=16)
        assert reg.report.overall_pass
