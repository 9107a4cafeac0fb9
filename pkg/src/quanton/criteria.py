"""Criteria harness for candidate predictability and visibility measures.

Six standard reliability criteria are probed by randomized sampling plus
targeted boundary states:

C1 continuity in the matrix elements, C2 permutation invariance,
C3/C4 correct extremal behavior, C5 monotonicity under population transfer
(or coherence shrinking, for visibility), C6 convexity.

Sampling can only ever find violations, so a PASS verdict means "no
violation found at this sample size"; every FAIL ships a witness that
reproduces the violation deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, EvaluationError
from .linalg import DensityMatrix, dephase
from .measures import predictability_vn, rel_entropy_coherence
from .monotones import RegisteredPredictability
from .sampling import make_rng, random_density_matrix_batch, split_seed

CRITERIA = ("C1", "C2", "C3", "C4", "C5", "C6")


@dataclass(frozen=True)
class CandidateMeasure:
    """A measure under test: kind 'P' (predictability) or 'V' (visibility)."""

    name: str
    kind: str
    eval: Callable[[DensityMatrix], float]

    def __post_init__(self):
        if self.kind not in ("P", "V"):
            raise ConfigError(f"kind must be 'P' or 'V', got {self.kind!r}")


@dataclass(frozen=True)
class ToleranceProfile:
    """Quantitative operationalization of the criteria.

    The criteria themselves carry no thresholds; continuity in particular is
    tested as a bounded difference ratio (|dm| <= ratio_bound * delta), which
    is a documented convention rather than formal continuity.
    """

    continuity_delta: float = 1e-6
    continuity_ratio_bound: float = 1e3
    equality_tol: float = 1e-9
    transfer_epsilon: float = 1e-4
    convexity_tol: float = 1e-9
    samples: int = 2000
    dims: tuple = (2, 3, 4, 5, 6)

    def __post_init__(self):
        for name in (
            "continuity_delta",
            "continuity_ratio_bound",
            "equality_tol",
            "transfer_epsilon",
            "convexity_tol",
            "samples",
        ):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")


@dataclass(frozen=True)
class Witness:
    """Reproducible evidence for a criterion failure."""

    criterion: str
    description: str
    states: tuple              # raw density matrices involved in the check
    values: tuple              # measure values observed on those states
    violation: float           # positive amount by which the check failed
    aux: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CriteriaReport:
    measure: str
    kind: str
    verdicts: dict             # criterion -> "pass" | "fail"
    witnesses: tuple
    samples_used: dict
    profile: ToleranceProfile
    seed: int

    @property
    def overall_pass(self) -> bool:
        return all(v == "pass" for v in self.verdicts.values())


def _safe_eval(measure: CandidateMeasure, rho: DensityMatrix) -> float:
    try:
        val = float(measure.eval(rho))
    except EvaluationError:
        raise
    except Exception as exc:
        err = EvaluationError(f"measure {measure.name!r} raised: {exc!r}")
        err.state = rho.mat
        raise err from exc
    if not np.isfinite(val):
        err = EvaluationError(f"measure {measure.name!r} returned {val!r}")
        err.state = rho.mat
        raise err
    return val


def _wrap(mat: np.ndarray) -> DensityMatrix:
    return DensityMatrix._wrap(np.asarray(mat, dtype=np.complex128))


def _uniform_phase_pure(dim: int, rng) -> np.ndarray:
    """Pure state with uniform populations and random phases."""
    v = np.exp(2j * np.pi * rng.uniform(size=dim)) / np.sqrt(dim)
    return np.outer(v, v.conj())


def _sample_pool(dim: int, count: int, rng) -> list:
    """Mixed bag of random states: full rank, lower ranks, pure, boundary."""
    pool = []
    n_full = max(count // 2, 1)
    batch = random_density_matrix_batch(n_full, dim, dim, rng)
    pool.extend(batch)
    for _ in range(count - n_full):
        rank = int(rng.integers(1, dim + 1))
        g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
        m = g @ g.conj().T
        pool.append(m / np.trace(m).real)
    # boundary states: basis states, uniform diagonal, near-degenerate diagonal
    for j in range(dim):
        e = np.zeros((dim, dim), dtype=np.complex128)
        e[j, j] = 1.0
        pool.append(e)
    pool.append(np.eye(dim, dtype=np.complex128) / dim)
    diag = np.full(dim, 1.0 / dim)
    diag[0] += 1e-7
    diag[1] -= 1e-7
    pool.append(np.diag(diag).astype(np.complex128))
    pool.append(_uniform_phase_pure(dim, rng))
    return pool


def probe_continuity(measure: CandidateMeasure, prof: ToleranceProfile, seed):
    """C1: bounded response to trace-norm perturbations of the state."""
    rng = make_rng(seed)
    delta = prof.continuity_delta
    bound = prof.continuity_ratio_bound * delta
    used = 0
    per_dim = max(prof.samples // len(prof.dims), 1)
    for dim in prof.dims:
        bases = _sample_pool(dim, per_dim // 2, rng)
        # Targeted straddle states catch jumps on population thresholds.
        half = np.full(dim, 0.5 / (dim - 1))
        half[0] = 0.5
        bases.append(np.diag(half).astype(np.complex128))
        targets = [random_density_matrix_batch(1, dim, dim, rng)[0] for _ in range(4)]
        e0 = np.zeros((dim, dim), dtype=np.complex128)
        e0[0, 0] = 1.0
        anti = np.eye(dim, dtype=np.complex128)
        anti[0, 0] = 0.0
        anti /= np.trace(anti).real if dim > 1 else 1.0
        targets.extend([e0, anti])
        for rho in bases:
            f0 = _safe_eval(measure, _wrap(rho))
            for sigma in targets:
                gap = np.abs(np.linalg.eigvalsh(sigma - rho)).sum()
                if gap < 10 * delta:
                    continue
                eps = delta / gap
                pert = (1.0 - eps) * rho + eps * sigma
                f1 = _safe_eval(measure, _wrap(pert))
                used += 1
                if abs(f1 - f0) > bound:
                    return False, Witness(
                        criterion="C1",
                        description="trace-norm perturbation moved the measure "
                        "beyond the allowed difference ratio",
                        states=(rho, pert),
                        values=(f0, f1),
                        violation=abs(f1 - f0) - bound,
                        aux={"delta": delta, "bound": bound},
                    ), used
    return True, None, used


def probe_permutation(measure: CandidateMeasure, prof: ToleranceProfile, seed):
    """C2: invariance under permutations of the basis-state indexes."""
    rng = make_rng(seed)
    tol = prof.equality_tol
    used = 0
    per_dim = max(prof.samples // len(prof.dims), 1)
    for dim in prof.dims:
        pool = _sample_pool(dim, per_dim, rng)
        # Deterministic witness candidate: swap of the two leading indexes
        # on a strongly biased diagonal.
        biased = np.zeros(dim)
        biased[0], biased[1] = 0.9, 0.1
        pool.append(np.diag(biased).astype(np.complex128))
        for rho in pool:
            perm = rng.permutation(dim)
            if np.all(perm == np.arange(dim)):
                perm = np.roll(np.arange(dim), 1)
            f0 = _safe_eval(measure, _wrap(rho))
            for p in (perm, _swap01(dim)):
                permuted = rho[np.ix_(p, p)]
                f1 = _safe_eval(measure, _wrap(permuted))
                used += 1
                if abs(f1 - f0) > tol:
                    return False, Witness(
                        criterion="C2",
                        description="permuting basis indexes changed the measure",
                        states=(rho, permuted),
                        values=(f0, f1),
                        violation=abs(f1 - f0) - tol,
                        aux={"permutation": p.tolist()},
                    ), used
    return True, None, used


def _swap01(dim: int) -> np.ndarray:
    p = np.arange(dim)
    p[0], p[1] = 1, 0
    return p


def probe_extremes(measure: CandidateMeasure, prof: ToleranceProfile, seed):
    """C3 and C4: correct behavior at the extremal states.

    Predictability must peak on deterministic populations and bottom out on
    uniform ones; visibility must vanish on basis states and peak on pure
    states with uniform populations.
    """
    rng = make_rng(seed)
    tol = prof.equality_tol
    used = 0
    per_dim = max(prof.samples // len(prof.dims), 1)
    w3 = w4 = None
    for dim in prof.dims:
        pool = _sample_pool(dim, per_dim, rng)
        vals = []
        for rho in pool:
            vals.append(_safe_eval(measure, _wrap(rho)))
            used += 1
        lo, hi = min(vals), max(vals)
        lo_state = pool[int(np.argmin(vals))]
        hi_state = pool[int(np.argmax(vals))]

        basis_states = []
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=np.complex128)
            e[j, j] = 1.0
            basis_states.append(e)
        uniform_pop = [np.eye(dim, dtype=np.complex128) / dim]
        for _ in range(4):
            uniform_pop.append(_uniform_phase_pure(dim, rng))
        mix = 0.5 * uniform_pop[1] + 0.5 * uniform_pop[2]
        uniform_pop.append(mix)
        pure_uniform = [_uniform_phase_pure(dim, rng) for _ in range(4)]

        if measure.kind == "P":
            for e in basis_states:
                v = _safe_eval(measure, _wrap(e))
                used += 1
                if w3 is None and v < hi - tol:
                    w3 = Witness(
                        "C3",
                        "a deterministic-population state does not reach the maximum",
                        (e, hi_state),
                        (v, hi),
                        hi - tol - v,
                    )
            for u in uniform_pop:
                v = _safe_eval(measure, _wrap(u))
                used += 1
                if w4 is None and v > lo + tol:
                    w4 = Witness(
                        "C4",
                        "a uniform-population state does not reach the minimum",
                        (u, lo_state),
                        (v, lo),
                        v - (lo + tol),
                    )
        else:
            for e in basis_states:
                v = _safe_eval(measure, _wrap(e))
                used += 1
                if w3 is None and v > lo + tol:
                    w3 = Witness(
                        "C3",
                        "a deterministic-population state does not reach the minimum",
                        (e, lo_state),
                        (v, lo),
                        v - (lo + tol),
                    )
            for u in pure_uniform:
                v = _safe_eval(measure, _wrap(u))
                used += 1
                if w4 is None and v < hi - tol:
                    w4 = Witness(
                        "C4",
                        "a uniform pure state does not reach the maximum",
                        (u, hi_state),
                        (v, hi),
                        hi - tol - v,
                    )
    return (w3 is None, w3, used), (w4 is None, w4, used)


def probe_transfer(measure: CandidateMeasure, prof: ToleranceProfile, seed):
    """C5: moving population from a larger to a smaller level (predictability)
    or uniformly shrinking coherences (visibility) must not raise the measure."""
    rng = make_rng(seed)
    eps = prof.transfer_epsilon
    tol = prof.equality_tol
    used = 0
    per_dim = max(prof.samples // len(prof.dims), 1)
    for dim in prof.dims:
        pool = _sample_pool(dim, per_dim, rng)
        for rho in pool:
            if measure.kind == "P":
                diag = np.clip(np.real(np.diag(rho)).copy(), 0.0, None)
                order = np.argsort(diag)
                j, k = int(order[-1]), int(order[0])
                if diag[j] - eps < diag[k] + eps:
                    continue          # transfer would cross; precondition guard
                moved = diag.copy()
                moved[j] -= eps
                moved[k] += eps
                base = np.diag(diag).astype(np.complex128)
                base /= np.trace(base).real
                shifted = np.diag(moved).astype(np.complex128)
                shifted /= np.trace(shifted).real
                f0 = _safe_eval(measure, _wrap(base))
                f1 = _safe_eval(measure, _wrap(shifted))
                used += 1
                if f1 > f0 + tol:
                    return False, Witness(
                        criterion="C5",
                        description="population transfer toward uniformity "
                        "increased the measure",
                        states=(base, shifted),
                        values=(f0, f1),
                        violation=f1 - f0 - tol,
                        aux={"epsilon": eps, "from": j, "to": k},
                    ), used
            else:
                shrunk = (1.0 - eps) * rho + eps * np.diag(np.diag(rho))
                f0 = _safe_eval(measure, _wrap(rho))
                f1 = _safe_eval(measure, _wrap(shrunk))
                used += 1
                if f1 > f0 + tol:
                    return False, Witness(
                        criterion="C5",
                        description="shrinking the coherences increased the measure",
                        states=(rho, shrunk),
                        values=(f0, f1),
                        violation=f1 - f0 - tol,
                        aux={"epsilon": eps},
                    ), used
    return True, None, used


def probe_convexity(measure: CandidateMeasure, prof: ToleranceProfile, seed):
    """C6: the measure never exceeds the weighted average over a mixture."""
    rng = make_rng(seed)
    tol = prof.convexity_tol
    used = 0
    per_dim = max(prof.samples // len(prof.dims), 1)
    for dim in prof.dims:
        pool = _sample_pool(dim, per_dim, rng)
        # Deterministic witness candidate: equal mixture of the two leading
        # basis states (catches concave population measures).
        e0 = np.zeros((dim, dim), dtype=np.complex128)
        e0[0, 0] = 1.0
        e1 = np.zeros((dim, dim), dtype=np.complex128)
        e1[1, 1] = 1.0
        groups = [((0.5, 0.5), (e0, e1))]
        for _ in range(len(pool) // 2):
            k = int(rng.integers(2, 4))
            idx = rng.integers(0, len(pool), size=k)
            weights = rng.dirichlet(np.ones(k))
            groups.append((tuple(weights), tuple(pool[i] for i in idx)))
        for weights, states in groups:
            mix = sum(w * s for w, s in zip(weights, states))
            f_mix = _safe_eval(measure, _wrap(mix))
            f_avg = sum(w * _safe_eval(measure, _wrap(s)) for w, s in zip(weights, states))
            used += 1
            if f_mix > f_avg + tol:
                return False, Witness(
                    criterion="C6",
                    description="measure of a mixture exceeded the mixture of measures",
                    states=(mix,) + tuple(states),
                    values=(f_mix, f_avg),
                    violation=f_mix - f_avg - tol,
                    aux={"weights": [float(w) for w in weights]},
                ), used
    return True, None, used


def check_criteria(measure: CandidateMeasure, prof: ToleranceProfile = None, seed=0) -> CriteriaReport:
    """Run all six probes; deterministic for a fixed (seed, profile)."""
    prof = ToleranceProfile() if prof is None else prof
    verdicts = {}
    witnesses = []
    samples_used = {}

    def record(criterion, ok, witness, used):
        verdicts[criterion] = "pass" if ok else "fail"
        samples_used[criterion] = used
        if witness is not None:
            witnesses.append(witness)

    try:
        ok, wit, used = probe_continuity(measure, prof, split_seed(seed, 1))
        record("C1", ok, wit, used)
        ok, wit, used = probe_permutation(measure, prof, split_seed(seed, 2))
        record("C2", ok, wit, used)
        res3, res4 = probe_extremes(measure, prof, split_seed(seed, 3))
        record("C3", *res3)
        record("C4", *res4)
        ok, wit, used = probe_transfer(measure, prof, split_seed(seed, 5))
        record("C5", ok, wit, used)
        ok, wit, used = probe_convexity(measure, prof, split_seed(seed, 6))
        record("C6", ok, wit, used)
    except EvaluationError as exc:
        state = getattr(exc, "state", np.eye(2, dtype=np.complex128) / 2)
        witnesses.append(
            Witness(
                criterion="C1",
                description=f"measure evaluation failed: {exc}",
                states=(state,),
                values=(),
                violation=float("inf"),
            )
        )
        for criterion in CRITERIA:
            verdicts.setdefault(criterion, "fail" if criterion == "C1" else "skipped")
            samples_used.setdefault(criterion, 0)
        verdicts["C1"] = "fail"

    return CriteriaReport(
        measure=measure.name,
        kind=measure.kind,
        verdicts=verdicts,
        witnesses=tuple(witnesses),
        samples_used=samples_used,
        profile=prof,
        seed=int(seed) if not isinstance(seed, np.random.Generator) else -1,
    )


def recheck_witness(measure: CandidateMeasure, witness: Witness, prof: ToleranceProfile = None) -> float:
    """Re-evaluate a witness; a positive return reproduces the violation."""
    prof = ToleranceProfile() if prof is None else prof
    states = [_wrap(s) for s in witness.states]
    if witness.criterion == "C1":
        if not witness.values:
            try:
                _safe_eval(measure, states[0])
            except EvaluationError:
                return float("inf")
            return -1.0
        bound = witness.aux.get("bound", prof.continuity_ratio_bound * prof.continuity_delta)
        return abs(_safe_eval(measure, states[1]) - _safe_eval(measure, states[0])) - bound
    if witness.criterion == "C2":
        return abs(_safe_eval(measure, states[1]) - _safe_eval(measure, states[0])) - prof.equality_tol
    if witness.criterion == "C3":
        if measure.kind == "P":
            return _safe_eval(measure, states[1]) - _safe_eval(measure, states[0]) - prof.equality_tol
        return _safe_eval(measure, states[0]) - _safe_eval(measure, states[1]) - prof.equality_tol
    if witness.criterion == "C4":
        if measure.kind == "P":
            return _safe_eval(measure, states[0]) - _safe_eval(measure, states[1]) - prof.equality_tol
        return _safe_eval(measure, states[1]) - _safe_eval(measure, states[0]) - prof.equality_tol
    if witness.criterion == "C5":
        return _safe_eval(measure, states[1]) - _safe_eval(measure, states[0]) - prof.equality_tol
    if witness.criterion == "C6":
        weights = witness.aux["weights"]
        avg = sum(w * _safe_eval(measure, s) for w, s in zip(weights, states[1:]))
        return _safe_eval(measure, states[0]) - avg - prof.convexity_tol
    raise ConfigError(f"unknown criterion {witness.criterion!r}")


# ---------------------------------------------------------------------------
# Built-in registry: the production measures plus deliberately broken decoys.
# ---------------------------------------------------------------------------


def _decoy_step(rho: DensityMatrix) -> float:
    return 1.0 if rho.mat[0, 0].real >= 0.5 else 0.0


def _decoy_rho00(rho: DensityMatrix) -> float:
    return float(rho.mat[0, 0].real)


def _decoy_concave(rho: DensityMatrix) -> float:
    return float(np.sqrt(max(rho.mat[0, 0].real, 0.0) * max(rho.mat[1, 1].real, 0.0)))


#: name -> (measure, criterion its defect is designed to violate, or None)
REGISTRY = {
    "p_vn": (CandidateMeasure("p_vn", "P", predictability_vn), None),
    "c_re": (CandidateMeasure("c_re", "V", rel_entropy_coherence), None),
    "decoy_step": (CandidateMeasure("decoy_step", "P", _decoy_step), "C1"),
    "decoy_rho00": (CandidateMeasure("decoy_rho00", "P", _decoy_rho00), "C2"),
    "decoy_concave": (CandidateMeasure("decoy_concave", "P", _decoy_concave), "C6"),
}


def get_measure(name: str) -> CandidateMeasure:
    if name not in REGISTRY:
        raise ConfigError(f"unknown measure {name!r}; choose from {sorted(REGISTRY)}")
    return REGISTRY[name][0]


def register_validated(
    measure: CandidateMeasure,
    dcal: Callable[[int], float],
    prof: ToleranceProfile = None,
    seed=0,
) -> RegisteredPredictability:
    """Gate a predictability measure through the harness for monotone use.

    The returned object carries the criteria report; the monotone
    constructor refuses measures whose report has any failure.
    """
    report = check_criteria(measure, prof, seed)
    return RegisteredPredictability(
        name=measure.name, eval=measure.eval, dcal=dcal, report=report
    )


def validated_p_vn(seed=0) -> RegisteredPredictability:
    """The entropic predictability, gated and ready for the constructor."""
    return register_validated(
        get_measure("p_vn"), dcal=lambda d: float(np.log2(d)), seed=seed
    )
