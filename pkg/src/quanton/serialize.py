"""JSON wire formats for states, detector configurations, and reports.

Density matrices travel as ``{"dims": [d_A, d_B], "re": [...], "im": [...]}``
with row-major flattening; detector configurations as
``{"amps_re": [...], "amps_im": [...], "detectors": [[re, im], ...]}`` where
each detector entry carries the real and imaginary parts of one imprint
vector. These formats feed the CLI and the golden-file tests.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from .criteria import CriteriaReport, ToleranceProfile, Witness
from .detector import DetectorConfig
from .errors import ValidationError
from .linalg import DensityMatrix
from .monotones import RoofResult


def density_to_dict(rho: DensityMatrix, dims: tuple[int, int]) -> dict:
    if dims[0] * dims[1] != rho.dim:
        raise ValidationError(f"dims {dims} do not factor dimension {rho.dim}")
    flat = rho.mat.reshape(-1)
    return {
        "dims": [int(dims[0]), int(dims[1])],
        "re": flat.real.tolist(),
        "im": flat.imag.tolist(),
    }


def density_from_dict(data: dict) -> tuple[DensityMatrix, tuple[int, int]]:
    try:
        d_a, d_b = (int(x) for x in data["dims"])
        re = np.asarray(data["re"], dtype=np.float64)
        im = np.asarray(data["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed state object: {exc}") from exc
    dim = d_a * d_b
    if re.shape != (dim * dim,) or im.shape != (dim * dim,):
        raise ValidationError(
            f"state needs {dim * dim} re/im entries for dims ({d_a}, {d_b})"
        )
    mat = (re + 1j * im).reshape(dim, dim)
    return DensityMatrix(mat), (d_a, d_b)


def config_to_dict(config: DetectorConfig) -> dict:
    return {
        "amps_re": config.amplitudes.real.tolist(),
        "amps_im": config.amplitudes.imag.tolist(),
        "detectors": [
            [vec.real.tolist(), vec.imag.tolist()] for vec in config.detector_states
        ],
    }


def config_from_dict(data: dict) -> DetectorConfig:
    try:
        amps = np.asarray(data["amps_re"], float) + 1j * np.asarray(data["amps_im"], float)
        det = np.array(
            [np.asarray(re, float) + 1j * np.asarray(im, float) for re, im in data["detectors"]]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed detector configuration: {exc}") from exc
    return DetectorConfig(amps, det)


def roof_result_to_dict(result: RoofResult, dims: tuple[int, int]) -> dict:
    members = []
    for p, psi in result.ensemble:
        members.append(
            {
                "p": float(p),
                "re": psi.amps.real.tolist(),
                "im": psi.amps.imag.tolist(),
            }
        )
    return {
        "value": float(result.value),
        "dims": [int(dims[0]), int(dims[1])],
        "ensemble": members,
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
    }


def witness_to_dict(w: Witness) -> dict:
    return {
        "criterion": w.criterion,
        "description": w.description,
        "states": [
            {"re": np.asarray(s).real.reshape(-1).tolist(),
             "im": np.asarray(s).imag.reshape(-1).tolist(),
             "dim": int(np.asarray(s).shape[0])}
            for s in w.states
        ],
        "values": [float(v) for v in w.values],
        "violation": float(w.violation),
        "aux": w.aux,
    }


def criteria_report_to_dict(report: CriteriaReport) -> dict:
    return {
        "measure": report.measure,
        "kind": report.kind,
        "verdicts": dict(report.verdicts),
        "overall_pass": report.overall_pass,
        "witnesses": [witness_to_dict(w) for w in report.witnesses],
        "samples_used": dict(report.samples_used),
        "profile": dataclasses.asdict(report.profile),
        "seed": report.seed,
        "note": "pass means no violation found at this sample size",
    }


def dump_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
