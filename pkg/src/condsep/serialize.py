"""JSON wire formats for matrices, decompositions, distributions and reports.

Matrix documents: ``labels`` (string list), ``dims`` (int list) and
``entries`` (row-major [re, im] pairs of length (prod dims)^2). Floats are
emitted at full precision via the JSON encoder's shortest-round-trip repr.
"""

import json
from dataclasses import asdict

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .entropy import JointDistribution, make_distribution
from .errors import DimensionMismatchError, UsageError
from .search import SearchReport
from .states import SeparableDecomposition, make_decomposition
from .tensor import DensityMatrix, SubsystemDims, validate_density
from .theorem import Theorem1Certificate

__all__ = [
    "matrix_to_obj",
    "density_to_obj",
    "density_from_obj",
    "decomposition_to_obj",
    "decomposition_from_obj",
    "distribution_from_obj",
    "certificate_to_obj",
    "report_to_obj",
    "dumps",
]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def matrix_to_obj(matrix: np.ndarray, dims: SubsystemDims) -> dict:
    flat = np.asarray(matrix, dtype=complex).ravel()
    return {
        "labels": [str(l) for l in dims.labels],
        "dims": list(dims.dims),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def density_to_obj(dm: DensityMatrix) -> dict:
    return matrix_to_obj(dm.matrix, dm.dims)


def _matrix_from_obj(obj: dict):
    try:
        labels = tuple(obj["labels"])
        dims = tuple(int(d) for d in obj["dims"])
        entries = obj["entries"]
    except (KeyError, TypeError) as err:
        raise UsageError(f"malformed matrix document: {err}") from err
    sd = SubsystemDims(labels, dims)
    n = sd.total
    if len(entries) != n * n:
        raise DimensionMismatchError(f"expected {n * n} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(n, n), sd


def density_from_obj(obj: dict, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    matrix, sd = _matrix_from_obj(obj)
    return validate_density(matrix, sd, tols)


def decomposition_to_obj(d: SeparableDecomposition) -> dict:
    dx, dy = d.dims
    return {
        "dx": dx,
        "dy": dy,
        "terms": [
            {
                "weight": float(t.weight),
                "rho_x": density_to_obj(t.x_factor),
                "rho_y": density_to_obj(t.y_factor),
            }
            for t in d.terms
        ],
    }


def decomposition_from_obj(obj: dict, tols: Tolerances = DEFAULT_TOLS) -> SeparableDecomposition:
    try:
        dx, dy = int(obj["dx"]), int(obj["dy"])
        raw_terms = obj["terms"]
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError(f"malformed decomposition document: {err}") from err
    terms = []
    for t in raw_terms:
        terms.append(
            (
                float(t["weight"]),
                density_from_obj(t["rho_x"], tols),
                density_from_obj(t["rho_y"], tols),
            )
        )
    d = make_decomposition(terms, tols)
    if d.dims != (dx, dy):
        raise DimensionMismatchError(f"declared dims ({dx}, {dy}) != factor dims {d.dims}")
    return d


def distribution_from_obj(obj: dict, tols: Tolerances = DEFAULT_TOLS) -> JointDistribution:
    try:
        dims = tuple(int(d) for d in obj["dims"])
        probs = np.array([float(p) for p in obj["probs"]], dtype=float)
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError(f"malformed distribution document: {err}") from err
    if len(dims) != 3:
        raise UsageError(f"expected three dims (x, y, e), got {len(dims)}")
    if probs.size != int(np.prod(dims)):
        raise DimensionMismatchError(f"expected {int(np.prod(dims))} probabilities, got {probs.size}")
    return make_distribution(probs.reshape(dims), tols)


def tolerances_to_obj(tols: Tolerances) -> dict:
    return {k: float(v) for k, v in asdict(tols).items()}


def certificate_to_obj(cert: Theorem1Certificate) -> dict:
    return {
        "cond1_marginal_residual": cert.cond1_marginal_residual,
        "cond1_pass": cert.cond1_pass,
        "cond2_cmi_bits": cert.cond2_cmi,
        "cond2_pass": cert.cond2_pass,
        "cond3_commutator_residuals": list(cert.cond3_commutator_residuals),
        "cond3_pass": cert.cond3_pass,
        "cond4_min_eigenvalue": cert.cond4_min_eigenvalue,
        "cond4_eigenvalue_gap": cert.cond4_eigenvalue_gap,
        "cond4_pass": cert.cond4_pass,
        "overall_pass": cert.overall_pass,
        "tolerances": tolerances_to_obj(cert.tolerances),
    }


def config_to_obj(config) -> dict:
    obj = asdict(config)
    # execution detail, not part of the logical configuration: parallel and
    # serial runs must produce byte-identical documents
    obj.pop("workers", None)
    return obj


def report_to_obj(report: SearchReport, include_trace: bool = False) -> dict:
    obj = {
        "verdict": report.verdict,
        "residual": report.residual,
        "extension_cmi_bits": report.extension_cmi,
        "ppt_min_eigenvalue": report.ppt_min_eigenvalue,
        "seeds_used": [list(s) for s in report.seeds_used],
        "restart_residuals": list(report.restart_residuals),
        "best_decomposition": decomposition_to_obj(report.best) if report.best is not None else None,
        "certificate": certificate_to_obj(report.certificate) if report.certificate is not None else None,
        "config": config_to_obj(report.config),
    }
    if include_trace and report.traces is not None:
        obj["traces"] = [list(t) for t in report.traces]
    return obj
