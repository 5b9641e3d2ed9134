"""Von Neumann entropy, quantum and classical CMI, and the SSA saturation residual.

All entropies are reported in bits. Internally matrix logarithms are natural;
the 1/ln 2 conversion happens here, at the reporting boundary.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import DEFAULT_TOLS, Tolerances
from .errors import SingularMatrixError, UsageError, ValidationError
from .tensor import (
    DensityMatrix,
    SubsystemDims,
    frobenius,
    hermitian_eig,
    lift,
    matrix_log,
    partial_trace,
)

__all__ = [
    "JointDistribution",
    "EntropyReport",
    "make_distribution",
    "von_neumann_entropy",
    "quantum_cmi",
    "classical_cmi",
    "saturation_residual",
    "diagonal_as_distribution",
]

TRIPARTITE_LABELS = ("e", "x", "y")


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """A joint distribution P(x, y, e), stored as a (d_x, d_y, d_e) array."""

    probs: np.ndarray
    dims: tuple


def make_distribution(probs: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> JointDistribution:
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 3:
        raise UsageError(f"expected a rank-3 probability array, got rank {probs.ndim}")
    if np.any(probs < 0):
        raise ValidationError(f"negative probability: min entry = {probs.min():.3e}")
    dev = abs(float(probs.sum()) - 1.0)
    if dev > tols.trace:
        raise ValidationError(f"probabilities sum to 1 within {tols.trace:.1e}; deviation {dev:.3e}")
    return JointDistribution(probs=probs, dims=probs.shape)


@dataclass(frozen=True)
class EntropyReport:
    """The four marginal entropies (bits) entering the CMI, and their combination."""

    s_xe: float
    s_ye: float
    s_xye: float
    s_e: float
    cmi: float


def von_neumann_entropy(rho: DensityMatrix, eig_floor: float = DEFAULT_TOLS.eig_floor) -> float:
    """-sum lambda log2 lambda over the spectrum; terms below ``eig_floor`` contribute 0."""
    lam = np.linalg.eigvalsh((rho.matrix + rho.matrix.conj().T) / 2.0)
    lam = lam[lam > eig_floor]
    return float(-np.sum(lam * np.log2(lam))) if lam.size else 0.0


def quantum_cmi(sigma: DensityMatrix, tols: Tolerances = DEFAULT_TOLS) -> EntropyReport:
    """S(x,e) + S(y,e) - S(x,y,e) - S(e) for a state labeled exactly (e, x, y)."""
    if sigma.dims.labels != TRIPARTITE_LABELS:
        raise UsageError(
            f"quantum_cmi expects subsystems labeled {TRIPARTITE_LABELS}, got {sigma.dims.labels}"
        )
    s_xe = von_neumann_entropy(partial_trace(sigma, ("e", "x"), tols), tols.eig_floor)
    s_ye = von_neumann_entropy(partial_trace(sigma, ("e", "y"), tols), tols.eig_floor)
    s_e = von_neumann_entropy(partial_trace(sigma, ("e",), tols), tols.eig_floor)
    s_xye = von_neumann_entropy(sigma, tols.eig_floor)
    return EntropyReport(s_xe=s_xe, s_ye=s_ye, s_xye=s_xye, s_e=s_e, cmi=s_xe + s_ye - s_xye - s_e)


def classical_cmi(p: JointDistribution, eig_floor: float = DEFAULT_TOLS.eig_floor) -> float:
    """Classical CMI in bits; terms with P(x,y,e) <= ``eig_floor`` contribute 0."""
    return float(kernels.classical_cmi_bits(np.ascontiguousarray(p.probs), eig_floor))


def saturation_residual(
    sigma: DensityMatrix,
    cutoff: float = DEFAULT_TOLS.log_cutoff,
    tols: Tolerances = DEFAULT_TOLS,
) -> float:
    """Frobenius norm of log sigma - log sigma_xe - log sigma_ye + log sigma_e.

    Each marginal logarithm is lifted to the full (e, x, y) space by tensoring
    identity onto its missing factor. Requires sigma and all three marginals to
    be full rank above ``cutoff``.
    """
    if sigma.dims.labels != TRIPARTITE_LABELS:
        raise UsageError(
            f"saturation_residual expects subsystems labeled {TRIPARTITE_LABELS},"
            f" got {sigma.dims.labels}"
        )
    full = sigma.dims
    logs = {}
    for name, keep in (("sigma", None), ("sigma_xe", ("e", "x")), ("sigma_ye", ("e", "y")), ("sigma_e", ("e",))):
        mat = sigma.matrix if keep is None else partial_trace(sigma, keep, tols).matrix
        try:
            log = matrix_log(mat, cutoff)
        except SingularMatrixError as err:
            raise SingularMatrixError(f"{name} is rank deficient: {err}") from err
        logs[name] = log if keep is None else lift(log, keep, full)
    return frobenius(logs["sigma"] - logs["sigma_xe"] - logs["sigma_ye"] + logs["sigma_e"])


def diagonal_as_distribution(sigma: DensityMatrix, tols: Tolerances = DEFAULT_TOLS) -> JointDistribution:
    """The computational-basis diagonal of a (e, x, y) state as P(x, y, e)."""
    if sigma.dims.labels != TRIPARTITE_LABELS:
        raise UsageError(f"expected subsystems labeled {TRIPARTITE_LABELS}, got {sigma.dims.labels}")
    de, dx, dy = sigma.dims.dims
    diag = np.real(np.diag(sigma.matrix)).reshape(de, dx, dy)
    return make_distribution(np.clip(diag.transpose(1, 2, 0), 0.0, None), tols)
