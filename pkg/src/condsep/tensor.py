"""Complex matrix algebra on labeled tensor-product spaces.

Operators live on an ordered list of labeled subsystems. For tripartite
operators the order is fixed as (e, x, y) with row-major flattening
``index = e*(d_x*d_y) + x*d_y + y``; everything downstream relies on that
layout. All functions are pure and all values immutable after construction.
"""

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    DimensionMismatchError,
    HermiticityError,
    LabelError,
    PositivityError,
    SingularMatrixError,
    TraceError,
    UsageError,
)

__all__ = [
    "SubsystemDims",
    "DensityMatrix",
    "EigenDecomposition",
    "kron",
    "partial_trace",
    "hermitian_eig",
    "matrix_log",
    "matrix_exp",
    "validate_density",
    "lift",
    "frobenius",
]


@dataclass(frozen=True)
class SubsystemDims:
    """Ordered subsystem labels with their dimensions."""

    labels: tuple
    dims: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)
        if len(labels) != len(dims):
            raise LabelError("labels and dims must have equal length")
        if len(set(labels)) != len(labels):
            raise LabelError(f"subsystem labels must be distinct, got {labels}")
        if any(d < 1 for d in dims):
            raise DimensionMismatchError(f"dimensions must be positive, got {dims}")

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def dim_of(self, label) -> int:
        return self.dims[self.labels.index(label)]

    def subset(self, keep: Iterable) -> "SubsystemDims":
        keep = set(keep)
        pairs = [(l, d) for l, d in zip(self.labels, self.dims) if l in keep]
        return SubsystemDims(tuple(l for l, _ in pairs), tuple(d for _, d in pairs))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix: Hermitian, PSD and unit trace within tolerance."""

    matrix: np.ndarray
    dims: SubsystemDims
    hermiticity_residual: float
    min_eigenvalue: float
    trace_deviation: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray   # real, descending
    eigenvectors: np.ndarray  # orthonormal columns, same order


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; row-major, left factor major."""
    return np.kron(a, b)


def _hermiticity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def validate_density(
    m: np.ndarray,
    dims: SubsystemDims,
    tols: Tolerances = DEFAULT_TOLS,
) -> DensityMatrix:
    """Gatekeeper for density matrices; raises a named error per violated invariant."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] != dims.total:
        raise DimensionMismatchError(
            f"matrix dimension {m.shape[0]} != product of subsystem dims {dims.total}"
        )
    herm = _hermiticity_residual(m)
    if herm > tols.herm:
        raise HermiticityError(herm)
    trace_dev = float(abs(np.trace(m).real - 1.0) + abs(np.trace(m).imag))
    if trace_dev > tols.trace:
        raise TraceError(trace_dev)
    min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0)[0])
    if min_eig < -tols.psd:
        raise PositivityError(min_eig)
    return DensityMatrix(
        matrix=m,
        dims=dims,
        hermiticity_residual=herm,
        min_eigenvalue=min_eig,
        trace_deviation=trace_dev,
    )


def _partial_trace_raw(mat: np.ndarray, dims: Sequence[int], keep_idx: Sequence[int]) -> np.ndarray:
    n = len(dims)
    t = mat.reshape(tuple(dims) * 2)
    drop = [i for i in range(n) if i not in keep_idx]
    # trace out dropped axes from the back so earlier axis numbers stay valid
    for i in sorted(drop, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + (t.ndim // 2))
    d_keep = int(np.prod([dims[i] for i in keep_idx])) if keep_idx else 1
    return t.reshape(d_keep, d_keep)


def partial_trace(rho: DensityMatrix, keep: Iterable, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Trace out every subsystem not named in ``keep``; kept labels keep their order."""
    keep_set = set(keep)
    if not keep_set:
        raise UsageError("partial_trace requires a nonempty set of labels to keep")
    unknown = keep_set - set(rho.dims.labels)
    if unknown:
        raise LabelError(f"unknown subsystem label(s): {sorted(map(str, unknown))}")
    keep_idx = [i for i, l in enumerate(rho.dims.labels) if l in keep_set]
    if len(keep_idx) == len(rho.dims.labels):
        return rho
    out = _partial_trace_raw(rho.matrix, rho.dims.dims, keep_idx)
    return validate_density(out, rho.dims.subset(keep_set), tols)


def hermitian_eig(h: np.ndarray, tol_herm: float = DEFAULT_TOLS.herm) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    h = np.asarray(h, dtype=complex)
    herm = _hermiticity_residual(h)
    if herm > tol_herm:
        raise HermiticityError(herm)
    vals, vecs = np.linalg.eigh((h + h.conj().T) / 2.0)
    return EigenDecomposition(eigenvalues=vals[::-1].copy(), eigenvectors=vecs[:, ::-1].copy())


def matrix_log(h: np.ndarray, cutoff: float = DEFAULT_TOLS.log_cutoff) -> np.ndarray:
    """Natural-log of a Hermitian positive definite matrix via its eigenbasis."""
    eig = hermitian_eig(h)
    lam = eig.eigenvalues
    if lam[-1] <= cutoff:
        raise SingularMatrixError(
            f"matrix_log requires eigenvalues > {cutoff:.1e}, found {lam[-1]:.3e}"
        )
    v = eig.eigenvectors
    return (v * np.log(lam)) @ v.conj().T


def matrix_exp(h: np.ndarray) -> np.ndarray:
    """exp of a Hermitian matrix via the same eigendecomposition path as matrix_log."""
    eig = hermitian_eig(h)
    v = eig.eigenvectors
    return (v * np.exp(eig.eigenvalues)) @ v.conj().T


def lift(op: np.ndarray, op_labels: Sequence, full: SubsystemDims) -> np.ndarray:
    """Embed an operator on a subset of subsystems into the full space.

    Identity is tensored onto the missing factors and the axes are permuted
    into the full space's label order.
    """
    op_labels = tuple(op_labels)
    unknown = set(op_labels) - set(full.labels)
    if unknown:
        raise LabelError(f"unknown subsystem label(s): {sorted(map(str, unknown))}")
    missing = [l for l in full.labels if l not in op_labels]
    order = list(op_labels) + missing
    dims_by_label = dict(zip(full.labels, full.dims))
    d_missing = int(np.prod([dims_by_label[l] for l in missing])) if missing else 1
    big = np.kron(op, np.eye(d_missing, dtype=complex))
    if not missing and order == list(full.labels):
        return big
    order_dims = [dims_by_label[l] for l in order]
    perm = [order.index(l) for l in full.labels]
    n = len(order)
    t = big.reshape(tuple(order_dims) * 2)
    t = t.transpose(perm + [n + p for p in perm])
    return np.ascontiguousarray(t.reshape(full.total, full.total))
