"""Verification and inversion of conditionally separable extensions.

``verify_extension`` checks the four conditions that make a tripartite
extension certify separability of its (x, y) marginal:

1. the extension reproduces the target state after tracing out e,
2. the conditional mutual information (x : y | e) vanishes,
3. the three marginals sigma_xe, sigma_ye, sigma_e commute pairwise,
4. sigma_e has non-zero, non-degenerate eigenvalues.

``extract_decomposition`` runs the converse: it rotates into the sigma_e
eigenbasis, reads off the per-sector blocks of sigma_xe and sigma_ye, and
returns the separable decomposition they encode.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .entropy import quantum_cmi
from .errors import (
    BlockStructureError,
    DegenerateWeightsError,
    DimensionMismatchError,
    ExtractionError,
    SingularMatrixError,
    UsageError,
)
from .states import ExtensionState, ProductTerm, SeparableDecomposition
from .tensor import (
    DensityMatrix,
    SubsystemDims,
    frobenius,
    hermitian_eig,
    kron,
    lift,
    partial_trace,
    validate_density,
)

__all__ = [
    "Theorem1Certificate",
    "BlockDiagonalForm",
    "ExtractionResult",
    "verify_extension",
    "extract_decomposition",
    "reconstruct_sigma",
]

COMMUTATOR_PAIRS = (("sigma_xe", "sigma_ye"), ("sigma_xe", "sigma_e"), ("sigma_ye", "sigma_e"))


@dataclass(frozen=True)
class Theorem1Certificate:
    cond1_marginal_residual: float
    cond1_pass: bool
    cond2_cmi: float
    cond2_pass: bool
    cond3_commutator_residuals: tuple  # pairs (xe,ye), (xe,e), (ye,e)
    cond3_pass: bool
    cond4_min_eigenvalue: float
    cond4_eigenvalue_gap: float
    cond4_pass: bool
    overall_pass: bool
    tolerances: Tolerances


@dataclass(frozen=True, eq=False)
class BlockDiagonalForm:
    """Per-sector blocks of sigma_xe and sigma_ye in the sigma_e eigenbasis."""

    x_blocks: tuple  # d_e blocks, each d_x x d_x
    y_blocks: tuple  # d_e blocks, each d_y x d_y
    off_block_residual: float


@dataclass(frozen=True, eq=False)
class ExtractionResult:
    decomposition: SeparableDecomposition
    e_basis: np.ndarray        # columns: sigma_e eigenvectors, weight-descending
    blocks: BlockDiagonalForm
    rebuild_residual: float    # ||sigma - sum_e w_e |u_e><u_e| (x) rho_x^e (x) rho_y^e||_F
    clip_magnitude: float      # largest negative factor eigenvalue clipped to zero


def _eigenvalue_gap(values: np.ndarray) -> float:
    if values.size < 2:
        return float("inf")
    s = np.sort(values)
    return float(np.min(np.diff(s)))


def _commutator_residuals(lifted):
    out = []
    for a_name, b_name in COMMUTATOR_PAIRS:
        a, b = lifted[a_name], lifted[b_name]
        res = frobenius(a @ b - b @ a)
        scale = 1.0 + frobenius(a) * frobenius(b)
        out.append((res, scale))
    return out


def verify_extension(
    rho: DensityMatrix,
    sigma: ExtensionState,
    tols: Tolerances = DEFAULT_TOLS,
) -> Theorem1Certificate:
    """Evaluate all four conditions; every residual is reported even after a failure."""
    sm = sigma.sigma
    if sm.dims.labels != ("e", "x", "y"):
        raise UsageError(f"extension must be labeled ('e','x','y'), got {sm.dims.labels}")
    if rho.dims.dims != sm.dims.dims[1:]:
        raise DimensionMismatchError(
            f"rho dims {rho.dims.dims} != extension (x, y) dims {sm.dims.dims[1:]}"
        )

    marginal = partial_trace(sm, ("x", "y"), tols)
    cond1 = frobenius(rho.matrix - marginal.matrix)

    cond2 = quantum_cmi(sm, tols).cmi

    marginals = {
        "sigma_xe": partial_trace(sm, ("e", "x"), tols),
        "sigma_ye": partial_trace(sm, ("e", "y"), tols),
        "sigma_e": partial_trace(sm, ("e",), tols),
    }
    lifted = {name: lift(dm.matrix, dm.dims.labels, sm.dims) for name, dm in marginals.items()}
    comms = _commutator_residuals(lifted)
    cond3_res = tuple(res for res, _ in comms)
    cond3_ok = all(res <= tols.cond3 * scale for res, scale in comms)

    w = hermitian_eig(marginals["sigma_e"].matrix).eigenvalues
    cond4_min = float(w[-1])
    cond4_gap = _eigenvalue_gap(w)

    c1 = cond1 <= tols.cond1
    c2 = abs(cond2) <= tols.cond2
    c4 = cond4_min > tols.cond4_zero and cond4_gap > tols.cond4_gap
    return Theorem1Certificate(
        cond1_marginal_residual=cond1,
        cond1_pass=c1,
        cond2_cmi=cond2,
        cond2_pass=c2,
        cond3_commutator_residuals=cond3_res,
        cond3_pass=cond3_ok,
        cond4_min_eigenvalue=cond4_min,
        cond4_eigenvalue_gap=cond4_gap,
        cond4_pass=c4,
        overall_pass=c1 and c2 and cond3_ok and c4,
        tolerances=tols,
    )


def _clip_factor(block: np.ndarray, label: str, tols: Tolerances):
    """Symmetrize a candidate factor, clip tiny eigenvalue negativity, renormalize."""
    h = (block + block.conj().T) / 2.0
    eig = hermitian_eig(h)
    lam = eig.eigenvalues
    clip = float(max(0.0, -lam[-1]))
    if clip > tols.psd:
        raise ExtractionError(
            f"extracted {label}-factor has eigenvalue {-clip:.3e} below -{tols.psd:.1e}"
        )
    lam = np.clip(lam, 0.0, None)
    v = eig.eigenvectors
    m = (v * lam) @ v.conj().T
    tr = np.trace(m).real
    if tr <= 0:
        raise ExtractionError(f"extracted {label}-factor has non-positive trace {tr:.3e}")
    return m / tr, clip


def extract_decomposition(
    sigma: ExtensionState,
    tols: Tolerances = DEFAULT_TOLS,
) -> ExtractionResult:
    """Invert a verified extension into its separable decomposition.

    Preconditions (checked numerically along the way): sigma_e eigenvalues
    are positive and well separated, and sigma_xe / sigma_ye are block
    diagonal in the sigma_e eigenbasis.
    """
    sm = sigma.sigma
    if sm.dims.labels != ("e", "x", "y"):
        raise UsageError(f"extension must be labeled ('e','x','y'), got {sm.dims.labels}")
    de, dx, dy = sm.dims.dims

    eig = hermitian_eig(partial_trace(sm, ("e",), tols).matrix)
    w = eig.eigenvalues
    if w[-1] <= tols.cond4_zero:
        raise SingularMatrixError(
            f"sigma_e has eigenvalue {w[-1]:.3e} <= {tols.cond4_zero:.1e}"
        )
    gap = _eigenvalue_gap(w)
    if gap <= tols.cond4_gap:
        raise DegenerateWeightsError(
            f"sigma_e eigenvalue gap {gap:.3e} <= {tols.cond4_gap:.1e} (condition 4)"
        )

    u = eig.eigenvectors
    rot = kron(u.conj().T, np.eye(dx * dy, dtype=complex))
    sigma_rot = rot @ sm.matrix @ rot.conj().T
    rot_dm = DensityMatrix(
        matrix=sigma_rot,
        dims=sm.dims,
        hermiticity_residual=sm.hermiticity_residual,
        min_eigenvalue=sm.min_eigenvalue,
        trace_deviation=sm.trace_deviation,
    )

    def _sector_blocks(keep, d):
        marg = partial_trace(rot_dm, keep, tols).matrix.reshape(de, d, de, d)
        off_part = marg.copy()
        for e in range(de):
            off_part[e, :, e, :] = 0.0
        return [marg[e, :, e, :] for e in range(de)], float(np.max(np.abs(off_part)))

    x_blocks, off_x = _sector_blocks(("e", "x"), dx)
    y_blocks, off_y = _sector_blocks(("e", "y"), dy)
    off = max(off_x, off_y)
    if off > tols.block:
        raise BlockStructureError(
            f"off-block residual {off:.3e} > {tols.block:.1e}: marginals are not"
            " diagonal in the sigma_e eigenbasis (conditions 3/4 numerically inconsistent)"
        )

    terms = []
    clip_max = 0.0
    rebuilt = np.zeros_like(sm.matrix)
    relaxed = tols.override(herm=max(tols.herm, tols.block), trace=max(tols.trace, tols.extract))
    for e in range(de):
        fx, clip_x = _clip_factor(x_blocks[e] / w[e], "x", tols)
        fy, clip_y = _clip_factor(y_blocks[e] / w[e], "y", tols)
        clip_max = max(clip_max, clip_x, clip_y)
        x_dm = validate_density(fx, SubsystemDims(("x",), (dx,)), relaxed)
        y_dm = validate_density(fy, SubsystemDims(("y",), (dy,)), relaxed)
        terms.append(ProductTerm(float(w[e]), x_dm, y_dm))
        proj = np.outer(u[:, e], u[:, e].conj())
        rebuilt += w[e] * kron(proj, kron(fx, fy))

    rebuild_residual = frobenius(rebuilt - sm.matrix)
    if rebuild_residual > tols.extract:
        raise ExtractionError(
            f"extraction rebuild residual {rebuild_residual:.3e} > {tols.extract:.1e}"
        )
    decomp = SeparableDecomposition(terms=tuple(terms), dims=(dx, dy))
    return ExtractionResult(
        decomposition=decomp,
        e_basis=u,
        blocks=BlockDiagonalForm(tuple(x_blocks), tuple(y_blocks), off),
        rebuild_residual=rebuild_residual,
        clip_magnitude=clip_max,
    )


def reconstruct_sigma(
    sigma_xe: DensityMatrix,
    sigma_ye: DensityMatrix,
    sigma_e: DensityMatrix,
    cutoff: float = DEFAULT_TOLS.log_cutoff,
    tols: Tolerances = DEFAULT_TOLS,
) -> DensityMatrix:
    """sigma = sigma_ye sigma_xe (sigma_e)^-1, all lifted to the (e, x, y) space.

    Valid whenever the three lifted operators commute pairwise and sigma_e is
    invertible above ``cutoff``; the product is validated as a density matrix.
    """
    if sigma_xe.dims.labels != ("e", "x") or sigma_ye.dims.labels != ("e", "y") or sigma_e.dims.labels != ("e",):
        raise UsageError(
            "expected marginals labeled ('e','x'), ('e','y') and ('e',), got "
            f"{sigma_xe.dims.labels}, {sigma_ye.dims.labels}, {sigma_e.dims.labels}"
        )
    de = sigma_e.dims.dims[0]
    if sigma_xe.dims.dims[0] != de or sigma_ye.dims.dims[0] != de:
        raise DimensionMismatchError("inconsistent auxiliary dimension across marginals")
    dx = sigma_xe.dims.dims[1]
    dy = sigma_ye.dims.dims[1]
    full = SubsystemDims(("e", "x", "y"), (de, dx, dy))

    eig = hermitian_eig(sigma_e.matrix)
    if eig.eigenvalues[-1] <= cutoff:
        raise SingularMatrixError(
            f"sigma_e has eigenvalue {eig.eigenvalues[-1]:.3e} <= cutoff {cutoff:.1e}"
        )
    v = eig.eigenvectors
    inv_e = (v / eig.eigenvalues) @ v.conj().T

    lifted = {
        "sigma_xe": lift(sigma_xe.matrix, ("e", "x"), full),
        "sigma_ye": lift(sigma_ye.matrix, ("e", "y"), full),
        "sigma_e": lift(sigma_e.matrix, ("e",), full),
    }
    for (res, scale) in _commutator_residuals(lifted):
        if res > tols.cond3 * scale:
            raise UsageError(
                f"lifted marginals do not commute: residual {res:.3e} > {tols.cond3 * scale:.3e}"
            )
    inv_lifted = lift(inv_e, ("e",), full)
    product = lifted["sigma_ye"] @ lifted["sigma_xe"] @ inv_lifted
    product = (product + product.conj().T) / 2.0
    return validate_density(product, full, tols)
