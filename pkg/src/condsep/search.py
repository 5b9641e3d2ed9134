"""Separability evidence gathering: PPT oracle, extension search, classifier.

The search fits a K-term mixture of pure product states to a target by
alternating nonnegative least squares on the weights with dominant-eigenvector
updates of each factor against its conditional environment. A successful fit
is only ever certified after the corresponding extension passes the full
four-condition verifier; failure to certify is reported as inconclusive,
never as entanglement. Only the PPT oracle certifies entanglement.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import nnls

from . import kernels
from .config import DEFAULT_TOLS, Tolerances
from .errors import UsageError
from .states import (
    SeparableDecomposition,
    build_extension,
    dedegenerate_weights,
    make_decomposition,
)
from .tensor import DensityMatrix, frobenius, hermitian_eig
from .theorem import Theorem1Certificate, verify_extension

__all__ = [
    "SearchConfig",
    "SearchReport",
    "PptResult",
    "ppt_check",
    "search_extension",
    "classify",
    "SEPARABLE",
    "ENTANGLED",
    "INCONCLUSIVE",
]

SEPARABLE = "separable-certified"
ENTANGLED = "entangled-certified"
INCONCLUSIVE = "inconclusive"


class PptResult(NamedTuple):
    min_eigenvalue: float
    is_ppt: bool


def ppt_check(rho: DensityMatrix, tol_ppt: float = DEFAULT_TOLS.ppt) -> PptResult:
    """Minimum eigenvalue of the partial transpose on the y factor."""
    if len(rho.dims.dims) != 2:
        raise UsageError(f"ppt_check expects a bipartite state, got {len(rho.dims.dims)} subsystems")
    dx, dy = rho.dims.dims
    pt = kernels.partial_transpose_y(np.ascontiguousarray(rho.matrix), dx, dy)
    min_eig = float(hermitian_eig(pt).eigenvalues[-1])
    return PptResult(min_eigenvalue=min_eig, is_ppt=min_eig >= -tol_ppt)


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the random-restart alternating optimizer.

    ``n_terms`` defaults to (d_x*d_y)^2, enough terms for any separable state.
    Restart r draws its randomness from the stream seeded by (seed, r), so
    serial and parallel executions agree bit for bit.
    """

    n_terms: Optional[int] = None
    restarts: int = 8
    max_iters: int = 500
    seed: int = 0
    residual_target: float = 1e-7
    improvement_tol: float = 1e-12
    workers: int = 1
    keep_trace: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise UsageError("restarts must be >= 1")
        if self.n_terms is not None and self.n_terms < 1:
            raise UsageError("n_terms must be >= 1")


@dataclass(frozen=True, eq=False)
class SearchReport:
    verdict: str
    residual: Optional[float]
    best: Optional[SeparableDecomposition]
    extension_cmi: Optional[float]
    ppt_min_eigenvalue: float
    certificate: Optional[Theorem1Certificate]
    seeds_used: tuple          # (master_seed, restart_index) pairs
    restart_residuals: tuple   # best residual per restart
    traces: Optional[tuple]    # per-restart residual traces when requested
    config: SearchConfig


def _random_unit_rows(rng, k: int, d: int) -> np.ndarray:
    v = rng.standard_normal((k, d)) + 1j * rng.standard_normal((k, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _fit_weights(rho_mat, xs, ys, k):
    gram = kernels.product_gram(xs, ys)
    overlaps = kernels.product_overlaps(rho_mat, xs, ys)
    w, _ = nnls(gram, overlaps)
    total = w.sum()
    if total <= 0.0:
        return np.full(k, 1.0 / k)
    return w / total


def _top_vector(env: np.ndarray, current: np.ndarray) -> np.ndarray:
    # dominant eigenvector of the conditional environment; the converged
    # limit of shifted power iteration, exact here since dims are tiny
    eig = hermitian_eig((env + env.conj().T) / 2.0)
    top = eig.eigenvectors[:, 0]
    if np.linalg.norm(top) < 1e-14:
        return current
    return top / np.linalg.norm(top)


def _run_restart(rho_mat, dx, dy, k, master_seed, restart, max_iters, improvement_tol, keep_trace):
    rng = np.random.default_rng([master_seed, restart])
    xs = _random_unit_rows(rng, k, dx)
    ys = _random_unit_rows(rng, k, dy)
    best = (np.inf, None, None, None)
    trace = [] if keep_trace else None
    prev = np.inf
    for _ in range(max_iters):
        w = _fit_weights(rho_mat, xs, ys, k)
        mix = kernels.assemble_mixture(w, xs, ys)
        for j in range(k):
            v = np.kron(xs[j], ys[j])
            mix_others = mix - w[j] * np.outer(v, v.conj())
            resid_op = rho_mat - mix_others
            xs[j] = _top_vector(kernels.env_x(resid_op, ys[j], dx, dy), xs[j])
            ys[j] = _top_vector(kernels.env_y(resid_op, xs[j], dx, dy), ys[j])
            v = np.kron(xs[j], ys[j])
            mix = mix_others + w[j] * np.outer(v, v.conj())
        residual = frobenius(rho_mat - mix)
        if trace is not None:
            trace.append(residual)
        if residual < best[0]:
            best = (residual, w.copy(), xs.copy(), ys.copy())
        if prev - residual < improvement_tol:
            break
        prev = residual
    return best, (tuple(trace) if trace is not None else None)


def _decomposition_from_snapshot(w, xs, ys, weight_floor, tols):
    keep = w > weight_floor
    w = w[keep] / w[keep].sum()
    terms = []
    for weight, p, q in zip(w, xs[keep], ys[keep]):
        terms.append((float(weight), np.outer(p, p.conj()), np.outer(q, q.conj())))
    return make_decomposition(terms, tols)


def search_extension(
    rho: DensityMatrix,
    config: SearchConfig = SearchConfig(),
    tols: Tolerances = DEFAULT_TOLS,
) -> SearchReport:
    """Random-restart search for a separable decomposition of ``rho``.

    Always returns a report; the verdict follows the certification rules
    (verified decomposition -> separable, PPT violation -> entangled,
    anything else -> inconclusive).
    """
    if len(rho.dims.dims) != 2:
        raise UsageError(f"search expects a bipartite state, got {len(rho.dims.dims)} subsystems")
    dx, dy = rho.dims.dims
    k = config.n_terms if config.n_terms is not None else (dx * dy) ** 2
    rho_mat = np.ascontiguousarray(rho.matrix)

    args = [
        (rho_mat, dx, dy, k, config.seed, r, config.max_iters, config.improvement_tol, config.keep_trace)
        for r in range(config.restarts)
    ]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda a: _run_restart(*a), args))
    else:
        results = [_run_restart(*a) for a in args]

    restart_residuals = tuple(res[0][0] for res in results)
    # deterministic fold: ties between equal residuals go to the lower index
    best_index = min(range(config.restarts), key=lambda r: (restart_residuals[r], r))
    best_residual, w, xs, ys = results[best_index][0]
    traces = tuple(res[1] for res in results) if config.keep_trace else None

    ppt = ppt_check(rho, tols.ppt)
    decomposition = None
    certificate = None
    extension_cmi = None
    verdict = INCONCLUSIVE
    if not ppt.is_ppt:
        verdict = ENTANGLED
    elif best_residual <= config.residual_target and w is not None:
        decomposition = _decomposition_from_snapshot(w, xs, ys, 10.0 * tols.cond4_zero, tols)
        distinct = dedegenerate_weights(decomposition, min_gap=100.0 * tols.cond4_gap, tols=tols)
        extension = build_extension(distinct, tols)
        verify_tols = tols.override(cond1=max(tols.cond1, config.residual_target))
        certificate = verify_extension(rho, extension, verify_tols)
        extension_cmi = certificate.cond2_cmi
        if certificate.overall_pass:
            verdict = SEPARABLE

    return SearchReport(
        verdict=verdict,
        residual=float(best_residual),
        best=decomposition,
        extension_cmi=extension_cmi,
        ppt_min_eigenvalue=ppt.min_eigenvalue,
        certificate=certificate,
        seeds_used=tuple((config.seed, r) for r in range(config.restarts)),
        restart_residuals=restart_residuals,
        traces=traces,
        config=config,
    )


def classify(
    rho: DensityMatrix,
    config: SearchConfig = SearchConfig(),
    tols: Tolerances = DEFAULT_TOLS,
) -> SearchReport:
    """PPT first (cheap entanglement certificate); search only when PPT holds.

    An inconclusive verdict with PPT positive is exactly the regime where
    bound entanglement and insufficient search are indistinguishable.
    """
    ppt = ppt_check(rho, tols.ppt)
    if not ppt.is_ppt:
        return SearchReport(
            verdict=ENTANGLED,
            residual=None,
            best=None,
            extension_cmi=None,
            ppt_min_eigenvalue=ppt.min_eigenvalue,
            certificate=None,
            seeds_used=(),
            restart_residuals=(),
            traces=None,
            config=config,
        )
    return search_extension(rho, config, tols)
