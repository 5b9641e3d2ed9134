"""Separable decompositions and conditionally separable extensions.

A separable decomposition is a convex mixture of product states
``rho = sum_e w_e rho_x^e (x) rho_y^e``. Its extension places each term in
its own orthogonal sector of an auxiliary register:
``sigma = sum_e w_e |e><e| (x) rho_x^e (x) rho_y^e``. Extensions require
pairwise-distinct positive weights; ``dedegenerate_weights`` produces them
from any valid decomposition without changing the reconstructed state.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import DegenerateWeightsError, DimensionMismatchError, UsageError, WeightError
from .tensor import DensityMatrix, SubsystemDims, kron, validate_density

__all__ = [
    "ProductTerm",
    "SeparableDecomposition",
    "ExtensionState",
    "make_decomposition",
    "dedegenerate_weights",
    "build_extension",
    "random_density",
    "random_separable",
]


class ProductTerm(NamedTuple):
    weight: float
    x_factor: DensityMatrix
    y_factor: DensityMatrix


@dataclass(frozen=True, eq=False)
class SeparableDecomposition:
    terms: tuple  # of ProductTerm
    dims: tuple   # (d_x, d_y)

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms])

    def reconstruct(self) -> np.ndarray:
        """sum_e w_e rho_x^e (x) rho_y^e as a raw matrix."""
        dx, dy = self.dims
        out = np.zeros((dx * dy, dx * dy), dtype=complex)
        for w, fx, fy in self.terms:
            out += w * kron(fx.matrix, fy.matrix)
        return out


@dataclass(frozen=True, eq=False)
class ExtensionState:
    sigma: DensityMatrix
    basis_convention: str = "computational"


def _as_factor(obj, label: str, dim: Optional[int], tols: Tolerances) -> DensityMatrix:
    if isinstance(obj, DensityMatrix):
        dm = obj
    else:
        m = np.asarray(obj, dtype=complex)
        dm = validate_density(m, SubsystemDims((label,), (m.shape[0],)), tols)
    if dim is not None and dm.dim != dim:
        raise DimensionMismatchError(f"{label}-factor dimension {dm.dim} != {dim}")
    return dm


def make_decomposition(terms: Sequence, tols: Tolerances = DEFAULT_TOLS) -> SeparableDecomposition:
    """Validate (weight, x_factor, y_factor) triples into a decomposition.

    Zero-weight terms are dropped; negative weights and a weight sum away
    from 1 are errors.
    """
    terms = list(terms)
    if not terms:
        raise UsageError("a decomposition needs at least one term")
    weights = [float(t[0]) for t in terms]
    for w in weights:
        if w < 0:
            raise WeightError(f"negative weight {w!r}")
    total = sum(weights)
    if abs(total - 1.0) > tols.trace:
        raise WeightError(f"weights sum to {total!r}, expected 1 within {tols.trace:.1e}")
    dx = dy = None
    out = []
    for (w, fx, fy) in terms:
        if w == 0.0:
            continue
        x = _as_factor(fx, "x", dx, tols)
        y = _as_factor(fy, "y", dy, tols)
        dx, dy = x.dim, y.dim
        out.append(ProductTerm(float(w), x, y))
    if not out:
        raise WeightError("all terms have zero weight")
    return SeparableDecomposition(terms=tuple(out), dims=(dx, dy))


def _min_distance(value: float, others) -> float:
    return min((abs(value - o) for o in others), default=np.inf)


def _split_exact_duplicates(weights, factors):
    """Replace exact duplicate weights by (w/2 + eps, w/2 - eps) splits.

    eps = g/4 where g is the smallest positive pairwise gap of the weight
    multiset extended by w/2; halved until the new values collide with
    nothing. Each split strictly reduces the duplicate count, so the loop
    terminates.
    """
    while True:
        dup = None
        for j in range(1, len(weights)):
            if weights[j] in weights[:j]:
                dup = j
                break
        if dup is None:
            return weights, factors
        w = weights[dup]
        values = sorted(set(weights + [w / 2.0]))
        gaps = [b - a for a, b in zip(values, values[1:]) if b > a]
        eps = min(gaps) / 4.0
        rest = weights[:dup] + weights[dup + 1:]
        while _min_distance(w / 2.0 + eps, rest) == 0.0 or _min_distance(w / 2.0 - eps, rest) == 0.0:
            eps /= 2.0
        weights = weights[:dup] + [w / 2.0 + eps, w / 2.0 - eps] + weights[dup + 1:]
        factors = factors[:dup] + [factors[dup], factors[dup]] + factors[dup + 1:]


def _open_near_gaps(weights, factors, min_gap, max_splits):
    """Split members of near-degenerate weight pairs until gaps exceed min_gap.

    Splits are exact (w/2 + eps, w/2 - eps), so the reconstructed state never
    changes. Used before certification, where the verifier demands a clear
    eigenvalue gap on the auxiliary marginal. Gives up (returning the best
    effort) after ``max_splits`` splits; the verifier then reports the
    remaining degeneracy honestly.
    """
    splits = 0
    while splits < max_splits:
        order = sorted(range(len(weights)), key=lambda i: weights[i])
        worst = None
        for a, b in zip(order, order[1:]):
            gap = abs(weights[b] - weights[a])
            if gap <= min_gap and (worst is None or gap < worst[0]):
                worst = (gap, max(a, b))
        if worst is None:
            return weights, factors
        j = worst[1]
        w = weights[j]
        rest = weights[:j] + weights[j + 1:]
        eps = w / 8.0
        chosen = None
        while eps > 0.0:
            hi, lo = w / 2.0 + eps, w / 2.0 - eps
            if (
                2.0 * eps > min_gap
                and lo > min_gap
                and _min_distance(hi, rest) > min_gap
                and _min_distance(lo, rest) > min_gap
            ):
                chosen = eps
                break
            eps *= 0.7
            if eps < 1e-300:
                break
        if chosen is None:
            return weights, factors
        weights = weights[:j] + [w / 2.0 + chosen, w / 2.0 - chosen] + weights[j + 1:]
        factors = factors[:j] + [factors[j], factors[j]] + factors[j + 1:]
        splits += 1
    return weights, factors


def dedegenerate_weights(
    d: SeparableDecomposition,
    min_gap: float = 0.0,
    tols: Tolerances = DEFAULT_TOLS,
) -> SeparableDecomposition:
    """Return an equivalent decomposition with pairwise-distinct positive weights.

    Duplicate weights are replaced by exact (w/2 + eps, w/2 - eps) splits of
    the same factor pair, which leaves the reconstructed state untouched.
    With ``min_gap`` > 0, near-degenerate weights (gap <= min_gap) are split
    too, opening every pairwise gap beyond min_gap when possible.
    """
    weights = [t.weight for t in d.terms]
    factors = [(t.x_factor, t.y_factor) for t in d.terms]
    weights, factors = _split_exact_duplicates(weights, factors)
    if min_gap > 0.0:
        weights, factors = _open_near_gaps(weights, factors, min_gap, max_splits=4 * len(weights) + 16)
    terms = [ProductTerm(w, fx, fy) for w, (fx, fy) in zip(weights, factors)]
    return SeparableDecomposition(terms=tuple(terms), dims=d.dims)


def build_extension(d: SeparableDecomposition, tols: Tolerances = DEFAULT_TOLS) -> ExtensionState:
    """sigma = sum_e w_e |e><e| (x) rho_x^e (x) rho_y^e on subsystems (e, x, y).

    The auxiliary dimension equals the term count; weights must already be
    pairwise distinct and positive.
    """
    ws = [t.weight for t in d.terms]
    if len(set(ws)) != len(ws):
        raise DegenerateWeightsError(
            "duplicate weights; run dedegenerate_weights before build_extension"
        )
    if any(w <= 0 for w in ws):
        raise DegenerateWeightsError("weights must be strictly positive")
    dx, dy = d.dims
    k = len(d.terms)
    n = dx * dy
    sigma = np.zeros((k * n, k * n), dtype=complex)
    for e, (w, fx, fy) in enumerate(d.terms):
        sigma[e * n:(e + 1) * n, e * n:(e + 1) * n] = w * kron(fx.matrix, fy.matrix)
    dm = validate_density(sigma, SubsystemDims(("e", "x", "y"), (k, dx, dy)), tols)
    return ExtensionState(sigma=dm)


def _random_density_from_rng(rng, n: int, rank: int) -> np.ndarray:
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_density(
    dims: Sequence[int],
    rank: Optional[int] = None,
    seed: int = 0,
    labels: Optional[Sequence] = None,
    tols: Tolerances = DEFAULT_TOLS,
) -> DensityMatrix:
    """A seeded Ginibre-ensemble density matrix of the given rank.

    Default labels: ("x",), ("x", "y") or ("e", "x", "y") by arity.
    """
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    rank = n if rank is None else int(rank)
    if not 1 <= rank <= n:
        raise UsageError(f"rank must lie in [1, {n}], got {rank}")
    if labels is None:
        defaults = {1: ("x",), 2: ("x", "y"), 3: ("e", "x", "y")}
        labels = defaults.get(len(dims)) or tuple(f"q{i}" for i in range(len(dims)))
    rng = np.random.default_rng(seed)
    m = _random_density_from_rng(rng, n, rank)
    return validate_density(m, SubsystemDims(tuple(labels), dims), tols)


def random_separable(
    dims: Sequence[int],
    n_terms: int,
    seed: int = 0,
    factor_rank: int = 1,
    tols: Tolerances = DEFAULT_TOLS,
) -> SeparableDecomposition:
    """A seeded random decomposition: Dirichlet weights, Ginibre factors (pure by default)."""
    if n_terms < 1:
        raise UsageError(f"n_terms must be >= 1, got {n_terms}")
    dx, dy = (int(d) for d in dims)
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(n_terms))
    terms = []
    for k in range(n_terms):
        fx = _random_density_from_rng(rng, dx, min(factor_rank, dx))
        fy = _random_density_from_rng(rng, dy, min(factor_rank, dy))
        terms.append((float(weights[k]), fx, fy))
    return make_decomposition(terms, tols)
