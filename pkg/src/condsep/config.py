"""Numerical tolerances, tunable per call and overridable from the CLI."""

from dataclasses import dataclass, replace, asdict

from .errors import UsageError


@dataclass(frozen=True)
class Tolerances:
    """Every threshold used by the validators, the verifier and the search.

    Defaults sit roughly two orders of magnitude above double-precision
    eigensolver noise for dimensions up to ~64.
    """

    herm: float = 1e-10          # max |M - M^dag| for density inputs
    psd: float = 1e-9            # allowed eigenvalue negativity
    trace: float = 1e-9          # |tr - 1|
    recon: float = 1e-9          # eigendecomposition reconstruction residual
    log_cutoff: float = 1e-12    # eigenvalue floor for matrix logarithms/inverses
    eig_floor: float = 1e-12     # 0*log 0 floor for entropies and distributions
    cond1: float = 1e-8          # marginal residual ||rho - tr_e sigma||_F
    cond2: float = 1e-9          # |CMI| in bits
    cond3: float = 1e-9          # scaled commutator residual
    cond4_zero: float = 1e-10    # smallest admissible sigma_e eigenvalue
    cond4_gap: float = 1e-8      # smallest admissible sigma_e eigenvalue gap
    block: float = 1e-8          # off-block magnitude in the sigma_e eigenbasis
    extract: float = 1e-8        # extraction round-trip residual
    ppt: float = 1e-10           # partial-transpose negativity threshold

    def override(self, **kwargs: float) -> "Tolerances":
        unknown = set(kwargs) - set(asdict(self))
        if unknown:
            raise UsageError(f"unknown tolerance name(s): {sorted(unknown)}")
        return replace(self, **kwargs)


DEFAULT_TOLS = Tolerances()
