"""condsep: separability certification for bipartite density matrices.

Builds, verifies and inverts conditionally separable extensions with zero
conditional mutual information, backed by a PPT entanglement oracle and a
seeded random-restart search.
"""

__version__ = "0.1.0"

from .config import DEFAULT_TOLS, Tolerances
from .entropy import (
    EntropyReport,
    JointDistribution,
    classical_cmi,
    diagonal_as_distribution,
    make_distribution,
    quantum_cmi,
    saturation_residual,
    von_neumann_entropy,
)
from .errors import (
    BlockStructureError,
    CondsepError,
    DegenerateWeightsError,
    DimensionMismatchError,
    ExtractionError,
    HermiticityError,
    LabelError,
    NumericalError,
    PositivityError,
    SingularMatrixError,
    TraceError,
    UsageError,
    ValidationError,
    WeightError,
)
from .kernels import BACKEND, NUMBA_ENABLED
from .search import (
    ENTANGLED,
    INCONCLUSIVE,
    SEPARABLE,
    PptResult,
    SearchConfig,
    SearchReport,
    classify,
    ppt_check,
    search_extension,
)
from .states import (
    ExtensionState,
    ProductTerm,
    SeparableDecomposition,
    build_extension,
    dedegenerate_weights,
    make_decomposition,
    random_density,
    random_separable,
)
from .tensor import (
    DensityMatrix,
    EigenDecomposition,
    SubsystemDims,
    hermitian_eig,
    kron,
    lift,
    matrix_exp,
    matrix_log,
    partial_trace,
    validate_density,
)
from .theorem import (
    BlockDiagonalForm,
    ExtractionResult,
    Theorem1Certificate,
    extract_decomposition,
    reconstruct_sigma,
    verify_extension,
)
