"""Numerical operator theory on truncated Hardy spaces of the polydisc.

The package builds finite monomial-basis models of H^2(D^n), realizes
shifts, multipliers, Szego kernels and truncated inner functions on them,
and verifies the structure of shift-invariant subspaces numerically:
wandering subspaces and Wold tilings, commutant symbol expansions,
factorization of doubly commuting mixed invariant subspaces, and
defect-operator dilations.  Every verification routine reports the
residuals it measured against explicit tolerances.
"""

__version__ = "0.1.0"

from .errors import (
    DegreeOverflow,
    DomainError,
    GridMismatch,
    NumericError,
    PolyhardyError,
    PrereqFailed,
    StructureViolation,
    Unsupported,
)
from .grid import GridSplit, TruncationGrid, embed, matricize, unmatricize
from .numkernel import (
    OperatorMatrix,
    RankDecision,
    commutator_norms,
    hermitian_sqrt,
    operator_norm,
    orthonormalize,
)
from .hardy import (
    Blaschke1D,
    HardyElement,
    InnerFunction,
    KernelPoint,
    Monomial,
    RawSeries,
    TensorProduct,
    autocorrelation,
    backward_shift,
    backward_within,
    blaschke_coeffs,
    blaschke_tail_estimate,
    evaluate,
    from_tensor,
    hardy_inner,
    inner_blaschke,
    inner_check,
    inner_monomial,
    inner_raw,
    inner_tensor,
    monomial,
    monomial_shift,
    multiplier,
    multiplier_within,
    multiply,
    regroup,
    shift,
    shift_within,
    support_degrees,
    szego_kernel,
    ungroup,
    zero_element,
)
from .subspace import (
    ClassifyReport,
    CompressedTuple,
    DCReport,
    Subspace,
    WoldReport,
    beurling_subspace,
    classify,
    compress,
    compressed_tuple,
    dc_report,
    model_space,
    span_closure,
    subspace_from_columns,
    wandering,
    wold_verify,
)
from .theorems import (
    DilationReport,
    Factorization,
    FullAtTruncation,
    ModelFactor,
    PhiSymbol,
    SymbolSeries,
    UnitWanderingData,
    UnitWanderingReport,
    cluster_points,
    commutant_symbol,
    defect_and_dilate,
    factorize_mixed,
    kernel_product_subspace,
    normalize_unimodular,
    range_classify,
    scalar_detect,
    theta_fourier,
    unit_wandering_subspace,
    verify_forward,
)
