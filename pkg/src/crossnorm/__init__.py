"""crossnorm: certified brackets of the greatest cross norm on density
operators, the entanglement measures derived from it, and the operation
machinery (Kraus channels, projective measurements) needed to test their
monotonicity properties."""

from .channels import (
    KrausChannel,
    LudersOperation,
    MeasurementOutcome,
    apply_channel,
    apply_local,
    depolarizing_channel,
    dephasing_channel,
    effect_of,
    luders_outcomes,
    post_select,
    pushforward_decomposition,
    random_channel,
    random_luders,
    read_channel,
    read_luders,
    unitary_channel,
    validate_channel,
    validate_luders,
    write_channel,
    write_luders,
)
from .decompose import (
    OperatorSchmidt,
    RealignedMatrix,
    SchmidtDecomposition,
    operator_schmidt,
    realign,
    schmidt_decompose,
)
from .entropy import EntropyReport, relative_entropy, relative_entropy_upper, svn_entropy
from .errors import (
    CrossnormError,
    DegenerateBranchError,
    InternalError,
    InvalidChannelError,
    InvalidInputError,
    InvalidStateError,
    NumericalFailureError,
)
from .gamma import (
    GammaBracket,
    MeasureSpec,
    OptimizerConfig,
    UpperBound,
    gamma_bracket,
    gamma_bracket_multi,
    gamma_coeff,
    gamma_lower,
    gamma_lower_multi,
    gamma_pure,
    gamma_upper,
    gamma_upper_multi,
    measure_bracket,
    measure_value,
    multipartite_measure,
)
from .kernels import BACKEND as kernel_backend
from .states import (
    CoeffMatrix,
    DensityOperator,
    PureState,
    embed_state,
    make_state,
    random_density,
    read_state,
    validate_density,
    validate_pure,
    write_state,
)
from .verify import PROPERTY_IDS, PropertyReport, run_suite
from .witness import (
    TensorDecomposition,
    mix_decompositions,
    read_witness,
    tensor_decomposition,
    write_witness,
)

__version__ = "0.1.0"
