"""Point interactions in one-dimensional quantum mechanics.

The four-parameter family of interactions at a single point, in three
equivalent parametrisations, with Schrodinger and Dirac solvers, parity
tools and zero-range limits of regularised potentials.
"""

from .core import (
    IDENTITY,
    BoundaryMatrix,
    LambdaParams,
    SeparatedParams,
    UnitaryParams,
    delta,
    delta_prime,
    lambda_matrix,
    lambda_to_unitary,
    params_from_dict,
    params_to_dict,
    unitary_to_interaction,
    validate,
)
from .dirac import (
    DiracLambdaParams,
    DiracSeparatedParams,
    dirac_bound_states,
    dirac_interaction_spinor,
    dirac_scatter,
    inverted_mix,
    mixed,
    to_nonrelativistic,
    u_reduction,
)
from .errors import (
    ConditioningWarning,
    ConstraintViolation,
    NumericalError,
    PointInteractionError,
    ValidationError,
)
from .parity import Parity, classify, odd_condition_check, odd_search, reflection_symmetry_test
from .regularization import (
    DeltaArray,
    SampledPotential,
    delta_array_transfer,
    limit_analysis,
    ode_transfer,
    transfer_scatter,
)
from .schrodinger import (
    BoundaryState,
    ScatteringResult,
    bound_states,
    interaction_coefficients,
    scatter,
)

__version__ = "0.1.0"
