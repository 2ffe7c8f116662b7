"""Metric-Jordan canonical forms of self-adjoint operators on real scalar product spaces."""
from .canonicalize import (
    CanonicalForm,
    CycleTuple,
    Decomposition,
    adapt_cycle,
    canonical_metric,
    canonical_operator,
    decompose,
    find_generator,
    realify_cycle,
)
from .errors import (
    DegenerateMetricError,
    DegenerateRestrictionError,
    DomainError,
    NotSelfAdjointError,
    NumericalFailure,
    SingularMatrixError,
)
from .instancegen import generate, random_isometry
from .invariants import counts_from_profile, equivalent, inertia_profile, verify_decomposition
from .linalg_core import DEFAULT_TOL, Inertia, Tolerances, eigenvalues, inertia_of_symmetric
from .minkowski import MinkowskiClass, classify, properties
from .operators import SelfAdjointOperator, generalized_eigenspaces, make_operator
from .scalar_product import ScalarProductSpace, make_space, minkowski, scalar_prod
