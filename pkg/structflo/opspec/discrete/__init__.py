"""Finite-difference spectral engine.

Produces the same :class:`~structflo.opspec._results.Eigenvalue` objects as
the analytic engine, so both can be paired and aggregated.

Quick start::

    from structflo.opspec.boundary import canonical_unitary
    from structflo.opspec.discrete import discretize, eigen, normality_residual

    op = discretize(block, canonical_unitary("periodic", block.dim), m=201)
    print(normality_residual(op))
    spectrum = eigen(op)
"""

from structflo.opspec.discrete._eigen import DEFAULT_CAP, eigen, eigenpairs
from structflo.opspec.discrete._identities import (
    NormIdentity,
    commutator_defect,
    formal_normality_check,
    norm_identity_check,
    normality_identity_on_domain,
    normality_residual,
    sample_domain_function,
)
from structflo.opspec.discrete._operator import DiscreteOperator, discretize
from structflo.opspec.discrete.engine import (
    PAIRING_RADIUS,
    ConvergenceResult,
    cluster,
    convergence_study,
    discrete_spectrum,
    nearest,
)

__all__ = [
    "DEFAULT_CAP",
    "PAIRING_RADIUS",
    "ConvergenceResult",
    "DiscreteOperator",
    "NormIdentity",
    "cluster",
    "commutator_defect",
    "convergence_study",
    "discrete_spectrum",
    "discretize",
    "eigen",
    "eigenpairs",
    "formal_normality_check",
    "nearest",
    "norm_identity_check",
    "normality_identity_on_domain",
    "normality_residual",
    "sample_domain_function",
]
