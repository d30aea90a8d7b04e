"""Dense eigendecomposition of a discretized block operator."""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg

from structflo.opspec._errors import EigenSolverError, ResourceCapError
from structflo.opspec._results import Eigenvalue
from structflo.opspec.discrete._operator import DiscreteOperator

logger = logging.getLogger(__name__)

DEFAULT_CAP = 4000
_RESIDUAL_TOL = 1e-8
_CLUSTER_TOL = 1e-6
_PARALLEL_TOL = 1e-6


def _unpack(op: DiscreteOperator | np.ndarray) -> tuple[np.ndarray, int]:
    if isinstance(op, DiscreteOperator):
        return op.matrix, op.block.index
    matrix = np.asarray(op, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        msg = f"Expected a square matrix, got shape {matrix.shape}"
        raise ValueError(msg)
    return matrix, 0


def eigenpairs(
    op: DiscreteOperator | np.ndarray, cap: int = DEFAULT_CAP
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues, unit eigenvectors and residuals, sorted by (Re, Im).

    ``residuals[k]`` is ``||D v_k - lambda_k v_k||``; each must stay below
    ``1e-8 ||D||_2``.

    Raises:
        ResourceCapError: If the matrix is larger than ``cap``.
        EigenSolverError: If LAPACK fails or a residual exceeds tolerance.
    """
    matrix, index = _unpack(op)
    n = matrix.shape[0]
    if n > cap:
        msg = f"Block {index}: matrix size {n} exceeds eigensolver cap {cap}"
        raise ResourceCapError(msg)
    try:
        w, v = scipy.linalg.eig(matrix)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        msg = f"Block {index}: eigensolver did not converge ({exc})"
        raise EigenSolverError(msg, converged=0) from exc

    order = np.lexsort((w.imag, w.real))
    w, v = w[order], v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    residuals = np.linalg.norm(matrix @ v - v * w, axis=0)

    bound = _RESIDUAL_TOL * max(float(np.linalg.norm(matrix, 2)), 1.0)
    bad = int(np.sum(residuals > bound))
    if bad:
        msg = (
            f"Block {index}: {bad} eigenpair(s) with residual above {bound:.3e} "
            f"(worst {residuals.max():.3e})"
        )
        raise EigenSolverError(msg, converged=n - bad)
    logger.debug("Block %d: %d eigenpairs, worst residual %.3e", index, n, residuals.max())
    return w, v, residuals


def defective_flags(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Mark eigenvalues whose eigenvector is parallel to a nearby one's.

    A Jordan block shows up as repeated eigenvalues with (numerically)
    parallel eigenvectors.
    """
    flags = np.zeros(values.shape[0], dtype=bool)
    for i in range(values.shape[0]):
        near = np.abs(values - values[i]) <= _CLUSTER_TOL * (1.0 + abs(values[i]))
        near[i] = False
        for j in np.nonzero(near)[0]:
            if abs(np.vdot(vectors[:, i], vectors[:, j])) >= 1.0 - _PARALLEL_TOL:
                flags[i] = flags[j] = True
    return flags


def eigen(op: DiscreteOperator | np.ndarray, cap: int = DEFAULT_CAP) -> list[Eigenvalue]:
    """Full spectrum of ``op`` as one :class:`Eigenvalue` per eigenpair."""
    w, v, residuals = eigenpairs(op, cap)
    flags = defective_flags(w, v)
    _, index = _unpack(op)
    return [
        Eigenvalue(
            value=complex(lam),
            block_index=index,
            residual=float(res),
            engine="discrete",
            defective=bool(flag),
        )
        for lam, res, flag in zip(w, residuals, flags, strict=True)
    ]
