"""Normality witnesses at grid level.

Two kinds of checks live here. Matrix checks (:func:`normality_residual`,
:func:`commutator_defect`) look at a discretized operator directly. Function
checks evaluate the norm identities ``||l(u)|| = ||l+(u)||`` and
``||l(u)||^2 = ||u''||^2 + ||Au||^2`` by quadrature on sampled functions.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg

from structflo.opspec._errors import BoundaryEncodingError
from structflo.opspec.boundary import BoundaryUnitary, boundary_residual
from structflo.opspec.discrete._operator import DiscreteOperator
from structflo.opspec.hilbert import (
    Block,
    GridFunction,
    apply_adjoint_expression,
    apply_expression,
    derivative,
    inner_product,
    norm,
)

logger = logging.getLogger(__name__)

_CONSTRAINT_TOL = 1e-8


class NormIdentity(NamedTuple):
    lhs: float
    rhs: float
    defect: float


def _matrix(op: DiscreteOperator | np.ndarray) -> np.ndarray:
    if isinstance(op, DiscreteOperator):
        return op.matrix
    return np.asarray(op, dtype=complex)


def normality_residual(op: DiscreteOperator | np.ndarray) -> float:
    """||D* D - D D*||_F / ||D||_F^2 (zero for the zero matrix).

    Roundoff for admissible boundary unitaries. A non-admissible W only
    touches a fixed number of boundary rows, so the commutator grows more
    slowly than ||D||_F^2 ~ h^-5 and the ratio still decays under refinement
    (about h^3 for a junction swap on diag(1, 4)). Use
    :func:`commutator_defect` for a grid-independent verdict.
    """
    d = _matrix(op)
    scale = float(np.linalg.norm(d)) ** 2
    if scale == 0.0:
        return 0.0
    dh = d.conj().T
    return float(np.linalg.norm(dh @ d - d @ dh)) / scale


def commutator_defect(op: DiscreteOperator | np.ndarray) -> float:
    """||[Re D, Im D]||_2 / (||Re D||_2 ||Im D||_2).

    Zero exactly when the Hermitian parts commute, i.e. when D is normal.
    Returns 0.0 when either part vanishes.
    """
    d = _matrix(op)
    re = 0.5 * (d + d.conj().T)
    im = (d - d.conj().T) / 2j
    scale = float(np.linalg.norm(re, 2) * np.linalg.norm(im, 2))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(re @ im - im @ re, 2)) / scale


def norm_identity_check(block: Block, u: GridFunction) -> NormIdentity:
    """lhs = ||-u'' + iAu||^2, rhs = ||u''||^2 + ||Au||^2, defect = lhs - rhs.

    For any u the defect equals -2 Im (u'', Au); it vanishes on the minimal
    domain.
    """
    second = derivative(u, 2)
    au = GridFunction(block, u.values @ block.coefficient.entries.T)
    lhs = norm(apply_expression(block, u)) ** 2
    rhs = norm(second) ** 2 + norm(au) ** 2
    return NormIdentity(lhs=lhs, rhs=rhs, defect=lhs - rhs)


def formal_normality_check(block: Block, u: GridFunction) -> tuple[float, float]:
    """(||l(u)||, ||l+(u)||); equal for u in the minimal domain."""
    return norm(apply_expression(block, u)), norm(apply_adjoint_expression(block, u))


def _hermite_basis(s: np.ndarray) -> list[np.ndarray]:
    return [
        2 * s**3 - 3 * s**2 + 1,
        s**3 - 2 * s**2 + s,
        -2 * s**3 + 3 * s**2,
        s**3 - s**2,
    ]


def sample_domain_function(
    block: Block, boundary: BoundaryUnitary, m: int, rng: np.random.Generator
) -> GridFunction:
    """Random cubic grid function satisfying the boundary condition of W.

    A random complex cubic is corrected by the minimum-norm combination of
    cubic Hermite functions that zeroes the boundary residual.

    Raises:
        BoundaryEncodingError: If the boundary constraint cannot be met.
    """
    d = block.dim
    s = (block.interval.nodes(m) - block.interval.a) / block.interval.length
    powers = np.stack([s**k for k in range(4)], axis=1)
    coeffs = rng.standard_normal((4, d)) + 1j * rng.standard_normal((4, d))
    base = GridFunction(block, powers @ coeffs)

    basis = []
    for h_k in _hermite_basis(s):
        for j in range(d):
            values = np.zeros((m, d), dtype=complex)
            values[:, j] = h_k
            basis.append(GridFunction(block, values))
    constraint = np.stack(
        [boundary_residual(boundary, g).as_array() for g in basis], axis=1
    )
    target = -boundary_residual(boundary, base).as_array()

    x, _, rank, _ = scipy.linalg.lstsq(constraint, target)
    if rank < 2 * d:
        msg = f"Block {block.index}: boundary constraint has rank {rank} < {2 * d}"
        raise BoundaryEncodingError(msg)
    values = base.values + sum(c * g.values for c, g in zip(x, basis, strict=True))
    u = GridFunction(block, values)

    leftover = float(np.linalg.norm(boundary_residual(boundary, u).as_array()))
    if leftover > _CONSTRAINT_TOL * max(1.0, float(np.linalg.norm(target))):
        msg = f"Block {block.index}: boundary projection left residual {leftover:.3e}"
        raise BoundaryEncodingError(msg)
    return u


def normality_identity_on_domain(
    block: Block, boundary: BoundaryUnitary, samples: int, m: int, seed: int = 0
) -> float:
    """Largest relative gap | ||l u||^2 - ||l+ u||^2 | / ||l u||^2 over random domain samples."""
    if samples < 1:
        msg = f"samples must be >= 1, got {samples}"
        raise ValueError(msg)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = sample_domain_function(block, boundary, m, rng)
        forward = inner_product(apply_expression(block, u), apply_expression(block, u)).real
        backward = inner_product(
            apply_adjoint_expression(block, u), apply_adjoint_expression(block, u)
        ).real
        worst = max(worst, abs(forward - backward) / forward)
    logger.debug(
        "Block %d: normality identity gap %.3e over %d sample(s)", block.index, worst, samples
    )
    return worst
