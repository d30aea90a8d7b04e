"""Boundary data, boundary unitaries and the admissibility test for normal extensions.

For u on (a, b) with values in C^d the boundary maps are

    gamma1(u) = (-u(a), u(b)),    gamma2(u) = (u'(a), u'(b)),

both in C^{2d}. A unitary W on C^{2d} selects the extension whose domain is
the kernel of ``(W - E) gamma1 + i (W + E) gamma2``. The extension is normal
exactly when W also commutes with diag(A, A).
"""

from __future__ import annotations

import dataclasses
import logging

import numpy as np
import scipy.linalg

from structflo.opspec._errors import BoundaryEncodingError, MatrixValidationError, ShapeError
from structflo.opspec.hilbert import CoefficientMatrix, GridFunction, endpoint_derivatives

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-10
COMMUTATOR_TOL = 1e-8
_KERNEL_TOL = 1e-8
_ROBIN_COND_LIMIT = 1e12

CANONICAL_KINDS: tuple[str, ...] = ("periodic", "dirichlet", "neumann")


# --------------------------------------------------------------------------- #
# Types
# --------------------------------------------------------------------------- #


@dataclasses.dataclass(frozen=True, eq=False)
class BoundaryVector:
    """An element (top, bottom) of C^d + C^d."""

    top: np.ndarray
    bottom: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.top, self.bottom])

    @property
    def dim(self) -> int:
        return self.top.shape[0]


@dataclasses.dataclass(frozen=True, eq=False)
class BoundaryUnitary:
    """A 2d x 2d unitary matrix W encoding one boundary condition.

    Raises:
        MatrixValidationError: If ``||W* W - E||_F > 1e-10``.
    """

    matrix: np.ndarray
    label: str = "matrix"

    def __post_init__(self) -> None:
        w = np.array(self.matrix, dtype=complex)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] % 2:
            msg = f"Boundary unitary must be 2d x 2d, got shape {w.shape}"
            raise MatrixValidationError(msg)
        residual = unitarity_residual(w)
        if residual > UNITARY_TOL:
            msg = f"W not unitary (residual {residual:.3e})"
            raise MatrixValidationError(msg, residual=residual)
        w.setflags(write=False)
        object.__setattr__(self, "matrix", w)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0] // 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoundaryUnitary):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash(self.matrix.tobytes())


@dataclasses.dataclass(frozen=True)
class AdmissibilityReport:
    """Diagnostics of :func:`admissibility_check`.

    ``admissible`` follows the A^(1/2)-conjugation criterion; ``consistent``
    records whether the commutator criterion reached the same verdict.
    """

    admissible: bool
    unitarity_residual: float
    conjugated_residual: float
    commutator_norm: float
    consistent: bool


# --------------------------------------------------------------------------- #
# Boundary maps
# --------------------------------------------------------------------------- #


def unitarity_residual(w: np.ndarray) -> float:
    return float(np.linalg.norm(w.conj().T @ w - np.eye(w.shape[0])))


def gamma1(u: GridFunction) -> BoundaryVector:
    return BoundaryVector(top=-u.values[0].copy(), bottom=u.values[-1].copy())


def gamma2(u: GridFunction) -> BoundaryVector:
    left, right = endpoint_derivatives(u)
    return BoundaryVector(top=left, bottom=right)


def boundary_pairing(u: GridFunction, v: GridFunction) -> complex:
    """Green's form <gamma1 u, gamma2 v> - <gamma2 u, gamma1 v>.

    Equals (-u'', v) - (u, -v'') for smooth u and v.
    """
    g1u, g2u = gamma1(u).as_array(), gamma2(u).as_array()
    g1v, g2v = gamma1(v).as_array(), gamma2(v).as_array()
    return complex(np.vdot(g2v, g1u) - np.vdot(g1v, g2u))


def boundary_residual(boundary: BoundaryUnitary, u: GridFunction) -> BoundaryVector:
    """Evaluate (W - E) gamma1(u) + i (W + E) gamma2(u)."""
    if boundary.dim != u.block.dim:
        msg = f"W acts on C^{2 * boundary.dim}, grid function has d={u.block.dim}"
        raise ShapeError(msg)
    w = boundary.matrix
    eye = np.eye(w.shape[0])
    r = (w - eye) @ gamma1(u).as_array() + 1j * (w + eye) @ gamma2(u).as_array()
    d = boundary.dim
    return BoundaryVector(top=r[:d], bottom=r[d:])


# --------------------------------------------------------------------------- #
# Canonical conditions
# --------------------------------------------------------------------------- #


def canonical_unitary(kind: str, d: int) -> BoundaryUnitary:
    """Periodic, Dirichlet or Neumann condition as a boundary unitary on C^{2d}.

    Periodic is [[0, -E], [-E, 0]], Dirichlet is -E and Neumann is +E.
    """
    if d < 1:
        msg = f"Dimension must be positive, got {d}"
        raise ValueError(msg)
    eye = np.eye(d)
    if kind == "periodic":
        zero = np.zeros((d, d))
        w = np.block([[zero, -eye], [-eye, zero]])
    elif kind == "dirichlet":
        w = -np.eye(2 * d)
    elif kind == "neumann":
        w = np.eye(2 * d)
    else:
        msg = f"Unknown boundary kind {kind!r}. Valid kinds: {list(CANONICAL_KINDS)}"
        raise ValueError(msg)
    return BoundaryUnitary(w.astype(complex), label=kind)


def conjugated_unitary(boundary: BoundaryUnitary, coefficient: CoefficientMatrix) -> np.ndarray:
    """V = diag(A^(1/2), A^(1/2)) W diag(A^(-1/2), A^(-1/2))."""
    s = scipy.linalg.block_diag(coefficient.sqrt, coefficient.sqrt)
    s_inv = scipy.linalg.block_diag(coefficient.inv_sqrt, coefficient.inv_sqrt)
    return s @ boundary.matrix @ s_inv


def admissibility_check(
    boundary: BoundaryUnitary, coefficient: CoefficientMatrix
) -> tuple[bool, AdmissibilityReport]:
    """Decide whether W defines a normal extension for this A.

    W is admissible iff both W and its A^(1/2)-conjugate V are unitary. The
    equivalent commutator test ``[W, diag(A, A)] = 0`` is evaluated as a
    cross-check; disagreement is logged.
    """
    if boundary.dim != coefficient.dim:
        msg = f"W acts on C^{2 * boundary.dim}, A is {coefficient.dim} x {coefficient.dim}"
        raise ShapeError(msg)
    w = boundary.matrix
    w_res = unitarity_residual(w)
    v_res = unitarity_residual(conjugated_unitary(boundary, coefficient))
    a2 = scipy.linalg.block_diag(coefficient.entries, coefficient.entries)
    comm = float(np.linalg.norm(w @ a2 - a2 @ w))

    by_conjugation = w_res <= UNITARY_TOL and v_res <= UNITARY_TOL
    by_commutator = w_res <= UNITARY_TOL and comm <= COMMUTATOR_TOL
    consistent = by_conjugation == by_commutator
    if not consistent:
        logger.warning(
            "Admissibility criteria disagree for W=%s: V residual %.3e, commutator %.3e",
            boundary.label,
            v_res,
            comm,
        )
    logger.debug(
        "Admissibility of %s: W %.2e, V %.2e, [W, A] %.2e", boundary.label, w_res, v_res, comm
    )
    report = AdmissibilityReport(
        admissible=by_conjugation,
        unitarity_residual=w_res,
        conjugated_residual=v_res,
        commutator_norm=comm,
        consistent=consistent,
    )
    return by_conjugation, report


def robin_form(boundary: BoundaryUnitary) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split the condition into a Dirichlet part and a Robin part.

    Returns ``(dirichlet_basis, free_basis, lam)``: gamma1(u) is orthogonal
    to ``dirichlet_basis`` (the kernel of W + E), and on the free part the
    condition reads ``N* gamma2 = lam N* gamma1`` with Hermitian ``lam``.

    Raises:
        BoundaryEncodingError: If the free-part block of W + E is too
            ill-conditioned to invert.
    """
    w = boundary.matrix
    eye = np.eye(w.shape[0])
    _, sigma, vh = scipy.linalg.svd(w + eye)
    kernel = sigma <= _KERNEL_TOL
    dirichlet_basis = vh[kernel].conj().T
    free = vh[~kernel].conj().T
    if free.shape[1] == 0:
        return dirichlet_basis, free, np.zeros((0, 0), dtype=complex)

    plus = free.conj().T @ (w + eye) @ free
    minus = free.conj().T @ (w - eye) @ free
    cond = float(np.linalg.cond(plus))
    if not np.isfinite(cond) or cond > _ROBIN_COND_LIMIT:
        msg = f"Robin block of {boundary.label} is singular (condition {cond:.3e})"
        raise BoundaryEncodingError(msg, condition=cond)
    lam = 1j * scipy.linalg.solve(plus, minus)
    return dirichlet_basis, free, 0.5 * (lam + lam.conj().T)
