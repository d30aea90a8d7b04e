"""Finite-difference discretization of one block extension.

The grid operator is built from the weak form

    (l u, v) = (u', v') - <Lambda N* gamma1 u, N* gamma1 v> + i (A u, v),

with a second-order summation-by-parts stiffness matrix and trapezoid mass.
Dirichlet directions of the boundary unitary (kernel of W + E) are
eliminated; the remaining boundary directions enter through the Hermitian
Robin matrix Lambda from :func:`~structflo.opspec.boundary.robin_form`.
The stiffness and mass forms are both Hermitian, so the matrix is normal
whenever W is admissible and its adjoint is the discretization of
-u'' - iAu under the same boundary condition.
"""

from __future__ import annotations

import dataclasses
import logging

import numpy as np
import scipy.sparse

from structflo.opspec._errors import BoundaryEncodingError, GridTooCoarseError, ShapeError
from structflo.opspec.boundary import BoundaryUnitary, robin_form
from structflo.opspec.hilbert import Block, GridFunction

logger = logging.getLogger(__name__)

MIN_NODES = 5


@dataclasses.dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Dense matrix approximating the extension selected by W on one block.

    Unknowns are the free boundary coordinates ``N* S gamma-values`` followed
    by interior node values (node-major). ``matrix`` is the symmetrized form
    ``G^(-1/2) (K + iB) G^(-1/2)``; ``embedding`` maps unknowns to all grid
    nodes and ``gram`` holds the diagonal of G.
    """

    block: Block
    matrix: np.ndarray
    embedding: np.ndarray
    gram: np.ndarray
    m: int
    boundary_rank: int
    adjoint: bool = False

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def h(self) -> float:
        return self.block.interval.length / (self.m - 1)

    def hermitian_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """(Re D, Im D) with D = Re D + i Im D and both parts Hermitian."""
        d = self.matrix
        return 0.5 * (d + d.conj().T), (d - d.conj().T) / 2j

    def apply_to_grid(self, u: GridFunction) -> GridFunction:
        """Apply the operator to nodal values, returning nodal values.

        ``u`` is first projected onto the discrete domain in the trapezoid
        inner product, so components violating the Dirichlet part of the
        boundary condition are dropped.
        """
        if u.block != self.block or u.m != self.m:
            msg = (
                f"Operator lives on block {self.block.index} with m={self.m}, "
                f"got block {u.block.index} with m={u.m}"
            )
            raise ShapeError(msg)
        weights = np.repeat(_node_weights(self.m, self.h), self.block.dim)
        x = u.values.reshape(-1)
        root = np.sqrt(self.gram)
        y = root * (self.embedding.conj().T @ (weights * x)) / self.gram
        out = self.embedding @ ((self.matrix @ y) / root)
        return GridFunction(self.block, out.reshape(self.m, self.block.dim))


def _node_weights(m: int, h: float) -> np.ndarray:
    w = np.full(m, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _stiffness(m: int, h: float) -> np.ndarray:
    """SBP stiffness (1/h) tridiag(-1, 2, -1) with halved corner entries."""
    main = np.full(m, 2.0)
    main[0] = main[-1] = 1.0
    off = -np.ones(m - 1)
    return scipy.sparse.diags([off, main, off], [-1, 0, 1]).toarray() / h


def discretize(
    block: Block, boundary: BoundaryUnitary, m: int, *, adjoint: bool = False
) -> DiscreteOperator:
    """Discretize the block extension on ``m`` nodes.

    With ``adjoint=True`` the expression -u'' - iAu is discretized under the
    same condition; for admissible W that matrix equals the conjugate
    transpose of the forward one.

    Raises:
        GridTooCoarseError: If ``m < 5``.
        BoundaryEncodingError: If the Robin block of W is singular.
    """
    if m < MIN_NODES:
        msg = f"Discretization needs at least {MIN_NODES} nodes, got {m}"
        raise GridTooCoarseError(msg)
    if boundary.dim != block.dim:
        msg = f"W acts on C^{2 * boundary.dim}, block {block.index} has d={block.dim}"
        raise ShapeError(msg)

    d = block.dim
    h = block.interval.length / (m - 1)
    try:
        _, free, lam = robin_form(boundary)
    except BoundaryEncodingError as exc:
        msg = f"Block {block.index}: {exc}"
        raise BoundaryEncodingError(msg, condition=exc.condition) from exc
    r = free.shape[1]
    n_interior = (m - 2) * d

    # Free boundary coordinates c give node values u(a) = -N_top c, u(b) = N_bottom c.
    embedding = np.zeros((m * d, r + n_interior), dtype=complex)
    embedding[:d, :r] = -free[:d]
    embedding[(m - 1) * d :, :r] = free[d:]
    embedding[d : (m - 1) * d, r:] = np.eye(n_interior)

    eye_d = np.eye(d)
    stiff = embedding.conj().T @ np.kron(_stiffness(m, h), eye_d) @ embedding
    stiff[:r, :r] -= lam
    mass = embedding.conj().T @ np.kron(np.diag(_node_weights(m, h)), block.coefficient.entries)
    mass = mass @ embedding
    stiff = 0.5 * (stiff + stiff.conj().T)
    mass = 0.5 * (mass + mass.conj().T)

    gram = np.concatenate([np.full(r, 0.5 * h), np.full(n_interior, h)])
    scale = 1.0 / np.sqrt(gram)
    sign = -1.0 if adjoint else 1.0
    matrix = scale[:, None] * (stiff + sign * 1j * mass) * scale[None, :]
    logger.debug(
        "Block %d: discretized with m=%d, %d boundary unknown(s), size %d",
        block.index,
        m,
        r,
        matrix.shape[0],
    )
    return DiscreteOperator(
        block=block,
        matrix=matrix,
        embedding=embedding,
        gram=gram,
        m=m,
        boundary_rank=r,
        adjoint=adjoint,
    )
