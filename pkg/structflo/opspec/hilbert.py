"""Vector-valued functions on an interval and the expression l(u) = -u'' + iAu.

A :class:`GridFunction` samples u: [a, b] -> C^d on a uniform grid of ``m``
nodes. Inner products use the trapezoid rule, derivatives use central
differences in the interior and one-sided stencils at the endpoints.

Quick start::

    import numpy as np
    from structflo.opspec.hilbert import (
        Block, CoefficientMatrix, GridFunction, Interval, apply_expression,
    )

    block = Block(1, Interval(0.0, 1.0), CoefficientMatrix(np.diag([1.0, 2.0])))
    u = GridFunction.from_callable(block, lambda t: np.stack([t**2, t], axis=1), m=201)
    lu = apply_expression(block, u)
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable

import numpy as np
import scipy.integrate
import scipy.linalg

from structflo.opspec._errors import GridTooCoarseError, MatrixValidationError, ShapeError

logger = logging.getLogger(__name__)

_HERMITIAN_TOL = 1e-12
_DEFINITE_TOL = 1e-10
_MIN_NODES = 5

# Fourth-order one-sided first-derivative weights for boundary traces.
_TRACE_WEIGHTS = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


# --------------------------------------------------------------------------- #
# Types
# --------------------------------------------------------------------------- #


@dataclasses.dataclass(frozen=True)
class Interval:
    """A bounded interval (a, b) with a < b."""

    a: float
    b: float
    length: float = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            msg = f"Interval endpoints must be finite, got ({self.a}, {self.b})"
            raise ValueError(msg)
        if not self.a < self.b:
            msg = f"Interval requires a < b, got ({self.a}, {self.b})"
            raise ValueError(msg)
        object.__setattr__(self, "length", self.b - self.a)

    def nodes(self, m: int) -> np.ndarray:
        """Uniform grid of ``m`` nodes including both endpoints."""
        return np.linspace(self.a, self.b, m)


class CoefficientMatrix:
    """A positive definite Hermitian d x d matrix with a cached eigendecomposition.

    ``alpha`` holds the eigenvalues in ascending order and ``Q`` the matching
    orthonormal eigenvectors, so ``A = Q diag(alpha) Q*``. ``sqrt`` and
    ``inv_sqrt`` are A^(1/2) and A^(-1/2).

    Raises:
        MatrixValidationError: If A is not square, not Hermitian within
            1e-12 (relative Frobenius), or has an eigenvalue <= 1e-10.
    """

    __slots__ = ("entries", "alpha", "Q", "sqrt", "inv_sqrt")

    def __init__(self, entries: np.ndarray | list) -> None:
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            msg = f"Coefficient matrix must be square and non-empty, got shape {a.shape}"
            raise MatrixValidationError(msg)
        if not np.all(np.isfinite(a)):
            msg = "Coefficient matrix has non-finite entries"
            raise MatrixValidationError(msg)

        scale = max(float(np.linalg.norm(a)), np.finfo(float).tiny)
        residual = float(np.linalg.norm(a - a.conj().T)) / scale
        if residual > _HERMITIAN_TOL:
            msg = f"A not Hermitian (residual {residual:.3e})"
            raise MatrixValidationError(msg, residual=residual)

        a = 0.5 * (a + a.conj().T)
        alpha, q = scipy.linalg.eigh(a)
        if alpha[0] <= _DEFINITE_TOL:
            msg = f"A not positive definite (smallest eigenvalue {alpha[0]:.3e})"
            raise MatrixValidationError(msg, residual=float(alpha[0]))

        root = np.sqrt(alpha)
        values = {
            "entries": a,
            "alpha": alpha,
            "Q": q,
            "sqrt": (q * root) @ q.conj().T,
            "inv_sqrt": (q / root) @ q.conj().T,
        }
        for name, value in values.items():
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __setattr__(self, name: str, value: object) -> None:
        msg = f"CoefficientMatrix is immutable, cannot set {name!r}"
        raise AttributeError(msg)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoefficientMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())

    def __repr__(self) -> str:
        return f"CoefficientMatrix(dim={self.dim}, alpha={self.alpha.tolist()})"


@dataclasses.dataclass(frozen=True)
class Block:
    """One summand of the direct sum: interval (a_n, b_n) with coefficient A_n."""

    index: int
    interval: Interval
    coefficient: CoefficientMatrix

    @property
    def dim(self) -> int:
        return self.coefficient.dim


@dataclasses.dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of u: [a, b] -> C^d at ``m`` uniform nodes.

    ``values`` is an ``(m, d)`` complex array, row ``k`` holding u(t_k).
    """

    block: Block
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=complex)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[1] != self.block.dim:
            msg = (
                f"Grid values must have shape (m, {self.block.dim}) for block "
                f"{self.block.index}, got {np.shape(self.values)}"
            )
            raise ShapeError(msg)
        if values.shape[0] < _MIN_NODES:
            msg = f"Grid needs at least {_MIN_NODES} nodes, got {values.shape[0]}"
            raise GridTooCoarseError(msg)
        if not np.all(np.isfinite(values)):
            msg = "Grid values must be finite"
            raise ValueError(msg)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(
        cls, block: Block, func: Callable[[np.ndarray], np.ndarray], m: int
    ) -> GridFunction:
        """Sample ``func`` (vectorised over nodes) on ``m`` uniform nodes."""
        return cls(block, func(block.interval.nodes(m)))

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> float:
        return self.block.interval.length / (self.m - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.block.interval.nodes(self.m)


# --------------------------------------------------------------------------- #
# Operations
# --------------------------------------------------------------------------- #


def _check_compatible(u: GridFunction, v: GridFunction) -> None:
    if u.block != v.block or u.m != v.m:
        msg = (
            f"Grid functions differ: block {u.block.index} (m={u.m}) "
            f"vs block {v.block.index} (m={v.m})"
        )
        raise ShapeError(msg)


def inner_product(u: GridFunction, v: GridFunction) -> complex:
    """Trapezoid approximation of (u, v) = integral of <u(t), v(t)>_{C^d}."""
    _check_compatible(u, v)
    pointwise = np.sum(u.values * v.values.conj(), axis=1)
    return complex(scipy.integrate.trapezoid(pointwise, dx=u.h))


def norm(u: GridFunction) -> float:
    return math.sqrt(max(inner_product(u, u).real, 0.0))


def derivative(u: GridFunction, order: int) -> GridFunction:
    """First or second derivative, second order accurate up to the endpoints."""
    x, h = u.values, u.h
    out = np.empty_like(x)
    if order == 1:
        out[1:-1] = (x[2:] - x[:-2]) / (2.0 * h)
        out[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h)
        out[-1] = (3.0 * x[-1] - 4.0 * x[-2] + x[-3]) / (2.0 * h)
    elif order == 2:
        out[1:-1] = (x[:-2] - 2.0 * x[1:-1] + x[2:]) / h**2
        out[0] = (2.0 * x[0] - 5.0 * x[1] + 4.0 * x[2] - x[3]) / h**2
        out[-1] = (2.0 * x[-1] - 5.0 * x[-2] + 4.0 * x[-3] - x[-4]) / h**2
    else:
        msg = f"Derivative order must be 1 or 2, got {order}"
        raise ValueError(msg)
    return GridFunction(u.block, out)


def endpoint_derivatives(u: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """Boundary traces (u'(a), u'(b)) from five-point one-sided stencils."""
    x, h = u.values, u.h
    left = _TRACE_WEIGHTS @ x[:5] / h
    right = -(_TRACE_WEIGHTS @ x[::-1][:5]) / h
    return left, right


def apply_expression(block: Block, u: GridFunction) -> GridFunction:
    """Evaluate l(u) = -u'' + iAu node by node."""
    if u.block != block:
        msg = f"Grid function belongs to block {u.block.index}, not {block.index}"
        raise ShapeError(msg)
    second = derivative(u, 2).values
    return GridFunction(block, -second + 1j * (u.values @ block.coefficient.entries.T))


def apply_adjoint_expression(block: Block, u: GridFunction) -> GridFunction:
    """Evaluate the formal adjoint l+(u) = -u'' - iAu."""
    if u.block != block:
        msg = f"Grid function belongs to block {u.block.index}, not {block.index}"
        raise ShapeError(msg)
    second = derivative(u, 2).values
    return GridFunction(block, -second - 1j * (u.values @ block.coefficient.entries.T))


def minimal_domain_test(u: GridFunction, tol: float = 1e-8) -> bool:
    """True when u and u' vanish at both endpoints within ``tol``."""
    left, right = endpoint_derivatives(u)
    traces = (u.values[0], u.values[-1], left, right)
    worst = max(float(np.linalg.norm(t)) for t in traces)
    logger.debug("Minimal-domain trace maximum %.3e (tol %.1e)", worst, tol)
    return worst <= tol


def _cutoff(s: np.ndarray) -> np.ndarray:
    """Smooth bump on [0, 1], equal to 1 at s = 1/2 and flat to all orders at the ends."""
    x = 2.0 * s - 1.0
    inside = np.abs(x) < 1.0
    out = np.zeros_like(s)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


def generate_minimal_domain_function(
    block: Block, seed: int, m: int = 401, terms: int = 3
) -> GridFunction:
    """Random element of the minimal domain: sum_k phi_k(t) f_k with random f_k in C^d.

    Each profile phi_k is sin^2(k pi s) times a smooth cutoff that vanishes
    to all orders at both endpoints, so u and u' are zero there.
    """
    rng = np.random.default_rng(seed)
    s = (block.interval.nodes(m) - block.interval.a) / block.interval.length
    bump = _cutoff(s)
    values = np.zeros((m, block.dim), dtype=complex)
    for k in range(1, terms + 1):
        f_k = rng.standard_normal(block.dim) + 1j * rng.standard_normal(block.dim)
        values += np.outer(bump * np.sin(k * np.pi * s) ** 2, f_k)
    return GridFunction(block, values)
