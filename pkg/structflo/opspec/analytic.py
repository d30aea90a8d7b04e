"""Analytic spectral engine: eigenvalues as zeros of a characteristic determinant.

On one block the equation -u'' + iAu = lambda u decouples in the eigenbasis
of A into scalar problems with mu_j = sqrt(i alpha_j - lambda). Its
fundamental system has closed-form boundary data, and lambda is an
eigenvalue of the extension selected by W exactly when

    M(lambda) = (W - E) Gamma1(lambda) + i (W + E) Gamma2(lambda)

is singular. :func:`det_root_search` locates those zeros in a rectangle of
the complex plane; :func:`analytic_spectrum` gives the closed-form spectra
of the periodic, Dirichlet and Neumann conditions.

Quick start::

    from structflo.opspec.analytic import det_root_search
    from structflo.opspec.boundary import canonical_unitary

    eigenvalues = det_root_search(block, canonical_unitary("dirichlet", block.dim))
"""

from __future__ import annotations

import logging
import math

import numpy as np
import scipy.linalg
import scipy.ndimage

from structflo.opspec._errors import ShapeError
from structflo.opspec._results import Eigenvalue, SearchRegion, sort_key
from structflo.opspec.boundary import CANONICAL_KINDS, BoundaryUnitary, admissibility_check
from structflo.opspec.hilbert import Block

logger = logging.getLogger(__name__)

_SMALL_ARGUMENT = 1e-6
_NEWTON_MAX_ITER = 50
_NEWTON_STEP_TOL = 1e-13
_POLISH_MAX_ITER = 10
_POLISH_MAX_SHIFT = 1e-4
_DIFF_STEP = 1e-7
_DEDUP_TOL = 1e-6
_REGION_SLACK = 1e-6
_NULLITY_TOL = 1e-8
_ROUGH_NULLITY_TOL = 1e-5
_MERGE_TOL = 1e-12


# --------------------------------------------------------------------------- #
# Characteristic matrix
# --------------------------------------------------------------------------- #


def fundamental_boundary_data(block: Block, lam: complex) -> tuple[np.ndarray, np.ndarray]:
    """Boundary data (Gamma1, Gamma2) of the fundamental system at ``lam``.

    Column j is the cosh-type solution Q e_j cosh(mu_j (t - a)), column d + j
    the sinh-type solution Q e_j sinh(mu_j (t - a)) / mu_j. Small |mu| l uses
    the Taylor limit so both columns stay analytic in lambda.
    """
    coef = block.coefficient
    d = coef.dim
    length = block.interval.length
    mu = np.sqrt(1j * coef.alpha - complex(lam))
    z = mu * length
    small = np.abs(z) < _SMALL_ARGUMENT
    safe_mu = np.where(small, 1.0, mu)
    cosh = np.where(small, 1.0 + z**2 / 2.0, np.cosh(z))
    sinh_over_mu = np.where(small, length * (1.0 + z**2 / 6.0), np.sinh(z) / safe_mu)
    mu_sinh = np.where(small, mu**2 * length * (1.0 + z**2 / 6.0), mu * np.sinh(z))

    eye = np.eye(d)
    zero = np.zeros((d, d))
    g1 = np.block([[-eye, zero], [np.diag(cosh), np.diag(sinh_over_mu)]])
    g2 = np.block([[zero, eye], [np.diag(mu_sinh), np.diag(cosh)]])
    rotate = scipy.linalg.block_diag(coef.Q, coef.Q)
    return rotate @ g1, rotate @ g2


def characteristic_matrix(block: Block, boundary: BoundaryUnitary, lam: complex) -> np.ndarray:
    """M(lambda), singular exactly at eigenvalues of the extension."""
    if boundary.dim != block.dim:
        msg = f"W acts on C^{2 * boundary.dim}, block {block.index} has d={block.dim}"
        raise ShapeError(msg)
    g1, g2 = fundamental_boundary_data(block, lam)
    w = boundary.matrix
    eye = np.eye(w.shape[0])
    return (w - eye) @ g1 + 1j * (w + eye) @ g2


def _column_scale(block: Block, lam: complex) -> float:
    g1, g2 = fundamental_boundary_data(block, lam)
    norms = np.linalg.norm(np.vstack([g1, g2]), axis=0)
    return float(np.prod(norms))


def normalized_determinant(block: Block, boundary: BoundaryUnitary, lam: complex) -> complex:
    """det M(lambda) divided by the product of fundamental-system column norms.

    The quotient does not change when the fundamental solutions are rescaled.
    """
    det = complex(np.linalg.det(characteristic_matrix(block, boundary, lam)))
    return det / _column_scale(block, lam)


# --------------------------------------------------------------------------- #
# Root search
# --------------------------------------------------------------------------- #


def _scan(block: Block, boundary: BoundaryUnitary, region: SearchRegion) -> list[complex]:
    re = np.linspace(region.re_min, region.re_max, region.scan_re)
    im = np.linspace(region.im_min, region.im_max, region.scan_im)
    grid = re[:, None] + 1j * im[None, :]
    values = np.empty(grid.shape)
    for idx, lam in np.ndenumerate(grid):
        values[idx] = abs(normalized_determinant(block, boundary, lam))
    minima = values == scipy.ndimage.minimum_filter(values, size=3, mode="nearest")
    seeds = [complex(grid[idx]) for idx in zip(*np.nonzero(minima), strict=True)]
    logger.debug("Block %d: %d scan seeds", block.index, len(seeds))
    return seeds


def _newton(block: Block, boundary: BoundaryUnitary, seed: complex, tol: float) -> complex | None:
    """Newton on det M scaled by the column norms frozen at the seed."""
    scale = _column_scale(block, seed)
    if scale == 0.0 or not math.isfinite(scale):
        return None

    def g(lam: complex) -> complex:
        return complex(np.linalg.det(characteristic_matrix(block, boundary, lam))) / scale

    lam = seed
    for _ in range(_NEWTON_MAX_ITER):
        value = g(lam)
        if value == 0.0:
            return lam
        step_h = _DIFF_STEP * (1.0 + abs(lam))
        slope = (g(lam + step_h) - g(lam - step_h)) / (2.0 * step_h)
        if slope == 0.0 or not np.isfinite(slope):
            break
        step = value / slope
        if not np.isfinite(step):
            break
        lam -= step
        if abs(step) <= _NEWTON_STEP_TOL * (1.0 + abs(lam)):
            return lam
    # Near a multiple root Newton stagnates at roughly sqrt(eps); keep the iterate
    # when the determinant there is already below tolerance.
    if np.isfinite(lam) and abs(normalized_determinant(block, boundary, lam)) <= tol:
        return lam
    return None


def _nullity(matrix: np.ndarray, rel_tol: float) -> int:
    sigma = scipy.linalg.svdvals(matrix)
    if sigma[0] == 0.0:
        return matrix.shape[0]
    return int(np.sum(sigma <= rel_tol * sigma[0]))


def _polish(block: Block, boundary: BoundaryUnitary, lam: complex) -> complex:
    """Multiplicity-aware Newton: lambda -= k / tr(M^-1 M')."""
    k = max(1, _nullity(characteristic_matrix(block, boundary, lam), _ROUGH_NULLITY_TOL))
    start = lam
    for _ in range(_POLISH_MAX_ITER):
        m = characteristic_matrix(block, boundary, lam)
        step_h = _DIFF_STEP * (1.0 + abs(lam))
        dm = (
            characteristic_matrix(block, boundary, lam + step_h)
            - characteristic_matrix(block, boundary, lam - step_h)
        ) / (2.0 * step_h)
        try:
            trace = complex(np.trace(scipy.linalg.solve(m, dm)))
        except (scipy.linalg.LinAlgError, ValueError):
            break
        if trace == 0.0 or not np.isfinite(trace):
            break
        step = k / trace
        lam -= step
        if abs(step) <= 1e-15 * (1.0 + abs(lam)):
            break
    if not np.isfinite(lam) or abs(lam - start) > _POLISH_MAX_SHIFT:
        return start
    return lam


def det_root_search(
    block: Block,
    boundary: BoundaryUnitary,
    region: SearchRegion | None = None,
    tol: float = 1e-8,
) -> list[Eigenvalue]:
    """Find all eigenvalues of one block extension inside ``region``.

    Seeds come from local minima of |f| on the region's scan grid, where f is
    the normalized determinant. Each seed is refined by Newton, then polished
    with a multiplicity-aware step. Roots closer than 1e-6 are merged and the
    multiplicity is the numerical nullity of M at the merged root.

    Returns:
        Eigenvalues sorted by (Re, Im). When W is not admissible for the
        block the values are still returned but flagged ``admissible=False``.
    """
    region = region or SearchRegion()
    admissible, _ = admissibility_check(boundary, block.coefficient)
    if not admissible:
        logger.warning(
            "Block %d: boundary unitary %s does not give a normal extension",
            block.index,
            boundary.label,
        )

    roots: list[complex] = []
    for seed in _scan(block, boundary, region):
        lam = _newton(block, boundary, seed, tol)
        if lam is None:
            continue
        lam = _polish(block, boundary, lam)
        if not region.contains(lam, slack=_REGION_SLACK):
            continue
        if abs(normalized_determinant(block, boundary, lam)) > tol:
            continue
        if any(abs(lam - r) <= _DEDUP_TOL for r in roots):
            continue
        roots.append(lam)

    out = []
    for lam in roots:
        nullity = _nullity(characteristic_matrix(block, boundary, lam), _NULLITY_TOL)
        out.append(
            Eigenvalue(
                value=lam,
                block_index=block.index,
                multiplicity=max(1, nullity),
                residual=abs(normalized_determinant(block, boundary, lam)),
                engine="analytic",
                admissible=admissible,
            )
        )
    out.sort(key=sort_key)
    logger.info("Block %d: %d analytic eigenvalue(s) in region", block.index, len(out))
    return out


# --------------------------------------------------------------------------- #
# Closed forms
# --------------------------------------------------------------------------- #


def analytic_spectrum(kind: str, block: Block, k_max: int) -> list[Eigenvalue]:
    """Closed-form eigenvalues of a canonical condition up to mode ``k_max``.

    periodic: (2 pi k / l)^2 + i alpha_j, multiplicity 1 for k = 0 and 2 otherwise.
    dirichlet: (pi k / l)^2 + i alpha_j for k >= 1.
    neumann: (pi k / l)^2 + i alpha_j for k >= 0.
    Values that coincide across eigenvalues of A are merged.
    """
    if kind not in CANONICAL_KINDS:
        msg = f"Unknown boundary kind {kind!r}. Valid kinds: {list(CANONICAL_KINDS)}"
        raise ValueError(msg)
    if k_max < 0:
        msg = f"k_max must be non-negative, got {k_max}"
        raise ValueError(msg)

    length = block.interval.length
    values: list[tuple[complex, int]] = []
    for alpha in block.coefficient.alpha:
        for k in range(k_max + 1):
            if kind == "periodic":
                values.append((complex((2 * math.pi * k / length) ** 2, alpha), 1 if k == 0 else 2))
            elif kind == "dirichlet" and k == 0:
                continue
            else:
                values.append((complex((math.pi * k / length) ** 2, alpha), 1))

    merged: list[list] = []
    for lam, mult in sorted(values, key=lambda p: (p[0].real, p[0].imag)):
        if merged and abs(merged[-1][0] - lam) <= _MERGE_TOL * (1.0 + abs(lam)):
            merged[-1][1] += mult
        else:
            merged.append([lam, mult])
    return [
        Eigenvalue(value=lam, block_index=block.index, multiplicity=mult, engine="analytic")
        for lam, mult in merged
    ]
