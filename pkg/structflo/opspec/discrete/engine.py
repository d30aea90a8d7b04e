"""Discrete spectral engine: per-block spectra and refinement studies."""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np

from structflo.opspec._errors import MatchingError
from structflo.opspec._results import Eigenvalue, SearchRegion, sort_key
from structflo.opspec.boundary import BoundaryUnitary, admissibility_check
from structflo.opspec.discrete._eigen import DEFAULT_CAP, eigen
from structflo.opspec.discrete._operator import discretize
from structflo.opspec.hilbert import Block

logger = logging.getLogger(__name__)

PAIRING_RADIUS = 0.5
CLUSTER_TOL = 1e-8
_EXACT_TOL = 1e-12
_REGION_SLACK = 1e-6


def cluster(eigenvalues: list[Eigenvalue], tol: float = CLUSTER_TOL) -> list[Eigenvalue]:
    """Merge eigenvalues closer than ``tol``, summing multiplicities."""
    groups: list[list[Eigenvalue]] = []
    for ev in sorted(eigenvalues, key=sort_key):
        for group in groups:
            if abs(group[0].value - ev.value) <= tol:
                group.append(ev)
                break
        else:
            groups.append([ev])
    out = []
    for group in groups:
        head = group[0]
        blocks = sorted({b for ev in group for b in ev.blocks})
        out.append(
            dataclasses.replace(
                head,
                multiplicity=sum(ev.multiplicity for ev in group),
                residual=max(ev.residual for ev in group),
                defective=any(ev.defective for ev in group),
                admissible=all(ev.admissible for ev in group),
                blocks=tuple(blocks),
            )
        )
    out.sort(key=sort_key)
    return out


def discrete_spectrum(
    block: Block,
    boundary: BoundaryUnitary,
    m: int,
    region: SearchRegion | None = None,
    cap: int = DEFAULT_CAP,
) -> list[Eigenvalue]:
    """Clustered eigenvalues of the discretized block, optionally clipped to ``region``."""
    admissible, _ = admissibility_check(boundary, block.coefficient)
    values = eigen(discretize(block, boundary, m), cap=cap)
    if not admissible:
        values = [dataclasses.replace(ev, admissible=False) for ev in values]
    if region is not None:
        values = [ev for ev in values if region.contains(ev.value, slack=_REGION_SLACK)]
    out = cluster(values)
    logger.info("Block %d: %d discrete eigenvalue(s) kept at m=%d", block.index, len(out), m)
    return out


def nearest(eigenvalues: list[Eigenvalue], target: complex) -> Eigenvalue | None:
    """Closest eigenvalue to ``target`` within the pairing radius, if any."""
    if not eigenvalues:
        return None
    best = min(eigenvalues, key=lambda ev: abs(ev.value - target))
    if abs(best.value - target) > PAIRING_RADIUS:
        return None
    return best


@dataclasses.dataclass(frozen=True)
class ConvergenceResult:
    """Errors against a reference eigenvalue over a grid sequence.

    ``order`` is the least-squares slope of log(error) against log(h), or
    ``None`` when the scheme reproduces the reference exactly or fewer than
    two errors are nonzero.
    """

    m_list: tuple[int, ...]
    h: tuple[float, ...]
    errors: tuple[float, ...]
    order: float | None
    exact: bool

    @property
    def label(self) -> str:
        if self.exact:
            return "exact"
        return "undetermined" if self.order is None else f"{self.order:.3f}"


def convergence_study(
    block: Block,
    boundary: BoundaryUnitary,
    m_list: list[int],
    reference: Eigenvalue,
    cap: int = DEFAULT_CAP,
) -> ConvergenceResult:
    """Estimate the convergence order of the discrete eigenvalue nearest ``reference``.

    Raises:
        ValueError: If ``m_list`` has fewer than 3 entries or is not increasing.
        MatchingError: If some grid has no eigenvalue within 0.5 of the reference.
    """
    if len(m_list) < 3 or any(b <= a for a, b in zip(m_list, m_list[1:], strict=False)):
        msg = f"m_list must be strictly increasing with at least 3 entries, got {m_list}"
        raise ValueError(msg)

    errors, steps, exact = [], [], True
    for m in m_list:
        op = discretize(block, boundary, m)
        partner = nearest(eigen(op, cap=cap), reference.value)
        if partner is None:
            msg = f"Block {block.index}: no discrete eigenvalue within {PAIRING_RADIUS} of {reference.value} at m={m}"
            raise MatchingError(msg)
        err = abs(partner.value - reference.value)
        scale = max(1.0, float(np.linalg.norm(op.matrix, 2)))
        exact = exact and err <= _EXACT_TOL * scale
        errors.append(err)
        steps.append(op.h)
        logger.debug("Block %d: m=%d error %.3e", block.index, m, err)

    order = None
    if not exact:
        positive = [(h, e) for h, e in zip(steps, errors, strict=True) if e > 0.0]
        if len(positive) >= 2:
            log_h = [math.log(h) for h, _ in positive]
            log_e = [math.log(e) for _, e in positive]
            order = float(np.polyfit(log_h, log_e, 1)[0])
    return ConvergenceResult(
        m_list=tuple(m_list), h=tuple(steps), errors=tuple(errors), order=order, exact=exact
    )
