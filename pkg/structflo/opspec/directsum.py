"""Multipoint problems as direct sums of block extensions.

A :class:`MultipointProblem` holds N ordered, non-overlapping blocks, each
with its own boundary unitary. The extension of the sum is the direct sum
of the block extensions, so its point spectrum is the union of the block
spectra (:func:`aggregate_spectrum`). The module also carries the
counterexample showing that a sum of minimal-domain elements need not lie in
the minimal domain of the sum when coefficients are unbounded.

Quick start::

    from structflo.opspec.directsum import MultipointProblem, solve_problem

    problem = MultipointProblem(blocks=(block_1, block_2), boundaries=(w_1, w_2))
    report = solve_problem(problem, engine="analytic")
    print(report.to_csv())
"""

from __future__ import annotations

import dataclasses
import logging
import math
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from structflo.opspec._errors import ShapeError
from structflo.opspec._results import Eigenvalue, PairingRow, SearchRegion, SpectrumReport
from structflo.opspec.analytic import det_root_search
from structflo.opspec.boundary import AdmissibilityReport, BoundaryUnitary, admissibility_check
from structflo.opspec.discrete import DEFAULT_CAP, cluster, discrete_spectrum, nearest
from structflo.opspec.hilbert import (
    Block,
    CoefficientMatrix,
    GridFunction,
    Interval,
    inner_product,
)

logger = logging.getLogger(__name__)

ENGINES: tuple[str, ...] = ("analytic", "discrete", "both")
MERGE_TOL = 1e-8
DIVERGENCE_EXPONENT = 0.9
_THREADS_ENV = "OPSPEC_THREADS"


# --------------------------------------------------------------------------- #
# Problems
# --------------------------------------------------------------------------- #


@dataclasses.dataclass(frozen=True)
class MultipointProblem:
    """Ordered blocks with one boundary unitary each.

    Raises:
        ValueError: If the blocks overlap, are unordered, or the counts differ.
        ShapeError: If a unitary does not match its block's dimension.
    """

    blocks: tuple[Block, ...]
    boundaries: tuple[BoundaryUnitary, ...]
    admissibility: tuple[AdmissibilityReport, ...] = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        if not self.blocks:
            msg = "A multipoint problem needs at least one block"
            raise ValueError(msg)
        if len(self.blocks) != len(self.boundaries):
            msg = f"Got {len(self.blocks)} blocks but {len(self.boundaries)} boundary unitaries"
            raise ValueError(msg)
        for left, right in zip(self.blocks, self.blocks[1:], strict=False):
            if left.interval.b > right.interval.a:
                msg = (
                    f"Blocks {left.index} and {right.index} overlap or are out of order: "
                    f"b={left.interval.b} > a={right.interval.a}"
                )
                raise ValueError(msg)
        reports = []
        for block, boundary in zip(self.blocks, self.boundaries, strict=True):
            if boundary.dim != block.dim:
                msg = f"Block {block.index}: W acts on C^{2 * boundary.dim}, A has d={block.dim}"
                raise ShapeError(msg)
            reports.append(admissibility_check(boundary, block.coefficient)[1])
        object.__setattr__(self, "admissibility", tuple(reports))

    @property
    def size(self) -> int:
        return len(self.blocks)

    @property
    def normal(self) -> bool:
        """True when every block extension is normal."""
        return all(r.admissible for r in self.admissibility)


def project_block(problem: MultipointProblem, n: int) -> tuple[Block, BoundaryUnitary]:
    """The n-th summand (1-based) of the problem."""
    if not 1 <= n <= problem.size:
        msg = f"Block number {n} outside 1..{problem.size}"
        raise IndexError(msg)
    return problem.blocks[n - 1], problem.boundaries[n - 1]


# --------------------------------------------------------------------------- #
# Spectra
# --------------------------------------------------------------------------- #


def aggregate_spectrum(per_block: Sequence[Sequence[Eigenvalue]]) -> list[Eigenvalue]:
    """Union of block spectra; values within 1e-8 merge and add multiplicities."""
    merged = cluster([ev for spectrum in per_block for ev in spectrum], tol=MERGE_TOL)
    logger.debug("Aggregated %d block spectra into %d value(s)", len(per_block), len(merged))
    return merged


def resolve_threads() -> int:
    """Worker count from ``OPSPEC_THREADS``, defaulting to the CPU count."""
    raw = os.environ.get(_THREADS_ENV)
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        logger.warning("Ignoring invalid %s=%r, using 1 thread", _THREADS_ENV, raw)
        return 1
    return value


def pair_engines(
    analytic: Sequence[Eigenvalue], discrete: Sequence[Eigenvalue]
) -> list[PairingRow]:
    """Match each analytic eigenvalue to the nearest discrete one of the same block."""
    rows = []
    for ev in analytic:
        candidates = [d for d in discrete if d.block_index == ev.block_index]
        partner = nearest(candidates, ev.value)
        rows.append(
            PairingRow(
                block_index=ev.block_index,
                analytic=ev.value,
                discrete=None if partner is None else partner.value,
                deviation=math.inf if partner is None else abs(partner.value - ev.value),
            )
        )
    return rows


def solve_problem(
    problem: MultipointProblem,
    engine: str = "analytic",
    region: SearchRegion | None = None,
    m: int = 201,
    tol: float = 1e-8,
    cap: int = DEFAULT_CAP,
) -> SpectrumReport:
    """Per-block spectra by one or both engines, plus their union.

    Blocks are independent and run on a thread pool capped by
    ``OPSPEC_THREADS``. Results keep block order whatever the completion
    order.
    """
    if engine not in ENGINES:
        msg = f"Unknown engine {engine!r}. Valid engines: {list(ENGINES)}"
        raise ValueError(msg)
    region = region or SearchRegion()
    engines = ["analytic", "discrete"] if engine == "both" else [engine]

    def run(name: str, block: Block, boundary: BoundaryUnitary) -> list[Eigenvalue]:
        if name == "analytic":
            return det_root_search(block, boundary, region, tol=tol)
        return discrete_spectrum(block, boundary, m, region=region, cap=cap)

    report = SpectrumReport(engines=engines, normal=problem.normal)
    with ThreadPoolExecutor(max_workers=resolve_threads()) as pool:
        futures = {
            name: [
                pool.submit(run, name, block, boundary)
                for block, boundary in zip(problem.blocks, problem.boundaries, strict=True)
            ]
            for name in engines
        }
        for name in engines:
            per_block = [f.result() for f in futures[name]]
            for spectrum in per_block:
                report.eigenvalues.extend(spectrum)
            report.aggregate[name] = aggregate_spectrum(per_block)

    if engine == "both":
        analytic = [ev for ev in report.eigenvalues if ev.engine == "analytic"]
        discrete = [ev for ev in report.eigenvalues if ev.engine == "discrete"]
        report.pairings = pair_engines(analytic, discrete)
    logger.info(
        "Solved %d block(s) with %s: %d per-block value(s)",
        problem.size,
        engine,
        len(report.eigenvalues),
    )
    return report


# --------------------------------------------------------------------------- #
# Coefficient growth and the counterexample
# --------------------------------------------------------------------------- #


def bounded_coefficient_check(problem: MultipointProblem, bound: float) -> tuple[float, bool]:
    """(sup_n ||A_n||, whether it respects ``bound``)."""
    sup = max(float(b.coefficient.alpha[-1]) for b in problem.blocks)
    return sup, sup <= bound


def _default_c(n: int, length: float) -> float:
    return math.sqrt(8.0 / (3.0 * length)) * n


@dataclasses.dataclass(frozen=True)
class CounterexampleSpec:
    """Blocks with u_n(t) = c_n sin^2(n pi (t - a_n) / l) f_n and ||f_n|| = alpha_n.

    Blocks sit on consecutive intervals of length ``length`` starting at 0,
    with A_n = E and f_n = alpha_n e_1. Since the integral of sin^4 over a
    block is 3 l / 8, ``||u_n||^2 = (3/8) alpha_n^2 c_n^2 l``. The defaults
    make every term 1, so the partial sums grow like N and (u_n) is not
    square summable although each u_n lies in its minimal domain.
    """

    count: int
    alpha: Callable[[int], float] = lambda n: 1.0 / n
    c: Callable[[int, float], float] = _default_c
    length: float = 1.0
    dim: int = 1

    def __post_init__(self) -> None:
        if self.count < 1:
            msg = f"Counterexample needs at least one block, got {self.count}"
            raise ValueError(msg)
        if not self.length > 0:
            msg = f"Block length must be positive, got {self.length}"
            raise ValueError(msg)

    @classmethod
    def with_alpha_power(cls, count: int, power: float, **kwargs) -> CounterexampleSpec:
        """alpha_n = n^(-power)."""
        return cls(count, alpha=lambda n: float(n) ** (-power), **kwargs)

    def block(self, n: int) -> Block:
        a = (n - 1) * self.length
        return Block(n, Interval(a, a + self.length), CoefficientMatrix(np.eye(self.dim)))

    def profile(self, n: int, m: int) -> GridFunction:
        block = self.block(n)
        s = (block.interval.nodes(m) - block.interval.a) / self.length
        values = np.zeros((m, self.dim), dtype=complex)
        values[:, 0] = self.alpha(n) * self.c(n, self.length) * np.sin(n * math.pi * s) ** 2
        return GridFunction(block, values)

    def closed_form_norm(self, n: int) -> float:
        return 0.375 * self.alpha(n) ** 2 * self.c(n, self.length) ** 2 * self.length


@dataclasses.dataclass(frozen=True)
class CounterexampleNorms:
    norms: tuple[float, ...]
    partial_sums: tuple[float, ...]
    quadrature: tuple[float, ...]
    max_relative_gap: float

    @property
    def partial_sum(self) -> float:
        return self.partial_sums[-1]


def counterexample_norms(spec: CounterexampleSpec, m: int = 401) -> CounterexampleNorms:
    """Closed-form ||u_n||^2 per block, cross-checked by trapezoid quadrature."""
    norms, quad, gaps = [], [], []
    for n in range(1, spec.count + 1):
        exact = spec.closed_form_norm(n)
        u = spec.profile(n, max(m, 40 * n + 1))
        approx = inner_product(u, u).real
        norms.append(exact)
        quad.append(approx)
        gaps.append(abs(approx - exact) / exact if exact else abs(approx))
    worst = max(gaps)
    if worst > 1e-6:
        logger.warning("Counterexample quadrature deviates by %.3e (relative)", worst)
    return CounterexampleNorms(
        norms=tuple(norms),
        partial_sums=tuple(float(s) for s in np.cumsum(norms)),
        quadrature=tuple(quad),
        max_relative_gap=worst,
    )


@dataclasses.dataclass(frozen=True)
class MembershipReport:
    """Partial sums of ||u_n||^2 at selected N and their log-log growth exponent."""

    n_list: tuple[int, ...]
    partial_sums: tuple[float, ...]
    exponent: float

    @property
    def divergent(self) -> bool:
        return self.exponent >= DIVERGENCE_EXPONENT


def direct_sum_membership(norm_sequence: Sequence[float], n_list: Sequence[int]) -> MembershipReport:
    """Estimate whether sum ||u_n||^2 converges from its growth on ``n_list``.

    A slope near 1 of log(S_N) against log(N) means linear growth; an
    all-zero or flattening sequence gives a slope near 0.
    """
    norms = np.asarray(norm_sequence, dtype=float)
    if np.any(norms < 0):
        msg = "Norm sequence must be nonnegative"
        raise ValueError(msg)
    if any(n < 1 or n > norms.shape[0] for n in n_list):
        msg = f"Every N must lie in 1..{norms.shape[0]}, got {list(n_list)}"
        raise ValueError(msg)
    cumulative = np.cumsum(norms)
    sums = tuple(float(cumulative[n - 1]) for n in n_list)
    points = [(math.log(n), math.log(s)) for n, s in zip(n_list, sums, strict=True) if s > 0]
    exponent = 0.0
    if len({x for x, _ in points}) >= 2:
        xs, ys = zip(*points, strict=True)
        exponent = float(np.polyfit(xs, ys, 1)[0])
    logger.debug("Membership exponent %.3f over N=%s", exponent, list(n_list))
    return MembershipReport(n_list=tuple(n_list), partial_sums=sums, exponent=exponent)
