"""Plain-text rendering of check, normality and counterexample reports."""

from __future__ import annotations

from collections.abc import Sequence

from structflo.opspec.boundary import AdmissibilityReport
from structflo.opspec.directsum import CounterexampleNorms, MembershipReport


def _cell(value: object) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format(value, ".6e")
    return str(value)


def format_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    """Left-aligned fixed-width table with a dashed rule under the header."""
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row, strict=True)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths, strict=True)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths, strict=True)).rstrip())
    return "\n".join(lines) + "\n"


def admissibility_table(reports: Sequence[AdmissibilityReport]) -> str:
    rows = [
        (
            n,
            r.unitarity_residual,
            r.conjugated_residual,
            r.commutator_norm,
            "admissible" if r.admissible else "NOT admissible",
        )
        for n, r in enumerate(reports, start=1)
    ]
    return format_table(("block", "W_residual", "V_residual", "commutator", "verdict"), rows)


def bound_table(sup_norm: float, bound: float, bounded: bool) -> str:
    return format_table(("sup_norm", "bound", "bounded"), [(sup_norm, float(bound), bounded)])


def normality_table(rows: Sequence[tuple[int, float, float, float, bool]]) -> str:
    return format_table(
        ("block", "normality_residual", "commutator_defect", "identity_gap", "pass"), rows
    )


def counterexample_text(norms: CounterexampleNorms, membership: MembershipReport) -> str:
    rows = [
        (n, norm, quad, total)
        for n, (norm, quad, total) in enumerate(
            zip(norms.norms, norms.quadrature, norms.partial_sums, strict=True), start=1
        )
    ]
    table = format_table(("n", "norm_sq", "quadrature", "partial_sum"), rows)
    verdict = "divergent" if membership.divergent else "convergent"
    return (
        table
        + f"\npartial_sum {format(norms.partial_sum, '.15g')}\n"
        + f"growth_exponent {format(membership.exponent, '.15g')}\n"
        + f"verdict {verdict}\n"
    )


def plot_data(partial_sums: Sequence[float]) -> str:
    """Two whitespace-separated columns: N and the partial sum up to N."""
    lines = ["# N partial_sum"]
    lines += [f"{n} {format(s, '.15g')}" for n, s in enumerate(partial_sums, start=1)]
    return "\n".join(lines) + "\n"
