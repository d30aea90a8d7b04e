"""Result types shared by the analytic and discrete spectral engines."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    import pandas as pd

CSV_HEADER: tuple[str, ...] = ("block", "engine", "re_lambda", "im_lambda", "multiplicity", "residual")


def _fmt(value: float) -> str:
    return format(value, ".15g")


@dataclasses.dataclass(frozen=True)
class SearchRegion:
    """Axis-aligned rectangle of the complex plane plus a scan resolution."""

    re_min: float = 0.0
    re_max: float = 50.0
    im_min: float = 0.0
    im_max: float = 3.0
    scan_re: int = 40
    scan_im: int = 20

    def __post_init__(self) -> None:
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            msg = (
                f"Search region must have re_min < re_max and im_min < im_max, got "
                f"[{self.re_min}, {self.re_max}] x [{self.im_min}, {self.im_max}]"
            )
            raise ValueError(msg)
        if self.scan_re < 8 or self.scan_im < 8:
            msg = f"Scan grid needs at least 8 x 8 points, got {self.scan_re} x {self.scan_im}"
            raise ValueError(msg)

    def contains(self, lam: complex, slack: float = 0.0) -> bool:
        return (
            self.re_min - slack <= lam.real <= self.re_max + slack
            and self.im_min - slack <= lam.imag <= self.im_max + slack
        )


@dataclasses.dataclass(frozen=True)
class Eigenvalue:
    """One eigenvalue of a block operator (or of the direct sum after aggregation).

    ``blocks`` lists every contributing block; it holds just ``block_index``
    unless the value was merged across blocks.
    """

    value: complex
    block_index: int
    multiplicity: int = 1
    residual: float = 0.0
    engine: str = "analytic"
    admissible: bool = True
    defective: bool = False
    blocks: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.multiplicity < 1:
            msg = f"Multiplicity must be >= 1, got {self.multiplicity}"
            raise ValueError(msg)
        object.__setattr__(self, "value", complex(self.value))
        if not self.blocks:
            object.__setattr__(self, "blocks", (self.block_index,))

    def to_dict(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "block_index": self.block_index,
            "multiplicity": self.multiplicity,
            "residual": self.residual,
            "engine": self.engine,
            "admissible": self.admissible,
            "defective": self.defective,
            "blocks": list(self.blocks),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Eigenvalue:
        return cls(
            value=complex(data["re"], data["im"]),
            block_index=data["block_index"],
            multiplicity=data["multiplicity"],
            residual=data["residual"],
            engine=data["engine"],
            admissible=data["admissible"],
            defective=data["defective"],
            blocks=tuple(data["blocks"]),
        )


def sort_key(ev: Eigenvalue) -> tuple[float, float]:
    return (ev.value.real, ev.value.imag)


@dataclasses.dataclass(frozen=True)
class PairingRow:
    """An analytic eigenvalue matched to its nearest discrete partner."""

    block_index: int
    analytic: complex
    discrete: complex | None
    deviation: float

    def to_dict(self) -> dict:
        return {
            "block_index": self.block_index,
            "analytic": [self.analytic.real, self.analytic.imag],
            "discrete": None if self.discrete is None else [self.discrete.real, self.discrete.imag],
            "deviation": None if math.isinf(self.deviation) else self.deviation,
        }

    @classmethod
    def from_dict(cls, data: dict) -> PairingRow:
        disc = data["discrete"]
        return cls(
            block_index=data["block_index"],
            analytic=complex(*data["analytic"]),
            discrete=None if disc is None else complex(*disc),
            deviation=math.inf if data["deviation"] is None else data["deviation"],
        )


@dataclasses.dataclass
class SpectrumReport:
    """Per-block and aggregated spectra of one multipoint problem.

    Attributes:
        engines: Engines that produced the rows, in run order.
        eigenvalues: Per-block eigenvalues from every engine.
        aggregate: Union over blocks, one list per engine.
        pairings: Cross-engine matches, filled only when both engines ran.
        normal: Whether every block's boundary unitary is admissible.
    """

    engines: list[str]
    eigenvalues: list[Eigenvalue] = dataclasses.field(default_factory=list)
    aggregate: dict[str, list[Eigenvalue]] = dataclasses.field(default_factory=dict)
    pairings: list[PairingRow] = dataclasses.field(default_factory=list)
    normal: bool = True

    def rows(self) -> list[tuple[str, str, float, float, int, float]]:
        """CSV rows: per-block rows by (block, Re, Im, engine), then union rows."""
        per_block = sorted(
            self.eigenvalues,
            key=lambda e: (e.block_index, e.value.real, e.value.imag, e.engine),
        )
        out = [
            (str(e.block_index), e.engine, e.value.real, e.value.imag, e.multiplicity, e.residual)
            for e in per_block
        ]
        for engine in self.engines:
            for e in self.aggregate.get(engine, []):
                out.append(
                    ("union", engine, e.value.real, e.value.imag, e.multiplicity, e.residual)
                )
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for block, engine, re, im, mult, res in self.rows():
            writer.writerow([block, engine, _fmt(re), _fmt(im), mult, _fmt(res)])
        return buf.getvalue()

    def pairings_to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["block", "re_analytic", "im_analytic", "re_discrete", "im_discrete", "deviation"])
        for p in self.pairings:
            disc = ("", "") if p.discrete is None else (_fmt(p.discrete.real), _fmt(p.discrete.imag))
            dev = "" if math.isinf(p.deviation) else _fmt(p.deviation)
            writer.writerow(
                [p.block_index, _fmt(p.analytic.real), _fmt(p.analytic.imag), *disc, dev]
            )
        return buf.getvalue()

    def to_dict(self) -> dict:
        """Serialize to a plain dictionary."""
        return {
            "engines": list(self.engines),
            "normal": self.normal,
            "eigenvalues": [e.to_dict() for e in self.eigenvalues],
            "aggregate": {k: [e.to_dict() for e in v] for k, v in self.aggregate.items()},
            "pairings": [p.to_dict() for p in self.pairings],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> SpectrumReport:
        return cls(
            engines=list(data["engines"]),
            eigenvalues=[Eigenvalue.from_dict(e) for e in data["eigenvalues"]],
            aggregate={
                k: [Eigenvalue.from_dict(e) for e in v] for k, v in data["aggregate"].items()
            },
            pairings=[PairingRow.from_dict(p) for p in data["pairings"]],
            normal=data["normal"],
        )

    @classmethod
    def from_json(cls, text: str) -> SpectrumReport:
        return cls.from_dict(json.loads(text))

    def to_dataframe(self) -> pd.DataFrame:
        """Return the CSV rows as a pandas DataFrame.

        Requires pandas to be installed: pip install structflo-opspec[dataframe]
        """
        try:
            import pandas as pd  # pylint: disable=import-outside-toplevel
        except ImportError as exc:
            raise ImportError(
                "pandas is required for to_dataframe(). "
                "Install it with: pip install structflo-opspec[dataframe]"
            ) from exc

        return pd.DataFrame(self.rows(), columns=list(CSV_HEADER))
