"""Problem configuration: parsing, validation, and bundled presets.

A config describes a multipoint problem as JSON (or YAML) text::

    {
      "schema_version": "1",
      "blocks": [
        {"interval": [0, 1], "A": {"re": [[2]], "im": [[0]]}, "W": {"kind": "periodic"}}
      ],
      "grid": {"m": 201},
      "search": {"re": [0, 50], "im": [0, 3], "scan": [40, 20]},
      "tolerances": {"root": 1e-8}
    }

Every matrix invariant is checked while parsing, so a :class:`ProblemConfig`
always converts to a valid :class:`~structflo.opspec.directsum.MultipointProblem`.
Failures raise :class:`~structflo.opspec._errors.ConfigError` naming the
block and field path.

Presets::

    from structflo.opspec.config import list_presets, load_preset

    print(list_presets())
    config = load_preset("periodic_single")
"""

from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path

import numpy as np
import yaml
from rapidfuzz import process

from structflo.opspec._errors import ConfigError, MatrixValidationError, ShapeError
from structflo.opspec._results import SearchRegion
from structflo.opspec.boundary import CANONICAL_KINDS, BoundaryUnitary, canonical_unitary
from structflo.opspec.directsum import MultipointProblem
from structflo.opspec.hilbert import Block, CoefficientMatrix, Interval

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
_PRESET_DIR = Path(__file__).parent / "presets"

_TOP_KEYS = ("schema_version", "blocks", "grid", "search", "tolerances")
_BLOCK_KEYS = ("interval", "A", "W")
_MATRIX_KEYS = ("re", "im")
_W_KEYS = ("kind", "re", "im")
_GRID_KEYS = ("m",)
_SEARCH_KEYS = ("re", "im", "scan")
_TOLERANCE_KEYS = ("root", "normality", "identity", "eigen_cap", "bound")
_W_KINDS = (*CANONICAL_KINDS, "matrix")


@dataclasses.dataclass(frozen=True)
class Tolerances:
    root: float = 1e-8
    normality: float = 1e-8
    identity: float = 1e-4
    eigen_cap: int = 4000
    bound: float | None = None


@dataclasses.dataclass(frozen=True)
class ProblemConfig:
    """Validated problem description."""

    problem: MultipointProblem
    grid_m: int = 201
    search: SearchRegion = dataclasses.field(default_factory=SearchRegion)
    tolerances: Tolerances = dataclasses.field(default_factory=Tolerances)
    schema_version: str = SCHEMA_VERSION
    source: str = "<string>"

    @property
    def blocks(self) -> tuple[Block, ...]:
        return self.problem.blocks

    @property
    def boundaries(self) -> tuple[BoundaryUnitary, ...]:
        return self.problem.boundaries


# --------------------------------------------------------------------------- #
# Validation helpers
# --------------------------------------------------------------------------- #


def _suggest(word: str, choices: tuple[str, ...]) -> str:
    match = process.extractOne(word, choices)
    if match is None or match[1] < 60:
        return ""
    return f" (did you mean {match[0]!r}?)"


def _check_keys(data: dict, allowed: tuple[str, ...], path: str, block: int | None) -> None:
    for key in data:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            msg = f"Unknown key {where!r}{_suggest(str(key), allowed)}"
            raise ConfigError(msg, path=where, block=block)


def _require_dict(value: object, path: str, block: int | None) -> dict:
    if not isinstance(value, dict):
        msg = f"{path} must be an object, got {type(value).__name__}"
        raise ConfigError(msg, path=path, block=block)
    return value


def _real_matrix(value: object, path: str, block: int | None) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        msg = f"{path} must be a matrix of numbers"
        raise ConfigError(msg, path=path, block=block) from exc
    if arr.ndim != 2:
        msg = f"{path} must be a 2-D matrix, got {arr.ndim} dimension(s)"
        raise ConfigError(msg, path=path, block=block)
    return arr


def _complex_matrix(data: dict, path: str, block: int | None) -> np.ndarray:
    if "re" not in data:
        msg = f"{path}.re is required"
        raise ConfigError(msg, path=f"{path}.re", block=block)
    re = _real_matrix(data["re"], f"{path}.re", block)
    im = _real_matrix(data.get("im", np.zeros_like(re)), f"{path}.im", block)
    if re.shape != im.shape:
        msg = f"{path}.re has shape {re.shape} but {path}.im has shape {im.shape}"
        raise ConfigError(msg, path=path, block=block)
    return re + 1j * im


def _pair(value: object, path: str, cast: type = float) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        msg = f"{path} must be a two-element list"
        raise ConfigError(msg, path=path)
    try:
        return cast(value[0]), cast(value[1])
    except (TypeError, ValueError) as exc:
        msg = f"{path} entries must be numbers"
        raise ConfigError(msg, path=path) from exc


def _parse_block(raw: object, number: int) -> tuple[Block, BoundaryUnitary]:
    path = f"blocks[{number}]"
    data = _require_dict(raw, path, number)
    _check_keys(data, _BLOCK_KEYS, path, number)
    for key in _BLOCK_KEYS:
        if key not in data:
            msg = f"block {number}: missing {key!r}"
            raise ConfigError(msg, path=f"{path}.{key}", block=number)

    a, b = _pair(data["interval"], f"{path}.interval")
    try:
        interval = Interval(a, b)
    except ValueError as exc:
        msg = f"block {number}: {exc}"
        raise ConfigError(msg, path=f"{path}.interval", block=number) from exc

    a_data = _require_dict(data["A"], f"{path}.A", number)
    _check_keys(a_data, _MATRIX_KEYS, f"{path}.A", number)
    try:
        coefficient = CoefficientMatrix(_complex_matrix(a_data, f"{path}.A", number))
    except MatrixValidationError as exc:
        msg = f"block {number}: {exc}"
        raise ConfigError(msg, path=f"{path}.A", block=number) from exc

    w_data = _require_dict(data["W"], f"{path}.W", number)
    _check_keys(w_data, _W_KEYS, f"{path}.W", number)
    kind = w_data.get("kind")
    if kind not in _W_KINDS:
        msg = f"block {number}: unknown W kind {kind!r}{_suggest(str(kind), _W_KINDS)}"
        raise ConfigError(msg, path=f"{path}.W.kind", block=number)
    try:
        if kind == "matrix":
            boundary = BoundaryUnitary(_complex_matrix(w_data, f"{path}.W", number))
        else:
            boundary = canonical_unitary(kind, coefficient.dim)
    except MatrixValidationError as exc:
        msg = f"block {number}: {exc}"
        raise ConfigError(msg, path=f"{path}.W", block=number) from exc
    if boundary.dim != coefficient.dim:
        msg = f"block {number}: W is {2 * boundary.dim} x {2 * boundary.dim}, expected {2 * coefficient.dim}"
        raise ConfigError(msg, path=f"{path}.W", block=number)
    return Block(number, interval, coefficient), boundary


def _parse_search(raw: object) -> SearchRegion:
    data = _require_dict(raw, "search", None)
    _check_keys(data, _SEARCH_KEYS, "search", None)
    defaults = SearchRegion()
    re = _pair(data.get("re", [defaults.re_min, defaults.re_max]), "search.re")
    im = _pair(data.get("im", [defaults.im_min, defaults.im_max]), "search.im")
    scan = _pair(data.get("scan", [defaults.scan_re, defaults.scan_im]), "search.scan", int)
    try:
        return SearchRegion(re[0], re[1], im[0], im[1], scan[0], scan[1])
    except ValueError as exc:
        raise ConfigError(str(exc), path="search") from exc


def _parse_tolerances(raw: object) -> Tolerances:
    data = _require_dict(raw, "tolerances", None)
    _check_keys(data, _TOLERANCE_KEYS, "tolerances", None)
    try:
        values = {k: (int(v) if k == "eigen_cap" else float(v)) for k, v in data.items()}
    except (TypeError, ValueError) as exc:
        msg = "tolerances must be numbers"
        raise ConfigError(msg, path="tolerances") from exc
    return Tolerances(**values)


def config_from_dict(data: object, source: str = "<string>") -> ProblemConfig:
    """Validate an already-decoded config mapping."""
    data = _require_dict(data, "config", None)
    _check_keys(data, _TOP_KEYS, "", None)

    version = str(data.get("schema_version", SCHEMA_VERSION))
    if version != SCHEMA_VERSION:
        msg = f"Unsupported schema_version {version!r}, expected {SCHEMA_VERSION!r}"
        raise ConfigError(msg, path="schema_version")

    raw_blocks = data.get("blocks")
    if not isinstance(raw_blocks, list) or not raw_blocks:
        msg = "blocks must be a non-empty list"
        raise ConfigError(msg, path="blocks")
    parsed = [_parse_block(raw, number) for number, raw in enumerate(raw_blocks, start=1)]

    try:
        problem = MultipointProblem(
            blocks=tuple(b for b, _ in parsed), boundaries=tuple(w for _, w in parsed)
        )
    except (ValueError, ShapeError) as exc:
        raise ConfigError(str(exc), path="blocks") from exc

    grid = _require_dict(data.get("grid", {}), "grid", None)
    _check_keys(grid, _GRID_KEYS, "grid", None)
    m = grid.get("m", 201)
    if not isinstance(m, int) or isinstance(m, bool) or m < 5:
        msg = f"grid.m must be an integer >= 5, got {m!r}"
        raise ConfigError(msg, path="grid.m")

    return ProblemConfig(
        problem=problem,
        grid_m=m,
        search=_parse_search(data.get("search", {})),
        tolerances=_parse_tolerances(data.get("tolerances", {})),
        schema_version=version,
        source=source,
    )


# --------------------------------------------------------------------------- #
# Entry points
# --------------------------------------------------------------------------- #


def parse_config(text: str, source: str = "<string>") -> ProblemConfig:
    """Parse and validate JSON config text.

    Raises:
        ConfigError: On malformed JSON (with line and column) or any
            validation failure.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        msg = f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        raise ConfigError(msg, line=exc.lineno) from exc
    return config_from_dict(data, source=source)


def load_config(path: Path | str) -> ProblemConfig:
    """Read a ``.json``, ``.yml`` or ``.yaml`` config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        msg = f"Cannot read config {path}: {exc}"
        raise ConfigError(msg) from exc
    if path.suffix in (".yml", ".yaml"):
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            msg = f"{path}: invalid YAML ({exc})"
            raise ConfigError(msg, line=line) from exc
        return config_from_dict(data, source=str(path))
    return parse_config(text, source=str(path))


def list_presets(directory: Path | str | None = None) -> list[str]:
    """Names (file stems) of the bundled preset problems."""
    directory = Path(directory) if directory else _PRESET_DIR
    return sorted(p.stem for p in directory.glob("*.yml"))


def load_preset(name: str, directory: Path | str | None = None) -> ProblemConfig:
    """Load a bundled preset by name."""
    directory = Path(directory) if directory else _PRESET_DIR
    path = directory / f"{name}.yml"
    if not path.is_file():
        names = tuple(list_presets(directory))
        msg = f"Unknown preset {name!r}{_suggest(name, names)}. Available: {list(names)}"
        raise ConfigError(msg)
    logger.debug("Loading preset %s from %s", name, path)
    return load_config(path)
