"""Tests for the opspec command line."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from structflo.opspec._results import CSV_HEADER
from structflo.opspec.cli import (
    EXIT_CAP,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_PROPERTY,
    build_parser,
    cmd_counterexample,
    main,
)


def _write_config(tmp_path: Path, **overrides) -> Path:
    data = {
        "schema_version": "1",
        "blocks": [{"interval": [0, 1], "A": {"re": [[1]]}, "W": {"kind": "dirichlet"}}],
    }
    data.update(overrides)
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(data))
    return path


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


class TestCheck:
    def test_admissible_preset(self, capsys):
        assert main(["check", "--preset", "mixed_three"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0].split()[0] == "block"
        assert "NOT admissible" not in out
        assert out.count("admissible") == 3

    def test_non_admissible_preset(self, capsys):
        assert main(["check", "--preset", "non_admissible"]) == EXIT_PROPERTY
        assert "NOT admissible" in capsys.readouterr().out

    def test_broken_config(self, tmp_path: Path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"blocks": [')
        assert main(["check", "--config", str(path)]) == EXIT_INPUT
        assert "invalid JSON" in capsys.readouterr().err

    def test_invalid_matrix(self, tmp_path: Path, capsys):
        bad = [{"interval": [0, 1], "A": {"re": [[1, 1], [0, 1]]}, "W": {"kind": "neumann"}}]
        path = _write_config(tmp_path, blocks=bad)
        assert main(["check", "--config", str(path)]) == EXIT_INPUT
        assert "block 1: A not Hermitian" in capsys.readouterr().err

    def test_problem_required(self, capsys):
        assert main(["check"]) == EXIT_INPUT
        assert "--preset" in capsys.readouterr().err

    def test_config_and_preset_conflict(self, tmp_path: Path):
        path = _write_config(tmp_path)
        assert main(["check", "--config", str(path), "--preset", "two_block"]) == EXIT_INPUT

    def test_unknown_preset(self, capsys):
        assert main(["check", "--preset", "periodic_singel"]) == EXIT_INPUT
        assert "periodic_single" in capsys.readouterr().err

    @pytest.mark.parametrize(
        ("bound", "code", "verdict"), [(2.0, EXIT_PROPERTY, "no"), (3.0, EXIT_OK, "yes")]
    )
    def test_coefficient_bound(self, tmp_path: Path, capsys, bound, code, verdict):
        blocks = [
            {"interval": [n - 1, n], "A": {"re": [[n]]}, "W": {"kind": "dirichlet"}}
            for n in (1, 2, 3)
        ]
        path = _write_config(tmp_path, blocks=blocks, tolerances={"bound": bound})
        assert main(["check", "--config", str(path)]) == code
        out = capsys.readouterr().out
        assert "NOT admissible" not in out
        sup, got_bound, bounded = out.splitlines()[-1].split()
        assert float(sup) == pytest.approx(3.0)
        assert float(got_bound) == bound
        assert bounded == verdict

    def test_no_bound_table_by_default(self, capsys):
        assert main(["check", "--preset", "two_block"]) == EXIT_OK
        assert "sup_norm" not in capsys.readouterr().out


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


class TestSpectrum:
    def test_csv_to_stdout(self, capsys):
        assert main(["spectrum", "--preset", "periodic_single"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        block, engine, re, im, mult, _ = lines[1].split(",")
        assert (block, engine, mult) == ("1", "analytic", "1")
        assert abs(complex(float(re), float(im)) - 2j) <= 1e-8

    def test_output_is_deterministic(self, tmp_path: Path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["spectrum", "--preset", "mixed_three", "--engine", "both", "--m", "81"]
        assert main([*args, "--out", str(first)]) == EXIT_OK
        assert main([*args, "--out", str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    def test_union_adds_multiplicities(self, capsys):
        assert main(["spectrum", "--preset", "two_block"]) == EXIT_OK
        union = [
            line.split(",")
            for line in capsys.readouterr().out.splitlines()
            if line.startswith("union")
        ]
        assert [int(row[4]) for row in union] == [2, 4]

    def test_json_format(self, capsys):
        assert main(["spectrum", "--preset", "dirichlet_single", "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["engines"] == ["analytic"]
        assert data["normal"] is True
        values = [complex(e["re"], e["im"]) for e in data["aggregate"]["analytic"]]
        assert len(values) == 2
        assert abs(values[0] - (9.869604401089358 + 1j)) <= 1e-8

    def test_both_engines_write_pairing_file(self, tmp_path: Path):
        out = tmp_path / "spectrum.csv"
        argv = ["spectrum", "--preset", "periodic_single", "--engine", "both", "--out", str(out)]
        assert main(argv) == EXIT_OK
        pairing = (tmp_path / "spectrum.pairing.csv").read_text().splitlines()
        assert pairing[0].startswith("block,re_analytic")
        assert len(pairing) == 3

    def test_pairing_to_stderr_without_out(self, capsys):
        argv = ["spectrum", "--preset", "periodic_single", "--engine", "both", "--m", "81"]
        assert main(argv) == EXIT_OK
        assert capsys.readouterr().err.startswith("block,re_analytic")

    def test_empty_region_gives_header_only(self, tmp_path: Path, capsys):
        path = _write_config(tmp_path, search={"re": [100, 101], "im": [10, 11]})
        assert main(["spectrum", "--config", str(path), "--engine", "discrete"]) == EXIT_OK
        assert capsys.readouterr().out == ",".join(CSV_HEADER) + "\n"

    def test_eigen_cap(self, tmp_path: Path, capsys):
        path = _write_config(tmp_path, tolerances={"eigen_cap": 10})
        assert main(["spectrum", "--config", str(path), "--engine", "discrete"]) == EXIT_CAP
        assert "cap" in capsys.readouterr().err

    def test_unknown_engine_rejected_by_parser(self):
        with pytest.raises(SystemExit) as info:
            main(["spectrum", "--preset", "two_block", "--engine", "spectral"])
        assert info.value.code == 2


# ---------------------------------------------------------------------------
# normality
# ---------------------------------------------------------------------------


class TestNormality:
    def test_canonical_preset_passes(self, capsys):
        assert main(["normality", "--preset", "mixed_three", "--m", "101"]) == EXIT_OK
        rows = capsys.readouterr().out.splitlines()[2:]
        assert len(rows) == 3
        assert all(row.split()[-1] == "yes" for row in rows)

    def test_non_admissible_fails(self, capsys):
        assert main(["normality", "--preset", "non_admissible", "--m", "101"]) == EXIT_PROPERTY
        rows = capsys.readouterr().out.splitlines()[2:]
        assert rows[0].split()[-1] == "no"

    def test_seed_is_reproducible(self, tmp_path: Path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for out in (a, b):
            main(["normality", "--preset", "neumann_diag", "--m", "51", "--seed", "7", "--out", str(out)])
        assert a.read_text() == b.read_text()


# ---------------------------------------------------------------------------
# counterexample
# ---------------------------------------------------------------------------


class TestCounterexample:
    def test_partial_sum(self, capsys):
        assert main(["counterexample", "--N", "5"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "partial_sum 5\n" in out
        assert "verdict divergent" in out

    def test_single_block(self, capsys):
        assert main(["counterexample", "--N", "1"]) == EXIT_OK
        assert "partial_sum 1\n" in capsys.readouterr().out

    def test_faster_decay_converges(self, capsys):
        assert main(["counterexample", "--N", "20", "--alpha-power", "2"]) == EXIT_OK
        assert "verdict convergent" in capsys.readouterr().out

    def test_plot_file(self, tmp_path: Path):
        plot = tmp_path / "sums.dat"
        assert main(["counterexample", "--N", "3", "--plot", str(plot)]) == EXIT_OK
        assert plot.read_text() == "# N partial_sum\n1 1\n2 2\n3 3\n"

    @pytest.mark.parametrize("argv", [["--N", "0"], ["--length", "-1"]])
    def test_invalid_arguments(self, argv):
        assert main(["counterexample", *argv]) == EXIT_INPUT

    def test_command_function(self):
        code, text, plot = cmd_counterexample(4)
        assert code == EXIT_OK
        assert text.splitlines()[0].split() == ["n", "norm_sq", "quadrature", "partial_sum"]
        assert plot.splitlines()[-1] == "4 4"


class TestParser:
    def test_defaults(self):
        args = build_parser().parse_args(["counterexample"])
        assert args.N == 20
        assert args.alpha_power == 1.0
        assert args.length == 1.0

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])
