"""Tests for Eigenvalue, SpectrumReport and their serializations."""

from __future__ import annotations

import json
import math

import pytest

from structflo.opspec._results import (
    CSV_HEADER,
    Eigenvalue,
    PairingRow,
    SearchRegion,
    SpectrumReport,
)


def _make_report() -> SpectrumReport:
    eigs = [
        Eigenvalue(39.47841760435743 + 1j, 2, multiplicity=2, residual=1e-13),
        Eigenvalue(1j, 1, residual=0.0),
        Eigenvalue(1j, 2, residual=2e-14),
        Eigenvalue(1.0000001j, 1, engine="discrete", residual=3e-12),
    ]
    union = [
        Eigenvalue(1j, 1, multiplicity=2, blocks=(1, 2)),
        Eigenvalue(39.47841760435743 + 1j, 2, multiplicity=2),
    ]
    return SpectrumReport(
        engines=["analytic", "discrete"],
        eigenvalues=eigs,
        aggregate={"analytic": union, "discrete": [Eigenvalue(1.0000001j, 1, engine="discrete")]},
        pairings=[
            PairingRow(1, 1j, 1.0000001j, 1e-7),
            PairingRow(2, 39.47841760435743 + 1j, None, math.inf),
        ],
    )


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


class TestSearchRegion:
    def test_contains(self):
        region = SearchRegion(0.0, 10.0, 0.0, 2.0)
        assert region.contains(5 + 1j)
        assert not region.contains(11 + 1j)
        assert region.contains(10.0000005 + 1j, slack=1e-6)

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="im_min < im_max"):
            SearchRegion(im_min=3.0, im_max=3.0)

    @pytest.mark.parametrize("scan", [{"scan_re": 1}, {"scan_re": 7}, {"scan_im": 7}])
    def test_rejects_coarse_scan(self, scan):
        with pytest.raises(ValueError, match="at least 8 x 8"):
            SearchRegion(**scan)

    def test_minimal_scan(self):
        region = SearchRegion(scan_re=8, scan_im=8)
        assert (region.scan_re, region.scan_im) == (8, 8)


class TestEigenvalue:
    def test_blocks_default_to_own_index(self):
        assert Eigenvalue(1j, 3).blocks == (3,)

    def test_value_coerced_to_complex(self):
        assert isinstance(Eigenvalue(2.0, 1).value, complex)

    def test_rejects_zero_multiplicity(self):
        with pytest.raises(ValueError, match="Multiplicity"):
            Eigenvalue(1j, 1, multiplicity=0)

    def test_dict_round_trip(self):
        ev = Eigenvalue(2 + 3j, 4, multiplicity=2, residual=1e-9, engine="discrete", defective=True)
        assert Eigenvalue.from_dict(ev.to_dict()) == ev


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


class TestSpectrumReport:
    def test_csv_header(self):
        lines = _make_report().to_csv().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)

    def test_csv_row_order(self):
        lines = _make_report().to_csv().splitlines()[1:]
        prefixes = [tuple(line.split(",")[:2]) for line in lines]
        assert prefixes == [
            ("1", "analytic"),
            ("1", "discrete"),
            ("2", "analytic"),
            ("2", "analytic"),
            ("union", "analytic"),
            ("union", "analytic"),
            ("union", "discrete"),
        ]

    def test_csv_number_format(self):
        lines = _make_report().to_csv().splitlines()
        assert lines[1] == "1,analytic,0,1,1,0"
        assert lines[4] == "2,analytic,39.4784176043574,1,2,1e-13"

    def test_union_multiplicity(self):
        union = [line for line in _make_report().to_csv().splitlines() if line.startswith("union")]
        assert union[0].split(",")[4] == "2"

    def test_pairing_csv(self):
        lines = _make_report().pairings_to_csv().splitlines()
        assert lines[0] == "block,re_analytic,im_analytic,re_discrete,im_discrete,deviation"
        assert lines[1] == "1,0,1,0,1.0000001,1e-07"
        assert lines[2] == "2,39.4784176043574,1,,,"

    def test_json_round_trip(self):
        report = _make_report()
        restored = SpectrumReport.from_json(report.to_json())
        assert restored.eigenvalues == report.eigenvalues
        assert restored.aggregate == report.aggregate
        assert restored.engines == report.engines
        assert restored.pairings[0] == report.pairings[0]
        assert restored.pairings[1].discrete is None

    def test_json_is_strict(self):
        def reject(token):
            raise AssertionError(f"non-standard JSON constant {token}")

        data = json.loads(_make_report().to_json(), parse_constant=reject)
        assert data["pairings"][1]["deviation"] is None
        assert data["pairings"][0]["deviation"] == pytest.approx(1e-7)

    def test_unpaired_deviation_restored_as_inf(self):
        restored = SpectrumReport.from_json(_make_report().to_json())
        assert math.isinf(restored.pairings[1].deviation)
        assert restored.pairings[1] == _make_report().pairings[1]

    def test_json_is_stable(self):
        text = _make_report().to_json()
        assert text == _make_report().to_json()
        assert list(json.loads(text)) == sorted(json.loads(text))

    def test_empty_report(self):
        report = SpectrumReport(engines=["analytic"])
        assert report.to_csv() == ",".join(CSV_HEADER) + "\n"

    def test_to_dataframe_requires_pandas(self, monkeypatch):
        import builtins

        real_import = builtins.__import__

        def mock_import(name, *args, **kwargs):
            if name == "pandas":
                raise ImportError("no pandas")
            return real_import(name, *args, **kwargs)

        monkeypatch.setattr(builtins, "__import__", mock_import)
        with pytest.raises(ImportError, match="pandas"):
            _make_report().to_dataframe()

    def test_to_dataframe_shape(self):
        pytest.importorskip("pandas")
        df = _make_report().to_dataframe()
        assert len(df) == 7
        assert list(df.columns) == list(CSV_HEADER)
