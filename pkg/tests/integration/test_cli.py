"""Integration tests for the command-line front end."""

import cmath
import csv
import io
import json
import math

import pytest

from abflux.cli import main


def _csv_rows(text):
    """Header and data rows of CLI CSV output, with comment lines dropped."""
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    header, *rows = list(csv.reader(io.StringIO("\n".join(lines))))
    return header, rows


def _comments(text):
    return [line[2:] for line in text.splitlines() if line.startswith("# ")]


class TestSpectrumCommand:
    """Tests for `abflux spectrum`."""

    def test_double_root(self, capsys):
        assert main(["spectrum", "--alpha", "0.5", "--u", "-1", "--v", "-1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["count"] == 2
        assert len(payload["states"]) == 1
        state = payload["states"][0]
        assert state["multiplicity"] == 2
        assert state["p"] == pytest.approx(1.0, rel=1e-9)
        assert state["energy"] == pytest.approx(-1.0, rel=1e-9)
        assert payload["parameters"] == {
            "alpha": 0.5,
            "u": -1.0,
            "v": -1.0,
            "w_re": 0.0,
            "w_im": 0.0,
        }

    def test_no_bound_states(self, capsys):
        assert main(["spectrum", "--alpha", "0.5", "--u", "1", "--v", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["count"] == 0
        assert payload["states"] == []

    def test_pure_coupling_root(self, capsys):
        assert main(["spectrum", "--alpha", "0.3", "--w-re", "2"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["count"] == 1
        assert payload["states"][0]["p"] == pytest.approx(1.0, rel=1e-9)

    def test_csv_output(self, capsys):
        assert main(["spectrum", "--alpha", "0.3", "--w-re", "2", "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert _comments(out) == ["count=1"]
        header, rows = _csv_rows(out)
        assert header == ["p", "energy", "multiplicity", "xi_re", "xi_im", "eta_re", "eta_im"]
        assert len(rows) == 1
        assert float(rows[0][0]) == pytest.approx(1.0, rel=1e-9)
        assert rows[0][2] == "1"

    def test_charts_agree(self, capsys):
        assert main(["spectrum", "--alpha", "0.5", "--omega", "0", "--q", "1"]) == 0
        from_unitary = json.loads(capsys.readouterr().out)
        u = repr(-math.sqrt(2.0))
        assert main(["spectrum", "--alpha", "0.5", "--u", u, "--v", u]) == 0
        from_lambda = json.loads(capsys.readouterr().out)
        assert from_unitary["count"] == from_lambda["count"] == 2
        assert from_unitary["parameters"]["u"] == pytest.approx(-math.sqrt(2.0), rel=1e-12)
        assert from_unitary["states"][0]["p"] == pytest.approx(
            from_lambda["states"][0]["p"], rel=1e-9
        )
        assert from_lambda["states"][0]["p"] == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-9)

    def test_eigenfunction_dump(self, capsys):
        argv = [
            "spectrum",
            "--alpha", "0.5",
            "--u", "-1",
            "--v", "-1",
            "--eigenfunction",
            "--r-count", "3",
            "--theta-count", "2",
        ]
        assert main(argv) == 0
        out = capsys.readouterr().out
        assert _comments(out)[0].startswith("p=")
        header, rows = _csv_rows(out)
        assert header == ["r", "theta", "re", "im"]
        assert len(rows) == 6
        assert float(rows[0][0]) == pytest.approx(0.01)
        assert float(rows[-1][0]) == pytest.approx(10.0)

    def test_eigenfunction_without_states(self, capsys):
        argv = ["spectrum", "--alpha", "0.5", "--u", "1", "--eigenfunction"]
        assert main(argv) == 0
        out = capsys.readouterr().out
        assert _comments(out) == ["no bound states"]
        assert _csv_rows(out)[1] == []

    def test_bad_state_index(self, capsys):
        argv = ["spectrum", "--alpha", "0.3", "--w-re", "2", "--eigenfunction", "--state", "1"]
        assert main(argv) == 2

    def test_singular_unitary_chart(self, capsys):
        assert main(["spectrum", "--alpha", "0.5", "--omega", "0", "--q", "0"]) == 3

    @pytest.mark.parametrize("u,momenta", [("1", []), ("-1", [0.5])])
    def test_det_lambda_zero(self, u, momenta, capsys):
        # alpha = 1/2, |w| = 2, |u| = |v| = 1 gives det Lambda = 0
        argv = ["spectrum", "--alpha", "0.5", "--u", u, "--v", u, "--w-re", "2"]
        assert main(argv) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["count"] == len(momenta)
        assert [s["p"] for s in payload["states"]] == pytest.approx(momenta, rel=1e-9)

    def test_mixed_charts(self, capsys):
        assert main(["spectrum", "--alpha", "0.5", "--u", "1", "--omega", "1"]) == 2

    @pytest.mark.parametrize("alpha", ["0", "1", "1.5", "-0.2"])
    def test_flux_out_of_range(self, alpha, capsys):
        assert main(["spectrum", "--alpha", alpha]) == 2

    def test_missing_alpha(self, capsys):
        assert main(["spectrum", "--u", "1"]) == 2

    def test_root_beyond_supported_range(self, capsys):
        assert main(["spectrum", "--alpha", "0.001", "--v", "-0.1"]) == 1
        assert "supported range" in capsys.readouterr().err


class TestSmatrixCommand:
    """Tests for `abflux smatrix`."""

    def test_pure_flux_rows(self, capsys):
        alpha = 0.3
        argv = ["smatrix", "--alpha", str(alpha), "--k-min", "0.1", "--k-max", "10"]
        argv += ["--k-count", "3"]
        assert main(argv) == 0
        out = capsys.readouterr().out
        assert _comments(out) == ["alpha=0.3"]
        header, rows = _csv_rows(out)
        assert header[0] == "k" and header[-1] == "unitarity_deficit"
        assert [float(row[0]) for row in rows] == pytest.approx([0.1, 1.0, 10.0])
        e = cmath.exp(1j * math.pi * alpha)
        for row in rows:
            values = [float(x) for x in row[1:9]]
            s11 = complex(values[0], values[1])
            s22 = complex(values[6], values[7])
            assert s11 == pytest.approx(e, abs=1e-12)
            assert s22 == pytest.approx(1.0 / e, abs=1e-12)
            assert values[2:6] == pytest.approx([0.0] * 4, abs=1e-12)
            assert float(row[9]) < 1e-12

    def test_pure_coupling_example(self, capsys):
        assert main(["smatrix", "--alpha", "0.5", "--k", "1", "--w", "2"]) == 0
        _, rows = _csv_rows(capsys.readouterr().out)
        values = [float(x) for x in rows[0][1:9]]
        assert values == pytest.approx([0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0], abs=1e-12)

    def test_json_output(self, capsys):
        assert main(["smatrix", "--alpha", "0.5", "--k", "1", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["parameters"]["alpha"] == 0.5
        assert len(payload["rows"]) == 1
        assert len(payload["rows"][0]["entries"]) == 4

    def test_output_is_deterministic(self, tmp_path, capsys):
        paths = [tmp_path / "first.csv", tmp_path / "second.csv"]
        for path in paths:
            argv = ["smatrix", "--alpha", "0.41", "--u", "-2", "--v", "0.7", "--w-im", "1.5"]
            assert main([*argv, "--out", str(path)]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert capsys.readouterr().out == ""

    def test_rejects_non_positive_k(self, capsys):
        assert main(["smatrix", "--alpha", "0.5", "--k", "0"]) == 2


class TestXsectionCommand:
    """Tests for `abflux xsection`."""

    def test_pure_flux_backward(self, capsys):
        assert main(["xsection", "--alpha", "0.5", "--theta-count", "1"]) == 0
        out = capsys.readouterr().out
        header, rows = _csv_rows(out)
        assert header == ["theta", "dsigma_dtheta", "re_S", "im_S"]
        assert float(rows[0][0]) == pytest.approx(math.pi)
        assert float(rows[0][1]) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)
        assert any(comment.startswith("delta_coefficient=") for comment in _comments(out))

    def test_default_grid_avoids_forward_direction(self, capsys):
        assert main(["xsection", "--alpha", "0.37", "--u", "1", "--theta0", "0.5"]) == 0
        _, rows = _csv_rows(capsys.readouterr().out)
        assert len(rows) == 360
        assert all(float(row[1]) >= 0.0 for row in rows)

    def test_forward_direction(self, capsys):
        argv = ["xsection", "--alpha", "0.5", "--theta-min", "0", "--theta-max", "1"]
        assert main(argv) == 4

    def test_forward_cone_from_environment(self, monkeypatch, capsys):
        monkeypatch.setenv("ABFLUX_FORWARD_CONE", "0.1")
        argv = ["xsection", "--alpha", "0.5", "--theta-min", "0.05", "--theta-max", "1"]
        assert main(argv) == 4


class TestSweepCommand:
    """Tests for `abflux sweep`."""

    GRID = ["--u-min", "-1", "--u-max", "1", "--u-count", "3"] + [
        "--v-min", "-1", "--v-max", "1", "--v-count", "3"
    ]

    def test_counts(self, capsys):
        assert main(["sweep", "--alpha", "0.5", *self.GRID]) == 0
        header, rows = _csv_rows(capsys.readouterr().out)
        assert header[:6] == ["u", "v", "w_abs", "count", "p1", "p2"]
        counts = [int(row[3]) for row in rows]
        assert counts == [2, 1, 1, 1, 0, 0, 1, 0, 0]
        first = rows[0]
        assert float(first[4]) == pytest.approx(1.0, rel=1e-9)
        assert float(first[5]) == pytest.approx(1.0, rel=1e-9)
        assert rows[4][4] == "" and rows[4][5] == ""

    def test_json_output(self, capsys):
        argv = ["sweep", "--alpha", "0.5", *self.GRID, "--format", "json", "--k", "2"]
        assert main(argv) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["k"] == 2.0
        assert len(payload["rows"]) == 9
        assert payload["rows"][4]["p1"] is None

    def test_worker_pool_matches_serial(self, monkeypatch, capsys):
        assert main(["sweep", "--alpha", "0.3", *self.GRID]) == 0
        serial = capsys.readouterr().out
        monkeypatch.setenv("ABFLUX_WORKERS", "4")
        assert main(["sweep", "--alpha", "0.3", *self.GRID]) == 0
        assert capsys.readouterr().out == serial

    def test_point_limit(self, monkeypatch, capsys):
        monkeypatch.setenv("ABFLUX_MAX_SWEEP_POINTS", "4")
        assert main(["sweep", "--alpha", "0.5", *self.GRID]) == 2

    def test_rejects_bad_grid(self, capsys):
        assert main(["sweep", "--alpha", "0.5", "--u-min", "1", "--u-max", "-1"]) == 2
        assert main(["sweep", "--alpha", "0.5", "--w-abs-count", "0"]) == 2

    def test_single_point_matches_spectrum(self, capsys):
        u, v, w_abs, phase = -1.5, -0.7, 0.9, 0.4
        point = ["--u-min", str(u), "--u-max", str(u), "--v-min", str(v), "--v-max", str(v)]
        point += ["--w-abs-min", str(w_abs), "--w-abs-max", str(w_abs), "--w-phase", str(phase)]
        assert main(["sweep", "--alpha", "0.37", *point, "--format", "json"]) == 0
        (row,) = json.loads(capsys.readouterr().out)["rows"]

        w = w_abs * cmath.exp(1j * phase)
        argv = ["spectrum", "--alpha", "0.37", "--u", str(u), "--v", str(v)]
        argv += ["--w-re", repr(w.real), "--w-im", repr(w.imag)]
        assert main(argv) == 0
        payload = json.loads(capsys.readouterr().out)
        momenta = [s["p"] for s in payload["states"] for _ in range(s["multiplicity"])]

        assert row["count"] == payload["count"]
        found = [p for p in (row["p1"], row["p2"]) if p is not None]
        assert found == pytest.approx(momenta, rel=1e-12)

    def test_unresolved_point_keeps_empty_count(self, capsys):
        argv = ["sweep", "--alpha", "0.001", "--v-min", "-0.1", "--v-max", "0.1"]
        argv += ["--v-count", "2"]
        assert main(argv) == 0
        header, rows = _csv_rows(capsys.readouterr().out)
        assert [row[3] for row in rows] == ["", "0"]
        assert rows[0][4] == "" and rows[0][5] == ""


class TestSpecfunCommand:
    """Tests for `abflux specfun`."""

    def test_gamma(self, capsys):
        assert main(["specfun", "--function", "gamma", "--x", "2.5"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["function"] == "gamma"
        assert payload["value"] == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-13)

    @pytest.mark.parametrize("x", ["0", "3", "5"])
    def test_gamma_outside_domain(self, x, capsys):
        assert main(["specfun", "--function", "gamma", "--x", x]) == 2

    def test_bessel_k(self, capsys):
        assert main(["specfun", "--function", "bessel_k", "--nu", "1", "--x", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == pytest.approx(0.6019072301972346, rel=1e-12)

    def test_unknown_function(self, capsys):
        assert main(["specfun", "--function", "zeta", "--x", "2"]) == 2


class TestSettingsErrors:
    """Invalid environment settings stop the CLI before any work."""

    def test_bad_worker_count(self, monkeypatch, capsys):
        monkeypatch.setenv("ABFLUX_WORKERS", "none")
        assert main(["specfun", "--function", "gamma", "--x", "2"]) == 2
        assert "ABFLUX_WORKERS" in capsys.readouterr().err
