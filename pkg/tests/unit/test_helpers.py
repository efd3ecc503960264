"""Tests for helper functions module."""

import io

import pandas as pd
import pytest


class TestJsonResponses:
    """Tests for JSON response helper functions."""

    def test_json_error_default_status(self, app):
        from abflux.helpers import json_error

        with app.app_context():
            response, status = json_error("Something went wrong")
            assert status == 400
            assert response.json["status"] == "error"
            assert response.json["message"] == "Something went wrong"

    def test_json_error_custom_status(self, app):
        from abflux.helpers import json_error

        with app.app_context():
            response, status = json_error("Chart singular", 422)
            assert status == 422
            assert response.json["message"] == "Chart singular"

    def test_json_success_with_extra_data(self, app):
        from abflux.helpers import json_success

        with app.app_context():
            response = json_success("spectrum computed", count=2, states=[])
            assert response.json["status"] == "success"
            assert response.json["count"] == 2
            assert response.json["states"] == []


class TestNumberFormatting:
    """Tests for float and complex formatting."""

    @staticmethod
    def _single_field(value) -> str:
        from abflux.helpers import write_csv

        stream = io.StringIO()
        write_csv([[value, 0]], ["x", "n"], stream)
        return stream.getvalue().splitlines()[1].split(",")[0]

    def test_floats_round_trip(self):
        for value in (0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23):
            assert float(self._single_field(value)) == value

    def test_floats_use_seventeen_digits(self):
        assert self._single_field(0.1) == "0.10000000000000001"

    def test_none_is_empty(self):
        assert self._single_field(None) == ""

    def test_complex_pair(self):
        from abflux.helpers import complex_pair

        assert complex_pair(1.5 - 2j) == [1.5, -2.0]
        assert complex_pair(3) == [3.0, 0.0]


class TestCsvOutput:
    """Tests for write_csv and open_output."""

    def test_write_csv_layout(self):
        from abflux.helpers import write_csv

        stream = io.StringIO()
        write_csv([[0.5, 2, None]], ["p", "count", "p2"], stream, comments=["alpha=0.3"])
        assert stream.getvalue().splitlines() == ["# alpha=0.3", "p,count,p2", "0.5,2,"]

    def test_missing_counts_stay_empty(self):
        from abflux.helpers import write_csv

        stream = io.StringIO()
        write_csv([[0.5, 2], [1.5, None], [2.5, 0]], ["u", "count"], stream)
        assert stream.getvalue().splitlines() == ["u,count", "0.5,2", "1.5,", "2.5,0"]

    def test_header_only_without_rows(self):
        from abflux.helpers import write_csv

        stream = io.StringIO()
        write_csv([], ["r", "theta", "re", "im"], stream, comments=["no bound states"])
        assert stream.getvalue() == "# no bound states\nr,theta,re,im\n"

    def test_reads_back_with_pandas(self):
        from abflux.helpers import write_csv

        rows = [[0.1 * i, i, 1.0 / (i + 1)] for i in range(5)]
        stream = io.StringIO()
        write_csv(rows, ["a", "b", "c"], stream, comments=["k=1.0"])
        stream.seek(0)
        frame = pd.read_csv(stream, comment="#")
        assert frame.columns.tolist() == ["a", "b", "c"]
        assert frame.to_numpy().tolist() == [[float(x) for x in row] for row in rows]

    def test_open_output_writes_file(self, tmp_path):
        from abflux.helpers import open_output

        path = tmp_path / "out.csv"
        with open_output(str(path)) as stream:
            stream.write("k\n")
        assert path.read_text(encoding="utf-8") == "k\n"

    @pytest.mark.parametrize("path", [None, "-"])
    def test_open_output_defaults_to_stdout(self, path, capsys):
        from abflux.helpers import open_output

        with open_output(path) as stream:
            stream.write("hello\n")
        assert capsys.readouterr().out == "hello\n"
