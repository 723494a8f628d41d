import io
import json

import pytest

from qwishart.cli import run
from qwishart.polynomials import poly_from_json


def capture(argv):
    buf = io.StringIO()
    code = run(argv, out=buf)
    return code, buf.getvalue()


def capture_json(argv):
    code, text = capture(argv)
    assert code == 0, text
    return json.loads(text)


class TestEnumerate:
    def test_count_and_shape(self):
        data = capture_json(["enumerate", "--n", "2"])
        assert data["count"] == 3
        assert data["pairings"][0] == [[1, -1], [2, -2]]

    def test_coloring_filter(self):
        data = capture_json(["enumerate", "--n", "4", "--coloring", "1,2,1,2"])
        assert data["count"] == 9

    def test_byte_identical_runs(self):
        assert capture(["enumerate", "--n", "3"]) == capture(["enumerate", "--n", "3"])

    def test_bound(self):
        code, _ = capture(["enumerate", "--n", "10"])
        assert code == 2


class TestMoment:
    def test_symbolic_table(self):
        data = capture_json(
            ["moment", "--spec", '{"cycle_words":[[1,2],[1,2]]}', "--symbolic"]
        )
        assert data["mode"] == "symbolic"
        assert len(data["result"]["terms"]) == 9

    def test_numeric_exact(self):
        matrices = json.dumps(
            [
                {"B": [["1", "0"], ["0", "1"]], "Sigma": [["1", "0"], ["0", "1"]]},
            ]
        )
        data = capture_json(
            ["moment", "--spec", '{"cycle_words":[[1]]}', "--matrices", matrices]
        )
        assert data["result"] == "4"

    def test_sigma_route_round_trip(self):
        pairs = capture_json(["enumerate", "--n", "3"])["pairings"]
        top_to_bottom = [p for p in pairs if all(a > 0 > b for a, b in p)]
        for pairing in top_to_bottom[:3]:
            data = capture_json(
                [
                    "moment",
                    "--sigma",
                    json.dumps(pairing),
                    "--coloring",
                    "1,1,1",
                    "--symbolic",
                ]
            )
            assert data["sigma"] == pairing

    def test_mode_exclusivity(self):
        code, _ = capture(["moment", "--spec", '{"cycle_words":[[1]]}'])
        assert code == 2

    def test_csv_format(self):
        code, text = capture(
            ["moment", "--spec", '{"cycle_words":[[1,2]]}', "--symbolic", "--format", "csv"]
        )
        assert code == 0
        lines = text.strip().splitlines()
        assert lines[0] == "coeff,atoms"
        assert "tr(B1) tr(B2) tr(S1 S2)" in lines[1]

    def test_threads_flag(self):
        serial = capture_json(
            ["moment", "--spec", '{"cycle_words":[[1,2],[1,2]]}', "--symbolic"]
        )
        threaded = capture_json(
            [
                "moment",
                "--spec",
                '{"cycle_words":[[1,2],[1,2]]}',
                "--symbolic",
                "--threads",
                "3",
            ]
        )
        assert serial["result"] == threaded["result"]


class TestQMoment:
    def test_symbolic_q(self):
        data = capture_json(
            [
                "q-moment",
                "--spec",
                '{"cycle_words":[[1,1]]}',
                "--scalar",
                '{"M": ["M"]}',
            ]
        )
        powers = [t["powers"] for t in data["result"]["terms"]]
        assert {"q": 1, "N": 1, "M": 1} in powers

    def test_rational_q(self):
        data = capture_json(
            [
                "q-moment",
                "--spec",
                '{"cycle_words":[[1,1]]}',
                "--scalar",
                '{"M": [2], "N": 2}',
                "--q",
                "1/2",
            ]
        )
        # M^2 N + M N^2 + q M N = 8 + 8 + 2 = 18
        assert data["result"] == "18"

    def test_scale_factor_poly(self):
        scale = {"M": ["M"], "scale": [{"poly": {"terms": [{"coeff": "1", "powers": {"N": -1}}]}}]}
        data = capture_json(
            ["q-moment", "--spec", '{"cycle_words":[[1]]}', "--scalar", json.dumps(scale)]
        )
        assert poly_from_json(data["result"]).symbols() == {"M"}


class TestFluctuationLimit:
    def test_orders(self):
        data = capture_json(
            ["fluctuation-limit", "--Q", '{"terms":[{"coeff":"1","word":[1]}]}', "--orders", "4"]
        )
        assert [entry["order"] for entry in data["orders"]] == [1, 2, 3, 4]
        assert data["orders"][0]["value"]["terms"] == []
        second = poly_from_json(data["orders"][1]["value"])
        from qwishart.polynomials import MomentPolynomial as P

        assert second == (1 + P.symbol("q")) * P.symbol("lambda")

    def test_poly_coefficient_round_trip(self):
        data = capture_json(
            ["fluctuation-limit", "--Q", '{"terms":[{"coeff":"1","word":[1]}]}', "--orders", "2"]
        )
        coeff = {"poly": data["orders"][1]["value"]}
        q_json = json.dumps({"terms": [{"coeff": coeff, "word": [1]}]})
        data2 = capture_json(["fluctuation-limit", "--Q", q_json, "--orders", "2"])
        assert data2["orders"][1]["value"]["terms"]

    def test_csv(self):
        code, text = capture(
            [
                "fluctuation-limit",
                "--Q",
                '{"terms":[{"coeff":"1","word":[1]}]}',
                "--orders",
                "2",
                "--format",
                "csv",
            ]
        )
        assert code == 0
        assert text.splitlines()[0].startswith("order,coeff")


class TestT5Check:
    def test_zero(self):
        data = capture_json(
            ["t5-check", "--Q", '{"terms":[{"coeff":"1","word":[1]}]}', "--m", "1"]
        )
        assert data["zero"] is True
        assert data["difference"]["terms"] == []


class TestMpCheck:
    def test_flags(self):
        data = capture_json(
            ["mp-check", "--eigenvalues", '["1","4"]', "--N", "2", "--n-max", "4"]
        )
        assert data["all_equal"] is True
        assert [row["n"] for row in data["rows"]] == [1, 2, 3, 4]

    def test_input_object(self):
        data = capture_json(
            ["mp-check", "--input", '{"eigenvalues":["1"],"N":2,"n_max":3}']
        )
        assert data["all_equal"] is True
        assert data["lambda"] == "1/2"

    def test_bad_eigenvalue(self):
        code, _ = capture(["mp-check", "--eigenvalues", '["0"]', "--N", "2", "--n-max", "2"])
        assert code == 2


class TestMcValidate:
    def test_small_run(self):
        matrices = json.dumps([{"B": [[1.0]], "Sigma": [[1.0]]}])
        data = capture_json(
            [
                "mc-validate",
                "--spec",
                '{"cycle_words":[[1]]}',
                "--matrices",
                matrices,
                "--seed",
                "3",
                "--samples",
                "4000",
            ]
        )
        assert data["exact"] == pytest.approx(1.0)
        assert data["z"] <= 4.0

    def test_config_object(self):
        config = json.dumps(
            {
                "seed": 3,
                "samples": 500,
                "spec": {"cycle_words": [[1]]},
                "matrices": [{"B": [[1.0]], "Sigma": [[1.0]]}],
            }
        )
        data = capture_json(["mc-validate", "--config", config])
        assert data["samples"] == 500


class TestTable:
    def test_crossing_sequence(self):
        data = capture_json(["table1"])
        assert [row["cr"] for row in data["rows"]] == [0, 1, 0, 1, 6, 5, 0, 5, 4]


class TestErrorsAndFiles:
    def test_bad_json_names_field(self, capsys):
        code, _ = capture(["moment", "--spec", "{oops", "--symbolic"])
        assert code == 2
        assert "--spec" in capsys.readouterr().err

    def test_at_file_indirection(self, tmp_path):
        spec_file = tmp_path / "spec.json"
        spec_file.write_text('{"cycle_words":[[1,2],[1,2]]}')
        data = capture_json(["moment", "--spec", f"@{spec_file}", "--symbolic"])
        assert len(data["result"]["terms"]) == 9

    def test_missing_at_file(self, capsys):
        code, _ = capture(["moment", "--spec", "@/nonexistent.json", "--symbolic"])
        assert code == 2
