import json
import math
from pathlib import Path

import numpy as np
import pytest

from mfdcca import TimeSeries, fit_scaling, generate
from mfdcca.cli import (
    RunConfig,
    fmt17,
    inner_join_on_dates,
    load_series,
    log_returns,
    main,
    run,
    stable_json,
)
from mfdcca.core import FluctuationTable

DATA = Path(__file__).parent / "data"


def write(path: Path, text: str) -> str:
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoadSeries:
    def test_plain_column(self, tmp_path):
        path = write(tmp_path / "a.csv", "v\n1\n2\n4\n")
        loaded = load_series(path, "v")
        assert np.array_equal(loaded.series.values, [1.0, 2.0, 4.0])
        assert loaded.n_missing_dropped == 0

    def test_missing_column_names_header(self, tmp_path):
        path = write(tmp_path / "a.csv", "v,w\n1,2\n")
        with pytest.raises(ValueError, match="no column named 'z'"):
            load_series(path, "z")

    def test_missing_values_dropped_and_counted(self, tmp_path):
        path = write(tmp_path / "a.csv", "v\n1\nna\n3\nNaN\n5\n")
        loaded = load_series(path, "v")
        assert np.array_equal(loaded.series.values, [1.0, 3.0, 5.0])
        assert loaded.n_missing_dropped == 2

    def test_unparseable_cell_names_row_and_column(self, tmp_path):
        path = write(tmp_path / "a.csv", "v\n1\nbogus\n")
        with pytest.raises(ValueError, match="row 3, column 'v'"):
            load_series(path, "v")

    def test_inner_join(self, tmp_path):
        a = load_series(write(tmp_path / "a.csv", "d,v\nd1,1\nd2,2\nd3,3\n"), "v", "d")
        b = load_series(write(tmp_path / "b.csv", "d,v\nd2,20\nd3,30\nd4,40\n"), "v", "d")
        x, y, report = inner_join_on_dates(a, b)
        assert np.array_equal(x.values, [2.0, 3.0])
        assert np.array_equal(y.values, [20.0, 30.0])
        assert report["joined_length"] == 2


class TestLogReturns:
    def test_exact_logs(self):
        e = math.e
        out = log_returns(TimeSeries(np.array([1.0, e, e * e])))
        assert np.allclose(out.values, [1.0, 1.0], atol=1e-12)

    def test_constant_prices(self):
        out = log_returns(TimeSeries(np.full(5, 3.0)))
        assert np.array_equal(out.values, np.zeros(4))

    def test_too_short(self):
        with pytest.raises(ValueError, match="at least 2"):
            log_returns(TimeSeries(np.array([1.0])))

    def test_non_positive_named(self):
        with pytest.raises(ValueError, match="index 2"):
            log_returns(TimeSeries(np.array([1.0, 2.0, 0.0, 3.0])))


class TestSerialization:
    def test_fmt17_round_trips(self):
        for v in (0.1, 1 / 3, 1e-17, 123456.789, 2.0):
            assert float(fmt17(v)) == v

    def test_stable_json_nan_is_null(self):
        text = stable_json({"a": float("nan"), "b": 1.5})
        parsed = json.loads(text)
        assert parsed["a"] is None and parsed["b"] == 1.5


@pytest.fixture(scope="module")
def cascade_csvs(tmp_path_factory):
    base = tmp_path_factory.mktemp("cascade")
    paths = {}
    for p in (0.3, 0.4):
        series = generate(stages=10, p=p)
        lines = "value\n" + "\n".join(fmt17(v) for v in series.values) + "\n"
        paths[p] = write(base / f"cascade_{p}.csv", lines)
    return paths


class TestRunPipeline:
    def test_pair_run_outputs(self, cascade_csvs, tmp_path):
        out = tmp_path / "out"
        config = RunConfig(input=cascade_csvs[0.3], input2=cascade_csvs[0.4],
                           out=str(out))
        run(config)
        for name in ("fluctuations.csv", "spectra.csv", "summary.json",
                     "summary.txt", "manifest.json"):
            assert (out / name).is_file(), name
        summary = json.loads((out / "summary.json").read_text())
        names = [row["algorithm"] for row in summary["algorithms"]]
        assert names == ["MFDXA", "ABS", "MFCCA", "PS", "MS", "PB", "MB",
                         "PP", "PM", "MP", "MM"]
        ms = summary["algorithms"][4]
        assert ms["pairs_pct"] == 0.0 and ms["H"] is None
        pb, mb = summary["algorithms"][5], summary["algorithms"][6]
        assert pb["captured"] + mb["captured"] == pb["total"]
        quad = summary["algorithms"][7:11]
        assert sum(row["captured"] for row in quad) == pb["total"]
        text = (out / "summary.txt").read_text().splitlines()
        assert text[0].split() == ["algorithm", "pairs%", "H", "alpha0", "W", "r"]
        assert text[5].split() == ["MS", "0.0", "-", "-", "-", "-"]

    def test_byte_identical_reruns(self, cascade_csvs, tmp_path):
        outputs = []
        for sub in ("one", "two"):
            out = tmp_path / sub
            run(RunConfig(input=cascade_csvs[0.3], input2=cascade_csvs[0.4],
                          out=str(out)))
            outputs.append({f.name: f.read_bytes() for f in sorted(out.iterdir())})
        assert outputs[0].keys() == outputs[1].keys()
        for name in outputs[0]:
            assert outputs[0][name] == outputs[1][name], name

    def test_fluctuation_csv_round_trips_the_fit(self, cascade_csvs, tmp_path):
        out = tmp_path / "out"
        result = run(RunConfig(input=cascade_csvs[0.3], input2=cascade_csvs[0.4],
                               out=str(out), algorithms=("MFDXA",)))
        rows = (out / "fluctuations.csv").read_text().splitlines()[1:]
        cells = {}
        for row in rows:
            alg, scale, q, value, valid, reason = row.split(",")
            cells[(int(scale), float(q))] = (float(value) if value else float("nan"),
                                             valid == "true")
        table = result.results[list(result.results)[0]].table
        scales = table.scales
        qs = table.qs
        values = np.array([[cells[(int(s), float(q))][0] for q in qs] for s in scales])
        valid = np.array([[cells[(int(s), float(q))][1] for q in qs] for s in scales])
        reloaded = FluctuationTable("MFDXA", scales, qs, values, valid,
                                    np.full(values.shape, "", dtype=object),
                                    np.zeros(values.shape, dtype=np.int64))
        refit = fit_scaling(reloaded)
        original = result.results[list(result.results)[0]].fit
        both = np.isfinite(refit.h) & np.isfinite(original.h)
        assert np.array_equal(np.isfinite(refit.h), np.isfinite(original.h))
        assert np.abs(refit.h[both] - original.h[both]).max() < 1e-12

    def test_single_input_mfdfa_summary(self, cascade_csvs, tmp_path):
        out = tmp_path / "out"
        run(RunConfig(input=cascade_csvs[0.3], out=str(out)))
        summary = json.loads((out / "summary.json").read_text())
        assert [row["algorithm"] for row in summary["algorithms"]] == ["MFDFA"]
        assert summary["algorithms"][0]["H"] is not None

    def test_cross_algorithms_need_two_inputs(self, cascade_csvs, tmp_path):
        with pytest.raises(ValueError, match="need two inputs"):
            run(RunConfig(input=cascade_csvs[0.3], algorithms=("MFDXA",),
                          out=str(tmp_path / "out")))

    def test_mismatched_lengths_without_dates_rejected(self, cascade_csvs, tmp_path):
        short = write(tmp_path / "short.csv",
                      "value\n" + "\n".join(str(v) for v in range(100)) + "\n")
        with pytest.raises(ValueError, match="differ in length"):
            run(RunConfig(input=cascade_csvs[0.3], input2=short,
                          out=str(tmp_path / "out")))

    def test_main_exit_codes(self, cascade_csvs, tmp_path, capsys):
        code = main(["run", "--input", str(tmp_path / "missing.csv"),
                     "--out", str(tmp_path / "out")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_binomial_subcommand(self, tmp_path, capsys):
        out_file = tmp_path / "cascade.csv"
        assert main(["binomial", "--stages", "2", "--p", "0.3",
                     "--out", str(out_file)]) == 0
        lines = out_file.read_text().splitlines()
        assert lines[0] == "value"
        assert [float(v) for v in lines[1:]] == pytest.approx([0.49, 0.21, 0.21, 0.09])
        assert main(["binomial", "--stages", "1", "--p", "0.3"]) == 0
        assert capsys.readouterr().out.splitlines()[1:] == ["0.69999999999999996", "0.29999999999999999"]


class TestBundledSyntheticPair:
    def test_end_to_end_with_join_and_returns(self, tmp_path):
        out = tmp_path / "out"
        config = RunConfig(input=str(DATA / "synthetic_price_x.csv"),
                           input2=str(DATA / "synthetic_price_y.csv"),
                           column="price", date_column="date", returns="log",
                           out=str(out))
        result = run(config)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["series"]["date_join"]["joined_length"] == 409
        assert manifest["series"]["y"]["missing_dropped"] == 3
        diag = manifest["diagnostics"]
        assert diag["MFDXA"]["invalid_by_reason"].get("negative_base", 0) > 0
        assert diag["MFCCA"]["invalid_by_reason"].get("negative_signed_sum", 0) > 0
        summary = json.loads((out / "summary.json").read_text())
        by_name = {row["algorithm"]: row for row in summary["algorithms"]}
        assert by_name["PS"]["captured"] + by_name["MS"]["captured"] == by_name["PS"]["total"]
        assert by_name["MS"]["pairs_pct"] > 50.0
