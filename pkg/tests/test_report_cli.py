import json
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from bdcalc import BdConfig, bd_value, subset_error
from bdcalc.analysis import select_supporting_params
from bdcalc.cli import main
from bdcalc.errors import ConfigError, DuplicateKey, ParseError
from bdcalc.plotting import read_rcd_csv
from bdcalc.report import ReportConfig, load_dataset, run_report

SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def svg_items(path):
    root = ET.parse(path).getroot()
    return root, {el.get("id"): el for el in root.iter() if el.get("id")}


def polyline_xs(el):
    return [float(p.split(",")[0]) for p in el.get("points").split()]


class TestLoadDataset:
    def test_three_rows(self, data_dir):
        t = load_dataset(data_dir / "three_rows.csv")
        assert len(t.rows) == 3
        assert t.metrics == ["psnr", "bitrate"]
        assert t.catalog["psnr"].unit == "dB"
        assert t.rows[0].param == 22 and isinstance(t.rows[0].param, int)
        assert t.rows[1].metrics["bitrate"] == 5400.25

    def test_duplicate_key(self, data_dir):
        with pytest.raises(DuplicateKey):
            load_dataset(data_dir / "duplicate_key.csv")

    def test_bad_number_reports_line(self, data_dir):
        with pytest.raises(ParseError) as err:
            load_dataset(data_dir / "bad_number.csv")
        assert err.value.line == 3
        assert "line 3" in str(err.value)

    def test_headers_are_case_insensitive(self, data_dir):
        t = load_dataset(data_dir / "non_monotone_psnr.csv")
        assert t.metrics == ["psnr", "bitrate"]
        assert t.configs() == ["anchor", "test"]

    def test_empty_cells_become_null(self, tmp_path):
        p = tmp_path / "gaps.csv"
        p.write_text("sequence,config,param,psnr,bitrate\nA,x,22,40,\nA,x,27,38,900\n")
        t = load_dataset(p)
        assert t.rows[0].metrics["bitrate"] is None
        assert t.support_set("A", "x", "psnr", "bitrate").count == 1


class TestRunReport:
    def test_identity(self, data_dir):
        t = load_dataset(data_dir / "rd_two_sequences.csv")
        # anchor against itself through a copied config name
        rows = [type(row)(row.sequence, "copy", row.param, row.metrics) for row in t.rows if row.config == "anchor"]
        t.rows.extend(rows)
        r = run_report(t, ReportConfig(anchor="anchor", independent="psnr", dependent="bitrate", tests=["copy"]))
        assert [e["bd"] for e in r.per_sequence] == [0.0, 0.0]
        assert r.aggregate["mean_bd"] == {"copy": 0.0}

    def test_ratio_two(self, data_dir):
        t = load_dataset(data_dir / "ratio2.csv")
        r = run_report(t, ReportConfig(anchor="anchor", independent="psnr", dependent="bitrate"))
        assert [e["sequence"] for e in r.per_sequence] == ["Cactus", "Kimono"]
        for e in r.per_sequence:
            assert e["bd"] == pytest.approx(1.0, abs=1e-9)
            assert e["iou"] == 1.0
        assert r.aggregate["mean_bd"]["test"] == pytest.approx(1.0, abs=1e-9)
        assert r.meta["bounds_policy"] == "overlap" and r.meta["method"] == "akima"

    def test_subset_mode_matches_module_composition(self, dense_csv):
        t = load_dataset(dense_csv)
        r = run_report(t, ReportConfig(anchor="anchor", independent="psnr", dependent="bitrate", points=4))
        cfg = BdConfig()
        for e in r.per_sequence:
            a = t.support_set(e["sequence"], "anchor", "psnr", "bitrate")
            s = t.support_set(e["sequence"], "test", "psnr", "bitrate")
            sub = select_supporting_params(list(range(22, 38)), 4)
            assert e["params"] == sub == [22, 27, 32, 37]
            assert e["bd"] == bd_value(s.subset(sub), a.subset(sub), cfg).bd
            assert e["bd_all"] == bd_value(s, a, cfg).bd
            assert e["subset_error"] == subset_error(s.subset(sub), a.subset(sub), s, a, cfg)
        errs = [e["subset_error"] for e in r.per_sequence]
        assert r.subset_error["mean_abs"] == pytest.approx(np.mean(np.abs(errs)), abs=1e-15)

    def test_missing_pair(self, data_dir):
        t = load_dataset(data_dir / "ratio2.csv")
        t.rows[:] = [row for row in t.rows if not (row.sequence == "Kimono" and row.config == "test")]
        r = run_report(t, ReportConfig(anchor="anchor", independent="psnr", dependent="bitrate"))
        assert len(r.per_sequence) == 1
        assert "MISSING_PAIR" in [w["code"] for w in r.warnings]

    def test_invalid_pair_is_reported_not_raised(self, data_dir):
        t = load_dataset(data_dir / "non_monotone_psnr.csv")
        r = run_report(t, ReportConfig(anchor="anchor", independent="psnr", dependent="bitrate"))
        assert r.has_errors
        (e,) = r.per_sequence
        assert e["bd"] is None
        assert e["errors"][0]["code"] == "NON_MONOTONE_INDEPENDENT"

    @pytest.mark.parametrize("kw", [
        {"anchor": "nope"},
        {"anchor": "anchor", "independent": "ssim"},
        {"anchor": "anchor", "tests": ["missing"]},
        {"anchor": "anchor", "points": 4, "subset_params": [22, 37]},
    ])
    def test_config_errors(self, data_dir, kw):
        t = load_dataset(data_dir / "ratio2.csv")
        args = {"independent": "psnr", "dependent": "bitrate", **kw}
        with pytest.raises(ConfigError):
            run_report(t, ReportConfig(**args))

    def test_saturating_metric_warning(self, data_dir):
        t = load_dataset(data_dir / "rd_two_sequences.csv")
        r = run_report(t, ReportConfig(anchor="anchor", independent="vmaf", dependent="bitrate"))
        assert "UNTRANSFORMED_SATURATING_METRIC" in [w["code"] for w in r.warnings]


class TestCli:
    def test_validate_flags_non_monotone_quality(self, capsys, data_dir):
        code, _, err = run(capsys, "validate", "--input", data_dir / "non_monotone_psnr.csv")
        assert code == 1
        assert "NON_MONOTONE_INDEPENDENT" in err
        assert "Cactus/anchor" in err

    def test_validate_clean(self, capsys, data_dir):
        code, out, _ = run(capsys, "validate", "--input", data_dir / "ratio2.csv", "--json")
        assert code == 0
        assert all(not r["errors"] for r in json.loads(out)["results"])

    def test_bd_ratio_two(self, capsys, data_dir, tmp_path):
        out_file = tmp_path / "r.json"
        code, out, _ = run(capsys, "bd", "--input", data_dir / "ratio2.csv", "--anchor", "anchor",
                           "--out", out_file)
        assert code == 0 and out == ""
        report = json.loads(out_file.read_text())
        assert [e["bd"] for e in report["per_sequence"]] == pytest.approx([1.0, 1.0], abs=1e-9)

    def test_bd_json_round_trip_and_determinism(self, capsys, data_dir, tmp_path):
        outs = []
        for i in range(2):
            path = tmp_path / f"r{i}.json"
            code, out, _ = run(capsys, "bd", "--input", data_dir / "rd_two_sequences.csv", "--anchor", "anchor",
                               "--test", "tool_on,fast", "--json", "--out", path)
            assert code == 0
            assert path.read_text() == out
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]
        report = json.loads(outs[0])
        assert json.dumps(report, indent=2) + "\n" == outs[0].decode()
        assert report["meta"]["tests"] == ["fast", "tool_on"]
        bds = {(e["sequence"], e["config"]): e["bd"] for e in report["per_sequence"]}
        assert bds[("Cactus", "tool_on")] < 0 < bds[("Cactus", "fast")]

    def test_bd_csi_prints_legacy_warning(self, capsys, data_dir):
        code, out, err = run(capsys, "bd", "--input", data_dir / "ratio2.csv", "--anchor", "anchor",
                             "--method", "csi")
        assert code == 0
        assert "LEGACY_METHOD" in err
        assert json.loads(out)["meta"]["method"] == "csi"

    def test_bd_with_log_vmaf(self, capsys, data_dir):
        code, out, _ = run(capsys, "bd", "--input", data_dir / "rd_two_sequences.csv", "--anchor", "anchor",
                           "--independent", "vmaf", "--transform", "log-vmaf")
        assert code == 0
        report = json.loads(out)
        assert report["meta"]["transform"] == "log_vmaf"
        assert "UNTRANSFORMED_SATURATING_METRIC" not in [w["code"] for w in report["warnings"]]

    def test_bd_plot_dir(self, capsys, data_dir, tmp_path):
        code, _, _ = run(capsys, "bd", "--input", data_dir / "ratio2.csv", "--anchor", "anchor",
                         "--plot-dir", tmp_path / "plots", "--rcd", "--json")
        assert code == 0
        files = sorted(p.name for p in (tmp_path / "plots").iterdir())
        assert files == ["rd_Cactus_test.svg", "rd_Kimono_test.svg"]
        for f in files:
            ET.parse(tmp_path / "plots" / f)

    def test_bd_invalid_data_exits_one(self, capsys, data_dir):
        code, out, _ = run(capsys, "bd", "--input", data_dir / "non_monotone_psnr.csv", "--anchor", "anchor")
        assert code == 1
        assert json.loads(out)["per_sequence"][0]["bd"] is None

    def test_rcd_identical_curves_lie_on_zero_axis(self, capsys, data_dir, tmp_path):
        src = load_dataset(data_dir / "ratio2.csv")
        p = tmp_path / "same.csv"
        lines = ["sequence,config,param,psnr,bitrate"]
        for row in src.rows:
            if row.sequence == "Cactus" and row.config == "anchor":
                for cfg in ("anchor", "copy"):
                    lines.append(f"Cactus,{cfg},{row.param},{row.metrics['psnr']},{row.metrics['bitrate']}")
        p.write_text("\n".join(lines) + "\n")
        svg = tmp_path / "rcd.svg"
        code, _, _ = run(capsys, "rcd", "--input", p, "--anchor", "anchor", "--test", "copy", "--out", svg)
        assert code == 0
        root, items = svg_items(svg)
        assert root.tag == SVG + "svg"
        zero = float(items["zero-axis"].get("x1"))
        assert polyline_xs(items["rcd"]) == [zero] * len(polyline_xs(items["rcd"]))
        assert len(root.findall(f".//{SVG}circle")) == 4

    def test_rcd_ratio_two(self, capsys, data_dir, tmp_path):
        svg, csv_path = tmp_path / "rcd.svg", tmp_path / "rcd.csv"
        code, out, _ = run(capsys, "rcd", "--input", data_dir / "ratio2.csv", "--anchor", "anchor",
                           "--sequence", "Kimono", "--out", svg, "--csv", csv_path, "--samples", "200", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["bd_percent"] == pytest.approx(100.0, abs=1e-9)
        assert payload["crossings"] == []
        _, items = svg_items(svg)
        bd_x = float(items["bd-line"].get("x1"))
        assert all(abs(x - bd_x) < 1e-6 for x in polyline_xs(items["rcd"]))
        assert bd_x > float(items["zero-axis"].get("x1"))
        rows = read_rcd_csv(csv_path)
        assert len(rows) == 200
        assert rows[0][0] == 33.9 and rows[-1][0] == 41.0
        assert all(d == pytest.approx(100.0, abs=1e-9) for _, d in rows)

    def test_rcd_svg_is_deterministic(self, capsys, data_dir, tmp_path):
        paths = [tmp_path / "a.svg", tmp_path / "b.svg"]
        for p in paths:
            run(capsys, "rcd", "--input", data_dir / "rd_two_sequences.csv", "--anchor", "anchor",
                "--test", "fast", "--sequence", "Cactus", "--out", p)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_subset_error(self, capsys, dense_csv):
        code, out, _ = run(capsys, "subset-error", "--input", dense_csv, "--anchor", "anchor", "--points", "4")
        assert code == 0
        report = json.loads(out)
        assert all(e["params"] == [22, 27, 32, 37] for e in report["per_sequence"])
        assert set(report["subset_error"]) >= {"mean_abs", "std", "signed_mean"}

    def test_rie(self, capsys, dense_csv):
        code, out, _ = run(capsys, "rie", "--input", dense_csv, "--points", "4", "--method", "pchip")
        assert code == 0
        report = json.loads(out)
        assert len(report["per_curve"]) == 4
        assert all(0 <= c["mean"] <= c["max"] < 0.1 for c in report["per_curve"])

    @pytest.mark.parametrize("argv", [
        [],
        ["bd"],
        ["bd", "--input", "{ratio2}"],
        ["bd", "--input", "{ratio2}", "--anchor", "anchor", "--method", "spline"],
        ["bd", "--input", "{ratio2}", "--anchor", "missing"],
        ["bd", "--input", "{ratio2}", "--anchor", "anchor", "--points", "4", "--params", "22,37"],
        ["bd", "--input", "does/not/exist.csv", "--anchor", "anchor"],
        ["subset-error", "--input", "{ratio2}", "--anchor", "anchor"],
        ["rcd", "--input", "{ratio2}", "--anchor", "anchor", "--out", "{tmp}/x.svg"],
        ["rie", "--input", "{ratio2}"],
    ])
    def test_usage_errors_exit_two(self, capsys, data_dir, tmp_path, argv):
        argv = [a.format(ratio2=data_dir / "ratio2.csv", tmp=tmp_path) for a in argv]
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert re.search(r"usage|error", err)
