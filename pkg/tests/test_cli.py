import csv
import json

import pytest

from triquot.cli import cache_key, load_convention, main, parse_range, save_convention
from triquot.quotvi import VIConvention


def run(args, cache, extra=()):
    return main(list(args) + ["--cache-dir", str(cache)] + list(extra))


def test_parse_range():
    assert parse_range("3") == [3]
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("-2..1") == [-2, -1, 0, 1]
    with pytest.raises(ValueError, match="empty range"):
        parse_range("4..1")


def test_requires_convention(tmp_path):
    code = main(["verify", "--g", "2", "--r", "1", "--d", "0", "--ell", "1",
                 "--cache-dir", str(tmp_path)])
    assert code == 2


def test_calibrate_persists(tmp_path):
    assert main(["calibrate", "--cache-dir", str(tmp_path)]) == 0
    conv = load_convention(str(tmp_path))
    assert conv == VIConvention(-1, 1, 0)


def test_corrupt_convention_ignored(tmp_path):
    (tmp_path / "convention.json").write_text("{broken")
    assert load_convention(str(tmp_path)) is None


def test_verify_example(fresh_cache, tmp_path, capsys):
    out = tmp_path / "t.json"
    code = run(["verify", "--g", "2", "--r", "1", "--d", "0", "--ell", "1..4",
                "--out", str(out)], fresh_cache)
    assert code == 0
    data = json.loads(out.read_text())
    assert data["schemaVersion"] == 1
    assert [rec["verlindeValue"] for rec in data["records"]] == [4, 9, 16, 25]
    assert data["aggregate"] == {"verdict": "pass", "passed": 4, "total": 4}
    assert data["timings"] is None
    assert data["job"]["convention"]["rootTarget"] == -1


def test_invalid_genus_exits_2(fresh_cache, capsys):
    code = run(["verify", "--g", "1", "--r", "2", "--d", "0", "--ell", "1"], fresh_cache)
    assert code == 2
    assert "genus" in capsys.readouterr().err


def test_cache_hit_and_byte_stability(fresh_cache, tmp_path, capsys):
    args = ["verify", "--g", "2", "--r", "2", "--d", "1", "--ell", "1..2"]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run(args + ["--out", str(out1)], fresh_cache) == 0
    first_err = capsys.readouterr().err
    assert "cache" not in first_err
    assert run(args + ["--out", str(out2)], fresh_cache) == 0
    second_err = capsys.readouterr().err
    assert "cache: 2 hits" in second_err
    assert out1.read_bytes() == out2.read_bytes()


def test_corrupt_cache_entry_recomputed(fresh_cache, tmp_path, capsys):
    args = ["verify", "--g", "2", "--r", "1", "--d", "0", "--ell", "2"]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run(args + ["--out", str(out1)], fresh_cache) == 0
    records = list((fresh_cache / "records").iterdir())
    assert len(records) == 1
    records[0].write_text("not json")
    assert run(args + ["--out", str(out2)], fresh_cache) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_convention_changes_cache_key():
    a = cache_key("verify", {"g": 2}, VIConvention(-1, 1, 0), "exact")
    b = cache_key("verify", {"g": 2}, VIConvention(1, 1, 0), "exact")
    c = cache_key("verify", {"g": 2}, VIConvention(-1, 1, 0), "float")
    assert len({a, b, c}) == 3


def test_workers_byte_identical(fresh_cache, tmp_path):
    args = ["verify", "--g", "2", "--r", "2", "--d", "1", "--ell", "1..2", "--no-cache"]
    outs = []
    for i, workers in enumerate(("1", "2")):
        out = tmp_path / f"w{i}.json"
        assert run(args + ["--workers", workers, "--out", str(out)], fresh_cache) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_csv_matches_json(fresh_cache, tmp_path):
    args = ["verify", "--g", "2", "--r", "1..2", "--d", "0", "--ell", "1..2"]
    jout, cout = tmp_path / "r.json", tmp_path / "r.csv"
    assert run(args + ["--out", str(jout)], fresh_cache) == 0
    assert run(args + ["--format", "csv", "--out", str(cout)], fresh_cache) == 0
    data = json.loads(jout.read_text())
    with open(cout) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(data["records"]) == 4
    for row, rec in zip(rows, data["records"]):
        assert int(row["g"]) == rec["input"]["g"]
        assert int(row["ell"]) == rec["input"]["ell"]
        assert int(row["verlinde"]) == rec["verlindeValue"]
        assert int(row["quot"]) == rec["quotValue"]
        assert int(row["segre"]) == rec["segreValue"]
        assert int(row["n"]) == rec["params"]["n"]
        assert int(row["N"]) == rec["params"]["N"]
        assert row["d_norm"] == str(rec["input"]["d"] % rec["input"]["r"])
        assert (row["independent"] == "true") == rec["segreIndependent"]
        assert (row["verdict"] == "pass") == rec["passed"]


def test_params_command(fresh_cache, capsys):
    assert run(["params", "--g", "2", "--r", "2", "--d", "1", "--ell", "1"],
               fresh_cache) == 0
    out = capsys.readouterr().out
    assert "h=1" in out and "d'=5" in out and "n=4" in out
    assert "N=8" in out and "vdim=16" in out


def test_vi_command(fresh_cache, capsys):
    assert run(["vi", "--n", "4", "--r", "2", "--g", "2", "--d", "5", "--N", "8"],
               fresh_cache) == 0
    assert ": 24" in capsys.readouterr().out
    assert run(["vi", "--n", "4", "--r", "2", "--g", "2", "--d", "3", "--N", "5"],
               fresh_cache) == 2


def test_verlinde_and_segre_commands(fresh_cache, capsys):
    assert run(["verlinde", "--g", "2", "--r", "1", "--d", "0", "--ell", "2"],
               fresh_cache) == 0
    assert ": 9" in capsys.readouterr().out
    assert run(["segre", "--g", "2", "--r", "1", "--d", "3", "--ell", "2"],
               fresh_cache) == 0
    out = capsys.readouterr().out
    assert ": 9" in out and "independent=True" in out


def test_sweep_csv(fresh_cache, capsys):
    assert run(["sweep", "--g", "2", "--r", "2", "--d", "0..1", "--ell", "1",
                "--format", "csv"], fresh_cache) == 0
    out = capsys.readouterr().out
    lines = [ln for ln in out.splitlines() if "," in ln]
    assert lines[0] == "g,r,d,d_norm,ell,n,N,verlinde,quot,segre,independent,verdict"
    assert lines[1] == "2,2,0,0,1,3,8,9,9,9,false,pass"
    assert lines[2] == "2,2,1,1,1,4,8,24,24,24,false,pass"


def test_fit_command(fresh_cache, tmp_path, capsys):
    out = tmp_path / "fit.json"
    assert run(["fit", "--g", "2", "--r", "1", "--d", "0", "--ell", "1..5",
                "--out", str(out)], fresh_cache) == 0
    assert "degree=2 volume-term=1" in capsys.readouterr().out
    data = json.loads(out.read_text())
    assert data["records"][0]["coefficients"] == ["1", "2", "1"]


def test_timings_flag_breaks_stability_knowingly(fresh_cache, tmp_path):
    args = ["verify", "--g", "2", "--r", "1", "--d", "0", "--ell", "1", "--timings"]
    out = tmp_path / "t.json"
    assert run(args + ["--out", str(out)], fresh_cache) == 0
    data = json.loads(out.read_text())
    assert isinstance(data["timings"]["wall"], float)
