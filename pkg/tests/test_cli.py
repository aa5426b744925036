import json

import pytest

from sievekit.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_sift_csv(capsys):
    code, out = run(["sift", "--problem", "interval", "--x", "30", "--y", "30", "--z", "6"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "problem,z,survivors"
    assert lines[1].endswith(",6,8")


def test_bound_selberg_twin(capsys):
    code, out = run(
        ["bound", "--method", "selberg", "--problem", "twin", "--x", "1e4", "--z", "20"],
        capsys,
    )
    assert code == 0
    header, row = out.strip().splitlines()
    cols = dict(zip(header.split(","), row.split(",")))
    assert cols["verdict"] == "valid"
    assert float(cols["bound"]) >= float(cols["exact"])


def test_bound_sweep_rows(capsys):
    code, out = run(
        ["bound", "--method", "linnik", "--problem", "interval", "--x", "1000", "--y", "1000",
         "--z", "5,10,20"],
        capsys,
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 4


def test_json_and_csv_numeric_content_match(capsys, tmp_path):
    argv = ["bound", "--method", "legendre", "--problem", "twin", "--x", "500", "--z", "10"]
    code, csv_out = run(argv + ["--format", "csv"], capsys)
    assert code == 0
    code, json_out = run(argv + ["--format", "json"], capsys)
    assert code == 0
    header, row = csv_out.strip().splitlines()
    csv_cols = dict(zip(header.split(","), row.split(",")))
    json_cols = json.loads(json_out)[0]
    for key, val in json_cols.items():
        assert str(val) == csv_cols[key]


def test_deterministic_lsieve(capsys):
    argv = ["lsieve", "--suite", "additive", "--trials", "20", "--seed", "7"]
    code1, out1 = run(argv, capsys)
    code2, out2 = run(argv, capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    code3, out3 = run(argv[:-1] + ["8"], capsys)
    assert out3 != out1


def test_sievefun_csv(capsys):
    code, out = run(["sievefun", "--tau-max", "4", "--step", "1e-3"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "tau,phi0,phi1"
    # the tau = 2 row carries phi1(2) = e^gamma
    row2 = next(l for l in lines if l.startswith("2,"))
    assert row2.split(",")[2].startswith("1.78107241799")


def test_chen_command(capsys):
    code, out = run(["chen", "--N", "10000", "--format", "json"], capsys)
    assert code == 0
    row = json.loads(out)[0]
    assert row["inequality_holds"] is True


def test_verify_small(capsys):
    code, out = run(["verify", "--suite", "all", "--budget", "small"], capsys)
    assert code == 0
    assert "all checks passed" in out
    assert "FAIL" not in out


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"problem": "interval", "x": "30", "y": "30", "z": [6]}))
    code, out = run(["--config", str(cfg), "sift"], capsys)
    assert code == 0
    assert out.strip().splitlines()[1].endswith(",6,8")


def test_bad_config_exit_2(tmp_path, capsys):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    code = main(["--config", str(cfg), "sift"])
    assert code == 2


def test_bad_arguments_exit_2(capsys):
    code = main(["sift", "--problem", "progression", "--x", "100", "--k", "4", "--l", "2", "--z", "5"])
    assert code == 2


def test_budget_exit_3(capsys):
    code = main(["chen", "--N", "20000000"])
    assert code == 3


def test_output_file(tmp_path, capsys):
    path = tmp_path / "rows.csv"
    code = main(["sift", "--problem", "twin", "--x", "100", "--z", "2,4", "--out", str(path)])
    assert code == 0
    assert path.read_text().startswith("problem,z,survivors")
