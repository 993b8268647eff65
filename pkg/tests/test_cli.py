import json

import pytest

from biquadsq.cli import main
from biquadsq.field import make_params
from biquadsq.squares import s_level


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out.strip()
    return code, json.loads(out)


def test_basis_command(capsys):
    code, data = run_json(capsys, ["basis", "3", "21"])
    assert code == 0
    assert data["ell"] == "-7"
    assert len(data["basis"]) == 4
    assert data["basis"][0]["coords_uvw"] == ["1", "0", "0", "0"]


def test_pell_command(capsys):
    code, data = run_json(capsys, ["pell", "3", "--target", "-2"])
    assert code == 0
    assert (data["x"], data["y"]) == ("1", "1")

    code, data = run_json(capsys, ["pell", "7", "--target", "-2"])
    assert code == 0
    assert data["solution"] == "none"
    assert "note" in data

    code, data = run_json(capsys, ["pell", "51"])
    assert (data["x"], data["y"]) == ("50", "7")


def test_s_level_command(capsys):
    code, data = run_json(capsys, ["s-level", "3", "5"])
    assert code == 0
    assert data["s"] == "2"
    assert data["witness"]["verified"] is True


def test_decompose_command(capsys):
    code, data = run_json(capsys, ["decompose", "3", "5", "--coords", "0,0,0,1"])
    assert code == 0
    assert data["verified"] is True
    assert len(data["terms"]) == 3

    code, raw = run_json(capsys, ["decompose", "3", "5", "--coords", "0,0,0,1", "--raw"])
    assert code == 0
    assert len(raw["terms"]) >= 3


def test_min_squares_command(capsys):
    code, data = run_json(
        capsys, ["min-squares", "3", "5", "--coords", "2,0,0,0", "--tmax", "3", "--box", "2"]
    )
    assert code == 0
    assert data["t"] == "2"


def test_obstruct_command(capsys):
    code, data = run_json(capsys, ["obstruct", "3", "5", "--coords", "0,0,0,1", "--k", "3"])
    assert code == 0
    assert data["obstructed"] is True

    code, data = run_json(capsys, ["obstruct", "3", "5", "--coords", "1,0,0,0", "--k", "3"])
    assert data["obstructed"] is False


def test_classify_and_certify_commands(capsys):
    code, data = run_json(capsys, ["classify", "51"])
    assert code == 0
    assert data["pattern"] == "II"

    code, data = run_json(capsys, ["certify", "3", "5"])
    assert code == 0
    assert data["conclusion"] == "g = 3"

    code, data = run_json(capsys, ["certify", "7", "5"])
    assert code == 0
    assert data["conclusion"] is None


def test_invalid_input_exits_2(capsys):
    assert main(["basis", "4", "5"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error: invalid-input:")
    assert main(["decompose", "3", "5", "--coords", "1,2,3"]) == 2
    assert main(["classify", "12"]) == 2


def test_integers_are_strings_everywhere(capsys):
    code, data = run_json(capsys, ["s-level", "3", "5"])

    def walk(node):
        if isinstance(node, dict):
            for v in node.values():
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)
        else:
            assert not isinstance(node, (int, float)) or isinstance(node, bool)

    walk(data)


def survey_records(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out


def stripped(records):
    return sorted(
        json.dumps({k: v for k, v in r.items() if k != "timing_ms"}, sort_keys=True)
        for r in records
    )


def test_survey_smoke_and_resume(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BIQUAD_SEARCH_BOX", "2")
    full = tmp_path / "full.jsonl"
    code = main(
        ["survey", "--m-from", "3", "--m-to", "23", "--n-from", "5", "--n-to", "17", "--out", str(full)]
    )
    assert code == 0
    err = capsys.readouterr().err
    assert "skip m=4 n=5:" in err
    assert "records written" in err

    # interrupted run over a prefix, then resumed over the full range
    part = tmp_path / "part.jsonl"
    assert main(
        ["survey", "--m-from", "3", "--m-to", "11", "--n-from", "5", "--n-to", "17", "--out", str(part)]
    ) == 0
    first = {(r["m"], r["n"]) for r in survey_records(part)}
    assert main(
        ["survey", "--m-from", "3", "--m-to", "23", "--n-from", "5", "--n-to", "17", "--out", str(part)]
    ) == 0
    capsys.readouterr()
    assert stripped(survey_records(part)) == stripped(survey_records(full))
    assert first <= {(r["m"], r["n"]) for r in survey_records(part)}


def test_survey_worker_pool(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BIQUAD_SEARCH_BOX", "2")
    out = tmp_path / "pool.jsonl"
    code = main(
        [
            "survey",
            "--m-from", "3", "--m-to", "15",
            "--n-from", "5", "--n-to", "13",
            "--out", str(out),
            "--workers", "2",
        ]
    )
    assert code == 0
    capsys.readouterr()
    recs = survey_records(out)
    assert {(r["m"], r["n"]) for r in recs} == {
        ("3", "5"), ("3", "13"), ("7", "5"), ("7", "13"),
        ("11", "5"), ("11", "13"), ("15", "5"), ("15", "13"),
    }


def test_survey_records_match_library(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BIQUAD_SEARCH_BOX", "2")
    out = tmp_path / "one.jsonl"
    assert main(["survey", "--m-from", "3", "--m-to", "3", "--n-from", "5", "--n-to", "5", "--out", str(out)]) == 0
    capsys.readouterr()
    (rec,) = survey_records(out)
    assert rec["pattern"] == "I"
    assert rec["g3_certified"] is True
    assert rec["s_level"] == str(s_level(make_params(3, 5), 2).s)
