import io
import json
import sys

import pytest

from privseg.cli import dispatch, parse_beta_grid

EX1 = {"values": [0.8, 2, 3, 4.2, 5], "aggregate": [0.2, 0.1, 0.4, 0.2, 0.1], "beta": 0.3, "samples": 50000}
FIG5B = dict(EX1, aggregate=[0.2, 0.3, 0.2, 0.2, 0.1])
K2 = {"values": [0.4, 1.0], "aggregate": [0.5, 0.5], "beta": 0.2}


def run(doc, *argv, capsys=None, monkeypatch=None, tmp_path=None):
    path = tmp_path / "doc.json"
    path.write_text(json.dumps(doc))
    code = dispatch([argv[0], "--input", str(path), *argv[1:]])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def cli(capsys, tmp_path):
    def go(doc, *argv):
        return run(doc, *argv, capsys=capsys, tmp_path=tmp_path)

    return go


def test_polygon_csv_is_reproducible(cli, tmp_path):
    code, a, _ = cli(EX1, "polygon")
    assert code == 0
    lines = a.strip().splitlines()
    assert lines[0] == "consumer,producer" and len(lines) >= 4
    _, b, _ = cli(EX1, "polygon")
    assert a == b
    svg_path = tmp_path / "fig.svg"
    code, _, _ = cli(EX1, "polygon", "--svg", str(svg_path))
    text = svg_path.read_text()
    assert code == 0 and text.startswith("<svg") and "stroke-dasharray" in text


def test_analyze_crossing(cli):
    code, out, _ = cli(FIG5B, "analyze")
    d = json.loads(out)
    assert code == 0 and d["schema"] == 1 and d["crossing"] is True
    assert d["leakage"] == pytest.approx(0.7)


def test_malformed_aggregate(cli):
    code, out, err = cli(dict(EX1, aggregate=[0.2, 0.1, 0.4, 0.1, 0.1]), "polygon")
    assert code == 2 and out == "" and "aggregate" in err
    code, out, _ = cli(dict(EX1, beta=1.5), "regions")
    assert code == 2 and out == ""
    code, out, _ = cli({"values": [1, 2]}, "regions")
    assert code == 2


def test_unknown_subcommand(capsys):
    assert dispatch(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_json_subcommands(cli):
    for cmd in ("regions", "shift", "analyze"):
        code, out, _ = cli(K2, cmd)
        d = json.loads(out)
        assert code == 0 and d["schema"] == 1
    code, out, _ = cli(K2, "shift")
    assert json.loads(out)["c"] == pytest.approx([0.1125, 0.4625])


def test_segment(cli):
    code, out, _ = cli(EX1, "segment", "--target", "0.3,2.3")
    d = json.loads(out)
    assert code == 0
    assert d["achieved"] == pytest.approx([0.3, 2.3], abs=1e-9)
    assert sum(s["weight"] for s in d["segments"]) == pytest.approx(1.0)
    code, out, err = cli(K2, "segment", "--target", "5,5")
    assert code == 3 and out == ""


def test_curves(cli):
    code, out, _ = cli(K2, "curves", "--beta-grid", "0:0.6:0.1")
    rows = out.strip().splitlines()
    assert code == 0 and len(rows) == 8
    assert rows[3].startswith("0.2,0.6525,")


def test_simulate_and_oracle(cli, tmp_path):
    code, out, _ = cli(K2, "simulate", "--trials", "50000", "--seed", "3")
    d = json.loads(out)
    assert code == 0 and d["analytic"] == pytest.approx([0.0225, 0.6525])
    seg_doc = dict(K2, segmentation=[{"weight": 1.0, "market": [0.5, 0.5]}])
    code, out, _ = cli(seg_doc, "simulate", "--trials", "1000")
    assert code == 0
    report = tmp_path / "rep.json"
    code, out, _ = cli(K2, "oracle", "--lattice", "10", "--report", str(report))
    rep = json.loads(report.read_text())
    assert code == 0 and rep["violations"] == 0 and out.startswith("consumer,producer")


def test_stdin(monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(K2)))
    assert dispatch(["shift"]) == 0
    assert json.loads(capsys.readouterr().out)["schema"] == 1


def test_beta_grid_parser():
    assert parse_beta_grid("0:0.3:0.1") == [0.0, 0.1, 0.2, 0.3]
    with pytest.raises(ValueError):
        parse_beta_grid("0:1")
