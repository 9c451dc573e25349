import json
import subprocess
import sys

import pytest

from fpa_sim import compute_stats, parse_program, read_trace, run, run_fetch_baseline
from fpa_sim.cli import main
from fpa_sim.config import load_config

PROGRAM = """\
fn load  kind=io     cost=2 iowait=5
fn fft   kind=dsp    cost=6 after=load
fn scale kind=arith  cost=3 after=load
fn mix   kind=arith  cost=4 after=fft,scale
fn show  kind=graphics cost=2 after=mix
"""
CONFIG = "fpus = arith:2, dsp:1, graphics:1, io:1\ndecode_width = 2\n"


@pytest.fixture
def files(tmp_path):
    p = tmp_path / "p.fpa"
    p.write_text(PROGRAM)
    c = tmp_path / "c.cfg"
    c.write_text(CONFIG)
    return tmp_path, p, c


def test_run_writes_report_and_trace(files, capsys):
    d, p, c = files
    code = main(["run", "--program", str(p), "--config", str(c), "--report", str(d / "out.json"), "--trace", str(d / "out.csv")])
    assert code == 0
    report = json.loads((d / "out.json").read_text())
    cfg = load_config(c)
    assert report == json.loads(json.dumps(compute_stats(read_trace(d / "out.csv"), cfg).to_report()))
    assert report["mode"] == "push"
    assert "makespan" in capsys.readouterr().out


def test_run_fetch_mode(files):
    d, p, c = files
    assert main(["run", "--program", str(p), "--mode", "fetch", "--report", str(d / "f.json"), "--quiet"]) == 0
    report = json.loads((d / "f.json").read_text())
    assert report["mode"] == "fetch"
    assert report["makespan"] == run_fetch_baseline(parse_program(PROGRAM))[0].makespan


def test_missing_program(tmp_path, capsys):
    assert main(["run", "--program", str(tmp_path / "missing.fpa")]) == 1
    assert "cannot open" in capsys.readouterr().err


def test_bad_program(tmp_path, capsys):
    p = tmp_path / "bad.fpa"
    p.write_text("fn a kind=arith cost=1 after=b\nfn b kind=arith cost=1 after=a\n")
    assert main(["validate", "--program", str(p)]) == 1
    assert "cycle" in capsys.readouterr().err


def test_bad_config(files, capsys):
    d, p, _ = files
    c = d / "bad.cfg"
    c.write_text("decode_width = 0\n")
    assert main(["run", "--program", str(p), "--config", str(c)]) == 1
    assert "decode_width" in capsys.readouterr().err


def test_missing_fpu_kind_is_input_error(files, capsys):
    d, p, _ = files
    c = d / "narrow.cfg"
    c.write_text("fpus = arith:4\n")
    assert main(["run", "--program", str(p), "--config", str(c)]) == 1
    assert "no io FPU" in capsys.readouterr().err


def test_deadlock_exit_code(files, capsys):
    d, p, _ = files
    c = d / "loose.cfg"
    c.write_text("fpus = arith:4\nstrict_kinds = false\n")
    assert main(["run", "--program", str(p), "--config", str(c)]) == 2
    assert "internal" in capsys.readouterr().err


def test_validate(files, capsys):
    _, p, c = files
    assert main(["validate", "--program", str(p), "--config", str(c)]) == 0
    assert "5 functions" in capsys.readouterr().out


def test_compare_report_and_ratio(files):
    d, p, c = files
    code = main(["compare", "--program", str(p), "--config", str(c), "--report", str(d / "cmp.json"),
                 "--trace", str(d / "cmp.csv"), "--quiet"])
    assert code == 0
    report = json.loads((d / "cmp.json").read_text())
    cfg = load_config(c)
    g = parse_program(PROGRAM)
    push = run(g, cfg)[0]
    fetch = run_fetch_baseline(g, cfg)[0]
    assert report["push_makespan"] == push.makespan
    assert report["fetch_makespan"] == fetch.makespan
    assert report["ratio"] == fetch.makespan / push.makespan
    assert report["push"] == json.loads(json.dumps(push.to_report()))
    assert report["fetch"] == json.loads(json.dumps(fetch.to_report()))
    assert read_trace(d / "cmp.push.csv") == run(g, cfg)[1]
    assert read_trace(d / "cmp.fetch.csv") == run_fetch_baseline(g, cfg)[1]


def test_console_entry_point(files):
    d, p, c = files
    proc = subprocess.run(
        [sys.executable, "-m", "fpa_sim.cli", "run", "--program", str(p), "--config", str(c), "--quiet",
         "--report", str(d / "x.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads((d / "x.json").read_text())["mode"] == "push"
