import json
import subprocess
import sys

import pytest

from minerenergy.cli import build_parser, main

from conftest import FIXTURES, GOLDEN

DATA = FIXTURES.parent.parent / "src" / "minerenergy" / "data"


def run(capsysbinary, *argv):
    code = main(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out, err.decode()


def test_eval_medium(capsysbinary):
    code, out, err = run(capsysbinary, "eval", "--scenarios", str(DATA / "scenarios.csv"), "--period-years", "1")
    assert code == 0 and err == ""
    assert any(line.startswith("medium,100,30000,5000,0.03,198.333") for line in out.decode().splitlines())


@pytest.mark.parametrize(
    "argv,golden",
    [
        (["eval"], "eval.csv"),
        (["eval", "--format", "json"], "eval.json"),
        (["sweep", "--scenario", "medium", "--axis", "eurbtc", "--from", "10000", "--to", "200000", "--steps", "96"], "sweep_eurbtc.csv"),
        (["sweep", "--scenario", "medium", "--axis", "amf", "--from", "0", "--to", "0.5", "--steps", "11", "--format", "json"], "sweep_amf.json"),
        (["devices", "--amf"], "devices_amf.csv"),
        (["simulate", "--scenario", "medium", "--device", "antminer-s19-pro"], "trace_medium_s19pro.csv"),
        (
            ["ingest", "--history", str(FIXTURES / "history.csv"), "--start", "2021-06-07", "--end", "2021-06-13",
             "--energy-price", "0.03", "--device", "ref-100th", "--name", "june2021"],
            "ingest_june2021.csv",
        ),
    ],
)
def test_golden_outputs(capsysbinary, argv, golden):
    code, out, _ = run(capsysbinary, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_bytes()
    assert run(capsysbinary, *argv)[1] == out


def test_sweep_shape(capsysbinary):
    code, out, _ = run(capsysbinary, "sweep", "--scenario", "medium", "--axis", "eurbtc", "--from", "10000", "--to", "200000", "--steps", "96")
    lines = out.decode().splitlines()
    assert lines[0] == "x,energy_twh,profitable" and len(lines) == 97


def test_devices_reference_row(capsysbinary):
    _, out, _ = run(capsysbinary, "devices", "--amf")
    rows = [r.split(",") for r in out.decode().splitlines()]
    assert rows[0][-1] == "amf_eur_kwh"
    assert any(r[0] == "antminer-s19-pro" and r[-1] == "0.15" for r in rows[1:])


def test_out_file(tmp_path, capsysbinary):
    target = tmp_path / "trace.csv"
    code, out, _ = run(capsysbinary, "simulate", "--scenario", "medium", "--device", "ref-100th", "--out", str(target))
    assert code == 0 and out == b""
    assert target.read_text().startswith("period,hashpower_ths")


def test_simulate_non_convergence(tmp_path, capsysbinary):
    target = tmp_path / "trace.csv"
    code, _, err = run(capsysbinary, "simulate", "--scenario", "medium", "--device", "ref-100th", "--max-periods", "2", "--out", str(target))
    assert code == 1
    assert "no convergence" in err and err.count("\n") == 1
    assert len(target.read_text().splitlines()) == 3


def test_ingest_with_explicit_amortization(capsysbinary):
    code, out, _ = run(
        capsysbinary, "ingest", "--history", str(FIXTURES / "history.csv"), "--start", "2021-06-07",
        "--end", "2021-06-08", "--energy-price", "0.03", "--amort-meur-per-year", "5000", "--format", "json",
    )
    assert code == 0
    [rec] = json.loads(out)
    assert rec["fees_btc_per_day"] == "50" and rec["amort_meur_per_year"] == "5000"


def test_halving_override(capsysbinary):
    _, out, _ = run(capsysbinary, "eval", "--block-height", "840000")
    _, out2, _ = run(capsysbinary, "eval", "--mint", "3.125")
    assert out == out2


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--bogus"],
        ["eval", "--period"],  # abbreviations are not accepted
        ["sweep", "--scenario", "medium", "--axis", "nope", "--from", "1", "--to", "2"],
        ["sweep", "--scenario", "medium", "--axis", "eurbtc", "--from", "5", "--to", "1"],
        ["sweep", "--scenario", "medium", "--axis", "energy-price", "--from", "0", "--to", "1"],
        ["sweep", "--scenario", "missing", "--axis", "eurbtc", "--from", "1", "--to", "2"],
        ["simulate", "--scenario", "medium", "--device", "missing"],
        ["eval", "--scenarios", str(FIXTURES / "malformed" / "scenarios__negative_price.csv")],
        ["ingest", "--history", str(FIXTURES / "history.csv"), "--start", "2020-01-01", "--end", "2020-01-02",
         "--energy-price", "0.03", "--amort-meur-per-year", "1"],
        [],
    ],
)
def test_validation_errors_exit_1(capsysbinary, argv):
    code, out, err = run(capsysbinary, *argv)
    assert code == 1
    assert out == b""
    assert err.startswith("error:") and err.count("\n") == 1


def test_missing_file_exits_2(capsysbinary, tmp_path):
    code, out, err = run(capsysbinary, "eval", "--scenarios", str(tmp_path / "nope.csv"))
    assert code == 2 and out == b"" and err.count("\n") == 1


def test_every_flag_is_documented():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        text = p.format_help()
        for action in p._actions:
            for opt in action.option_strings:
                assert opt in text, (name, opt)
            if action.option_strings and action.dest != "help":
                assert action.help, (name, action.dest)


@pytest.mark.parametrize("cmd", ["eval", "sweep", "simulate", "devices", "ingest"])
def test_help_exits_cleanly(cmd):
    res = subprocess.run([sys.executable, "-m", "minerenergy", cmd, "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "--format" in res.stdout
