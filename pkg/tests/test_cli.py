import csv
import io
import json
from fractions import Fraction

import pytest

from rrhermite import cli, rr
from rrhermite.cli import RunConfig, UsageError

REPORT_KEYS = {"id", "paper_eq", "order", "status", "first_mismatch_exponent", "elapsed_ms", "misprint"}


def run_json(argv, capsys):
    code = cli.main(argv + ["--output", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_verify_euler(capsys):
    code, out = run_json(["verify", "euler", "--order", "50"], capsys)
    assert code == cli.EXIT_OK
    (row,) = out["results"]
    assert set(row) == REPORT_KEYS
    assert row["status"] == "PASS" and row["order"] == 50


def test_verify_misprint_exits_one(capsys):
    code, out = run_json(["verify", "theta-sq-shift-literal(1)", "--order", "10"], capsys)
    assert code == cli.EXIT_FAIL
    assert out["results"][0]["first_mismatch_exponent"] == "1/4"


@pytest.mark.parametrize("argv", [
    ["verify", "no-such-identity"],
    ["xi", "--system", "Z9", "--level", "2"],
    ["xi", "--system", "A1", "--level", "2", "--classes", "0"],
    ["xi", "--system", "A1", "--level", "2", "--classes", "0,7"],
    ["verify", "euler", "--order", "-3"],
    ["verify", "euler", "--order", "abc"],
    ["gauss", "--systems", "A1", "--N", "1-x"],
    ["hermite", "--system", "A1", "--weight=2"],
])
def test_parse_errors_exit_two(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:  # argparse rejects before a config exists
        code = exc.code
    assert code == cli.EXIT_PARSE


def test_config_invariants():
    with pytest.raises(UsageError):
        RunConfig(command="verify", order=Fraction(0))
    with pytest.raises(UsageError):
        RunConfig(command="explode")
    assert cli.parse_moduli("2-4,7") == [2, 3, 4, 7]
    assert cli.parse_order("5/2") == Fraction(5, 2)


def test_env_order(monkeypatch, capsys):
    monkeypatch.setenv(cli.ORDER_ENV, "7")
    code, out = run_json(["verify", "euler"], capsys)
    assert code == 0 and out["results"][0]["order"] == 7
    monkeypatch.setenv(cli.ORDER_ENV, "nonsense")
    assert cli.main(["verify", "euler"]) == cli.EXIT_PARSE


def test_xi_both_methods_agree(capsys):
    code, out = run_json(["xi", "--system", "A1", "--level", "3", "--classes", "1,0,0", "--r", "1", "--order", "12"],
                         capsys)
    assert code == 0
    rows = {r["method"]: r for r in out["results"] if "method" in r}
    assert rows["ct"]["coefficients"] == rows["multisum"]["coefficients"]
    assert rows["ct"]["coefficients"][:2] == [["1/4", "1"], ["5/4", "2"]]
    assert rows["agreement"]["status"] == "PASS"


def test_xi_text_output(capsys):
    assert cli.main(["xi", "--system", "A1", "--level", "3", "--classes", "1,0,0", "--r", "1", "--order", "6"]) == 0
    text = capsys.readouterr().out
    assert "1*q^1/4 + 2*q^5/4" in text


def test_csv_dilog_table(capsys):
    assert cli.main(["dilog-table", "--max-rank", "3", "--output", "csv"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows and all(r["status"] == "PASS" for r in rows)
    assert {"system", "status"} <= set(rows[0])


def test_gauss_relations_report_failures(capsys):
    code, out = run_json(["gauss", "--systems", "A2,C3", "--N", "2-3", "--relations"], capsys)
    assert code == cli.EXIT_FAIL
    bad = [r for r in out["results"] if r["status"] != "PASS"]
    assert {(r["system"], r["N"]) for r in bad} == {("C3", 3)}


def test_hermite_command(capsys):
    code, out = run_json(["hermite", "--system", "A1", "--weight=-2"], capsys)
    assert code == 0
    assert {r["kind"] for r in out["results"]} == {"coefficient", "norm"}


def test_expand_command(capsys):
    code, out = run_json(["expand", "--system", "A1", "--level", "2", "--classes", "full,full", "--order", "4"],
                         capsys)
    assert code == 0 and out["results"]


def test_manifest_adds_entries(tmp_path, capsys):
    rec = rr.lookup("euler")
    bumped = {"terms": rec.rhs["terms"] + [{"coeff": "1", "factors": [rr.mono(7)]}]}
    path = tmp_path / "extra.json"
    path.write_text(json.dumps({"identities": [
        {"id": "euler-copy", "lhs": rec.lhs, "rhs": rec.rhs, "order": 20, "paper_eq": "copy"},
        {"id": "euler-bumped", "lhs": rec.lhs, "rhs": bumped, "order": 20, "paper_eq": "fixture"},
    ]}))
    code, out = run_json(["verify", "euler-copy", "--manifest", str(path)], capsys)
    assert code == 0
    code, out = run_json(["verify", "euler-bumped", "--manifest", str(path)], capsys)
    assert code == 1
    assert out["results"][0]["first_mismatch_exponent"] == "7"


def _strip_timing(reports):
    return [{k: v for k, v in r.to_json().items() if k != "elapsed_ms"} for r in reports]


def test_verify_all_low_order_and_determinism():
    serial, summary = cli.verify_all(order=5, parallelism=1)
    assert summary["fail"] == 0 and summary["total"] == summary["pass"] > 100
    parallel, _ = cli.verify_all(order=5, parallelism=3)
    assert _strip_timing(serial) == _strip_timing(parallel)


def test_verify_all_reports_injected_failure():
    rec = rr.lookup("euler")
    bumped = rr.IdentityRecord("euler-flip", rec.lhs,
                               {"terms": rec.rhs["terms"] + [{"coeff": "-1", "factors": [rr.mono(3)]}]}, 10, "fixture")
    reports, summary = cli.verify_all(order=5, extra=[bumped], core=False)
    assert summary["fail"] == 1
    (bad,) = [r for r in reports if r.status == "FAIL"]
    assert bad.id == "euler-flip" and bad.first_mismatch_exponent == 3


def test_misprints_are_opt_in():
    default, _ = cli.verify_all(order=5, core=False)
    assert not any(r.misprint for r in default)
    full, summary = cli.verify_all(order=5, core=False, include_misprints=True)
    assert any(r.misprint for r in full) and summary["fail"] > 0
