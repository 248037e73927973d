import json
import subprocess
import sys

import pytest

from quadneb.cli import main, run_verify


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_lt_examples(capsys):
    code, rows = run_json(capsys, "lt", "-p", "5", "-n", "2", "--tame")
    assert code == 0 and rows[0]["total"] == 3 and rows[0]["match"]
    code, rows = run_json(capsys, "lt", "-p", "3", "-n", "5", "--tame")
    assert code == 0 and rows[0]["SCR"] == 4


@pytest.mark.parametrize(
    "argv",
    [
        ("lt", "-p", "2", "-n", "1"),
        ("lt", "-p", "9", "-n", "1"),
        ("lt", "-p", "5", "-n", "0"),
        ("lo", "-p", "3", "-n", "1", "--unramified"),
        ("lo", "-p", "7", "-n", "5", "--param-asym", "3"),
        ("compare",),
        ("compare", "-N", "27"),
        ("compare", "-N", "15", "-k", "4", "--strict", "--offline"),
        ("verify",),
        ("bogus",),
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_lo_examples(capsys):
    code, rows = run_json(capsys, "lo", "-p", "3", "-n", "3", "--tame")
    assert code == 0 and rows[0]["lo_total"] == 2
    assert rows[0]["reading_check"] == {"norm": True, "uniformizer": False}
    code, rows = run_json(capsys, "lo", "-p", "3", "-n", "2", "--unramified", "--table")
    assert rows[0]["lo_total"] == 3
    code, rows = run_json(capsys, "lo", "-p", "7", "-n", "5", "--tame", "--param-asym", "0")
    assert rows[0]["lo_total"] == 2
    code, rows = run_json(capsys, "lo", "-p", "7", "-n", "5", "--tame", "--table")
    assert rows[0]["lo_total"] is None and rows[0]["lo"] == "2 + |S_asym|"
    code, rows = run_json(capsys, "lo", "-p", "3", "-n", "1", "--unramified", "--value-at-p", "1")
    assert code == 0 and rows[0]["lo_total"] == 2


def test_formats_agree(capsys):
    argv = ("lt", "-p", "7", "-n", "3", "--unramified")
    _, rows = run_json(capsys, *argv)
    _, tsv, _ = run(capsys, *argv, "--format", "tsv")
    header, line = tsv.strip().splitlines()
    parsed = dict(zip(header.split("\t"), line.split("\t")))
    assert parsed["total"] == str(rows[0]["total"])
    _, table, _ = run(capsys, *argv)
    assert "total" in table and str(rows[0]["total"]) in table


def test_json_is_deterministic(capsys):
    argv = ("lo", "-p", "5", "-n", "4", "--unramified", "--format", "json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_compare_fixtures(capsys, tmp_path):
    code, rows = run_json(capsys, "compare", "--fixtures", "--cache-dir", str(tmp_path))
    assert code == 0
    assert {(r["N"], r["k"]) for r in rows} == {(27, 35), (125, 10), (125, 12), (343, 3), (343, 5), (243, 7)}
    assert all(r["verdict"] != "VIOLATION" for r in rows)
    code, rows = run_json(capsys, "compare", "-N", "27", "-k", "35", "--fixtures")
    assert code == 0 and rows[0]["lo"] == 2 and rows[0]["ncm"] == 3


def test_compare_offline_without_data(capsys, tmp_path):
    code, _, err = run(capsys, "compare", "-N", "81", "-k", "4", "--offline", "--cache-dir", str(tmp_path))
    assert code == 3 and "error" in err


def test_verify_subset_matches():
    rows = run_verify(grid_p=(3, 5), grid_n=(1, 2, 3))
    assert rows and all(r["match"] for r in rows)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quadneb", "lt", "-p", "3", "-n", "3", "--format", "json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["SCR"] == 2
