import csv
import io
import json
import subprocess
import sys

import pytest

from sl2bosonic.cli import (
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_OK,
    EXIT_UNDEFINED,
    run_command,
)


def run(capsys, *argv):
    code = run_command(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_character_json(capsys):
    code, out, _ = run(capsys, "character", "--k", "1", "--i", "0", "--l", "0", "--qmax", "2",
                       "--method", "recursion")
    assert code == EXIT_OK
    body = json.loads(out)
    assert (body["k"], body["i"], body["l"], body["qmax"], body["method"]) == (1, 0, 0, 2,
                                                                                "recursion")
    assert body["terms"] == [
        {"q": 0, "z1": 0, "z2": 0, "coeff": "1"},
        {"q": 1, "z1": 0, "z2": 1, "coeff": "1"},
        {"q": 2, "z1": 0, "z2": 1, "coeff": "1"},
    ]


def test_character_all_components_csv(capsys):
    code, out, _ = run(capsys, "character", "--k", "1", "--qmax", "3", "--format", "csv",
                       "--method", "oracle")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["i", "l", "q", "z1", "z2", "coeff"]
    assert {(r["i"], r["l"]) for r in rows} == {("0", "0"), ("0", "1"), ("1", "1")}


def test_single_component_csv_header(capsys):
    code, out, _ = run(capsys, "character", "--k", "1", "--i", "1", "--l", "1", "--qmax", "2",
                       "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "q,z1,z2,coeff"


@pytest.mark.parametrize("method", ["recursion", "fixed-point", "oracle", "bosonic-closed",
                                    "bosonic-operator"])
def test_methods_agree(capsys, method):
    argv = ["character", "--k", "1", "--qmax", "4", "--method", method]
    if method == "fixed-point":
        argv += ["--z2max", "4"]
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_OK
    base = ["character", "--k", "1", "--qmax", "4"]
    if method == "fixed-point":
        base += ["--z2max", "4"]
    _, ref, _ = run(capsys, *base)
    strip = lambda text: [c["terms"] for c in json.loads(text)]  # noqa: E731
    assert strip(out) == strip(ref)


def test_full_character(capsys):
    code, out, _ = run(capsys, "full-character", "--k", "1", "--l", "0", "--qmax", "3")
    assert code == EXIT_OK
    body = json.loads(out)
    assert body["terms"][0] == {"q": 0, "z": 0, "coeff": "1"}


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", "--k", "1", "--qmax", "6",
                       "--methods", "recursion,oracle,bosonic-closed")
    assert code == EXIT_OK
    assert "differ" not in out.lower() or "0 differ" in out.lower()


def test_verify_jackson(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "jackson", "--qmax", "12")
    assert code == EXIT_OK
    assert "cases passed" in out


def test_verify_json_failure_exit(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "operator-identities", "--qmax", "6",
                       "--format", "json")
    assert code == EXIT_FAIL
    body = json.loads(out)
    assert body["ok"] is False
    assert any(not c["ok"] for c in body["cases"])


def test_word_undefined(capsys):
    code, _, err = run(capsys, "word", "--apply", "B C B C A E", "--on", "init")
    assert code == EXIT_UNDEFINED
    assert "undefined" in err


def test_word_trace(capsys):
    code, out, err = run(capsys, "word", "--apply", "A C B", "--on", "vinf", "--trace",
                         "--qmax", "4")
    assert code == EXIT_OK
    assert "path: (123) -> (12) -> (2) -> (3)" in err
    json.loads(out)


def test_word_grouped_route(capsys):
    code, _, err = run(capsys, "word", "--apply", "(B+E) C B C A E", "--on", "init", "--trace",
                       "--qmax", "4")
    assert code == EXIT_OK
    assert "route:" in err


def test_graph_dot(tmp_path, capsys):
    target = tmp_path / "g.dot"
    assert run_command(["graph", "--dot", str(target)]) == EXIT_OK
    text = target.read_text()
    assert text.startswith("digraph")
    code, out, _ = run(capsys, "graph")
    assert out == text


@pytest.mark.parametrize("argv", [
    ["character", "--k", "1", "--i", "2", "--l", "1"],
    ["character", "--k", "1", "--qmax", "-1"],
    ["character", "--k", "1", "--method", "nope"],
    ["character", "--bogus"],
    ["verify", "--suite", "nope"],
    ["word", "--apply", "X Y"],
    ["full-character", "--k", "1"],
])
def test_config_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(run_command(argv))
    assert info.value.code == EXIT_CONFIG


def test_threads_deterministic(capsys, monkeypatch):
    _, a, _ = run(capsys, "character", "--k", "2", "--qmax", "4", "--method", "oracle")
    monkeypatch.setenv("SL2BOSONIC_THREADS", "4")
    _, b, _ = run(capsys, "character", "--k", "2", "--qmax", "4", "--method", "oracle",
                  "--threads", "2")
    assert a == b


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "sl2bosonic", "graph"], capture_output=True,
                       text=True, check=False)
    assert r.returncode == 0
    assert "digraph" in r.stdout
