import json

import pytest
from click.testing import CliRunner

from lambdakit import commands as C
from lambdakit.cli import main

FLAT = C.bundled("flat_cy_n1.lf")
CLOSED = C.bundled("closed3form.txt")
NONCLOSED = C.bundled("nonclosed3form.txt")


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_help_lists_verbs():
    r = run("--help")
    assert r.exit_code == 0
    for verb in ("normalize", "bracket", "verify-axioms", "verify-n2", "verify-n22", "oracle-compare",
                 "oracle-dump", "geometry", "twist", "parse", "run"):
        assert verb in r.output


def test_verify_n22_text_and_json():
    r = run("verify-n22")
    assert r.exit_code == 0 and "14/14 checks passed" in r.output
    r = run("verify-n22", "--format", "json")
    d = json.loads(r.output)
    assert d["schema"] == "lambdakit.report/1" and d["passed"]
    assert {c["status"] for c in d["checks"]} == {"pass"}


def test_verify_n2_wrong_central_charge_exits_1():
    assert run("verify-n2", "--c", "6").exit_code == 0
    assert run("verify-n2", "--c", "3").exit_code == 1


def test_normalize_and_bracket():
    r = run("normalize", "e[+,1] * ed[+,1] + ed[+,1] * e[+,1]")
    assert r.exit_code == 0 and "normal_form: 0" in r.output
    r = run("bracket", "J1", "J1", "--format", "json")
    d = json.loads(r.output)
    assert d["info"]["modes"]["1|1"] == "-2"


def test_script_errors_exit_2(tmp_path):
    assert run("normalize", "S e[+,1").exit_code == 2
    bad = tmp_path / "bad.lf"
    bad.write_text("gen a odd;\nfield X = Y;\n")
    r = run("parse", str(bad))
    assert r.exit_code == 2 and "unknown identifier 'Y'" in r.output
    assert run("run", str(bad)).exit_code == 2


def test_parse_render_and_run():
    r = run("parse", FLAT, "--render")
    assert r.exit_code == 0 and "check n22;" in r.output
    r = run("run", FLAT)
    assert r.exit_code == 0 and "20/20" in r.output


def test_bad_rational_is_usage_error():
    assert run("twist", "check", "--cutoff", "x").exit_code == 2


def test_verify_axioms_small():
    r = run("verify-axioms", "--trials", "3", "--n", "1")
    assert r.exit_code == 0 and "3/3 checks passed" in r.output


def test_oracle_compare_small():
    r = run("oracle-compare", "--max-weight", "1", "--cutoff", "3/2", "--stability-cutoff", "5/2",
            "--no-untruncated")
    assert r.exit_code == 0, r.output


def test_oracle_dump(tmp_path):
    out = tmp_path / "op.txt"
    r = run("oracle-dump", "H[+]", "--mode", "0", "1", "--cutoff", "1", "--out", str(out))
    assert r.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("#") and len(lines[1].split()) == 4


@pytest.mark.parametrize("args,code", [
    (("geometry", "check-courant", "--H", CLOSED, "--trials", "2"), 0),
    (("geometry", "check-courant", "--H", NONCLOSED, "--trials", "2"), 0),
    (("geometry", "mukai"), 0),
    (("geometry", "modular"), 0),
    (("geometry", "frames"), 0),
    (("geometry", "dilaton"), 0),
    (("twist", "check", "--cutoff", "1"), 0),
    (("twist", "cohomology", "--cutoff", "2", "--no-stability"), 0),
])
def test_subcommands(args, code):
    r = run(*args)
    assert r.exit_code == code, r.output


def test_nonclosed_reports_detection():
    r = run("geometry", "check-courant", "--H", NONCLOSED, "--trials", "2", "--format", "json")
    d = json.loads(r.output)
    assert d["info"]["dH = 0"] is False
    assert any("detects" in c["name"] and c["status"] == "pass" for c in d["checks"])
