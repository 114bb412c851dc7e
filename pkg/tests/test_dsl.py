from hypothesis import given, settings, strategies as st

import pytest

from lambdakit import commands as C
from lambdakit import dsl
from lambdakit import fields as F

FLAT = C.bundled("flat_cy_n1.lf")
GENS = ["e[+,1]", "ed[+,1]", "e[-,1]", "ed[-,1]"]


def test_bundled_script_parses_and_runs():
    text = open(FLAT, encoding="utf-8").read()
    ast = dsl.parse(text)
    assert len(ast.stmts) == 20
    rep = C.run_checks(dsl.build(ast))
    assert rep.passed and len(rep.checks) == 20


def test_render_roundtrip_bundled():
    ast = dsl.parse(open(FLAT, encoding="utf-8").read())
    assert dsl.parse(dsl.render(ast)).stmts == ast.stmts


def test_unicode_aliases():
    a = dsl.parse("patch flat(1);\ncheck bracket J[+], J[+] = -H[+] - λ*χ;")
    b = dsl.parse("patch flat(1);\ncheck bracket J[+], J[+] = −H[+] - lam*chi;")
    assert a.stmts == b.stmts


@pytest.mark.parametrize("text,line,col,msg", [
    ("gen a odd;\ngen a odd;", 2, 5, "redefinition of 'a'"),
    ("field X = Y;", 1, 11, "unknown identifier 'Y'"),
    ("gen a odd weight 1/2; check skew a, ;", 1, 37, "unexpected ';'"),
    ("patch flat(1); patch flat(1);", 1, 22, "patch must precede all other declarations"),
    ("gen a odd\x00;", 1, 10, "unexpected character '\\x00'"),
])
def test_diagnostics(text, line, col, msg):
    ast, err = dsl.try_parse(text)
    assert ast is None
    assert (err.line, err.col, err.msg) == (line, col, msg)
    snippet = err.render().splitlines()
    assert snippet[0].startswith("%d:%d:" % (line, col))
    assert snippet[-1].strip() == "^"


def test_diagnostic_expected_tokens():
    _, err = dsl.try_parse("gen a odd weight 1/2; check skew a, ;")
    assert err.expected == ("expression",)


def test_caret_window_clipped():
    text = "field X = " + "e" * 200 + ";"
    _, err = dsl.try_parse(text)
    lines = err.render().splitlines()
    assert all(len(l) <= 82 for l in lines[1:])


@given(st.text(max_size=60))
def test_parser_total_on_arbitrary_text(text):
    ast, err = dsl.try_parse(text)
    assert (ast is None) != (err is None)


SAFE = st.sampled_from(["gen", "odd", "even", "weight", "field", "check", "bracket", "patch", "flat",
                        "(", ")", "[", "]", ",", ";", "=", "+", "-", "*", "S", "T", "lam", "chi",
                        "1/2", "2", "a", "b", "n22", "i", "#", "\n", "{", "}", "relationpack"])


@given(st.lists(SAFE, max_size=25))
def test_parser_total_on_token_soup(toks):
    ast, err = dsl.try_parse(" ".join(toks))
    assert (ast is None) != (err is None)


def _expr():
    leaf = st.sampled_from(GENS + ["J[+]", "H[-]", "1/2", "i", "vac"])
    return st.recursive(
        leaf,
        lambda c: st.one_of(
            st.builds(lambda a: "S (%s)" % a, c),
            st.builds(lambda a: "T (%s)" % a, c),
            st.builds(lambda a, b: "(%s) * (%s)" % (a, b), c, c),
            st.builds(lambda a, b: "%s + %s" % (a, b), c, c),
            st.builds(lambda a: "-(%s)" % a, c),
        ),
        max_leaves=5,
    )


@settings(max_examples=60)
@given(_expr())
def test_render_roundtrip_property(e):
    text = "patch flat(1);\nfield X = %s;" % e
    ast = dsl.parse(text)
    again = dsl.parse(dsl.render(ast))
    assert again.stmts == ast.stmts
    b1, b2 = dsl.build(ast), dsl.build(again)
    assert F.canonical(b1.fields["X"], b1.P) == F.canonical(b2.fields["X"], b2.P)


def test_explicit_presentation_matches_patch():
    explicit = dsl.build(dsl.parse(open(FLAT, encoding="utf-8").read()))
    patched = dsl.build(dsl.parse("patch flat(1);"))
    for k in ("J[+]", "H[+]", "J1", "H"):
        a = F.canonical(explicit.fields[k], explicit.P).render()
        b = F.canonical(patched.fields[k], patched.P).render()
        assert a == b


def test_build_relation_pack_and_coefficients():
    text = """coeff a, b;
gen x odd weight 1/2;
gen f function;
relationpack R { a = 2*b, b = 1/2 };
bracket [x, x] = a;
field Y = x * S x;
"""
    built = dsl.build(dsl.parse(text))
    assert {"a", "b"} <= built.coeffs
    assert "Y" in built.fields


def test_check_failure_reported():
    text = "patch flat(1);\ncheck bracket J[+], J[+] = -H[+];"
    rep = C.run_checks(dsl.build(dsl.parse(text)))
    assert not rep.passed
