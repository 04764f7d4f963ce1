import json
import pathlib

import pytest

from gtskit import cli, dsl
from gtskit.dsl import (
    Document,
    ParseError,
    ResolutionError,
    ValidationError,
    emit_document,
    parse_document,
)

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "docs" / "corpus"

SAMPLE = """
space RSalg { carrier qline; opens canonical-open; cov essfin }
space RTop { carrier qline; opens canonical-open; cov all }
space NatSmall { carrier nat; opens all-sets; cov essfin }
family U = stream shrink(0,1,both,3)
family V = { (0,1) } + stream shrink(0,1,both,3)
set unit-interval : RTop = [0,1]
map id-line : RTop -> RSalg = identity
"""


def test_parse_shipped_example_lines():
    doc = parse_document(SAMPLE)
    assert set(doc.spaces) == {"RSalg", "RTop", "NatSmall"}
    U = doc.families["U"]
    assert not U.finite_part and len(U.streams) == 1
    import gtskit.setexpr as sx
    assert sx.render(U.streams[0].member(3)) == "(1/3,2/3)"


def test_empty_document():
    assert parse_document("") == Document()


def test_round_trip_law():
    doc = parse_document(SAMPLE)
    out = emit_document(doc)
    assert parse_document(out) == doc
    assert emit_document(parse_document(out)) == out


def test_round_trip_on_corpus_files():
    files = sorted(CORPUS.glob("*.gts"))
    assert files, "corpus missing"
    for path in files:
        doc = parse_document(path.read_text())
        out = emit_document(doc)
        assert parse_document(out) == doc, path.name


def test_malformed_corpus_gets_positioned_diagnostics():
    files = sorted((CORPUS / "malformed").glob("*.gts"))
    assert files, "malformed corpus missing"
    for path in files:
        with pytest.raises((ParseError, ResolutionError, ValidationError)):
            parse_document(path.read_text())


def test_parse_error_positions():
    with pytest.raises(ParseError) as e:
        parse_document("space X { carrier qline opens canonical-open; cov essfin }")
    assert e.value.line == 1 and e.value.col == 25
    assert ";" in e.value.expected


def test_duplicate_names_rejected():
    with pytest.raises(ValidationError):
        parse_document(
            "space A { carrier nat; opens all-sets; cov all }\n"
            "set A : A = {0}")


# -- commands -------------------------------------------------------------

def run(cmd, args, text=SAMPLE, **kw):
    return cli.run_command(cmd, args, parse_document(text), **kw)


def test_audit_command_clean():
    report, code = run("audit", ["RSalg"], budget=40, seed=7)
    assert code == 0
    assert report["violations"] == []


def test_check_family_verdicts():
    report, code = run("check-family", ["RSalg", "U"])
    assert code == 0 and report["admissible"] == "No"
    report, code = run("check-family", ["RSalg", "V"])
    assert code == 0 and report["admissible"] == "Yes"


def test_smallness_command():
    report, code = run("smallness", ["RTop", "unit-interval"])
    assert code == 0
    assert report["status"] == "NotSmall"
    assert "witness" in report


def test_map_and_classify_commands():
    report, code = run("map", ["id-line"])
    assert code == 0 and report["strictly_continuous"] == "Yes"
    report, code = run("classify", ["RSalg"])
    assert len(report["flags"]) == 8


def test_construct_command():
    report, code = run("construct", ["smallify", "RTop"])
    assert code == 0 and report["policy"] == "EssFin"


def test_site_command():
    text = ("space Sp { carrier enum(a,b); "
            "opens explicit { empty, {a}, {a,b} }; cov all }")
    report, code = cli.run_command("site", ["Sp"], parse_document(text))
    assert code == 0
    assert report["subcanonical"]["status"] == "Yes"


def test_unknown_command_and_bad_reference():
    with pytest.raises(cli.UnknownCommand):
        run("frobnicate", ["RSalg"])
    with pytest.raises(cli.BadReference):
        run("audit", ["NoSuch"])


def test_json_reports_deterministic():
    r1, _ = run("audit", ["RSalg"], budget=30, seed=3)
    r2, _ = run("audit", ["RSalg"], budget=30, seed=3)
    assert cli.emit_report(r1, "json") == cli.emit_report(r2, "json")
    parsed = json.loads(cli.emit_report(r1, "json"))
    assert parsed["seed"] == 3


def test_main_exit_codes(tmp_path, capsys):
    good = tmp_path / "doc.gts"
    good.write_text(SAMPLE)
    assert cli.main(["check-family", str(good), "RSalg", "V"]) == 0
    bad = tmp_path / "bad.gts"
    bad.write_text("wibble")
    assert cli.main(["audit", str(bad), "X"]) == 2
    missing = tmp_path / "nope.gts"
    assert cli.main(["audit", str(missing), "X"]) == 2
    err = capsys.readouterr().err
    assert "line 1" in err


def test_audit_violation_exit_code():
    # documents validate at parse time, so smuggle in a broken space to
    # confirm the auditor's violations drive exit code 1
    from gtskit.carriers import FiniteEnum
    from gtskit.presentation import All, ExplicitList, GtsPresentation
    import gtskit.setexpr as sx
    c = FiniteEnum(("a", "b"))
    broken = GtsPresentation(
        c, ExplicitList((sx.empty(c), sx.atoms(c, ["a"]), sx.atoms(c, ["b"]))),
        All(), validate=False)
    doc = parse_document("")
    doc._declare("spaces", "Broken", broken)
    report, code = cli.run_command("audit", ["Broken"], doc, budget=40, seed=1)
    assert code == 1
    assert report["violations"]
