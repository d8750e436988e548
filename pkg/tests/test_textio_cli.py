import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from quivertilt.census import census
from quivertilt.cli import main
from quivertilt.complexes import complex_iso, truncated_complex
from quivertilt.homology import min_presentation
from quivertilt.modules import iso_modules, simple_module
from quivertilt.textio import (
    ParseError,
    parse_algebra,
    parse_census,
    parse_complex,
    parse_module,
    print_algebra,
    print_census,
    print_complex,
    print_module,
)

CORPUS = Path(__file__).resolve().parents[1] / "src" / "quivertilt" / "corpus"


@pytest.fixture(scope="module")
def corpus_strands():
    return parse_algebra((CORPUS / "twin_arrows.alg").read_text())


@pytest.fixture(scope="module")
def corpus_strands_T(corpus_strands):
    return parse_module((CORPUS / "twin_arrows_T.mod").read_text(), corpus_strands)


def test_corpus_algebra_dimensions(corpus_strands):
    assert corpus_strands.dim == 9


def test_algebra_round_trip(corpus_strands):
    text = print_algebra(corpus_strands)
    again = parse_algebra(text)
    assert again.dim == corpus_strands.dim
    assert again.quiver.vertices == corpus_strands.quiver.vertices
    assert [a.name for a in again.quiver.arrows] == [
        a.name for a in corpus_strands.quiver.arrows
    ]


def test_module_round_trip(corpus_strands, corpus_strands_T):
    text = print_module(corpus_strands_T)
    again = parse_module(text, corpus_strands)
    assert again.same_data(corpus_strands_T)


def test_complex_round_trip(corpus_strands, corpus_strands_T):
    C = truncated_complex(min_presentation(corpus_strands_T, 2))
    text = print_complex(C)
    again = parse_complex(text, corpus_strands)
    assert complex_iso(again, C)
    assert print_complex(again) == text


def test_corpus_complex_matches_resolution(corpus_strands, corpus_strands_T):
    C = parse_complex((CORPUS / "twin_arrows_res.cpx").read_text(), corpus_strands)
    D = truncated_complex(min_presentation(corpus_strands_T, 2))
    assert complex_iso(C, D)


def test_census_round_trip(corpus_strands):
    cens = census(corpus_strands, (1, 1, 1))
    text = print_census(cens)
    again = parse_census(text, corpus_strands)
    assert len(again.modules) == len(cens.modules)
    for M, N in zip(again.modules, cens.modules):
        assert M.same_data(N)


def test_signed_relation_parses():
    text = """[algebra]
field 5
vertices 1 2 3 4
arrow a: 1 -> 2
arrow b: 1 -> 3
arrow c: 2 -> 4
arrow d: 3 -> 4
relation a*c - b*d
"""
    alg = parse_algebra(text)
    assert alg.dim == 9
    again = parse_algebra(print_algebra(alg))
    assert again.dim == 9


def test_coefficient_relation_parses():
    text = """[algebra]
field 5
vertices 1 2 3
arrow a: 1 -> 2
arrow b: 2 -> 3
arrow c: 1 -> 2
relation 2*a*b + 3*c*b
"""
    alg = parse_algebra(text)
    # one of the two length-2 paths survives modulo the relation
    assert alg.dim == 3 + 3 + 1


def test_malformed_relation_length_one():
    text = """[algebra]
field 2
vertices 1 2
arrow a: 1 -> 2
relation a
"""
    with pytest.raises(ParseError) as exc:
        parse_algebra(text)
    assert "admissible" in str(exc.value)
    assert exc.value.line_no == 5


def test_unknown_vertex_error():
    text = """[algebra]
field 2
vertices 1 2
arrow a: 1 -> 9
"""
    with pytest.raises(ParseError):
        parse_algebra(text)


def test_unknown_arrow_in_module(corpus_strands):
    with pytest.raises(ParseError) as exc:
        parse_module("[module]\ndims 1 1 1\narrow zz\n1\n", corpus_strands)
    assert "unknown arrow" in str(exc.value)


def test_module_shape_error(corpus_strands):
    text = "[module]\ndims 1 1 1\narrow x1\n1 0\n"
    with pytest.raises(ParseError) as exc:
        parse_module(text, corpus_strands)
    assert "shape" in str(exc.value)


def test_module_relation_violation_rejected(corpus_strands):
    text = "[module]\ndims 1 1 1\narrow x1\n1\narrow x2\n1\n"
    with pytest.raises(ParseError):
        parse_module(text, corpus_strands)


def test_complex_entry_sector_error(corpus_strands):
    text = """[complex]
term -1: 0 0 1
term 0: 1 0 0
diff -1
x1
"""
    with pytest.raises(ParseError):
        parse_complex(text, corpus_strands)


# -- CLI ------------------------------------------------------------------


def test_cli_classify_json(tmp_path):
    runner = CliRunner()
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        [
            "classify",
            str(CORPUS / "a2.alg"),
            str(CORPUS / "a2_T.mod"),
            "--n",
            "1",
            "--bound",
            "2,2",
            "--json",
            str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "n_tilting" in result.output
    data = json.loads(out.read_text())
    assert data["schema"] == 1
    assert data["verdicts"]["n_tilting"]["value"] == "yes"
    assert data["universe_bound"] == [2, 2]


def test_cli_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("[algebra]\nfield 2\nvertices 1\narrow a: 1 -> 1\nrelation a\n")
    runner = CliRunner()
    result = runner.invoke(main, ["census", str(bad), "--bound", "1"])
    assert result.exit_code == 1


def test_cli_census_cap_exit_code():
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["census", str(CORPUS / "twin_arrows.alg"), "--bound", "4,4,4"],
    )
    assert result.exit_code == 2


def test_cli_complex_check_negative_control():
    runner = CliRunner()
    result = runner.invoke(
        main,
        [
            "complex",
            "check",
            str(CORPUS / "twin_arrows.alg"),
            str(CORPUS / "twin_arrows_res.cpx"),
            "--n",
            "2",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "presilting: True" in result.output
    assert "rank_condition: False" in result.output
    assert "generation: unknown" in result.output


def test_cli_psi_then_phi_round_trip(tmp_path):
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["complex", "psi", str(CORPUS / "a2.alg"), str(CORPUS / "a2_T.mod"), "--n", "1"],
    )
    assert result.exit_code == 0, result.output
    cpx_text = "\n".join(
        line for line in result.output.splitlines() if not line.startswith("#")
    )
    cpx = tmp_path / "tilt.cpx"
    cpx.write_text(cpx_text + "\n")
    result2 = runner.invoke(
        main, ["complex", "phi", str(CORPUS / "a2.alg"), str(cpx), "--n", "1"]
    )
    assert result2.exit_code == 0, result2.output
    alg = parse_algebra((CORPUS / "a2.alg").read_text())
    back = parse_module(result2.output, alg)
    original = parse_module((CORPUS / "a2_T.mod").read_text(), alg)
    assert iso_modules(back, original)


def test_cli_phi_refuses_negative_control():
    runner = CliRunner()
    result = runner.invoke(
        main,
        [
            "complex",
            "phi",
            str(CORPUS / "twin_arrows.alg"),
            str(CORPUS / "twin_arrows_res.cpx"),
            "--n",
            "2",
        ],
    )
    assert result.exit_code == 1
    assert "rank condition" in result.output


def test_cli_hunt_empty():
    runner = CliRunner()
    result = runner.invoke(
        main, ["hunt", str(CORPUS / "a2.alg"), "--n", "1", "--bound", "2,2"]
    )
    assert result.exit_code == 0, result.output
    assert "no separating modules" in result.output


def test_cli_examples_pass():
    runner = CliRunner()
    result = runner.invoke(main, ["examples"])
    assert result.exit_code == 0, result.output
    assert result.output.count("PASS") == 3


def test_cli_examples_corrupted_expectation(tmp_path):
    for name in ("a2.alg", "a2_T.mod"):
        (tmp_path / name).write_text((CORPUS / name).read_text())
    spec = json.loads((CORPUS / "expected" / "a2_n1.json").read_text())
    spec["verdicts"]["n_tilting"] = "no"  # deliberately wrong
    (tmp_path / "a2_n1.json").write_text(json.dumps(spec))
    runner = CliRunner()
    result = runner.invoke(main, ["examples", "--corpus-dir", str(tmp_path)])
    assert result.exit_code == 3
    assert "FAIL a2_n1" in result.output
    assert "n_tilting" in result.output


def test_cli_examples_empty_corpus(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, ["examples", "--corpus-dir", str(tmp_path)])
    assert result.exit_code == 1
    assert "no corpus" in result.output


def test_cli_census_roundtrip_file(tmp_path):
    runner = CliRunner()
    out = tmp_path / "census.txt"
    result = runner.invoke(
        main,
        ["census", str(CORPUS / "a2.alg"), "--bound", "2,2", "--out", str(out)],
    )
    assert result.exit_code == 0
    alg = parse_algebra((CORPUS / "a2.alg").read_text())
    cens = parse_census(out.read_text(), alg)
    assert len(cens.modules) == 3
    # the saved census is reusable by classify
    result2 = runner.invoke(
        main,
        [
            "classify",
            str(CORPUS / "a2.alg"),
            str(CORPUS / "a2_T.mod"),
            "--n",
            "1",
            "--census",
            str(out),
        ],
    )
    assert result2.exit_code == 0, result2.output
    assert "universe: 4 modules" in result2.output


def test_cli_reports_deterministic(tmp_path):
    runner = CliRunner()
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        result = runner.invoke(
            main,
            [
                "classify",
                str(CORPUS / "a2.alg"),
                str(CORPUS / "a2_T.mod"),
                "--n",
                "1",
                "--bound",
                "2,2",
                "--json",
                str(out),
            ],
        )
        assert result.exit_code == 0
        outs.append(out.read_text())
    assert outs[0] == outs[1]
