"""Command-line interface.

Exit codes: 0 success, 1 parse/usage error, 2 computation cap exceeded,
3 internal consistency failure (two provably equivalent routes disagreed, or
the shipped corpus no longer reproduces its pinned reports).
"""

from __future__ import annotations

import json
import sys
from importlib import resources
from pathlib import Path as FsPath

import click

from .algebra import AlgebraNotFiniteError
from .census import CensusCapExceeded, census, hunt_class_gap
from .classify import (
    InternalInconsistencyError,
    PhiRefusal,
    classify,
    phi_map,
    psi_map,
)
from .complexes import generation_search, presilting_check, rank_condition_check
from .homology import SearchCaps
from .textio import (
    ParseError,
    parse_algebra,
    parse_census,
    parse_complex,
    parse_module,
    print_census,
    print_complex,
    print_module,
)

EXIT_PARSE = 1
EXIT_CAP = 2
EXIT_INCONSISTENT = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_algebra(path: str, field: int):
    try:
        return parse_algebra(FsPath(path).read_text(), default_field=field)
    except FileNotFoundError:
        _fail(EXIT_PARSE, f"no such file: {path}")
    except ParseError as exc:
        _fail(EXIT_PARSE, f"{path}: {exc}")
    except AlgebraNotFiniteError as exc:
        _fail(EXIT_CAP, str(exc))


def _load_module(path: str, alg):
    try:
        return parse_module(FsPath(path).read_text(), alg)
    except FileNotFoundError:
        _fail(EXIT_PARSE, f"no such file: {path}")
    except ParseError as exc:
        _fail(EXIT_PARSE, f"{path}: {exc}")


def _parse_bound(bound: str, nv: int):
    try:
        vec = tuple(int(x) for x in bound.split(","))
    except ValueError:
        _fail(EXIT_PARSE, f"malformed bound {bound!r}")
    if len(vec) != nv:
        _fail(EXIT_PARSE, f"bound has {len(vec)} entries, quiver has {nv} vertices")
    return vec


def _caps(cap_cone: int, cap_surj: int) -> SearchCaps:
    return SearchCaps(subspace_total=cap_surj, cone_depth=cap_cone)


def _check_level(level: int) -> None:
    if level < 1:
        _fail(EXIT_PARSE, f"--n must be at least 1, got {level}")


@click.group()
def main():
    """Exact computations with bound quiver algebras and their modules."""


@main.command("classify")
@click.argument("algebra_file")
@click.argument("module_file")
@click.option("--n", "level", type=int, required=True, help="homological level n >= 1")
@click.option("--field", type=int, default=2, show_default=True)
@click.option("--bound", default=None, help="census bound, e.g. 2,2,2 (default: 2 per vertex)")
@click.option("--census", "census_file", default=None,
              help="reuse a saved census file instead of enumerating")
@click.option("--cap-cone", type=int, default=3, show_default=True)
@click.option("--cap-surj", type=int, default=30000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "json_out", default=None, help="also write the JSON report here")
def cmd_classify(algebra_file, module_file, level, field, bound, census_file,
                 cap_cone, cap_surj, seed, json_out):
    """Full verdict sheet for a module at level n."""
    _check_level(level)
    alg = _load_algebra(algebra_file, field)
    T = _load_module(module_file, alg)
    nv = alg.quiver.num_vertices
    caps = _caps(cap_cone, cap_surj)
    try:
        if census_file:
            try:
                cens = parse_census(FsPath(census_file).read_text(), alg)
            except ParseError as exc:
                _fail(EXIT_PARSE, f"{census_file}: {exc}")
            bound_vec = cens.bound
        else:
            bound_vec = _parse_bound(bound, nv) if bound else tuple([2] * nv)
            cens = census(alg, bound_vec)
        report = classify(T, level, cens.with_zero(), universe_bound=bound_vec,
                          caps=caps, seed=seed)
    except CensusCapExceeded as exc:
        _fail(EXIT_CAP, str(exc))
    except InternalInconsistencyError as exc:
        _fail(EXIT_INCONSISTENT, str(exc))
    click.echo(report.as_text())
    if json_out:
        FsPath(json_out).write_text(json.dumps(report.as_json(), indent=2) + "\n")


@main.command("census")
@click.argument("algebra_file")
@click.option("--bound", required=True, help="dimension bound, e.g. 2,2,2")
@click.option("--field", type=int, default=2, show_default=True)
@click.option("--out", "out_file", default=None, help="write the census to this file")
def cmd_census(algebra_file, bound, field, out_file):
    """Enumerate indecomposables up to isomorphism within a bound."""
    alg = _load_algebra(algebra_file, field)
    bound_vec = _parse_bound(bound, alg.quiver.num_vertices)
    try:
        cens = census(alg, bound_vec)
    except CensusCapExceeded as exc:
        _fail(EXIT_CAP, str(exc))
    click.echo(f"{len(cens)} indecomposables within bound {list(bound_vec)}")
    for M in cens.modules:
        click.echo(f"  dims {list(M.dims)}")
    if out_file:
        FsPath(out_file).write_text(print_census(cens))


@main.command("hunt")
@click.argument("algebra_file")
@click.option("--n", "level", type=int, required=True)
@click.option("--bound", required=True)
@click.option("--field", type=int, default=2, show_default=True)
@click.option("--cap-surj", type=int, default=30000, show_default=True)
def cmd_hunt(algebra_file, level, bound, field, cap_surj):
    """Hunt for modules separating the definitional and class-equality
    notions at level n (none are expected; finding one would be news)."""
    _check_level(level)
    alg = _load_algebra(algebra_file, field)
    bound_vec = _parse_bound(bound, alg.quiver.num_vertices)
    try:
        cens = census(alg, bound_vec)
        separating = hunt_class_gap(cens, level, caps=_caps(3, cap_surj))
    except CensusCapExceeded as exc:
        _fail(EXIT_CAP, str(exc))
    except InternalInconsistencyError as exc:
        _fail(EXIT_INCONSISTENT, str(exc))
    if not separating:
        click.echo(f"no separating modules within bound {list(bound_vec)}")
    for T, verdict in separating:
        click.echo(f"separating candidate: dims {list(T.dims)} ({verdict.witness})")
        click.echo(print_module(T))


@main.group("complex")
def cmd_complex():
    """Operations on bounded complexes of projectives."""


@cmd_complex.command("check")
@click.argument("algebra_file")
@click.argument("complex_file")
@click.option("--n", "level", type=int, required=True)
@click.option("--field", type=int, default=2, show_default=True)
@click.option("--cap-cone", type=int, default=3, show_default=True)
@click.option("--json", "json_out", default=None)
def cmd_complex_check(algebra_file, complex_file, level, field, cap_cone, json_out):
    """Presilting, rank condition and generation status of a complex."""
    _check_level(level)
    alg = _load_algebra(algebra_file, field)
    try:
        C = parse_complex(FsPath(complex_file).read_text(), alg)
    except ParseError as exc:
        _fail(EXIT_PARSE, f"{complex_file}: {exc}")
    from .complexes import generalized_two_term_check

    gen = generation_search(C, depth=cap_cone)
    report = {
        "schema": 1,
        "generalized_two_term": generalized_two_term_check(C, level),
        "presilting": presilting_check(C),
        "rank_condition": rank_condition_check(C),
        "generation": gen.status.value,
        "generation_certificate": gen.certificate,
    }
    for key, val in report.items():
        if key != "schema":
            click.echo(f"{key}: {val}")
    if json_out:
        FsPath(json_out).write_text(json.dumps(report, indent=2) + "\n")


@cmd_complex.command("phi")
@click.argument("algebra_file")
@click.argument("complex_file")
@click.option("--n", "level", type=int, required=True)
@click.option("--field", type=int, default=2, show_default=True)
@click.option("--assume-generation", is_flag=True, default=False,
              help="accept the complex as generating without a certificate")
@click.option("--bound", default=None,
              help="census bound for the attached strongly-AIR verdict")
@click.option("--cap-cone", type=int, default=3, show_default=True)
def cmd_complex_phi(algebra_file, complex_file, level, field, assume_generation, bound, cap_cone):
    """Degree-zero homology of a certified generalized two-term silting
    complex, printed as a module file with the verdict of the output."""
    _check_level(level)
    alg = _load_algebra(algebra_file, field)
    try:
        C = parse_complex(FsPath(complex_file).read_text(), alg)
    except ParseError as exc:
        _fail(EXIT_PARSE, f"{complex_file}: {exc}")
    caps = SearchCaps(cone_depth=cap_cone)
    bound_vec = _parse_bound(bound, alg.quiver.num_vertices) if bound \
        else tuple([2] * alg.quiver.num_vertices)
    try:
        universe = census(alg, bound_vec).with_zero()
        T, partial = phi_map(C, level, assume_generation=assume_generation,
                             caps=caps, universe=universe)
    except CensusCapExceeded as exc:
        _fail(EXIT_CAP, str(exc))
    except InternalInconsistencyError as exc:
        _fail(EXIT_INCONSISTENT, str(exc))
    except PhiRefusal as exc:
        click.echo(f"refused: {exc}", err=True)
        for k, v in exc.partial.items():
            click.echo(f"  {k}: {v}", err=True)
        sys.exit(EXIT_PARSE)
    click.echo(print_module(T), nl=False)
    click.echo(f"# strongly_n_air: {partial['strongly_n_air']}")


@cmd_complex.command("psi")
@click.argument("algebra_file")
@click.argument("module_file")
@click.option("--n", "level", type=int, required=True)
@click.option("--field", type=int, default=2, show_default=True)
def cmd_complex_psi(algebra_file, module_file, level, field):
    """Padded truncated presentation of an n-AIR module, printed as a
    complex file with its presilting/rank/generation report."""
    _check_level(level)
    alg = _load_algebra(algebra_file, field)
    T = _load_module(module_file, alg)
    try:
        C, report = psi_map(T, level)
    except ValueError as exc:
        _fail(EXIT_PARSE, str(exc))
    click.echo(print_complex(C), nl=False)
    for k, v in report.items():
        click.echo(f"# {k}: {v}")


@main.command("examples")
@click.option("--corpus-dir", default=None,
              help="run an external corpus directory instead of the built-in one")
def cmd_examples(corpus_dir):
    """Run the shipped corpus and compare against the pinned reports."""
    if corpus_dir is not None:
        root = FsPath(corpus_dir)
        if not root.is_dir() or not any(root.glob("*.alg")):
            _fail(EXIT_PARSE, f"no corpus found in {corpus_dir!r}")
        items = sorted(p.stem for p in root.glob("*.json"))
        get_text = lambda name: (root / name).read_text()
    else:
        root = resources.files("quivertilt") / "corpus"
        expected_dir = root / "expected"
        items = sorted(p.name[: -len(".json")] for p in expected_dir.iterdir() if p.name.endswith(".json"))
        get_text = lambda name: (root / name).read_text() if not name.endswith(".json") else (root / "expected" / name).read_text()
    if not items:
        _fail(EXIT_PARSE, "corpus has no pinned expectations")
    failures = 0
    for item in items:
        spec = json.loads(get_text(f"{item}.json"))
        alg = parse_algebra(get_text(spec["algebra"]))
        T = parse_module(get_text(spec["module"]), alg)
        bound_vec = tuple(spec["bound"])
        cens = census(alg, bound_vec)
        try:
            report = classify(T, spec["n"], cens.with_zero(), universe_bound=bound_vec)
        except InternalInconsistencyError as exc:
            click.echo(f"FAIL {item}: internal inconsistency: {exc}")
            failures += 1
            continue
        got = {k: v.value.value for k, v in report.verdicts.items()}
        bad = {
            k: (want, got.get(k))
            for k, want in spec["verdicts"].items()
            if got.get(k) != want
        }
        if bad:
            failures += 1
            click.echo(f"FAIL {item}")
            for k, (want, have) in bad.items():
                click.echo(f"  {k}: expected {want}, got {have}")
        else:
            click.echo(f"PASS {item}")
    if failures:
        _fail(EXIT_INCONSISTENT, f"{failures} corpus item(s) diverged")


if __name__ == "__main__":
    main()
