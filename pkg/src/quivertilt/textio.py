"""Line-oriented text formats for algebras, modules, complexes and censuses.

Hand-writable and diffable.  An algebra file:

    [algebra]
    field 2
    vertices 1 2 3
    arrow x1: 1 -> 2
    arrow x2: 2 -> 3
    relation x1*x2

A module file (parsed against an algebra):

    [module]
    dims 1 1 1
    arrow x1
    1

with one matrix block per arrow (rows = target dimension, entries mod p);
omitted arrows are zero maps.  A complex file lists projective multiplicity
vectors per degree and differentials as path-coefficient matrices:

    [complex]
    term -1: 0 0 1
    term 0: 1 0 0
    diff -1
    x1*y2 + y1*x2

Parse errors carry the offending line number.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

import numpy as np

from .algebra import Algebra, Path, Quiver, QuiverError, RelationError, build_algebra, make_path, path_target
from .linalg import Matrix
from .modules import Module
from .complexes import AlgMatrix, ProjComplex
from .census import Census


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.reason = message


def _logical_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


# -- algebra ----------------------------------------------------------------


def parse_algebra(text: str, default_field: int = 2, max_len: int = 30) -> Algebra:
    lines = list(_logical_lines(text))
    if not lines or lines[0][1] != "[algebra]":
        raise ParseError(lines[0][0] if lines else 1, "expected [algebra] header")
    field: Optional[int] = None
    vertices: List[str] = []
    arrows: List[Tuple[str, str, str]] = []
    relation_specs: List[Tuple[int, str]] = []
    for no, line in lines[1:]:
        if line.startswith("["):
            raise ParseError(no, f"unexpected section {line!r} inside [algebra]")
        if line.startswith("field "):
            field = int(line.split(None, 1)[1])
        elif line.startswith("vertices "):
            vertices = line.split()[1:]
        elif line.startswith("arrow "):
            m = re.fullmatch(r"arrow\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", line)
            if not m:
                raise ParseError(no, f"malformed arrow line {line!r}")
            arrows.append((m.group(1), m.group(2), m.group(3)))
        elif line.startswith("relation "):
            relation_specs.append((no, line[len("relation ") :].strip()))
        else:
            raise ParseError(no, f"unrecognised line {line!r}")
    if not vertices:
        raise ParseError(1, "no vertices declared")
    p = field if field is not None else default_field
    try:
        quiver = Quiver(vertices, arrows)
    except QuiverError as exc:
        raise ParseError(1, str(exc)) from exc
    from .algebra import normalize_relation

    rels = []
    for no, spec in relation_specs:
        try:
            rel = _parse_combination(quiver, spec, allow_trivial=False, p=p)
            rels.append(normalize_relation(quiver, rel, p))
        except (QuiverError, RelationError, ValueError) as exc:
            raise ParseError(no, str(exc)) from exc
    try:
        return build_algebra(quiver, rels, p=p, max_len=max_len)
    except RelationError as exc:
        raise ParseError(1, str(exc)) from exc


def _parse_combination(quiver: Quiver, spec: str, allow_trivial: bool, p: int):
    """Signed sum of path words: 'x1*x2 - y1*y2 + 2*x1*y2' or 'e1', '0'."""
    spec = spec.strip()
    if spec == "0":
        return []
    tokens = re.findall(r"[+-]|[^+\-\s]+", spec)
    terms: List[Tuple[int, Path]] = []
    sign = 1
    for tok in tokens:
        if tok == "+":
            sign = 1
            continue
        if tok == "-":
            sign = -1
            continue
        coeff = 1
        word = tok
        parts = word.split("*")
        if parts and re.fullmatch(r"\d+", parts[0]):
            coeff = int(parts[0])
            parts = parts[1:]
        if not parts:
            raise ValueError(f"term {tok!r} has no path word")
        if len(parts) == 1 and parts[0].startswith("e"):
            label = parts[0][1:]
            if label not in quiver.vertex_index:
                raise ValueError(f"unknown vertex in trivial path {parts[0]!r}")
            if not allow_trivial:
                raise ValueError("trivial paths are not allowed here")
            path = Path(quiver.vertex_index[label], ())
        else:
            path = make_path(quiver, parts)
        terms.append((sign * coeff, path))
        sign = 1
    return terms


def print_algebra(alg: Algebra) -> str:
    q = alg.quiver
    lines = ["[algebra]", f"field {alg.p}", "vertices " + " ".join(q.vertices)]
    for a in q.arrows:
        lines.append(f"arrow {a.name}: {q.vertices[a.source]} -> {q.vertices[a.target]}")
    for rel in alg.relations:
        lines.append("relation " + _format_combination(alg, rel))
    return "\n".join(lines) + "\n"


def _format_combination(alg: Algebra, terms) -> str:
    q = alg.quiver
    parts = []
    for k, (c, path) in enumerate(terms):
        c = c % alg.p
        word = (
            "*".join(q.arrows[a].name for a in path.arrows)
            if path.arrows
            else f"e{q.vertices[path.source]}"
        )
        txt = word if c == 1 else f"{c}*{word}"
        parts.append(txt if k == 0 else f"+ {txt}")
    return " ".join(parts) if parts else "0"


# -- modules ----------------------------------------------------------------


def parse_module(text: str, alg: Algebra) -> Module:
    lines = list(_logical_lines(text))
    return _parse_module_lines(lines, alg)


def _parse_module_lines(lines, alg: Algebra) -> Module:
    q = alg.quiver
    if not lines or lines[0][1] != "[module]":
        raise ParseError(lines[0][0] if lines else 1, "expected [module] header")
    dims: Optional[List[int]] = None
    mats: Dict[int, List[List[int]]] = {}
    current: Optional[int] = None
    for no, line in lines[1:]:
        if line.startswith("dims "):
            dims = [int(x) for x in line.split()[1:]]
            if len(dims) != q.num_vertices:
                raise ParseError(no, f"expected {q.num_vertices} dimensions, got {len(dims)}")
        elif line.startswith("arrow "):
            name = line.split()[1]
            if name not in q.arrow_index:
                raise ParseError(no, f"unknown arrow {name!r}")
            current = q.arrow_index[name]
            mats[current] = []
        else:
            if current is None or dims is None:
                raise ParseError(no, f"unexpected line {line!r} (need dims/arrow first)")
            try:
                row = [int(x) for x in line.split()]
            except ValueError:
                raise ParseError(no, f"malformed matrix row {line!r}")
            mats[current].append(row)
    if dims is None:
        raise ParseError(1, "missing dims line")
    full = []
    for idx, a in enumerate(q.arrows):
        want = (dims[a.target], dims[a.source])
        rows = mats.get(idx)
        if rows is None or not rows:
            full.append(Matrix.zeros(alg.p, *want))
            continue
        arr = np.array(rows, dtype=np.int64)
        if arr.shape != want:
            raise ParseError(
                1, f"arrow {a.name!r}: matrix shape {arr.shape} does not match dims {want}"
            )
        full.append(Matrix(alg.p, arr))
    try:
        return Module(alg, dims, full, validate=True)
    except ValueError as exc:
        raise ParseError(1, str(exc)) from exc


def print_module(M: Module) -> str:
    q = M.alg.quiver
    lines = ["[module]", "dims " + " ".join(str(d) for d in M.dims)]
    for idx, a in enumerate(q.arrows):
        m = M.mats[idx]
        if m.rows == 0 or m.cols == 0 or m.is_zero():
            continue
        lines.append(f"arrow {a.name}")
        for row in m.tolist():
            lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


# -- complexes ----------------------------------------------------------------


def parse_complex(text: str, alg: Algebra) -> ProjComplex:
    q = alg.quiver
    lines = list(_logical_lines(text))
    if not lines or lines[0][1] != "[complex]":
        raise ParseError(lines[0][0] if lines else 1, "expected [complex] header")
    mults: Dict[int, List[int]] = {}
    diff_rows: Dict[int, List[Tuple[int, str]]] = {}
    current: Optional[int] = None
    for no, line in lines[1:]:
        if line.startswith("term "):
            m = re.fullmatch(r"term\s+(-?\d+)\s*:\s*(.*)", line)
            if not m:
                raise ParseError(no, f"malformed term line {line!r}")
            deg = int(m.group(1))
            vec = [int(x) for x in m.group(2).split()]
            if len(vec) != q.num_vertices:
                raise ParseError(no, f"expected {q.num_vertices} multiplicities")
            mults[deg] = vec
            current = None
        elif line.startswith("diff "):
            current = int(line.split()[1])
            diff_rows[current] = []
        else:
            if current is None:
                raise ParseError(no, f"unexpected line {line!r}")
            diff_rows[current].append((no, line))
    terms: Dict[int, Tuple[int, ...]] = {}
    for deg, vec in mults.items():
        summands = []
        for v, k in enumerate(vec):
            summands.extend([v] * k)
        if summands:
            terms[deg] = tuple(summands)
    diffs: Dict[int, AlgMatrix] = {}
    for deg, rows in diff_rows.items():
        if deg not in terms or (deg + 1) not in terms:
            raise ParseError(rows[0][0] if rows else 1, f"diff {deg} has no matching terms")
        src, tgt = terms[deg], terms[deg + 1]
        if len(rows) != len(tgt):
            raise ParseError(
                rows[0][0] if rows else 1,
                f"diff {deg}: expected {len(tgt)} rows, got {len(rows)}",
            )
        m = AlgMatrix.zero(alg, src, tgt)
        for t, (no, row) in enumerate(rows):
            cells = [c.strip() for c in row.split(",")]
            if len(cells) != len(src):
                raise ParseError(no, f"expected {len(src)} entries, got {len(cells)}")
            for s, cell in enumerate(cells):
                try:
                    combo = _parse_combination(alg.quiver, cell, allow_trivial=True, p=alg.p)
                except ValueError as exc:
                    raise ParseError(no, str(exc)) from exc
                vec = alg.zero_element()
                for c, path in combo:
                    if path.source != tgt[t] or path_target(q, path) != src[s]:
                        raise ParseError(
                            no,
                            f"entry path goes {q.vertices[path.source]} -> "
                            f"{q.vertices[path_target(q, path)]}, expected "
                            f"{q.vertices[tgt[t]]} -> {q.vertices[src[s]]}",
                        )
                    if path in alg.basis_index:
                        vec[alg.basis_index[path]] = (vec[alg.basis_index[path]] + c) % alg.p
                    else:
                        for b, cc in alg._reduce_path(path).items():
                            vec[b] = (vec[b] + c * cc) % alg.p
                m.entries[t][s] = vec
        diffs[deg] = m
    try:
        return ProjComplex(alg, terms, diffs, validate=True)
    except ValueError as exc:
        raise ParseError(1, str(exc)) from exc


def print_complex(C: ProjComplex) -> str:
    alg = C.alg
    q = alg.quiver
    lines = ["[complex]"]
    for deg in C.degrees():
        vec = [0] * q.num_vertices
        for v in C.terms[deg].summands:
            vec[v] += 1
        lines.append(f"term {deg}: " + " ".join(str(x) for x in vec))
    for deg in sorted(C.diffs):
        d = C.diffs[deg]
        lines.append(f"diff {deg}")
        for t in range(len(d.tgt)):
            cells = []
            for s in range(len(d.src)):
                e = d.entries[t][s]
                terms = [(int(e[b]), alg.basis[int(b)]) for b in np.nonzero(e)[0]]
                cells.append(_format_combination(alg, terms))
            lines.append(", ".join(cells))
    return "\n".join(lines) + "\n"


# -- census -------------------------------------------------------------------


def print_census(cens: Census) -> str:
    lines = ["[census]", "bound " + " ".join(str(b) for b in cens.bound),
             f"field {cens.p}", f"count {len(cens.modules)}"]
    out = "\n".join(lines) + "\n"
    for M in cens.modules:
        out += print_module(M)
    return out


def parse_census(text: str, alg: Algebra) -> Census:
    lines = list(_logical_lines(text))
    if not lines or lines[0][1] != "[census]":
        raise ParseError(lines[0][0] if lines else 1, "expected [census] header")
    bound: Optional[Tuple[int, ...]] = None
    count: Optional[int] = None
    idx = 1
    while idx < len(lines) and not lines[idx][1].startswith("["):
        no, line = lines[idx]
        if line.startswith("bound "):
            bound = tuple(int(x) for x in line.split()[1:])
        elif line.startswith("field "):
            if int(line.split()[1]) != alg.p:
                raise ParseError(no, "census field does not match the algebra")
        elif line.startswith("count "):
            count = int(line.split()[1])
        else:
            raise ParseError(no, f"unrecognised census line {line!r}")
        idx += 1
    blocks: List[List[Tuple[int, str]]] = []
    for no, line in lines[idx:]:
        if line == "[module]":
            blocks.append([(no, line)])
        elif blocks:
            blocks[-1].append((no, line))
        else:
            raise ParseError(no, f"unexpected line {line!r} before first [module]")
    modules = [_parse_module_lines(block, alg) for block in blocks]
    if count is not None and count != len(modules):
        raise ParseError(1, f"census declares {count} modules but contains {len(modules)}")
    if bound is None:
        raise ParseError(1, "census missing bound line")
    return Census(alg, bound, modules, alg.p, method="file")
