"""Bound quiver algebras A = kQ/I over a prime field.

The algebra basis consists of residue paths: paths that do not reduce to
combinations of smaller paths modulo the relation ideal.  The basis is found
by length-graded linear reduction of the path space, level by level, stopping
once an entire length level becomes reducible (every longer path is then
reducible too, since reducibility is stable under appending arrows).

Relations may be arbitrary linear combinations of parallel paths of length
at least two.  For length-homogeneous relations the computed basis is exact.
For mixed-length relations the reduction continues through a stabilisation
window before stopping; growth past the length cap raises
AlgebraNotFiniteError.
"""

from __future__ import annotations

from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .linalg import _check_modulus


class QuiverError(ValueError):
    pass


class RelationError(ValueError):
    pass


class AlgebraNotFiniteError(RuntimeError):
    """Raised when basis computation does not terminate under the length cap."""


class Arrow(NamedTuple):
    name: str
    source: int
    target: int


class Quiver:
    """A finite quiver with labelled vertices and named arrows."""

    def __init__(self, vertices: Sequence[str], arrows: Sequence[Tuple[str, str, str]]):
        vertices = [str(v) for v in vertices]
        if len(set(vertices)) != len(vertices):
            raise QuiverError("vertex labels must be distinct")
        self.vertices: Tuple[str, ...] = tuple(vertices)
        self.vertex_index: Dict[str, int] = {v: i for i, v in enumerate(vertices)}
        arr = []
        names = set()
        for name, src, tgt in arrows:
            if name in names:
                raise QuiverError(f"duplicate arrow name {name!r}")
            names.add(name)
            if src not in self.vertex_index:
                raise QuiverError(f"arrow {name!r}: unknown source vertex {src!r}")
            if tgt not in self.vertex_index:
                raise QuiverError(f"arrow {name!r}: unknown target vertex {tgt!r}")
            arr.append(Arrow(name, self.vertex_index[src], self.vertex_index[tgt]))
        self.arrows: Tuple[Arrow, ...] = tuple(arr)
        self.arrow_index: Dict[str, int] = {a.name: i for i, a in enumerate(self.arrows)}
        self.arrows_from: List[List[int]] = [[] for _ in vertices]
        self.arrows_to: List[List[int]] = [[] for _ in vertices]
        for i, a in enumerate(self.arrows):
            self.arrows_from[a.source].append(i)
            self.arrows_to[a.target].append(i)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def __repr__(self):
        return f"Quiver({list(self.vertices)}, {len(self.arrows)} arrows)"


class Path(NamedTuple):
    """A path in the quiver: fixed source plus a composable arrow word.

    The word is read left to right: path (a1, a2) traverses a1 then a2.
    A trivial path has an empty word.
    """

    source: int
    arrows: Tuple[int, ...]

    def order_key(self):
        return (len(self.arrows), self.arrows)


def path_target(quiver: Quiver, path: Path) -> int:
    if not path.arrows:
        return path.source
    return quiver.arrows[path.arrows[-1]].target


def make_path(quiver: Quiver, arrow_names: Sequence[str]) -> Path:
    """Path from a nonempty list of composable arrow names."""
    idxs = []
    for name in arrow_names:
        if name not in quiver.arrow_index:
            raise QuiverError(f"unknown arrow {name!r}")
        idxs.append(quiver.arrow_index[name])
    for a, b in zip(idxs, idxs[1:]):
        if quiver.arrows[a].target != quiver.arrows[b].source:
            raise RelationError(
                f"arrows {quiver.arrows[a].name!r} and {quiver.arrows[b].name!r} do not compose"
            )
    return Path(quiver.arrows[idxs[0]].source, tuple(idxs))


Relation = List[Tuple[int, Path]]  # linear combination of parallel paths


def normalize_relation(quiver: Quiver, rel: Relation, p: int) -> Relation:
    """Validate admissibility and reduce coefficients mod p."""
    cleaned = [(c % p, path) for c, path in rel if c % p != 0]
    if not cleaned:
        raise RelationError("relation is zero")
    src = cleaned[0][1].source
    tgt = path_target(quiver, cleaned[0][1])
    for _, path in cleaned:
        if len(path.arrows) < 2:
            raise RelationError("relation contains a path of length < 2 (not admissible)")
        if path.source != src or path_target(quiver, path) != tgt:
            raise RelationError("relation mixes non-parallel paths")
    merged: Dict[Path, int] = {}
    for c, path in cleaned:
        merged[path] = (merged.get(path, 0) + c) % p
    out = [(c, path) for path, c in merged.items() if c]
    if not out:
        raise RelationError("relation is zero")
    return out


class Algebra:
    """kQ/I with an explicit residue-path basis and structure constants.

    Built through build_algebra; not meant to be constructed directly.
    Instances are immutable after construction and safe to share.
    """

    def __init__(self, quiver, p, relations, basis, expansions, reduction_level):
        self.quiver: Quiver = quiver
        self.p: int = p
        self.relations: List[Relation] = relations
        self.basis: List[Path] = basis
        self.dim: int = len(basis)
        self.basis_index: Dict[Path, int] = {path: i for i, path in enumerate(basis)}
        self._expansions = expansions  # pivot path -> {basis index: coeff}
        self.reduction_level = reduction_level
        # sector(v, w) = basis indices of paths v -> w
        nv = quiver.num_vertices
        self._sector: Dict[Tuple[int, int], List[int]] = {}
        self.trivial_index: List[int] = [-1] * nv
        for i, path in enumerate(basis):
            key = (path.source, path_target(quiver, path))
            self._sector.setdefault(key, []).append(i)
            if not path.arrows:
                self.trivial_index[path.source] = i
        self.radical_indices = tuple(i for i, b in enumerate(basis) if b.arrows)
        self._append: Dict[Tuple[int, int], Dict[int, int]] = {}
        self._build_append_table()
        self._product_cache: Dict[Tuple[int, int], Dict[int, int]] = {}

    # -- construction helpers -------------------------------------------

    def _reduce_path(self, path: Path) -> Dict[int, int]:
        """Normal form of a path as {basis index: coeff}; path must be known."""
        if path in self.basis_index:
            return {self.basis_index[path]: 1}
        if path not in self._expansions:
            raise KeyError(f"path outside the reduction window: {path}")
        return self._expansions[path]

    def _build_append_table(self):
        q = self.quiver
        for i, path in enumerate(self.basis):
            tgt = path_target(q, path)
            for a in q.arrows_from[tgt]:
                longer = Path(path.source, path.arrows + (a,))
                self._append[(i, a)] = self._reduce_path(longer)

    # -- public structure -------------------------------------------------

    def sector(self, v: int, w: int) -> Tuple[int, ...]:
        """Basis indices of residue paths from vertex v to vertex w."""
        return tuple(self._sector.get((v, w), ()))

    def basis_target(self, i: int) -> int:
        return path_target(self.quiver, self.basis[i])

    def zero_element(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int64)

    def unit(self) -> np.ndarray:
        e = self.zero_element()
        for i in self.trivial_index:
            e[i] = 1
        return e

    def idempotent(self, v: int) -> np.ndarray:
        e = self.zero_element()
        e[self.trivial_index[v]] = 1
        return e

    def basis_element(self, i: int) -> np.ndarray:
        e = self.zero_element()
        e[i] = 1
        return e

    def append_arrow(self, i: int, a: int) -> Dict[int, int]:
        """Normal form of (basis path i) . (arrow a), empty when not composable."""
        return self._append.get((i, a), {})

    def multiply_basis(self, i: int, j: int) -> Dict[int, int]:
        """Structure constants: normal form of basis_i * basis_j."""
        key = (i, j)
        cached = self._product_cache.get(key)
        if cached is not None:
            return cached
        pi, pj = self.basis[i], self.basis[j]
        if path_target(self.quiver, pi) != pj.source:
            result: Dict[int, int] = {}
        else:
            acc = {i: 1}
            for a in pj.arrows:
                nxt: Dict[int, int] = {}
                for b, c in acc.items():
                    for b2, c2 in self.append_arrow(b, a).items():
                        nxt[b2] = (nxt.get(b2, 0) + c * c2) % self.p
                acc = {b: c for b, c in nxt.items() if c}
            result = acc
        self._product_cache[key] = result
        return result

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Product of two elements given as coefficient vectors."""
        out = self.zero_element()
        for i in np.nonzero(x)[0]:
            ci = int(x[i])
            for j in np.nonzero(y)[0]:
                cj = int(y[j])
                for b, c in self.multiply_basis(int(i), int(j)).items():
                    out[b] = (out[b] + ci * cj * c) % self.p
        return out

    def element_sector(self, x: np.ndarray) -> Optional[Tuple[int, int]]:
        """(source, target) when x is supported in one sector, else None."""
        idx = np.nonzero(x)[0]
        if idx.size == 0:
            return None
        keys = {
            (self.basis[int(i)].source, self.basis_target(int(i))) for i in idx
        }
        return keys.pop() if len(keys) == 1 else None

    def scalar_part(self, x: np.ndarray, v: int) -> int:
        """Coefficient of the trivial path at v."""
        return int(x[self.trivial_index[v]])

    def corner_inverse(self, x: np.ndarray, v: int) -> np.ndarray:
        """Inverse of a unit x of the local corner algebra e_v A e_v.

        x must have nonzero scalar part; the radical part is nilpotent, so a
        geometric series terminates.
        """
        c = self.scalar_part(x, v)
        if c == 0:
            raise ValueError("element is not a unit of the corner algebra")
        cinv = pow(c, self.p - 2, self.p)
        # x = c(e_v - r) with r in rad; x^-1 = c^-1 (e_v + r + r^2 + ...)
        r = (-(x * cinv)) % self.p
        r[self.trivial_index[v]] = 0
        acc = self.idempotent(v)
        term = self.idempotent(v)
        while term.any():
            term = self.multiply(term, r)
            acc = (acc + term) % self.p
        return (acc * cinv) % self.p

    def element_str(self, x: np.ndarray) -> str:
        parts = []
        for i in np.nonzero(x)[0]:
            path = self.basis[int(i)]
            if path.arrows:
                word = "*".join(self.quiver.arrows[a].name for a in path.arrows)
            else:
                word = f"e{self.quiver.vertices[path.source]}"
            c = int(x[i])
            parts.append(word if c == 1 else f"{c}*{word}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"Algebra(dim={self.dim}, p={self.p}, {self.quiver!r})"


def _row_add(row: Dict[Path, int], other: Dict[Path, int], c: int, p: int) -> Dict[Path, int]:
    out = dict(row)
    for path, v in other.items():
        nv = (out.get(path, 0) + c * v) % p
        if nv:
            out[path] = nv
        else:
            out.pop(path, None)
    return out


def build_algebra(
    quiver: Quiver,
    relations: Sequence[Relation],
    p: int = 2,
    max_len: int = 30,
    max_paths: int = 200_000,
) -> Algebra:
    """Construct kQ/I; fails loudly when the quotient is not obviously
    finite-dimensional within the caps."""
    _check_modulus(p)
    rels = [normalize_relation(quiver, r, p) for r in relations]

    rel_maxlen = [max(len(path.arrows) for _, path in r) for r in rels]
    rel_minlen = [min(len(path.arrows) for _, path in r) for r in rels]
    extra = max((mx - mn for mx, mn in zip(rel_maxlen, rel_minlen)), default=0)

    # paths grouped by length; per length, grouped by source and by target
    by_len: List[List[Path]] = [[Path(v, ()) for v in range(quiver.num_vertices)]]
    pivot_rows: Dict[Path, Dict[Path, int]] = {}
    total_paths = quiver.num_vertices

    def insert_row(row: Dict[Path, int]) -> Optional[Path]:
        while row:
            pv = max(row, key=Path.order_key)
            c = row.pop(pv)
            if pv in pivot_rows:
                # pv is already known to equal its expansion; substitute
                row = _row_add(row, pivot_rows[pv], c, p)
                continue
            # pv + c^-1 * rest = 0, so pv expands to -(c^-1) * rest
            cinv = pow(c, p - 2, p)
            pivot_rows[pv] = {
                path: (-(v * cinv)) % p for path, v in row.items() if (v * cinv) % p
            }
            return pv
        return None

    full_since: Optional[int] = None  # first level of the current fully-reducible run
    low_pivot_in_window = False
    d = 0
    while True:
        d += 1
        if d > max_len:
            raise AlgebraNotFiniteError(
                f"path reduction did not terminate by length {max_len}; "
                "the algebra is not finite-dimensional under this cap"
            )
        prev = by_len[d - 1]
        level = []
        for path in prev:
            tgt = path_target(quiver, path)
            for a in quiver.arrows_from[tgt]:
                level.append(Path(path.source, path.arrows + (a,)))
        total_paths += len(level)
        if total_paths > max_paths:
            raise AlgebraNotFiniteError(
                f"more than {max_paths} paths generated; "
                "the algebra is not finite-dimensional under this cap"
            )
        by_len.append(level)
        if not level:
            break  # no paths of this length at all: basis is complete

        # generators u*r*v whose longest component has length exactly d
        new_low_pivot = False
        for rel, mx in zip(rels, rel_maxlen):
            budget = d - mx
            if budget < 0:
                continue
            src = rel[0][1].source
            tgt = path_target(quiver, rel[0][1])
            for lu in range(budget + 1):
                lv = budget - lu
                us = [u for u in by_len[lu] if path_target(quiver, u) == src]
                vs = [v for v in by_len[lv] if v.source == tgt]
                for u in us:
                    for v in vs:
                        row: Dict[Path, int] = {}
                        for c, rp in rel:
                            comp = Path(u.source, u.arrows + rp.arrows + v.arrows)
                            row[comp] = (row.get(comp, 0) + c) % p
                        row = {path: c for path, c in row.items() if c}
                        piv = insert_row(row)
                        if piv is not None and len(piv.arrows) < d - extra:
                            new_low_pivot = True

        level_full = all(path in pivot_rows for path in level)
        if level_full:
            if full_since is None:
                full_since = d
            if new_low_pivot:
                low_pivot_in_window = True
            if d - full_since >= extra:
                if not low_pivot_in_window:
                    break
                full_since = d  # restart the stabilisation window
                low_pivot_in_window = False
        else:
            full_since = None
            low_pivot_in_window = False

    # residue basis: non-pivot paths, ordered by (length, source, word)
    basis = [
        path
        for level in by_len
        for path in level
        if path not in pivot_rows
    ]
    basis.sort(key=lambda path: (len(path.arrows), path.source, path.arrows))
    basis_index = {path: i for i, path in enumerate(basis)}

    # fully back-substituted expansions of pivot paths over the residue basis
    expansions: Dict[Path, Dict[int, int]] = {}

    def expand(path: Path) -> Dict[int, int]:
        if path in basis_index:
            return {basis_index[path]: 1}
        cached = expansions.get(path)
        if cached is not None:
            return cached
        out: Dict[int, int] = {}
        for tail_path, c in pivot_rows[path].items():
            for b, c2 in expand(tail_path).items():
                out[b] = (out.get(b, 0) + c * c2) % p
        out = {b: c for b, c in out.items() if c}
        expansions[path] = out
        return out

    for path in pivot_rows:
        expand(path)

    return Algebra(quiver, p, rels, basis, expansions, reduction_level=len(by_len) - 1)
