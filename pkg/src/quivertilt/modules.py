"""Finite-dimensional right modules over a bound quiver algebra.

A module is a representation: one F_p space per vertex and one matrix per
arrow, mapping the source space to the target space (right action of the
arrow).  A path a1...ak then acts as M_ak @ ... @ M_a1.

This module provides Hom spaces, kernels/cokernels, trace and Gen/Cogen
membership, Krull-Schmidt decomposition via Fitting splittings, isomorphism
tests, minimal add(T)-approximations on both sides, and projective covers.
"""

from __future__ import annotations

import itertools
import random
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import Algebra, Path, path_target
from .linalg import Matrix, column_span_basis

# exhaustive endomorphism scans are used up to this many field elements
EXHAUST_CAP = 4096
RANDOM_TRIALS = 300
_SPLIT_SEED = 20240811


class Module:
    """A right A-module as a quiver representation. Immutable."""

    __slots__ = ("alg", "dims", "mats", "_pathact", "_cache")

    def __init__(self, alg: Algebra, dims: Sequence[int], mats: Sequence[Matrix], validate: bool = True):
        self.alg = alg
        self.dims: Tuple[int, ...] = tuple(int(d) for d in dims)
        self.mats: Tuple[Matrix, ...] = tuple(mats)
        self._pathact: Dict[Path, Matrix] = {}
        self._cache: Dict = {}
        if validate:
            self._validate()

    def _validate(self):
        q = self.alg.quiver
        if len(self.dims) != q.num_vertices:
            raise ValueError("dimension vector length does not match the quiver")
        if any(d < 0 for d in self.dims):
            raise ValueError("negative dimension")
        if len(self.mats) != len(q.arrows):
            raise ValueError("one matrix per arrow required")
        for a, m in zip(q.arrows, self.mats):
            want = (self.dims[a.target], self.dims[a.source])
            if m.shape != want:
                raise ValueError(
                    f"arrow {a.name!r}: matrix shape {m.shape}, expected {want}"
                )
            if m.p != self.alg.p:
                raise ValueError("matrix modulus differs from the algebra's")
        for rel in self.alg.relations:
            acc = None
            for c, path in rel:
                term = self.path_action(path).scale(c)
                acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                raise ValueError("matrices do not satisfy the algebra relations")

    # -- structure ------------------------------------------------------

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def path_action(self, path: Path) -> Matrix:
        """Matrix of the right action of a path, source space -> target space."""
        cached = self._pathact.get(path)
        if cached is not None:
            return cached
        p = self.alg.p
        m = Matrix.identity(p, self.dims[path.source])
        for a in path.arrows:
            m = self.mats[a] @ m
        self._pathact[path] = m
        return m

    def element_action(self, x: np.ndarray, v: int, w: int) -> Matrix:
        """Action of an algebra element supported in the (v, w) sector."""
        out = Matrix.zeros(self.alg.p, self.dims[w], self.dims[v])
        for i in np.nonzero(x)[0]:
            path = self.alg.basis[int(i)]
            if path.source != v or path_target(self.alg.quiver, path) != w:
                raise ValueError("element is not supported in the requested sector")
            out = out + self.path_action(path).scale(int(x[i]))
        return out

    def same_data(self, other: "Module") -> bool:
        """Equality of raw representation data (not isomorphism)."""
        return (
            self.alg is other.alg
            and self.dims == other.dims
            and all(a == b for a, b in zip(self.mats, other.mats))
        )

    def __repr__(self):
        return f"Module(dims={self.dims})"


class ModuleMap:
    """A homomorphism of representations: one matrix per vertex."""

    __slots__ = ("source", "target", "mats")

    def __init__(self, source: Module, target: Module, mats: Sequence[Matrix], validate: bool = True):
        self.source = source
        self.target = target
        self.mats: Tuple[Matrix, ...] = tuple(mats)
        if validate:
            q = source.alg.quiver
            for v in range(q.num_vertices):
                want = (target.dims[v], source.dims[v])
                if self.mats[v].shape != want:
                    raise ValueError(f"vertex {v}: matrix shape {self.mats[v].shape}, expected {want}")
            for i, a in enumerate(q.arrows):
                lhs = target.mats[i] @ self.mats[a.source]
                rhs = self.mats[a.target] @ source.mats[i]
                if lhs != rhs:
                    raise ValueError(f"matrices do not intertwine arrow {a.name!r}")

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target,
                         [a + b for a, b in zip(self.mats, other.mats)], validate=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target,
                         [a - b for a, b in zip(self.mats, other.mats)], validate=False)

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.source, self.target, [m.scale(c) for m in self.mats], validate=False)

    def compose(self, first: "ModuleMap") -> "ModuleMap":
        """self after first (self ∘ first)."""
        if first.target is not self.source and first.target.dims != self.source.dims:
            raise ValueError("composition mismatch")
        return ModuleMap(first.source, self.target,
                         [a @ b for a, b in zip(self.mats, first.mats)], validate=False)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.mats)

    def is_injective(self) -> bool:
        return all(m.rank() == m.cols for m in self.mats)

    def is_surjective(self) -> bool:
        return all(m.rank() == m.rows for m in self.mats)

    def is_isomorphism(self) -> bool:
        return (self.source.dims == self.target.dims) and all(m.is_invertible() for m in self.mats)

    def power(self, e: int) -> "ModuleMap":
        if self.source.dims != self.target.dims:
            raise ValueError("power of a non-endomorphism")
        return ModuleMap(self.source, self.target, [m.power(e) for m in self.mats], validate=False)

    def flatten(self) -> np.ndarray:
        """All matrix entries as one vector (for linear algebra on hom spaces)."""
        parts = [m.a.reshape(-1) for m in self.mats]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def __repr__(self):
        return f"ModuleMap({self.source.dims} -> {self.target.dims})"


def identity_map(M: Module) -> ModuleMap:
    p = M.alg.p
    return ModuleMap(M, M, [Matrix.identity(p, d) for d in M.dims], validate=False)


def zero_map(M: Module, N: Module) -> ModuleMap:
    p = M.alg.p
    return ModuleMap(M, N, [Matrix.zeros(p, dn, dm) for dm, dn in zip(M.dims, N.dims)], validate=False)


def zero_module(alg: Algebra) -> Module:
    nv = alg.quiver.num_vertices
    dims = [0] * nv
    mats = [Matrix.zeros(alg.p, 0, 0) for _ in alg.quiver.arrows]
    return Module(alg, dims, mats, validate=False)


def simple_module(alg: Algebra, v: int) -> Module:
    nv = alg.quiver.num_vertices
    dims = [1 if i == v else 0 for i in range(nv)]
    mats = [Matrix.zeros(alg.p, dims[a.target], dims[a.source]) for a in alg.quiver.arrows]
    return Module(alg, dims, mats, validate=False)


def direct_sum(summands: Sequence[Module]) -> Tuple[Module, List[ModuleMap], List[ModuleMap]]:
    """Direct sum with canonical injections and projections."""
    if not summands:
        raise ValueError("empty direct sum: pass [zero_module(alg)] instead")
    alg = summands[0].alg
    p = alg.p
    nv = alg.quiver.num_vertices
    dims = [sum(m.dims[v] for m in summands) for v in range(nv)]
    mats = [
        Matrix.block_diag([m.mats[a] for m in summands])
        for a in range(len(alg.quiver.arrows))
    ]
    total = Module(alg, dims, mats, validate=False)
    injections, projections = [], []
    offsets = [0] * nv
    for m in summands:
        inj, proj = [], []
        for v in range(nv):
            block = np.zeros((dims[v], m.dims[v]), dtype=np.int64)
            block[offsets[v] : offsets[v] + m.dims[v], :] = np.eye(m.dims[v], dtype=np.int64)
            inj.append(Matrix(p, block, _trusted=True))
            proj.append(Matrix(p, np.ascontiguousarray(block.T), _trusted=True))
        injections.append(ModuleMap(m, total, inj, validate=False))
        projections.append(ModuleMap(total, m, proj, validate=False))
        for v in range(nv):
            offsets[v] += m.dims[v]
    return total, injections, projections


def module_power(M: Module, k: int) -> Tuple[Module, List[ModuleMap], List[ModuleMap]]:
    if k == 0:
        z = zero_module(M.alg)
        return z, [], []
    return direct_sum([M] * k)


# -- explicit projectives ----------------------------------------------


class ExplicitProjective:
    """A finite direct sum of indecomposable projectives e_v A with a fixed
    basis of residue paths, summand-major.

    ``summands`` lists the generating vertex of each summand.  The basis of
    the vertex-w space is the concatenation over summands s of the residue
    paths v_s -> w.  The generator of summand s is its trivial path.
    """

    __slots__ = ("alg", "summands", "module", "_layout", "_gen_pos")

    def __init__(self, alg: Algebra, summands: Sequence[int]):
        self.alg = alg
        self.summands: Tuple[int, ...] = tuple(summands)
        nv = alg.quiver.num_vertices
        p = alg.p
        # layout[w] = list of (summand index, algebra basis index of a path v_s -> w)
        layout: List[List[Tuple[int, int]]] = [[] for _ in range(nv)]
        for s, v in enumerate(self.summands):
            for w in range(nv):
                for b in alg.sector(v, w):
                    layout[w].append((s, b))
        dims = [len(layout[w]) for w in range(nv)]
        pos = {(s, b): k for w in range(nv) for k, (s, b) in enumerate(layout[w])}
        mats = []
        for ai, arrow in enumerate(alg.quiver.arrows):
            w, l = arrow.source, arrow.target
            m = np.zeros((dims[l], dims[w]), dtype=np.int64)
            for col, (s, b) in enumerate(layout[w]):
                for b2, c in alg.append_arrow(b, ai).items():
                    m[pos[(s, b2)], col] = c
            mats.append(Matrix(p, m, _trusted=True))
        self.module = Module(alg, dims, mats, validate=False)
        self._layout = layout
        self._gen_pos = [
            pos[(s, alg.trivial_index[v])] for s, v in enumerate(self.summands)
        ]

    @property
    def dims(self):
        return self.module.dims

    def is_zero(self) -> bool:
        return not self.summands

    def layout(self, w: int) -> List[Tuple[int, int]]:
        return self._layout[w]

    def generator_position(self, s: int) -> int:
        """Index of the generator of summand s inside the vertex-v_s space."""
        return self._gen_pos[s]

    def hom_dim(self, M: Module) -> int:
        return sum(M.dims[v] for v in self.summands)

    def hom_coords_to_map(self, M: Module, coords: np.ndarray) -> ModuleMap:
        """Hom(P, M) as generator images: coords = concat of u_s in M_{v_s}."""
        p = self.alg.p
        nv = self.alg.quiver.num_vertices
        gens: List[np.ndarray] = []
        off = 0
        for v in self.summands:
            gens.append(np.asarray(coords[off : off + M.dims[v]], dtype=np.int64))
            off += M.dims[v]
        mats = []
        for w in range(nv):
            cols = np.zeros((M.dims[w], self.module.dims[w]), dtype=np.int64)
            for col, (s, b) in enumerate(self._layout[w]):
                act = M.path_action(self.alg.basis[b])
                cols[:, col] = (act.a @ gens[s]) % p
            mats.append(Matrix(p, cols, _trusted=True))
        return ModuleMap(self.module, M, mats, validate=False)

    def map_to_hom_coords(self, f: ModuleMap) -> np.ndarray:
        """Inverse of hom_coords_to_map: read off generator images."""
        parts = []
        for s, v in enumerate(self.summands):
            parts.append(f.mats[v].a[:, self._gen_pos[s]])
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def gen_matrix_of(self, f: ModuleMap, source: "ExplicitProjective") -> List[List[np.ndarray]]:
        """Generator coordinates of f: source -> self as algebra elements.

        Entry [t][s] is an element of e_{v_t(self-side)}... precisely: the image
        of source generator t expressed over self's layout gives, per self
        summand s, an element of the algebra sector (v_s -> w_t).
        """
        alg = self.alg
        out: List[List[np.ndarray]] = []
        for t, w in enumerate(source.summands):
            gen_col = f.mats[w].a[:, source.generator_position(t)]
            row = [alg.zero_element() for _ in self.summands]
            for k, (s, b) in enumerate(self._layout[w]):
                if gen_col[k]:
                    row[s][b] = gen_col[k]
            out.append(row)
        return out

    def induced_hom_matrix(self, g: ModuleMap, source: "ExplicitProjective", M: Module) -> Matrix:
        """Matrix of Hom(self, M) -> Hom(source, M), phi -> phi ∘ g,
        where g: source.module -> self.module, in generator coordinates."""
        alg = self.alg
        p = alg.p
        rows = source.hom_dim(M)
        cols = self.hom_dim(M)
        out = np.zeros((rows, cols), dtype=np.int64)
        col_off = [0]
        for v in self.summands:
            col_off.append(col_off[-1] + M.dims[v])
        row_off = [0]
        for w in source.summands:
            row_off.append(row_off[-1] + M.dims[w])
        for t, w in enumerate(source.summands):
            gen_col = g.mats[w].a[:, source.generator_position(t)]
            for k, (s, b) in enumerate(self._layout[w]):
                c = int(gen_col[k])
                if c:
                    act = M.path_action(alg.basis[b]).a
                    out[row_off[t] : row_off[t + 1], col_off[s] : col_off[s + 1]] += c * act
        return Matrix(p, out % p, _trusted=True)

    def __repr__(self):
        return f"ExplicitProjective(vertices={self.summands})"


def projective_module(alg: Algebra, v: int) -> ExplicitProjective:
    """The indecomposable projective generated at vertex v (e_v A)."""
    return ExplicitProjective(alg, [v])


def regular_module(alg: Algebra) -> ExplicitProjective:
    """A as a right module over itself: one projective summand per vertex."""
    return ExplicitProjective(alg, list(range(alg.quiver.num_vertices)))


# -- hom spaces --------------------------------------------------------


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """np.kron without its per-call overhead (hot path)."""
    ra, ca = a.shape
    rb, cb = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def hom_basis(M: Module, N: Module) -> List[ModuleMap]:
    """Basis of Hom_A(M, N) by solving the intertwining system."""
    key = ("hom", id(N))
    cached = M._cache.get(key)
    if cached is not None and cached[0] is N:
        return cached[1]
    p = M.alg.p
    q = M.alg.quiver
    nv = q.num_vertices
    sizes = [N.dims[v] * M.dims[v] for v in range(nv)]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    rows = []
    for ai, a in enumerate(q.arrows):
        i, j = a.source, a.target
        nrows = N.dims[j] * M.dims[i]
        if nrows == 0:
            continue
        block = np.zeros((nrows, total), dtype=np.int64)
        # N_a @ f_i  ->  (N_a ⊗ I) vec(f_i)
        block[:, offsets[i] : offsets[i + 1]] = _kron(
            N.mats[ai].a, np.eye(M.dims[i], dtype=np.int64)
        )
        # - f_j @ M_a  ->  -(I ⊗ M_a^T) vec(f_j)
        block[:, offsets[j] : offsets[j + 1]] -= _kron(
            np.eye(N.dims[j], dtype=np.int64), M.mats[ai].a.T
        )
        rows.append(block % p)
    if rows:
        sys_mat = Matrix(p, np.vstack(rows), _trusted=True)
    else:
        sys_mat = Matrix.zeros(p, 0, total)
    null = sys_mat.nullspace()
    basis = []
    for k in range(null.cols):
        vec = null.a[:, k]
        mats = []
        for v in range(nv):
            seg = vec[offsets[v] : offsets[v + 1]]
            mats.append(Matrix(p, seg.reshape(N.dims[v], M.dims[v])))
        basis.append(ModuleMap(M, N, mats, validate=False))
    M._cache[key] = (N, basis)
    return basis


def hom_dim(M: Module, N: Module) -> int:
    return len(hom_basis(M, N))


def map_from_coords(basis: Sequence[ModuleMap], coords: Sequence[int]) -> ModuleMap:
    if not basis:
        raise ValueError("empty hom basis")
    out = basis[0].scale(int(coords[0]))
    for f, c in zip(basis[1:], coords[1:]):
        if c:
            out = out + f.scale(int(c))
    return out


def coords_of_map(basis: Sequence[ModuleMap], f: ModuleMap) -> Optional[np.ndarray]:
    """Coordinates of f in the given hom basis, or None if outside the span."""
    if not basis:
        return None if not f.is_zero() else np.zeros(0, dtype=np.int64)
    p = f.source.alg.p
    cols = Matrix(p, np.stack([g.flatten() for g in basis], axis=1))
    return cols.solve(f.flatten())


# -- subquotients ------------------------------------------------------


def submodule_from_bases(M: Module, bases: Sequence[Matrix]) -> Tuple[Module, ModuleMap]:
    """Module on given vertexwise column spans (must be arrow-stable)."""
    alg = M.alg
    p = alg.p
    q = alg.quiver
    bases = [column_span_basis(b) for b in bases]
    dims = [b.cols for b in bases]
    mats = []
    for ai, a in enumerate(q.arrows):
        img = M.mats[ai] @ bases[a.source]
        sol = bases[a.target].solve_matrix(img)
        if sol is None:
            raise ValueError("spans are not stable under the arrow action")
        mats.append(sol)
    sub = Module(alg, dims, mats, validate=False)
    incl = ModuleMap(sub, M, bases, validate=False)
    return sub, incl


def kernel(f: ModuleMap) -> Tuple[Module, ModuleMap]:
    """Vertexwise kernel with the induced action; returns (ker, inclusion)."""
    bases = [m.nullspace() for m in f.mats]
    return submodule_from_bases(f.source, bases)


def image(f: ModuleMap) -> Tuple[Module, ModuleMap]:
    """Vertexwise image with the induced action; returns (im, inclusion)."""
    bases = [column_span_basis(m) for m in f.mats]
    return submodule_from_bases(f.target, bases)


def cokernel(f: ModuleMap) -> Tuple[Module, ModuleMap]:
    """Vertexwise cokernel; returns (coker, projection)."""
    N = f.target
    alg = N.alg
    p = alg.p
    nv = alg.quiver.num_vertices
    projs = []
    for v in range(nv):
        im = column_span_basis(f.mats[v])
        # complete im to a basis of N_v with standard vectors, then the
        # projection is the bottom rows of the inverse change of basis
        full = Matrix.hstack([im, Matrix.identity(p, N.dims[v])])
        pivots = full.column_space_pivots()
        comp_cols = [j - im.cols for j in pivots if j >= im.cols]
        basis = Matrix.hstack(
            [im, Matrix(p, np.eye(N.dims[v], dtype=np.int64)[:, comp_cols])]
        )
        inv = basis.inverse()
        assert inv is not None
        projs.append(Matrix(p, inv.a[im.cols :, :], _trusted=True))
    dims = [m.rows for m in projs]
    # sections (right inverses) exist since each projection has full row rank;
    # the induced action is independent of the choice because N_a preserves im f
    sections = []
    for v in range(nv):
        sec = projs[v].solve_matrix(Matrix.identity(p, dims[v]))
        assert sec is not None
        sections.append(sec)
    mats = []
    for ai, a in enumerate(alg.quiver.arrows):
        mats.append(projs[a.target] @ N.mats[ai] @ sections[a.source])
    cok = Module(alg, dims, mats, validate=False)
    return cok, ModuleMap(N, cok, projs, validate=False)


# -- trace, Gen, Cogen --------------------------------------------------


def trace_submodule(T: Module, M: Module) -> Tuple[Module, ModuleMap, bool]:
    """(trace of T in M, inclusion, whether M lies in Gen(T))."""
    alg = M.alg
    p = alg.p
    nv = alg.quiver.num_vertices
    homs = hom_basis(T, M)
    spans = []
    for v in range(nv):
        cols = [f.mats[v] for f in homs]
        stacked = Matrix.hstack(cols) if cols else Matrix.zeros(p, M.dims[v], 0)
        spans.append(column_span_basis(stacked))
    # the vertexwise span of images of all homs is arrow stable: arrows map
    # im(f_v) into im(f_w) for each hom f
    sub, incl = submodule_from_bases(M, spans)
    gen = sub.dims == M.dims
    return sub, incl, gen


def in_gen(T: Module, M: Module) -> bool:
    key = ("gen", id(T))
    cached = M._cache.get(key)
    if cached is not None and cached[0] is T:
        return cached[1]
    result = trace_submodule(T, M)[2]
    M._cache[key] = (T, result)
    return result


def in_cogen(T: Module, M: Module) -> bool:
    """True when the joint kernel of all maps M -> T vanishes."""
    p = M.alg.p
    homs = hom_basis(M, T)
    for v in range(M.alg.quiver.num_vertices):
        if M.dims[v] == 0:
            continue
        rows = [f.mats[v] for f in homs]
        stacked = Matrix.vstack(rows) if rows else Matrix.zeros(p, 0, M.dims[v])
        if stacked.rank() < M.dims[v]:
            return False
    return True


# -- decomposition -----------------------------------------------------


class Decomposition:
    """Krull-Schmidt data: pairwise non-isomorphic parts with multiplicities
    and an isomorphism witness from the rebuilt direct sum."""

    def __init__(self, module: Module, parts: List[Tuple[Module, int]], witness: ModuleMap,
                 piece_inclusions: Optional[List[ModuleMap]] = None):
        self.module = module
        self.parts = parts
        self.witness = witness
        # one inclusion per indecomposable piece (multiplicities expanded)
        self.piece_inclusions = piece_inclusions or []

    @property
    def summand_count(self) -> int:
        return sum(mult for _, mult in self.parts)

    @property
    def distinct_count(self) -> int:
        return len(self.parts)

    def __repr__(self):
        return f"Decomposition({[(m.dims, k) for m, k in self.parts]})"


def _endo_candidates(endos: List[ModuleMap], p: int, rng: random.Random):
    """Candidate splitting endomorphisms: basis, pair sums, then either the
    whole span (when small) or random combinations."""
    for f in endos:
        yield f
    for f, g in itertools.combinations(endos, 2):
        yield f + g
    d = len(endos)
    if d == 0:
        return
    if p ** d <= EXHAUST_CAP:
        for coeffs in itertools.product(range(p), repeat=d):
            if sum(coeffs) and any(coeffs):
                yield map_from_coords(endos, coeffs)
    else:
        for _ in range(RANDOM_TRIALS):
            coeffs = [rng.randrange(p) for _ in range(d)]
            if any(coeffs):
                yield map_from_coords(endos, coeffs)


def _split_once(M: Module, rng: random.Random) -> Optional[Tuple[ModuleMap, ModuleMap]]:
    """A proper splitting M = ker(g) ⊕ im(g), as two inclusions, or None."""
    n = M.total_dim
    endos = hom_basis(M, M)
    if len(endos) == 1:
        return None  # End(M) = k: indecomposable
    for f in _endo_candidates(endos, M.alg.p, rng):
        if f.is_isomorphism():
            continue
        g = f.power(n)
        if g.is_zero():
            continue
        ker, ker_incl = kernel(g)
        img, img_incl = image(g)
        if ker.total_dim == 0 or img.total_dim == 0:
            continue
        return ker_incl, img_incl
    return None


def _split_fully(M: Module, incl: ModuleMap, rng: random.Random) -> List[ModuleMap]:
    """Inclusions of indecomposable summands into the original module."""
    if M.total_dim == 0:
        return []
    split = _split_once(M, rng)
    if split is None:
        return [incl]
    out = []
    for part_incl in split:
        composed = incl.compose(part_incl)
        out.extend(_split_fully(part_incl.source, composed, rng))
    return out


def decompose(M: Module) -> Decomposition:
    cached = M._cache.get("decompose")
    if cached is not None:
        return cached
    rng = random.Random(_SPLIT_SEED)
    pieces = _split_fully(M, identity_map(M), rng)
    # group by isomorphism
    groups: List[Tuple[Module, List[ModuleMap]]] = []
    for incl in pieces:
        piece = incl.source
        for rep, incls in groups:
            if iso_modules(rep, piece):
                incls.append(incl)
                break
        else:
            groups.append((piece, [incl]))
    groups.sort(key=lambda g: (g[0].total_dim, g[0].dims))
    parts = [(rep, len(incls)) for rep, incls in groups]
    if pieces:
        all_incl = [incl for _, incls in groups for incl in incls]
        total, injections, _ = direct_sum([i.source for i in all_incl])
        mats = []
        for v in range(M.alg.quiver.num_vertices):
            cols = [i.mats[v] for i in all_incl]
            mats.append(Matrix.hstack(cols))
        witness = ModuleMap(total, M, mats, validate=False)
    else:
        witness = zero_map(zero_module(M.alg), M)
    dec = Decomposition(M, parts, witness, piece_inclusions=pieces)
    M._cache["decompose"] = dec
    return dec


def is_indecomposable(M: Module) -> bool:
    return M.total_dim > 0 and decompose(M).summand_count == 1


def iso_modules(M: Module, N: Module) -> bool:
    """Isomorphism test via Krull-Schmidt matching."""
    if M.dims != N.dims:
        return False
    if M.total_dim == 0:
        return True
    if M is N:
        return True
    if _indec_iso_quick(M, N):
        return True
    dm, dn = decompose(M), decompose(N)
    if dm.summand_count != dn.summand_count:
        return False
    remaining = [(rep, mult) for rep, mult in dn.parts]
    for rep, mult in dm.parts:
        for k, (other, omult) in enumerate(remaining):
            if omult == mult and rep.dims == other.dims and _indec_iso_quick(rep, other):
                remaining.pop(k)
                break
        else:
            return False
    return not remaining


def _indec_iso_quick(M: Module, N: Module) -> bool:
    """Scan the hom basis for an invertible map.

    Complete for indecomposables: when M ≅ N with local endomorphism rings,
    the non-isomorphisms form a proper subspace of Hom(M, N), so some basis
    element must be invertible.  For decomposables it is a sound shortcut
    (may return False even for isomorphic modules).
    """
    if M.dims != N.dims:
        return False
    if M.total_dim == 0:
        return True
    for f in hom_basis(M, N):
        if f.is_isomorphism():
            return True
    return False


def in_add(M: Module, T: Module) -> bool:
    """Whether every indecomposable summand of M occurs in T."""
    if M.total_dim == 0:
        return True
    tparts = decompose(T).parts
    for rep, _ in decompose(M).parts:
        if not any(iso_modules(rep, t) for t, _ in tparts):
            return False
    return True


def basic_version(M: Module) -> Module:
    """Direct sum of the distinct indecomposable summands, one copy each."""
    parts = decompose(M).parts
    if not parts:
        return zero_module(M.alg)
    return direct_sum([rep for rep, _ in parts])[0]


def add_equivalent(M: Module, N: Module) -> bool:
    return iso_modules(basic_version(M), basic_version(N))


# -- approximations ----------------------------------------------------


def _factors_through_rank(T: Module, mid: Module, f: ModuleMap, target_dim: int) -> bool:
    """rank of Hom(T, mid) --(f∘-)--> Hom(T, target) equals target_dim?"""
    p = T.alg.p
    basis_mid = hom_basis(T, mid)
    if not basis_mid:
        return target_dim == 0
    cols = np.stack([f.compose(g).flatten() for g in basis_mid], axis=1)
    return Matrix(p, cols).rank() == target_dim


def minimal_right_approx(T: Module, M: Module) -> ModuleMap:
    """Right add(T)-approximation of M, right minimal.

    Every map T -> M factors through the returned map; no direct summand of
    the source maps to zero.
    """
    key = ("rapprox", id(T))
    cached = M._cache.get(key)
    if cached is not None and cached[0] is T:
        return cached[1]
    alg = M.alg
    homs = hom_basis(T, M)
    d = len(homs)
    if d == 0:
        result = zero_map(zero_module(alg), M)
        M._cache[key] = (T, result)
        return result
    if in_add(M, T):
        result = identity_map(M)
        M._cache[key] = (T, result)
        return result
    source, injections, _ = module_power(T, d)
    mats = []
    for v in range(alg.quiver.num_vertices):
        mats.append(Matrix.hstack([h.mats[v] for h in homs]))
    f = ModuleMap(source, M, mats, validate=False)
    # the indecomposable pieces of T^d come from those of T, no splitting needed
    piece_incls = [
        inj.compose(pi) for inj in injections for pi in decompose(T).piece_inclusions
    ]
    f = _right_minimize(T, f, d, piece_incls)
    M._cache[key] = (T, f)
    return f


def _right_minimize(T: Module, f: ModuleMap, hom_rank: int,
                    piece_incls: Optional[List[ModuleMap]] = None) -> ModuleMap:
    rng = random.Random(_SPLIT_SEED + 1)
    first = True
    while True:
        X = f.source
        if first and piece_incls is not None:
            incls = piece_incls
        else:
            incls = decompose(X).piece_inclusions
        first = False
        changed = True
        any_drop = False
        while changed and len(incls) > 1:
            changed = False
            for k in range(len(incls)):
                rest = [i for j, i in enumerate(incls) if j != k]
                C, cmats = _combine_inclusions(X, rest)
                f_c = ModuleMap(C, f.target, [f.mats[v] @ cmats[v] for v in range(len(cmats))], validate=False)
                if _factors_through_rank(T, C, f_c, hom_rank):
                    incls = rest
                    changed = True
                    any_drop = True
                    break
        if any_drop:
            C, cmats = _combine_inclusions(X, incls)
            f = ModuleMap(C, f.target, [f.mats[v] @ cmats[v] for v in range(len(cmats))], validate=False)
        # residual check: any non-unit phi with f∘phi = f exposes a junk summand
        psi = _find_collapsing_endo(f, side="right", rng=rng)
        if psi is None:
            return f
        g = psi.power(f.source.total_dim)
        img, img_incl = image(g)
        f = ModuleMap(img, f.target, [f.mats[v] @ img_incl.mats[v] for v in range(len(f.mats))], validate=False)


def _combine_inclusions(X: Module, incls: List[ModuleMap]):
    total, _, _ = direct_sum([i.source for i in incls])
    mats = []
    for v in range(X.alg.quiver.num_vertices):
        mats.append(Matrix.hstack([i.mats[v] for i in incls]))
    return total, mats


def _find_collapsing_endo(f: ModuleMap, side: str, rng: random.Random) -> Optional[ModuleMap]:
    """Some 1+psi that is not invertible, where psi kills f on the given side."""
    X = f.source if side == "right" else f.target
    endos = hom_basis(X, X)
    if not endos:
        return None
    p = X.alg.p
    flat = []
    for e in endos:
        comp = f.compose(e) if side == "right" else e.compose(f)
        flat.append(comp.flatten())
    sysm = Matrix(p, np.stack(flat, axis=1))
    null = sysm.nullspace()
    ident = identity_map(X)
    for k in range(null.cols):
        psi = map_from_coords(endos, null.a[:, k])
        cand = ident + psi
        if not cand.is_isomorphism():
            return cand
    # combinations of kernel vectors
    if null.cols > 1:
        count = p ** null.cols
        if count <= EXHAUST_CAP:
            combos = itertools.product(range(p), repeat=null.cols)
        else:
            combos = ([rng.randrange(p) for _ in range(null.cols)] for _ in range(RANDOM_TRIALS))
        for coeffs in combos:
            if not any(coeffs):
                continue
            vec = (null.a @ np.asarray(coeffs, dtype=np.int64)) % p
            psi = map_from_coords(endos, vec)
            cand = ident + psi
            if not cand.is_isomorphism():
                return cand
    return None


def minimal_left_approx(M: Module, T: Module) -> ModuleMap:
    """Left add(T)-approximation of M, left minimal.

    Every map M -> T' with T' in add(T) factors through the returned map.
    """
    key = ("lapprox", id(T))
    cached = M._cache.get(key)
    if cached is not None and cached[0] is T:
        return cached[1]
    alg = M.alg
    homs = hom_basis(M, T)
    d = len(homs)
    if d == 0:
        result = zero_map(M, zero_module(alg))
        M._cache[key] = (T, result)
        return result
    if in_add(M, T):
        result = identity_map(M)
        M._cache[key] = (T, result)
        return result
    target, injections, _ = module_power(T, d)
    mats = []
    for v in range(alg.quiver.num_vertices):
        mats.append(Matrix.vstack([h.mats[v] for h in homs]))
    f = ModuleMap(M, target, mats, validate=False)
    piece_incls = [
        inj.compose(pi) for inj in injections for pi in decompose(T).piece_inclusions
    ]
    f = _left_minimize(T, f, d, piece_incls)
    M._cache[key] = (T, f)
    return f


def _cofactors_through_rank(T: Module, mid: Module, f: ModuleMap, target_dim: int) -> bool:
    """rank of Hom(mid, T) --(-∘f)--> Hom(source, T) equals target_dim?"""
    p = T.alg.p
    basis_mid = hom_basis(mid, T)
    if not basis_mid:
        return target_dim == 0
    cols = np.stack([g.compose(f).flatten() for g in basis_mid], axis=1)
    return Matrix(p, cols).rank() == target_dim


def _left_minimize(T: Module, f: ModuleMap, hom_rank: int,
                   piece_incls: Optional[List[ModuleMap]] = None) -> ModuleMap:
    rng = random.Random(_SPLIT_SEED + 2)
    first = True
    while True:
        X = f.target
        if first and piece_incls is not None:
            incls = piece_incls
        else:
            incls = decompose(X).piece_inclusions
        first = False
        kept = list(range(len(incls)))
        changed = True
        any_drop = False
        while changed and len(kept) > 1:
            changed = False
            for k in list(kept):
                rest = [i for i in kept if i != k]
                C, _ = _combine_inclusions(X, [incls[i] for i in rest])
                proj = _projection_along(X, incls, rest)
                f_c = ModuleMap(f.source, C, [proj[v] @ f.mats[v] for v in range(len(proj))], validate=False)
                if _cofactors_through_rank(T, C, f_c, hom_rank):
                    kept = rest
                    changed = True
                    any_drop = True
                    break
        if any_drop:
            C, _ = _combine_inclusions(X, [incls[i] for i in kept])
            proj = _projection_along(X, incls, kept)
            f = ModuleMap(f.source, C, [proj[v] @ f.mats[v] for v in range(len(proj))], validate=False)
        psi = _find_collapsing_endo(f, side="left", rng=rng)
        if psi is None:
            return f
        g = psi.power(f.target.total_dim)
        img, img_incl = image(g)
        # f lands in im(g) because g∘f = f
        corestricted = []
        for v in range(len(f.mats)):
            sol = img_incl.mats[v].solve_matrix(f.mats[v])
            assert sol is not None
            corestricted.append(sol)
        f = ModuleMap(f.source, img, corestricted, validate=False)


def _projection_along(X: Module, incls: List[ModuleMap], kept: List[int]) -> List[Matrix]:
    """Vertexwise projection X -> ⊕(kept pieces) along the other pieces."""
    p = X.alg.p
    order = list(kept) + [i for i in range(len(incls)) if i not in kept]
    projs = []
    for v in range(X.alg.quiver.num_vertices):
        cols = [incls[i].mats[v] for i in order]
        full = Matrix.hstack(cols) if cols else Matrix.zeros(p, X.dims[v], 0)
        inv = full.inverse()
        assert inv is not None, "summand inclusions do not span"
        keep_width = sum(incls[i].mats[v].cols for i in kept)
        projs.append(Matrix(p, inv.a[:keep_width, :], _trusted=True))
    return projs


# -- radical, top, projective cover -------------------------------------


def radical_submodule(M: Module) -> Tuple[Module, ModuleMap]:
    """M·rad(A): vertexwise the sum of images of all incoming arrows."""
    alg = M.alg
    p = alg.p
    spans = []
    for v in range(alg.quiver.num_vertices):
        cols = [M.mats[ai] for ai in alg.quiver.arrows_to[v]]
        stacked = Matrix.hstack(cols) if cols else Matrix.zeros(p, M.dims[v], 0)
        spans.append(column_span_basis(stacked))
    return submodule_from_bases(M, spans)


def top_quotient(M: Module) -> Tuple[Module, ModuleMap]:
    """M / rad(M) with the projection."""
    _, incl = radical_submodule(M)
    return cokernel(incl)


def projective_cover(M: Module) -> Tuple[ExplicitProjective, ModuleMap]:
    """Minimal projective cover P ↠ M (kernel inside rad P)."""
    alg = M.alg
    p = alg.p
    rad, rad_incl = radical_submodule(M)
    summands: List[int] = []
    lifts: List[np.ndarray] = []
    for v in range(alg.quiver.num_vertices):
        rad_cols = rad_incl.mats[v]
        full = Matrix.hstack([rad_cols, Matrix.identity(p, M.dims[v])])
        pivots = full.column_space_pivots()
        for j in pivots:
            if j >= rad_cols.cols:
                summands.append(v)
                e = np.zeros(M.dims[v], dtype=np.int64)
                e[j - rad_cols.cols] = 1
                lifts.append(e)
    P = ExplicitProjective(alg, summands)
    coords = np.concatenate(lifts) if lifts else np.zeros(0, dtype=np.int64)
    cover = P.hom_coords_to_map(M, coords)
    return P, cover


def top_radical_cover(M: Module):
    """(top, radical inclusion, cover projective, cover map)."""
    rad, rad_incl = radical_submodule(M)
    top, _ = cokernel(rad_incl)
    P, cover = projective_cover(M)
    return top, rad_incl, P, cover
