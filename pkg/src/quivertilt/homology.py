"""Projective presentations, Ext groups, Hom-exactness classes and
approximation towers.

The two central gadgets:

* a minimal projective presentation P_n -> ... -> P_0 -> T -> 0 (iterated
  projective covers of syzygies), together with the class of modules M for
  which the induced sequence Hom(P_0, M) -> ... -> Hom(P_n, M) -> 0 stays
  exact at the top k spots;

* towers A -> T_0 -> T_1 -> ... built from minimal left add(T)-approximations
  of successive cokernels, together with the class of modules for which the
  induced Hom sequence ending in Hom(A, M) -> 0 stays exact.

Minimal data is used throughout: any qualifying presentation or tower factors
stagewise through the minimal one, so the minimal object is the universal
witness.  The brute-force oracles in the test suite check this on small
instances.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .linalg import Matrix
from .modules import (
    ExplicitProjective,
    Module,
    ModuleMap,
    cokernel,
    direct_sum,
    hom_basis,
    hom_dim,
    in_add,
    in_gen,
    kernel,
    minimal_left_approx,
    minimal_right_approx,
    module_power,
    projective_cover,
    regular_module,
    zero_map,
)
from .tri import Tri


@dataclass
class SearchCaps:
    """Caps for the semi-decidable searches; echoed into reports."""

    subspace_total: int = 30000  # max number of hom subspaces enumerated per step
    pres_pad: int = 1  # extra T-summands tried on recursive kernels
    cone_depth: int = 3  # generation search depth
    cone_width: int = 64  # generation search frontier size
    max_resolution: int = 12  # hard stop for projective dimension probes


DEFAULT_CAPS = SearchCaps()


class Presentation:
    """An (n+1)-projective presentation P_n -> ... -> P_0 -> T -> 0.

    diffs[i] maps projs[i] to projs[i-1] (1 <= i <= n); aug maps projs[0]
    onto T.  min_presentation builds the minimal one (differentials land in
    radicals); padded_presentation enlarges its top term for the
    support-sensitive predicates.
    """

    def __init__(self, T: Module, projs: List[ExplicitProjective], diffs: List[ModuleMap], aug: ModuleMap):
        self.T = T
        self.projs = projs
        self.diffs = diffs
        self.aug = aug

    @property
    def n(self) -> int:
        return len(self.projs) - 1

    def term_dims(self) -> List[Tuple[int, ...]]:
        return [P.dims for P in self.projs]

    def hom_dims(self, M: Module) -> List[int]:
        return [P.hom_dim(M) for P in self.projs]

    def induced_matrices(self, M: Module, upto: Optional[int] = None) -> List[Matrix]:
        """[D_1, ..., D_upto] with D_i : Hom(P_{i-1}, M) -> Hom(P_i, M)."""
        upto = self.n if upto is None else upto
        out = []
        for i in range(1, upto + 1):
            out.append(self.projs[i - 1].induced_hom_matrix(self.diffs[i], self.projs[i], M))
        return out

    def hom_sequence_exact(self, M: Module, k: Optional[int] = None) -> bool:
        """Whether M lies in the vanishing class of this presentation.

        Checks exactness of Hom(P_{n-k}, M) -> ... -> Hom(P_n, M) -> 0, that
        is, exactness at the spots Hom(P_i, M) for n-k+1 <= i <= n-1 plus
        surjectivity onto Hom(P_n, M).  k defaults to n (the full class).
        """
        n = self.n
        k = n if k is None else k
        if not 1 <= k <= n:
            raise ValueError(f"k must be in 1..{n}, got {k}")
        dims = self.hom_dims(M)
        mats = self.induced_matrices(M)
        ranks = [m.rank() for m in mats]  # ranks[i-1] = rank D_i
        if ranks[n - 1] != dims[n]:
            return False
        for i in range(n - k + 1, n):
            if ranks[i - 1] + ranks[i] != dims[i]:
                return False
        return True


def syzygies(T: Module, length: int) -> List[Tuple[ExplicitProjective, ModuleMap, Module, ModuleMap]]:
    """Iterated covers: entry i is (P_i, cover_i: P_i -> K_i, K_{i+1}, incl).

    K_0 = T; cover_i is the projective cover of K_i; K_{i+1} = ker cover_i
    with its inclusion into P_i.  Cached and extended on demand.
    """
    chain = T._cache.setdefault("syzygy_chain", [])
    while len(chain) < length:
        K = T if not chain else chain[-1][2]
        P, cover = projective_cover(K)
        Knext, incl = kernel(cover)
        chain.append((P, cover, Knext, incl))
    return chain[:length]


def min_presentation(T: Module, n: int) -> Presentation:
    """Minimal (n+1)-projective presentation of T."""
    if n < 1:
        raise ValueError("presentations need n >= 1")
    chain = syzygies(T, n + 1)
    projs = [entry[0] for entry in chain]
    diffs: List[ModuleMap] = [None]  # type: ignore[list-item]
    for i in range(1, n + 1):
        P_i, cover_i, _, _ = chain[i]
        _, _, _, incl_prev = chain[i - 1]
        diffs.append(incl_prev.compose(cover_i))
    aug = chain[0][1]
    return Presentation(T, projs, diffs, aug)


def padded_presentation(T: Module, n: int) -> Presentation:
    """Minimal presentation with the top term enlarged by the largest basic
    projective with no homs into T (zero differential on the new summands).

    Hom(e_v A, T) is the vertex-v space of T, so the padding consists of one
    copy of each projective at a vertex where T vanishes.  The padded
    Hom-vanishing class is the minimal one intersected with the modules
    supported away from those vertices; this is the class the
    support-sensitive predicates (silting, strongly AIR) quantify over, and
    it matches the Q[n]-padding of the complex-side translation.
    """
    pres = min_presentation(T, n)
    alg = T.alg
    dead = [v for v in range(alg.quiver.num_vertices) if T.dims[v] == 0]
    if not dead:
        return pres
    old_top = pres.projs[n]
    new_top = ExplicitProjective(alg, tuple(old_top.summands) + tuple(dead))
    mats = []
    target = pres.projs[n - 1]
    old_d = pres.diffs[n]
    for v in range(alg.quiver.num_vertices):
        m = np.zeros((target.module.dims[v], new_top.module.dims[v]), dtype=np.int64)
        m[:, : old_top.module.dims[v]] = old_d.mats[v].a
        mats.append(Matrix(alg.p, m, _trusted=True))
    new_d = ModuleMap(new_top.module, target.module, mats, validate=False)
    projs = list(pres.projs[:-1]) + [new_top]
    diffs = list(pres.diffs[:-1]) + [new_d]
    return Presentation(T, projs, diffs, pres.aug)


def projective_dimension(T: Module, cap: int = DEFAULT_CAPS.max_resolution) -> Optional[int]:
    """Projective dimension, or None when it exceeds the cap."""
    if T.total_dim == 0:
        return 0
    chain = syzygies(T, 1)
    for i in range(cap + 1):
        chain = syzygies(T, i + 1)
        if chain[i][2].total_dim == 0:
            return i
    return None


def ext_dim(T: Module, M: Module, i: int) -> int:
    """dim Ext^i(T, M) computed from the minimal resolution of T."""
    if i < 1:
        raise ValueError("ext_dim is for i >= 1")
    if T.total_dim == 0 or M.total_dim == 0:
        return 0
    pres = min_presentation(T, i + 1)
    dims = pres.hom_dims(M)
    mats = pres.induced_matrices(M, upto=i + 1)
    rank_in = mats[i - 1].rank()  # D_i
    rank_out = mats[i].rank()  # D_{i+1}
    return dims[i] - rank_out - rank_in


def in_ker_ext_range(T: Module, M: Module, lo: int, hi: int) -> bool:
    """Ext^i(T, M) = 0 for all lo <= i <= hi."""
    return all(ext_dim(T, M, i) == 0 for i in range(lo, hi + 1))


# -- towers out of the regular module ------------------------------------


class ApproxTower:
    """A -> T_0 -> T_1 -> ... -> T_m built from minimal left approximations.

    maps[0]: source -> terms[0]; maps[i]: terms[i-1] -> terms[i].
    stage_approx[i] is the minimal left approximation C_i -> T_i whose
    injectivity/surjectivity encodes exactness of the tower.
    """

    def __init__(self, source: Module, terms: List[Module], maps: List[ModuleMap],
                 stage_approx: List[ModuleMap], final_coker: Module):
        self.source = source
        self.terms = terms
        self.maps = maps
        self.stage_approx = stage_approx
        self.final_coker = final_coker

    @property
    def length(self) -> int:
        return len(self.terms)

    def is_exact_terminating(self) -> bool:
        """Exact as A -> T_0 -> ... -> T_m -> 0 (interior spots + onto end)."""
        for g in self.stage_approx[1:]:
            if not g.is_injective():
                return False
        return self.final_coker.total_dim == 0

    def is_exact_interior(self) -> bool:
        """Exact at T_0 .. T_{m-2} only (no termination requirement)."""
        for g in self.stage_approx[1:]:
            if not g.is_injective():
                return False
        return True

    def induced_matrices(self, M: Module) -> Tuple[List[int], List[Matrix]]:
        """Hom dims [u_A, u_0..u_m] and matrices E_i of precomposition.

        E_0: Hom(T_0, M) -> Hom(source, M); E_i: Hom(T_i, M) -> Hom(T_{i-1}, M).
        """
        dims = [hom_dim(self.source, M)] + [hom_dim(t, M) for t in self.terms]
        mats = [induced_precompose_matrix(self.maps[0], M)]
        for i in range(1, len(self.terms)):
            mats.append(induced_precompose_matrix(self.maps[i], M))
        return dims, mats

    def hom_sequence_exact(self, M: Module, k: Optional[int] = None) -> bool:
        """Whether the induced Hom(-, M) sequence ending in Hom(source, M) -> 0
        is exact at the first k spots (k terms used; default all).

        Full version: exact at Hom(T_i, M) for 0 <= i <= m-1 and onto at
        Hom(source, M).  k-version uses terms T_0..T_{k-1} and checks spots
        Hom(T_i, M) for 0 <= i <= k-2 plus surjectivity.
        """
        m = len(self.terms)
        k = m if k is None else k
        if not 1 <= k <= m:
            raise ValueError(f"k must be in 1..{m}, got {k}")
        dims, mats = self.induced_matrices(M)
        ranks = [mt.rank() for mt in mats]
        if ranks[0] != dims[0]:
            return False
        for i in range(k - 1):
            # exactness at Hom(T_i, M): im E_{i+1} = ker E_i
            if ranks[i + 1] + ranks[i] != dims[i + 1]:
                return False
        return True


def induced_precompose_matrix(g: ModuleMap, M: Module) -> Matrix:
    """Matrix of Hom(g.target, M) -> Hom(g.source, M), phi -> phi ∘ g,
    in the hom_basis coordinate systems."""
    p = M.alg.p
    src_basis = hom_basis(g.source, M)
    tgt_basis = hom_basis(g.target, M)
    if not tgt_basis:
        return Matrix.zeros(p, len(src_basis), 0)
    if not src_basis:
        return Matrix.zeros(p, 0, len(tgt_basis))
    flat = Matrix(p, np.stack([f.flatten() for f in src_basis], axis=1))
    cols = Matrix(p, np.stack([phi.compose(g).flatten() for phi in tgt_basis], axis=1))
    sol = flat.solve_matrix(cols)
    assert sol is not None, "composite escaped the hom space"
    return sol


def left_approx_tower(T: Module, length: int, source: Optional[Module] = None) -> ApproxTower:
    """Tower of minimal left add(T)-approximations of successive cokernels,
    starting from the regular module (or a given source)."""
    alg = T.alg
    if source is None:
        source = regular_module(alg).module
    terms: List[Module] = []
    maps: List[ModuleMap] = []
    stage_approx: List[ModuleMap] = []
    C = source
    proj_prev: Optional[ModuleMap] = None
    for _ in range(length):
        g = minimal_left_approx(C, T)
        stage_approx.append(g)
        terms.append(g.target)
        maps.append(g if proj_prev is None else g.compose(proj_prev))
        C, proj_prev = cokernel(g)
    return ApproxTower(source, terms, maps, stage_approx, C)


def build_sigma_tower(T: Module, n: int, source: Optional[Module] = None) -> Optional[ApproxTower]:
    """The minimal candidate for an exact sequence A -> T_0 -> ... -> T_n -> 0
    with terms in add(T) whose induced Hom(-, T) sequence is exact.

    Returns the tower when it qualifies, else None.  If any qualifying tower
    exists, each stage factors through the minimal left approximation, so the
    minimal tower qualifies too.
    """
    tower = left_approx_tower(T, n + 1, source=source)
    if not tower.is_exact_terminating():
        return None
    if T.total_dim == 0:
        # all terms are zero; the induced sequence is trivially exact
        return tower
    if not tower.hom_sequence_exact(T):
        return None
    return tower


def ann_faithful_dim_at_least(T: Module, n: int, source: Optional[Module] = None) -> bool:
    """Whether there is an exact A -> T_1 -> ... -> T_n with terms in add(T)
    whose induced sequence Hom(T_n, T) -> ... -> Hom(A, T) -> 0 is exact.

    No termination in zero is required.  Decided on the minimal tower.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tower = left_approx_tower(T, n, source=source)
    if not tower.is_exact_interior():
        return False
    if T.total_dim == 0:
        return True
    return tower.hom_sequence_exact(T)


# -- approximate presentations (Appres) ----------------------------------


def approx_presentation_tower(T: Module, M: Module, k: int) -> Tuple[bool, List[ModuleMap]]:
    """Tower of minimal right approximations: surjectivity at each of the k
    stages decides membership in Appres^k(T).

    Minimal right approximations are Hom(T,-)-epic by construction, and any
    Hom(T,-)-epic epimorphism onto a stage factors through the minimal one,
    so the minimal tower is decisive.
    """
    stages = []
    current = M
    for _ in range(k):
        f = minimal_right_approx(T, current)
        stages.append(f)
        if not f.is_surjective():
            return False, stages
        current, _ = kernel(f)
    return True, stages


def appres_membership(T: Module, M: Module, k: int) -> bool:
    if M.total_dim == 0:
        return True
    ok, _ = approx_presentation_tower(T, M, k)
    return ok


# -- exact image presentations (Pres) -------------------------------------


def _subspace_count(d: int, p: int) -> int:
    """Total number of subspaces of F_p^d (sum of Gaussian binomials)."""
    total = 0
    for r in range(d + 1):
        num = 1
        for i in range(r):
            num = num * (p ** (d - i) - 1) // (p ** (i + 1) - 1)
        total += num
    return total


def _iter_subspaces(d: int, p: int):
    """All nonzero subspaces of F_p^d, one RREF row basis each."""
    for r in range(1, d + 1):
        for pivots in itertools.combinations(range(d), r):
            free_positions = [
                (row_i, col)
                for row_i, pc in enumerate(pivots)
                for col in range(pc + 1, d)
                if col not in pivots
            ]
            for values in itertools.product(range(p), repeat=len(free_positions)):
                rows = np.zeros((r, d), dtype=np.int64)
                for row_i, pc in enumerate(pivots):
                    rows[row_i, pc] = 1
                for (row_i, col), val in zip(free_positions, values):
                    rows[row_i, col] = val
                yield rows


def pres_membership(T: Module, M: Module, k: int, caps: SearchCaps = DEFAULT_CAPS) -> Tri:
    """Membership of M in Pres^k(T), the modules with an exact k-step
    add(T)-presentation.

    Exact for k = 1 (this is Gen) and for k = 2 (complete enumeration of
    kernel classes: every surjection from add(T) reduces, up to automorphism,
    to one with linearly independent components plus split T-padding, and
    Gen membership of the kernel is summand-wise).  For k >= 3 a failed
    search returns UNKNOWN unless membership already fails at a lower level.
    """
    return _pres_membership(T, M, k, caps, _depth=0)


def _pres_membership(T: Module, M: Module, k: int, caps: SearchCaps, _depth: int) -> Tri:
    if k < 1:
        raise ValueError("k must be >= 1")
    if M.total_dim == 0:
        return Tri.YES
    if T.total_dim == 0:
        return Tri.NO
    memo: Dict = M._cache.setdefault("pres_memo", {})
    key = (id(T), k, caps.subspace_total, caps.pres_pad)
    cached = memo.get(key)
    if cached is not None and cached[0] is T:
        return cached[1]
    result = _pres_membership_uncached(T, M, k, caps, _depth)
    memo[key] = (T, result)
    return result


def _pres_membership_uncached(T: Module, M: Module, k: int, caps: SearchCaps, _depth: int) -> Tri:
    if not in_gen(T, M):
        return Tri.NO
    if k == 1:
        return Tri.YES
    if in_add(M, T):
        return Tri.YES
    if appres_membership(T, M, k):
        return Tri.YES
    # lower level already failing is decisive: Pres^k ⊆ Pres^{k-1}
    lower = _pres_membership(T, M, k - 1, caps, _depth + 1)
    if lower is Tri.NO:
        return Tri.NO
    homs = hom_basis(T, M)
    d = len(homs)
    if _subspace_count(d, T.alg.p) > caps.subspace_total:
        return Tri.UNKNOWN
    saw_unknown = False
    complete = True
    for rows in _iter_subspaces(d, T.alg.p):
        r = rows.shape[0]
        source, _, _ = module_power(T, r)
        mats = []
        for v in range(T.alg.quiver.num_vertices):
            blocks = []
            for row in rows:
                acc = Matrix.zeros(T.alg.p, M.dims[v], T.dims[v])
                for j in np.nonzero(row)[0]:
                    acc = acc + homs[int(j)].mats[v].scale(int(row[j]))
                blocks.append(acc)
            mats.append(Matrix.hstack(blocks) if blocks else Matrix.zeros(T.alg.p, M.dims[v], 0))
        f = ModuleMap(source, M, mats, validate=False)
        if not f.is_surjective():
            continue
        K, _ = kernel(f)
        if k - 1 == 1:
            # Gen is summand-wise, so padding by copies of T changes nothing
            if in_gen(T, K):
                return Tri.YES
            continue
        for pad in range(caps.pres_pad + 1):
            Kp = K if pad == 0 else direct_sum([K] + [T] * pad)[0]
            sub = _pres_membership(T, Kp, k - 1, caps, _depth + 1)
            if sub is Tri.YES:
                return Tri.YES
            if sub is Tri.UNKNOWN:
                saw_unknown = True
        complete = False  # padded kernels beyond the cap were not tried
    if k == 2 and not saw_unknown:
        return Tri.NO
    if complete and not saw_unknown:
        return Tri.NO
    return Tri.UNKNOWN


# -- short exact sequences and extensions ---------------------------------


def extension_from_cocycle(L: Module, N: Module, cocycle: ModuleMap) -> Tuple[Module, ModuleMap, ModuleMap]:
    """Middle term of the extension of N by L classified by a map
    (first syzygy of N) -> L.  Returns (E, L -> E, E -> N), exact."""
    chain = syzygies(N, 1)
    P0, cover, K, incl = chain[0]
    if cocycle.source is not K or cocycle.target is not L:
        raise ValueError("cocycle must map the first syzygy of N to L")
    total, injections, _ = direct_sum([P0.module, L])
    h_mats = [
        Matrix.vstack([incl.mats[v], cocycle.mats[v].scale(-1)])
        for v in range(L.alg.quiver.num_vertices)
    ]
    h = ModuleMap(K, total, h_mats, validate=False)
    E, proj = cokernel(h)
    incl_L = proj.compose(injections[1])
    # E -> N induced by (cover, 0) on the direct sum
    p = L.alg.p
    to_n = []
    for v in range(L.alg.quiver.num_vertices):
        block = Matrix.hstack([cover.mats[v], Matrix.zeros(p, N.dims[v], L.dims[v])])
        sec = proj.mats[v].solve_matrix(Matrix.identity(p, E.dims[v]))
        assert sec is not None
        to_n.append(block @ sec)
    proj_N = ModuleMap(E, N, to_n, validate=False)
    return E, incl_L, proj_N


def random_extension(L: Module, N: Module, rng: random.Random) -> Tuple[Module, ModuleMap, ModuleMap]:
    """Extension of N by L from a uniformly random cocycle."""
    chain = syzygies(N, 1)
    K = chain[0][2]
    basis = hom_basis(K, L)
    p = L.alg.p
    if not basis:
        cocycle = zero_map(K, L)
    else:
        coeffs = [rng.randrange(p) for _ in basis]
        mats = []
        for v in range(L.alg.quiver.num_vertices):
            acc = Matrix.zeros(p, L.dims[v], K.dims[v])
            for c, f in zip(coeffs, basis):
                if c:
                    acc = acc + f.mats[v].scale(c)
            mats.append(acc)
        cocycle = ModuleMap(K, L, mats, validate=False)
    return extension_from_cocycle(L, N, cocycle)


def is_short_exact(incl: ModuleMap, proj: ModuleMap) -> bool:
    """0 -> L -> E -> N -> 0 exactness of a composable pair."""
    if not incl.is_injective() or not proj.is_surjective():
        return False
    if not proj.compose(incl).is_zero():
        return False
    E = incl.target
    for v in range(E.alg.quiver.num_vertices):
        if incl.mats[v].rank() + proj.mats[v].rank() != E.dims[v]:
            return False
    return True


def is_hom_epic(T: Module, f: ModuleMap) -> bool:
    """Whether Hom(T, f) is surjective."""
    targets = hom_basis(T, f.target)
    if not targets:
        return True
    p = T.alg.p
    sources = hom_basis(T, f.source)
    if not sources:
        return False
    flat_t = Matrix(p, np.stack([g.flatten() for g in targets], axis=1))
    comps = Matrix(p, np.stack([f.compose(g).flatten() for g in sources], axis=1))
    coords = flat_t.solve_matrix(comps)
    assert coords is not None
    return coords.rank() == len(targets)
