"""Decision procedures for the tilting-type predicates.

Exactly decidable here: pretilting, n-tilting, n-pre-AIR, n-AIR (both its
conditions reduce to finite linear algebra on minimal data).  Universally
quantified predicates (n-silting, (strongly) n-quasi-tilting, strongly
n-AIR) are decided against a bounded census of modules and reported as
three-valued verdicts carrying the bound; a counterexample inside the bound
is a definitive no.

The module also provides annihilators, quotient algebras, the relative
machinery for checking n-tilting over A/ann(T), and the two translations
between generalized two-term silting complexes and modules (H^0 in one
direction, padded truncated presentation in the other).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import Algebra, path_target
from .linalg import Matrix
from .modules import (
    Module,
    ModuleMap,
    cokernel,
    direct_sum,
    hom_dim,
    in_gen,
    kernel,
    projective_module,
    submodule_from_bases,
    top_quotient,
    zero_module,
)
from .homology import (
    DEFAULT_CAPS,
    ApproxTower,
    SearchCaps,
    ann_faithful_dim_at_least,
    build_sigma_tower,
    ext_dim,
    in_ker_ext_range,
    induced_precompose_matrix,
    left_approx_tower,
    min_presentation,
    padded_presentation,
    pres_membership,
    projective_dimension,
)
from .complexes import (
    ProjComplex,
    complex_direct_sum,
    generalized_two_term_check,
    generation_search,
    homology,
    presilting_check,
    rank_condition_check,
    stalk_complex,
    truncated_complex,
)
from .tri import Tri


class InternalInconsistencyError(RuntimeError):
    """Two provably equivalent decision routes disagreed: an implementation bug."""


# -- exact predicates -----------------------------------------------------


def is_pretilting(T: Module, n: int) -> bool:
    """Projective dimension <= n and no self-extensions up to that dimension."""
    pd = projective_dimension(T, cap=n)
    if pd is None:
        return False
    return all(ext_dim(T, T, i) == 0 for i in range(1, pd + 1))


def is_n_tilting(T: Module, n: int) -> bool:
    """Pretilting plus an exact coresolution of A by add(T) of length n."""
    if not is_pretilting(T, n):
        return False
    tower = build_sigma_tower(T, n)
    if tower is None:
        return False
    return tower.stage_approx[0].is_injective()


def is_n_pre_air(T: Module, n: int) -> bool:
    """The truncated minimal presentation is a presilting complex."""
    if T.total_dim == 0:
        return True
    return presilting_check(truncated_complex(min_presentation(T, n)))


def in_presentation_class(T: Module, n: int) -> bool:
    """T lies in the Hom-exactness class of its own minimal presentation."""
    if T.total_dim == 0:
        return True
    return min_presentation(T, n).hom_sequence_exact(T)


def is_n_air(T: Module, n: int) -> Tuple[bool, Optional[ApproxTower]]:
    """Both defining conditions, decided exactly on minimal data.

    (i) the induced Hom(-, T) sequence of the minimal (n+1)-projective
    presentation is exact; (ii) there is an exact A -> T_0 -> ... -> T_n -> 0
    with terms in add(T) inducing an exact Hom(-, T) sequence.
    """
    if not in_presentation_class(T, n):
        return False, None
    tower = build_sigma_tower(T, n)
    return (tower is not None), tower


# -- census-bounded predicates --------------------------------------------


@dataclass
class Verdict:
    value: Tri
    witness: Optional[Dict] = None

    def as_json(self):
        out = {"value": self.value.value}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _module_descriptor(M: Module) -> Dict:
    return {
        "dims": list(M.dims),
        "mats": {
            M.alg.quiver.arrows[i].name: M.mats[i].tolist()
            for i in range(len(M.mats))
        },
    }


def is_n_silting(T: Module, n: int, universe: Sequence[Module]) -> Verdict:
    """T in its own (padded) presentation class and that class inside Gen(T),
    the inclusion checked over the universe.

    The padded presentation carries the support information; with the bare
    minimal one, modules vanishing on part of the quiver would never
    qualify (their class retains modules supported on dead vertices).
    """
    pres = padded_presentation(T, n)
    if not pres.hom_sequence_exact(T):
        return Verdict(Tri.NO, {"reason": "T not in its presentation class"})
    for M in universe:
        if pres.hom_sequence_exact(M) and not in_gen(T, M):
            return Verdict(Tri.NO, {"outside_gen": _module_descriptor(M)})
    return Verdict(Tri.YES)


def is_n_quasi_tilting(T: Module, n: int, universe: Sequence[Module],
                       caps: SearchCaps = DEFAULT_CAPS) -> Verdict:
    """Pres^n = Pres^{n+1} inside KerExt^{1..n}(T, -), over the universe."""
    saw_unknown = False
    for M in universe:
        a = pres_membership(T, M, n, caps)
        if a is Tri.UNKNOWN:
            saw_unknown = True
            continue
        if a is Tri.NO:
            continue
        b = pres_membership(T, M, n + 1, caps)
        if b is Tri.NO:
            return Verdict(Tri.NO, {"pres_gap": _module_descriptor(M), "k": n})
        if b is Tri.UNKNOWN:
            saw_unknown = True
        if not in_ker_ext_range(T, M, 1, n):
            return Verdict(Tri.NO, {"ext_witness": _module_descriptor(M)})
    return Verdict(Tri.UNKNOWN if saw_unknown else Tri.YES)


def is_strongly_n_quasi_tilting(T: Module, n: int, universe: Sequence[Module],
                                caps: SearchCaps = DEFAULT_CAPS) -> Verdict:
    """n-quasi-tilting plus the graded vanishing: Pres^k inside
    KerExt^{n-k+1..n}(T, -) for every 1 <= k <= n."""
    base = is_n_quasi_tilting(T, n, universe, caps)
    if base.value is Tri.NO:
        return base
    saw_unknown = base.value is Tri.UNKNOWN
    for k in range(1, n + 1):
        for M in universe:
            a = pres_membership(T, M, k, caps)
            if a is Tri.UNKNOWN:
                saw_unknown = True
                continue
            if a is Tri.NO:
                continue
            for i in range(n - k + 1, n + 1):
                if ext_dim(T, M, i) != 0:
                    return Verdict(
                        Tri.NO,
                        {"graded_witness": _module_descriptor(M), "k": k, "ext_degree": i},
                    )
    return Verdict(Tri.UNKNOWN if saw_unknown else Tri.YES)


def is_strongly_n_air(T: Module, n: int, universe: Sequence[Module],
                      caps: SearchCaps = DEFAULT_CAPS,
                      crosscheck: bool = True) -> Verdict:
    """n-AIR with coinciding vanishing classes, checked over the universe.

    Cross-validated against the equivalent route (n-silting plus
    ann-faithful dimension at least n); a disagreement on decided values is
    an internal error.
    """
    air, tower = is_n_air(T, n)
    if not air:
        verdict = Verdict(Tri.NO, {"reason": "not n-AIR"})
        if crosscheck:
            _sair_crosscheck(T, n, universe, verdict, caps)
        return verdict
    pres = padded_presentation(T, n)
    verdict = None
    for M in universe:
        in_t = pres.hom_sequence_exact(M)
        in_a = _in_tower_class(tower, T, M)
        if in_t != in_a:
            verdict = Verdict(
                Tri.NO,
                {"class_mismatch": _module_descriptor(M), "in_presentation_class": in_t},
            )
            break
    if verdict is None:
        verdict = Verdict(Tri.YES)
    if crosscheck:
        _sair_crosscheck(T, n, universe, verdict, caps)
    return verdict


def _in_tower_class(tower: ApproxTower, T: Module, M: Module) -> bool:
    return tower.hom_sequence_exact(M)


def _sair_crosscheck(T: Module, n: int, universe: Sequence[Module],
                     verdict: Verdict, caps: SearchCaps) -> None:
    silting = is_n_silting(T, n, universe)
    if silting.value is Tri.UNKNOWN:
        return
    other = Tri.of(silting.value is Tri.YES and ann_faithful_dim_at_least(T, n))
    if verdict.value.decided and verdict.value is not other:
        raise InternalInconsistencyError(
            f"strongly-n-AIR routes disagree: class-equality route says "
            f"{verdict.value.value}, silting+ann-faithful route says {other.value}"
        )


# -- annihilators and quotient algebras ------------------------------------


@dataclass
class Ideal:
    """A two-sided ideal, with a sector-homogeneous basis of elements."""

    alg: Algebra
    basis: List[np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def span_matrix(self) -> Matrix:
        alg = self.alg
        if not self.basis:
            return Matrix.zeros(alg.p, alg.dim, 0)
        return Matrix(alg.p, np.stack(self.basis, axis=1))

    def contains(self, x: np.ndarray) -> bool:
        if not x.any():
            return True
        return self.span_matrix().solve(x) is not None

    def reduce(self, x: np.ndarray) -> np.ndarray:
        """Canonical coset representative of x modulo the ideal."""
        out = np.array(x, dtype=np.int64) % self.alg.p
        if not self.basis:
            return out
        red, piv = Matrix(self.alg.p, np.stack(self.basis, axis=0)).rref()
        for r, pc in enumerate(piv):
            c = int(out[pc])
            if c:
                out = (out - c * red.a[r]) % self.alg.p
        return out

    def is_two_sided(self) -> bool:
        alg = self.alg
        for x in self.basis:
            for b in range(alg.dim):
                eb = alg.basis_element(b)
                if not self.contains(alg.multiply(eb, x)):
                    return False
                if not self.contains(alg.multiply(x, eb)):
                    return False
        return True


def annihilator(T: Module) -> Ideal:
    """ann(T): all algebra elements acting as zero on T."""
    alg = T.alg
    p = alg.p
    nv = alg.quiver.num_vertices
    basis_vecs: List[np.ndarray] = []
    for v in range(nv):
        for w in range(nv):
            sector = alg.sector(v, w)
            if not sector:
                continue
            ncols = len(sector)
            rows = T.dims[w] * T.dims[v]
            if rows == 0:
                # action is trivially zero: the whole sector annihilates
                for b in sector:
                    basis_vecs.append(alg.basis_element(b))
                continue
            m = np.zeros((rows, ncols), dtype=np.int64)
            for k, b in enumerate(sector):
                m[:, k] = T.path_action(alg.basis[b]).a.reshape(-1)
            null = Matrix(p, m).nullspace()
            for c in range(null.cols):
                vec = alg.zero_element()
                for k, b in enumerate(sector):
                    vec[b] = null.a[k, c]
                basis_vecs.append(vec)
    return Ideal(alg, basis_vecs)


def is_faithful(T: Module) -> bool:
    return annihilator(T).dim == 0


class QuotientContext:
    """mod(A/I) viewed inside mod A: quotient projectives, covers,
    resolutions and coresolutions relative to the quotient."""

    def __init__(self, alg: Algebra, ideal: Ideal, validate: bool = True):
        if validate and not ideal.is_two_sided():
            raise ValueError("the given subspace is not a two-sided ideal")
        self.alg = alg
        self.ideal = ideal
        self.vertices = [
            v for v in range(alg.quiver.num_vertices) if not ideal.contains(alg.idempotent(v))
        ]
        self._qproj: Dict[int, Tuple[Module, ModuleMap]] = {}

    @property
    def dim(self) -> int:
        return self.alg.dim - self.ideal.dim

    def kills(self, M: Module) -> bool:
        """Whether M is a module over the quotient (the ideal acts as zero)."""
        alg = self.alg
        for x in self.ideal.basis:
            sec = alg.element_sector(x)
            if sec is None:
                continue
            v, w = sec
            if M.dims[v] and M.dims[w] and not M.element_action(x, v, w).is_zero():
                return False
        return True

    def projective(self, v: int) -> Tuple[Module, ModuleMap]:
        """e_v(A/I) as an A-module: quotient of P(v) by e_v·I, with the
        projection from P(v)."""
        cached = self._qproj.get(v)
        if cached is not None:
            return cached
        alg = self.alg
        p = alg.p
        P = projective_module(alg, v)
        nv = alg.quiver.num_vertices
        sub_bases = []
        for w in range(nv):
            sector = alg.sector(v, w)
            pos = {b: k for k, b in enumerate(sector)}
            cols = []
            for x in self.ideal.basis:
                sec = alg.element_sector(x)
                if sec != (v, w):
                    continue
                col = np.zeros(len(sector), dtype=np.int64)
                for b in np.nonzero(x)[0]:
                    col[pos[int(b)]] = x[b]
                cols.append(col)
            if cols:
                sub_bases.append(Matrix(p, np.stack(cols, axis=1)))
            else:
                sub_bases.append(Matrix.zeros(p, len(sector), 0))
        _, incl = submodule_from_bases(P.module, sub_bases)
        Q, proj = cokernel(incl)
        result = (Q, proj.compose(_identity_as_map(P.module)))
        self._qproj[v] = result
        return result

    def regular(self) -> Module:
        """A/I as a right module over itself, seen in mod A."""
        parts = [self.projective(v)[0] for v in self.vertices]
        if not parts:
            return zero_module(self.alg)
        return direct_sum(parts)[0]

    def cover(self, M: Module) -> Tuple[Module, ModuleMap]:
        """Projective cover of M in mod(A/I)."""
        alg = self.alg
        p = alg.p
        if M.total_dim == 0:
            z = zero_module(alg)
            return z, ModuleMap(z, M, [Matrix.zeros(p, 0, 0) for _ in M.dims], validate=False)
        if not self.kills(M):
            raise ValueError("module is not killed by the ideal")
        top, proj_top = top_quotient(M)
        summand_data: List[Tuple[int, np.ndarray]] = []
        from .modules import radical_submodule  # local import to avoid cycle noise

        rad, rad_incl = radical_submodule(M)
        for v in range(alg.quiver.num_vertices):
            rad_cols = rad_incl.mats[v]
            full = Matrix.hstack([rad_cols, Matrix.identity(p, M.dims[v])])
            pivots = full.column_space_pivots()
            for j in pivots:
                if j >= rad_cols.cols:
                    e = np.zeros(M.dims[v], dtype=np.int64)
                    e[j - rad_cols.cols] = 1
                    summand_data.append((v, e))
        pieces = []
        maps = []
        for v, lift in summand_data:
            Q, qproj = self.projective(v)
            P = projective_module(alg, v)
            raw = P.hom_coords_to_map(M, lift)
            # factor through the quotient projection: Q -> M
            mats = []
            for w in range(alg.quiver.num_vertices):
                sec = qproj.mats[w].solve_matrix(Matrix.identity(p, Q.dims[w]))
                assert sec is not None
                mats.append(raw.mats[w] @ sec)
            pieces.append(Q)
            maps.append(ModuleMap(Q, M, mats, validate=False))
        total, injections, projections = direct_sum(pieces)
        cover_mats = []
        for w in range(alg.quiver.num_vertices):
            cols = [f.mats[w] for f in maps]
            cover_mats.append(Matrix.hstack(cols))
        cover = ModuleMap(total, M, cover_mats, validate=False)
        return total, cover

    def syzygies(self, T: Module, length: int):
        chain = T._cache.setdefault(("q_syzygy", id(self)), [])
        while len(chain) < length:
            K = T if not chain else chain[-1][2]
            P, cover = self.cover(K)
            Knext, incl = kernel(cover)
            chain.append((P, cover, Knext, incl))
        return chain[:length]

    def projective_dimension(self, T: Module, cap: int) -> Optional[int]:
        if T.total_dim == 0:
            return 0
        for i in range(cap + 1):
            chain = self.syzygies(T, i + 1)
            if chain[i][2].total_dim == 0:
                return i
        return None

    def ext_dim(self, T: Module, M: Module, i: int) -> int:
        """dim Ext^i over the quotient algebra (full subcategory hom spaces)."""
        chain = self.syzygies(T, i + 2)
        # differentials d_j : P_j -> P_{j-1}
        def diff(j: int) -> ModuleMap:
            P_j, cover_j, _, _ = chain[j]
            _, _, _, incl_prev = chain[j - 1]
            return incl_prev.compose(cover_j)

        u_i = hom_dim(chain[i][0], M)
        e_in = induced_precompose_matrix(diff(i), M)
        e_out = induced_precompose_matrix(diff(i + 1), M)
        return u_i - e_in.rank() - e_out.rank()

    def is_n_tilting_here(self, T: Module, n: int) -> bool:
        """Classical n-tilting test over the quotient algebra."""
        if not self.kills(T):
            return False
        pd = self.projective_dimension(T, cap=n)
        if pd is None:
            return False
        if any(self.ext_dim(T, T, i) != 0 for i in range(1, pd + 1)):
            return False
        source = self.regular()
        tower = left_approx_tower(T, n + 1, source=source)
        if not tower.is_exact_terminating():
            return False
        return tower.stage_approx[0].is_injective()


def _identity_as_map(M: Module) -> ModuleMap:
    from .modules import identity_map

    return identity_map(M)


def quotient_algebra(alg: Algebra, ideal: Ideal):
    """Present A/I as a bound quiver algebra.

    Returns (algebra, vertex_map) where vertex_map sends surviving old
    vertex indices to new ones.  Raises ValueError when the input is not a
    two-sided ideal.
    """
    from .algebra import Quiver, build_algebra

    if not ideal.is_two_sided():
        raise ValueError("quotient by a subspace that is not a two-sided ideal")
    p = alg.p
    ctx = QuotientContext(alg, ideal, validate=False)
    survivors = ctx.vertices
    qdim = alg.dim - ideal.dim

    # canonical coset coordinates: reduce mod the ideal row space
    def croset(x: np.ndarray) -> np.ndarray:
        return ideal.reduce(x)

    # arrows: lift a basis of rad/(rad^2 + I) per sector
    rad2_plus = []
    for i in alg.radical_indices:
        if len(alg.basis[i].arrows) >= 2:
            rad2_plus.append(alg.basis_element(i))
    arrow_lifts: List[Tuple[int, int, np.ndarray]] = []
    for v in survivors:
        for w in survivors:
            sector = [i for i in alg.sector(v, w) if alg.basis[i].arrows]
            if not sector:
                continue
            sub_cols = [croset(x) for x in rad2_plus if alg.element_sector(x) == (v, w)]
            sub_cols += [
                croset(x) for x in ideal.basis if alg.element_sector(x) == (v, w)
            ]
            cand_cols = [croset(alg.basis_element(i)) for i in sector]
            base = Matrix(p, np.stack(sub_cols, axis=1)) if sub_cols else Matrix.zeros(p, alg.dim, 0)
            for k, col in enumerate(cand_cols):
                trial = Matrix.hstack([base, Matrix(p, col.reshape(-1, 1))])
                if trial.rank() > base.rank():
                    base = trial
                    arrow_lifts.append((v, w, alg.basis_element(sector[k])))

    vertex_map = {v: k for k, v in enumerate(survivors)}
    vnames = [alg.quiver.vertices[v] for v in survivors]
    anames = []
    for idx, (v, w, lift) in enumerate(arrow_lifts):
        anames.append((f"q{idx}", alg.quiver.vertices[v], alg.quiver.vertices[w]))
    qquiver = Quiver(vnames, anames)

    # evaluate quiver paths into the quotient and collect kernel relations
    from .algebra import Path as QPath

    trivial_evals = {v: croset(alg.idempotent(v)) for v in survivors}
    lift_by_arrow = [lift for (_, _, lift) in arrow_lifts]

    paths: List[Tuple[QPath, np.ndarray]] = []
    for v in survivors:
        paths.append((QPath(vertex_map[v], ()), trivial_evals[v]))
    level = list(paths)
    relations = []
    span = Matrix(p, np.stack([e for _, e in paths], axis=1))
    max_level = alg.reduction_level + 2
    for d in range(1, max_level + 1):
        new_level = []
        for qp, val in level:
            tgt = path_target(qquiver, qp)
            for a_idx in qquiver.arrows_from[tgt]:
                lifted = alg.multiply(val, lift_by_arrow[a_idx])
                new_level.append((QPath(qp.source, qp.arrows + (a_idx,)), croset(lifted)))
        if not new_level:
            break
        all_reducible = True
        for qp, val in new_level:
            trial = Matrix.hstack([span, Matrix(p, val.reshape(-1, 1))])
            if trial.rank() > span.rank():
                span = trial
                all_reducible = False
                paths.append((qp, val))
            else:
                if len(qp.arrows) >= 2:
                    # express val over the independent path evaluations
                    cols = Matrix(p, np.stack([e for _, e in paths], axis=1))
                    sol = cols.solve(val)
                    assert sol is not None
                    rel = [(1, qp)]
                    for k, c in enumerate(sol):
                        if c and len(paths[k][0].arrows) >= 2:
                            rel.append((-int(c), paths[k][0]))
                        elif c:
                            raise AssertionError("kernel vector with short support")
                    relations.append(rel)
        level = new_level
        if all_reducible and d >= 2:
            break
    qalg = build_algebra(qquiver, relations, p=p, max_len=max_level + 2)
    if qalg.dim != qdim:
        raise InternalInconsistencyError(
            f"quotient presentation has dimension {qalg.dim}, expected {qdim}"
        )
    return qalg, vertex_map


# -- complex/module translations -------------------------------------------


class PhiRefusal(ValueError):
    """Raised when the complex-to-module map is applied outside its domain."""

    def __init__(self, message: str, partial: Dict):
        super().__init__(message)
        self.partial = partial


def phi_map(C: ProjComplex, n: int, assume_generation: bool = False,
            caps: SearchCaps = DEFAULT_CAPS,
            universe: Optional[Sequence[Module]] = None) -> Tuple[Module, Dict]:
    """H^0 of a generalized two-term silting complex in degrees -n..0.

    Refuses complexes that fail the window/interior-homology or presilting
    gates, or whose silting status cannot be certified (rank condition plus
    a generation certificate) unless ``assume_generation`` is set.  When a
    universe is supplied, the report carries the strongly-AIR verdict of the
    output module.
    """
    partial: Dict = {}
    if not C.is_zero() and (C.min_degree < -n or C.max_degree > 0):
        raise PhiRefusal(f"complex not supported in degrees -{n}..0", partial)
    two_term = generalized_two_term_check(C, n)
    partial["generalized_two_term"] = two_term
    if not two_term:
        raise PhiRefusal("interior homology does not vanish", partial)
    presilt = presilting_check(C)
    partial["presilting"] = presilt
    if not presilt:
        raise PhiRefusal("complex is not presilting", partial)
    rank_ok = rank_condition_check(C)
    partial["rank_condition"] = rank_ok
    if not assume_generation and not rank_ok:
        # silting complexes always satisfy the rank condition, so the
        # expensive generation search is pointless here
        partial["generation"] = "not evaluated"
        raise PhiRefusal("rank condition fails: not a silting complex", partial)
    gen = generation_search(C, depth=caps.cone_depth, width=caps.cone_width)
    partial["generation"] = gen.status.value
    if not assume_generation and gen.status is not Tri.YES:
        raise PhiRefusal("no generation certificate within caps", partial)
    partial["generation_certificate"] = gen.certificate
    T = homology(C, 0)
    if universe is not None:
        partial["strongly_n_air"] = is_strongly_n_air(T, n, universe, caps).value.value
    return T, partial


def psi_map(T: Module, n: int) -> Tuple[ProjComplex, Dict]:
    """Padded truncated presentation of an n-AIR module: the truncated
    minimal presentation plus Q[n], Q the largest projective with
    Hom(Q, T) = 0.  Reports presilting, rank condition and generation
    status separately; never asserts siltingness without a certificate."""
    air, _ = is_n_air(T, n)
    if not air:
        raise ValueError("input module is not n-AIR at this level")
    alg = T.alg
    q_vertices = [v for v in range(alg.quiver.num_vertices) if T.dims[v] == 0]
    if T.total_dim == 0:
        out = stalk_complex(alg, list(range(alg.quiver.num_vertices)), degree=-n)
    else:
        out = truncated_complex(min_presentation(T, n))
        if q_vertices:
            out = complex_direct_sum(out, stalk_complex(alg, q_vertices, degree=-n))
    gen = generation_search(out)
    report = {
        "padding_vertices": [alg.quiver.vertices[v] for v in q_vertices],
        "presilting": presilting_check(out),
        "rank_condition": rank_condition_check(out),
        "generation": gen.status.value,
        "generation_certificate": gen.certificate,
    }
    return out, report


# -- theorem cross-validation ----------------------------------------------


def crosscheck_equivalences(T: Module, n: int, universe: Sequence[Module],
                            caps: SearchCaps = DEFAULT_CAPS) -> Dict:
    """Evaluate the provably equivalent routes to n-AIR and strongly n-AIR
    and fail hard on any disagreement not blamed on an UNKNOWN.

    Routes for n-AIR: the definition, versus strongly-n-quasi-tilting plus
    ann-faithful dimension at least n.  Routes for strongly n-AIR: class
    equality, class inclusion, and n-silting plus ann-faithful dimension.
    """
    report: Dict = {}
    air, tower = is_n_air(T, n)
    report["n_air"] = Tri.of(air)
    sq = is_strongly_n_quasi_tilting(T, n, universe, caps)
    af = ann_faithful_dim_at_least(T, n)
    report["strongly_n_quasi_tilting"] = sq.value
    report["ann_faith_dim_ge_n"] = Tri.of(af)
    if sq.value.decided:
        route2 = Tri.of(sq.value is Tri.YES and af)
        if route2 is not Tri.of(air):
            raise InternalInconsistencyError(
                f"n-AIR routes disagree: definition says {Tri.of(air).value}, "
                f"strongly-quasi-tilting + ann-faithful says {route2.value}"
            )

    sair = is_strongly_n_air(T, n, universe, caps, crosscheck=False)
    report["strongly_n_air"] = sair.value
    silting = is_n_silting(T, n, universe)
    report["n_silting"] = silting.value

    # route: n-AIR plus one-sided class inclusion over the universe
    if air:
        pres = padded_presentation(T, n)
        incl = all(
            _in_tower_class(tower, T, M)
            for M in universe
            if pres.hom_sequence_exact(M)
        )
        route_incl = Tri.of(incl)
    else:
        route_incl = Tri.NO
    if sair.value.decided and route_incl is not sair.value:
        raise InternalInconsistencyError(
            "strongly-n-AIR routes disagree: class equality vs class inclusion"
        )
    if silting.value.decided:
        route3 = Tri.of(silting.value is Tri.YES and af)
        if sair.value.decided and route3 is not sair.value:
            raise InternalInconsistencyError(
                f"strongly-n-AIR routes disagree: definition says {sair.value.value}, "
                f"n-silting + ann-faithful says {route3.value}"
            )
    return report


# -- full classification -----------------------------------------------------


@dataclass
class ClassReport:
    """Complete verdict sheet for one module at one level."""

    n: int
    p: int
    universe_bound: Optional[Tuple[int, ...]]
    universe_size: int
    caps: SearchCaps
    seed: Optional[int]
    verdicts: Dict[str, Verdict] = field(default_factory=dict)
    consistency: Dict = field(default_factory=dict)

    def as_json(self) -> Dict:
        return {
            "schema": 1,
            "n": self.n,
            "field": self.p,
            "universe_bound": list(self.universe_bound) if self.universe_bound else None,
            "universe_size": self.universe_size,
            "caps": {
                "subspace_total": self.caps.subspace_total,
                "pres_pad": self.caps.pres_pad,
                "cone_depth": self.caps.cone_depth,
                "cone_width": self.caps.cone_width,
                "max_resolution": self.caps.max_resolution,
            },
            "seed": self.seed,
            "verdicts": {k: v.as_json() for k, v in self.verdicts.items()},
            "consistency": self.consistency,
        }

    def as_text(self) -> str:
        lines = [f"classification at n = {self.n} over F_{self.p}"]
        if self.universe_bound:
            lines.append(
                f"universe: {self.universe_size} modules within bound {list(self.universe_bound)}"
            )
        width = max(len(k) for k in self.verdicts)
        for k, v in self.verdicts.items():
            lines.append(f"  {k.ljust(width)} : {v.value.value}")
        return "\n".join(lines)


def classify(T: Module, n: int, universe: Sequence[Module],
             universe_bound: Optional[Tuple[int, ...]] = None,
             caps: SearchCaps = DEFAULT_CAPS, seed: Optional[int] = None) -> ClassReport:
    """Full verdict sheet, with the equivalence cross-checks run."""
    report = ClassReport(
        n=n, p=T.alg.p, universe_bound=universe_bound,
        universe_size=len(universe), caps=caps, seed=seed,
    )
    report.verdicts["pretilting"] = Verdict(Tri.of(is_pretilting(T, n)))
    report.verdicts["n_tilting"] = Verdict(Tri.of(is_n_tilting(T, n)))
    report.verdicts["n_pre_air"] = Verdict(Tri.of(is_n_pre_air(T, n)))
    air, _ = is_n_air(T, n)
    report.verdicts["n_air"] = Verdict(Tri.of(air))
    report.verdicts["strongly_n_air"] = is_strongly_n_air(T, n, universe, caps)
    report.verdicts["n_silting"] = is_n_silting(T, n, universe)
    report.verdicts["n_quasi_tilting"] = is_n_quasi_tilting(T, n, universe, caps)
    report.verdicts["strongly_n_quasi_tilting"] = is_strongly_n_quasi_tilting(T, n, universe, caps)
    report.verdicts["ann_faith_dim_ge_n"] = Verdict(Tri.of(ann_faithful_dim_at_least(T, n)))
    report.verdicts["faithful"] = Verdict(Tri.of(is_faithful(T)))
    report.consistency = {
        k: v.value for k, v in crosscheck_equivalences(T, n, universe, caps).items()
    }
    _implication_audit(report)
    return report


_IMPLICATIONS = [
    ("n_tilting", "strongly_n_air"),
    ("strongly_n_air", "n_air"),
    ("strongly_n_air", "n_silting"),
    ("strongly_n_air", "strongly_n_quasi_tilting"),
    ("n_silting", "n_quasi_tilting"),
    ("n_air", "n_quasi_tilting"),
    ("strongly_n_quasi_tilting", "n_quasi_tilting"),
]


def _implication_audit(report: ClassReport) -> None:
    """The inclusion diagram between the notions, audited on decided verdicts."""
    for weaker_src, stronger_tgt in _IMPLICATIONS:
        a = report.verdicts[weaker_src].value
        b = report.verdicts[stronger_tgt].value
        if a is Tri.YES and b is Tri.NO:
            raise InternalInconsistencyError(
                f"implication violated: {weaker_src} = yes but {stronger_tgt} = no"
            )
