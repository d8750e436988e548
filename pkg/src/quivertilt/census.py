"""Bounded census of modules up to isomorphism.

Enumerates every representation with dimension vector below a bound,
satisfying the relations, then keeps one representative per isomorphism
class of indecomposables.  The census is the finite proxy for statements
quantified over all finitely generated modules; callers must treat census
verdicts as certified only up to the bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import Algebra
from .linalg import Matrix
from .modules import (
    Module,
    _indec_iso_quick,
    direct_sum,
    hom_dim,
    zero_module,
)


class CensusCapExceeded(RuntimeError):
    """The enumeration would exceed the configured size; refuse loudly."""


@dataclass
class Census:
    algebra: Algebra
    bound: Tuple[int, ...]
    modules: List[Module]  # indecomposables, pairwise non-isomorphic
    p: int
    method: str = "exhaustive"

    def __len__(self):
        return len(self.modules)

    def with_zero(self) -> List[Module]:
        return [zero_module(self.algebra)] + list(self.modules)


def _dim_vectors(bound: Sequence[int]):
    ranges = [range(b + 1) for b in bound]
    for dims in itertools.product(*ranges):
        if any(dims):
            yield dims


def _enumeration_size(alg: Algebra, dims: Sequence[int]) -> int:
    cells = 0
    for a in alg.quiver.arrows:
        cells += dims[a.source] * dims[a.target]
    return alg.p ** cells


def _enumerate_valid(alg: Algebra, dims: Sequence[int]):
    """DFS over arrow matrices with relation checks as soon as possible."""
    p = alg.p
    arrows = alg.quiver.arrows
    na = len(arrows)
    # relation -> последний arrow index involved, for early pruning
    rel_ready = []
    for rel in alg.relations:
        involved = set()
        for _, path in rel:
            involved.update(path.arrows)
        rel_ready.append(max(involved))
    shapes = [(dims[a.target], dims[a.source]) for a in arrows]
    cell_counts = [r * c for r, c in shapes]

    def rel_holds(mats: List[Matrix], rel) -> bool:
        acc = None
        for c, path in rel:
            m = Matrix.identity(p, dims[path.source])
            for a in path.arrows:
                m = mats[a] @ m
            term = m.scale(c)
            acc = term if acc is None else acc + term
        return acc is None or acc.is_zero()

    def fill(idx: int, mats: List[Matrix]):
        if idx == na:
            yield list(mats)
            return
        rows, cols = shapes[idx]
        for bits in itertools.product(range(p), repeat=cell_counts[idx]):
            m = Matrix(p, np.array(bits, dtype=np.int64).reshape(rows, cols), _trusted=True)
            mats.append(m)
            ok = True
            for rel, ready in zip(alg.relations, rel_ready):
                if ready == idx and not rel_holds(mats, rel):
                    ok = False
                    break
            if ok:
                yield from fill(idx + 1, mats)
            mats.pop()

    yield from fill(0, [])


def _fingerprint(alg: Algebra, M: Module) -> Tuple:
    ranks = tuple(m.rank() for m in M.mats)
    end_dim = hom_dim(M, M)
    return (M.dims, ranks, end_dim)


def census(alg: Algebra, bound: Sequence[int], max_size: int = 2_000_000) -> Census:
    """All indecomposables with dimension vector componentwise below the
    bound, one per isomorphism class."""
    bound = tuple(int(b) for b in bound)
    if len(bound) != alg.quiver.num_vertices:
        raise ValueError("bound length must match the number of vertices")
    if any(b < 0 for b in bound):
        raise ValueError("bound must be componentwise nonnegative")
    total = sum(_enumeration_size(alg, dims) for dims in _dim_vectors(bound))
    if total > max_size:
        raise CensusCapExceeded(
            f"enumeration would visit about {total} representations "
            f"(cap {max_size}); raise the cap or shrink the bound"
        )
    import random as _random

    from .modules import _split_once

    rng = _random.Random(0)
    found: List[Module] = []
    buckets: Dict[Tuple, List[Module]] = {}
    for dims in _dim_vectors(bound):
        for mats in _enumerate_valid(alg, dims):
            M = Module(alg, dims, mats, validate=False)
            # decomposables are dropped outright: their indecomposable pieces
            # occur at smaller dimension vectors and are enumerated there
            if _split_once(M, rng) is not None:
                continue
            fp = _fingerprint(alg, M)
            bucket = buckets.setdefault(fp, [])
            # the quick scan (invertible hom among the basis) is a complete
            # isomorphism test between indecomposables
            if any(_indec_iso_quick(R, M) for R in bucket):
                continue
            bucket.append(M)
            found.append(M)
    found.sort(key=lambda m: (m.total_dim, m.dims))
    return Census(alg, bound, found, alg.p)


def check_inclusion(pred_a, pred_b, universe: Iterable[Module]):
    """First universe member satisfying a but not b, or None."""
    for M in universe:
        if pred_a(M) and not pred_b(M):
            return M
    return None


def basic_candidates(cens: Census, include_zero: bool = True, max_summands: Optional[int] = None):
    """All basic modules assembled from the census indecomposables.

    Multiplicity one per indecomposable: every predicate in scope only
    depends on add(T), so higher multiplicities are redundant.
    """
    mods = cens.modules
    n = len(mods)
    out = []
    if include_zero:
        out.append(zero_module(cens.algebra))
    cap = n if max_summands is None else min(n, max_summands)
    for r in range(1, cap + 1):
        for combo in itertools.combinations(range(n), r):
            if len(combo) == 1:
                out.append(mods[combo[0]])
            else:
                out.append(direct_sum([mods[i] for i in combo])[0])
    return out


def hunt_class_gap(cens: Census, n: int, caps=None, max_summands: Optional[int] = None):
    """Search for modules that meet the definition at level n but fail the
    class-equality strengthening within the census bound.

    Returns the list of separating candidates found (expected empty; an
    entry would answer the open comparison question and, by the complex
    translation, settle the rank question negatively).
    """
    from .classify import is_n_air, is_strongly_n_air
    from .homology import DEFAULT_CAPS
    from .tri import Tri

    caps = caps or DEFAULT_CAPS
    universe = cens.with_zero()
    separating = []
    for T in basic_candidates(cens, max_summands=max_summands):
        air, _ = is_n_air(T, n)
        if not air:
            continue
        verdict = is_strongly_n_air(T, n, universe, caps)
        if verdict.value is Tri.NO:
            separating.append((T, verdict))
    return separating
