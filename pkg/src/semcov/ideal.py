"""Support pruning and kernel search for polynomial covariance relations.

A degree-d relation is a polynomial in the entries sigma_ij (i <= j) that
vanishes when every sigma_ij is replaced by the model's covariance
numerator f_ij. The search space at degree d is every degree-d monomial
in the sigma variables. Two support-pruning passes shrink it:

  * build the table whose rows are degree-d omega-monomials, whose
    columns are the candidate sigma-monomials, and whose (alpha, beta)
    entry describes the coefficient of omega^alpha in the image of
    sigma^beta: either its full lambda-monomial support or only its
    leading lambda-monomial (the cheap "weak" variant);
  * repeatedly delete any column that contains a lambda-monomial
    appearing in no other column of the same row, since such a column
    cannot take part in any cancellation. The deletion fixpoint does not
    depend on scan order.

Surviving columns feed an exact rational kernel computation, and every
reported relation is certified by substituting the numerators back in.

Internally monomials are bit-packed integers (a degree field, then one
exponent field per variable, most significant variable first) so that
integer comparison realizes the graded-lex order and multiplication is
integer addition; the public table type decodes entries on demand.
"""

from __future__ import annotations

import heapq
import math
import random
from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Optional

from ._linalg import random_prime, rank_mod, rational_nullspace
from .covariance import covariance_matrix
from .graph import MixedGraph
from .poly import Mono, Polynomial, Scalar, mono, sig

SigmaMonomial = tuple[tuple[int, int], ...]


def sigma_pairs(n: int) -> list[tuple[int, int]]:
    """Index pairs (i, j), i <= j, in lexicographic order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def sigma_monomials(n: int, degree: int) -> list[SigmaMonomial]:
    """All degree-d multisets of index pairs, lexicographic."""
    return list(combinations_with_replacement(sigma_pairs(n), degree))


def sigma_monomial_poly(beta: SigmaMonomial) -> Polynomial:
    return Polynomial.monomial(mono(*(sig(i, j) for i, j in beta)))


def substitute(f: Polynomial, g: MixedGraph) -> Polynomial:
    """Image of a sigma-polynomial under sigma_ij -> covariance numerator.

    Only s-kind variables may appear in f. The denominators det^2 drop
    out on purpose: at a fixed degree they contribute a common unit.
    """
    cov = covariance_matrix(g)
    acc: dict[Mono, Scalar] = {}
    for m, c in f.terms():
        prod = Polynomial.constant(c)
        for v, e in m:
            if v[0] != "s":
                raise ValueError(f"expected sigma variables only, got {v}")
            prod = prod * cov.numerator(v[1], v[2]) ** e
        for mm, cc in prod.terms():
            s = acc.get(mm, 0) + cc
            if s == 0:
                acc.pop(mm, None)
            else:
                acc[mm] = s
    return Polynomial(acc)


# -- packed monomial codec ---------------------------------------------------


class _Codec:
    """Bit-packs (lambda, omega) monomials for one graph and degree bound."""

    def __init__(self, g: MixedGraph, degree: int):
        cov = covariance_matrix(g)
        self.pairs = sigma_pairs(g.n)
        self.numerators = [cov.numerator(i, j) for i, j in self.pairs]
        self.lam_vars = tuple(sorted(g.lambda_variables()))
        self.om_vars = tuple(sorted(g.omega_variables()))
        max_exp = 0
        max_deg = 0
        for f in self.numerators:
            for m, _ in f.terms():
                deg = 0
                for v, e in m:
                    if v[0] == "l":
                        deg += e
                        max_exp = max(max_exp, e)
                max_deg = max(max_deg, deg)
        self.lam_ebits = (degree * max_exp + 1).bit_length()
        self.om_ebits = (degree + 1).bit_length()
        self.om_width = self.om_ebits * len(self.om_vars)
        self.lam_width = self.lam_ebits * len(self.lam_vars)
        self.deg_shift = self.om_width + self.lam_width
        self.deg_scale = (degree * max_deg + 1).bit_length()
        # Most significant field = most significant variable.
        self.lam_shift = {
            v: self.om_width + self.lam_ebits * (len(self.lam_vars) - 1 - t)
            for t, v in enumerate(self.lam_vars)
        }
        self.om_shift = {
            v: self.om_ebits * (len(self.om_vars) - 1 - t)
            for t, v in enumerate(self.om_vars)
        }
        self.om_mask = (1 << self.om_width) - 1

    def encode_mono(self, m: Mono) -> int:
        key = 0
        deg = 0
        for v, e in m:
            if v[0] == "l":
                key += e << self.lam_shift[v]
                deg += e
            else:
                key += e << self.om_shift[v]
        return key + (deg << self.deg_shift)

    def encode_poly(self, p: Polynomial) -> dict[int, int]:
        out = {}
        for m, c in p.terms():
            out[self.encode_mono(m)] = c
        return out

    def split(self, key: int) -> tuple[int, int]:
        """(lambda part with degree field, omega part)."""
        return key >> self.om_width, key & self.om_mask

    def decode_lam(self, lkey: int) -> Mono:
        # lkey is the high part produced by split(): exponents plus degree.
        pairs = []
        mask = (1 << self.lam_ebits) - 1
        for t, v in enumerate(self.lam_vars):
            e = (lkey >> (self.lam_ebits * (len(self.lam_vars) - 1 - t))) & mask
            if e:
                pairs.append((v, e))
        return tuple(pairs)

    def decode_om(self, okey: int) -> Mono:
        pairs = []
        mask = (1 << self.om_ebits) - 1
        for t, v in enumerate(self.om_vars):
            e = (okey >> (self.om_ebits * (len(self.om_vars) - 1 - t))) & mask
            if e:
                pairs.append((v, e))
        return tuple(pairs)


def _mul_packed(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            s = out.get(k, 0) + ca * cb
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
    return out


def _iter_products(
    codec: _Codec,
    packed: list[dict[int, int]],
    degree: int,
    allowed: Optional[list[SigmaMonomial]],
) -> Iterator[tuple[SigmaMonomial, dict[int, int]]]:
    """(column, packed product) pairs in lexicographic column order.

    Walks the non-decreasing pair-sequence tree so each prefix product is
    computed once. With `allowed` (sorted), subtrees containing no allowed
    column are skipped via binary search on the tuple prefix.
    """
    pairs = codec.pairs

    def extends(prefix: SigmaMonomial) -> bool:
        pos = bisect_left(allowed, prefix)
        return pos < len(allowed) and allowed[pos][: len(prefix)] == prefix

    def rec(
        start: int, depth: int, prod: dict[int, int], beta: SigmaMonomial
    ) -> Iterator[tuple[SigmaMonomial, dict[int, int]]]:
        if depth == degree:
            yield beta, prod
            return
        for t in range(start, len(pairs)):
            nb = beta + (pairs[t],)
            if allowed is not None and not extends(nb):
                continue
            yield from rec(t, depth + 1, _mul_packed(prod, packed[t]), nb)

    yield from rec(0, 0, {0: 1}, ())


def _validate_columns(
    g: MixedGraph, degree: int, columns: Iterable[SigmaMonomial]
) -> list[SigmaMonomial]:
    valid = set(sigma_pairs(g.n))
    out = sorted(set(tuple(tuple(p) for p in beta) for beta in columns))
    for beta in out:
        if len(beta) != degree:
            raise ValueError(f"column {beta} does not have degree {degree}")
        if tuple(sorted(beta)) != beta or any(p not in valid for p in beta):
            raise ValueError(f"column {beta} is not a sorted tuple of index pairs")
    return out


@dataclass(eq=False)
class SupportTable:
    """Support data of the degree-d numerator images, packed.

    rows: every degree-d omega-monomial; columns: the candidate
    sigma-monomials. In "full" mode an entry is the set of
    lambda-monomials of the corresponding coefficient, in "weak" mode
    only its graded-lex leading monomial survives.
    """

    graph: MixedGraph
    degree: int
    mode: str
    rows: tuple[Mono, ...]
    columns: tuple[SigmaMonomial, ...]
    _codec: _Codec = field(repr=False)
    _cols: list[dict[int, object]] = field(repr=False)

    def support(self, row: int, col: int) -> frozenset[Mono]:
        okey = self._row_keys[row]
        got = self._cols[col].get(okey)
        if got is None:
            return frozenset()
        if self.mode == "weak":
            return frozenset((self._codec.decode_lam(got),))
        return frozenset(self._codec.decode_lam(k) for k in got)

    def leading(self, row: int, col: int) -> Optional[Mono]:
        okey = self._row_keys[row]
        got = self._cols[col].get(okey)
        if got is None:
            return None
        if self.mode == "weak":
            return self._codec.decode_lam(got)
        return self._codec.decode_lam(max(got))

    @property
    def _row_keys(self) -> list[int]:
        return self.__dict__.setdefault(
            "_row_keys_cache",
            [self._codec.encode_mono(r) for r in self.rows],
        )


def support_table(
    g: MixedGraph,
    degree: int,
    mode: str = "full",
    columns: Optional[Iterable[SigmaMonomial]] = None,
) -> SupportTable:
    """Build the degree-d support table in the requested mode.

    `columns` restricts the table to a subset of candidate monomials
    (used by degree_scan to run the full pass only on weak survivors);
    default is every degree-d sigma-monomial.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    if mode not in ("full", "weak"):
        raise ValueError(f"mode must be 'full' or 'weak', not {mode!r}")
    codec = _Codec(g, degree)
    allowed = None
    if columns is not None:
        allowed = _validate_columns(g, degree, columns)
    packed = [codec.encode_poly(f) for f in codec.numerators]
    rows = tuple(
        mono(*combo) for combo in combinations_with_replacement(codec.om_vars, degree)
    )
    out_cols: list[dict[int, object]] = []
    out_betas: list[SigmaMonomial] = []
    weak = mode == "weak"
    for beta, prod in _iter_products(codec, packed, degree, allowed):
        groups: dict[int, list[int]] = {}
        for key in prod:
            lkey, okey = codec.split(key)
            groups.setdefault(okey, []).append(lkey)
        if weak:
            col: dict[int, object] = {ok: max(ls) for ok, ls in groups.items()}
        else:
            col = {ok: tuple(sorted(ls)) for ok, ls in groups.items()}
        out_cols.append(col)
        out_betas.append(beta)
    return SupportTable(g, degree, mode, rows, tuple(out_betas), codec, out_cols)


def prune_support(table: SupportTable) -> list[SigmaMonomial]:
    """Columns that survive the mode's deletion rule, run to a fixed point.

    Full mode deletes a column once it holds a lambda-monomial that no
    other surviving column shows in the same row: a relation among the
    columns would need that monomial's coefficient to cancel, and nothing
    is left to cancel against.

    Weak mode only knows each coefficient's leading monomial, and
    uniqueness among leading monomials proves nothing (the monomial could
    hide in another column's tail). What does survive the information
    loss is strict maximality: when a column's leading monomial at some
    row is strictly larger than every other column's leading monomial
    there, no other column contains it at all, so the column is deleted.

    Either way deletions cascade until none applies. A deletable column
    stays deletable while others disappear, so the fixed point does not
    depend on scan order. Columns come back in their original order.
    """
    if table.mode == "weak":
        return _prune_weak(table)
    om_width = table._codec.om_width
    cols = table._cols

    def keys_of(ci: int) -> Iterator[int]:
        for okey, lkeys in cols[ci].items():
            for lkey in lkeys:
                yield (lkey << om_width) | okey

    # Per (row, lambda-monomial): occurrence count and sum of column ids.
    # A count of 1 pins the owning column as the sum.
    stats: dict[int, list[int]] = {}
    for ci in range(len(cols)):
        for key in keys_of(ci):
            st = stats.get(key)
            if st is None:
                stats[key] = [1, ci]
            else:
                st[0] += 1
                st[1] += ci
    alive = [True] * len(cols)
    queue = [key for key, st in stats.items() if st[0] == 1]
    while queue:
        key = queue.pop()
        st = stats[key]
        if st[0] != 1:
            continue
        ci = st[1]
        if not alive[ci]:
            continue
        alive[ci] = False
        for k2 in keys_of(ci):
            st2 = stats[k2]
            st2[0] -= 1
            st2[1] -= ci
            if st2[0] == 1 and alive[st2[1]]:
                queue.append(k2)
    return [table.columns[ci] for ci in range(len(cols)) if alive[ci]]


def _prune_weak(table: SupportTable) -> list[SigmaMonomial]:
    """Strict-maximality cascade over singleton leading-monomial entries.

    Per row, a lazy max-heap finds the current largest leading monomial
    among living columns and a count map tells whether it is attained
    once. Removing a column re-queues every row it touched.
    """
    cols = table._cols
    rows: dict[int, dict[int, int]] = {}
    for ci, col in enumerate(cols):
        for okey, lkey in col.items():
            rows.setdefault(okey, {})[ci] = lkey
    heaps: dict[int, list[tuple[int, int]]] = {}
    counts: dict[int, dict[int, int]] = {}
    for okey, colmap in rows.items():
        heap = [(-lkey, ci) for ci, lkey in colmap.items()]
        heapq.heapify(heap)
        heaps[okey] = heap
        cnt: dict[int, int] = {}
        for lkey in colmap.values():
            cnt[lkey] = cnt.get(lkey, 0) + 1
        counts[okey] = cnt
    alive = [True] * len(cols)
    pending = set(rows)
    while pending:
        okey = pending.pop()
        heap = heaps[okey]
        while heap and not alive[heap[0][1]]:
            heapq.heappop(heap)
        if not heap:
            continue
        top_lkey, ci = -heap[0][0], heap[0][1]
        if counts[okey].get(top_lkey, 0) != 1:
            continue
        alive[ci] = False
        for ok2, lk2 in cols[ci].items():
            cnt = counts[ok2]
            cnt[lk2] -= 1
            if cnt[lk2] == 0:
                del cnt[lk2]
            pending.add(ok2)
    return [table.columns[ci] for ci in range(len(cols)) if alive[ci]]


def kernel_relations(
    g: MixedGraph,
    degree: int,
    support: Optional[Iterable[SigmaMonomial]] = None,
    seed: int = 0,
) -> list[Polynomial]:
    """Basis of the degree-d relations supported on the given monomials.

    Solves for exact rational kernel vectors of the coefficient matrix of
    the substituted monomials, normalizes each basis element so its first
    nonzero coefficient (in column order) is 1, and certifies every
    returned polynomial by substituting the numerators back in. A cheap
    modular rank check short-circuits the common empty-kernel case.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    if support is None:
        cols = sigma_monomials(g.n, degree)
    else:
        cols = _validate_columns(g, degree, support)
    if not cols:
        return []
    codec = _Codec(g, degree)
    packed = [codec.encode_poly(f) for f in codec.numerators]
    images = {
        beta: prod for beta, prod in _iter_products(codec, packed, degree, cols)
    }
    all_keys = sorted(set().union(*images.values())) if images else []
    matrix = [
        [images[beta].get(key, 0) for beta in cols] for key in all_keys
    ]
    p = random_prime(random.Random(seed))
    if rank_mod(matrix, len(cols), p) == len(cols):
        return []
    basis = rational_nullspace(matrix, len(cols))
    relations = []
    for vec in basis:
        terms: dict[Mono, Scalar] = {}
        for beta, c in zip(cols, vec):
            if c != 0:
                coeff: Scalar = int(c) if c.denominator == 1 else c
                terms[mono(*(sig(i, j) for i, j in beta))] = coeff
        rel = Polynomial(terms)
        if not substitute(rel, g).is_zero:
            raise RuntimeError(
                "kernel certification failed; this is a bug, please report it"
            )
        relations.append(rel)
    return relations


@dataclass(frozen=True)
class DegreeScanEntry:
    """Counts and certified relations for one degree of the scan."""

    degree: int
    initial_columns: int
    weak_pruned: int
    full_pruned: int
    kernel_dim: int
    relations: tuple[Polynomial, ...]

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "initialColumns": self.initial_columns,
            "weakPruned": self.weak_pruned,
            "fullPruned": self.full_pruned,
            "kernelDim": self.kernel_dim,
            "relations": [str(r) for r in self.relations],
        }


def degree_scan(
    g: MixedGraph, max_degree: int, seed: int = 0
) -> list[DegreeScanEntry]:
    """Weak prune, full prune on the survivors, then the certified kernel,
    for every degree 1..max_degree."""
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    npairs = len(sigma_pairs(g.n))
    out = []
    for d in range(1, max_degree + 1):
        initial = math.comb(npairs + d - 1, d)
        weak_survivors = prune_support(support_table(g, d, "weak"))
        full_survivors = prune_support(
            support_table(g, d, "full", columns=weak_survivors)
        )
        relations = tuple(
            kernel_relations(g, d, support=full_survivors, seed=seed)
        )
        out.append(
            DegreeScanEntry(
                d,
                initial,
                len(weak_survivors),
                len(full_survivors),
                len(relations),
                relations,
            )
        )
    return out
