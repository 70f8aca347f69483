"""Exact covariance matrices of linear structural equation models.

The model on a mixed graph G with edge coefficients Lambda (directed) and
error covariances Omega (diagonal plus bidirected) has covariance

    Sigma = (I - Lambda)^-T  Omega  (I - Lambda)^-1.

Everything here is symbolic and exact. The main route expresses
det(I - Lambda) as a signed sum over vertex-disjoint cycle families and
the adjugate N = det * (I - Lambda)^-1 as signed sums over path/family
pairs (the 1-connection sums), so Sigma = N^T Omega N / det^2 with a
polynomial numerator matrix and the single shared denominator det^2.

Alternative routes used as cross-checks: a fraction-free Gauss-Jordan
elimination (naive_inverse), the trek rule for acyclic graphs, and a
truncated Neumann-series numeric oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Mapping

from .graph import (
    GraphError,
    MixedGraph,
    disjoint_cycle_families,
    enumerate_cycles,
    enumerate_paths,
    iter_cycles,
)
from .poly import (
    Mono,
    Polynomial,
    RationalFunction,
    Scalar,
    Var,
    exact_div,
    lam,
    mono_mul,
    om,
)

Matrix = tuple[tuple[Polynomial, ...], ...]


@dataclass(frozen=True)
class InverseNumerator:
    """Adjugate of (I - Lambda): entries N(i, j) with N (I - Lambda) = det I."""

    n: int
    entries: Matrix

    def entry(self, i: int, j: int) -> Polynomial:
        """1-indexed entry, the 1-connection sum from i to j."""
        return self.entries[i - 1][j - 1]


@dataclass(frozen=True)
class CovarianceResult:
    """Covariance matrix as numerators over the shared denominator det^2."""

    det: Polynomial
    numerators: Matrix

    @property
    def n(self) -> int:
        return len(self.numerators)

    def numerator(self, i: int, j: int) -> Polynomial:
        return self.numerators[i - 1][j - 1]

    @cached_property
    def _den(self) -> Polynomial:
        return self.det * self.det

    def sigma(self, i: int, j: int) -> RationalFunction:
        return RationalFunction(self.numerator(i, j), self._den)

    def to_dict(self) -> dict:
        return {
            "det": str(self.det),
            "numerators": [[str(p) for p in row] for row in self.numerators],
        }


def _edge_mono(edges) -> Mono:
    # Cycle-family and path edges are pairwise distinct, exponents stay 1.
    return tuple(sorted(((lam(a, b), 1) for a, b in edges)))


def _vertex_mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _family_data(g: MixedGraph):
    families = disjoint_cycle_families(enumerate_cycles(g))
    out = []
    for fam in families:
        # Net coefficient: (-1)^(v-c) for the subgraph count times (-1)^v
        # from the negated edge weights collapses to (-1)^c.
        sign = -1 if fam.num_cycles % 2 else 1
        out.append((_vertex_mask(fam.vertices), _edge_mono(fam.edges()), sign))
    return out


def det_linear_subgraphs(g: MixedGraph) -> Polynomial:
    """det(I - Lambda) as the signed sum over disjoint cycle families.

    The empty family contributes the constant 1, so the result is 1 for
    any acyclic graph.
    """
    terms: dict[Mono, Scalar] = {}
    for _, m, sign in _family_data(g):
        s = terms.get(m, 0) + sign
        if s == 0:
            terms.pop(m, None)
        else:
            terms[m] = s
    return Polynomial(terms)


def inverse_numerator(g: MixedGraph) -> InverseNumerator:
    """Adjugate N of (I - Lambda) via 1-connection sums.

    Entry (i, j) sums over simple paths p from i to j and cycle families
    disjoint from p, each contributing (-1)^(#cycles) times the product of
    the edge variables. The sign already folds in the global normalization
    that makes N (I - Lambda) = det I hold exactly (the raw signed
    subgraph weights come out scaled by (-1)^n).
    """
    fams = _family_data(g)
    rows = []
    for i in range(1, g.n + 1):
        row = []
        for j in range(1, g.n + 1):
            terms: dict[Mono, Scalar] = {}
            for p in enumerate_paths(g, i, j):
                pmask = _vertex_mask(p)
                pmono = _edge_mono(zip(p, p[1:]))
                for fmask, fmono, sign in fams:
                    if fmask & pmask:
                        continue
                    m = mono_mul(pmono, fmono)
                    s = terms.get(m, 0) + sign
                    if s == 0:
                        terms.pop(m, None)
                    else:
                        terms[m] = s
            row.append(Polynomial(terms))
        rows.append(tuple(row))
    return InverseNumerator(g.n, tuple(rows))


def _omega_quadratic_form(
    g: MixedGraph, entry: Callable[[int, int], Polynomial]
) -> Matrix:
    """Numerator matrix f with f[i][j] = sum_{l,k} entry(l,i) w_{l,k} entry(k,j).

    entry(l, i) is the weight of paths into i starting at l (an adjugate
    entry, or a plain path sum for the trek rule). Only the diagonal and
    bidirected pairs of Omega contribute. Symmetry is used: i <= j is
    computed and mirrored.
    """
    n = g.n
    f = [[Polynomial.zero()] * n for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            acc: dict[Mono, Scalar] = {}

            def add(w: Var, a: Polynomial, b: Polynomial, mult: int = 1):
                if a.is_zero or b.is_zero:
                    return
                prod = a * b
                for m, c in prod.terms():
                    key = mono_mul(m, ((w, 1),))
                    s = acc.get(key, 0) + mult * c
                    if s == 0:
                        acc.pop(key, None)
                    else:
                        acc[key] = s

            for l in range(1, n + 1):
                add(om(l, l), entry(l, i), entry(l, j))
            for l, k in g.bidirected:
                add(om(l, k), entry(l, i), entry(k, j))
                add(om(l, k), entry(k, i), entry(l, j))
            f[i - 1][j - 1] = f[j - 1][i - 1] = Polynomial(acc)
    return tuple(tuple(row) for row in f)


@lru_cache(maxsize=64)
def covariance_matrix(g: MixedGraph, method: str = "oneconn") -> CovarianceResult:
    """Covariance of the model on g, exact, with shared denominator det^2.

    method "oneconn" uses the cycle-family determinant and 1-connection
    adjugate; "naive" runs fraction-free Gauss-Jordan elimination instead.
    Both return identical results; the slow route exists as a baseline and
    cross-check.
    """
    if method == "oneconn":
        det = det_linear_subgraphs(g)
        adj = inverse_numerator(g)
    elif method == "naive":
        det, adj = naive_inverse(g)
    else:
        raise ValueError(f"unknown method {method!r}")
    nums = _omega_quadratic_form(g, adj.entry)
    return CovarianceResult(det, nums)


def trek_rule(g: MixedGraph) -> CovarianceResult:
    """Covariance of an acyclic model by direct trek sums.

    A trek from i to j is a pair of directed paths into i and into j whose
    sources either coincide (weight w_{l,l}) or are joined by a bidirected
    edge (weight w_{l,k}); its weight multiplies the path edge variables.
    det is 1, so numerators are the covariances themselves. Raises
    GraphError on cyclic input.
    """
    for _ in iter_cycles(g):
        raise GraphError("trek rule requires an acyclic graph")
    cache: dict[tuple[int, int], Polynomial] = {}

    def path_sum(l: int, i: int) -> Polynomial:
        key = (l, i)
        if key not in cache:
            terms: dict[Mono, Scalar] = {}
            for p in enumerate_paths(g, l, i):
                m = _edge_mono(zip(p, p[1:]))
                terms[m] = terms.get(m, 0) + 1
            cache[key] = Polynomial(terms)
        return cache[key]

    nums = _omega_quadratic_form(g, path_sum)
    return CovarianceResult(Polynomial.one(), nums)


def naive_inverse(g: MixedGraph) -> tuple[Polynomial, InverseNumerator]:
    """det and adjugate of (I - Lambda) by fraction-free elimination.

    Gauss-Jordan in the Bareiss style on [A | I]: every update divides by
    the previous pivot and the division is exact (pivots are leading
    principal minors, never zero here since their constant term is 1).
    Finishes with [det*I | adj].
    """
    n = g.n
    zero, one = Polynomial.zero(), Polynomial.one()
    lam_at = {(i, j): -Polynomial.variable(lam(i, j)) for i, j in g.directed}
    M = [
        [
            (one if i == j else lam_at.get((i + 1, j + 1), zero))
            for j in range(n)
        ]
        + [one if i == j else zero for j in range(n)]
        for i in range(n)
    ]
    prev = one
    for k in range(n):
        pivot = M[k][k]
        trivial = prev == one
        for r in range(n):
            if r == k:
                continue
            mrk = M[r][k]
            for c in range(2 * n):
                num = pivot * M[r][c] - mrk * M[k][c]
                M[r][c] = num if trivial else exact_div(num, prev)
        prev = pivot
    det = M[0][0]
    adj = tuple(tuple(M[r][n + c] for c in range(n)) for r in range(n))
    return det, InverseNumerator(n, adj)


def neumann_oracle(
    g: MixedGraph, point: Mapping[Var, Scalar], order: int = 60
) -> list[list[Fraction]]:
    """Numeric covariance via the truncated series sum_{k<=order} Lambda^k.

    Exact rational arithmetic on the truncated inverse; the only error is
    the series tail, which shrinks geometrically whenever the point keeps
    Lambda contractive. Useful as an independent numeric oracle.
    """
    n = g.n
    L = [[Fraction(0)] * n for _ in range(n)]
    for i, j in g.directed:
        L[i - 1][j - 1] = Fraction(point[lam(i, j)])
    W = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n + 1):
        W[i - 1][i - 1] = Fraction(point[om(i, i)])
    for i, j in g.bidirected:
        W[i - 1][j - 1] = W[j - 1][i - 1] = Fraction(point[om(i, j)])

    def matmul(A, B):
        return [
            [sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]

    S = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    P = S
    for _ in range(order):
        P = matmul(P, L)
        S = [[S[i][j] + P[i][j] for j in range(n)] for i in range(n)]
    ST = [[S[j][i] for j in range(n)] for i in range(n)]
    return matmul(matmul(ST, W), S)
