"""Generic identifiability of the covariance parametrization.

The parameters (error covariances, then edge coefficients) map to the
covariance numerator matrix; the map is generically finite-to-one exactly
when the Jacobian of that polynomial map has full generic rank. Rank is
certified from below by evaluating the symbolic Jacobian at random points
over random word-size prime fields, so "yes" answers are sound up to the
Schwartz-Zippel failure probability per trial and "unknown" is the honest
other verdict; the test never answers "no".

For simple graphs (at most one edge per vertex pair) the special point
with every error covariance 1 and every edge coefficient 0 makes the
square submatrix on columns {sigma_ii} + {sigma_ij : edge} a permutation
matrix, which certifies full rank without any randomness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from ._linalg import random_prime, rank_mod
from .covariance import covariance_matrix
from .graph import GraphError, MixedGraph
from .poly import Polynomial, Var


@dataclass(frozen=True)
class JacobianMatrix:
    """Jacobian of the numerator map: one row per parameter, one column
    per covariance position (i, j) with i <= j."""

    params: tuple[Var, ...]
    columns: tuple[tuple[int, int], ...]
    entries: tuple[tuple[Polynomial, ...], ...]


@dataclass(frozen=True)
class IdentReport:
    params: int
    rank: int
    verdict: str
    simple: bool
    special_point: Optional[bool]

    def to_dict(self) -> dict:
        out = {
            "params": self.params,
            "rank": self.rank,
            "verdict": self.verdict,
            "simple": self.simple,
        }
        if self.special_point is not None:
            out["specialPoint"] = self.special_point
        return out


def numerator_jacobian(g: MixedGraph) -> JacobianMatrix:
    """Formal partial derivatives of every covariance numerator.

    Row order: w_{i,i} for all vertices, w_{i,j} for bidirected edges,
    l_{i,j} for directed edges. Column order: (i, j) with i <= j,
    lexicographic.
    """
    cov = covariance_matrix(g)
    params = g.omega_variables() + g.lambda_variables()
    columns = tuple(
        (i, j) for i in range(1, g.n + 1) for j in range(i, g.n + 1)
    )
    numerators = [cov.numerator(i, j) for i, j in columns]
    entries = tuple(
        tuple(f.derivative(v) for f in numerators) for v in params
    )
    return JacobianMatrix(params, columns, entries)


def generic_rank(jac: JacobianMatrix, trials: int = 3, seed: int = 0) -> int:
    """Best rank seen over `trials` random modular evaluations.

    Each trial draws a fresh word-size prime and uniform nonzero residues
    for every parameter; the reported rank is the maximum, a sound lower
    bound on the generic rank that is monotone in `trials` for a fixed
    seed.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(seed)
    best = 0
    for _ in range(trials):
        p = random_prime(rng)
        point = {v: rng.randrange(1, p) for v in jac.params}
        rows = [
            [e.evaluate_mod(point, p) for e in row] for row in jac.entries
        ]
        best = max(best, rank_mod(rows, len(jac.columns), p))
        if best == len(jac.params):
            break
    return best


def special_point_check(g: MixedGraph) -> bool:
    """Permutation-matrix certificate at w = 1, l = 0 for simple graphs.

    Restricts the Jacobian to the columns sigma_ii for every vertex and
    sigma_ij for every (directed or bidirected) edge, evaluates at the
    special point and checks for a permutation of the identity. The noise
    covariance is evaluated as the identity matrix: off-diagonal omegas
    must be 0 there, or cross terms through bidirected pairs survive and
    the submatrix picks up entries outside the permutation pattern.
    Raises GraphError when g is not simple (columns would collide).
    """
    if not g.simple:
        raise GraphError("special point check requires a simple graph")
    jac = numerator_jacobian(g)
    point = {
        v: (1 if v[0] == "w" and v[1] == v[2] else 0) for v in jac.params
    }
    wanted = [(i, i) for i in range(1, g.n + 1)]
    wanted += sorted(
        {(min(i, j), max(i, j)) for i, j in g.directed} | set(g.bidirected)
    )
    col_index = {pos: k for k, pos in enumerate(jac.columns)}
    sel = [col_index[pos] for pos in wanted]
    if len(sel) != len(jac.params):
        return False
    matrix = [
        [row[c].evaluate(point) for c in sel] for row in jac.entries
    ]
    for row in matrix:
        if any(x not in (0, 1) for x in row) or sum(row) != 1:
            return False
    for c in range(len(sel)):
        if sum(row[c] for row in matrix) != 1:
            return False
    return True


def is_generically_finite_to_one(
    g: MixedGraph, trials: int = 3, seed: int = 0
) -> str:
    """Verdict "yes" (certified) or "unknown"; never "no"."""
    jac = numerator_jacobian(g)
    rank = generic_rank(jac, trials=trials, seed=seed)
    return "yes" if rank == len(jac.params) else "unknown"


def identifiability_report(
    g: MixedGraph, trials: int = 3, seed: int = 0
) -> IdentReport:
    """Everything the CLI shows: parameter count, rank, verdict, and the
    special-point certificate for simple graphs."""
    jac = numerator_jacobian(g)
    rank = generic_rank(jac, trials=trials, seed=seed)
    verdict = "yes" if rank == len(jac.params) else "unknown"
    special = special_point_check(g) if g.simple else None
    return IdentReport(len(jac.params), rank, verdict, g.simple, special)
