"""Internal exact linear algebra: mod-p ranks, rational nullspaces, primes.

Matrices are lists of rows. Everything is deterministic given its inputs;
randomness (prime and point selection) stays with the callers.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random, bits: int = 62) -> int:
    """Random prime with the given bit length."""
    while True:
        c = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(c):
            return c


def rank_mod(rows: Iterable[Sequence[int]], ncols: int, p: int) -> int:
    """Rank over GF(p) by streaming row reduction."""
    pivots: dict[int, list[int]] = {}
    rank = 0
    for row in rows:
        r = [x % p for x in row]
        for c in range(ncols):
            if r[c] == 0:
                continue
            piv = pivots.get(c)
            if piv is None:
                inv = pow(r[c], -1, p)
                pivots[c] = [x * inv % p for x in r]
                rank += 1
                break
            f = r[c]
            r = [(a - f * b) % p for a, b in zip(r, piv)]
    return rank


def rational_nullspace(
    rows: Iterable[Sequence[int | Fraction]], ncols: int
) -> list[list[Fraction]]:
    """Basis of the exact nullspace {x : A x = 0}.

    One vector per free column, in column order, each scaled so its first
    nonzero coordinate is 1. Streaming reduced row echelon form, so the
    number of stored rows never exceeds the rank.
    """
    pivots: dict[int, list[Fraction]] = {}
    for row in rows:
        r = [Fraction(x) for x in row]
        for pc in sorted(pivots):
            f = r[pc]
            if f != 0:
                piv = pivots[pc]
                r = [a - f * b for a, b in zip(r, piv)]
        c = next((k for k, x in enumerate(r) if x != 0), None)
        if c is None:
            continue
        inv = r[c]
        r = [x / inv for x in r]
        # Keep the stored rows fully reduced against each other.
        for pc, prow in pivots.items():
            f = prow[c]
            if f != 0:
                pivots[pc] = [a - f * b for a, b in zip(prow, r)]
        pivots[c] = r
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for pc, prow in pivots.items():
            v[pc] = -prow[f]
        first = next(x for x in v if x != 0)
        basis.append([x / first for x in v])
    return basis
