"""Exact sparse multivariate polynomials over the rationals.

Variables come in three kinds: ``l_{i,j}`` for directed-edge coefficients,
``w_{i,j}`` for error covariances (symmetric, normalized to i <= j) and
``s_{i,j}`` for entries of a covariance matrix treated as indeterminates.
A variable is a plain tuple ``(kind, i, j)`` so the natural tuple order is
the declared variable order: every ``l`` before every ``s`` before every
``w``, and lexicographically by ``(i, j)`` within a kind, smaller pairs
being more significant.

Monomials are tuples of ``(variable, exponent)`` pairs sorted by variable;
polynomials are immutable wrappers around ``{monomial: coefficient}`` dicts
with integer or Fraction coefficients. Floats are rejected. The monomial
order used throughout is graded lexicographic over the declared variable
order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Iterator, Mapping, Union

Var = tuple[str, int, int]
Mono = tuple[tuple[Var, int], ...]
Scalar = Union[int, Fraction]

ONE_MONO: Mono = ()


def lam(i: int, j: int) -> Var:
    """Directed-edge variable l_{i,j}."""
    if i == j:
        raise ValueError(f"no self-loop coefficient l_{{{i},{j}}}")
    return ("l", i, j)


def om(i: int, j: int) -> Var:
    """Error-covariance variable w_{i,j}, normalized so i <= j."""
    if i > j:
        i, j = j, i
    return ("w", i, j)


def sig(i: int, j: int) -> Var:
    """Covariance-entry variable s_{i,j}, normalized so i <= j."""
    if i > j:
        i, j = j, i
    return ("s", i, j)


def mono(*variables: Var) -> Mono:
    """Monomial from a sequence of variables, repeats becoming exponents."""
    counts = Counter(variables)
    return tuple(sorted(counts.items()))


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    counts = dict(a)
    for v, e in b:
        counts[v] = counts.get(v, 0) + e
    return tuple(sorted(counts.items()))


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def mono_divide(a: Mono, b: Mono) -> Mono | None:
    """a / b as a monomial, or None when b does not divide a."""
    counts = dict(a)
    for v, e in b:
        r = counts.get(v, 0) - e
        if r < 0:
            return None
        if r == 0:
            del counts[v]
        else:
            counts[v] = r
    return tuple(sorted(counts.items()))


def _grlex_cmp(a: Mono, b: Mono) -> int:
    da, db = mono_degree(a), mono_degree(b)
    if da != db:
        return -1 if da < db else 1
    # Equal degree: lexicographic, earlier variable present means larger,
    # larger exponent on the shared earlier variable means larger.
    for (va, ea), (vb, eb) in zip(a, b):
        if va != vb:
            return 1 if va < vb else -1
        if ea != eb:
            return 1 if ea > eb else -1
    return 0


#: Sort key: ascending graded-lex order. max(..., key=mono_order_key) is the
#: leading monomial.
mono_order_key = cmp_to_key(_grlex_cmp)


def _var_str(v: Var) -> str:
    kind, i, j = v
    return f"{kind}_{{{i},{j}}}"


def mono_str(m: Mono) -> str:
    if not m:
        return "1"
    parts = []
    for v, e in m:
        parts.append(_var_str(v) if e == 1 else f"{_var_str(v)}^{e}")
    return "*".join(parts)


def _check_scalar(c) -> Scalar:
    if isinstance(c, bool) or not isinstance(c, (int, Fraction)):
        raise TypeError(f"exact coefficients only, got {type(c).__name__}")
    return c


class Polynomial:
    """Immutable sparse polynomial with exact coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Mono, Scalar] | None = None):
        clean: dict[Mono, Scalar] = {}
        if terms:
            for m, c in terms.items():
                _check_scalar(c)
                if c != 0:
                    clean[m] = c
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def one(cls) -> "Polynomial":
        return cls({ONE_MONO: 1})

    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        return cls({ONE_MONO: c})

    @classmethod
    def variable(cls, v: Var) -> "Polynomial":
        return cls({((v, 1),): 1})

    @classmethod
    def monomial(cls, m: Mono, c: Scalar = 1) -> "Polynomial":
        return cls({m: c})

    # -- inspection --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def terms(self) -> Iterator[tuple[Mono, Scalar]]:
        """Terms in ascending canonical order."""
        for m in sorted(self._terms, key=mono_order_key):
            yield m, self._terms[m]

    def monomials(self) -> set[Mono]:
        return set(self._terms)

    def coefficient(self, m: Mono) -> Scalar:
        return self._terms.get(m, 0)

    def total_degree(self) -> int:
        """Maximum term degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(mono_degree(m) for m in self._terms)

    def variables(self) -> tuple[Var, ...]:
        seen = {v for m in self._terms for v, _ in m}
        return tuple(sorted(seen))

    def leading_monomial(self) -> Mono:
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self._terms, key=mono_order_key)

    def leading_coefficient(self) -> Scalar:
        return self._terms[self.leading_monomial()]

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.constant(other)
        return None

    def __add__(self, other) -> "Polynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in o._terms.items():
            s = out.get(m, 0) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return _raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return _raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "Polynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other) -> "Polynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self._terms or not o._terms:
            return Polynomial.zero()
        out: dict[Mono, Scalar] = {}
        for ma, ca in self._terms.items():
            for mb, cb in o._terms.items():
                m = mono_mul(ma, mb)
                s = out.get(m, 0) + ca * cb
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return _raw(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = Polynomial.one()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # -- evaluation --------------------------------------------------------

    def evaluate(self, point: Mapping[Var, Scalar]) -> Scalar:
        """Exact value at a rational point assigning every variable."""
        total: Scalar = 0
        for m, c in self._terms.items():
            val: Scalar = c
            for v, e in m:
                val *= point[v] ** e
            total += val
        return total

    def evaluate_mod(self, point: Mapping[Var, int], p: int) -> int:
        """Value mod a prime p.

        Fraction coefficients are mapped through the inverse of their
        denominator; a denominator divisible by p raises ValueError.
        """
        total = 0
        for m, c in self._terms.items():
            if isinstance(c, Fraction):
                den = c.denominator % p
                if den == 0:
                    raise ValueError(f"denominator of {c} vanishes mod {p}")
                cv = c.numerator * pow(den, -1, p) % p
            else:
                cv = c % p
            for v, e in m:
                cv = cv * pow(point[v] % p, e, p) % p
            total = (total + cv) % p
        return total

    def derivative(self, v: Var) -> "Polynomial":
        """Formal partial derivative with respect to v."""
        out: dict[Mono, Scalar] = {}
        for m, c in self._terms.items():
            md = dict(m)
            e = md.get(v, 0)
            if e == 0:
                continue
            if e == 1:
                del md[v]
            else:
                md[v] = e - 1
            key = tuple(sorted(md.items()))
            s = out.get(key, 0) + c * e
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return _raw(out)

    # -- kind splitting ----------------------------------------------------

    def omega_split(self) -> dict[Mono, "Polynomial"]:
        """Decompose as sum over pure-omega monomials of lambda-coefficients.

        Returns {omega-monomial: polynomial in the remaining variables}.
        """
        groups: dict[Mono, dict[Mono, Scalar]] = {}
        for m, c in self._terms.items():
            wpart = tuple((v, e) for v, e in m if v[0] == "w")
            rest = tuple((v, e) for v, e in m if v[0] != "w")
            groups.setdefault(wpart, {})[rest] = c
        return {w: _raw(d) for w, d in groups.items()}

    def coefficient_of_omega(self, alpha: Mono) -> "Polynomial":
        """Coefficient of the pure-omega monomial alpha, a lambda-polynomial."""
        out: dict[Mono, Scalar] = {}
        for m, c in self._terms.items():
            wpart = tuple((v, e) for v, e in m if v[0] == "w")
            if wpart == alpha:
                rest = tuple((v, e) for v, e in m if v[0] != "w")
                out[rest] = out.get(rest, 0) + c
        return Polynomial(out)

    # -- rendering ---------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for m, c in self.terms():
            neg = c < 0
            mag = -c if neg else c
            if not m:
                body = str(mag)
            elif mag == 1:
                body = mono_str(m)
            else:
                body = f"{mag}*{mono_str(m)}"
            if not pieces:
                pieces.append(f"-{body}" if neg else body)
            else:
                pieces.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _raw(terms: dict[Mono, Scalar]) -> Polynomial:
    # Internal fast path: terms already normalized (no zero coefficients).
    p = Polynomial.__new__(Polynomial)
    object.__setattr__(p, "_terms", terms)
    return p


def poly_sum(items: Iterable[Polynomial]) -> Polynomial:
    """Sum a stream of polynomials without quadratic rebuilds."""
    out: dict[Mono, Scalar] = {}
    for p in items:
        for m, c in p._terms.items():
            s = out.get(m, 0) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
    return _raw(out)


def exact_div(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact polynomial quotient p / q.

    Division happens leading-term by leading-term in the graded-lex order
    and raises ValueError if at any step the division is not exact. Used by
    the fraction-free elimination, where divisibility is guaranteed.
    """
    if q.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    qlm = q.leading_monomial()
    qlc = q.leading_coefficient()
    rem = dict(p._terms)
    quot: dict[Mono, Scalar] = {}
    while rem:
        lm = max(rem, key=mono_order_key)
        lc = rem[lm]
        d = mono_divide(lm, qlm)
        if d is None:
            raise ValueError("polynomials do not divide exactly")
        c = Fraction(lc) / qlc
        if c.denominator == 1:
            c = c.numerator
        quot[d] = quot.get(d, 0) + c
        for m, cq in q._terms.items():
            key = mono_mul(d, m)
            s = rem.get(key, 0) - c * cq
            if s == 0:
                rem.pop(key, None)
            else:
                rem[key] = s
    return _raw({m: c for m, c in quot.items() if c != 0})


@dataclass(frozen=True)
class RationalFunction:
    """Quotient of two polynomials, kept unreduced."""

    numerator: Polynomial
    denominator: Polynomial

    def evaluate(self, point: Mapping[Var, Scalar]) -> Fraction:
        den = self.denominator.evaluate(point)
        if den == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return Fraction(self.numerator.evaluate(point)) / den

    def __str__(self) -> str:
        return f"({self.numerator}) / ({self.denominator})"
