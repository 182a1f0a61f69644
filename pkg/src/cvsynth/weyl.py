"""Exact polynomial algebra in the canonical operators q and p.

Polynomials are kept in a unique normal form: within each mode every power
of ``q`` stands to the left of every power of ``p``.  Coefficients are exact
Gaussian rationals, and the commutation relation is ``[q, p] = i``.

Reordering uses the closed form

    p^b q^c = sum_j  j! C(b, j) C(c, j) (-i)^j  q^(c-j) p^(b-j)

which follows from ``[p, q] = -i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping

from sympy.polys.domains import QQ, QQ_I

__all__ = [
    "WeylMonomial",
    "WeylPoly",
    "q",
    "p",
    "const",
    "number_operator",
    "kerr_terms",
    "normal_product",
    "commutator",
    "NumberProductExpansion",
    "expand_number_product",
]

_I_POWERS = [QQ_I(1, 0), QQ_I(0, -1), QQ_I(-1, 0), QQ_I(0, 1)]  # (-i)^j


def _coef(value) -> "QQ_I.dtype":
    if isinstance(value, QQ_I.dtype):
        return value
    if isinstance(value, complex):
        re, im = Fraction(value.real).limit_denominator(), Fraction(value.imag).limit_denominator()
        return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))
    if isinstance(value, Fraction):
        return QQ_I(QQ(value.numerator, value.denominator), 0)
    return QQ_I.convert(value)


@dataclass(frozen=True, order=True)
class WeylMonomial:
    """Product over modes of ``q_k^a p_k^b`` in normal order.

    ``powers`` is a sorted tuple of ``(mode, a, b)``; modes with ``a = b = 0``
    are never stored, so the identity is the empty tuple.
    """

    powers: tuple[tuple[int, int, int], ...] = ()

    @classmethod
    def from_mapping(cls, exps: Mapping[int, tuple[int, int]]) -> "WeylMonomial":
        items = []
        for mode, (a, b) in sorted(exps.items()):
            if a < 0 or b < 0:
                raise ValueError("exponents must be non-negative")
            if a or b:
                items.append((mode, a, b))
        return cls(tuple(items))

    def as_dict(self) -> dict[int, tuple[int, int]]:
        return {mode: (a, b) for mode, a, b in self.powers}

    @property
    def degree(self) -> int:
        return sum(a + b for _, a, b in self.powers)

    def __str__(self) -> str:
        if not self.powers:
            return "1"
        parts = []
        for mode, a, b in self.powers:
            for sym, e in (("q", a), ("p", b)):
                if e == 1:
                    parts.append(f"{sym}{mode}")
                elif e:
                    parts.append(f"{sym}{mode}^{e}")
        return "*".join(parts)


class WeylPoly:
    """Finite linear combination of normal-ordered monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[WeylMonomial, object] | None = None):
        clean: dict[WeylMonomial, object] = {}
        for mono, c in (terms or {}).items():
            c = _coef(c)
            if c:
                clean[mono] = c
        self.terms = clean

    @classmethod
    def _from_pairs(cls, pairs: Iterable[tuple[WeylMonomial, object]]) -> "WeylPoly":
        acc: dict[WeylMonomial, object] = {}
        for mono, c in pairs:
            acc[mono] = acc.get(mono, QQ_I.zero) + c
        return cls(acc)

    # arithmetic -------------------------------------------------------
    def __add__(self, other) -> "WeylPoly":
        other = _as_poly(other)
        return WeylPoly._from_pairs(itertools.chain(self.terms.items(), other.terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "WeylPoly":
        return WeylPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "WeylPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "WeylPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "WeylPoly":
        return normal_product(self, _as_poly(other))

    def __rmul__(self, other) -> "WeylPoly":
        return normal_product(_as_poly(other), self)

    def __pow__(self, n: int) -> "WeylPoly":
        out = const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        try:
            other = _as_poly(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mono: WeylMonomial | Mapping[int, tuple[int, int]]):
        if not isinstance(mono, WeylMonomial):
            mono = WeylMonomial.from_mapping(mono)
        return self.terms.get(mono, QQ_I.zero)

    def scalar_part(self):
        """Coefficient of the identity."""
        return self.terms.get(WeylMonomial(), QQ_I.zero)

    def is_scalar(self) -> bool:
        return all(not m.powers for m in self.terms)

    @property
    def modes(self) -> set[int]:
        return {mode for m in self.terms for mode, _, _ in m.powers}

    def __repr__(self) -> str:
        if not self.terms:
            return "WeylPoly(0)"
        body = " + ".join(f"({c})*{m}" for m, c in sorted(self.terms.items()))
        return f"WeylPoly({body})"


def _as_poly(x) -> WeylPoly:
    if isinstance(x, WeylPoly):
        return x
    return const(x)


def const(c) -> WeylPoly:
    return WeylPoly({WeylMonomial(): c})


def q(mode: int = 0) -> WeylPoly:
    return WeylPoly({WeylMonomial(((mode, 1, 0),)): 1})


def p(mode: int = 0) -> WeylPoly:
    return WeylPoly({WeylMonomial(((mode, 0, 1),)): 1})


def _mode_product(x: tuple[int, int], y: tuple[int, int]) -> list[tuple[object, tuple[int, int]]]:
    """(q^a p^b)(q^c p^d) reduced to normal order for a single mode."""
    a, b = x
    c, d = y
    out = []
    for j in range(min(b, c) + 1):
        k = factorial(j) * comb(b, j) * comb(c, j)
        out.append((QQ_I.convert(k) * _I_POWERS[j % 4], (a + c - j, b + d - j)))
    return out


def _monomial_product(m1: WeylMonomial, m2: WeylMonomial):
    e1, e2 = m1.as_dict(), m2.as_dict()
    modes = sorted(set(e1) | set(e2))
    per_mode = [_mode_product(e1.get(k, (0, 0)), e2.get(k, (0, 0))) for k in modes]
    for combo in itertools.product(*per_mode):
        c = QQ_I.one
        exps = {}
        for mode, (ck, ab) in zip(modes, combo):
            c = c * ck
            exps[mode] = ab
        yield WeylMonomial.from_mapping(exps), c


def normal_product(a: WeylPoly, b: WeylPoly) -> WeylPoly:
    """Operator product ``a b`` reduced to normal form (exact)."""
    pairs = []
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            for mono, c in _monomial_product(m1, m2):
                pairs.append((mono, c1 * c2 * c))
    return WeylPoly._from_pairs(pairs)


def commutator(a: WeylPoly, b: WeylPoly) -> WeylPoly:
    return normal_product(a, b) - normal_product(b, a)


def number_operator(mode: int = 0) -> WeylPoly:
    """``n = (q^2 + p^2 - 1) / 2``."""
    half = QQ_I(QQ(1, 2), 0)
    return (q(mode) ** 2 + p(mode) ** 2 - 1) * const(half)


def kerr_terms() -> dict[str, WeylPoly]:
    """The four quartic pieces of ``n_1 n_2`` (modes 0 and 1), each carrying 1/4."""
    quarter = const(QQ_I(QQ(1, 4), 0))
    q0, p0, q1, p1 = q(0), p(0), q(1), p(1)
    return {
        "O1": quarter * q0**2 * q1**2,
        "O2": quarter * q0**2 * p1**2,
        "O3": quarter * p0**2 * q1**2,
        "O4": quarter * p0**2 * p1**2,
    }


@dataclass(frozen=True)
class NumberProductExpansion:
    product: WeylPoly
    printed_rhs: WeylPoly
    difference: WeylPoly
    kerr_sum: WeylPoly

    @property
    def difference_is_scalar(self) -> bool:
        return self.difference.is_scalar()


def expand_number_product() -> NumberProductExpansion:
    """Expand ``n_1 n_2`` and compare it with the quartic-minus-quadratic form.

    The comparison form is ``O1 + O2 + O3 + O4 - (q1^2 + p1^2)/4 - (q2^2 + p2^2)/4``;
    the exact product exceeds it by the constant 1/4.
    """
    terms = kerr_terms()
    kerr_sum = terms["O1"] + terms["O2"] + terms["O3"] + terms["O4"]
    quarter = const(QQ_I(QQ(1, 4), 0))
    rhs = kerr_sum - quarter * (q(0) ** 2 + p(0) ** 2) - quarter * (q(1) ** 2 + p(1) ** 2)
    product = number_operator(0) * number_operator(1)
    return NumberProductExpansion(product, rhs, product - rhs, kerr_sum)
