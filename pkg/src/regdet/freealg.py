"""Exact arithmetic in the free algebra Q<a,b> and its t-truncation Q<a,b>[t]/(t^N).

Words are plain ``str`` objects over the two letters ``"a"`` and ``"b"``; the
empty string is the unit. Coefficients are :class:`fractions.Fraction`.

>>> a, b = NCPoly.gen("a"), NCPoly.gen("b")
>>> print((a + b) * a * b)
1 aab + 1 bab
>>> print(a * b - b * a)
1 ab - 1 ba
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Fraction",
    "NCPoly",
    "TSeries",
    "rational_arith",
    "poly_arith",
    "poly_pow",
    "bigraded_component",
    "degree_window",
    "tseries_lift",
    "tseries_inverse",
    "tseries_derivative",
    "word_key",
]

LETTERS = "ab"

Scalar = Union[int, Fraction]


def word_key(word: str) -> tuple[int, str]:
    """Graded-lexicographic sort key (length first, then a < b)."""
    return (len(word), word)


def rational_arith(x: Scalar, y: Scalar | None = None, op: str = "add") -> Fraction:
    """Exact operation on rationals; ``op`` is one of add, mul, neg, inv."""
    x = Fraction(x)
    if op == "add":
        return x + Fraction(y)
    if op == "mul":
        return x * Fraction(y)
    if op == "neg":
        return -x
    if op == "inv":
        if x == 0:
            raise ZeroDivisionError("division by zero")
        return 1 / x
    raise ValueError(f"unknown rational op {op!r}")


class NCPoly:
    """Element of Q<a,b>: a finite map from words to nonzero rationals.

    Instances are treated as immutable. Iteration order of :attr:`terms` is
    graded-lexicographic so that printing and serialization are stable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[str, Scalar] | Iterable[tuple[str, Scalar]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[str, Fraction] = {}
        for w, c in items:
            if w.strip(LETTERS):
                raise ValueError(f"word {w!r} uses letters outside {{a, b}}")
            acc[w] = acc.get(w, Fraction(0)) + Fraction(c)
        self._terms = {w: acc[w] for w in sorted(acc, key=word_key) if acc[w] != 0}
        self._hash = None

    @classmethod
    def _raw(cls, acc: dict[str, Fraction]) -> NCPoly:
        # trusted constructor: keys already valid words
        p = object.__new__(cls)
        p._terms = {w: acc[w] for w in sorted(acc, key=word_key) if acc[w] != 0}
        p._hash = None
        return p

    @classmethod
    def gen(cls, letter: str) -> NCPoly:
        if letter not in LETTERS or len(letter) != 1:
            raise ValueError(f"no generator named {letter!r}")
        return cls._raw({letter: Fraction(1)})

    @classmethod
    def word(cls, w: str, coeff: Scalar = 1) -> NCPoly:
        return cls({w: coeff})

    @classmethod
    def one(cls) -> NCPoly:
        return cls._raw({"": Fraction(1)})

    @classmethod
    def zero(cls) -> NCPoly:
        return cls._raw({})

    @property
    def terms(self) -> dict[str, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[str, Fraction]]:
        return iter(self._terms.items())

    def coeff(self, w: str) -> Fraction:
        return self._terms.get(w, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = NCPoly({"": other})
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # arithmetic

    @staticmethod
    def _coerce(x) -> NCPoly:
        if isinstance(x, NCPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return NCPoly._raw({"": Fraction(x)})
        return NotImplemented

    def __add__(self, other) -> NCPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for w, c in other._terms.items():
            acc[w] = acc.get(w, 0) + c
        return NCPoly._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> NCPoly:
        return NCPoly._raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other) -> NCPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> NCPoly:
        return (-self) + other

    def scale(self, c: Scalar) -> NCPoly:
        c = Fraction(c)
        if c == 0:
            return NCPoly.zero()
        return NCPoly._raw({w: c * v for w, v in self._terms.items()})

    def __mul__(self, other) -> NCPoly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        acc: dict[str, Fraction] = {}
        for u, cu in self._terms.items():
            for v, cv in other._terms.items():
                w = u + v
                acc[w] = acc.get(w, 0) + cu * cv
        return NCPoly._raw(acc)

    def __rmul__(self, other) -> NCPoly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, j: int) -> NCPoly:
        return poly_pow(self, j)

    # text form

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (w, c) in enumerate(self._terms.items()):
            mag = str(abs(c))
            body = f"{mag} {w}" if w else mag
            if i == 0:
                parts.append(f"-{body}" if c < 0 else body)
            else:
                parts.append(f"{'-' if c < 0 else '+'} {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"NCPoly({str(self)!r})"

    _TERM = re.compile(r"\s*([+-])?\s*(-)?(\d+(?:/\d+)?)(?:\s*([ab]+))?\s*")

    @classmethod
    def parse(cls, text: str) -> NCPoly:
        """Inverse of ``str``; also accepts ``+ -1/2 ab`` style signs."""
        acc: dict[str, Fraction] = {}
        pos, n = 0, len(text)
        if not text.strip():
            raise ValueError("empty polynomial text")
        while pos < n:
            m = cls._TERM.match(text, pos)
            if m is None or m.end() == pos:
                raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
            op, neg, num, w = m.groups()
            if pos > 0 and op is None:
                raise ValueError(f"missing operator before {text[pos:]!r}")
            c = Fraction(num)
            if (op == "-") != bool(neg):
                c = -c
            w = w or ""
            acc[w] = acc.get(w, 0) + c
            pos = m.end()
        return cls._raw(acc)

    # gradings

    def bidegrees(self) -> set[tuple[int, int]]:
        return {(w.count("a"), w.count("b")) for w in self._terms}

    def homogeneous_part(self, degree: int) -> NCPoly:
        return NCPoly._raw({w: c for w, c in self._terms.items() if len(w) == degree})


def poly_arith(p: NCPoly, q: NCPoly, op: str = "add", scale: Scalar | None = None) -> NCPoly:
    """``p op q`` for op in add/sub/mul, optionally multiplied by ``scale``."""
    if op == "add":
        r = p + q
    elif op == "sub":
        r = p - q
    elif op == "mul":
        r = p * q
    else:
        raise ValueError(f"unknown polynomial op {op!r}")
    return r if scale is None else r.scale(scale)


def poly_pow(p: NCPoly, j: int) -> NCPoly:
    if j < 0:
        raise ValueError("negative power")
    r = NCPoly.one()
    for _ in range(j):
        r = r * p
    return r


def bigraded_component(p: NCPoly, k1: int, k2: int) -> NCPoly:
    """Terms of ``p`` whose words have exactly k1 letters a and k2 letters b."""
    return NCPoly._raw(
        {w: c for w, c in p.items() if len(w) == k1 + k2 and w.count("a") == k1}
    )


def degree_window(p: NCPoly) -> tuple[int, int]:
    if p.is_zero():
        raise ValueError("degree of zero undefined")
    lengths = [len(w) for w, _ in p.items()]
    return min(lengths), max(lengths)


class TSeries:
    """Truncated series sum_k c_k t^k, k < order, with NCPoly coefficients.

    ``t`` is central. Two series only combine when their truncation orders agree.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable[NCPoly], order: int):
        if order < 1:
            raise ValueError("empty truncation")
        cs = list(coeffs)[:order]
        cs += [NCPoly.zero()] * (order - len(cs))
        self.coeffs = tuple(cs)
        self.order = order

    @classmethod
    def constant(cls, p: NCPoly | Scalar, order: int) -> TSeries:
        return cls([NCPoly._coerce(p)], order)

    @classmethod
    def monomial(cls, p: NCPoly, k: int, order: int) -> TSeries:
        cs = [NCPoly.zero()] * order
        if k < order:
            cs[k] = p
        return cls(cs, order)

    def __getitem__(self, k: int) -> NCPoly:
        return self.coeffs[k]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def truncate(self, order: int) -> TSeries:
        if order > self.order:
            raise ValueError("cannot raise truncation order")
        return TSeries(self.coeffs[:order], order)

    def _check(self, other: TSeries) -> None:
        if other.order != self.order:
            raise ValueError(
                f"truncation orders differ ({self.order} vs {other.order})"
            )

    def _coerce(self, other) -> TSeries:
        if isinstance(other, TSeries):
            self._check(other)
            return other
        if isinstance(other, (NCPoly, int, Fraction)):
            return TSeries.constant(other, self.order)
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __add__(self, other) -> TSeries:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TSeries([x + y for x, y in zip(self.coeffs, other.coeffs)], self.order)

    __radd__ = __add__

    def __neg__(self) -> TSeries:
        return TSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other) -> TSeries:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> TSeries:
        return (-self) + other

    def __mul__(self, other) -> TSeries:
        if isinstance(other, (int, Fraction)):
            return TSeries([c.scale(other) for c in self.coeffs], self.order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = self.order
        out = [NCPoly.zero()] * n
        for i, x in enumerate(self.coeffs):
            if x.is_zero():
                continue
            for j in range(n - i):
                y = other.coeffs[j]
                if not y.is_zero():
                    out[i + j] = out[i + j] + x * y
        return TSeries(out, n)

    def __rmul__(self, other) -> TSeries:
        if isinstance(other, (int, Fraction)):
            return self * other
        if isinstance(other, NCPoly):
            return TSeries.constant(other, self.order) * self
        return NotImplemented

    def __str__(self) -> str:
        parts = [f"t^{k}: {c}" for k, c in enumerate(self.coeffs) if not c.is_zero()]
        return "; ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"TSeries({str(self)!r}, order={self.order})"


def tseries_lift(p: NCPoly, exponent_of_a: int, exponent_of_b: int, order: int) -> TSeries:
    """Substitute a -> t^ea a, b -> t^eb b in ``p``, keeping powers of t below ``order``."""
    if order < 1:
        raise ValueError("empty truncation")
    buckets: list[dict[str, Fraction]] = [{} for _ in range(order)]
    for w, c in p.items():
        na = w.count("a")
        k = exponent_of_a * na + exponent_of_b * (len(w) - na)
        if k < order:
            buckets[k][w] = c
    return TSeries([NCPoly._raw(d) for d in buckets], order)


def tseries_inverse(s: TSeries) -> TSeries:
    """Inverse of a series with constant term 1, by the Neumann recursion.

    Writing s = 1 + u with u = O(t), the inverse is sum_j (-u)^j, and the
    sum stops at j = order - 1 because u^order = 0 mod t^order.
    """
    if s[0] != NCPoly.one():
        raise ValueError("not invertible mod t^N")
    u = s - 1
    r = TSeries.constant(1, s.order)
    power = TSeries.constant(1, s.order)
    for _ in range(1, s.order):
        power = power * (-u)
        r = r + power
    return r


def tseries_derivative(s: TSeries) -> TSeries:
    """d/dt, lowering the truncation order by one."""
    if s.order == 1:
        raise ValueError("empty truncation")
    return TSeries([c.scale(k) for k, c in enumerate(s.coeffs) if k > 0], s.order - 1)
