"""Trace onto Q<a,b> modulo its commutator subspace.

In the free algebra the commutator subspace is spanned by differences
``w - rot(w)`` of a word and its rotations, so the quotient has a basis of
rotation classes. A class is represented by its lexicographically least
rotation (a < b), found with Booth's algorithm.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from regdet.freealg import NCPoly, TSeries, tseries_derivative, word_key

__all__ = [
    "CyclicPoly",
    "cyclic_normal_form",
    "cyclic_trace",
    "is_commutator_sum",
    "trace_coefficients",
    "trace_derivative_compat",
    "commutator_decomposition",
]


def least_rotation(s: str) -> int:
    """Start index of the lexicographically least rotation of ``s`` (Booth)."""
    n = len(s)
    if n == 0:
        return 0
    ss = s + s
    fail = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        c = ss[j]
        i = fail[j - k - 1]
        while i != -1 and c != ss[k + i + 1]:
            if c < ss[k + i + 1]:
                k = j - i - 1
            i = fail[i]
        if c != ss[k + i + 1]:
            if c < ss[k]:
                k = j
            fail[j - k] = -1
        else:
            fail[j - k] = i + 1
    return k


def cyclic_normal_form(word: str) -> str:
    k = least_rotation(word)
    return word[k:] + word[:k]


class CyclicPoly:
    """Element of the quotient Q<a,b>/[Q<a,b>, Q<a,b>], keyed by normal forms."""

    __slots__ = ("_classes",)

    def __init__(self, classes: dict[str, Fraction] | None = None):
        acc: dict[str, Fraction] = {}
        for w, c in (classes or {}).items():
            nf = cyclic_normal_form(w)
            acc[nf] = acc.get(nf, Fraction(0)) + Fraction(c)
        self._classes = {w: acc[w] for w in sorted(acc, key=word_key) if acc[w] != 0}

    @property
    def classes(self) -> dict[str, Fraction]:
        return dict(self._classes)

    def items(self) -> Iterator[tuple[str, Fraction]]:
        return iter(self._classes.items())

    def is_zero(self) -> bool:
        return not self._classes

    def __bool__(self) -> bool:
        return bool(self._classes)

    def __len__(self) -> int:
        return len(self._classes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CyclicPoly):
            return NotImplemented
        return self._classes == other._classes

    def __hash__(self) -> int:
        return hash(frozenset(self._classes.items()))

    def __add__(self, other: CyclicPoly) -> CyclicPoly:
        acc = dict(self._classes)
        for w, c in other._classes.items():
            acc[w] = acc.get(w, 0) + c
        return CyclicPoly(acc)

    def __neg__(self) -> CyclicPoly:
        return CyclicPoly({w: -c for w, c in self._classes.items()})

    def __sub__(self, other: CyclicPoly) -> CyclicPoly:
        return self + (-other)

    def scale(self, c) -> CyclicPoly:
        return CyclicPoly({w: Fraction(c) * v for w, v in self._classes.items()})

    def __str__(self) -> str:
        if not self._classes:
            return "0"
        parts = []
        for i, (w, c) in enumerate(self._classes.items()):
            body = f"{abs(c)} [{w}]"
            if i == 0:
                parts.append(f"-{body}" if c < 0 else body)
            else:
                parts.append(f"{'-' if c < 0 else '+'} {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"CyclicPoly({str(self)!r})"


def cyclic_trace(p: NCPoly) -> CyclicPoly:
    acc: dict[str, Fraction] = {}
    for w, c in p.items():
        nf = cyclic_normal_form(w)
        acc[nf] = acc.get(nf, 0) + c
    return CyclicPoly(acc)


def is_commutator_sum(p: NCPoly) -> bool:
    """True iff ``p`` lies in the span of commutators of Q<a,b>."""
    return cyclic_trace(p).is_zero()


def trace_coefficients(s: TSeries) -> list[CyclicPoly]:
    """Apply the trace to each t-coefficient (the identification tr(C[t]) = tr(C)[t])."""
    return [cyclic_trace(c) for c in s.coeffs]


def trace_derivative_compat(s: TSeries) -> bool:
    """Check that d/dt commutes with the coefficient-wise trace on ``s``."""
    if s.order < 2:
        raise ValueError("truncation order must be at least 2")
    lhs = trace_coefficients(tseries_derivative(s))
    traced = trace_coefficients(s)
    rhs = [traced[k].scale(k) for k in range(1, s.order)]
    return lhs == rhs


def commutator_decomposition(p: NCPoly) -> list[tuple[Fraction, str, str]] | None:
    """Write a trace-free ``p`` as sum of c * (u v - v u).

    Returns triples ``(c, u, v)`` or None when ``p`` has nonzero trace.
    Each word ``w = u v`` is moved onto its class representative ``v u``
    by a single commutator ``[u, v] = uv - vu``.
    """
    if not is_commutator_sum(p):
        return None
    out = []
    for w, c in p.items():
        k = least_rotation(w)
        if k:
            out.append((c, w[:k], w[k:]))
    return out
