"""The correction polynomials of the determinant product formula and their identities.

Everything here is exact. The main objects, for a fixed order ``m``:

* ``y(A, j)``: ordered product over k = 1..j of ``ab`` (k in A) or ``a + b``;
* ``X_m``: sum over j < m of (-1)^j/j times the ``y(A, j)`` with j + |A| >= m;
* ``Xtilde_m``: sum over j < m of (-1)^j/j ((a+b+ab)^j - a^j - b^j);
* ``Z_m = Xtilde_m - X_m``, which is a sum of commutators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterator

from regdet.cyclic import cyclic_trace, is_commutator_sum, trace_coefficients
from regdet.freealg import (
    NCPoly,
    TSeries,
    bigraded_component,
    degree_window,
    poly_pow,
    tseries_derivative,
    tseries_inverse,
    tseries_lift,
)

A = NCPoly.gen("a")
B = NCPoly.gen("b")
AB = A * B
A_PLUS_B = A + B


class ConsistencyError(RuntimeError):
    """Two independent constructions of the same polynomial disagree."""


@dataclass(frozen=True)
class SubsetMask:
    j: int
    members: frozenset[int]

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("j must be >= 1")
        if not all(1 <= k <= self.j for k in self.members):
            raise ValueError(f"members {sorted(self.members)} not inside 1..{self.j}")

    @classmethod
    def from_bits(cls, j: int, bits: int) -> SubsetMask:
        return cls(j, frozenset(k + 1 for k in range(j) if bits >> k & 1))


@dataclass(frozen=True)
class TriPartition:
    j: int
    pi1: frozenset[int]
    pi2: frozenset[int]
    pi3: frozenset[int]

    def __post_init__(self):
        parts = (self.pi1, self.pi2, self.pi3)
        if sum(map(len, parts)) != self.j or frozenset().union(*parts) != frozenset(
            range(1, self.j + 1)
        ):
            raise ValueError("not a partition of 1..j into three blocks")

    @property
    def bidegree(self) -> tuple[int, int]:
        return len(self.pi1) + len(self.pi3), len(self.pi2) + len(self.pi3)


def subsets(j: int) -> Iterator[SubsetMask]:
    for bits in range(1 << j):
        yield SubsetMask.from_bits(j, bits)


def tripartitions(j: int) -> Iterator[TriPartition]:
    """All 3^j ordered partitions, in base-3 counter order."""
    for digits in itertools.product(range(3), repeat=j):
        blocks: tuple[list[int], list[int], list[int]] = ([], [], [])
        for k, d in enumerate(digits, start=1):
            blocks[d].append(k)
        yield TriPartition(j, *(frozenset(x) for x in blocks))


class UniPoly:
    """Polynomial in one commuting variable with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, Fraction | int]):
        self.coeffs = {k: Fraction(c) for k, c in sorted(coeffs.items()) if c != 0}

    def derivative(self) -> UniPoly:
        return UniPoly({k - 1: k * c for k, c in self.coeffs.items() if k > 0})

    def truncate(self, n: int) -> UniPoly:
        """Reduce mod x^n."""
        return UniPoly({k: c for k, c in self.coeffs.items() if k < n})

    def __call__(self, x):
        # Horner; x may be a number, an NCPoly or a TSeries
        if not self.coeffs:
            return 0 * x
        top = max(self.coeffs)
        r = self.coeffs.get(top, 0) + 0 * x
        for k in range(top - 1, -1, -1):
            r = r * x + self.coeffs.get(k, Fraction(0))
        return r

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __neg__(self) -> UniPoly:
        return UniPoly({k: -c for k, c in self.coeffs.items()})

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c} x^{k}" for k, c in self.coeffs.items())

    def __repr__(self) -> str:
        return f"UniPoly({self.coeffs!r})"


def build_y_subset(mask: SubsetMask) -> NCPoly:
    r = NCPoly.one()
    for k in range(1, mask.j + 1):
        r = r * (AB if k in mask.members else A_PLUS_B)
    return r


@lru_cache(maxsize=None)
def _y(j: int, bits: int) -> NCPoly:
    return build_y_subset(SubsetMask.from_bits(j, bits))


def _sign_over(j: int) -> Fraction:
    return Fraction((-1) ** j, j)


def verify_binomial_expansion(j: int) -> bool:
    if j < 1:
        raise ValueError("j must be >= 1")
    lhs = poly_pow(A + B + AB, j)
    rhs = NCPoly.zero()
    for bits in range(1 << j):
        rhs = rhs + _y(j, bits)
    return lhs == rhs


def binomial_term_counts(j: int) -> dict[str, int]:
    """Term counts for the subset expansion; ``with_multiplicity`` must be 3^j."""
    return {
        "power": len(poly_pow(A + B + AB, j)),
        "with_multiplicity": sum(len(_y(j, bits)) for bits in range(1 << j)),
    }


@lru_cache(maxsize=None)
def build_X_m(m: int) -> NCPoly:
    if m < 1:
        raise ValueError("m must be >= 1")
    r = NCPoly.zero()
    for j in range(1, m):
        inner = NCPoly.zero()
        for bits in range(1 << j):
            if j + bin(bits).count("1") >= m:
                inner = inner + _y(j, bits)
        r = r + inner.scale(_sign_over(j))
    return r


@lru_cache(maxsize=None)
def build_Xtilde_m(m: int) -> NCPoly:
    if m < 1:
        raise ValueError("m must be >= 1")
    r = NCPoly.zero()
    power = NCPoly.one()
    base = A + B + AB
    for j in range(1, m):
        power = power * base
        r = r + (power - poly_pow(A, j) - poly_pow(B, j)).scale(_sign_over(j))
    return r


@lru_cache(maxsize=None)
def build_Z_m(m: int) -> NCPoly:
    """Xtilde_m - X_m, cross-checked against the low-order subset sum."""
    z = build_Xtilde_m(m) - build_X_m(m)
    alt = NCPoly.zero()
    for j in range(1, m):
        inner = -poly_pow(A, j) - poly_pow(B, j)
        for bits in range(1 << j):
            if j + bin(bits).count("1") < m:
                inner = inner + _y(j, bits)
        alt = alt + inner.scale(_sign_over(j))
    if z != alt:
        raise ConsistencyError(f"two constructions of Z_{m} disagree")
    return z


def build_f_poly(m: int) -> UniPoly:
    """f(x) = sum_{j=1}^{m-1} (-1)^j x^j / j, a truncated log(1 + x)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return UniPoly({j: _sign_over(j) for j in range(1, m)})


def f_derivative_identity(m: int) -> bool:
    """f'(x) == -sum_{j=0}^{m-2} (-x)^j mod x^(m-1)."""
    lhs = build_f_poly(m).derivative().truncate(m - 1)
    rhs = UniPoly({j: -((-1) ** j) for j in range(m - 1)})
    return lhs == rhs


def _derivative_expression(m: int) -> tuple[TSeries, TSeries]:
    """f'(T)(a+b+2tab) - f'(ta)a - f'(tb)b mod t^(m-1), T = ta + tb + t^2 ab.

    Returns the expression built by direct substitution into f' and the one
    built from the inverse forms -(1+tb)^-1 (1+ta)^-1, -(1+ta)^-1, -(1+tb)^-1.
    """
    n = m - 1
    ta = TSeries.monomial(A, 1, n)
    tb = TSeries.monomial(B, 1, n)
    tab = TSeries.monomial(AB, 2, n)
    big = ta + tb + tab
    dbig = TSeries.constant(A_PLUS_B, n) + TSeries.monomial(AB, 1, n) * 2
    fp = build_f_poly(m).derivative()

    direct = fp(big) * dbig - fp(ta) * A - fp(tb) * B

    inv_a = tseries_inverse(1 + ta)
    inv_b = tseries_inverse(1 + tb)
    # a + b + 2tab = (1+ta) b + a (1+tb)
    if dbig != (1 + ta) * B + A * (1 + tb):
        raise ConsistencyError("a + b + 2tab factorization failed")
    via_inverse = -(inv_b * inv_a) * dbig + inv_a * A + inv_b * B
    return direct, via_inverse


def verify_tXtilde_derivative(m: int) -> bool:
    """Replay the algebraic proof that tr Xtilde_m(ta, tb) = O(t^m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    # tr Xtilde_m(ta, tb) vanishes below t^m
    lifted = tseries_lift(build_Xtilde_m(m), 1, 1, m)
    if any(not c.is_zero() for c in trace_coefficients(lifted)):
        return False
    if m <= 1:
        return True
    if not f_derivative_identity(m):
        return False
    direct, via_inverse = _derivative_expression(m)
    if direct != via_inverse:
        return False
    # d/dt of the trace equals the trace of the assembled expression
    dtrace = trace_coefficients(tseries_derivative(lifted))
    if dtrace != trace_coefficients(direct):
        return False
    return all(c.is_zero() for c in trace_coefficients(via_inverse))


def build_z_partition(pi: TriPartition) -> NCPoly:
    letters = []
    for k in range(1, pi.j + 1):
        letters.append("a" if k in pi.pi1 else "b" if k in pi.pi2 else "ab")
    return NCPoly.word("".join(letters))


@lru_cache(maxsize=None)
def build_z_bigraded(k1: int, k2: int) -> NCPoly:
    if k1 < 0 or k2 < 0:
        raise ValueError("negative bidegree")
    acc: dict[str, Fraction] = {}
    for j in range(1, k1 + k2 + 1):
        c = _sign_over(j)
        for pi in tripartitions(j):
            if pi.bidegree == (k1, k2):
                w = next(iter(build_z_partition(pi).terms))
                acc[w] = acc.get(w, 0) + c
    return NCPoly(acc)


def verify_bigraded_decomposition(m: int) -> bool:
    if m < 1:
        raise ValueError("m must be >= 1")
    total = NCPoly.zero()
    for k1 in range(1, m):
        for k2 in range(1, m - k1):
            block = build_z_bigraded(k1, k2)
            if not is_commutator_sum(block):
                return False
            total = total + block
    return total == build_Z_m(m)


def bigraded_blocks(m: int) -> list[tuple[int, int]]:
    return [(k1, k2) for k1 in range(1, m) for k2 in range(1, m - k1)]


@dataclass
class VerificationRecord:
    identity: str
    parameters: dict[str, Any]
    passed: bool
    term_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "identity": self.identity,
            "parameters": self.parameters,
            "pass": self.passed,
            "term_counts": self.term_counts,
        }


def degree_window_ok(m: int) -> bool:
    x = build_X_m(m)
    if m == 1:
        return x.is_zero()
    lo, hi = degree_window(x)
    return lo >= m and hi <= 2 * m - 2


def symbolic_records(max_m: int) -> Iterator[VerificationRecord]:
    """Every exact identity for indices up to ``max_m``."""
    if max_m < 1:
        raise ValueError("max_m must be >= 1")
    for j in range(1, max_m + 1):
        yield VerificationRecord(
            "binomial_expansion", {"j": j}, verify_binomial_expansion(j), binomial_term_counts(j)
        )
    for m in range(1, max_m + 1):
        z = build_Z_m(m)
        yield VerificationRecord(
            "Z_m_trace_vanishes",
            {"m": m},
            cyclic_trace(z).is_zero(),
            {"Z_m": len(z), "Xtilde_m": len(build_Xtilde_m(m))},
        )
    for m in range(1, max_m + 1):
        yield VerificationRecord(
            "X_m_degree_window", {"m": m}, degree_window_ok(m), {"X_m": len(build_X_m(m))}
        )
    for m in range(1, max_m + 1):
        yield VerificationRecord(
            "Xtilde_m_trace_derivative", {"m": m}, verify_tXtilde_derivative(m)
        )
    for m in range(1, max_m + 1):
        yield VerificationRecord(
            "bigraded_decomposition",
            {"m": m},
            verify_bigraded_decomposition(m),
            {"blocks": len(bigraded_blocks(m))},
        )


__all__ = [
    "ConsistencyError",
    "SubsetMask",
    "TriPartition",
    "UniPoly",
    "VerificationRecord",
    "bigraded_blocks",
    "bigraded_component",
    "binomial_term_counts",
    "build_X_m",
    "build_Xtilde_m",
    "build_Z_m",
    "build_f_poly",
    "build_y_subset",
    "build_z_bigraded",
    "build_z_partition",
    "degree_window_ok",
    "f_derivative_identity",
    "subsets",
    "symbolic_records",
    "tripartitions",
    "verify_bigraded_decomposition",
    "verify_binomial_expansion",
    "verify_tXtilde_derivative",
]
