"""Finite-dimensional realization: complex matrices standing in for trace-class operators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The dense kernels
(LU determinant, Faddeev-LeVerrier, Taylor scaling-and-squaring, Hessenberg QR,
cyclic Jacobi) are written out here so that each determinant route is
self-contained; numpy/scipy only serve as oracles in the tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from regdet.freealg import NCPoly

__all__ = [
    "ConvergenceError",
    "DomainError",
    "DetmReport",
    "as_matrix",
    "lu_determinant",
    "fredholm_series",
    "charpoly_traces",
    "matrix_exponential",
    "eigenvalues_qr",
    "singular_values",
    "schatten_norm",
    "detm_regularized",
    "detm_spectral",
    "detm_logseries",
    "detm_log_exponent",
    "detm_regularized_mp",
    "detm_report",
    "evaluate_ncpoly",
    "product_formula_residual",
    "trace_identity_check",
    "random_test_matrix",
    "load_matrix",
    "dump_matrix",
    "relative_difference",
]

EPS_DENOM = 1e-300


class ConvergenceError(ArithmeticError):
    """An iterative kernel hit its iteration cap."""


class DomainError(ValueError):
    """Input lies outside the region where a method is valid."""


def as_matrix(M) -> np.ndarray:
    M = np.array(M, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def relative_difference(x: complex, y: complex) -> float:
    return abs(x - y) / max(abs(x), abs(y), EPS_DENOM)


def lu_determinant(M) -> complex:
    """Determinant by Gaussian elimination with partial pivoting."""
    U = as_matrix(M).copy()
    n = U.shape[0]
    det = complex(1.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(U[k:, k])))
        if U[p, k] == 0:
            return complex(0.0)
        if p != k:
            U[[k, p]] = U[[p, k]]
            det = -det
        det *= U[k, k]
        if k + 1 < n:
            factors = U[k + 1 :, k] / U[k, k]
            U[k + 1 :, k:] -= np.outer(factors, U[k, k:])
    return complex(det)


def charpoly_traces(M) -> list[complex]:
    """Tr(Lambda^k M) for k = 0..n via the Faddeev-LeVerrier recursion.

    With det(xI - M) = sum_k c_k x^(n-k) one has c_k = (-1)^k Tr(Lambda^k M),
    and c_k = -Tr(M N_k) / k where N_1 = I, N_(k+1) = M N_k + c_k I.
    """
    M = as_matrix(M)
    n = M.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    c = [complex(1.0)]
    N = eye.copy()
    for k in range(1, n + 1):
        MN = M @ N
        ck = -np.trace(MN) / k
        c.append(complex(ck))
        N = MN + ck * eye
    return [(-1) ** k * ck for k, ck in enumerate(c)]


def fredholm_series(M) -> complex:
    """det(I + M) as the finite sum of Tr(Lambda^k M)."""
    return complex(sum(charpoly_traces(M)))


def _norm1(M: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(M), axis=0))) if M.size else 0.0


def matrix_exponential(M) -> np.ndarray:
    """exp(M) by scaling and squaring around a truncated Taylor series."""
    M = as_matrix(M)
    n = M.shape[0]
    norm = _norm1(M)
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    X = M / (2.0**s)
    eye = np.eye(n, dtype=np.complex128)
    result = eye.copy()
    term = eye.copy()
    # ||X|| <= 0.5: 0.5^k / k! < 1e-18 by k = 18
    for k in range(1, 30):
        term = term @ X / k
        result = result + term
        if _norm1(term) <= 1e-18 * _norm1(result):
            break
    for _ in range(s):
        result = result @ result
    return result


def _hessenberg(M: np.ndarray) -> np.ndarray:
    H = M.copy()
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k].copy()
        nx = np.linalg.norm(x)
        if nx == 0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * nx
        v /= np.linalg.norm(v)
        H[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ H[k + 1 :, :])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v.conj())
        H[k + 2 :, k] = 0.0
    return H


def _wilkinson_shift(a: complex, b: complex, c: complex, d: complex) -> complex:
    half = (a - d) / 2
    disc = np.sqrt(half * half + b * c)
    mu1 = (a + d) / 2 + disc
    mu2 = (a + d) / 2 - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _qr_step(Hs: np.ndarray, mu: complex) -> np.ndarray:
    """One explicit shifted QR step on an upper Hessenberg block."""
    p = Hs.shape[0]
    A = Hs - mu * np.eye(p, dtype=np.complex128)
    rots = []
    for k in range(p - 1):
        x, y = A[k, k], A[k + 1, k]
        r = math.hypot(abs(x), abs(y))
        if r == 0:
            G = np.eye(2, dtype=np.complex128)
        else:
            c, s = x / r, y / r
            G = np.array([[c.conjugate(), s.conjugate()], [-s, c]])
        A[k : k + 2, k:] = G @ A[k : k + 2, k:]
        A[k + 1, k] = 0.0
        rots.append(G)
    for k, G in enumerate(rots):
        A[: k + 2, k : k + 2] = A[: k + 2, k : k + 2] @ G.conj().T
    return A + mu * np.eye(p, dtype=np.complex128)


def eigenvalues_qr(M) -> np.ndarray:
    """Eigenvalues by Hessenberg reduction and Wilkinson-shifted complex QR.

    Sorted by decreasing modulus; order among equal moduli is unspecified.
    """
    M = as_matrix(M)
    n = M.shape[0]
    H = _hessenberg(M)
    scale = float(np.linalg.norm(M))
    tol = 1e-14 * scale
    cap = 30 * n * n
    total = 0
    since_deflation = 0
    hi = n - 1
    while hi > 0:
        lo = hi
        while lo > 0:
            h = abs(H[lo, lo - 1])
            if h <= 1e-14 * (abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])) or h <= tol:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            since_deflation = 0
            continue
        if total >= cap:
            raise ConvergenceError("QR failed to converge")
        blk = H[lo : hi + 1, lo : hi + 1]
        if since_deflation and since_deflation % 10 == 0:
            # exceptional shift breaks cycles
            mu = blk[-1, -1] + abs(blk[-1, -2]) * (1 + 0.75j)
        else:
            mu = _wilkinson_shift(blk[-2, -2], blk[-2, -1], blk[-1, -2], blk[-1, -1])
        H[lo : hi + 1, lo : hi + 1] = _qr_step(blk, mu)
        total += 1
        since_deflation += 1
    ev = np.diag(H).copy()
    return ev[np.argsort(-np.abs(ev), kind="stable")]


def _hermitian_jacobi(Hm: np.ndarray, max_sweeps: int = 100) -> np.ndarray:
    H = Hm.copy()
    n = H.shape[0]
    ref = float(np.linalg.norm(H))
    mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(H[mask]))
        if off <= 1e-15 * ref or off == 0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = H[p, q]
                r = abs(hpq)
                if r == 0:
                    continue
                phase = hpq / r
                alpha, gamma = H[p, p].real, H[q, q].real
                theta = 0.5 * math.atan2(2 * r, gamma - alpha)
                c, s = math.cos(theta), math.sin(theta)
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                U = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                H[:, [p, q]] = H[:, [p, q]] @ U
                H[[p, q], :] = U.conj().T @ H[[p, q], :]
                H[p, q] = H[q, p] = 0.0
    else:
        raise ConvergenceError("Jacobi sweeps did not converge")
    return np.diag(H).real


def singular_values(M) -> np.ndarray:
    """Square roots of the eigenvalues of M^* M (cyclic Jacobi), descending."""
    M = as_matrix(M)
    lam = _hermitian_jacobi(M.conj().T @ M)
    return np.sort(np.sqrt(np.clip(lam, 0.0, None)))[::-1]


def schatten_norm(M, p: float) -> float:
    if not p >= 1:
        raise ValueError("Schatten norm needs p >= 1")
    sv = singular_values(M)
    if math.isinf(p):
        return float(sv[0])
    return float(np.sum(sv**p) ** (1.0 / p))


def _regularizer_exponent(A: np.ndarray, m: int) -> np.ndarray:
    # sum_{j=1}^{m-1} (-A)^j / j
    n = A.shape[0]
    S = np.zeros((n, n), dtype=np.complex128)
    P = np.eye(n, dtype=np.complex128)
    for j in range(1, m):
        P = P @ (-A)
        S = S + P / j
    return S


def detm_regularized(A, m: int) -> complex:
    """det((I + A) exp(sum_{j<m} (-A)^j / j))."""
    if m < 1:
        raise ValueError("m must be >= 1")
    A = as_matrix(A)
    n = A.shape[0]
    I = np.eye(n, dtype=np.complex128)
    if m == 1:
        return lu_determinant(I + A)
    return lu_determinant((I + A) @ matrix_exponential(_regularizer_exponent(A, m)))


def _spectral_factor(lam: complex, m: int) -> complex:
    s = sum((-lam) ** j / j for j in range(1, m))
    return (1 + lam) * complex(np.exp(s))


def detm_spectral(A, m: int) -> complex:
    """Product over eigenvalues of (1 + lam) exp(sum_{j<m} (-lam)^j / j)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    out = complex(1.0)
    for lam in eigenvalues_qr(A):
        if lam != 0:
            out *= _spectral_factor(complex(lam), m)
    return out


def _log_series_terms(A: np.ndarray, m: int, tol: float) -> tuple[complex, int]:
    op = schatten_norm(A, math.inf)
    if op >= 1:
        raise DomainError("log-series requires norm < 1")
    n = A.shape[0]
    Am = np.linalg.matrix_power(A, m)
    am1 = schatten_norm(Am, 1)
    negA = -A
    P = np.eye(n, dtype=np.complex128)
    for _ in range(m - 1):
        P = P @ negA
    total = complex(0.0)
    j = m
    while True:
        P = P @ negA
        total += complex(np.trace(P)) / j
        # |sum_{i>j} Tr(-A)^i / i| <= ||A^m||_1 ||A||^(j+1-m) / ((j+1)(1-||A||))
        bound = am1 * op ** (j + 1 - m) / ((j + 1) * (1 - op))
        if bound < tol:
            return -total, j
        j += 1
        if j > 100_000:
            raise ConvergenceError("log-series did not reach tolerance")


def detm_log_exponent(A, m: int, tol: float = 1e-15) -> complex:
    """The exponent -sum_{j>=m} Tr(-A)^j / j, so that det_m(I + A) = exp of it."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return _log_series_terms(as_matrix(A), m, tol)[0]


def detm_logseries(A, m: int, tol: float = 1e-15) -> complex:
    return complex(np.exp(detm_log_exponent(A, m, tol)))


def detm_regularized_mp(A, m: int, dps: int = 50):
    """Regularized-operator route in mpmath at ``dps`` digits; returns an ``mpc``."""
    import mpmath

    A = as_matrix(A)
    n = A.shape[0]
    with mpmath.workdps(dps):
        Am = mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in A])
        I = mpmath.eye(n)
        S = mpmath.zeros(n, n)
        P = mpmath.eye(n)
        for j in range(1, m):
            P = P * (-Am)
            S = S + P / j
        R = (I + Am) * mpmath.expm(S) if m > 1 else I + Am
        return +mpmath.det(R)


@dataclass
class DetmReport:
    m: int
    values: dict[str, complex] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)

    @property
    def cross_path_spread(self) -> float:
        vals = list(self.values.values())
        return max((relative_difference(x, y) for x, y in combinations(vals, 2)), default=0.0)

    def to_dict(self) -> dict:
        out: dict = {"m": self.m}
        for name in ("regularized", "spectral", "logseries"):
            if name in self.values:
                z = self.values[name]
                out[f"value_{name}"] = [z.real, z.imag]
        out["cross_path_spread"] = self.cross_path_spread
        if self.errors:
            out["errors"] = dict(self.errors)
        return out


def detm_report(A, m: int, methods: Sequence[str] = ("regularized", "spectral", "logseries"),
                tol: float = 1e-15) -> DetmReport:
    """Evaluate the requested routes; a failing route is recorded, not raised."""
    rep = DetmReport(m)
    routes = {
        "regularized": lambda: detm_regularized(A, m),
        "spectral": lambda: detm_spectral(A, m),
        "logseries": lambda: detm_logseries(A, m, tol),
    }
    for name in methods:
        try:
            rep.values[name] = routes[name]()
        except (DomainError, ConvergenceError) as exc:
            rep.errors[name] = str(exc)
    return rep


def evaluate_ncpoly(p: NCPoly, A, B) -> np.ndarray:
    """Insert A for a and B for b."""
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch {A.shape} vs {B.shape}")
    n = A.shape[0]
    letter = {"a": A, "b": B}
    cache: dict[str, np.ndarray] = {"": np.eye(n, dtype=np.complex128)}

    def word_matrix(w: str) -> np.ndarray:
        if w not in cache:
            cache[w] = word_matrix(w[:-1]) @ letter[w[-1]]
        return cache[w]

    out = np.zeros((n, n), dtype=np.complex128)
    for w, c in p.items():
        out += float(c) * word_matrix(w)
    return out


def product_formula_residual(A, B, m: int) -> float:
    """Relative gap between det_m((I+A)(I+B)) and det_m(I+A) det_m(I+B) exp Tr X_m(A,B)."""
    from regdet.formulas import build_X_m

    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch {A.shape} vs {B.shape}")
    lhs = detm_regularized(A + B + A @ B, m)
    x = np.trace(evaluate_ncpoly(build_X_m(m), A, B))
    rhs = detm_regularized(A, m) * detm_regularized(B, m) * complex(np.exp(x))
    return relative_difference(lhs, rhs)


def trace_identity_check(A, B, m: int) -> float:
    """|Tr X_m(A,B) - Tr Xtilde_m(A,B)|."""
    from regdet.formulas import build_X_m, build_Xtilde_m

    tx = np.trace(evaluate_ncpoly(build_X_m(m), A, B))
    txt = np.trace(evaluate_ncpoly(build_Xtilde_m(m), A, B))
    return float(abs(tx - txt))


def random_test_matrix(n: int, target_norm: float, seed: int | Sequence[int]) -> np.ndarray:
    """Seeded complex matrix with operator norm ``target_norm``.

    Entries have real and imaginary parts uniform on [-1, 1), drawn from
    ``numpy.random.default_rng(seed)`` (PCG64), real parts first. ``seed`` may
    also be a sequence of ints, as accepted by ``numpy.random.SeedSequence``.
    """
    if n < 1 or not target_norm > 0:
        raise ValueError("need n >= 1 and target_norm > 0")
    rng = np.random.default_rng(seed)
    re = rng.uniform(-1.0, 1.0, size=(n, n))
    im = rng.uniform(-1.0, 1.0, size=(n, n))
    M = re + 1j * im
    return M * (target_norm / schatten_norm(M, math.inf))


def load_matrix(text: str) -> np.ndarray:
    """Parse ``{"dim": n, "data": [[re, im], ...]}`` with n*n row-major pairs."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if not isinstance(obj, dict) or set(obj) != {"dim", "data"}:
        raise ValueError('matrix JSON must have exactly the keys "dim" and "data"')
    n, data = obj["dim"], obj["data"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError("dim must be a positive integer")
    if not isinstance(data, list) or len(data) != n * n:
        raise ValueError(f"data must hold {n * n} entries")
    vals = []
    for e in data:
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)
        ):
            raise ValueError(f"entry {e!r} is not a [re, im] pair")
        vals.append(complex(e[0], e[1]))
    return as_matrix(np.array(vals).reshape(n, n))


def dump_matrix(M) -> str:
    M = as_matrix(M)
    data = [[float(z.real), float(z.imag)] for z in M.ravel()]
    return json.dumps({"dim": M.shape[0], "data": data})
