"""Scalar fields, the deformation parameter and the elementary rational functions.

Two backends share one duck-typed interface.  Values are plain numbers
(``gmpy2.mpq`` or ``mpmath`` complex numbers) and are combined with the usual
operators; a field object only knows how to create, compare, order and
serialize them.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import mpmath
from gmpy2 import mpq


class PoleError(ZeroDivisionError):
    """Two parameters collided in the denominator of a rational function."""


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class RationalField:
    """Exact rationals; equality is literal and nothing is ever rounded."""

    name: str = "exact-rational"
    exact: bool = True

    def __call__(self, x) -> mpq:
        if isinstance(x, str):
            return _parse_rational(x)
        if isinstance(x, float):
            raise TypeError("floats are not admitted into the exact field")
        return mpq(x)

    @property
    def zero(self):
        return mpq(0)

    @property
    def one(self):
        return mpq(1)

    def serialize(self, x) -> str:
        x = mpq(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def sort_key(self, x):
        return x

    def is_close(self, a, b, tol=None) -> bool:
        return a == b


_COMPLEX_RE = re.compile(r"^\(\s*([^,]+?)\s*,\s*([^,]+?)\s*\)(?:@(\d+))?$")


@dataclass(frozen=True)
class ComplexField:
    """Arbitrary-precision complex numbers with a private mpmath context."""

    precision_bits: int = 256
    name: str = "mp-complex"
    exact: bool = False
    ctx: mpmath.ctx_mp.MPContext = dc_field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.precision_bits < 128:
            raise ValueError("mp-complex backend needs at least 128 bits")
        ctx = mpmath.MPContext()
        ctx.prec = self.precision_bits
        object.__setattr__(self, "ctx", ctx)

    def __call__(self, x):
        ctx = self.ctx
        if isinstance(x, str):
            x = x.strip()
            m = _COMPLEX_RE.match(x)
            if m:
                return ctx.mpc(self._real(m.group(1)), self._real(m.group(2)))
            return ctx.mpc(self._real(x))
        if isinstance(x, type(mpq())):
            return ctx.mpc(ctx.mpf(int(x.numerator)) / int(x.denominator))
        return ctx.mpc(x)

    def _real(self, s: str):
        if "/" in s:
            p, r = s.split("/")
            return self.ctx.mpf(int(p)) / int(r)
        return self.ctx.mpf(s)

    @property
    def zero(self):
        return self.ctx.mpc(0)

    @property
    def one(self):
        return self.ctx.mpc(1)

    @property
    def digits(self) -> int:
        return int(self.precision_bits * 0.30103) + 2

    def serialize(self, x) -> str:
        x = self.ctx.mpc(x)
        n = self.digits
        re_s = self.ctx.nstr(x.real, n, min_fixed=-5, max_fixed=5)
        im_s = self.ctx.nstr(x.imag, n, min_fixed=-5, max_fixed=5)
        return f"({re_s},{im_s})@{self.precision_bits}"

    def sort_key(self, x):
        return (x.real, x.imag)

    def is_close(self, a, b, tol) -> bool:
        return abs(a - b) <= tol * max(1, abs(a), abs(b))


QQ = RationalField()


def _parse_rational(s: str) -> mpq:
    s = s.strip()
    if "/" in s:
        p, r = s.split("/")
        if int(r) == 0:
            raise ValueError(f"zero denominator in {s!r}")
        return mpq(int(p), int(r))
    return mpq(s)


def get_field(name: str = "exact-rational", precision_bits: int = 256):
    if name in ("exact-rational", "rational", "QQ"):
        return QQ
    if name in ("mp-complex", "complex", "mp"):
        return ComplexField(precision_bits)
    raise ValueError(f"unknown scalar backend {name!r}")


# ---------------------------------------------------------------------------
# deformation parameter


@dataclass(frozen=True)
class QParam:
    q: object
    q_inv: object
    field: object = QQ

    @classmethod
    def of(cls, q, field=QQ) -> "QParam":
        q = field(q)
        if q == 0:
            raise ValueError("q must be nonzero")
        if q * q == 1:
            raise ValueError("q**2 == 1 makes g vanish identically")
        return cls(q, field.one / q, field)

    def inverse(self) -> "QParam":
        return QParam(self.q_inv, self.q, self.field)

    @property
    def delta(self):
        """q - 1/q, the constant numerator of g."""
        return self.q - self.q_inv


# ---------------------------------------------------------------------------
# elementary functions


def f(q: QParam, u, v):
    if u == v:
        raise PoleError(f"f has a pole at u = v = {u}")
    return (q.q * u - q.q_inv * v) / (u - v)


def g(q: QParam, u, v):
    if u == v:
        raise PoleError(f"g has a pole at u = v = {u}")
    return (q.q - q.q_inv) / (u - v)


def g_l(q: QParam, u, v):
    return u * g(q, u, v)


def g_r(q: QParam, u, v):
    return v * g(q, u, v)


def _double_product(func, q, A: Iterable, B: Iterable):
    B = tuple(B)
    out = q.field.one
    for a in A:
        for b in B:
            out *= func(q, a, b)
    return out


def prod_f(q: QParam, A: Iterable, B: Iterable):
    """Product of f(a, b) over a in A and b in B; 1 if either is empty."""
    return _double_product(f, q, A, B)


def prod_g(q: QParam, A: Iterable, B: Iterable):
    return _double_product(g, q, A, B)


def prod_g_l(q: QParam, A: Iterable, B: Iterable):
    return _double_product(g_l, q, A, B)


def prod_g_r(q: QParam, A: Iterable, B: Iterable):
    return _double_product(g_r, q, A, B)


def pairwise_distinct(values: Sequence) -> bool:
    return all(values[i] != values[j] for i in range(len(values)) for j in range(i))


# ---------------------------------------------------------------------------
# dense linear algebra over either field


def det(rows: Sequence[Sequence], field=QQ):
    """Determinant by Gaussian elimination.

    Exact pivoting (first nonzero entry) on the rational field, partial
    pivoting by modulus on the complex one.
    """
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return field.one
    out = field.one
    for col in range(n):
        if field.exact:
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(a[r][col]))
            if a[piv][col] == 0:
                piv = None
        if piv is None:
            return field.zero
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            out = -out
        p = a[col][col]
        out *= p
        for r in range(col + 1, n):
            if a[r][col] != 0:
                factor = a[r][col] / p
                row, prow = a[r], a[col]
                for c in range(col, n):
                    row[c] -= factor * prow[c]
    return out


def minor(rows: Sequence[Sequence], i: int, j: int):
    return [[x for c, x in enumerate(r) if c != j] for k, r in enumerate(rows) if k != i]


def solve(rows: Sequence[Sequence], rhs: Sequence, field):
    """Solve a square linear system (used by the Newton iteration)."""
    ctx = getattr(field, "ctx", None)
    if ctx is not None:
        return list(ctx.lu_solve(ctx.matrix([list(r) for r in rows]), ctx.matrix(list(rhs))))
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col] / a[col][col]
                for c in range(col, n + 1):
                    a[r][c] -= factor * a[col][c]
    return [a[i][n] / a[i][i] for i in range(n)]


__all__ = [
    "PoleError", "RationalField", "ComplexField", "QQ", "get_field", "QParam",
    "f", "g", "g_l", "g_r", "prod_f", "prod_g", "prod_g_l", "prod_g_r",
    "pairwise_distinct", "det", "minor", "solve",
]
