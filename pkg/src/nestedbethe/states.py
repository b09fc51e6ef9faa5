"""Vectors and operators on the chain space (C^m)^{⊗L}.

Basis states are words (c_1, ..., c_L) with letters 1..m; the flat index puts
site 1 in the most significant digit, so the space of a composite chain is
the Kronecker product of its parts in site order.  Both vectors and operators
are stored sparsely as dicts because Bethe vectors live in a single weight
sector and the monodromy entries have a handful of entries per column.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping


def word_to_index(word: Iterable[int], m: int) -> int:
    idx = 0
    for c in word:
        if not 1 <= c <= m:
            raise ValueError(f"letter {c} outside 1..{m}")
        idx = idx * m + (c - 1)
    return idx


def index_to_word(idx: int, m: int, L: int) -> tuple[int, ...]:
    letters = []
    for _ in range(L):
        idx, c = divmod(idx, m)
        letters.append(c + 1)
    return tuple(reversed(letters))


def content(idx: int, m: int, L: int) -> tuple[int, ...]:
    """Occurrence count of each letter 1..m in a basis word."""
    counts = [0] * m
    for c in index_to_word(idx, m, L):
        counts[c - 1] += 1
    return tuple(counts)


def coloring(idx: int, m: int, L: int) -> tuple[int, ...]:
    """Quasiparticle numbers r_1..r_{m-1}: color k counts the letters above k."""
    counts = content(idx, m, L)
    return tuple(sum(counts[k:]) for k in range(1, m))


class State:
    """Sparse vector; the same class serves kets and bras."""

    __slots__ = ("m", "L", "data")

    def __init__(self, m: int, L: int, data: Mapping[int, object] | None = None):
        self.m = m
        self.L = L
        self.data = {k: v for k, v in (data or {}).items() if v != 0}

    @property
    def dim(self) -> int:
        return self.m ** self.L

    @classmethod
    def basis(cls, m: int, L: int, word, one=1) -> "State":
        return cls(m, L, {word_to_index(word, m): one})

    @classmethod
    def vacuum(cls, m: int, L: int, one=1) -> "State":
        return cls(m, L, {0: one})

    def _compatible(self, other: "State"):
        if (self.m, self.L) != (other.m, other.L):
            raise ValueError("states live on different spaces")

    def __add__(self, other: "State") -> "State":
        self._compatible(other)
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out[k] + v if k in out else v
        return State(self.m, self.L, out)

    def __sub__(self, other: "State") -> "State":
        return self + (-other)

    def __neg__(self) -> "State":
        return State(self.m, self.L, {k: -v for k, v in self.data.items()})

    def __mul__(self, c) -> "State":
        if c == 0:
            return State(self.m, self.L)
        return State(self.m, self.L, {k: c * v for k, v in self.data.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return (self.m, self.L) == (other.m, other.L) and self.data == other.data

    def __repr__(self) -> str:
        terms = ", ".join(f"{index_to_word(k, self.m, self.L)}: {v}" for k, v in sorted(self.data.items()))
        return f"State(m={self.m}, L={self.L}, {{{terms}}})"

    def is_zero(self) -> bool:
        return not self.data

    def __getitem__(self, word) -> object:
        return self.data.get(word_to_index(word, self.m), 0)

    def dot(self, other: "State"):
        """Bilinear pairing <self|other> (no conjugation)."""
        self._compatible(other)
        small, big = (self.data, other.data) if len(self.data) < len(other.data) else (other.data, self.data)
        total = 0
        for k, v in small.items():
            w = big.get(k)
            if w is not None:
                total += v * w
        return total

    def vdot(self, other: "State"):
        """Hermitian pairing, conjugating self."""
        self._compatible(other)
        total = 0
        for k, v in self.data.items():
            w = other.data.get(k)
            if w is not None:
                total += v.conjugate() * w
        return total

    def norm(self):
        return abs(self.vdot(self)) ** 0.5 if self.data else 0

    def kron(self, other: "State") -> "State":
        """Tensor product with self on the leading sites."""
        if self.m != other.m:
            raise ValueError("rank mismatch")
        shift = other.m ** other.L
        data = {a * shift + b: x * y for a, x in self.data.items() for b, y in other.data.items()}
        return State(self.m, self.L + other.L, data)

    def colorings(self) -> set[tuple[int, ...]]:
        return {coloring(k, self.m, self.L) for k in self.data}

    def apply_local(self, site: int, entries: Mapping[tuple[int, int], object]) -> "State":
        """Apply a one-site matrix {(row, col): coef} (letters 1..m) at ``site`` (1-based)."""
        stride = self.m ** (self.L - site)
        by_col = defaultdict(list)
        for (r, c), coef in entries.items():
            by_col[c].append((r, coef))
        out: dict[int, object] = {}
        for idx, val in self.data.items():
            letter = (idx // stride) % self.m + 1
            for r, coef in by_col.get(letter, ()):
                k = idx + (r - letter) * stride
                x = coef * val
                out[k] = out[k] + x if k in out else x
        return State(self.m, self.L, out)


class LinOp:
    """Sparse square matrix, rows -> {col: value}."""

    __slots__ = ("dim", "rows")

    def __init__(self, dim: int, rows: Mapping[int, Mapping[int, object]] | None = None):
        self.dim = dim
        self.rows = {}
        for r, cols in (rows or {}).items():
            kept = {c: v for c, v in cols.items() if v != 0}
            if kept:
                self.rows[r] = kept

    @classmethod
    def from_columns(cls, dim: int, columns: Mapping[int, State]) -> "LinOp":
        rows: dict[int, dict[int, object]] = defaultdict(dict)
        for c, vec in columns.items():
            for r, v in vec.data.items():
                rows[r][c] = v
        return cls(dim, rows)

    @classmethod
    def identity(cls, dim: int, one=1) -> "LinOp":
        return cls(dim, {i: {i: one} for i in range(dim)})

    def entries(self):
        for r, cols in self.rows.items():
            for c, v in cols.items():
                yield r, c, v

    def __getitem__(self, rc):
        r, c = rc
        return self.rows.get(r, {}).get(c, 0)

    def __add__(self, other: "LinOp") -> "LinOp":
        out = {r: dict(cols) for r, cols in self.rows.items()}
        for r, c, v in other.entries():
            row = out.setdefault(r, {})
            row[c] = row[c] + v if c in row else v
        return LinOp(self.dim, out)

    def __neg__(self) -> "LinOp":
        return LinOp(self.dim, {r: {c: -v for c, v in cols.items()} for r, cols in self.rows.items()})

    def __sub__(self, other: "LinOp") -> "LinOp":
        return self + (-other)

    def __mul__(self, c) -> "LinOp":
        return LinOp(self.dim, {r: {k: c * v for k, v in cols.items()} for r, cols in self.rows.items()})

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, State):
            out: dict[int, object] = {}
            for r, cols in self.rows.items():
                acc = 0
                for c, v in cols.items():
                    w = other.data.get(c)
                    if w is not None:
                        acc += v * w
                out[r] = acc
            return State(other.m, other.L, out)
        out_rows: dict[int, dict[int, object]] = {}
        for r, cols in self.rows.items():
            acc: dict[int, object] = {}
            for k, a in cols.items():
                brow = other.rows.get(k)
                if not brow:
                    continue
                for c, b in brow.items():
                    x = a * b
                    acc[c] = acc[c] + x if c in acc else x
            out_rows[r] = acc
        return LinOp(self.dim, out_rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinOp):
            return NotImplemented
        return self.dim == other.dim and self.rows == other.rows

    def is_zero(self) -> bool:
        return not self.rows

    def transpose(self) -> "LinOp":
        rows: dict[int, dict[int, object]] = defaultdict(dict)
        for r, c, v in self.entries():
            rows[c][r] = v
        return LinOp(self.dim, rows)

    def max_abs(self):
        return max((abs(v) for _, _, v in self.entries()), default=0)
