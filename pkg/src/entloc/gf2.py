"""Dense bit-packed linear algebra over GF(2).

Rows are packed little-endian into 64-bit words: entry ``(r, c)`` is bit
``c % 64`` of word ``c // 64`` in row ``r``.  Elimination runs on Python
integers built from those words, so a row XOR is a single big-int XOR.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ContractError

WORD = 64


def _nwords(nbits: int) -> int:
    return (nbits + WORD - 1) // WORD


def _pack(value: int, nbits: int) -> np.ndarray:
    words = np.zeros(_nwords(nbits), dtype=np.uint64)
    for w in range(words.size):
        words[w] = (value >> (WORD * w)) & 0xFFFF_FFFF_FFFF_FFFF
    return words


def _unpack(words: np.ndarray) -> int:
    value = 0
    for w in range(words.size - 1, -1, -1):
        value = (value << WORD) | int(words[w])
    return value


@dataclass(frozen=True)
class Gf2Vector:
    len: int
    data: np.ndarray

    def __post_init__(self):
        if self.len < 0:
            raise ContractError("vector length must be non-negative")
        if self.data.shape != (_nwords(self.len),):
            raise ContractError("word count does not match vector length")
        if _unpack(self.data) >> self.len:
            raise ContractError("bits beyond the vector length must be zero")
        self.data.setflags(write=False)

    @classmethod
    def from_int(cls, value: int, length: int) -> "Gf2Vector":
        if value < 0 or value >> length:
            raise ContractError(f"value {value} does not fit in {length} bits")
        return cls(length, _pack(value, length))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Gf2Vector":
        bits = [int(b) & 1 for b in bits]
        return cls.from_int(sum(b << i for i, b in enumerate(bits)), len(bits))

    @classmethod
    def zeros(cls, length: int) -> "Gf2Vector":
        return cls.from_int(0, length)

    def to_int(self) -> int:
        return _unpack(self.data)

    def bits(self) -> list[int]:
        v = self.to_int()
        return [(v >> i) & 1 for i in range(self.len)]

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.len:
            raise IndexError(i)
        return (int(self.data[i // WORD]) >> (i % WORD)) & 1

    def __eq__(self, other):
        if not isinstance(other, Gf2Vector):
            return NotImplemented
        return self.len == other.len and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.len, self.to_int()))

    def __repr__(self):
        return f"Gf2Vector({''.join(map(str, self.bits()))!r})"


@dataclass(frozen=True)
class Gf2Matrix:
    rows: int
    cols: int
    data: np.ndarray  # shape (rows, ceil(cols / 64)), dtype uint64

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ContractError("matrix dimensions must be non-negative")
        if self.data.shape != (self.rows, _nwords(self.cols)):
            raise ContractError("word array shape does not match dimensions")
        if self.data.dtype != np.uint64:
            raise ContractError("matrix words must be uint64")
        if self.cols % WORD and self.rows and _nwords(self.cols):
            tail = self.data[:, -1] >> np.uint64(self.cols % WORD)
            if np.any(tail):
                raise ContractError("bits beyond the last column must be zero")
        self.data.setflags(write=False)

    @classmethod
    def from_row_ints(cls, rows: Sequence[int], cols: int) -> "Gf2Matrix":
        data = np.zeros((len(rows), _nwords(cols)), dtype=np.uint64)
        for r, value in enumerate(rows):
            if value < 0 or value >> cols:
                raise ContractError(f"row {r} has bits beyond column {cols - 1}")
            data[r] = _pack(value, cols)
        return cls(len(rows), cols, data)

    @classmethod
    def from_dense(cls, array) -> "Gf2Matrix":
        a = np.asarray(array, dtype=np.int64)
        if a.ndim != 2:
            raise ContractError("dense input must be two-dimensional")
        rows = [sum((int(x) & 1) << c for c, x in enumerate(row)) for row in a]
        return cls.from_row_ints(rows, a.shape[1])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls.from_row_ints([0] * rows, cols)

    def row_ints(self) -> list[int]:
        return [_unpack(self.data[r]) for r in range(self.rows)]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r, value in enumerate(self.row_ints()):
            for c in range(self.cols):
                out[r, c] = (value >> c) & 1
        return out

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(rc)
        return (int(self.data[r, c // WORD]) >> (c % WORD)) & 1

    def matvec(self, x: Gf2Vector) -> Gf2Vector:
        if x.len != self.cols:
            raise ContractError(f"vector length {x.len} != matrix cols {self.cols}")
        xv = x.to_int()
        out = 0
        for r, value in enumerate(self.row_ints()):
            out |= (bin(value & xv).count("1") & 1) << r
        return Gf2Vector.from_int(out, self.rows)

    def augment(self, d: Gf2Vector) -> "Gf2Matrix":
        if d.len != self.rows:
            raise ContractError(f"vector length {d.len} != matrix rows {self.rows}")
        rows = [value | (d[r] << self.cols) for r, value in enumerate(self.row_ints())]
        return Gf2Matrix.from_row_ints(rows, self.cols + 1)

    def __eq__(self, other):
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and np.array_equal(
            self.data, other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.row_ints())))


def _eliminate(rows: list[int], ncols: int) -> list[tuple[int, int]]:
    """Reduce ``rows`` in place to reduced row-echelon form.

    Pivots are taken leftmost column first, topmost available row first.
    Returns ``(row, col)`` for each pivot.
    """
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        bit = 1 << c
        p = r
        while p < nrows and not rows[p] & bit:
            p += 1
        if p == nrows:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pivot = rows[r]
        for i in range(nrows):
            if i != r and rows[i] & bit:
                rows[i] ^= pivot
        pivots.append((r, c))
        r += 1
    return pivots


def gf2_rank(m: Gf2Matrix) -> int:
    return len(_eliminate(m.row_ints(), m.cols))


def solve_rows(rows: Sequence[int], d: int, ncols: int) -> Optional[int]:
    """Solve on raw row bitmasks; ``d`` holds one bit per row.

    This is the hot path for Monte Carlo and census loops, which build
    their systems directly as integers.  Returns the witness as an integer
    bitmask over columns, or None.
    """
    flag = 1 << ncols
    work = [row | (flag if (d >> i) & 1 else 0) for i, row in enumerate(rows)]
    pivots = _eliminate(work, ncols)
    for i in range(len(pivots), len(work)):
        if work[i]:
            return None
    x = 0
    for r, c in pivots:
        if work[r] & flag:
            x |= 1 << c
    return x


def gf2_solve(m: Gf2Matrix, d: Gf2Vector) -> Optional[Gf2Vector]:
    """Return some x with m x = d over GF(2), or None if inconsistent.

    Free variables are set to zero, so the witness is reproducible.
    """
    if d.len != m.rows:
        raise ContractError(f"rhs length {d.len} != matrix rows {m.rows}")
    x = solve_rows(m.row_ints(), d.to_int(), m.cols)
    return None if x is None else Gf2Vector.from_int(x, m.cols)


__all__ = ["Gf2Matrix", "Gf2Vector", "gf2_rank", "gf2_solve", "solve_rows"]
