"""
Bit-packed binary matrices over GF(2).

Rows are stored as little-endian bit fields in ``uint64`` words: bit ``j`` of a
row lives in word ``j // 64`` at position ``j % 64``. Unused high bits of the
last word are always zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

WORD_BITS = 64


def _n_words(cols):
    return (cols + WORD_BITS - 1) // WORD_BITS


def _pack(dense):
    rows, cols = dense.shape
    nw = _n_words(cols)
    padded = np.zeros((rows, nw * WORD_BITS), dtype=np.uint8)
    padded[:, :cols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def _unpack(words, cols):
    rows = words.shape[0]
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words.astype("<u8", copy=False)).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


class BitMatrix:
    """Immutable dense binary matrix with packed rows."""

    __slots__ = ("_words", "_rows", "_cols")

    def __init__(self, words, cols):
        words = np.asarray(words, dtype=np.uint64)
        if words.ndim != 2 or words.shape[1] != _n_words(cols):
            raise DimensionError(
                f"word array of shape {words.shape} does not hold {cols} columns"
            )
        if cols % WORD_BITS and words.shape[0]:
            mask = np.uint64((1 << (cols % WORD_BITS)) - 1)
            words = words.copy()
            words[:, -1] &= mask
        else:
            words = words.copy()
        words.flags.writeable = False
        self._words = words
        self._rows = words.shape[0]
        self._cols = cols

    @classmethod
    def from_dense(cls, array):
        dense = np.asarray(array)
        if dense.ndim == 1:
            dense = dense.reshape(1, -1)
        if dense.ndim != 2:
            raise DimensionError("expected a 2-D array")
        dense = (dense.astype(np.int64) & 1).astype(np.uint8)
        return cls(_pack(dense), dense.shape[1])

    @classmethod
    def zeros(cls, rows, cols):
        return cls(np.zeros((rows, _n_words(cols)), dtype=np.uint64), cols)

    @classmethod
    def identity(cls, n):
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def random(cls, rows, cols, rng):
        return cls.from_dense(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))

    @property
    def rows(self):
        return self._rows

    @property
    def cols(self):
        return self._cols

    @property
    def shape(self):
        return (self._rows, self._cols)

    @property
    def words(self):
        """Read-only view of the packed storage."""
        return self._words

    def to_dense(self):
        return _unpack(self._words, self._cols)

    def __getitem__(self, index):
        i, j = index
        if not (0 <= i < self._rows and 0 <= j < self._cols):
            raise IndexError(f"({i}, {j}) out of range for shape {self.shape}")
        return int((self._words[i, j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & np.uint64(1))

    def row(self, i):
        return self.to_dense_rows([i])[0]

    def to_dense_rows(self, indices):
        return _unpack(self._words[np.asarray(indices, dtype=np.intp)], self._cols)

    def column_weights(self):
        """Number of ones in each column."""
        return self.to_dense().sum(axis=0, dtype=np.int64)

    def select_columns(self, order):
        return BitMatrix.from_dense(self.to_dense()[:, np.asarray(order, dtype=np.intp)])

    def select_rows(self, order):
        return BitMatrix(self._words[np.asarray(order, dtype=np.intp)], self._cols)

    def transpose(self):
        return BitMatrix.from_dense(self.to_dense().T)

    def __xor__(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return BitMatrix(self._words ^ other._words, self._cols)

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._words, other._words)

    def __hash__(self):
        return hash((self.shape, self._words.tobytes()))

    def __repr__(self):
        return f"BitMatrix(rows={self._rows}, cols={self._cols})"


@dataclass(frozen=True)
class RrefResult:
    """Reduced row echelon form with pivot columns permuted to the front.

    ``reduced[:, i]`` is column ``column_permutation[i]`` of the reduced input,
    so the leading ``pivot_count`` columns form an identity block on top of
    all-zero rows.
    """

    reduced: BitMatrix
    column_permutation: tuple
    pivot_count: int
    column_ones: tuple

    @property
    def pivot_columns(self):
        """Original indices of the pivot columns, in pivot order."""
        return self.column_permutation[: self.pivot_count]

    @property
    def free_columns(self):
        return self.column_permutation[self.pivot_count :]

    @property
    def column_means(self):
        """Exact column means as ``(ones_in_column, rows)`` pairs."""
        rows = self.reduced.rows
        return [(ones, rows) for ones in self.column_ones]


def _reduce_in_place(work, cols):
    """Gauss-Jordan elimination on packed rows. Returns pivot columns."""
    rows = work.shape[0]
    pivots = []
    pr = 0
    one = np.uint64(1)
    for c in range(cols):
        if pr == rows:
            break
        w = c // WORD_BITS
        shift = np.uint64(c % WORD_BITS)
        bits = (work[:, w] >> shift) & one
        below = np.flatnonzero(bits[pr:])
        if below.size == 0:
            continue
        p = pr + int(below[0])
        if p != pr:
            work[[pr, p]] = work[[p, pr]]
            bits[[pr, p]] = bits[[p, pr]]
        hit = np.flatnonzero(bits)
        hit = hit[hit != pr]
        if hit.size:
            work[hit] ^= work[pr]
        pivots.append(c)
        pr += 1
    return pivots


def rref(m):
    """Row-reduce ``m`` and move pivot columns to the front.

    Pivots are chosen as the first row at or below the current pivot row with a
    one in the current column; columns are scanned left to right. Non-pivot
    columns follow the pivot block in their original order.
    """
    if m.rows == 0 or m.cols == 0:
        raise DimensionError(f"cannot row-reduce an empty {m.rows}x{m.cols} matrix")
    work = np.array(m.words, dtype=np.uint64, copy=True)
    pivots = _reduce_in_place(work, m.cols)
    pivot_set = set(pivots)
    order = tuple(pivots) + tuple(c for c in range(m.cols) if c not in pivot_set)
    dense = _unpack(work, m.cols)[:, np.asarray(order, dtype=np.intp)]
    ones = tuple(int(v) for v in dense.sum(axis=0, dtype=np.int64))
    return RrefResult(
        reduced=BitMatrix.from_dense(dense),
        column_permutation=order,
        pivot_count=len(pivots),
        column_ones=ones,
    )


def rank(m):
    if m.rows == 0 or m.cols == 0:
        return 0
    work = np.array(m.words, dtype=np.uint64, copy=True)
    return len(_reduce_in_place(work, m.cols))


def rank_by_column_mean(r, m_s):
    """Count columns of the reduced matrix whose mean is at most ``1/m_s``.

    All-zero columns pass the test too, so the result can exceed
    ``r.pivot_count``.
    """
    rows = r.reduced.rows
    if m_s < 1 or m_s != rows:
        raise DimensionError(f"m_s={m_s} does not match {rows} reduced rows")
    # ones/rows <= 1/m_s  <=>  ones * m_s <= rows
    return sum(1 for ones in r.column_ones if ones * m_s <= rows)


def multiply(a, b):
    """GF(2) product ``a @ b`` by XOR-accumulating packed rows of ``b``."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    out = np.zeros((a.rows, b.words.shape[1]), dtype=np.uint64)
    a_dense = a.to_dense()
    for j in range(a.cols):
        sel = np.flatnonzero(a_dense[:, j])
        if sel.size:
            out[sel] ^= b.words[j]
    return BitMatrix(out, b.cols)


def null_space(m):
    """Basis of ``{x : m x = 0}`` as the rows of a BitMatrix."""
    if m.rows == 0:
        return BitMatrix.identity(m.cols)
    r = rref(m)
    k = m.cols - r.pivot_count
    basis = np.zeros((k, m.cols), dtype=np.uint8)
    reduced = r.reduced.to_dense()
    pivot_cols = np.asarray(r.pivot_columns, dtype=np.intp)
    for i, f in enumerate(r.free_columns):
        basis[i, f] = 1
        # free column position in the permuted layout is pivot_count + i
        basis[i, pivot_cols] = reduced[: r.pivot_count, r.pivot_count + i]
    return BitMatrix.from_dense(basis)
