"""Linear block codes: random full-rank generators, alist loading, encoding."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gf2
from .errors import AlistParseError, DimensionError
from .gf2 import BitMatrix


@dataclass(frozen=True)
class LinearCode:
    """An [n, k] binary linear code given by a k x n generator matrix."""

    n: int
    k: int
    generator: BitMatrix
    parity_check: BitMatrix | None = None

    def __post_init__(self):
        if not 0 < self.k <= self.n:
            raise ValueError(f"need 0 < k <= n, got n={self.n}, k={self.k}")
        if self.generator.shape != (self.k, self.n):
            raise DimensionError(
                f"generator shape {self.generator.shape} != ({self.k}, {self.n})"
            )

    @property
    def rate(self):
        return Fraction(self.k, self.n)


def random_code(n, k, seed):
    """Draw a uniformly random k x n generator, resampling until it has rank k."""
    if not 0 < k <= n:
        raise ValueError(f"need 0 < k <= n, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    while True:
        g = BitMatrix.random(k, n, rng)
        if gf2.rank(g) == k:
            return LinearCode(n=n, k=k, generator=g)


def _tokens(line):
    return [int(tok) for tok in line.split()]


def parse_alist(text):
    """Parse an alist document into a dense (m x n) parity-check array."""
    lines = [(no, ln.strip()) for no, ln in enumerate(text.splitlines(), start=1)]
    lines = [(no, ln) for no, ln in lines if ln]
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] + 1 if lines else 1
            raise AlistParseError(f"unexpected end of file while reading {what}", last)
        no, ln = lines[pos]
        pos += 1
        try:
            return no, _tokens(ln)
        except ValueError:
            raise AlistParseError(f"non-integer token in {what}", no) from None

    no, header = take("header")
    if len(header) != 2 or header[0] <= 0 or header[1] < 0:
        raise AlistParseError("header must be 'n m' with n > 0", no)
    n, m = header
    no, maxw = take("maximum weights")
    if len(maxw) != 2:
        raise AlistParseError("expected maximum column and row weights", no)
    no, col_w = take("column weights")
    if len(col_w) != n:
        raise AlistParseError(f"expected {n} column weights, got {len(col_w)}", no)
    no, row_w = take("row weights")
    if len(row_w) != m:
        raise AlistParseError(f"expected {m} row weights, got {len(row_w)}", no)
    if max(col_w, default=0) > maxw[0] or max(row_w, default=0) > maxw[1]:
        raise AlistParseError("weight exceeds declared maximum", no)

    h = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        no, idx = take(f"column {j + 1} index list")
        idx = [i for i in idx if i != 0]
        if len(idx) != col_w[j]:
            raise AlistParseError(
                f"column {j + 1} lists {len(idx)} entries, weight says {col_w[j]}", no
            )
        for i in idx:
            if not 1 <= i <= m:
                raise AlistParseError(f"row index {i} out of range 1..{m}", no)
            h[i - 1, j] = 1
    for i in range(m):
        no, idx = take(f"row {i + 1} index list")
        idx = [j for j in idx if j != 0]
        if len(idx) != row_w[i]:
            raise AlistParseError(
                f"row {i + 1} lists {len(idx)} entries, weight says {row_w[i]}", no
            )
        for j in idx:
            if not 1 <= j <= n:
                raise AlistParseError(f"column index {j} out of range 1..{n}", no)
            if not h[i, j - 1]:
                raise AlistParseError(
                    f"row {i + 1} entry {j} missing from column lists", no
                )
        if int(h[i].sum()) != row_w[i]:
            raise AlistParseError(f"row {i + 1} disagrees with column lists", no)
    return h


def to_alist(h):
    """Serialize a dense parity-check array as alist text."""
    h = np.asarray(h, dtype=np.uint8)
    m, n = h.shape
    col_w = h.sum(axis=0)
    row_w = h.sum(axis=1)
    out = [f"{n} {m}", f"{int(col_w.max(initial=0))} {int(row_w.max(initial=0))}"]
    out.append(" ".join(str(int(w)) for w in col_w))
    out.append(" ".join(str(int(w)) for w in row_w))
    for j in range(n):
        out.append(" ".join(str(i + 1) for i in np.flatnonzero(h[:, j])) or "0")
    for i in range(m):
        out.append(" ".join(str(j + 1) for j in np.flatnonzero(h[i])) or "0")
    return "\n".join(out) + "\n"


def from_alist(text):
    """Build a code whose generator spans the null space of the alist matrix."""
    h = BitMatrix.from_dense(parse_alist(text))
    g = gf2.null_space(h)
    if g.rows == 0:
        raise ValueError("parity-check matrix has full column rank; code is {0}")
    return LinearCode(n=h.cols, k=g.rows, generator=g, parity_check=h)


def encode(code, message):
    """Return the codeword ``message @ G`` as a uint8 vector."""
    message = np.asarray(message, dtype=np.uint8).reshape(-1)
    if message.size != code.k:
        raise DimensionError(f"message length {message.size} != k={code.k}")
    return encode_many(code, message.reshape(1, -1))[0]


def encode_many(code, messages):
    """Encode each row of a (M x k) bit array; returns an (M x n) uint8 array."""
    messages = np.asarray(messages, dtype=np.uint8)
    if messages.ndim != 2 or messages.shape[1] != code.k:
        raise DimensionError(f"messages shape {messages.shape} incompatible with k={code.k}")
    return gf2.multiply(BitMatrix.from_dense(messages), code.generator).to_dense()
