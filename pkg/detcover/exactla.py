"""
Exact dense linear algebra over Z.

Matrices are numpy object arrays of Python ints, so every entry keeps arbitrary
precision while row operations stay vectorized. Elimination is fraction-free and
pivots on the first nonzero entry in row order, which keeps kernels reproducible.
"""
import logging
import math
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from detcover.errors import ShapeError

logger = logging.getLogger(__name__)


class IntMatrix:
    def __init__(self, entries: np.ndarray):
        entries = np.asarray(entries, dtype=object)
        if entries.ndim != 2:
            raise ShapeError(f"expected a 2-d array, got {entries.ndim} dimensions")
        self.entries = entries

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(np.empty((0, cols or 0), dtype=object))
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("rows have different lengths")
        if width == 0:
            return cls(np.empty((len(rows), 0), dtype=object))
        arr = np.empty((len(rows), width), dtype=object)
        for i, r in enumerate(rows):
            arr[i, :] = [int(x) for x in r]
        return cls(arr)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        arr = np.empty((rows, cols), dtype=object)
        arr.fill(0)
        return cls(arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index):
        return self.entries[index]

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.shape == other.shape and self.to_lists() == other.to_lists()

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_lists()!r})"

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.entries.T.copy())

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix(self.entries[np.ix_(list(rows), list(cols))])

    def to_lists(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.entries]


def determinant(A: IntMatrix) -> int:
    """Bareiss fraction-free elimination; every division below is exact."""
    if A.rows != A.cols:
        raise ShapeError(f"determinant of a non-square {A.rows}x{A.cols} matrix")
    n = A.rows
    if n == 0:
        return 1
    m = A.entries.copy()
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k, k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i, k] != 0), None)
            if swap is None:
                return 0
            m[[k, swap]] = m[[swap, k]]
            sign = -sign
        pivot = m[k, k]
        m[k + 1:, k + 1:] = (m[k + 1:, k + 1:] * pivot - np.outer(m[k + 1:, k], m[k, k + 1:])) // prev
        prev = pivot
    return sign * int(m[n - 1, n - 1])


def _primitive_rows(block: np.ndarray) -> None:
    for i in range(block.shape[0]):
        g = reduce(math.gcd, (int(x) for x in block[i]), 0)
        if g > 1:
            block[i] = block[i] // g


def echelon(A: IntMatrix) -> Tuple[np.ndarray, List[int]]:
    """Row echelon form over Z with content-reduced rows, and the pivot columns."""
    m = A.entries.copy()
    rows, cols = m.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot_row = next((i for i in range(r, rows) if m[i, c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[[r, pivot_row]] = m[[pivot_row, r]]
        if r + 1 < rows:
            below = m[r + 1:, :]
            m[r + 1:, :] = below * m[r, c] - np.outer(m[r + 1:, c], m[r, :])
            _primitive_rows(m[r + 1:, :])
        pivots.append(c)
        r += 1
    return m, pivots


def rank(A: IntMatrix) -> int:
    return len(echelon(A)[1])


def rank_mod_p(A: IntMatrix, p: int) -> int:
    """Rank over F_p by Gaussian elimination on residues."""
    m = A.entries.copy() % p
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot_row = next((i for i in range(r, rows) if m[i, c] % p != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[[r, pivot_row]] = m[[pivot_row, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        if r + 1 < rows:
            m[r + 1:, :] = (m[r + 1:, :] - np.outer(m[r + 1:, c], m[r, :])) % p
        r += 1
    return r


def kernel_basis(A: IntMatrix) -> List[List[int]]:
    """Right kernel over Q, one primitive integer vector per free column."""
    m, pivots = echelon(A)
    cols = A.cols
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        x: List[Fraction] = [Fraction(0)] * cols
        x[f] = Fraction(1)
        for i in range(len(pivots) - 1, -1, -1):
            c = pivots[i]
            acc = sum((int(m[i, j]) * x[j] for j in range(c + 1, cols) if x[j]), Fraction(0))
            x[c] = -acc / int(m[i, c])
        den = math.lcm(*(v.denominator for v in x))
        ints = [int(v * den) for v in x]
        g = reduce(math.gcd, ints)
        basis.append([v // g for v in ints])
    logger.debug("kernel of %dx%d matrix has dimension %d", A.rows, cols, len(basis))
    return basis


def matvec(A: IntMatrix, v: Sequence[int]) -> List[int]:
    if len(v) != A.cols:
        raise ShapeError(f"vector of length {len(v)} against {A.cols} columns")
    if A.cols == 0:
        return [0] * A.rows
    return [int(x) for x in A.entries.dot(np.array(list(v), dtype=object))]


def p_valuation(x: int, p: int) -> Union[int, float]:
    """Largest e with p^e | x; math.inf for x = 0."""
    if p < 2:
        raise ValueError(f"{p} is not a prime")
    if x == 0:
        return math.inf
    x = abs(int(x))
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e
