"""Exact integer matrix algebra.

Everything here works on Python ints, so intermediate entries never
overflow. The main entry points are :func:`smith_normal_form` and
:func:`hermite_normal_form`, both of which also return the unimodular
transformation matrices.

>>> a = IntMatrix.from_rows([[2, 0], [0, 3]])
>>> smith_normal_form(a).d
(1, 6)
>>> hermite_normal_form(IntMatrix.from_rows([[2, 4], [0, 3]]))[0].to_rows()
[[2, 1], [0, 3]]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import MatrixFormatError, NonSquareError

__all__ = [
    "IntMatrix",
    "SNFResult",
    "smith_normal_form",
    "hermite_normal_form",
    "rank",
    "kernel_basis",
    "determinant",
    "parse_matrix",
    "format_matrix",
]


class IntMatrix:
    """Immutable dense matrix of exact integers, stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[int]):
        entries = tuple(int(x) for x in entries)
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(entries) != rows * cols:
            raise ValueError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    # construction

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise ValueError(f"row {i} has length {len(r)}, expected {cols}")
        return cls(len(rows), cols, (x for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, (int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diag(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> IntMatrix:
        values = list(values)
        rows = len(values) if rows is None else rows
        cols = rows if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            out[i][i] = v
        return cls.from_rows(out, cols)

    @classmethod
    def hstack(cls, blocks: Sequence[IntMatrix], rows: int | None = None) -> IntMatrix:
        if not blocks:
            return cls.zeros(rows or 0, 0)
        rows = blocks[0].rows
        if any(b.rows != rows for b in blocks):
            raise ValueError("hstack needs equal row counts")
        out = [[] for _ in range(rows)]
        for b in blocks:
            for i, r in enumerate(b.to_rows()):
                out[i].extend(r)
        return cls.from_rows(out, sum(b.cols for b in blocks))

    @classmethod
    def vstack(cls, blocks: Sequence[IntMatrix], cols: int | None = None) -> IntMatrix:
        if not blocks:
            return cls.zeros(0, cols or 0)
        cols = blocks[0].cols
        if any(b.cols != cols for b in blocks):
            raise ValueError("vstack needs equal column counts")
        return cls(sum(b.rows for b in blocks), cols, (x for b in blocks for x in b.entries))

    @classmethod
    def block_diag(cls, blocks: Sequence[IntMatrix]) -> IntMatrix:
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[0] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b.to_rows()):
                out[r0 + i][c0:c0 + b.cols] = row
            r0 += b.rows
            c0 += b.cols
        return cls.from_rows(out, m)

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(index)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self.cols)]

    # arithmetic

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows,
                         (self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)))

    T = property(transpose)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.extend(sum(a * b for a, b in zip(r, c)) for c in ocols)
        return IntMatrix(self.rows, other.cols, out)

    def apply(self, vector: Sequence[int]) -> tuple[int, ...]:
        if len(vector) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(self.row(i), vector)) for i in range(self.rows))

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return IntMatrix(self.rows, self.cols, (a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return IntMatrix(self.rows, self.cols, (a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, (-a for a in self.entries))

    def scale(self, c: int) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, (c * a for a in self.entries))

    def is_symmetric(self) -> bool:
        return self.is_square and self == self.transpose()

    def is_zero(self) -> bool:
        return not any(self.entries)

    def max_abs(self) -> int:
        return max((abs(x) for x in self.entries), default=0)

    # protocol

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __reduce__(self):
        return (IntMatrix, (self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"IntMatrix.from_rows({self.to_rows()!r}, cols={self.cols})"

    def __str__(self):
        return format_matrix(self).rstrip("\n")


@dataclass(frozen=True)
class SNFResult:
    """Smith form ``u @ a @ v == diag(d)`` padded with zeros to ``a``'s shape."""

    d: tuple[int, ...]
    u: IntMatrix
    v: IntMatrix
    original_shape: tuple[int, int]

    @property
    def rank(self) -> int:
        return len(self.d)

    def diagonal_matrix(self) -> IntMatrix:
        rows, cols = self.original_shape
        return IntMatrix.diag(self.d, rows, cols)


class _Work:
    """Mutable scratch state for the normal form reductions.

    Row operations are mirrored on ``left`` and column operations on
    ``right`` so the transforms come out for free.
    """

    def __init__(self, a: IntMatrix, track_right: bool = True):
        self.m, self.n = a.shape
        self.a = a.to_rows()
        self.left = IntMatrix.identity(self.m).to_rows()
        self.right = IntMatrix.identity(self.n).to_rows() if track_right else None

    def swap_rows(self, i, j):
        if i != j:
            self.a[i], self.a[j] = self.a[j], self.a[i]
            self.left[i], self.left[j] = self.left[j], self.left[i]

    def swap_cols(self, i, j):
        if i != j:
            for r in self.a:
                r[i], r[j] = r[j], r[i]
            for r in self.right:
                r[i], r[j] = r[j], r[i]

    def add_row(self, target, source, c):
        """row[target] += c * row[source]"""
        if c:
            for mat in (self.a, self.left):
                t, s = mat[target], mat[source]
                for k in range(len(t)):
                    t[k] += c * s[k]

    def add_col(self, target, source, c):
        """col[target] += c * col[source]"""
        if c:
            for mat in (self.a, self.right):
                for r in mat:
                    r[target] += c * r[source]

    def negate_row(self, i):
        for mat in (self.a, self.left):
            mat[i] = [-x for x in mat[i]]


def smith_normal_form(a: IntMatrix) -> SNFResult:
    """Smith normal form with unimodular transforms.

    Pivots are chosen as the nonzero entry of smallest absolute value in
    the remaining block. Works for any shape, including empty matrices.
    """
    w = _Work(a)
    m, n = w.m, w.n
    A = w.a
    t = 0
    while t < min(m, n):
        pivot = _min_abs_entry(A, range(t, m), range(t, n))
        if pivot is None:
            break
        w.swap_rows(t, pivot[0])
        w.swap_cols(t, pivot[1])
        while True:
            clean = True
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    w.add_row(i, t, -(A[i][t] // p))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    w.add_col(j, t, -(A[t][j] // p))
                    clean = clean and A[t][j] == 0
            if not clean:
                # a remainder smaller than the pivot survived: promote it
                best = (abs(A[t][t]), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                w.swap_rows(t, best[1])
                w.swap_cols(t, best[2])
                continue
            bad = _first_non_multiple(A, t, m, n, A[t][t])
            if bad is None:
                break
            # pull the offending row in; the next pass shrinks the pivot
            w.add_row(t, bad, 1)
        if A[t][t] < 0:
            w.negate_row(t)
        t += 1
    d = tuple(A[i][i] for i in range(t))
    return SNFResult(
        d=d,
        u=IntMatrix.from_rows(w.left, m),
        v=IntMatrix.from_rows(w.right, n),
        original_shape=(m, n),
    )


def _min_abs_entry(A, rows, cols):
    best = None
    for i in rows:
        r = A[i]
        for j in cols:
            x = r[j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
                if best[0] == 1:
                    return best[1:]
    return None if best is None else best[1:]


def _first_non_multiple(A, t, m, n, p):
    for i in range(t + 1, m):
        for j in range(t + 1, n):
            if A[i][j] % p:
                return i
    return None


def hermite_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(h, u)`` with ``u @ a == h``, ``u`` unimodular, ``h`` in row
    echelon form with positive pivots and the entries above each pivot
    reduced into ``[0, pivot)``. Zero rows collect at the bottom.
    """
    w = _Work(a, track_right=False)
    m, n = w.m, w.n
    A = w.a
    p = 0
    for col in range(n):
        if p == m:
            break
        while True:
            nz = [i for i in range(p, m) if A[i][col]]
            if not nz:
                break
            best = min(nz, key=lambda i: (abs(A[i][col]), i))
            w.swap_rows(p, best)
            done = True
            for i in range(p + 1, m):
                if A[i][col]:
                    w.add_row(i, p, -(A[i][col] // A[p][col]))
                    done = done and A[i][col] == 0
            if done:
                break
        if A[p][col] == 0:
            continue
        if A[p][col] < 0:
            w.negate_row(p)
        for i in range(p):
            w.add_row(i, p, -(A[i][col] // A[p][col]))
        p += 1
    return IntMatrix.from_rows(A, n), IntMatrix.from_rows(w.left, m)


def rank(a: IntMatrix) -> int:
    """Rank over the rationals."""
    return smith_normal_form(a).rank


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Basis of the integer kernel ``{x : a @ x == 0}`` as matrix columns.

    The basis is saturated (it spans the full kernel lattice, not a finite
    index sublattice) and canonical: its transpose is in Hermite form.
    """
    snf = smith_normal_form(a)
    n = a.cols
    vcols = snf.v.columns()[snf.rank:]
    if not vcols:
        return IntMatrix.zeros(n, 0)
    h, _ = hermite_normal_form(IntMatrix.from_rows(vcols, n))
    return h.transpose()


def determinant(a: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if not a.is_square:
        raise NonSquareError(a.rows, a.cols)
    n = a.rows
    if n == 0:
        return 1
    M = a.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def parse_matrix(text: str) -> IntMatrix:
    """Read the plain matrix format: ``rows cols`` then row-major integers."""
    lines = [(no, ln.split()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, toks) for no, toks in lines if toks]
    if not lines:
        raise MatrixFormatError(1, "empty input, expected 'rows cols' header")
    no, header = lines[0]
    if len(header) != 2:
        raise MatrixFormatError(no, "header must be exactly 'rows cols'")
    try:
        rows, cols = (int(x) for x in header)
    except ValueError:
        raise MatrixFormatError(no, "header dimensions must be integers") from None
    if rows < 0 or cols < 0:
        raise MatrixFormatError(no, "dimensions must be nonnegative")
    values = []
    for no, toks in lines[1:]:
        for tok in toks:
            try:
                values.append(int(tok))
            except ValueError:
                raise MatrixFormatError(no, f"not an integer: {tok!r}") from None
    if len(values) != rows * cols:
        last = lines[-1][0]
        raise MatrixFormatError(last, f"expected {rows * cols} entries, found {len(values)}")
    return IntMatrix(rows, cols, values)


def format_matrix(a: IntMatrix) -> str:
    out = [f"{a.rows} {a.cols}"]
    out.extend(" ".join(str(x) for x in a.row(i)) for i in range(a.rows))
    return "\n".join(out) + "\n"
