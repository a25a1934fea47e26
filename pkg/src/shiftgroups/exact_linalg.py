"""Exact integer matrices: determinant, Smith normal form, kernel, cokernel.

Entries are Python ints throughout, so nothing overflows and nothing is
ever rounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ParseError


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}")
        if not all(type(x) is int for x in self.entries):
            object.__setattr__(self, "entries", tuple(_as_int(x) for x in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else (cols or 0)
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, diag: Sequence[int]) -> "IntMatrix":
        n = len(diag)
        return cls(n, n, tuple(diag[i] if i == j else 0 for i in range(n) for j in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        a, b = self.to_rows(), other.to_rows()
        cols = list(zip(*b)) if b else [()] * other.cols
        out = [sum(x * y for x, y in zip(row, col)) for row in a for col in cols]
        return IntMatrix(self.rows, other.cols, tuple(out))

    def apply(self, vec: Sequence[int]) -> list[int]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(x * y for x, y in zip(row, vec)) for row in self.to_rows()]

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, tuple(x - y for x, y in zip(self.entries, other.entries)))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, tuple(x + y for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def __str__(self) -> str:
        return format_matrix(self)


def _as_int(x) -> int:
    if isinstance(x, bool) or int(x) != x:
        raise TypeError(f"non-integer entry {x!r}")
    return int(x)


def id_minus_transpose(m: IntMatrix) -> IntMatrix:
    """``I - M^t``, whose cokernel and kernel give the groupoid homology."""
    if not m.is_square:
        raise ValueError("id_minus_transpose needs a square matrix")
    return IntMatrix.identity(m.rows) - m.transpose()


def determinant(a: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if not a.is_square:
        raise ValueError("determinant needs a square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = a.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == S`` with U, V unimodular and S in Smith normal form."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d != 0)


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Smith normal form with both unimodular transforms.

    The pivot is always the nonzero entry of least absolute value in the
    remaining block, first in row-major order among ties.
    """
    m, n = a.rows, a.cols
    A = a.to_rows()
    U = IntMatrix.identity(m).to_rows()
    V = IntMatrix.identity(n).to_rows()

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        if q:
            A[dst] = [x + q * y for x, y in zip(A[dst], A[src])]
            U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col dst += q * col src
        if q:
            for row in A:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    x = A[i][j]
                    if x and (pivot is None or abs(x) < abs(A[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = A[t][t]
            for i in range(t + 1, m):
                add_row(i, t, -(A[i][t] // p))
            for j in range(t + 1, n):
                add_col(j, t, -(A[t][j] // p))
            if any(A[i][t] for i in range(t + 1, m)) or any(A[t][j] for j in range(t + 1, n)):
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if pivot is None:
            break
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]

    S = IntMatrix.from_rows(A, cols=n)
    factors = tuple(A[i][i] for i in range(min(m, n)))
    return SmithDecomposition(IntMatrix.from_rows(U, cols=m), S, IntMatrix.from_rows(V, cols=n), factors)


def kernel_basis(a: IntMatrix) -> list[list[int]]:
    """A Z-basis of ``{v : A v = 0}``: the columns of V beyond the rank."""
    snf = smith_normal_form(a)
    r = snf.rank
    vt = snf.V.transpose().to_rows()
    return [list(col) for col in vt[r:]]


class CoordinateMap:
    """Sends vectors of Z^rows to canonical coordinates of ``Z^rows / A Z^cols``."""

    def __init__(self, group, u_rows: list[list[int]], torsion_rows: list[int], free_rows: list[int]):
        self.group = group
        self._u = u_rows
        self._torsion_rows = torsion_rows
        self._free_rows = free_rows

    @property
    def ambient_rank(self) -> int:
        return len(self._u)

    def __call__(self, vec: Sequence[int]):
        if len(vec) != len(self._u):
            raise ValueError("vector length mismatch")
        uv = [sum(x * y for x, y in zip(row, vec)) for row in self._u]
        return self.group.element([uv[i] for i in self._torsion_rows], [uv[i] for i in self._free_rows])

    def basis_image(self, i: int):
        vec = [0] * len(self._u)
        vec[i] = 1
        return self(vec)

    def lift(self, element) -> list[int]:
        """Some vector of Z^rows mapping to `element` (uses U^-1)."""
        inv = _unimodular_inverse(self._u)
        coords = [0] * len(self._u)
        for i, c in zip(self._torsion_rows, element.torsion_coords):
            coords[i] = c
        for i, c in zip(self._free_rows, element.free_coords):
            coords[i] = c
        return [sum(x * y for x, y in zip(row, coords)) for row in inv]


def cokernel(a: IntMatrix):
    """``(group, coordinate_map)`` for ``Z^rows / A Z^cols``."""
    from .abelian import FinAbGroup

    snf = smith_normal_form(a)
    torsion_rows, torsion, free_rows = [], [], []
    for i in range(a.rows):
        d = snf.invariant_factors[i] if i < len(snf.invariant_factors) else 0
        if d == 0:
            free_rows.append(i)
        elif d >= 2:
            torsion_rows.append(i)
            torsion.append(d)
    group = FinAbGroup(tuple(torsion), len(free_rows))
    return group, CoordinateMap(group, snf.U.to_rows(), torsion_rows, free_rows)


def _unimodular_inverse(rows: list[list[int]]) -> list[list[int]]:
    # Gauss-Jordan over Z works because every pivot we meet is a unit.
    n = len(rows)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        # make the pivot a unit by Euclid on column c
        for i in range(c + 1, n):
            while aug[i][c]:
                q = aug[c][c] // aug[i][c]
                aug[c] = [x - q * y for x, y in zip(aug[c], aug[i])]
                aug[c], aug[i] = aug[i], aug[c]
        if aug[c][c] not in (1, -1):
            raise ValueError("matrix is not unimodular")
        if aug[c][c] == -1:
            aug[c] = [-x for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                q = aug[i][c]
                aug[i] = [x - q * y for x, y in zip(aug[i], aug[c])]
    return [r[n:] for r in aug]


def parse_matrix(text: str, source: str = "<string>") -> IntMatrix:
    """Parse ``matrix <rows> <cols>`` followed by one row per line."""
    lines = [(no, ln.split("#", 1)[0].strip()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines:
        raise ParseError("empty matrix text", source)
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "matrix":
        raise ParseError("expected 'matrix <rows> <cols>'", source, no)
    try:
        rows, cols = int(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError("matrix dimensions must be integers", source, no) from None
    body = lines[1:]
    if len(body) != rows:
        raise ParseError(f"expected {rows} rows, found {len(body)}", source, body[-1][0] if body else no)
    entries = []
    for no, ln in body:
        try:
            row = [int(x) for x in ln.split()]
        except ValueError:
            raise ParseError("non-integer matrix entry", source, no) from None
        if len(row) != cols:
            raise ParseError(f"expected {cols} entries, found {len(row)}", source, no)
        entries.extend(row)
    return IntMatrix(rows, cols, tuple(entries))


def format_matrix(a: IntMatrix) -> str:
    lines = [f"matrix {a.rows} {a.cols}"]
    lines += [" ".join(str(x) for x in row) for row in a.to_rows()]
    return "\n".join(lines) + "\n"
