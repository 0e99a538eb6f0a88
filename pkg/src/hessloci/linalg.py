"""Exact dense linear algebra over a :class:`~hessloci.fields.Field`.

Matrices are lists of rows; vectors are lists.  Nothing here mutates its
arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import Field

__all__ = [
    "rref",
    "rank",
    "kernel_basis",
    "row_space_basis",
    "solve",
    "det",
    "inverse",
    "matmul",
    "matvec",
    "transpose",
    "identity",
    "char_poly",
    "poly_of_matrix",
    "is_scalar_matrix",
    "ProjPoint",
    "LinearChange",
]


def rref(F: Field, M):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    A = [[F.norm(x) for x in row] for row in M]
    if not A:
        return [], []
    nrows, ncols = len(A), len(A[0])
    norm = F.norm
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = F.inv(A[r][c])
        A[r] = [norm(x * inv) for x in A[r]]
        pr = A[r]
        for i in range(nrows):
            if i != r:
                fac = A[i][c]
                if fac:
                    A[i] = [norm(x - fac * y) for x, y in zip(A[i], pr)]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(F: Field, M) -> int:
    return len(rref(F, M)[1])


def kernel_basis(F: Field, M, ncols: int | None = None):
    """Basis of {v : M v = 0}, returned as the rows of a reduced echelon matrix."""
    if not M:
        if ncols is None:
            raise ValueError("need ncols for an empty matrix")
        return [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    ncols = len(M[0])
    R, pivots = rref(F, M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(R, pivots):
            v[pc] = F.norm(-row[fc])
        basis.append(v)
    if not basis:
        return []
    return rref(F, basis)[0]


def row_space_basis(F: Field, vectors):
    return rref(F, vectors)[0] if vectors else []


def solve(F: Field, M, b):
    """One solution x of M x = b, or None when inconsistent."""
    if len(M) != len(b):
        raise ValueError("dimension mismatch")
    ncols = len(M[0])
    aug = [list(row) + [bi] for row, bi in zip(M, b)]
    R, pivots = rref(F, aug)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for row, pc in zip(R, pivots):
        x[pc] = row[ncols]
    return x


def det(F: Field, M):
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("determinant of non-square matrix")
    A = [[F.norm(x) for x in row] for row in M]
    norm = F.norm
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = -d
        d = d * A[c][c]
        inv = F.inv(A[c][c])
        for i in range(c + 1, n):
            fac = A[i][c]
            if fac:
                fac = norm(fac * inv)
                A[i] = [norm(x - fac * y) for x, y in zip(A[i], A[c])]
    return norm(d)


def identity(F: Field, n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def inverse(F: Field, M):
    n = len(M)
    aug = [list(row) + e for row, e in zip(M, identity(F, n))]
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def transpose(M):
    return [list(col) for col in zip(*M)]


def matmul(F: Field, A, B):
    if len(A[0]) != len(B):
        raise ValueError("dimension mismatch")
    Bt = transpose(B)
    return [[F.norm(sum(a * b for a, b in zip(row, col))) for col in Bt] for row in A]


def matvec(F: Field, A, v):
    if len(A[0]) != len(v):
        raise ValueError("dimension mismatch")
    return [F.norm(sum(a * b for a, b in zip(row, v))) for row in A]


def is_scalar_matrix(M) -> bool:
    n = len(M)
    return all(M[i][j] == (M[0][0] if i == j else 0) for i in range(n) for j in range(n))


def char_poly(F: Field, M):
    """Monic characteristic polynomial det(t I - M), low-degree coefficient first.

    Reduces to upper Hessenberg form by similarity, then runs the standard
    determinant recurrence on the Hessenberg matrix.
    """
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("char_poly of non-square matrix")
    norm = F.norm
    H = [[F.norm(x) for x in row] for row in M]
    for c in range(n - 2):
        piv = next((i for i in range(c + 1, n) if H[i][c]), None)
        if piv is None:
            continue
        if piv != c + 1:
            H[c + 1], H[piv] = H[piv], H[c + 1]
            for row in H:
                row[c + 1], row[piv] = row[piv], row[c + 1]
        inv = F.inv(H[c + 1][c])
        for i in range(c + 2, n):
            fac = H[i][c]
            if not fac:
                continue
            fac = norm(fac * inv)
            H[i] = [norm(x - fac * y) for x, y in zip(H[i], H[c + 1])]
            for row in H:
                row[c + 1] = norm(row[c + 1] + fac * row[i])
    # p[k] = char poly of the leading k x k block
    from .univariate import padd, pmul_scalar, pmul, ptrim

    p = [[1]]
    for k in range(1, n + 1):
        # (t - h_kk) p_{k-1}
        cur = pmul(F, [norm(-H[k - 1][k - 1]), 1], p[k - 1])
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = norm(prod * H[i][i - 1])
            if not prod:
                break
            coef = norm(prod * H[i - 1][k - 1])
            cur = padd(F, cur, pmul_scalar(F, p[i - 1], norm(-coef)))
        p.append(ptrim(cur))
    return p[n]


def poly_of_matrix(F: Field, coeffs, M):
    """Evaluate a univariate polynomial (low-first coefficients) at a square matrix."""
    n = len(M)
    result = [[0] * n for _ in range(n)]
    for c in reversed(coeffs):
        result = matmul(F, result, M)
        for i in range(n):
            result[i][i] = F.norm(result[i][i] + c)
    return result


@dataclass(frozen=True)
class ProjPoint:
    """A point of projective space, first nonzero coordinate scaled to 1."""

    field: Field
    coords: tuple

    def __post_init__(self):
        F = self.field
        coords = [F(c) for c in self.coords]
        lead = next((c for c in coords if c), None)
        if lead is None:
            raise ValueError("projective point with all coordinates zero")
        inv = F.inv(lead)
        object.__setattr__(self, "coords", tuple(F.norm(c * inv) for c in coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def chart(self) -> int:
        return next(i for i, c in enumerate(self.coords) if c)

    def __str__(self):
        return "(" + ":".join(str(c) for c in self.coords) + ")"


class LinearChange:
    """Invertible square matrix acting by x_i -> sum_j L[i][j] x_j."""

    def __init__(self, field: Field, matrix):
        self.field = field
        self.matrix = tuple(tuple(field(c) for c in row) for row in matrix)
        self.size = len(self.matrix)
        if any(len(r) != self.size for r in self.matrix):
            raise ValueError("linear change must be square")
        if not det(field, self.matrix):
            raise ValueError("linear change is singular")

    def det(self):
        return det(self.field, self.matrix)

    def inverse(self) -> "LinearChange":
        return LinearChange(self.field, inverse(self.field, self.matrix))

    def compose(self, other: "LinearChange") -> "LinearChange":
        """Matrix product self * other, i.e. apply ``self`` first then ``other`` to f."""
        return LinearChange(self.field, matmul(self.field, self.matrix, other.matrix))

    def columns(self, idx):
        return [[self.matrix[i][j] for i in range(self.size)] for j in idx]

    def to_lists(self):
        return [list(r) for r in self.matrix]

    def __eq__(self, other):
        return isinstance(other, LinearChange) and self.matrix == other.matrix

    def __repr__(self):
        return f"LinearChange({self.field!r}, {self.to_lists()})"
