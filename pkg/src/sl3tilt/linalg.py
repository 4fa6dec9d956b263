"""Exact linear algebra over the rationals or a prime field, on top of sympy's DomainMatrix."""

from __future__ import annotations

import re

from sympy import GF, QQ
from sympy.polys.matrices import DomainMatrix


def field_domain(field) -> object:
    """Map a field spec ("QQ", "rationals", "GF(3)", or a prime int) to a sympy domain."""
    if field is None or field in ("QQ", "rationals", "Q"):
        return QQ
    if isinstance(field, int):
        return GF(field)
    m = re.fullmatch(r"\s*(?:GF|F)\(?(\d+)\)?\s*", str(field))
    if m:
        return GF(int(m.group(1)))
    raise ValueError(f"unsupported field {field!r}")


def field_name(K) -> str:
    return "QQ" if K == QQ else f"GF({K.mod})"


def matrix(rows, K, ncols: int | None = None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if not rows:
        return DomainMatrix.zeros((0, ncols or 0), K)
    if ncols is not None and ncols == 0:
        return DomainMatrix.zeros((len(rows), 0), K)
    return DomainMatrix([[K.convert(x) for x in r] for r in rows], (len(rows), len(rows[0])), K)


def zeros(m: int, n: int, K) -> DomainMatrix:
    return DomainMatrix.zeros((m, n), K)


def eye(n: int, K) -> DomainMatrix:
    return DomainMatrix.eye(n, K) if n else zeros(0, 0, K)


def rows_of(M: DomainMatrix) -> list[list]:
    m, n = M.shape
    if m == 0:
        return []
    if n == 0:
        return [[] for _ in range(m)]
    return M.to_dense().to_list()


def mul(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    if A.rep.fmt != B.rep.fmt:
        A, B = A.to_dense(), B.to_dense()
    return A.matmul(B)


def vstack(mats: list[DomainMatrix], ncols: int, K) -> DomainMatrix:
    mats = [M for M in mats if M.shape[0]]
    if not mats:
        return zeros(0, ncols, K)
    if len(mats) == 1:
        return mats[0]
    mats = [M.to_dense() for M in mats]
    return mats[0].vstack(*mats[1:])


def hstack(mats: list[DomainMatrix], nrows: int, K) -> DomainMatrix:
    mats = [M for M in mats if M.shape[1]]
    if not mats:
        return zeros(nrows, 0, K)
    if len(mats) == 1:
        return mats[0]
    mats = [M.to_dense() for M in mats]
    return mats[0].hstack(*mats[1:])


def block_diag(mats: list[DomainMatrix], K) -> DomainMatrix:
    m = sum(M.shape[0] for M in mats)
    n = sum(M.shape[1] for M in mats)
    out = [[K.zero] * n for _ in range(m)]
    r0 = c0 = 0
    for M in mats:
        for i, row in enumerate(rows_of(M)):
            for j, x in enumerate(row):
                out[r0 + i][c0 + j] = x
        r0 += M.shape[0]
        c0 += M.shape[1]
    return matrix(out, K, n) if m else zeros(0, n, K)


def is_zero(M: DomainMatrix) -> bool:
    return all(x == 0 for row in rows_of(M) for x in row)


def left_kernel(M: DomainMatrix) -> DomainMatrix:
    """Rows x with x M = 0, as a matrix whose rows span the kernel."""
    m, n = M.shape
    if m == 0:
        return zeros(0, 0, M.domain)
    if n == 0:
        return eye(m, M.domain)
    N = M.transpose().nullspace()
    return N if N.shape[0] else zeros(0, m, M.domain)


def rank(M: DomainMatrix) -> int:
    if 0 in M.shape:
        return 0
    return M.rank()


def is_invertible(M: DomainMatrix) -> bool:
    m, n = M.shape
    return m == n and rank(M) == n


class Subspace:
    """Row space of a matrix, stored in reduced row echelon form."""

    __slots__ = ("K", "n", "basis", "pivots", "_rows")

    def __init__(self, M: DomainMatrix):
        self.K = M.domain
        self.n = M.shape[1]
        if M.shape[0] == 0 or self.n == 0:
            self.pivots: tuple[int, ...] = ()
            self._rows: list[list] = []
        else:
            R, piv = M.rref()
            self.pivots = tuple(piv)
            self._rows = rows_of(R)[: len(piv)]
        self.basis = matrix(self._rows, self.K, self.n)

    @classmethod
    def full(cls, n: int, K) -> "Subspace":
        return cls(eye(n, K))

    @classmethod
    def zero(cls, n: int, K) -> "Subspace":
        return cls(zeros(0, n, K))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def rows(self) -> list[list]:
        return [list(r) for r in self._rows]

    def reduce(self, x: list) -> list:
        x = list(x)
        for r, p in zip(self._rows, self.pivots):
            c = x[p]
            if c:
                x = [xi - c * ri for xi, ri in zip(x, r)]
        return x

    def contains(self, x: list) -> bool:
        return all(v == 0 for v in self.reduce(x))

    def coords(self, x: list) -> list:
        """Coordinates of x (assumed inside) in the echelon basis."""
        return [x[p] for p in self.pivots]

    def complement_indices(self) -> list[int]:
        piv = set(self.pivots)
        return [i for i in range(self.n) if i not in piv]

    def projector(self) -> DomainMatrix:
        """n x (n - dim) matrix sending x to its coordinates in V / self."""
        comp = self.complement_indices()
        pos = {c: k for k, c in enumerate(comp)}
        K = self.K
        out = [[K.zero] * len(comp) for _ in range(self.n)]
        for c, k in pos.items():
            out[c][k] = K.one
        for r, p in zip(self._rows, self.pivots):
            for c, k in pos.items():
                out[p][k] = -r[c]
        return matrix(out, K, len(comp)) if self.n else zeros(0, 0, K)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(vstack([self.basis, other.basis], self.n, self.K))

    def __and__(self, other: "Subspace") -> "Subspace":
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.n, self.K)
        stacked = vstack([self.basis, other.basis], self.n, self.K)
        ker = left_kernel(stacked)
        if ker.shape[0] == 0:
            return Subspace.zero(self.n, self.K)
        left = ker.extract(list(range(ker.shape[0])), list(range(self.dim)))
        return Subspace(mul(left, self.basis))

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.pivots == other.pivots and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self.key())

    def key(self) -> tuple:
        return (self.n, self.pivots, tuple(tuple(str(v) for v in r) for r in self._rows))
