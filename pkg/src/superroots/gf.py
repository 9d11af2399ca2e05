"""Exact scalar and dense-matrix arithmetic over GF(p) and over Q.

Scalars are plain ints in 0..p-1 when the characteristic is an odd prime
and `fractions.Fraction` when it is 0.  Matrices are lists of row lists.
Everything is exact; row reduction uses first-nonzero pivoting in natural
column order so null-space bases are reproducible.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import Singular, ZeroInverse


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Field:
    """The working field: characteristic 0 (rationals) or an odd prime p."""

    def __init__(self, characteristic: int):
        p = int(characteristic)
        if p == 2:
            raise ValueError("characteristic 2 is not supported")
        if p != 0 and not _is_prime(p):
            raise ValueError(f"characteristic must be 0 or an odd prime, got {p}")
        self.p = p

    def __repr__(self):
        return f"Field({self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def of(self, x):
        """Canonical scalar from an int, Fraction or scalar."""
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return (x.numerator * self.inv(x.denominator % self.p)) % self.p
        return int(x) % self.p

    def zero(self):
        return Fraction(0) if self.p == 0 else 0

    def one(self):
        return Fraction(1) if self.p == 0 else 1

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def inv(self, a):
        """Multiplicative inverse; raises ZeroInverse on 0."""
        if not a:
            raise ZeroInverse("0 has no multiplicative inverse")
        if self.p == 0:
            return 1 / Fraction(a)
        return pow(int(a), self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def signed_lift(self, a) -> int:
        """Symmetric integer representative: residues above p/2 come out negative."""
        if self.p == 0:
            if isinstance(a, Fraction) and a.denominator != 1:
                raise ValueError(f"{a} is not an integer")
            return int(a)
        a = int(a) % self.p
        return a if a <= (self.p - 1) // 2 else a - self.p


def mat_of(field: Field, rows) -> list[list]:
    return [[field.of(x) for x in row] for row in rows]


def identity(field: Field, n: int) -> list[list]:
    one, zero = field.one(), field.zero()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(m: list[list]) -> list[list]:
    return [list(col) for col in zip(*m)]


def mat_mul(field: Field, a, b) -> list[list]:
    bt = transpose(b)
    return [
        [
            sum((field.mul(x, y) for x, y in zip(row, col)), field.zero())
            for col in bt
        ]
        for row in a
    ]


def mat_vec(field: Field, a, v) -> list:
    return [sum((field.mul(x, y) for x, y in zip(row, v)), field.zero()) for row in a]


def rref(field: Field, m) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns (copy; input untouched)."""
    m = [list(row) for row in m]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        scale = field.inv(m[r][c])
        m[r] = [field.mul(scale, x) for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(field: Field, m) -> int:
    if not m:
        return 0
    return len(rref(field, m)[1])


def inverse(field: Field, m) -> list[list]:
    """Exact inverse of a square matrix; raises Singular if rank < n."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix is not square")
    aug = [list(row) + ident for row, ident in zip(m, identity(field, n))]
    red, pivots = rref(field, aug)
    if pivots[:n] != list(range(n)):
        raise Singular(f"matrix of rank {rank(field, m)} < {n} has no inverse")
    return [row[n:] for row in red]


def null_space(field: Field, m) -> list[list]:
    """Basis of the right kernel {v : m v = 0}, deterministic order."""
    if not m:
        return []
    ncols = len(m[0])
    red, pivots = rref(field, m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [field.zero()] * ncols
        v[f] = field.one()
        for r, c in enumerate(pivots):
            v[c] = field.neg(red[r][f])
        basis.append(v)
    return basis


def solve(field: Field, m, rhs):
    """One solution of m x = rhs, or None when inconsistent."""
    ncols = len(m[0]) if m else 0
    aug = [list(row) + [b] for row, b in zip(m, rhs)]
    red, pivots = rref(field, aug)
    if ncols in pivots:
        return None
    x = [field.zero()] * ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][-1]
    return x
