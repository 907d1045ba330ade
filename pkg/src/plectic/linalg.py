"""Exact rational matrices, canonical subspaces and p-adic valuations.

Everything here works over ``fractions.Fraction``; nothing is ever rounded.
Subspaces of ``Q^N`` are stored by the reduced row-echelon form of a basis,
so two subspaces compare equal exactly when they are the same subspace.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to ``Fraction``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not _RATIONAL_RE.match(s):
            raise ValueError(f"not an exact rational: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_rational(x: Fraction) -> str:
    # Fraction.__str__ already gives "a/b" or "a" with the sign on the numerator
    return str(Fraction(x))


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    return all(p % q for q in range(3, math.isqrt(p) + 1, 2))


def valuation(x, p: int):
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    x = as_rational(x)
    if x == 0:
        return math.inf
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


valuation_of = valuation


def _rref_rows(rows: list, ncols: int):
    """In-place RREF of a list of Fraction lists. Returns (rows, pivots)."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        pr = None
        for i in range(r, nrows):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        if piv != 1:
            inv = 1 / piv
            rows[r] = [x * inv for x in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


class Matrix:
    """Immutable dense matrix of Fractions (row-major)."""

    __slots__ = ("_rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(as_rational(x) for x in row) for row in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(data[0])
        if any(len(row) != ncols for row in data):
            raise ValueError("ragged matrix rows")
        self._rows = data
        self.nrows = len(data)
        self.ncols = ncols
        self._hash = None

    @classmethod
    def _trusted(cls, rows: tuple, ncols: int) -> "Matrix":
        m = cls.__new__(cls)
        m._rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        m._hash = None
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._trusted(
            tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        zero = Fraction(0)
        return cls._trusted(tuple((zero,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        vals = [as_rational(v) for v in values]
        n = len(vals)
        zero = Fraction(0)
        return cls._trusted(
            tuple(tuple(vals[i] if i == j else zero for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int | None = None) -> "Matrix":
        if not columns:
            if nrows is None:
                raise ValueError("nrows is required with no columns")
            return cls._trusted(tuple(() for _ in range(nrows)), 0)
        return cls(columns).T

    @property
    def rows(self) -> tuple:
        return self._rows

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> Vector:
        return self._rows[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self._rows)

    @property
    def T(self) -> "Matrix":
        if self.nrows == 0:
            return Matrix._trusted(tuple(() for _ in range(self.ncols)), 0)
        return Matrix._trusted(tuple(zip(*self._rows)), self.nrows)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._rows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ncols, self._rows))
        return self._hash

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"Matrix([{body}])"

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix._trusted(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self.ncols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix._trusted(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self.ncols,
        )

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c) -> "Matrix":
        c = as_rational(c)
        return Matrix._trusted(tuple(tuple(c * a for a in r) for r in self._rows), self.ncols)

    def __mul__(self, c):
        if isinstance(c, Matrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.T._rows
        out = []
        for r in self._rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append(tuple(sum((a * c[k] for k, a in nz), Fraction(0)) for c in cols))
        return Matrix._trusted(tuple(out), other.ncols)

    def apply(self, v: Sequence) -> Vector:
        """Matrix times column vector."""
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        nz = [(k, x) for k, x in enumerate(v) if x]
        return tuple(sum((r[k] * x for k, x in nz), Fraction(0)) for r in self._rows)

    def __pow__(self, n: int) -> "Matrix":
        if not self.is_square() or n < 0:
            raise ValueError("matrix power needs a square matrix and n >= 0")
        result = Matrix.identity(self.nrows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def kron(self, other: "Matrix") -> "Matrix":
        rows = []
        for r in self._rows:
            for s in other._rows:
                rows.append(tuple(a * b for a in r for b in s))
        return Matrix._trusted(tuple(rows), self.ncols * other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return Matrix._trusted(self._rows + other._rows, self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._trusted(
            tuple(tuple(self._rows[i][j] for j in cols) for i in rows), len(cols)
        )

    def rank(self) -> int:
        _, piv = _rref_rows([list(r) for r in self._rows], self.ncols)
        return len(piv)

    def det(self) -> Fraction:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        rows = [list(r) for r in self._rows]
        n = self.nrows
        det = Fraction(1)
        for c in range(n):
            pr = next((i for i in range(c, n) if rows[i][c]), None)
            if pr is None:
                return Fraction(0)
            if pr != c:
                rows[c], rows[pr] = rows[pr], rows[c]
                det = -det
            piv = rows[c][c]
            det *= piv
            for i in range(c + 1, n):
                f = rows[i][c] / piv
                if f:
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
        return det

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.nrows

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        one, zero = Fraction(1), Fraction(0)
        aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self._rows)]
        aug, piv = _rref_rows(aug, 2 * n)
        if piv[:n] != list(range(n)):
            raise ValueError("matrix is singular")
        return Matrix._trusted(tuple(tuple(r[n:]) for r in aug), n)

    def trace(self) -> Fraction:
        return sum((self._rows[i][i] for i in range(min(self.shape))), Fraction(0))

    def kernel(self) -> "Subspace":
        """Right kernel ``{x : Mx = 0}``."""
        return Subspace.kernel(self)


def rref(m: Matrix) -> Matrix:
    """Reduced row-echelon form of ``m``; zero rows are kept at the bottom."""
    rows, _ = _rref_rows([list(r) for r in m.rows], m.ncols)
    return Matrix._trusted(tuple(tuple(r) for r in rows), m.ncols)


class Subspace:
    """A subspace of ``Q^N`` held in canonical RREF form.

    Supports ``a + b`` (sum), ``a & b`` (intersection), ``a <= b``
    (containment) and ``v in a`` for vectors.
    """

    __slots__ = ("ambient_dim", "basis", "pivots", "_hash")

    def __init__(self, vectors: Iterable[Sequence], ambient_dim: int):
        rows = [[as_rational(x) for x in v] for v in vectors]
        if any(len(r) != ambient_dim for r in rows):
            raise ValueError("vector length does not match ambient dimension")
        rows, piv = _rref_rows(rows, ambient_dim)
        self.ambient_dim = ambient_dim
        self.basis = tuple(tuple(r) for r in rows[: len(piv)])
        self.pivots = tuple(piv)
        self._hash = None

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        return cls(vectors, ambient_dim)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls((), n)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(Matrix.identity(n).rows, n)

    @classmethod
    def kernel(cls, m: Matrix) -> "Subspace":
        rows, piv = _rref_rows([list(r) for r in m.rows], m.ncols)
        n = m.ncols
        pset = set(piv)
        vecs = []
        for f in range(n):
            if f in pset:
                continue
            v = [Fraction(0)] * n
            v[f] = Fraction(1)
            for i, pc in enumerate(piv):
                v[pc] = -rows[i][f]
            vecs.append(v)
        return cls(vecs, n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> Matrix:
        """Basis rows as a ``dim x N`` matrix."""
        return Matrix._trusted(self.basis, self.ambient_dim)

    def sort_key(self):
        return (self.dim, self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ambient_dim, self.basis))
        return self._hash

    def __repr__(self):
        vecs = ", ".join("(" + ", ".join(str(x) for x in b) + ")" for b in self.basis)
        return f"Subspace(dim={self.dim}, N={self.ambient_dim}, [{vecs}])"

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise ValueError(
                f"ambient dimension mismatch: {self.ambient_dim} vs {other.ambient_dim}"
            )

    def __contains__(self, v) -> bool:
        if len(v) != self.ambient_dim:
            raise ValueError("vector length does not match ambient dimension")
        r = [as_rational(x) for x in v]
        for row, pc in zip(self.basis, self.pivots):
            f = r[pc]
            if f:
                r = [a - f * b for a, b in zip(r, row)]
        return not any(r)

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return self.dim <= other.dim and all(b in other for b in self.basis)

    def __ge__(self, other: "Subspace") -> bool:
        return other <= self

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if not other.basis:
            return self
        if not self.basis:
            return other
        return Subspace(self.basis + other.basis, self.ambient_dim)

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        if self.dim == self.ambient_dim:
            return other
        if other.dim == self.ambient_dim:
            return self
        ann = self.annihilator().basis + other.annihilator().basis
        return Subspace.kernel(Matrix._trusted(ann, self.ambient_dim))

    def annihilator(self) -> "Subspace":
        """Functionals (as vectors, via the dot product) vanishing on ``self``."""
        if not self.basis:
            return Subspace.full(self.ambient_dim)
        return Subspace.kernel(self.matrix())

    def image(self, m: Matrix) -> "Subspace":
        if m.ncols != self.ambient_dim:
            raise ValueError("matrix does not act on this ambient space")
        return Subspace([m.apply(b) for b in self.basis], m.nrows)

    def preimage(self, m: Matrix) -> "Subspace":
        """``{x : m x in self}``."""
        if m.nrows != self.ambient_dim:
            raise ValueError("matrix does not map into this ambient space")
        ann = self.annihilator()
        if not ann.basis:
            return Subspace.full(m.ncols)
        return Subspace.kernel(ann.matrix() @ m)

    def coordinates(self, v: Sequence) -> Vector:
        """Coefficients of ``v`` in the canonical basis; ``v`` must lie in ``self``."""
        if v not in self:
            raise ValueError("vector is not in the subspace")
        return tuple(as_rational(v[pc]) for pc in self.pivots)

    def is_stable_under(self, m: Matrix) -> bool:
        return all(m.apply(b) in self for b in self.basis)

    def complement_in(self, upper: "Subspace") -> "Subspace":
        """A subspace ``W`` of ``upper`` with ``W + self = upper`` and ``W & self = 0``.

        ``self`` must be contained in ``upper``. The basis vectors of ``upper``
        are added greedily, so the result is deterministic.
        """
        if not self <= upper:
            raise ValueError("lower subspace is not contained in upper")
        current = self
        chosen = []
        for b in upper.basis:
            if current.dim == upper.dim:
                break
            if b not in current:
                chosen.append(b)
                current = current + Subspace([b], self.ambient_dim)
        return Subspace(chosen, self.ambient_dim)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a & b


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return a + b


def sum_all(spaces: Iterable[Subspace], ambient_dim: int) -> Subspace:
    vecs = []
    for s in spaces:
        if s.ambient_dim != ambient_dim:
            raise ValueError("ambient dimension mismatch")
        vecs.extend(s.basis)
    return Subspace(vecs, ambient_dim)


def intersect_all(spaces: Iterable[Subspace], ambient_dim: int) -> Subspace:
    ann = []
    for s in spaces:
        if s.ambient_dim != ambient_dim:
            raise ValueError("ambient dimension mismatch")
        ann.extend(s.annihilator().basis)
    if not ann:
        return Subspace.full(ambient_dim)
    return Subspace.kernel(Matrix._trusted(tuple(ann), ambient_dim))


def generalized_eigenspace(op: Matrix, lam, exact: bool = False) -> Subspace:
    """Kernel of ``(op - lam)^N``, or of ``op - lam`` when ``exact`` is set."""
    if not op.is_square():
        raise ValueError("eigenspaces need a square matrix")
    n = op.nrows
    shifted = op - Matrix.identity(n).scale(as_rational(lam))
    if exact:
        return Subspace.kernel(shifted)
    return Subspace.kernel(shifted ** n)


def eigenspace(op: Matrix, lam) -> Subspace:
    return generalized_eigenspace(op, lam, exact=True)


def quotient_map(upper: Subspace, lower: Subspace) -> Matrix:
    """A ``k x N`` matrix inducing an isomorphism ``upper / lower -> Q^k``.

    Restricted to ``upper`` its kernel is exactly ``lower``.
    """
    if not lower <= upper:
        raise ValueError("lower subspace is not contained in upper")
    ann = lower.annihilator()
    f = ann.matrix()
    image = upper.image(f)
    return f.submatrix(image.pivots, range(f.ncols))


def minimal_polynomial(m: Matrix) -> tuple:
    """Monic minimal polynomial as coefficients ``(c_0, ..., c_{k-1}, 1)``."""
    if not m.is_square():
        raise ValueError("minimal polynomial of a non-square matrix")
    n = m.nrows
    flat = []
    power = Matrix.identity(n)
    for k in range(n + 1):
        vec = tuple(x for r in power.rows for x in r)
        if flat:
            # express vec in terms of earlier powers, if possible
            basis = Matrix._trusted(tuple(flat), n * n).T
            aug = Matrix._trusted(
                tuple(r + (v,) for r, v in zip(basis.rows, vec)), len(flat) + 1
            )
            rows, piv = _rref_rows([list(r) for r in aug.rows], len(flat) + 1)
            if len(flat) not in piv:
                coeffs = [Fraction(0)] * len(flat)
                for i, pc in enumerate(piv):
                    coeffs[pc] = rows[i][-1]
                return tuple(-c for c in coeffs) + (Fraction(1),)
        flat.append(vec)
        power = power @ m
    raise AssertionError("Cayley-Hamilton guarantees termination")


def rational_sqrt(x: Fraction):
    """Exact square root of a nonnegative rational, or ``None`` if irrational."""
    x = as_rational(x)
    if x < 0:
        return None
    a, b = x.numerator, x.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def quadratic_roots(a, b, c) -> list:
    """Rational roots of ``a x^2 + b x + c`` (a != 0), sorted, without repetition."""
    a, b, c = as_rational(a), as_rational(b), as_rational(c)
    disc = b * b - 4 * a * c
    s = rational_sqrt(disc)
    if s is None:
        return []
    return sorted({(-b - s) / (2 * a), (-b + s) / (2 * a)})


def rational_eigenvalues_small(m: Matrix):
    """Rational roots of the minimal polynomial when it has degree <= 2.

    Returns ``None`` if the minimal polynomial has higher degree.
    """
    poly = minimal_polynomial(m)
    if len(poly) == 2:
        return [-poly[0]]
    if len(poly) == 3:
        return quadratic_roots(1, poly[1], poly[0])
    return None
