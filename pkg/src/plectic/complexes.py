"""Finite cochain complexes whose coordinates carry subset labels.

Every basis vector of every term has a label ``T`` (a subset bitmask).  The
differentials only map a label ``T`` into labels containing ``T``, so for
each up-closed family ``U`` of labels the coordinates with label in ``U``
span a subcomplex.  ``Fil^S`` is the subcomplex of labels containing ``S``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .lattice import (
    ClosureCapExceeded,
    WeakIFiltration,
    all_subsets,
    build_filtration,
    closure_cap,
    format_subset,
    full_set,
    graded_piece,
)
from .linalg import Matrix, Subspace, quotient_map, sum_all


@dataclass(frozen=True)
class FiniteComplex:
    d: int
    labels: tuple  # labels[n][k]: label of coordinate k in degree n
    diffs: tuple  # diffs[n]: degree n -> degree n + 1

    def __post_init__(self):
        dims = self.dims
        if len(self.diffs) != max(len(dims) - 1, 0):
            raise ValueError("need one differential between each pair of adjacent degrees")
        top = full_set(self.d)
        for n, labs in enumerate(self.labels):
            if any(lab & ~top for lab in labs):
                raise ValueError(f"label outside {{1..{self.d}}} in degree {n}")
        for n, dn in enumerate(self.diffs):
            if dn.shape != (dims[n + 1], dims[n]):
                raise ValueError(f"differential {n} has shape {dn.shape}, expected {(dims[n + 1], dims[n])}")
            for r, row in enumerate(dn.rows):
                for c, x in enumerate(row):
                    if x and self.labels[n][c] & ~self.labels[n + 1][r]:
                        raise ValueError(
                            f"differential {n} maps label {format_subset(self.labels[n][c])} "
                            f"into {format_subset(self.labels[n + 1][r])}"
                        )
        for n in range(len(self.diffs) - 1):
            if not (self.diffs[n + 1] @ self.diffs[n]).is_zero():
                raise ValueError(f"d o d != 0 at degree {n}")

    @property
    def dims(self) -> tuple:
        return tuple(len(labs) for labs in self.labels)

    @property
    def top(self) -> int:
        return len(self.labels) - 1

    def coords(self, n: int, upset: int) -> list:
        """Coordinates in degree ``n`` whose label belongs to the up-set bitmask ``upset``."""
        return [k for k, lab in enumerate(self.labels[n]) if upset >> lab & 1]

    def diff(self, n: int) -> Matrix:
        """The differential out of degree ``n``, with zero maps past either end."""
        dims = self.dims
        if 0 <= n < len(self.diffs):
            return self.diffs[n]
        rows = dims[n + 1] if 0 <= n + 1 < len(dims) else 0
        cols = dims[n] if 0 <= n < len(dims) else 0
        return Matrix.zeros(rows, cols)


@dataclass(frozen=True)
class Subcomplex:
    complex: FiniteComplex
    spaces: tuple  # one Subspace per degree

    def __post_init__(self):
        c = self.complex
        for n in range(len(self.spaces) - 1):
            if not self.spaces[n].image(c.diffs[n]) <= self.spaces[n + 1]:
                raise ValueError(f"not closed under the differential in degree {n}")

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * s.dim for n, s in enumerate(self.spaces))


def _unit(n: int, k: int) -> tuple:
    return tuple(1 if j == k else 0 for j in range(n))


def labeled_subcomplex(c: FiniteComplex, upset: int) -> Subcomplex:
    spaces = tuple(
        Subspace([_unit(dim, k) for k in c.coords(n, upset)], dim) for n, dim in enumerate(c.dims)
    )
    return Subcomplex(c, spaces)


def principal_upset(mask: int, d: int) -> int:
    """Bitmask over all subsets of the labels ``T`` containing ``mask``."""
    out = 0
    for t in all_subsets(d):
        if t & mask == mask:
            out |= 1 << t
    return out


def fil_subcomplex(c: FiniteComplex, mask: int) -> Subcomplex:
    return labeled_subcomplex(c, principal_upset(mask, c.d))


def _as_subcomplex(c) -> Subcomplex:
    return c if isinstance(c, Subcomplex) else labeled_subcomplex(c, principal_upset(0, c.d))


def cohomology(c, n: int):
    """``(dim, representative)`` of ``H^n``; the representative complements the coboundaries."""
    sub = _as_subcomplex(c)
    cx = sub.complex
    if not 0 <= n <= cx.top:
        return 0, Subspace.zero(0)
    here = sub.spaces[n]
    cocycles = here & Subspace.kernel(cx.diff(n)) if n < cx.top else here
    boundaries = sub.spaces[n - 1].image(cx.diffs[n - 1]) if n > 0 else Subspace.zero(here.ambient_dim)
    rep = boundaries.complement_in(cocycles)
    return rep.dim, rep


# -- factor pieces and tensor products ---------------------------------------

def _nonzero(rng: random.Random, bound: int = 4) -> int:
    return rng.choice([x for x in range(-bound, bound + 1) if x])


def factor_piece(kind: str, rng: random.Random) -> FiniteComplex:
    """A one-prime complex with ``H^1 = Q^2``, ``H^1(Fil^{1}) = Q`` and nothing else.

    ``"a"``: the filtered slot is hit from degree 0.  ``"b"``: it maps onto
    degree 2.  ``"trivial"``: both slots sit in degree 1 with no differentials.
    """
    E, ONE = 0, 1
    if kind == "a":
        col = [_nonzero(rng), _nonzero(rng), _nonzero(rng)]
        return FiniteComplex(1, ((E,), (E, E, ONE), ()), (Matrix([[x] for x in col]), Matrix.zeros(0, 3)))
    if kind == "b":
        row = [_nonzero(rng), _nonzero(rng), _nonzero(rng)]
        return FiniteComplex(1, ((), (E, ONE, ONE), (ONE,)), (Matrix.zeros(3, 0), Matrix([row])))
    if kind == "trivial":
        return FiniteComplex(1, ((), (E, ONE)), (Matrix.zeros(2, 0),))
    raise ValueError(f"unknown piece kind {kind!r}")


def tensor_complex(a: FiniteComplex, b: FiniteComplex) -> FiniteComplex:
    """Tensor product with the Koszul sign; labels of ``b`` are shifted past those of ``a``."""
    top = a.top + b.top
    basis = [[] for _ in range(top + 1)]  # (i, ka, kb) per degree
    for i in range(a.top + 1):
        for j in range(b.top + 1):
            for ka in range(a.dims[i]):
                for kb in range(b.dims[j]):
                    basis[i + j].append((i, ka, kb))
    labels = tuple(
        tuple(a.labels[i][ka] | b.labels[n - i][kb] << a.d for i, ka, kb in basis[n]) for n in range(top + 1)
    )
    index = [{key: k for k, key in enumerate(level)} for level in basis]
    diffs = []
    for n in range(top):
        rows = [[0] * len(basis[n]) for _ in range(len(basis[n + 1]))]
        for col, (i, ka, kb) in enumerate(basis[n]):
            j = n - i
            if i < a.top:
                da = a.diffs[i]
                for r in range(da.nrows):
                    x = da[r, ka]
                    if x:
                        rows[index[n + 1][(i + 1, r, kb)]][col] += x
            if j < b.top:
                db = b.diffs[j]
                sign = -1 if i % 2 else 1
                for r in range(db.nrows):
                    x = db[r, kb]
                    if x:
                        rows[index[n + 1][(i, ka, r)]][col] += sign * x
        diffs.append(Matrix(rows, len(basis[n])))
    return FiniteComplex(a.d + b.d, labels, tuple(diffs))


def _filtered_unipotent(labels: Sequence[int], rng: random.Random, density: float = 0.3) -> Matrix:
    """Integer unipotent matrix preserving every labeled subspace."""
    n = len(labels)
    order = sorted(range(n), key=lambda k: (bin(labels[k]).count("1"), k))
    rank = {k: pos for pos, k in enumerate(order)}
    rows = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    for r in range(n):
        for c in range(n):
            # column c may spread only into labels containing its own, later in the order
            if rank[r] > rank[c] and labels[r] & labels[c] == labels[c] and rng.random() < density:
                rows[r][c] = _nonzero(rng, 2)
    return Matrix(rows, n)


def abstract_bgg(d: int, seed, max_dim: int = 32) -> FiniteComplex:
    """Random complex with every ``Fil^S`` concentrated in degree ``d`` with ``H^d`` of dim ``2^(d-|S|)``.

    A tensor product of ``d`` one-prime pieces, conjugated by a random
    unipotent change of basis that preserves the labeled filtration.
    """
    if not 1 <= d <= 6:
        raise ValueError(f"d must be in [1, 6], got {d}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    budget = max(max_dim, 2 ** (d + 1))
    kinds, size = [], 1
    for left in range(d, 0, -1):
        heavy = size * 4 * 2 ** (left - 1) <= budget
        kind = rng.choice(("a", "b", "trivial")) if heavy else "trivial"
        kinds.append(kind)
        size *= 2 if kind == "trivial" else 4
    rng.shuffle(kinds)
    c = factor_piece(kinds[0], rng)
    for kind in kinds[1:]:
        c = tensor_complex(c, factor_piece(kind, rng))
    gs = [_filtered_unipotent(labs, rng) for labs in c.labels]
    diffs = tuple(gs[n + 1] @ dn @ gs[n].inverse() for n, dn in enumerate(c.diffs))
    return FiniteComplex(c.d, c.labels, diffs)


def non_concentrated_example() -> FiniteComplex:
    """``d = 1``: a ``{1}``-labeled class in degree 0 that nothing kills."""
    return FiniteComplex(1, ((1,), (0, 1)), (Matrix.zeros(2, 1),))


# -- the lattice of labeled subcomplexes -------------------------------------

def upset_lattice(d: int, cap: int | None = None) -> list:
    """All nonempty up-sets of subsets, as bitmasks, generated by the principal ones."""
    if cap is None:
        cap = closure_cap()
    principal = [principal_upset(s, d) for s in all_subsets(d)]
    found = set(principal)
    frontier = list(principal)
    while frontier:
        nxt = []
        for u in frontier:
            for p in principal:
                v = u | p
                if v not in found:
                    found.add(v)
                    nxt.append(v)
                    if len(found) > cap:
                        raise ClosureCapExceeded(f"subcomplex lattice exceeds {cap} elements")
        frontier = nxt
    return sorted(found, key=lambda u: (bin(u).count("1"), u))


def format_upset(upset: int, d: int) -> str:
    return "{" + ", ".join(format_subset(t) for t in all_subsets(d) if upset >> t & 1) + "}"


@dataclass(frozen=True)
class NotConcentrated:
    upset: int
    degree: int
    dim: int

    def describe(self, d: int) -> str:
        return f"subcomplex on labels {format_upset(self.upset, d)} has H^{self.degree} of dimension {self.dim}"


@dataclass(frozen=True)
class ConcentrationCertificate:
    degree: int
    dims: dict  # upset -> dim H^degree


@dataclass(frozen=True)
class MorphismCheck:
    ok: bool
    witness: object  # NotConcentrated, a failing (U, V) pair, or None
    certificate: ConcentrationCertificate | None
    induced: WeakIFiltration | None
    graded_dims: dict | None

    def __bool__(self):
        return self.ok


def _cohomology_dims(c: FiniteComplex, upset: int) -> list:
    coords = [c.coords(n, upset) for n in range(c.top + 1)]
    ranks = [c.diffs[n].submatrix(coords[n + 1], coords[n]).rank() for n in range(c.top)]
    out = []
    for n in range(c.top + 1):
        r_out = ranks[n] if n < c.top else 0
        r_in = ranks[n - 1] if n > 0 else 0
        out.append(len(coords[n]) - r_out - r_in)
    return out


def lattice_morphism_check(c: FiniteComplex, degree: int, cap: int | None = None) -> MorphismCheck:
    """Whether ``U -> image of H^degree(C_U) in H^degree(C)`` preserves sums and intersections.

    Join preservation for every pair follows from ``f(U) = sum of f(Fil^T)``
    over ``T in U``, which is checked for each ``U``.  Given that, meet
    preservation for a pair is the dimension identity
    ``dim f(U & V) + dim f(U | V) = dim f(U) + dim f(V)``, since
    ``f(U & V)`` is always contained in ``f(U) & f(V)``.
    """
    d = c.d
    lattice = upset_lattice(d, cap)
    dims = {}
    for u in lattice:
        h = _cohomology_dims(c, u)
        for n, dim in enumerate(h):
            if n != degree and dim:
                return MorphismCheck(False, NotConcentrated(u, n, dim), None, None, None)
        dims[u] = h[degree] if 0 <= degree <= c.top else 0
    cert = ConcentrationCertificate(degree, dims)

    whole = principal_upset(0, d)
    n_here = c.dims[degree]
    out = c.diff(degree)
    cocycles = Subspace.kernel(out) if out.nrows else Subspace.full(n_here)
    boundaries = Subspace.zero(n_here) if degree == 0 else Subspace.full(c.dims[degree - 1]).image(c.diffs[degree - 1])
    q = quotient_map(cocycles, boundaries)
    h_dim = q.nrows

    images = {}
    for u in lattice:
        cols = c.coords(degree, u)
        local = out.submatrix(range(out.nrows), cols).kernel() if out.nrows else Subspace.full(len(cols))
        vectors = []
        for z in local.basis:
            full = [0] * n_here
            for k, x in zip(cols, z):
                full[k] = x
            vectors.append(q.apply(full))
        images[u] = Subspace(vectors, h_dim)

    principal = {s: principal_upset(s, d) for s in all_subsets(d)}
    for u in lattice:
        gens = [images[p] for s, p in principal.items() if u >> s & 1]
        if sum_all(gens, h_dim) != images[u]:
            return MorphismCheck(False, ("join", u), cert, None, None)
    for i, u in enumerate(lattice):
        for v in lattice[i + 1 :]:
            if images[u & v].dim + images[u | v].dim != images[u].dim + images[v].dim:
                return MorphismCheck(False, ("meet", u, v), cert, None, None)

    induced = build_filtration([images[principal[1 << i]] for i in range(d)])
    for s, p in principal.items():
        if induced[s] != images[p]:
            return MorphismCheck(False, ("meet", p), cert, None, None)
    graded = {s: graded_piece(induced, s)[0] for s in all_subsets(d)}
    assert images[whole].dim == h_dim
    return MorphismCheck(True, None, cert, induced, graded)
