"""Plectic filtered phi-modules: rank-2 local factors and their tensor inducts.

A ``PlecticModule`` is a ``2^d``-dimensional rational vector space with ``d``
commuting partial Frobenius operators and ``d`` partial filtrations.  Each
partial filtration has exactly two jumps (at ``t_i`` and ``t_i + k_i + 1``), so
it is stored only through its nontrivial step ``Fil_i^+``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Sequence

from .lattice import WeakIFiltration, all_subsets, build_filtration, members, size
from .linalg import (
    Matrix,
    Subspace,
    as_rational,
    eigenspace,
    is_prime,
    minimal_polynomial,
    rational_eigenvalues_small,
    sum_all,
    valuation,
)


@dataclass(frozen=True)
class WeightData:
    p: int
    k: tuple
    t: tuple

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if len(self.k) != len(self.t) or not self.k:
            raise ValueError("k and t must be nonempty and of equal length")
        if any(ki < 0 for ki in self.k):
            raise ValueError("weights k_i must be >= 0")
        ws = {ki + 2 * ti for ki, ti in zip(self.k, self.t)}
        if len(ws) != 1:
            raise ValueError(f"k_i + 2 t_i is not independent of i: {sorted(ws)}")

    @property
    def d(self) -> int:
        return len(self.k)

    @property
    def w(self) -> int:
        return self.k[0] + 2 * self.t[0]

    def jumps(self, i: int) -> tuple:
        """The two filtration jumps of the ``i``-th (1-based) partial filtration."""
        return (self.t[i - 1], self.t[i - 1] + self.k[i - 1] + 1)

    def hodge_total(self, i: int) -> int:
        return 2 * self.t[i - 1] + self.k[i - 1] + 1


@dataclass(frozen=True)
class Rank2FPhi:
    """A 2-dimensional filtered phi-module: ``phi`` plus the jump line at ``t + k + 1``."""

    p: int
    k: int
    t: int
    phi: Matrix
    fil_line: Subspace

    def __post_init__(self):
        if self.phi.shape != (2, 2) or not self.phi.is_invertible():
            raise ValueError("phi must be an invertible 2x2 matrix")
        if self.fil_line.ambient_dim != 2 or self.fil_line.dim != 1:
            raise ValueError("fil_line must be a line in Q^2")
        if self.k < 0:
            raise ValueError("k must be >= 0")

    @property
    def hodge_total(self) -> int:
        return 2 * self.t + self.k + 1

    def eigenvalues(self):
        """Rational eigenvalues of ``phi`` (possibly empty)."""
        return rational_eigenvalues_small(self.phi)


class ZFiltration:
    """A decreasing Z-indexed filtration given on ``[lo, hi]``.

    Below ``lo`` it is the whole space, above ``hi`` it is zero.
    """

    def __init__(self, steps: dict, ambient_dim: int):
        self.steps = dict(steps)
        self.ambient_dim = ambient_dim
        self.lo = min(steps)
        self.hi = max(steps)

    def __getitem__(self, n: int) -> Subspace:
        if n < self.lo:
            return Subspace.full(self.ambient_dim)
        if n > self.hi:
            return Subspace.zero(self.ambient_dim)
        return self.steps[n]

    def dims(self) -> dict:
        return {n: s.dim for n, s in sorted(self.steps.items())}

    def jumps(self) -> dict:
        """``n -> dim Fil^n - dim Fil^{n+1}`` for the nonzero differences."""
        out = {}
        for n in range(self.lo - 1, self.hi + 1):
            diff = self[n].dim - self[n + 1].dim
            if diff:
                out[n] = diff
        return out

    def distinct_steps(self) -> list:
        """The distinct nonzero proper subspaces occurring, largest first."""
        seen = []
        for n in range(self.lo, self.hi + 1):
            s = self.steps[n]
            if 0 < s.dim < self.ambient_dim and s not in seen:
                seen.append(s)
        return seen


@dataclass(frozen=True, eq=True)
class PlecticModule:
    weight: WeightData
    phis: tuple
    fil_plus: tuple

    def __post_init__(self):
        d = self.weight.d
        n = 1 << d
        if len(self.phis) != d or len(self.fil_plus) != d:
            raise ValueError(f"expected {d} partial Frobenii and {d} partial filtrations")
        for phi in self.phis:
            if phi.shape != (n, n):
                raise ValueError(f"partial Frobenius has shape {phi.shape}, expected {(n, n)}")
            if not phi.is_invertible():
                raise ValueError("partial Frobenius is not invertible")
        for a, b in itertools.combinations(self.phis, 2):
            if a @ b != b @ a:
                raise ValueError("partial Frobenii do not commute")
        half = n // 2
        for f in self.fil_plus:
            if f.ambient_dim != n or f.dim != half:
                raise ValueError(f"each Fil_i^+ must have dimension {half} in Q^{n}")

    @property
    def d(self) -> int:
        return self.weight.d

    @property
    def p(self) -> int:
        return self.weight.p

    @property
    def dim(self) -> int:
        return 1 << self.d

    @cached_property
    def filtration(self) -> WeakIFiltration:
        return build_filtration(self.fil_plus)

    def fil(self, mask: int) -> Subspace:
        return self.filtration[mask]

    def dimension_law_holds(self) -> bool:
        return all(self.fil(s).dim == 1 << (self.d - size(s)) for s in all_subsets(self.d))

    def validate(self) -> None:
        """Raise ``ValueError`` unless ``dim Fil^S = 2^(d - |S|)`` for all ``S``."""
        if not self.dimension_law_holds():
            raise ValueError(f"Fil^S dimensions violate 2^(d-|S|): {self.filtration.dims()}")

    def phi(self, i: int) -> Matrix:
        return self.phis[i - 1]

    def hecke_pair(self, i: int):
        """The two roots of the minimal polynomial of ``phi_i``, if it is a rational quadratic.

        Returns ``(a, a)`` for scalar ``phi_i`` and ``None`` when the roots are
        irrational or the minimal polynomial has degree > 2.
        """
        roots = rational_eigenvalues_small(self.phi(i))
        if not roots:
            return None
        if len(roots) == 1:
            if len(minimal_polynomial(self.phi(i))) == 2:
                return (roots[0], roots[0])
            return None  # (x - a)^2 with a nontrivial Jordan block
        return tuple(roots)


def total_frobenius(m: PlecticModule) -> Matrix:
    return reduce(lambda a, b: a @ b, m.phis)


def weight_caps(weight: WeightData) -> dict:
    """Largest total degree at which ``Fil^S`` still contributes to the Hodge filtration."""
    caps = {}
    for mask in all_subsets(weight.d):
        inside = set(members(mask))
        caps[mask] = sum(
            weight.t[i] + weight.k[i] + 1 if i + 1 in inside else weight.t[i]
            for i in range(weight.d)
        )
    return caps


def hodge_filtration(m: PlecticModule) -> ZFiltration:
    """Total filtration ``Fil^n = sum over n_1 + ... + n_d = n of the Fil_i^{n_i}``.

    With two-step partial filtrations the sum collapses to the ``Fil^S``
    whose largest attainable degree is at least ``n``.
    """
    caps = weight_caps(m.weight)
    lo, hi = caps[0], max(caps.values())
    steps = {}
    for n in range(lo, hi + 2):
        steps[n] = sum_all((m.fil(s) for s, c in caps.items() if c >= n), m.dim)
    return ZFiltration(steps, m.dim)


def strictly_small_slope(alpha, i: int, weight: WeightData) -> bool:
    alpha = as_rational(alpha)
    if alpha == 0:
        raise ValueError("Frobenius eigenvalues are nonzero")
    return valuation(alpha, weight.p) < weight.k[i - 1] + weight.t[i - 1]


def in_weil_interval(alpha, i: int, weight: WeightData) -> bool:
    alpha = as_rational(alpha)
    if alpha == 0:
        raise ValueError("Frobenius eigenvalues are nonzero")
    lo, hi = weight.jumps(i)
    return lo <= valuation(alpha, weight.p) <= hi


def rank2_slope_small(alpha, f: Rank2FPhi) -> bool:
    return valuation(alpha, f.p) < f.k + f.t


def stable_lines(f: Rank2FPhi):
    """``(line, eigenvalue)`` for the phi-stable rational lines, or ``None`` if every line is."""
    if len(minimal_polynomial(f.phi)) == 2:
        return None
    roots = rational_eigenvalues_small(f.phi) or []
    return [(eigenspace(f.phi, lam), lam) for lam in roots]


def is_weakly_admissible(f: Rank2FPhi) -> bool:
    """Newton-above-Hodge on stable lines, with equality on the whole space."""
    if valuation(f.phi.det(), f.p) != f.hodge_total:
        return False
    lines = stable_lines(f)
    high, low = f.t + f.k + 1, f.t
    if lines is None:
        lam = f.phi[0, 0]
        # fil_line and any other line are both stable
        return valuation(lam, f.p) >= high and valuation(lam, f.p) >= low
    for line, lam in lines:
        hodge = high if line == f.fil_line else low
        if valuation(lam, f.p) < hodge:
            return False
    return True


def hecke_quadratic_check(m: PlecticModule, i: int, roots: Sequence) -> bool:
    """Whether ``(phi_i - alpha)(phi_i - beta) = 0``."""
    alpha, beta = (as_rational(r) for r in roots)
    phi = m.phi(i)
    one = Matrix.identity(m.dim)
    return ((phi - one.scale(alpha)) @ (phi - one.scale(beta))).is_zero()


def _slot_operator(op: Matrix, i: int, d: int) -> Matrix:
    left = Matrix.identity(1 << (i - 1))
    right = Matrix.identity(1 << (d - i))
    return left.kron(op).kron(right)


def tensor_induce(factors: Sequence[Rank2FPhi]) -> PlecticModule:
    """Tensor product of rank-2 factors, factor 1 most significant in the basis."""
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    p = factors[0].p
    if any(f.p != p for f in factors):
        raise ValueError("factors have different primes")
    weight = WeightData(p, tuple(f.k for f in factors), tuple(f.t for f in factors))
    d = len(factors)
    phis = tuple(_slot_operator(f.phi, i + 1, d) for i, f in enumerate(factors))
    n = 1 << d
    e = Matrix.identity(2).rows
    fil_plus = []
    for i, f in enumerate(factors):
        line = f.fil_line.basis[0]
        vecs = []
        for choice in itertools.product(range(2), repeat=d - 1):
            pieces = [e[c] for c in choice]
            pieces.insert(i, line)
            vecs.append(reduce(lambda a, b: tuple(x * y for x in a for y in b), pieces))
        fil_plus.append(Subspace(vecs, n))
    return PlecticModule(weight, phis, tuple(fil_plus))


# -- instance generators ----------------------------------------------------

def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def _random_unit(rng: random.Random, p: int) -> Fraction:
    """A small rational with valuation 0 at ``p``."""
    while True:
        num = rng.randint(1, 9)
        den = rng.choice((1, 1, 1, 2, 3, 4))
        if num % p and den % p:
            return Fraction(rng.choice((1, -1)) * num, den)


def random_admissible_rank2(
    seed,
    p: int,
    k: int,
    t: int,
    *,
    low_slope: int | None = None,
    trivial_character: bool = True,
) -> Rank2FPhi:
    """A weakly admissible rank-2 module with distinct eigenvalues ``p^a u``, ``p^b u'``.

    ``a + b = 2t + k + 1`` and ``a <= b``.  With ``trivial_character`` the
    eigenvalues multiply to exactly ``p^(2t + k + 1)``.  The filtration line
    avoids both eigenlines.
    """
    rng = _rng(seed)
    total = 2 * t + k + 1
    a = rng.randint(t, total // 2) if low_slope is None else low_slope
    b = total - a
    if not t <= a <= b:
        raise ValueError(f"low slope {a} outside [{t}, {total // 2}]")
    while True:
        u = _random_unit(rng, p)
        alpha = Fraction(p) ** a * u
        beta = Fraction(p) ** total / alpha if trivial_character else Fraction(p) ** b * _random_unit(rng, p)
        if alpha != beta:
            break
    s = _random_unit(rng, p) * rng.choice((1, 1, p, Fraction(1, p)))
    return Rank2FPhi(p, k, t, Matrix.diag([alpha, beta]), Subspace([(1, s)], 2))


def random_weights(seed, d: int, *, min_k: int = 1, max_w: int = 6) -> tuple:
    """Random ``(k, t)`` lists with ``k_i + 2 t_i = w`` and every ``k_i >= min_k``."""
    rng = _rng(seed)
    w = rng.randint(min_k, max_w)
    ks, ts = [], []
    for _ in range(d):
        t = rng.randint(-1, (w - min_k) // 2)
        ks.append(w - 2 * t)
        ts.append(t)
    return ks, ts


def random_tensor_induct(
    seed, d: int, p: int = 5, *, min_k: int = 1, max_w: int = 6, trivial_character: bool = True
):
    """A random tensor-induced module. Returns ``(module, factors)``."""
    rng = _rng(seed)
    ks, ts = random_weights(rng, d, min_k=min_k, max_w=max_w)
    factors = [
        random_admissible_rank2(rng, p, k, t, trivial_character=trivial_character)
        for k, t in zip(ks, ts)
    ]
    return tensor_induce(factors), factors


def random_invertible(seed, n: int, bound: int = 3) -> Matrix:
    rng = _rng(seed)
    while True:
        m = Matrix([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)])
        if m.is_invertible():
            return m


def transport(m: PlecticModule, change: Matrix) -> PlecticModule:
    """The same module in new coordinates ``x -> change @ x``."""
    inv = change.inverse()
    phis = tuple(change @ phi @ inv for phi in m.phis)
    fils = tuple(f.image(change) for f in m.fil_plus)
    return PlecticModule(m.weight, phis, fils)


def scramble(m: PlecticModule, seed):
    """Conjugate by a random invertible matrix. Returns ``(module, change_of_basis)``."""
    change = random_invertible(seed, m.dim)
    return transport(m, change), change
