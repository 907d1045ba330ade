"""Symmetric bilinear forms on ``d = 2`` modules and the plectic/anti-plectic classification.

Forms are Gram matrices: ``lambda(x, y) = x^T G y``.  A map ``psi`` from a
source module to a target module is *lambda-compatible* when
``psi^T G_target psi = s G_source`` for a nonzero scalar ``s``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Matrix, Subspace, as_rational, eigenspace, quadratic_roots
from .phi_modules import PlecticModule, Rank2FPhi, hodge_filtration, tensor_induce, total_frobenius

SYMPLECTIC = Matrix([[0, 1], [-1, 0]])


class PreconditionError(ValueError):
    pass


class UnsupportedDegeneracy(ValueError):
    pass


def _ratio(a: Matrix, b: Matrix):
    """``c`` with ``a == c * b``, or ``None``.  ``b`` must be nonzero."""
    c = None
    for ra, rb in zip(a.rows, b.rows):
        for x, y in zip(ra, rb):
            if y == 0:
                if x != 0:
                    return None
            elif c is None:
                c = x / y
            elif x != c * y:
                return None
    return c


@dataclass(frozen=True)
class QuadraticStructure:
    module: PlecticModule
    gram: Matrix

    def __post_init__(self):
        n = self.module.dim
        if self.gram.shape != (n, n):
            raise ValueError(f"form must be {n}x{n}")
        if self.gram.T != self.gram:
            raise ValueError("form is not symmetric")
        if not self.gram.is_invertible():
            raise ValueError("form is degenerate")

    def pair(self, x, y) -> Fraction:
        return sum((a * b for a, b in zip(x, self.gram.apply(y))), Fraction(0))

    def restrict(self, sub: Subspace) -> Matrix:
        b = sub.matrix()
        return b @ self.gram @ b.T

    def scale_factor(self, i: int):
        """``c`` with ``phi_i^T G phi_i = c G``, or ``None``."""
        phi = self.module.phi(i)
        return _ratio(phi.T @ self.gram @ phi, self.gram)

    def twist_law_holds(self, i: int) -> bool:
        return self.scale_factor(i) == Fraction(self.module.p) ** (self.module.weight.w + 1)

    def is_isotropic(self, sub: Subspace) -> bool:
        return sub.dim == 0 or self.restrict(sub).is_zero()

    def is_maximal_isotropic(self, sub: Subspace) -> bool:
        return 2 * sub.dim == self.module.dim and self.is_isotropic(sub)

    def transport(self, module: PlecticModule, change: Matrix) -> "QuadraticStructure":
        """The form on ``module`` whose coordinates are ``change @ x`` in the old ones."""
        inv = change.inverse()
        return QuadraticStructure(module, inv.T @ self.gram @ inv)


def make_tensor_lambda(factors: Sequence[Rank2FPhi]) -> QuadraticStructure:
    """Product of the standard symplectic forms on the two factors."""
    if len(factors) != 2:
        raise ValueError(f"the tensor form needs exactly two factors, got {len(factors)}")
    return QuadraticStructure(tensor_induce(factors), SYMPLECTIC.kron(SYMPLECTIC))


def isotropic_lines_in_plane(gram: Matrix) -> list:
    """Rational lines ``(x, y)`` with ``a x^2 + 2b xy + c y^2 = 0``."""
    if gram.shape != (2, 2) or gram.T != gram:
        raise ValueError("expected a symmetric 2x2 form")
    a, b, c = gram[0, 0], gram[0, 1], gram[1, 1]
    if a * c - b * b == 0:
        raise ValueError("form is degenerate")
    if a == 0:
        vectors = [(1, 0), (c, -2 * b)]
    else:
        vectors = [(r, 1) for r in quadratic_roots(a, 2 * b, c)]
    lines = []
    for v in vectors:
        line = Subspace([v], 2)
        if line not in lines:
            lines.append(line)
    return sorted(lines, key=Subspace.sort_key)


def middle_isotropic_planes(q: QuadraticStructure) -> list:
    """Isotropic subspaces strictly between ``Fil_1^+ & Fil_2^+`` and ``Fil_1^+ + Fil_2^+``.

    Found as the isotropic lines of the induced form on the 2-dimensional
    quotient, lifted back to subspaces containing the intersection.
    """
    m = q.module
    if m.d != 2:
        raise ValueError("defined for d = 2")
    f1, f2 = m.fil_plus
    upper, lower = f1 + f2, f1 & f2
    if upper.dim - lower.dim != 2:
        raise ValueError(f"quotient has dimension {upper.dim - lower.dim}, expected 2")
    comp = lower.complement_in(upper).matrix()
    lines = isotropic_lines_in_plane(comp @ q.gram @ comp.T)
    return [Subspace([comp.T.apply(v) for v in line.basis], m.dim) + lower for line in lines]


# -- classification ---------------------------------------------------------

PLECTIC = "Plectic"
ANTI_PLECTIC = "AntiPlectic"
INCOMPATIBLE = "Incompatible"


@dataclass(frozen=True)
class IntertwinerClassification:
    verdict: str
    xi: Fraction | None
    filtration: str  # "respects", "interchanges" or "neither"
    witness: Matrix
    lambda_scale: Fraction
    xi_forced: bool  # both forms obey the twist law, so xi must be +1 or -1

    @property
    def label(self) -> str:
        if self.verdict == ANTI_PLECTIC:
            return f"{ANTI_PLECTIC}({self.xi})"
        return self.verdict

    def record(self) -> dict:
        return {
            "verdict": self.label,
            "filtration": self.filtration,
            "witness": [[str(x) for x in row] for row in self.witness.rows],
        }


def _check_pair(source: QuadraticStructure, target: QuadraticStructure):
    if source.module.d != 2 or target.module.d != 2:
        raise PreconditionError("classification is defined for d = 2")
    if source.module.dim != target.module.dim:
        raise PreconditionError("modules have different dimensions")


def lambda_scale(source: QuadraticStructure, target: QuadraticStructure, psi: Matrix):
    return _ratio(psi.T @ target.gram @ psi, source.gram)


def classify_intertwiner(
    source: QuadraticStructure, target: QuadraticStructure, psi: Matrix
) -> IntertwinerClassification:
    _check_pair(source, target)
    s, t = source.module, target.module
    if psi.shape != (s.dim, s.dim) or not psi.is_invertible():
        raise PreconditionError("psi must be an invertible square matrix")
    if psi @ total_frobenius(s) != total_frobenius(t) @ psi:
        raise PreconditionError("psi does not intertwine the total Frobenius")
    scale = lambda_scale(source, target, psi)
    if not scale:
        raise PreconditionError("psi does not scale the bilinear form")

    xi = None
    if all(psi @ s.phi(i) == t.phi(i) @ psi for i in (1, 2)):
        verdict = PLECTIC
    else:
        xi = _ratio(psi @ s.phi(1), t.phi(2) @ psi)
        if xi and psi @ s.phi(2) == (t.phi(1) @ psi).scale(1 / xi):
            verdict = ANTI_PLECTIC
        else:
            verdict, xi = INCOMPATIBLE, None

    forced = all(q.twist_law_holds(i) for q in (source, target) for i in (1, 2))
    if verdict == ANTI_PLECTIC and forced:
        # the twist law on both sides pins xi^2 = 1
        assert xi in (1, -1), f"anti-plectic xi = {xi} under the twist law"

    images = [f.image(psi) for f in s.fil_plus]
    if images == list(t.fil_plus):
        filtration = "respects"
    elif images == list(reversed(t.fil_plus)):
        filtration = "interchanges"
    else:
        filtration = "neither"
    return IntertwinerClassification(verdict, xi, filtration, psi, scale, forced)


@dataclass(frozen=True)
class _EigenLine:
    roots: tuple  # (eigenvalue of phi_1, eigenvalue of phi_2)
    vector: tuple

    @property
    def product(self):
        return self.roots[0] * self.roots[1]


def simultaneous_eigenlines(m: PlecticModule) -> list:
    """The four lines on which both partial Frobenii act by scalars."""
    pairs = []
    for i in (1, 2):
        pair = m.hecke_pair(i)
        if pair is None:
            raise UnsupportedDegeneracy(f"phi_{i} has no pair of rational Hecke roots")
        if pair[0] == pair[1]:
            raise UnsupportedDegeneracy(f"phi_{i} has a repeated root")
        pairs.append(pair)
    lines = []
    for a in pairs[0]:
        for b in pairs[1]:
            space = eigenspace(m.phi(1), a) & eigenspace(m.phi(2), b)
            if space.dim != 1:
                raise UnsupportedDegeneracy(f"simultaneous eigenspace ({a}, {b}) has dimension {space.dim}")
            lines.append(_EigenLine((a, b), space.basis[0]))
    return lines


def _matchings(src: list, tgt: list):
    """Bijections ``src -> tgt`` preserving the total-Frobenius eigenvalue."""
    groups = {}
    for k, line in enumerate(src):
        groups.setdefault(line.product, []).append(k)
    repeated = [g for g in groups.values() if len(g) > 1]
    if any(len(g) > 2 for g in repeated) or len(repeated) > 1:
        raise UnsupportedDegeneracy("more than one coincidence among the pairwise products")
    options = []
    for product, ks in groups.items():
        targets = [j for j, line in enumerate(tgt) if line.product == product]
        if len(targets) != len(ks):
            return
        options.append([(ks, perm) for perm in itertools.permutations(targets)])
    for combo in itertools.product(*options):
        sigma = {}
        for ks, perm in combo:
            sigma.update(zip(ks, perm))
        yield sigma


def _normalize(psi: Matrix) -> Matrix:
    for row in psi.rows:
        for x in row:
            if x != 0:
                return psi.scale(1 / x)
    return psi


def _is_minus_one_case(m: PlecticModule) -> bool:
    pairs = [m.hecke_pair(i) for i in (1, 2)]
    return all(p is not None and p[1] != 0 and p[0] / p[1] == -1 for p in pairs)


def find_structure_preserving_isos(source: QuadraticStructure, target: QuadraticStructure) -> list:
    """All lambda-compatible isomorphisms respecting total Frobenius and Hodge filtration, up to scalar.

    Such a map sends each simultaneous eigenline of the source to one of the
    target with the same total eigenvalue, so it is diagonal in eigenbases
    up to a product-preserving matching.  For each matching the Hodge
    filtration imposes linear conditions on the diagonal entries.
    """
    _check_pair(source, target)
    s, t = source.module, target.module
    for m in (s, t):
        if _is_minus_one_case(m):
            raise UnsupportedDegeneracy("both Hecke root ratios equal -1")
    src, tgt = simultaneous_eigenlines(s), simultaneous_eigenlines(t)
    n = s.dim
    w_inv = Matrix.from_columns([line.vector for line in src]).inverse()
    hs, ht = hodge_filtration(s), hodge_filtration(t)
    if hs.dims() != ht.dims() or (hs.lo, hs.hi) != (ht.lo, ht.hi):
        return []
    steps = [(hs.steps[k], ht.steps[k]) for k in sorted(hs.steps)]

    found = []
    for sigma in _matchings(src, tgt):
        cols = [tgt[sigma[k]].vector for k in range(n)]
        equations = []
        for upper_s, upper_t in steps:
            if upper_t.dim == n:
                continue
            ann = upper_t.annihilator().matrix()
            for u in upper_s.basis:
                coeff = w_inv.apply(u)
                for a in ann.rows:
                    equations.append(
                        [coeff[k] * sum(x * y for x, y in zip(a, cols[k])) for k in range(n)]
                    )
        space = Matrix(equations, n).kernel() if equations else Subspace.full(n)
        if space.dim == 0:
            continue
        if space.dim > 1:
            raise UnsupportedDegeneracy("the Hodge filtration leaves a positive-dimensional family of maps")
        c = space.basis[0]
        if any(x == 0 for x in c):
            continue
        psi = Matrix.from_columns([[c[k] * x for x in cols[k]] for k in range(n)]) @ w_inv
        psi = _normalize(psi)
        if not lambda_scale(source, target, psi):
            continue
        found.append(classify_intertwiner(source, target, psi))
    order = {PLECTIC: 0, ANTI_PLECTIC: 1, INCOMPATIBLE: 2}
    return sorted(found, key=lambda r: (order[r.verdict], r.witness.rows))


# -- hypotheses of the two classification statements ------------------------

@dataclass(frozen=True)
class PrimeEigenData:
    k: int
    t: int
    alpha: Fraction
    beta: Fraction


def pairwise_products(primes: Sequence[PrimeEigenData]) -> list:
    a, b = primes
    return [a.alpha * b.alpha, a.alpha * b.beta, a.beta * b.alpha, a.beta * b.beta]


def trivial_character(p: int, e: PrimeEigenData) -> bool:
    return e.alpha * e.beta == Fraction(p) ** (e.k + 2 * e.t + 1)


def nonbc_conditions(p: int, primes: Sequence[PrimeEigenData], small) -> dict:
    """Conditions (a)-(c) for a pair of primes; ``small(alpha, e)`` decides strict smallness."""
    return {
        "trivial_character": all(trivial_character(p, e) for e in primes),
        "small_root_exists": any(small(x, e) for e in primes for x in (e.alpha, e.beta)),
        "four_distinct_products": len(set(pairwise_products(primes))) == 4,
    }


def bc_conditions(p: int, primes: Sequence[PrimeEigenData], small) -> dict:
    """Base-change conditions, reading the base form's roots off the first prime."""
    a, b = primes
    same = {a.alpha, a.beta} == {b.alpha, b.beta} and (a.k, a.t) == (b.k, b.t)
    ratio_ok = a.beta != 0 and a.alpha / a.beta not in (1, -1)
    return {
        "equal_pairs": same,
        "equal_weights": a.k == b.k,
        "trivial_character": trivial_character(p, a),
        "distinct_roots_one_small": a.alpha != a.beta and (small(a.alpha, a) or small(a.beta, a)),
        "ratio_not_sign": ratio_ok,
    }


def as_prime_data(k, t, alpha, beta) -> PrimeEigenData:
    return PrimeEigenData(int(k), int(t), as_rational(alpha), as_rational(beta))
