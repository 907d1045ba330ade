"""Verifiers for the eigenspace/filtration splitting statements.

Each verifier records whether the hypotheses hold (distinct Hecke roots,
strictly small slope) separately from whether the conclusions hold; it runs
either way.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .lattice import all_subsets, format_subset, members, size
from .linalg import Matrix, Subspace, as_rational, format_rational, eigenspace, intersect_all, quotient_map, sum_all
from .phi_modules import PlecticModule, hecke_quadratic_check, strictly_small_slope


@dataclass(frozen=True)
class RootChoice:
    S: int
    roots: dict  # i -> Fraction, for i in S

    def __post_init__(self):
        if set(self.roots) != set(members(self.S)):
            raise ValueError("roots must be given exactly for the indices in S")

    @classmethod
    def of(cls, roots: dict) -> "RootChoice":
        roots = {int(i): as_rational(a) for i, a in roots.items()}
        mask = 0
        for i in roots:
            mask |= 1 << (i - 1)
        return cls(mask, roots)


@dataclass(frozen=True)
class Check:
    check_id: str
    hypothesis_ok: bool
    conclusion_ok: bool
    witness: str | None = None

    def record(self) -> dict:
        out = {
            "check_id": self.check_id,
            "hypothesis_ok": self.hypothesis_ok,
            "conclusion_ok": self.conclusion_ok,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, check_id, hypothesis_ok, conclusion_ok, witness=None):
        self.checks.append(Check(check_id, bool(hypothesis_ok), bool(conclusion_ok), witness))

    @property
    def passed(self) -> bool:
        return all(c.conclusion_ok for c in self.checks)

    @property
    def hypotheses_ok(self) -> bool:
        return all(c.hypothesis_ok for c in self.checks)

    def flags(self) -> tuple:
        return tuple((c.check_id, c.hypothesis_ok, c.conclusion_ok) for c in self.checks)

    def records(self) -> list:
        return [c.record() for c in self.checks]

    def extend(self, other: "Report"):
        self.checks.extend(other.checks)


def validate_root_choice(m: PlecticModule, rc: RootChoice) -> None:
    """Raise ``ValueError`` if an index is out of range or a root is not an eigenvalue."""
    for i, alpha in rc.roots.items():
        if not 1 <= i <= m.d:
            raise ValueError(f"index {i} outside 1..{m.d}")
        if eigenspace(m.phi(i), alpha).dim == 0:
            raise ValueError(f"{alpha} is not an eigenvalue of phi_{i}")


def root_hypothesis(m: PlecticModule, i: int, alpha) -> bool:
    """Distinct Hecke roots at ``i``, ``alpha`` one of them, and of strictly small slope."""
    pair = m.hecke_pair(i)
    if pair is None or pair[0] == pair[1] or alpha not in pair:
        return False
    return hecke_quadratic_check(m, i, pair) and strictly_small_slope(alpha, i, m.weight)


def qualifying_roots(m: PlecticModule, i: int) -> list:
    pair = m.hecke_pair(i)
    if pair is None:
        return []
    return [a for a in pair if root_hypothesis(m, i, a)]


def qualifying_root_choices(m: PlecticModule, mask: int):
    """Every ``RootChoice`` on ``S`` whose roots all satisfy the hypotheses."""
    idx = members(mask)
    options = [qualifying_roots(m, i) for i in idx]
    for combo in itertools.product(*options):
        yield RootChoice(mask, dict(zip(idx, combo)))


def simultaneous_eigenspace(m: PlecticModule, rc: RootChoice) -> Subspace:
    return intersect_all((eigenspace(m.phi(i), a) for i, a in rc.roots.items()), m.dim)


def fil_plus_sum(m: PlecticModule, mask: int) -> Subspace:
    return sum_all((m.fil_plus[i - 1] for i in members(mask)), m.dim)


@dataclass(frozen=True)
class FilMinusQuotient:
    """``D / sum_{i in S} Fil_i^+`` with an explicit projection to coordinates."""

    module: PlecticModule
    S: int
    projection: Matrix

    @property
    def quotient_dim(self) -> int:
        return self.projection.nrows

    def project(self, sub: Subspace) -> Subspace:
        return sub.image(self.projection)

    def fil(self, mask: int) -> Subspace:
        """Image of ``Fil^T`` in the quotient."""
        return self.project(self.module.fil(mask))


def fil_minus(m: PlecticModule, mask: int) -> FilMinusQuotient:
    lower = fil_plus_sum(m, mask)
    return FilMinusQuotient(m, mask, quotient_map(Subspace.full(m.dim), lower))


def rc_tag(rc: RootChoice) -> str:
    tag = format_subset(rc.S)
    if rc.roots:
        tag += "@" + ",".join(format_rational(rc.roots[i]) for i in sorted(rc.roots))
    return tag


def theorem_main_verify(m: PlecticModule, rc: RootChoice) -> Report:
    """Eigenspace dimension, transversality, and strict compatibility for every ``T``."""
    hyp = all(root_hypothesis(m, i, a) for i, a in rc.roots.items())
    S = rc.S
    tag = rc_tag(rc)
    eig = simultaneous_eigenspace(m, rc)
    lower = fil_plus_sum(m, S)
    quot = fil_minus(m, S)
    report = Report()

    expected = 1 << (m.d - size(S))
    report.add(f"main{tag}.eigenspace_dim", hyp, eig.dim == expected, f"dim={eig.dim}, expected={expected}")
    meet = eig & lower
    report.add(f"main{tag}.zero_intersection", hyp, meet.dim == 0, f"dim={meet.dim}")
    image = quot.project(eig)
    bij = meet.dim == 0 and image.dim == quot.quotient_dim
    report.add(f"main{tag}.projection_bijective", hyp, bij, f"image_dim={image.dim}, quotient_dim={quot.quotient_dim}")

    for T in all_subsets(m.d):
        source = m.fil(T) & eig
        target = quot.fil(T)
        mapped = quot.project(source)
        ok = mapped.dim == source.dim and mapped == target
        report.add(
            f"main{tag}.fil{format_subset(T)}.bijective",
            hyp,
            ok,
            f"source_dim={source.dim}, target_dim={target.dim}",
        )
        if S & T:
            report.add(
                f"main{tag}.fil{format_subset(T)}.vanishes",
                hyp,
                source.dim == 0 and target.dim == 0,
                f"source_dim={source.dim}, target_dim={target.dim}",
            )
    return report


@dataclass
class DecompositionReport:
    lines: dict  # mask -> Subspace
    hypothesis_ok: bool
    one_dimensional: bool
    direct_sum_ok: bool
    fil_split_ok: bool
    eigen_split_ok: bool

    @property
    def passed(self) -> bool:
        return self.one_dimensional and self.direct_sum_ok and self.fil_split_ok and self.eigen_split_ok

    def flags(self) -> tuple:
        return (
            self.hypothesis_ok,
            self.one_dimensional,
            self.direct_sum_ok,
            self.fil_split_ok,
            self.eigen_split_ok,
            tuple(sorted((s, x.dim) for s, x in self.lines.items())),
        )

    def report(self) -> Report:
        r = Report()
        h = self.hypothesis_ok
        r.add("xs.one_dimensional", h, self.one_dimensional)
        r.add("xs.direct_sum", h, self.direct_sum_ok)
        r.add("xs.fil_split", h, self.fil_split_ok)
        r.add("xs.eigen_split", h, self.eigen_split_ok)
        return r


def _is_direct(parts, n: int) -> bool:
    return sum_all(parts, n).dim == sum(p.dim for p in parts)


def xS_decomposition(m: PlecticModule, roots: dict) -> DecompositionReport:
    """The lines ``X(S) = Fil^S & (eigenspaces of phi_i at alpha_i for i not in S)``."""
    roots = {int(i): as_rational(a) for i, a in roots.items()}
    if set(roots) != set(range(1, m.d + 1)):
        raise ValueError("a root is needed for every index")
    n = m.dim
    eig = {i: eigenspace(m.phi(i), a) for i, a in roots.items()}
    lines = {}
    for S in all_subsets(m.d):
        outside = [eig[i] for i in range(1, m.d + 1) if not S >> (i - 1) & 1]
        lines[S] = m.fil(S) & intersect_all(outside, n)
    one_dim = all(x.dim == 1 for x in lines.values())
    direct = _is_direct(list(lines.values()), n) and sum(x.dim for x in lines.values()) == n
    fil_ok = eig_ok = True
    for i in range(1, m.d + 1):
        bit = 1 << (i - 1)
        inside = [x for s, x in lines.items() if s & bit]
        outside = [x for s, x in lines.items() if not s & bit]
        fil_ok &= _is_direct(inside, n) and sum_all(inside, n) == m.fil_plus[i - 1]
        eig_ok &= _is_direct(outside, n) and sum_all(outside, n) == eig[i]
    hyp = all(root_hypothesis(m, i, a) for i, a in roots.items())
    return DecompositionReport(lines, hyp, one_dim, direct, fil_ok, eig_ok)


def stability_hypothesis(m: PlecticModule, j: int) -> bool:
    """For every ``i != j``: two distinct Hecke roots, both of strictly small slope."""
    for i in range(1, m.d + 1):
        if i == j:
            continue
        pair = m.hecke_pair(i)
        if pair is None or pair[0] == pair[1]:
            return False
        if not all(root_hypothesis(m, i, a) for a in pair):
            return False
    return True


def phi_stability_check(m: PlecticModule, j: int) -> bool:
    """Whether ``Fil_j^+`` is stable under every ``phi_i`` with ``i != j``."""
    if not 1 <= j <= m.d:
        raise ValueError(f"index {j} outside 1..{m.d}")
    fil = m.fil_plus[j - 1]
    return all(fil.is_stable_under(m.phi(i)) for i in range(1, m.d + 1) if i != j)


def strictness_check(m: PlecticModule, rc: RootChoice, T: int) -> bool:
    """Bijectivity of ``D^S / (D^S & Fil^T) -> Fil_S^- / Fil^T Fil_S^-``."""
    eig = simultaneous_eigenspace(m, rc)
    lower = fil_plus_sum(m, rc.S)
    fil_t = m.fil(T)
    kernel = eig & (lower + fil_t)
    injective = kernel == eig & fil_t
    surjective = eig.dim - kernel.dim == m.dim - (lower + fil_t).dim
    return injective and surjective


def strictness_report(m: PlecticModule, rc: RootChoice) -> Report:
    hyp = all(root_hypothesis(m, i, a) for i, a in rc.roots.items())
    r = Report()
    for T in all_subsets(m.d):
        r.add(f"strict{rc_tag(rc)}.fil{format_subset(T)}", hyp, strictness_check(m, rc, T))
    return r


def stability_report(m: PlecticModule, j: int | None = None) -> Report:
    r = Report()
    for jj in ([j] if j is not None else range(1, m.d + 1)):
        r.add(f"stability.fil{jj}", stability_hypothesis(m, jj), phi_stability_check(m, jj))
    return r


def full_root_maps(m: PlecticModule):
    """Every full root map whose roots all satisfy the hypotheses."""
    for rc in qualifying_root_choices(m, (1 << m.d) - 1):
        yield rc.roots


__all__ = [
    "Check",
    "DecompositionReport",
    "FilMinusQuotient",
    "Report",
    "RootChoice",
    "fil_minus",
    "fil_plus_sum",
    "full_root_maps",
    "phi_stability_check",
    "qualifying_root_choices",
    "qualifying_roots",
    "rc_tag",
    "root_hypothesis",
    "simultaneous_eigenspace",
    "stability_hypothesis",
    "stability_report",
    "strictness_check",
    "strictness_report",
    "theorem_main_verify",
    "validate_root_choice",
    "xS_decomposition",
]
