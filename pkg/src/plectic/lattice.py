"""Filtrations indexed by the subsets of ``{1, ..., d}``.

Subsets are bitmasks: bit ``i - 1`` set means ``i`` is in the subset.  A weak
I-filtration is built from ``d`` generator subspaces by intersecting; the
lattice they generate under sum and intersection can then be tested for
distributivity by brute force.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from .linalg import Subspace, sum_all

MAX_D = 8
DEFAULT_CLOSURE_CAP = 4096


class ClosureCapExceeded(RuntimeError):
    pass


def closure_cap() -> int:
    raw = os.environ.get("PLECTIC_CLOSURE_CAP")
    if raw is None:
        return DEFAULT_CLOSURE_CAP
    return int(raw)


# -- subset helpers ---------------------------------------------------------

def subset(indices: Iterable[int]) -> int:
    """Bitmask of a collection of 1-based indices."""
    mask = 0
    for i in indices:
        if i < 1:
            raise ValueError(f"subset indices are 1-based, got {i}")
        mask |= 1 << (i - 1)
    return mask


def members(mask: int) -> tuple:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def size(mask: int) -> int:
    return bin(mask).count("1")


def all_subsets(d: int) -> range:
    return range(1 << d)


def full_set(d: int) -> int:
    return (1 << d) - 1


def format_subset(mask: int) -> str:
    return "{" + ",".join(str(i) for i in members(mask)) + "}"


def strict_supersets(mask: int, d: int) -> list:
    return [t for t in all_subsets(d) if t != mask and t & mask == mask]


# -- weak I-filtrations -----------------------------------------------------

@dataclass(frozen=True)
class WeakIFiltration:
    ambient_dim: int
    d: int
    generators: tuple
    table: dict  # mask -> Subspace

    def __getitem__(self, mask: int) -> Subspace:
        return self.table[mask]

    def dims(self) -> dict:
        return {s: v.dim for s, v in self.table.items()}


def build_filtration(generators: Sequence[Subspace]) -> WeakIFiltration:
    """``Fil^S`` = intersection of the generators indexed by ``S``; ``Fil^{}`` is everything."""
    gens = tuple(generators)
    d = len(gens)
    if not 1 <= d <= MAX_D:
        raise ValueError(f"d must be in [1, {MAX_D}], got {d}")
    n = gens[0].ambient_dim
    if any(g.ambient_dim != n for g in gens):
        raise ValueError("generators live in different ambient spaces")
    table = {0: Subspace.full(n)}
    # Fil^S = Fil^{S - max} & Fil_max, filled in increasing mask order
    for mask in range(1, 1 << d):
        top = mask.bit_length() - 1
        table[mask] = table[mask & ~(1 << top)] & gens[top]
    return WeakIFiltration(n, d, gens, table)


def graded_piece(f: WeakIFiltration, mask: int):
    """Dimension of ``Fil^S / sum_{T > S} Fil^T`` and a lift of it inside ``Fil^S``."""
    top = f[mask]
    below = sum_all((f[t] for t in strict_supersets(mask, f.d)), f.ambient_dim)
    lower = top & below
    return top.dim - lower.dim, lower.complement_in(top)


# -- lattice closure and distributivity ------------------------------------

@dataclass(frozen=True)
class LatticeClosure:
    """Subspaces closed under sum and intersection, sorted by (dim, basis).

    ``join[i][j]`` and ``meet[i][j]`` are indices into ``elements``.
    """

    elements: tuple
    join: tuple
    meet: tuple

    def __len__(self):
        return len(self.elements)

    def index(self, s: Subspace) -> int:
        return self.elements.index(s)


def closure_of(spaces: Iterable[Subspace], ambient_dim: int, cap: int | None = None) -> LatticeClosure:
    if cap is None:
        cap = closure_cap()
    found = {Subspace.zero(ambient_dim), Subspace.full(ambient_dim)}
    found.update(spaces)
    if len(found) > cap:
        raise ClosureCapExceeded(f"lattice closure exceeds {cap} elements")
    elements = list(found)
    done = 0  # pairs (i, j) with j < done have been combined already
    while done < len(elements):
        new = elements[done]
        for other in elements[: done + 1]:
            for s in (new + other, new & other):
                if s not in found:
                    found.add(s)
                    elements.append(s)
                    if len(found) > cap:
                        raise ClosureCapExceeded(f"lattice closure exceeds {cap} elements")
        done += 1
    elements.sort(key=Subspace.sort_key)
    pos = {s: i for i, s in enumerate(elements)}
    n = len(elements)
    join = [[0] * n for _ in range(n)]
    meet = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            a, b = elements[i], elements[j]
            join[i][j] = join[j][i] = pos[a + b]
            meet[i][j] = meet[j][i] = pos[a & b]
    return LatticeClosure(tuple(elements), tuple(map(tuple, join)), tuple(map(tuple, meet)))


def lattice_closure(f: WeakIFiltration, cap: int | None = None) -> LatticeClosure:
    return closure_of(list(f.generators) + list(f.table.values()), f.ambient_dim, cap)


@dataclass(frozen=True)
class DistributivityResult:
    distributive: bool
    witness: tuple | None  # (A, B, C) with A & (B + C) != (A & B) + (A & C)
    closure_size: int

    def __bool__(self):
        return self.distributive


def first_nondistributive_triple(lat: LatticeClosure):
    join, meet = lat.join, lat.meet
    n = len(lat)
    for a in range(n):
        ma = meet[a]
        for b in range(n):
            mab = ma[b]
            jb = join[b]
            for c in range(n):
                if ma[jb[c]] != join[mab][ma[c]]:
                    return a, b, c
    return None


def is_distributive(f: WeakIFiltration, cap: int | None = None) -> DistributivityResult:
    """Exhaustive check of ``A & (B + C) == (A & B) + (A & C)`` over the closure."""
    lat = lattice_closure(f, cap)
    hit = first_nondistributive_triple(lat)
    if hit is None:
        return DistributivityResult(True, None, len(lat))
    return DistributivityResult(False, tuple(lat.elements[i] for i in hit), len(lat))


def three_lines_example() -> WeakIFiltration:
    """Three distinct lines in ``Q^2``: the smallest non-distributive configuration."""
    lines = [Subspace([v], 2) for v in ((1, 0), (0, 1), (1, 1))]
    return build_filtration(lines)
