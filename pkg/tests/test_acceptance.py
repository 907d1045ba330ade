"""Acceptance criteria, all checked exactly.  Each test prints one PASS/FAIL line."""

import random
import time

import pytest

from oracles import mutate, sympy_admissible
from plectic.complexes import NotConcentrated, abstract_bgg, lattice_morphism_check, non_concentrated_example
from plectic.lattice import all_subsets, is_distributive, size, three_lines_example
from plectic.linalg import Subspace, eigenspace
from plectic.phi_modules import (
    Rank2FPhi,
    is_weakly_admissible,
    random_admissible_rank2,
    random_invertible,
    random_tensor_induct,
    scramble,
    tensor_induce,
)
from plectic.quadratic import (
    QuadraticStructure,
    find_structure_preserving_isos,
    make_tensor_lambda,
    middle_isotropic_planes,
    pairwise_products,
    as_prime_data,
)
from plectic.theorems import (
    full_root_maps,
    phi_stability_check,
    qualifying_root_choices,
    stability_hypothesis,
    stability_report,
    theorem_main_verify,
    xS_decomposition,
)

POPULATION = 210


def announce(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def population():
    """Seeded tensor inducts with d in {1, 2, 3}."""
    return [random_tensor_induct(seed, 1 + seed % 3)[0] for seed in range(POPULATION)]


def small_slope_instance(seed, d):
    """Every factor has both Hecke roots of strictly small slope."""
    rng = random.Random(seed)
    w = rng.choice((5, 6))
    options = [(k, (w - k) // 2) for k in range(4, w + 3) if (w - k) % 2 == 0]
    factors = []
    for _ in range(d):
        k, t = rng.choice(options)
        factors.append(random_admissible_rank2(rng, rng.choice((3, 5)) if not factors else factors[0].p, k, t, low_slope=t + 2))
    return tensor_induce(factors)


def transport_rank2(f: Rank2FPhi, change):
    return Rank2FPhi(f.p, f.k, f.t, change @ f.phi @ change.inverse(), f.fil_line.image(change))


def lambda_law_flags(q: QuadraticStructure):
    m = q.module
    flags = [q.twist_law_holds(i) for i in (1, 2)]
    flags += [q.is_maximal_isotropic(f) for f in m.fil_plus]
    for i in (1, 2):
        flags += [q.is_maximal_isotropic(eigenspace(m.phi(i), a)) for a in m.hecke_pair(i)]
    flags.append(set(middle_isotropic_planes(q)) == set(m.fil_plus))
    return tuple(flags)


def equal_factor_forms(count):
    out = []
    for seed in range(count):
        rng = random.Random(1000 + seed)
        k, t = rng.choice(((2, 0), (3, 0), (4, -1), (4, 1)))
        f = random_admissible_rank2(rng, 5, k, t)
        out.append(make_tensor_lambda([f, f]))
    return out


def four_distinct_forms(count):
    out, seed = [], 0
    while len(out) < count:
        rng = random.Random(2000 + seed)
        seed += 1
        f1 = random_admissible_rank2(rng, 5, 2, 0)
        f2 = random_admissible_rank2(rng, 5, rng.choice((4, 6)), -1 if rng.random() < 0.5 else -2)
        if f2.k + 2 * f2.t != 2:
            continue
        data = [as_prime_data(f.k, f.t, *f.eigenvalues()) for f in (f1, f2)]
        if len(set(pairwise_products(data))) == 4:
            out.append(make_tensor_lambda([f1, f2]))
    return out


def class_summary(results):
    return [(r.label, r.filtration) for r in results]


def test_criterion_01_three_lines(capsys):
    start = time.perf_counter()
    res = is_distributive(three_lines_example())
    elapsed = time.perf_counter() - start
    ok = not res.distributive and res.witness is not None
    if ok:
        a, b, c = res.witness
        ok = a & (b + c) != (a & b) + (a & c)
    ok = ok and elapsed < 1.0
    announce(capsys, 1, ok, f"three lines in Q^2 non-distributive with witness triple ({elapsed:.3f} s)")


def test_criterion_02_main_theorem(capsys, population):
    start = time.perf_counter()
    checked = failures = 0
    distinct = all(m.hecke_pair(i)[0] != m.hecke_pair(i)[1] for m in population for i in range(1, m.d + 1))
    for m in population:
        for mask in all_subsets(m.d):
            for rc in qualifying_root_choices(m, mask):
                checked += 1
                failures += not theorem_main_verify(m, rc).passed
    elapsed = time.perf_counter() - start
    ok = distinct and failures == 0 and checked >= POPULATION and elapsed < 60
    announce(
        capsys,
        2,
        ok,
        f"{len(population)} modules, {checked} root choices, {failures} failures ({elapsed:.1f} s)",
    )


def test_criterion_03_xs_decomposition(capsys, population):
    covered = checked = failures = 0
    for m in population:
        maps = list(full_root_maps(m))
        covered += bool(maps)
        for roots in maps:
            checked += 1
            rep = xS_decomposition(m, roots)
            good = rep.passed and len(rep.lines) == 2**m.d and sum(x.dim for x in rep.lines.values()) == m.dim
            failures += not good
    ok = failures == 0 and covered >= 150
    announce(capsys, 3, ok, f"{covered} modules with full root maps, {checked} decompositions, {failures} failures")


def test_criterion_04_stability(capsys):
    instances = [small_slope_instance(seed, 2 + seed % 2) for seed in range(60)]
    hyp = all(stability_hypothesis(m, j) for m in instances for j in range(1, m.d + 1))
    failures = sum(not phi_stability_check(m, j) for m in instances for j in range(1, m.d + 1))
    ok = hyp and failures == 0
    announce(capsys, 4, ok, f"{len(instances)} modules (d = 2, 3) with all roots strictly small, {failures} failures")


def test_criterion_05_admissibility_oracle(capsys):
    rng = random.Random(5)
    agree = admissible = 0
    total = 1000
    for seed in range(total):
        p = rng.choice((2, 3, 5, 7))
        f = random_admissible_rank2(rng, p, rng.randint(0, 4), rng.randint(-1, 1))
        if seed % 3 == 0:
            f = mutate(f, rng)
        if seed % 2:
            f = transport_rank2(f, random_invertible(rng, 2))
        ours = is_weakly_admissible(f)
        admissible += ours
        agree += ours == sympy_admissible(f)
    ok = agree == total and 0 < admissible < total
    announce(capsys, 5, ok, f"{agree}/{total} agree with the eigenvector oracle ({admissible} admissible)")


def test_criterion_06_lambda_laws(capsys):
    forms = [make_tensor_lambda(random_tensor_induct(seed, 2)[1]) for seed in range(80)]
    forms += equal_factor_forms(20)
    bad = sum(not all(lambda_law_flags(q)) for q in forms)
    announce(capsys, 6, bad == 0, f"{len(forms)} trivial-character d = 2 modules, {bad} violations")


def test_criterion_07_classification(capsys):
    equal = equal_factor_forms(20)
    distinct = four_distinct_forms(20)
    xis = []
    equal_ok = True
    for q in equal:
        res = find_structure_preserving_isos(q, q)
        equal_ok &= class_summary(res) == [("Plectic", "respects"), ("AntiPlectic(1)", "interchanges")]
        xis += [r.xi for r in res if r.xi is not None]
    distinct_ok = all(class_summary(find_structure_preserving_isos(q, q)) == [("Plectic", "respects")] for q in distinct)
    xi_ok = all(x in (1, -1) for x in xis)
    ok = equal_ok and distinct_ok and xi_ok
    announce(
        capsys,
        7,
        ok,
        f"{len(equal)} equal-factor modules give Plectic + AntiPlectic(1); "
        f"{len(distinct)} four-distinct-product modules give one Plectic class; xi values {sorted({str(x) for x in xis})}",
    )


def test_criterion_08_scramble_invariance(capsys, population):
    rng = random.Random(8)
    scrambles = mismatches = 0

    for m in population[:12]:
        s, _ = scramble(m, rng)
        scrambles += 1
        for mask in all_subsets(m.d):
            for rc in qualifying_root_choices(m, mask):
                mismatches += theorem_main_verify(m, rc).flags() != theorem_main_verify(s, rc).flags()
        for roots in full_root_maps(m):
            mismatches += xS_decomposition(m, roots).flags() != xS_decomposition(s, roots).flags()

    for seed in range(10):
        m = small_slope_instance(seed, 2 + seed % 2)
        s, _ = scramble(m, rng)
        scrambles += 1
        mismatches += stability_report(m).flags() != stability_report(s).flags()

    for seed in range(12):
        f = random_admissible_rank2(rng, 5, 2, 0)
        if seed % 2:
            f = mutate(f, rng)
        scrambles += 1
        mismatches += is_weakly_admissible(f) != is_weakly_admissible(transport_rank2(f, random_invertible(rng, 2)))

    for q in [make_tensor_lambda(random_tensor_induct(seed, 2)[1]) for seed in range(8)] + equal_factor_forms(4):
        s, change = scramble(q.module, rng)
        qs = q.transport(s, change)
        scrambles += 1
        mismatches += lambda_law_flags(q) != lambda_law_flags(qs)

    for q in equal_factor_forms(6) + four_distinct_forms(6):
        s, change = scramble(q.module, rng)
        qs = q.transport(s, change)
        scrambles += 1
        mismatches += class_summary(find_structure_preserving_isos(q, q)) != class_summary(
            find_structure_preserving_isos(qs, q)
        )

    ok = scrambles >= 50 and mismatches == 0
    announce(capsys, 8, ok, f"{scrambles} scrambles across criteria 2-7, {mismatches} report mismatches")


def test_criterion_09_filtered_complexes(capsys):
    passed = 0
    for seed in range(100):
        d = 1 + seed % 4
        res = lattice_morphism_check(abstract_bgg(d, seed), d)
        passed += bool(res) and all(v == 1 for v in res.graded_dims.values())
    rejected = lattice_morphism_check(non_concentrated_example(), 1)
    witness_ok = not rejected and isinstance(rejected.witness, NotConcentrated)
    ok = passed == 100 and witness_ok
    announce(capsys, 9, ok, f"{passed}/100 complexes pass with 1-dim graded pieces; non-concentrated example rejected: {witness_ok}")


def test_criterion_10_dimension_law(capsys, population):
    extra = [random_tensor_induct(seed, d)[0] for seed in range(4) for d in (4, 5)]
    modules = list(population) + extra
    bad = sum(
        m.fil(s).dim != 2 ** (m.d - size(s)) for m in modules for s in all_subsets(m.d)
    )
    announce(capsys, 10, bad == 0, f"{len(modules)} tensor inducts (d = 1..5), {bad} violations of dim Fil^S = 2^(d-|S|)")


def test_zero_subspace_is_not_maximal_isotropic():
    # guard for lambda_law_flags: a zero eigenplane would silently pass isotropy
    q = make_tensor_lambda(random_tensor_induct(0, 2)[1])
    assert not q.is_maximal_isotropic(Subspace.zero(4))
