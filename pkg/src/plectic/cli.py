"""Command-line front end.

Exit codes: 0 when every requested conclusion holds, 1 when one fails,
2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import __version__
from .lattice import ClosureCapExceeded, format_subset, is_distributive, subset
from .linalg import as_rational, format_rational, is_prime, valuation
from .phi_modules import (
    in_weil_interval,
    random_admissible_rank2,
    random_tensor_induct,
    random_weights,
    strictly_small_slope,
    tensor_induce,
)
from .quadratic import (
    PreconditionError,
    QuadraticStructure,
    UnsupportedDegeneracy,
    as_prime_data,
    bc_conditions,
    find_structure_preserving_isos,
    make_tensor_lambda,
    nonbc_conditions,
    pairwise_products,
)
from .serialization import FormatError, ModuleFile, dump_module, load_eigendata, load_filtration, load_module
from .theorems import (
    Report,
    RootChoice,
    full_root_maps,
    qualifying_root_choices,
    rc_tag,
    root_hypothesis,
    stability_report,
    strictness_check,
    strictness_report,
    theorem_main_verify,
    validate_root_choice,
    xS_decomposition,
)

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str | None, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _indices(raw: str | None, d: int) -> list:
    if raw is None or raw.strip() == "":
        return []
    try:
        out = [int(x) for x in raw.split(",")]
    except ValueError:
        raise InputError(f"bad index list {raw!r}") from None
    for i in out:
        if not 1 <= i <= d:
            raise InputError(f"index {i} outside 1..{d}")
    if len(set(out)) != len(out):
        raise InputError(f"repeated index in {raw!r}")
    return out


def _rationals(raw: str | None) -> list:
    if raw is None or raw.strip() == "":
        return []
    try:
        return [as_rational(x.strip()) for x in raw.split(",")]
    except (TypeError, ValueError):
        raise InputError(f"bad rational list {raw!r}") from None


def _root_choice(m, s_raw, roots_raw) -> RootChoice:
    idx = _indices(s_raw, m.d)
    roots = _rationals(roots_raw)
    if len(roots) != len(idx):
        raise InputError(f"{len(idx)} indices but {len(roots)} roots")
    rc = RootChoice.of(dict(zip(idx, roots)))
    try:
        validate_root_choice(m, rc)
    except ValueError as e:
        raise InputError(str(e)) from None
    return rc


def _emit(report: Report, as_json: bool) -> int:
    if as_json:
        print(json.dumps(report.records(), indent=2))
    else:
        for c in report.checks:
            status = "PASS" if c.conclusion_ok else "FAIL"
            hyp = "hypotheses hold" if c.hypothesis_ok else "hypotheses fail"
            extra = f"  {c.witness}" if c.witness else ""
            print(f"{status}  {c.check_id}  ({hyp}){extra}")
        print(f"{sum(c.conclusion_ok for c in report.checks)}/{len(report.checks)} conclusions hold")
    return OK if report.passed else FAILED


# -- verbs -------------------------------------------------------------------

def cmd_generate(args) -> int:
    if not 1 <= args.d <= 8:
        raise InputError(f"--d must be in [1, 8], got {args.d}")
    if not is_prime(args.p):
        raise InputError(f"--p must be prime, got {args.p}")
    rng = random.Random(args.seed)
    if args.equal_factors:
        ks, ts = random_weights(rng, 1, min_k=args.min_k)
        factor = random_admissible_rank2(rng, args.p, ks[0], ts[0])
        factors = [factor] * args.d
        module = tensor_induce(factors)
    else:
        module, factors = random_tensor_induct(rng, args.d, args.p, min_k=args.min_k)
    form = None
    if args.d == 2:
        form = QuadraticStructure(module, make_tensor_lambda(factors).gram)
    kind = "equal-factor" if args.equal_factors else "random"
    provenance = f"plectic {__version__} generate: {kind} tensor induct, d={args.d}, p={args.p}, seed={args.seed}"
    _write(args.out, dump_module(ModuleFile(module, form, tuple(factors), provenance)))
    return OK


def cmd_check(args) -> int:
    mf = load_module(_read(args.file))
    m = mf.module
    report = Report()
    if args.theorem in ("main", "strictness"):
        if args.S is None and args.roots is None:
            choices = [rc for s in range(1 << m.d) for rc in qualifying_root_choices(m, s)]
        else:
            choices = [_root_choice(m, args.S, args.roots)]
        for rc in choices:
            if args.theorem == "main":
                report.extend(theorem_main_verify(m, rc))
            elif args.T is not None:
                t = subset(_indices(args.T, m.d))
                report.add(
                    f"strict{rc_tag(rc)}.fil{format_subset(t)}",
                    all(root_hypothesis(m, i, a) for i, a in rc.roots.items()),
                    strictness_check(m, rc, t),
                )
            else:
                report.extend(strictness_report(m, rc))
    elif args.theorem == "xs":
        for roots in _full_roots(m, args.roots):
            report.extend(xS_decomposition(m, roots).report())
    elif args.theorem == "stability":
        j = _indices(str(args.j), m.d)[0] if args.j is not None else None
        report.extend(stability_report(m, j))
    return _emit(report, args.json)


def _full_roots(m, raw):
    if raw is None:
        return list(full_root_maps(m))
    rc = _root_choice(m, ",".join(str(i) for i in range(1, m.d + 1)), raw)
    return [rc.roots]


def cmd_decompose(args) -> int:
    m = load_module(_read(args.file)).module
    worst = OK
    for roots in _full_roots(m, args.roots):
        rep = xS_decomposition(m, roots)
        shown = ", ".join(f"{i}:{format_rational(a)}" for i, a in sorted(roots.items()))
        print(f"roots {shown}  (hypotheses {'hold' if rep.hypothesis_ok else 'fail'})")
        for s, line in sorted(rep.lines.items()):
            vecs = "; ".join("(" + ", ".join(format_rational(x) for x in v) + ")" for v in line.basis)
            print(f"  X{format_subset(s)}  dim {line.dim}  {vecs}")
        for name in ("one_dimensional", "direct_sum_ok", "fil_split_ok", "eigen_split_ok"):
            print(f"  {name}: {getattr(rep, name)}")
        if not rep.passed:
            worst = FAILED
    return worst


def cmd_classify2(args) -> int:
    source, target = (load_module(_read(f)) for f in (args.source, args.target))
    for name, mf in (("source", source), ("target", target)):
        if mf.module.d != 2:
            raise InputError(f"{name} has d = {mf.module.d}, classification needs d = 2")
        if mf.form is None:
            raise InputError(f"{name} has no lambda")
    try:
        classes = find_structure_preserving_isos(source.form, target.form)
    except (UnsupportedDegeneracy, PreconditionError) as e:
        raise InputError(str(e)) from None
    if args.json:
        print(json.dumps([c.record() for c in classes], indent=2))
    else:
        for c in classes:
            print(f"{c.label}  filtrations {c.filtration}")
            for row in c.witness.rows:
                print("    [" + ", ".join(format_rational(x) for x in row) + "]")
        print(f"{len(classes)} class(es)")
    return OK if classes else FAILED


def slope_report(record) -> dict:
    w, p = record.weight, record.p
    primes = []
    for i, (alpha, beta) in enumerate(record.roots, start=1):
        k, t = w.k[i - 1], w.t[i - 1]
        small = [strictly_small_slope(x, i, w) for x in (alpha, beta)]
        primes.append(
            {
                "index": i,
                "v_alpha": valuation(alpha, p),
                "v_beta": valuation(beta, p),
                "small": small,
                "weil_interval": [in_weil_interval(x, i, w) for x in (alpha, beta)],
                "symmetric": valuation(alpha, p) + valuation(beta, p) == 2 * t + k + 1,
                "main_hypothesis": alpha != beta and any(small),
            }
        )
    out = {"label": record.label, "primes": primes}
    if w.d == 2:
        data = [as_prime_data(k, t, a, b) for k, t, (a, b) in zip(w.k, w.t, record.roots)]

        def small(x, e):
            return valuation(x, p) < e.k + e.t

        nonbc = nonbc_conditions(p, data, small)
        bc = bc_conditions(p, data, small)
        out["distinct_products"] = len(set(pairwise_products(data)))
        out["nonbc_conditions"] = nonbc
        out["nonbc_applies"] = all(nonbc.values())
        out["bc_conditions"] = bc
        out["bc_applies"] = all(bc.values())
    return out


def cmd_slopes(args) -> int:
    reports = [slope_report(r) for r in load_eigendata(_read(args.file))]
    if args.json:
        print(json.dumps(reports, indent=2))
        return OK
    for rep in reports:
        print(rep["label"])
        for e in rep["primes"]:
            print(
                f"  prime {e['index']}: slopes ({e['v_alpha']}, {e['v_beta']})"
                f"  small {e['small']}  in interval {e['weil_interval']}"
                f"  symmetric {e['symmetric']}  splitting hypotheses {e['main_hypothesis']}"
            )
        if "distinct_products" in rep:
            print(f"  distinct pairwise products: {rep['distinct_products']}")
            print(f"  non-base-change route: {rep['nonbc_applies']}  {rep['nonbc_conditions']}")
            print(f"  base-change route: {rep['bc_applies']}  {rep['bc_conditions']}")
    return OK


def cmd_distributivity(args) -> int:
    f = load_filtration(_read(args.file))
    try:
        res = is_distributive(f)
    except ClosureCapExceeded as e:
        raise InputError(f"{e}; raise PLECTIC_CLOSURE_CAP to allow more") from None
    if res.distributive:
        print(f"distributive (closure of {res.closure_size} subspaces)")
        return OK
    print(f"not distributive (closure of {res.closure_size} subspaces); A & (B + C) != (A & B) + (A & C) for")
    for name, s in zip("ABC", res.witness):
        vecs = "; ".join("(" + ", ".join(format_rational(x) for x in v) + ")" for v in s.basis)
        print(f"  {name} = span[{vecs}]")
    return FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plectic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("generate", help="write a random tensor-induced module")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--p", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--min-k", type=int, default=1)
    g.add_argument("--equal-factors", action="store_true", help="use one factor for every prime")
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", help="verify a splitting statement on a module file")
    c.add_argument("file")
    c.add_argument("--theorem", choices=("main", "xs", "stability", "strictness"), default="main")
    c.add_argument("--S", help="comma-separated indices, e.g. 1,2")
    c.add_argument("--roots", help="one root per index of S (all indices for xs)")
    c.add_argument("--T", help="comma-separated indices for the strictness check")
    c.add_argument("--j", type=int, help="filtration index for the stability check")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    dec = sub.add_parser("decompose", help="print the lines X(S)")
    dec.add_argument("file")
    dec.add_argument("--roots")
    dec.set_defaults(func=cmd_decompose)

    q = sub.add_parser("classify2", help="classify structure-preserving isomorphisms (d = 2)")
    q.add_argument("source")
    q.add_argument("target")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_classify2)

    s = sub.add_parser("slopes", help="slope report for Hecke eigenvalue records")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_slopes)

    dist = sub.add_parser("distributivity", help="test a filtration for distributivity")
    dist.add_argument("file")
    dist.set_defaults(func=cmd_distributivity)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
