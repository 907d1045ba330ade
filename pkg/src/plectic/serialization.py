"""JSON file formats.  Rationals are written as ``"a/b"`` strings so nothing is lost."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .lattice import build_filtration
from .linalg import Matrix, Subspace, as_rational, format_rational
from .phi_modules import PlecticModule, Rank2FPhi, WeightData
from .quadratic import QuadraticStructure

MODULE_SCHEMA = "plectic-module/1"
FILTRATION_SCHEMA = "plectic-filtration/1"
EIGENDATA_SCHEMA = "plectic-eigendata/1"


class FormatError(ValueError):
    pass


def _matrix_out(m: Matrix) -> list:
    return [[format_rational(x) for x in row] for row in m.rows]


def _matrix_in(raw, what: str, ncols: int | None = None) -> Matrix:
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise FormatError(f"{what}: expected a list of rows")
    try:
        return Matrix([[as_rational(x) for x in row] for row in raw], ncols)
    except (TypeError, ValueError) as e:
        raise FormatError(f"{what}: {e}") from None


def _subspace_in(raw, n: int, what: str) -> Subspace:
    rows = _matrix_in(raw, what, n)
    if rows.nrows and rows.ncols != n:
        raise FormatError(f"{what}: vectors must have length {n}")
    return Subspace(rows.rows, n)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _loads(text: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"not valid JSON: {e}") from None
    if not isinstance(obj, dict):
        raise FormatError("top level must be an object")
    return obj


def _require(obj: dict, key: str):
    if key not in obj:
        raise FormatError(f"missing field {key!r}")
    return obj[key]


def _check_schema(obj: dict, expected: str):
    found = _require(obj, "schema_version")
    if found != expected:
        raise FormatError(f"schema_version {found!r}, expected {expected!r}")


# -- modules -----------------------------------------------------------------

@dataclass(frozen=True)
class ModuleFile:
    module: PlecticModule
    form: QuadraticStructure | None = None
    factors: tuple | None = None
    provenance: str | None = None


def _factor_out(f: Rank2FPhi) -> dict:
    return {
        "k": f.k,
        "t": f.t,
        "phi": _matrix_out(f.phi),
        "fil_line": _matrix_out(f.fil_line.matrix()),
    }


def _factor_in(raw: dict, p: int) -> Rank2FPhi:
    return Rank2FPhi(
        p,
        int(_require(raw, "k")),
        int(_require(raw, "t")),
        _matrix_in(_require(raw, "phi"), "factor phi"),
        _subspace_in(_require(raw, "fil_line"), 2, "factor fil_line"),
    )


def module_to_dict(mf: ModuleFile) -> dict:
    m = mf.module
    out = {
        "schema_version": MODULE_SCHEMA,
        "p": m.p,
        "d": m.d,
        "weights": [{"k": k, "t": t} for k, t in zip(m.weight.k, m.weight.t)],
        "dimension": m.dim,
        "phis": [_matrix_out(phi) for phi in m.phis],
        "fil_plus": [_matrix_out(f.matrix()) for f in m.fil_plus],
    }
    if mf.form is not None:
        out["lambda"] = _matrix_out(mf.form.gram)
    if mf.factors is not None:
        out["factors"] = [_factor_out(f) for f in mf.factors]
    if mf.provenance is not None:
        out["provenance"] = mf.provenance
    return out


def dump_module(mf: ModuleFile) -> str:
    return _dumps(module_to_dict(mf))


def module_from_dict(obj: dict) -> ModuleFile:
    _check_schema(obj, MODULE_SCHEMA)
    try:
        p = int(_require(obj, "p"))
        d = int(_require(obj, "d"))
        weights = _require(obj, "weights")
        if not isinstance(weights, list) or len(weights) != d:
            raise FormatError(f"weights must list {d} entries")
        weight = WeightData(p, tuple(int(w["k"]) for w in weights), tuple(int(w["t"]) for w in weights))
        n = int(_require(obj, "dimension"))
        phis = tuple(_matrix_in(raw, f"phis[{i}]", n) for i, raw in enumerate(_require(obj, "phis")))
        fils = tuple(_subspace_in(raw, n, f"fil_plus[{i}]") for i, raw in enumerate(_require(obj, "fil_plus")))
        module = PlecticModule(weight, phis, fils)
        form = None
        if "lambda" in obj:
            form = QuadraticStructure(module, _matrix_in(obj["lambda"], "lambda", n))
        factors = None
        if "factors" in obj:
            factors = tuple(_factor_in(raw, p) for raw in obj["factors"])
        provenance = obj.get("provenance")
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed module file: {e!r}") from None
    except FormatError:
        raise
    except ValueError as e:
        raise FormatError(str(e)) from None
    return ModuleFile(module, form, factors, provenance)


def load_module(text: str) -> ModuleFile:
    return module_from_dict(_loads(text))


# -- bare filtrations ----------------------------------------------------------

def dump_filtration(generators: Sequence[Subspace]) -> str:
    n = generators[0].ambient_dim
    return _dumps(
        {
            "schema_version": FILTRATION_SCHEMA,
            "ambient_dim": n,
            "generators": [_matrix_out(g.matrix()) for g in generators],
        }
    )


def load_filtration(text: str):
    """A weak I-filtration from either a filtration file or a module file."""
    obj = _loads(text)
    if obj.get("schema_version") == MODULE_SCHEMA:
        return module_from_dict(obj).module.filtration
    _check_schema(obj, FILTRATION_SCHEMA)
    try:
        n = int(_require(obj, "ambient_dim"))
        gens = [_subspace_in(raw, n, f"generators[{i}]") for i, raw in enumerate(_require(obj, "generators"))]
        return build_filtration(gens)
    except FormatError:
        raise
    except (TypeError, ValueError) as e:
        raise FormatError(str(e)) from None


# -- Hecke eigenvalue records --------------------------------------------------

@dataclass(frozen=True)
class EigenRecord:
    label: str
    p: int
    weight: WeightData
    roots: tuple  # ((alpha_i, beta_i), ...)


def load_eigendata(text: str) -> list:
    obj = _loads(text)
    _check_schema(obj, EIGENDATA_SCHEMA)
    records = _require(obj, "records")
    if not isinstance(records, list):
        raise FormatError("records must be a list")
    out = []
    for n, raw in enumerate(records):
        try:
            label = str(_require(raw, "label"))
            p = int(_require(raw, "p"))
            primes = _require(raw, "primes")
            if not isinstance(primes, list) or not primes:
                raise FormatError("primes must be a nonempty list")
            weight = WeightData(p, tuple(int(e["k"]) for e in primes), tuple(int(e["t"]) for e in primes))
            roots = tuple((as_rational(e["alpha"]), as_rational(e["beta"])) for e in primes)
            if any(x == 0 for pair in roots for x in pair):
                raise FormatError("Hecke roots must be nonzero")
        except FormatError as e:
            raise FormatError(f"record {n}: {e}") from None
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"record {n}: {e!r}") from None
        out.append(EigenRecord(label, p, weight, roots))
    return out


def dump_eigendata(records: Sequence[EigenRecord]) -> str:
    return _dumps(
        {
            "schema_version": EIGENDATA_SCHEMA,
            "records": [
                {
                    "label": r.label,
                    "p": r.p,
                    "primes": [
                        {"k": k, "t": t, "alpha": format_rational(a), "beta": format_rational(b)}
                        for k, t, (a, b) in zip(r.weight.k, r.weight.t, r.roots)
                    ],
                }
                for r in records
            ],
        }
    )
