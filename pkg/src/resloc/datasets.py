"""Dataset files: JSON schema for fixed-point data, loaders with itemized
schema errors, writers, and builders for the bundled examples.

Schema (all rationals are strings "p/q" in lowest terms; weights and exponents
are integer arrays):

    {
      "torus_rank": 1,
      "dim_M": 2,
      "variables": ["X"],
      "components": [
        {"name": "N",
         "moment": ["1"],
         "algebra": {"basis": ["one"], "degrees": [0],
                     "mult_table": [[0, 0, 0, "1"]],
                     "integral": ["1"], "top_degree": 0},
         "normal_lines": [{"weight": [-1], "chern": ["0"]}]}
      ],
      "generators": [
        {"name": "u", "degree": 2,
         "restrictions": {"N": [], "S": [{"coeff": "1", "exponents": [1],
                                          "basis_index": 0}]}}
      ],
      "weyl": {"elements": [{"matrix": [["-1"]], "perm": [1, 0],
                             "algebra_maps": [[["1"]], [["1"]]]}],
               "positive_roots": [["1"]]}       (optional)
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .spaces import FixedComponent, HamiltonianSpace, RestrictedClass
from .symcore import (
    EquivariantPolynomial,
    GradedAlgebra,
    LinearForm,
    Q,
    ValidationError,
    Variables,
)
from .weylgrp import WeylData, WeylElement

__all__ = [
    "SchemaError",
    "Dataset",
    "dataset_from_json",
    "dataset_to_json",
    "load_dataset",
    "bundled_names",
    "build_s2",
    "build_s2xs2_t2",
    "build_s2xs2_nonisolated",
    "build_s2cubed_su2",
    "BUILDERS",
]

BUNDLED = ("s2", "s2xs2-t2", "s2xs2-nonisolated", "s2cubed-su2")


class SchemaError(ValueError):
    """Malformed dataset file; the message carries the offending path."""


@dataclass
class Dataset:
    name: str
    space: HamiltonianSpace
    generators: list[tuple[str, RestrictedClass]]
    weyl: WeylData | None = None

    def generator(self, name: str) -> RestrictedClass:
        for n, cls in self.generators:
            if n == name:
                return cls
        raise KeyError(f"no generator named {name!r}")


# -- parsing -------------------------------------------------------------------


def _frac(value, path: str) -> Fraction:
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, (int, str)):
            return Fraction(value)
    except (ValueError, ZeroDivisionError):
        pass
    raise SchemaError(f"{path}: expected a rational 'p/q' string, got {value!r}")


def _expect(obj, key, kind, path: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}: missing")
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise SchemaError(f"{path}.{key}: expected an integer")
    if kind is list and not isinstance(value, list):
        raise SchemaError(f"{path}.{key}: expected an array")
    if kind is str and not isinstance(value, str):
        raise SchemaError(f"{path}.{key}: expected a string")
    if kind is dict and not isinstance(value, dict):
        raise SchemaError(f"{path}.{key}: expected an object")
    return value


def _algebra_from_json(obj, path: str) -> GradedAlgebra:
    basis = _expect(obj, "basis", list, path)
    degrees = _expect(obj, "degrees", list, path)
    table_rows = _expect(obj, "mult_table", list, path)
    integral = _expect(obj, "integral", list, path)
    top = _expect(obj, "top_degree", int, path)
    table: dict[tuple[int, int], dict[int, Fraction]] = {}
    for t, row in enumerate(table_rows):
        if not (isinstance(row, list) and len(row) == 4):
            raise SchemaError(f"{path}.mult_table[{t}]: expected [i, j, k, 'p/q']")
        i, j, k, c = row
        table.setdefault((i, j), {})[k] = (
            table.get((i, j), {}).get(k, Q(0))
            + _frac(c, f"{path}.mult_table[{t}]"))
    try:
        return GradedAlgebra(basis, degrees, table,
                             [_frac(v, f"{path}.integral") for v in integral], top)
    except ValidationError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def _poly_from_terms(vars: Variables, algebra: GradedAlgebra, terms, path: str
                     ) -> EquivariantPolynomial:
    if not isinstance(terms, list):
        raise SchemaError(f"{path}: expected an array of terms")
    out: dict[tuple[tuple[int, ...], int], Fraction] = {}
    for t, term in enumerate(terms):
        coeff = _frac(_expect(term, "coeff", None, f"{path}[{t}]"), f"{path}[{t}].coeff")
        exps = _expect(term, "exponents", list, f"{path}[{t}]")
        b = _expect(term, "basis_index", int, f"{path}[{t}]")
        if len(exps) != vars.count or any(
                isinstance(e, bool) or not isinstance(e, int) or e < 0 for e in exps):
            raise SchemaError(f"{path}[{t}].exponents: expected {vars.count} "
                              "nonnegative integers")
        if not 0 <= b < len(algebra.basis):
            raise SchemaError(f"{path}[{t}].basis_index: out of range")
        key = (tuple(exps), b)
        out[key] = out.get(key, Q(0)) + coeff
    return EquivariantPolynomial(vars, algebra, out)


def dataset_from_json(obj: dict, name: str) -> Dataset:
    rank = _expect(obj, "torus_rank", int, "$")
    dim = _expect(obj, "dim_M", int, "$")
    var_names = _expect(obj, "variables", list, "$")
    if len(var_names) != rank or any(not isinstance(v, str) for v in var_names):
        raise SchemaError("$.variables: expected torus_rank variable names")
    vars = Variables(tuple(var_names))

    components = []
    for c, cobj in enumerate(_expect(obj, "components", list, "$")):
        path = f"$.components[{c}]"
        cname = _expect(cobj, "name", str, path)
        moment = tuple(_frac(v, f"{path}.moment")
                       for v in _expect(cobj, "moment", list, path))
        algebra = _algebra_from_json(_expect(cobj, "algebra", dict, path),
                                     f"{path}.algebra")
        lines = []
        for l, lobj in enumerate(_expect(cobj, "normal_lines", list, path)):
            lpath = f"{path}.normal_lines[{l}]"
            wraw = _expect(lobj, "weight", list, lpath)
            weight = LinearForm.make([_frac(v, f"{lpath}.weight") for v in wraw])
            craw = _expect(lobj, "chern", list, lpath)
            if len(craw) != len(algebra.basis):
                raise SchemaError(f"{lpath}.chern: expected one coefficient per "
                                  "algebra basis element")
            chern = EquivariantPolynomial.from_algebra_element(
                vars, algebra,
                {i: _frac(v, f"{lpath}.chern") for i, v in enumerate(craw)})
            lines.append((weight, chern))
        components.append(FixedComponent(cname, moment, algebra, tuple(lines)))

    try:
        space = HamiltonianSpace(vars, dim, tuple(components))
    except ValidationError as exc:
        raise SchemaError(f"$.components: {exc}") from exc

    generators = []
    for g, gobj in enumerate(_expect(obj, "generators", list, "$")):
        path = f"$.generators[{g}]"
        gname = _expect(gobj, "name", str, path)
        degree = _expect(gobj, "degree", int, path)
        rmap = _expect(gobj, "restrictions", dict, path)
        restrictions = {}
        for f in space.components:
            if f.name not in rmap:
                raise SchemaError(f"{path}.restrictions.{f.name}: missing")
            restrictions[f.name] = _poly_from_terms(
                vars, f.algebra, rmap[f.name], f"{path}.restrictions.{f.name}")
        unknown = set(rmap) - {f.name for f in space.components}
        if unknown:
            raise SchemaError(f"{path}.restrictions: unknown components "
                              f"{sorted(unknown)}")
        try:
            generators.append((gname, RestrictedClass(space, degree, restrictions)))
        except ValidationError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    if len({n for n, _ in generators}) != len(generators):
        raise SchemaError("$.generators: names must be distinct")
    if not any(cls.degree == 0 and cls == RestrictedClass.unit(space)
               for _, cls in generators):
        generators.insert(0, ("one", RestrictedClass.unit(space)))

    weyl = None
    if "weyl" in obj:
        weyl = _weyl_from_json(obj["weyl"], space)
    return Dataset(name, space, generators, weyl)


def _weyl_from_json(wobj, space: HamiltonianSpace) -> WeylData:
    path = "$.weyl"
    elements = []
    for e, eobj in enumerate(_expect(wobj, "elements", list, path)):
        epath = f"{path}.elements[{e}]"
        matrix = tuple(tuple(_frac(v, f"{epath}.matrix") for v in row)
                       for row in _expect(eobj, "matrix", list, epath))
        perm = tuple(_expect(eobj, "perm", list, epath))
        maps = tuple(tuple(tuple(_frac(v, f"{epath}.algebra_maps") for v in row)
                           for row in mat)
                     for mat in _expect(eobj, "algebra_maps", list, epath))
        elements.append(WeylElement(matrix, perm, maps))
    roots = [LinearForm.make([_frac(v, f"{path}.positive_roots") for v in row])
             for row in _expect(wobj, "positive_roots", list, path)]
    try:
        return WeylData(space, elements, roots)
    except ValidationError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


# -- serialization -------------------------------------------------------------


def _fs(q: Fraction) -> str:
    return str(Fraction(q))


def _algebra_to_json(a: GradedAlgebra) -> dict:
    rows = []
    for i in range(len(a.basis)):
        for j in range(i, len(a.basis)):
            for k, c in sorted(a.mul_basis(i, j).items()):
                rows.append([i, j, k, _fs(c)])
    return {"basis": list(a.basis), "degrees": list(a.degrees),
            "mult_table": rows, "integral": [_fs(v) for v in a.integral],
            "top_degree": a.top_degree}


def _poly_to_terms(p: EquivariantPolynomial) -> list:
    return [{"coeff": _fs(c), "exponents": list(e), "basis_index": b}
            for (e, b), c in p.sorted_items()]


def dataset_to_json(ds: Dataset) -> dict:
    space = ds.space
    out = {
        "torus_rank": space.vars.count,
        "dim_M": space.dim,
        "variables": list(space.vars.names),
        "components": [
            {"name": f.name,
             "moment": [_fs(v) for v in f.moment],
             "algebra": _algebra_to_json(f.algebra),
             "normal_lines": [
                 {"weight": [int(v) if v.denominator == 1 else _fs(v)
                             for v in w.coeffs],
                  "chern": [_fs(sum((cv for (e, b), cv in c.terms.items() if b == i),
                                    Q(0)))
                            for i in range(len(f.algebra.basis))]}
                 for w, c in f.normal_lines]}
            for f in space.components],
        "generators": [
            {"name": name, "degree": cls.degree,
             "restrictions": {f.name: _poly_to_terms(cls.restrictions[f.name])
                              for f in space.components}}
            for name, cls in ds.generators],
    }
    if ds.weyl is not None:
        out["weyl"] = {
            "elements": [
                {"matrix": [[_fs(v) for v in row] for row in w.matrix],
                 "perm": list(w.perm),
                 "algebra_maps": [[[_fs(v) for v in row] for row in mat]
                                  for mat in w.algebra_maps]}
                for w in ds.weyl.elements],
            "positive_roots": [[_fs(v) for v in r.coeffs]
                               for r in ds.weyl.positive_roots],
        }
    return out


def load_dataset(source: str) -> Dataset:
    """Load a bundled dataset by name or any dataset from a file path."""
    if source in BUNDLED:
        text = resources.files("resloc").joinpath("data", f"{source}.json").read_text()
        name = source
    else:
        with open(source) as fh:
            text = fh.read()
        name = source.rsplit("/", 1)[-1].removesuffix(".json")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return dataset_from_json(obj, name)


def bundled_names() -> tuple[str, ...]:
    return BUNDLED


# -- bundled example builders --------------------------------------------------


def _point_line(vars, coeffs) -> tuple:
    from .symcore import POINT_ALGEBRA
    return (LinearForm.make([Q(c) for c in coeffs]),
            EquivariantPolynomial.zero(vars, POINT_ALGEBRA))


def build_s2() -> Dataset:
    """Rotation of the two-sphere: two fixed points at moment levels +-1."""
    from .symcore import POINT_ALGEBRA

    vars = Variables(("X",))
    north = FixedComponent("N", (Q(1),), POINT_ALGEBRA, (_point_line(vars, [-1]),))
    south = FixedComponent("S", (Q(-1),), POINT_ALGEBRA, (_point_line(vars, [1]),))
    space = HamiltonianSpace(vars, 2, (north, south))
    zero = EquivariantPolynomial.zero(vars, POINT_ALGEBRA)
    x = EquivariantPolynomial.variable(vars, 0)
    u = RestrictedClass(space, 2, {"N": zero, "S": x})
    return Dataset("s2", space, [("one", RestrictedClass.unit(space)), ("u", u)])


def build_s2xs2_t2() -> Dataset:
    """Product of two spheres with the full 2-torus: four isolated fixed points."""
    from .symcore import POINT_ALGEBRA

    vars = Variables(("X", "Y"))
    data = [("NN", (1, 1), (-1, 0), (0, -1)),
            ("NS", (1, -1), (-1, 0), (0, 1)),
            ("SN", (-1, 1), (1, 0), (0, -1)),
            ("SS", (-1, -1), (1, 0), (0, 1))]
    comps = tuple(
        FixedComponent(name, tuple(Q(m) for m in moment), POINT_ALGEBRA,
                       (_point_line(vars, w1), _point_line(vars, w2)))
        for name, moment, w1, w2 in data)
    space = HamiltonianSpace(vars, 4, comps)
    zero = EquivariantPolynomial.zero(vars, POINT_ALGEBRA)
    x = EquivariantPolynomial.variable(vars, 0)
    y = EquivariantPolynomial.variable(vars, 1)
    u1 = RestrictedClass(space, 2, {"NN": zero, "NS": zero, "SN": x, "SS": x})
    u2 = RestrictedClass(space, 2, {"NN": zero, "NS": y, "SN": zero, "SS": y})
    return Dataset("s2xs2-t2", space,
                   [("one", RestrictedClass.unit(space)), ("u1", u1), ("u2", u2)])


def build_s2xs2_nonisolated() -> Dataset:
    """Circle rotating one sphere factor: the fixed set is two spheres, so the
    components carry a nontrivial coefficient algebra."""
    vars = Variables(("X",))
    cp1 = GradedAlgebra(("one", "vol"), (0, 2),
                        {(0, 0): {0: Q(1)}, (0, 1): {1: Q(1)}, (1, 1): {}},
                        (Q(0), Q(1)), 2)
    zero = EquivariantPolynomial.zero(vars, cp1)
    fn = FixedComponent("FN", (Q(1),), cp1, ((LinearForm.make([Q(-1)]), zero),))
    fs = FixedComponent("FS", (Q(-1),), cp1, ((LinearForm.make([Q(1)]), zero),))
    space = HamiltonianSpace(vars, 4, (fn, fs))
    vol = EquivariantPolynomial.from_algebra_element(vars, cp1, {1: Q(1)})
    x = EquivariantPolynomial.variable(vars, 0, cp1)
    v = RestrictedClass(space, 2, {"FN": vol, "FS": vol})
    w = RestrictedClass(space, 2, {"FN": zero, "FS": x})
    return Dataset("s2xs2-nonisolated", space,
                   [("one", RestrictedClass.unit(space)), ("v", v), ("w", w)])


def build_s2cubed_su2() -> Dataset:
    """Triple product of spheres with the diagonal circle, together with the
    residual Weyl group Z/2 acting by the antipodal flip."""
    from itertools import product

    from .symcore import POINT_ALGEBRA

    vars = Variables(("X",))
    signs = list(product((1, -1), repeat=3))
    names = ["".join("N" if e > 0 else "S" for e in s) for s in signs]
    comps = tuple(
        FixedComponent(names[i], (Q(sum(s)),), POINT_ALGEBRA,
                       tuple(_point_line(vars, [-e]) for e in s))
        for i, s in enumerate(signs))
    space = HamiltonianSpace(vars, 6, comps)
    zero = EquivariantPolynomial.zero(vars, POINT_ALGEBRA)
    x = EquivariantPolynomial.variable(vars, 0)
    gens = [("one", RestrictedClass.unit(space))]
    for axis in range(3):
        gens.append((f"u{axis + 1}",
                     RestrictedClass(space, 2,
                                     {names[i]: (x if s[axis] < 0 else zero)
                                      for i, s in enumerate(signs)})))
    ident_maps = tuple(((Q(1),),) for _ in signs)
    ident = WeylElement(((Q(1),),), tuple(range(8)), ident_maps)
    flip = WeylElement(((Q(-1),),), tuple(7 - i for i in range(8)), ident_maps)
    weyl = WeylData(space, [ident, flip], [LinearForm.make([Q(1)])])
    return Dataset("s2cubed-su2", space, gens, weyl)


BUILDERS = {
    "s2": build_s2,
    "s2xs2-t2": build_s2xs2_t2,
    "s2xs2-nonisolated": build_s2xs2_nonisolated,
    "s2cubed-su2": build_s2cubed_su2,
}
