"""JSON instance documents: a hybrid DNF with its weight function.

Example::

    {"reals": ["x1"], "bounds": [[0, 10]], "bools": ["p1", "p2"],
     "wb": {"p1": 0.6, "p2": 0.1},
     "wx": {"kind": "poly", "terms": [{"coef": 1, "powers": {"x1": 1}}]},
     "clauses": [{"bool": [["p1", true], ["p2", false]],
                  "lra": [{"coefs": {"x1": 1}, "op": ">=", "rhs": 0}]}]}

An ``lra`` entry may carry ``"negated": true``; the operator is flipped on
load so clauses only store positive atoms.
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import ConfigurationError, InstanceSemanticError, InstanceSyntaxError
from .formula import Clause, HybridDnf, LraAtom
from .weights import ConditionedWeight, PolyWeight, WeightFunction

TOP_KEYS = {"reals", "bounds", "bools", "wb", "wx", "clauses"}
REQUIRED = {"reals", "bounds", "clauses"}


def _expect(value, kind, where):
    numeric = kind in (int, float, (int, float))
    if not isinstance(value, kind) or (numeric and isinstance(value, bool)):
        names = kind.__name__ if isinstance(kind, type) else "/".join(t.__name__ for t in kind)
        raise InstanceSyntaxError(f"expected {names}", where)
    return value


def _keys(obj, allowed, required, where):
    _expect(obj, dict, where)
    unknown = set(obj) - allowed
    if unknown:
        raise InstanceSyntaxError(f"unknown keys {sorted(unknown)}", where)
    missing = required - set(obj)
    if missing:
        raise InstanceSyntaxError(f"missing keys {sorted(missing)}", where)


def _index(names, where):
    _expect(names, list, where)
    out = {}
    for j, name in enumerate(names):
        _expect(name, str, f"{where}[{j}]")
        if name in out:
            raise InstanceSemanticError(f"duplicate variable name {name!r}")
        out[name] = j
    return out


def _lookup(table, name, where):
    if name not in table:
        raise InstanceSemanticError(f"unknown variable {name!r} at {where}")
    return table[name]


def _poly(doc, reals, where) -> PolyWeight:
    _keys(doc, {"kind", "terms"}, {"kind", "terms"}, where)
    if doc["kind"] != "poly":
        raise InstanceSyntaxError("expected kind 'poly'", where)
    terms = []
    for t, term in enumerate(_expect(doc["terms"], list, f"{where}.terms")):
        at = f"{where}.terms[{t}]"
        _keys(term, {"coef", "powers"}, {"coef"}, at)
        coef = _expect(term["coef"], (int, float), f"{at}.coef")
        powers = {}
        for name, e in _expect(term.get("powers", {}), dict, f"{at}.powers").items():
            _expect(e, int, f"{at}.powers.{name}")
            powers[_lookup(reals, name, at)] = e
        terms.append((coef, powers))
    try:
        return PolyWeight(terms)
    except ConfigurationError as exc:
        raise InstanceSemanticError(str(exc)) from exc


def _wx(doc, reals, bools):
    if doc is None:
        return PolyWeight.constant(1.0)
    _expect(doc, dict, "wx")
    if doc.get("kind") == "poly":
        return _poly(doc, reals, "wx")
    if doc.get("kind") != "conditioned":
        raise InstanceSyntaxError("wx.kind must be 'poly' or 'conditioned'", "wx")
    _keys(doc, {"kind", "on", "cases", "rho"}, {"kind", "on", "cases"}, "wx")
    on = [_lookup(bools, _expect(n, str, "wx.on"), "wx.on")
          for n in _expect(doc["on"], list, "wx.on")]
    cases = {bits: _poly(p, reals, f"wx.cases.{bits}")
             for bits, p in _expect(doc["cases"], dict, "wx.cases").items()}
    rho = doc.get("rho")
    if rho is not None:
        _expect(rho, (int, float), "wx.rho")
    try:
        return ConditionedWeight(tuple(on), cases, rho)
    except ConfigurationError as exc:
        raise InstanceSemanticError(str(exc)) from exc


def _clause(doc, reals, bools, where) -> Clause:
    _keys(doc, {"bool", "lra"}, set(), where)
    lits = []
    for j, lit in enumerate(_expect(doc.get("bool", []), list, f"{where}.bool")):
        at = f"{where}.bool[{j}]"
        if not (isinstance(lit, list) and len(lit) == 2 and isinstance(lit[0], str)
                and isinstance(lit[1], bool)):
            raise InstanceSyntaxError("Boolean literal must be [name, true|false]", at)
        lits.append((_lookup(bools, lit[0], at), lit[1]))
    atoms = []
    for j, atom in enumerate(_expect(doc.get("lra", []), list, f"{where}.lra")):
        at = f"{where}.lra[{j}]"
        _keys(atom, {"coefs", "op", "rhs", "negated"}, {"coefs", "op", "rhs"}, at)
        coefs = {_lookup(reals, n, at): _expect(c, (int, float), f"{at}.coefs.{n}")
                 for n, c in _expect(atom["coefs"], dict, f"{at}.coefs").items()}
        op = _expect(atom["op"], str, f"{at}.op")
        rhs = _expect(atom["rhs"], (int, float), f"{at}.rhs")
        a = LraAtom(coefs, op, rhs)
        if _expect(atom.get("negated", False), bool, f"{at}.negated"):
            a = a.negated()
        atoms.append(a)
    return Clause(lits, atoms)


def load_instance(doc: dict) -> tuple[HybridDnf, WeightFunction]:
    """Validate a decoded document and build the formula and weight."""
    _keys(doc, TOP_KEYS, REQUIRED, "$")
    reals = _index(doc["reals"], "reals")
    bools = _index(doc.get("bools", []), "bools")
    bounds = doc["bounds"]
    if isinstance(bounds, dict):
        bounds = [bounds.get(name) for name in doc["reals"]]
    _expect(bounds, list, "bounds")
    if len(bounds) != len(reals):
        raise InstanceSemanticError("every real variable needs a bound")
    box = []
    for j, pair in enumerate(bounds):
        if pair is None:
            raise InstanceSemanticError(f"real variable {doc['reals'][j]!r} is unbounded")
        if not (isinstance(pair, list) and len(pair) == 2):
            raise InstanceSyntaxError("bound must be [lo, hi]", f"bounds[{j}]")
        if any(v is None for v in pair):
            raise InstanceSemanticError(f"real variable {doc['reals'][j]!r} is unbounded")
        box.append(tuple(_expect(v, (int, float), f"bounds[{j}]") for v in pair))
    wb_doc = _expect(doc.get("wb", {}), dict, "wb")
    if set(wb_doc) != set(bools):
        raise InstanceSemanticError("wb must give a probability for every Boolean variable")
    wb = [_expect(wb_doc[name], (int, float), f"wb.{name}") for name in doc.get("bools", [])]
    if any(not 0 < p < 1 for p in wb):
        raise InstanceSemanticError("Boolean probabilities must lie strictly inside (0, 1)")
    wx = _wx(doc.get("wx"), reals, bools)
    clauses = [_clause(c, reals, bools, f"clauses[{j}]")
               for j, c in enumerate(_expect(doc["clauses"], list, "clauses"))]
    phi = HybridDnf(len(reals), len(bools), box, clauses, tuple(doc["reals"]),
                    tuple(doc.get("bools", [])))
    return phi, WeightFunction(wb, wx)


def parse_instance(text: str) -> tuple[HybridDnf, WeightFunction]:
    """Parse an instance document from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    return load_instance(doc)


def dump_instance(phi: HybridDnf, w: WeightFunction) -> dict:
    rn, bn = phi.real_names, phi.bool_names
    clauses = []
    for c in phi.clauses:
        clauses.append({
            "bool": [[bn[i], s] for i, s in sorted(c.bool_lits)],
            "lra": [{"coefs": {rn[i]: v for i, v in a.coefficients}, "op": a.op, "rhs": a.rhs}
                    for a in c.lra]})
    if isinstance(w.wx, ConditionedWeight):
        wx = w.wx.to_json(rn, bn)
    else:
        wx = w.wx.to_json(rn)
    return {"reals": list(rn), "bounds": [list(b) for b in phi.box], "bools": list(bn),
            "wb": {name: float(p) for name, p in zip(bn, w.wb)}, "wx": wx, "clauses": clauses}


def serialize_instance(phi: HybridDnf, w: WeightFunction, indent: int | None = 1) -> str:
    return json.dumps(dump_instance(phi, w), indent=indent)


def read_instance(path) -> tuple[HybridDnf, WeightFunction]:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def write_instance(path, phi: HybridDnf, w: WeightFunction) -> None:
    Path(path).write_text(serialize_instance(phi, w) + "\n", encoding="utf-8")
