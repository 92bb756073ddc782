"""JSON formats for algebras, elements and systems.

System file::

    {"algebra": {"type": "finite", "atoms": ["v", "w"]},
     "labels": ["e"],
     "actions": {"e": {"dual": {"w": "v"}}},
     "ideals": {"e": {"principal": ["w"]}},
     "relative": {"principal": ["v"]}}

``ideals`` entries default to the range ideal and ``relative`` to
``B_reg``.  The Remark family is ``{"builtin": "remark", "ideal":
"range" | "principal"}``.
"""

from __future__ import annotations

import json

from .boolean import (FinCofin, FiniteAlgebra, FinSubsets, Principal,
                      ProductAlgebra, RangeIdeal, DualMapAction)
from .dynamics import make_system
from .errors import ParseError


def _need(data, key, kind=None):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"missing field {key!r}")
    v = data[key]
    if kind is not None and not isinstance(v, kind):
        raise ParseError(f"field {key!r} has the wrong type")
    return v


def algebra_from_json(d):
    t = _need(d, "type", str)
    if t == "finite":
        atoms = _need(d, "atoms", list)
        return FiniteAlgebra(atoms)
    if t == "finsubsets":
        return FinSubsets()
    if t == "fincofin":
        return FinCofin()
    if t == "product":
        return ProductAlgebra(algebra_from_json(_need(d, "left")),
                              algebra_from_json(_need(d, "right")))
    raise ParseError(f"unknown algebra type {t!r}")


def algebra_to_json(alg):
    if isinstance(alg, FiniteAlgebra):
        return {"type": "finite", "atoms": list(alg.labels)}
    if isinstance(alg, ProductAlgebra):
        return {"type": "product", "left": algebra_to_json(alg.left),
                "right": algebra_to_json(alg.right)}
    return {"type": alg.kind}


def element_to_json(e):
    return _value_to_json(e.owner, e.value)


def _value_to_json(alg, v):
    if isinstance(alg, FiniteAlgebra):
        return alg.labels_of(v)
    if isinstance(alg, FinSubsets):
        return sorted(v)
    if isinstance(alg, FinCofin):
        return {"mode": v[0], "support": sorted(v[1])}
    return [_value_to_json(alg.left, v[0]), _value_to_json(alg.right, v[1])]


def _value_from_json(alg, d):
    if isinstance(alg, FiniteAlgebra):
        if not isinstance(d, list):
            raise ParseError("finite elements are lists of atom labels")
        try:
            return alg.mask_of(d)
        except KeyError as exc:
            raise ParseError(str(exc)) from None
    if isinstance(alg, FinSubsets):
        return alg.canonical(d)
    if isinstance(alg, FinCofin):
        return alg.canonical((_need(d, "mode"), _need(d, "support")))
    if not isinstance(d, list) or len(d) != 2:
        raise ParseError("product elements are [left, right]")
    return (_value_from_json(alg.left, d[0]), _value_from_json(alg.right, d[1]))


def element_from_json(alg, d):
    try:
        return alg.element(_value_from_json(alg, d))
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad element {d!r}: {exc}") from None


def _ideal_from_json(alg, d, action=None):
    if not isinstance(d, dict):
        raise ParseError("ideal descriptors are objects")
    if "principal" in d:
        return Principal(element_from_json(alg, d["principal"]))
    if d.get("range") and action is not None:
        return RangeIdeal(action)
    raise ParseError(f"unsupported ideal descriptor {d!r}")


def system_from_json(data):
    """Parse a system file into a validated relative system."""
    if not isinstance(data, dict):
        raise ParseError("system file must be a JSON object")
    if data.get("builtin") == "remark":
        from .constructions import remark_example
        ideal = data.get("ideal", "range")
        if ideal not in ("range", "principal"):
            raise ParseError(f"unknown remark ideal {ideal!r}")
        return remark_example().system(ideal)
    alg = algebra_from_json(_need(data, "algebra"))
    if not isinstance(alg, FiniteAlgebra):
        raise ParseError("only finite systems can be given by dual maps; "
                         "use a builtin for the Remark family")
    acts_in = _need(data, "actions", dict)
    labels = data.get("labels", list(acts_in))
    if sorted(labels) != sorted(acts_in):
        raise ParseError("labels and actions disagree")
    actions = {}
    for lab in labels:
        spec = acts_in[lab]
        dual = _need(spec, "dual", dict)
        try:
            actions[str(lab)] = DualMapAction.from_mapping(alg, dual)
        except KeyError as exc:
            raise ParseError(f"action {lab!r}: unknown atom {exc}") from None
    ideals = {str(k): _ideal_from_json(alg, v, actions.get(str(k)))
              for k, v in data.get("ideals", {}).items()}
    for k in ideals:
        if k not in actions:
            raise ParseError(f"ideal for unknown label {k!r}")
    rel = data.get("relative")
    relative = None if rel is None else _ideal_from_json(alg, rel)
    return make_system(alg, actions, ideals, relative)


def system_to_json(rsys):
    alg = rsys.algebra
    if not isinstance(alg, FiniteAlgebra):
        ideal = rsys.range_ideals["a"]
        kind = "principal" if isinstance(ideal, Principal) else "range"
        return {"builtin": "remark", "ideal": kind}
    return {
        "algebra": algebra_to_json(alg),
        "labels": list(rsys.labels),
        "actions": {lab: {"dual": rsys.actions[lab].mapping()}
                    for lab in rsys.labels},
        "ideals": {lab: {"principal": alg.labels_of(rsys.gen_I[lab])}
                   for lab in rsys.labels},
        "relative": {"principal": alg.labels_of(rsys.gen_J)},
    }


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
