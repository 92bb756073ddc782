"""Command line front end: ``gbds <subcommand> ...``.

Exit status 0 on success, 1 on any library error (diagnostic JSON on
stderr), 2 on malformed input (arguments, JSON, schema, term syntax).
"""

from __future__ import annotations

import argparse
import json
import sys

from .boolean import Principal
from .constructions import (LabelledGraph, import_labelled_graph,
                            remark_example, tilde, tilde_iso_generators)
from .dynamics import validate_system
from .errors import GbdsError, ParseError
from .lattice import (MAX_ATOMS, admissible_pairs, pair, quotient_system)
from .serialize import (dumps, element_to_json, load_json, system_from_json,
                        system_to_json)
from .words import calculus


def _system(path):
    return system_from_json(load_json(path))


def _labels(text):
    return [x.strip() for x in (text or "").split(",") if x.strip()]


def _emit(out, text):
    out.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------- commands


def cmd_inspect(args, out):
    rsys = _system(args.system)
    cert = validate_system(rsys)
    if rsys.is_finite:
        alg = rsys.algebra
        info = {
            "atoms": list(alg.labels),
            "labels": list(rsys.labels),
            "actions": {g: rsys.actions[g].mapping() for g in rsys.labels},
            "regular": alg.labels_of(rsys.regular_mask),
            "range": {g: alg.labels_of(rsys.theta(g, alg.top_mask))
                      for g in rsys.labels},
            "ideals": {g: alg.labels_of(rsys.gen_I[g]) for g in rsys.labels},
            "relative": alg.labels_of(rsys.gen_J),
            "valid": cert.to_dict(),
        }
        info["range_strict"] = {g: info["range"][g] != info["ideals"][g]
                                for g in rsys.labels}
    else:
        ex = remark_example()
        ideal = rsys.range_ideals["a"]
        strict = isinstance(ideal, Principal)
        info = {
            "algebra": repr(rsys.algebra),
            "labels": list(rsys.labels),
            "actions": {g: repr(rsys.actions[g]) for g in rsys.labels},
            "regular": repr(rsys.relative_ideal),
            "range": {"a": "R_a = {(0,A) : A finite}"},
            "ideals": {"a": repr(ideal)},
            "valid": cert.to_dict(),
            "range_strict": {"a": strict},
        }
        if strict:
            m = ex.witness_membership()
            info["witness"] = {"element": element_to_json(ex.witness),
                               "text": m["witness"], "in_I": m["in_I"],
                               "in_R": m["in_R"]}
    if args.format == "text":
        lines = [f"{k}: {json.dumps(v)}" for k, v in info.items()]
        _emit(out, "\n".join(lines))
    else:
        _emit(out, dumps(info))


def cmd_lattice(args, out):
    rsys = _system(args.system)
    lat = admissible_pairs(rsys, args.max_atoms)
    if args.format == "dot":
        _emit(out, lat.to_dot())
    elif args.format == "text":
        lines = [f"{i}: H={{{','.join(p['H'])}}} S={{{','.join(p['S'])}}}"
                 for i, p in enumerate(lat.to_json()["pairs"])]
        lines += [f"{i} < {j}" for i, j in lat.hasse()]
        _emit(out, "\n".join(lines))
    else:
        _emit(out, dumps(lat.to_json()))


def cmd_quotient(args, out):
    rsys = _system(args.system)
    rsys.bds.require_finite()
    alg = rsys.algebra
    try:
        h = alg.mask_of(_labels(args.H))
        s = alg.mask_of(_labels(args.S)) if args.S is not None else None
    except KeyError as exc:
        raise ParseError(str(exc)) from None
    if s is None:
        res = quotient_system(rsys, h)
    else:
        res = quotient_system(rsys, pair(rsys, h, s))
    data = system_to_json(res.system)
    data["atom_map"] = {alg.labels[x]: res.system.algebra.labels[i]
                        for x, i in sorted(res.atom_map.items())}
    _emit(out, dumps(data))


def cmd_tilde(args, out):
    rsys = _system(args.system)
    t = tilde(rsys)
    iso = tilde_iso_generators(rsys, t)
    ok = iso.verify(args.depth or 2)
    src, tgt = calculus(t.source), calculus(t.system)
    table = {
        "phi": {**{f"p[{src.format_atom(a)}]": str(v)
                   for a, v in sorted(iso.phi_p.items())},
                **{f"s[{g};{src.format_atom(a)}]": str(v)
                   for (g, a), v in sorted(iso.phi_s.items())}},
        "rho": {**{f"p[{tgt.format_atom(y)}]": str(v)
                   for y, v in sorted(iso.rho_p.items())},
                **{f"s[{g};{tgt.format_atom(y)}]": str(v)
                   for (g, y), v in sorted(iso.rho_s.items())}},
    }
    data = {"system": system_to_json(t.system),
            "atom_map": {
                "original": {src.format_atom(x): tgt.format_atom(y)
                             for x, y in sorted(t.orig.items())},
                "copy": {src.format_atom(x): tgt.format_atom(y)
                         for x, y in sorted(t.copy.items())}},
            "iso": table, "verified": ok, "checks": iso.checks}
    _emit(out, dumps(data))


def cmd_import(args, out):
    data = load_json(args.graph)
    try:
        g = LabelledGraph.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad graph file: {exc}") from None
    _emit(out, dumps(system_to_json(import_labelled_graph(g))))


def cmd_remark(args, out):
    ex = remark_example()
    data = system_to_json(ex.system(args.ideal))
    m = ex.witness_membership()
    data["witness"] = {"element": element_to_json(ex.witness),
                       "in_I": m["in_I"], "in_R": m["in_R"]}
    _emit(out, dumps(data))


def _load_rep(path):
    from .reps import rep_from_json
    try:
        return rep_from_json(load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad representation file: {exc}") from None


def cmd_check_rep(args, out):
    from .reps import check_giut, validate_representation
    rsys = _system(args.system)
    rsys.bds.require_finite()
    if not args.rep:
        raise ParseError("check-rep needs --rep FILE")
    rep = _load_rep(args.rep)
    report = validate_representation(rsys, rep)
    data = {"relations": report.to_dict()}
    if report.ok:
        data["giut"] = check_giut(rsys, rep)
    _emit(out, dumps(data))


def cmd_eval(args, out):
    rsys = _system(args.system)
    calc = calculus(rsys)
    x = calc.parse(args.expr)
    nf = calc.normal_form(x, args.depth) if args.depth else x
    if args.rep is None:
        if args.format == "json":
            _emit(out, dumps({"value": str(nf)}))
        else:
            _emit(out, str(nf))
        return
    from .reps import evaluate, validate_representation
    rep = _load_rep(args.rep)
    report = validate_representation(rsys, rep)
    m = evaluate(rep, nf)
    matrix = [[[round(v.real, 12) + 0.0, round(v.imag, 12) + 0.0]
               if abs(v.imag) > 0 else round(v.real, 12) + 0.0 for v in row]
              for row in m]
    _emit(out, dumps({"value": str(nf), "rep_valid": report.ok,
                      "matrix": matrix}))


def cmd_export_dot(args, out):
    """The dual-map graph: an edge ``u -g-> x`` whenever ``f_g(x) = u``."""
    rsys = _system(args.system)
    rsys.bds.require_finite()
    alg = rsys.algebra
    lines = ["digraph system {"]
    for x in range(alg.n):
        shape = "doublecircle" if rsys.gen_J >> x & 1 else "circle"
        lines.append(f'  "{alg.labels[x]}" [shape={shape}];')
    for g in rsys.labels:
        for x, u in enumerate(rsys.bds.dual[g]):
            if u is not None:
                lines.append(f'  "{alg.labels[u]}" -> "{alg.labels[x]}" '
                             f'[label="{g}"];')
    lines.append("}")
    _emit(out, "\n".join(lines))


# ------------------------------------------------------------------ parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=0,
                        help="rewrite / membership depth")
    common.add_argument("--max-atoms", type=int, default=MAX_ATOMS)
    common.add_argument("--format", choices=("json", "dot", "text"),
                        default="json")
    common.add_argument("--rep", help="representation JSON file")

    p = argparse.ArgumentParser(prog="gbds", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, helptext, *positional):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        for arg in positional:
            sp.add_argument(arg)
        sp.set_defaults(fn=fn)
        return sp

    add("inspect", cmd_inspect, "atoms, actions, B_reg, ranges, validity",
        "system")
    add("lattice", cmd_lattice, "admissible pairs and their order", "system")
    q = add("quotient", cmd_quotient, "quotient system by H (and S)", "system")
    q.add_argument("--H", required=True, help="comma-separated atoms of H")
    q.add_argument("--S", help="comma-separated atoms of S")
    add("tilde", cmd_tilde, "tilde system and iso generator table", "system")
    add("import-labelled", cmd_import, "system from a labelled graph", "graph")
    r = add("remark-example", cmd_remark, "the Remark family")
    r.add_argument("--ideal", choices=("range", "principal"), default="range")
    add("check-rep", cmd_check_rep, "validate a matrix representation",
        "system")
    add("eval", cmd_eval, "evaluate a term expression", "system", "expr")
    add("export-dot", cmd_export_dot, "DOT of the dual-map graph", "system")
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.fn(args, out)
    except ParseError as exc:
        err.write(json.dumps(exc.to_dict()) + "\n")
        return 2
    except GbdsError as exc:
        err.write(json.dumps(exc.to_dict()) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
