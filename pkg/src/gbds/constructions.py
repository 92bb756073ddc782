"""Constructions: the tilde system, labelled-graph import, the Remark family.

Tilde encoding
--------------
For a finite relative system with ``J`` the new algebra has one atom per
original atom plus a copy ``x'`` of every atom in the block
``gen B_reg \\ gen J``.  A pair ``(A, [B]_J)`` (with ``A`` and ``B`` equal
outside ``B_reg``) is encoded as ``A`` together with the copies of
``B & block``.  The dual map of ``theta~`` sends ``x`` and ``x'`` both to
``f(x)`` in the original block, so ``theta~(A, [B]) = (theta(A),
[theta(A)])``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .boolean import (CallableAction, FinCofin, FiniteAlgebra, FinSubsets,
                      Element, Principal, ProductAlgebra, PredicateIdeal,
                      RangeIdeal, iter_bits)
from .dynamics import make_system
from .errors import InternalInvariantViolation, NotWeaklyLeftResolving
from .words import EQUAL, calculus, eq_modulo_ck


# ------------------------------------------------------------------ tilde


@dataclass
class TildeResult:
    system: object
    source: object
    orig: dict   # original atom -> new atom
    copy: dict   # block atom -> new copy atom
    block: int   # mask of gen B_reg \ gen J in the source

    def encode(self, a, b=None):
        """Mask of ``(A, [B]_J)``; ``B`` defaults to ``A``."""
        if b is None:
            b = a
        out = 0
        for x in iter_bits(a):
            out |= 1 << self.orig[x]
        for x in iter_bits(b & self.block):
            out |= 1 << self.copy[x]
        return out

    def decode(self, mask):
        """Canonical ``(A, B)`` for a new mask: ``B = (A \\ block) | copies``."""
        a = b = 0
        inv_orig = {v: k for k, v in self.orig.items()}
        inv_copy = {v: k for k, v in self.copy.items()}
        for y in iter_bits(mask):
            if y in inv_orig:
                a |= 1 << inv_orig[y]
            else:
                b |= 1 << inv_copy[y]
        return a, (a & ~self.block) | b


def _fresh(label, taken):
    out = label + "'"
    while out in taken:
        out += "'"
    taken.add(out)
    return out


def tilde(rsys):
    rsys.bds.require_finite()
    alg = rsys.algebra
    n = alg.n
    block = rsys.regular_mask & ~rsys.gen_J
    taken = set(alg.labels)
    labels = list(alg.labels)
    orig = {x: x for x in range(n)}
    copy = {}
    for x in iter_bits(block):
        copy[x] = len(labels)
        labels.append(_fresh(alg.labels[x], taken))
    new = FiniteAlgebra(labels)
    res = TildeResult(None, rsys, orig, copy, block)
    actions = {}
    for lab in rsys.labels:
        f = rsys.bds.dual[lab]
        mapping = {}
        for x in range(n):
            if f[x] is not None:
                mapping[labels[x]] = labels[f[x]]
                if x in copy:
                    mapping[labels[copy[x]]] = labels[f[x]]
        actions[lab] = mapping
    ideals = {lab: Principal(new.from_mask(res.encode(rsys.gen_I[lab])))
              for lab in rsys.labels}
    res.system = make_system(new, actions, ideals)
    return res


@dataclass
class TildeIso:
    """Generator assignments of the isomorphism and its inverse.

    ``phi_p[a]``, ``phi_s[(label, a)]`` live in the tilde calculus;
    ``rho_p[y]``, ``rho_s[(label, y)]`` in the source calculus.
    """
    tilde: TildeResult
    phi_p: dict
    phi_s: dict
    rho_p: dict
    rho_s: dict
    checks: list = field(default_factory=list)

    def phi(self, x):
        src = calculus(self.tilde.source)
        tgt = calculus(self.tilde.system)
        return src.apply_hom(x, tgt, self.phi_p.__getitem__,
                             lambda g, a: self.phi_s[(g, a)])

    def rho(self, x):
        src = calculus(self.tilde.source)
        tgt = calculus(self.tilde.system)
        return tgt.apply_hom(x, src, self.rho_p.__getitem__,
                             lambda g, a: self.rho_s[(g, a)])

    def verify(self, depth=2):
        """Check that rho.phi and phi.rho fix every generator modulo CK."""
        src = calculus(self.tilde.source)
        tgt = calculus(self.tilde.system)
        out = []
        gens = [(src, f"p[{src.format_atom(a)}]", src.p(1 << a))
                for a in range(src.sys.n)]
        gens += [(src, f"s[{g};{src.format_atom(a)}]", src.s((g,), 1 << a))
                 for g, a in sorted(self.phi_s)]
        gens += [(tgt, f"p[{tgt.format_atom(y)}]", tgt.p(1 << y))
                 for y in range(tgt.sys.n)]
        gens += [(tgt, f"s[{g};{tgt.format_atom(y)}]", tgt.s((g,), 1 << y))
                 for g, y in sorted(self.rho_s)]
        for calc, name, x in gens:
            back = self.rho(self.phi(x)) if calc is src else self.phi(self.rho(x))
            verdict, _ = eq_modulo_ck(back, x, depth)
            out.append({"generator": name,
                        "side": "rho.phi" if calc is src else "phi.rho",
                        "verdict": verdict})
        self.checks = out
        return all(c["verdict"] == EQUAL for c in out)


def tilde_iso_generators(rsys, t=None):
    if t is None:
        t = tilde(rsys)
    rsys = t.source
    src = calculus(rsys)
    tgt = calculus(t.system)
    phi_p, phi_s, rho_p, rho_s = {}, {}, {}, {}
    for a in range(rsys.n):
        phi_p[a] = tgt.p(t.encode(1 << a))
    for g in rsys.labels:
        for a in iter_bits(rsys.gen_I[g]):
            phi_s[(g, a)] = tgt.s((g,), t.encode(1 << a))
    reg = rsys.regular_mask
    for y in range(t.system.n):
        a, b = t.decode(1 << y)
        c, d = b & ~a, a & ~b
        if (c | d) & ~reg:
            raise InternalInvariantViolation(
                "tilde inverse needs C, D inside B_reg")
        rho_p[y] = src.p(a) + src.defect(c) - src.defect(d)
    for g in rsys.labels:
        s_all = src.s((g,), rsys.gen_I[g])
        for y in iter_bits(t.system.gen_I[g]):
            rho_s[(g, y)] = s_all * rho_p[y]
    return TildeIso(t, phi_p, phi_s, rho_p, rho_s)


# --------------------------------------------------------- labelled graphs


@dataclass
class LabelledGraph:
    vertices: list
    edges: list  # (src, dst, label)
    alphabet: list = None

    def __post_init__(self):
        self.vertices = [str(v) for v in self.vertices]
        self.edges = [(str(s), str(d), str(lab)) for s, d, lab in self.edges]
        if self.alphabet is None:
            self.alphabet = sorted({lab for _, _, lab in self.edges})
        known = set(self.vertices)
        for s, d, _ in self.edges:
            if s not in known or d not in known:
                raise ValueError(f"edge {s}->{d} uses an unknown vertex")

    @classmethod
    def from_json(cls, data):
        return cls(data["vertices"],
                   [(e["src"], e["dst"], e["label"]) for e in data["edges"]],
                   data.get("alphabet"))

    def to_json(self):
        return {"vertices": list(self.vertices),
                "edges": [{"src": s, "dst": d, "label": lab}
                          for s, d, lab in self.edges]}

    def range_of(self, sources, label):
        return {d for s, d, lab in self.edges if lab == label and s in sources}


def import_labelled_graph(g):
    """``theta_a(A) = r(A, a)`` over the power set of vertices."""
    alg = FiniteAlgebra(g.vertices)
    actions = {}
    ideals = {}
    for label in g.alphabet:
        src_of = {}
        for s, d, lab in g.edges:
            if lab != label:
                continue
            prev = src_of.get(d)
            if prev is not None and prev != s:
                raise NotWeaklyLeftResolving(label, prev, s, d)
            src_of[d] = s
        actions[label] = dict(src_of)
        ideals[label] = Principal(alg.element(sorted(src_of)))
    return make_system(alg, actions, ideals)


def graph_system(vertices, edges):
    """An ordinary directed graph; each edge ``(name, src, dst)`` is its own
    label."""
    return import_labelled_graph(LabelledGraph(
        vertices, [(s, d, name) for name, s, d in edges],
        [name for name, _, _ in edges]))


# ----------------------------------------------------------- Remark family


def _remark_theta(alg):
    def fn(x):
        a, _ = x.value
        return alg.element((frozenset(), ("finite", a)))
    return fn


def _remark_range_rule(x):
    a, (mode, _) = x.value
    return not a and mode == "finite"


@dataclass
class RemarkExample:
    algebra: object
    range_system: object
    principal_system: object
    witness: Element

    def system(self, ideal="range"):
        return self.range_system if ideal == "range" else self.principal_system

    def witness_membership(self):
        w = self.witness
        return {"witness": repr(w),
                "in_I": self.principal_system.range_ideals["a"].contains(w),
                "in_R": self.range_system.range_ideals["a"].contains(w)}


def remark_example():
    """Finite subsets of N on the left, finite-or-cofinite on the right,
    with ``theta_a((A, B)) = (0, A)``."""
    alg = ProductAlgebra(FinSubsets(), FinCofin())
    act = CallableAction(alg, _remark_theta(alg), _remark_range_rule,
                         "(A,B) -> (0,A)")
    # (A, B) is regular iff B is empty: then Delta of each nonzero
    # subelement is {a}; a nonzero (0, B') has Delta empty
    regular = PredicateIdeal(alg, lambda x: x.owner.right.is_empty(x.value[1]),
                             "{(A,0) : A finite}")
    closed = {"regular": regular}
    ideal_r = RangeIdeal(act, "R_a = {(0,A) : A finite}")
    witness = alg.element((frozenset(), ("cofinite", frozenset())))
    ideal_p = Principal(witness)
    rs = make_system(alg, {"a": act}, {"a": ideal_r}, closed_forms=closed)
    ps = make_system(alg, {"a": act}, {"a": ideal_p}, closed_forms=closed)
    return RemarkExample(alg, rs, ps, witness)


@dataclass
class RemarkTruncation:
    system: object
    k: int
    product: object

    def embed(self, mask):
        """The product-algebra element for a truncation mask.

        Atoms ``L{i}`` and ``R{i}`` are ``({i}, 0)`` and ``(0, {i})``;
        ``Rinf`` is the tail ``(0, N \\ {1..k})``.
        """
        k = self.k
        left = frozenset(i + 1 for i in range(k) if mask >> i & 1)
        right = {i + 1 for i in range(k) if mask >> (k + i) & 1}
        if mask >> (2 * k) & 1:
            value = ("cofinite", frozenset(range(1, k + 1)) - right)
        else:
            value = ("finite", frozenset(right))
        return self.product.element((left, value))


def remark_truncation(k=8, ideal="range"):
    labels = ([f"L{i}" for i in range(1, k + 1)]
              + [f"R{i}" for i in range(1, k + 1)] + ["Rinf"])
    dual = {"a": {f"R{i}": f"L{i}" for i in range(1, k + 1)}}
    alg = FiniteAlgebra(labels)
    gen = [f"R{i}" for i in range(1, k + 1)]
    if ideal != "range":
        gen.append("Rinf")
    rsys = make_system(alg, dual, {"a": Principal(alg.element(gen))})
    return RemarkTruncation(rsys, k, ProductAlgebra(FinSubsets(), FinCofin()))


def remark_representation(k=8, ideal="range"):
    """Matrices on two blocks indexed by ``1..k`` and a point at infinity.

    ``P_(A,B) = diag(1_A, 1_B)`` and ``S_{a,(0,C)}`` is ``1_C`` in the
    upper-right block; dimension ``2(k+1)``.
    """
    import numpy as np

    from .reps import ConcreteRep

    trunc = remark_truncation(k, ideal)
    dim = 2 * (k + 1)

    def unit(i, j):
        m = np.zeros((dim, dim), dtype=complex)
        m[i, j] = 1
        return m

    P, S = {}, {}
    for i in range(k):
        P[f"L{i + 1}"] = unit(i, i)
        P[f"R{i + 1}"] = unit(k + 1 + i, k + 1 + i)
        S[("a", f"R{i + 1}")] = unit(i, k + 1 + i)
    P["Rinf"] = unit(2 * k + 1, 2 * k + 1)
    if ideal != "range":
        S[("a", "Rinf")] = unit(k, 2 * k + 1)
    return trunc, ConcreteRep(dim, P, S, name=f"remark-k{k}-{ideal}")
