"""Concrete matrix representations: validation, evaluation, uniqueness checks.

Matrices are complex numpy arrays; residuals are Frobenius norms compared
against the representation's tolerance.  Composite projections and partial
isometries are summed from atoms and then re-checked, never assumed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .boolean import iter_bits
from .errors import InvalidGenerator, ShapeError

TOL = 1e-9


def _norm(m):
    return float(np.linalg.norm(m)) if m.size else 0.0


@dataclass
class ConcreteRep:
    dim: int
    P: dict          # atom label -> matrix
    S: dict          # (label, atom label) -> matrix
    tolerance: float = TOL
    name: str = "rep"

    def __post_init__(self):
        self.P = {str(k): np.asarray(v, dtype=complex) for k, v in self.P.items()}
        self.S = {(str(g), str(a)): np.asarray(v, dtype=complex)
                  for (g, a), v in self.S.items()}
        for key, m in list(self.P.items()) + list(self.S.items()):
            if m.shape != (self.dim, self.dim):
                raise ShapeError(f"matrix {key!r} has shape {m.shape}, "
                                 f"expected {(self.dim, self.dim)}")

    def zero(self):
        return np.zeros((self.dim, self.dim), dtype=complex)


class _Bound:
    """A representation tied to a system's atom indexing."""

    def __init__(self, sys, rep):
        self.sys = sys
        self.rep = rep
        labels = sys.algebra.labels
        if set(rep.P) != set(labels):
            raise ShapeError("projection keys must be exactly the atoms: "
                             f"missing {sorted(set(labels) - set(rep.P))}, "
                             f"unknown {sorted(set(rep.P) - set(labels))}")
        expected = {(g, labels[a]) for g in sys.labels
                    for a in iter_bits(sys.gen_I[g])}
        if set(rep.S) != expected:
            raise ShapeError("partial isometry keys must be exactly the pairs "
                             "(label, atom of I_label): missing "
                             f"{sorted(expected - set(rep.S))}, unknown "
                             f"{sorted(set(rep.S) - expected)}")
        self.p_atom = [rep.P[lab] for lab in labels]
        self.s_atom = {(g, sys.algebra.index[a]): m
                       for (g, a), m in rep.S.items()}
        self._word = {}

    def P(self, mask):
        out = self.rep.zero()
        for x in iter_bits(mask):
            out = out + self.p_atom[x]
        return out

    def S(self, g, mask):
        out = self.rep.zero()
        for x in iter_bits(mask):
            m = self.s_atom.get((g, x))
            if m is None:
                raise InvalidGenerator(f"s[{g};{self.sys.atom_label(x)}] is "
                                       "not a generator")
            out = out + m
        return out

    def word(self, word, atom):
        """``S_{w1,B1} S_{w2,B2} ... S_{wn,atom}``, ``B1 = gen I_{w1}``,
        ``B_i = theta_{w_i}(B_{i-1})``."""
        key = (word, atom)
        m = self._word.get(key)
        if m is None:
            b = self.sys.gen_I[word[0]]
            m = None
            for i, g in enumerate(word):
                if i:
                    b = self.sys.theta(g, b)
                f = self.S(g, (1 << atom) if i == len(word) - 1 else b)
                m = f if m is None else m @ f
            self._word[key] = m
        return m


@dataclass
class RepReport:
    ok: bool
    checks: list = field(default_factory=list)

    def failures(self):
        return [c for c in self.checks if not c["ok"]]

    def max_residual(self):
        return max((c["residual"] for c in self.checks), default=0.0)

    def to_dict(self):
        return {"ok": self.ok, "checked": len(self.checks),
                "max_residual": self.max_residual(),
                "failures": self.failures()}


def _bind(sys, rep):
    sys.bds.require_finite()
    return _Bound(sys, rep)


def validate_representation(sys, rep, samples=200, seed=0):
    """Check the four defining relation families.

    (i) atom projections are orthogonal projections; unions and
    intersections of composites (all pairs when ``2^n <= 64``, otherwise
    ``samples`` random pairs); (ii) ``P_x S_{g,b} = S_{g,b} P_{theta_g(x)}``
    for atoms; (iii) ``S_{g,b}^* S_{h,c} = delta_{g,h} P_{b & c}``;
    (iv) the Cuntz-Krieger sum on atoms of ``gen J``.
    """
    b = _bind(sys, rep)
    tol = rep.tolerance
    checks = []
    labels = sys.algebra.labels

    def add(rel, item, residual):
        checks.append({"relation": rel, "item": item,
                       "residual": residual, "ok": residual <= tol})

    n = sys.n
    for x in range(n):
        p = b.p_atom[x]
        add("i", f"P[{labels[x]}]^2 = P[{labels[x]}]", _norm(p @ p - p))
        add("i", f"P[{labels[x]}]^* = P[{labels[x]}]",
            _norm(p.conj().T - p))
        for y in range(x + 1, n):
            add("i", f"P[{labels[x]}] P[{labels[y]}] = 0",
                _norm(p @ b.p_atom[y]))
    if (1 << n) <= 64:
        masks = [(u, v) for u in range(1 << n) for v in range(1 << n)]
    else:
        rng = random.Random(seed)
        masks = [(rng.getrandbits(n), rng.getrandbits(n))
                 for _ in range(samples)]
    for u, v in masks:
        pu, pv = b.P(u), b.P(v)
        add("i", f"P[{u:#x} & {v:#x}] = P P", _norm(b.P(u & v) - pu @ pv))
        add("i", f"P[{u:#x} | {v:#x}] = P + P - P P",
            _norm(b.P(u | v) - (pu + pv - pu @ pv)))

    gens = sorted(b.s_atom)
    for g, a in gens:
        s = b.s_atom[(g, a)]
        for x in range(n):
            lhs = b.p_atom[x] @ s
            rhs = s @ b.P(sys.theta(g, 1 << x))
            add("ii", f"P[{labels[x]}] S[{g};{labels[a]}]", _norm(lhs - rhs))
    for g, a in gens:
        for h, c in gens:
            lhs = b.s_atom[(g, a)].conj().T @ b.s_atom[(h, c)]
            rhs = b.P(1 << a & 1 << c) if g == h else rep.zero()
            add("iii", f"S[{g};{labels[a]}]^* S[{h};{labels[c]}]",
                _norm(lhs - rhs))
    for a in iter_bits(sys.gen_J):
        total = rep.zero()
        for g in sys.labels:
            img = sys.theta(g, 1 << a)
            if img:
                s = b.S(g, img)
                total = total + s @ s.conj().T
        add("iv", f"CK at {labels[a]}", _norm(b.p_atom[a] - total))
    return RepReport(all(c["ok"] for c in checks), checks)


def defect_matrix(b, mask):
    out = b.P(mask)
    for g in b.sys.labels:
        img = b.sys.theta(g, mask)
        if img:
            s = b.S(g, img)
            out = out - s @ s.conj().T
    return out


def check_giut(sys, rep):
    """Hypotheses of the gauge-invariant uniqueness theorem on one rep.

    (1) ``P_a != 0`` for every atom; (2) the defect of every atom of
    ``gen B_reg \\ gen J`` is nonzero.  (3), the gauge action, is not
    decidable from a single representation and is reported as unchecked.
    """
    b = _bind(sys, rep)
    tol = rep.tolerance
    labels = sys.algebra.labels
    zero_p = [labels[x] for x in range(sys.n) if _norm(b.p_atom[x]) <= tol]
    block = sys.regular_mask & ~sys.gen_J
    zero_q = [labels[x] for x in iter_bits(block)
              if _norm(defect_matrix(b, 1 << x)) <= tol]
    return {
        "condition1": {"ok": not zero_p, "witnesses": zero_p},
        "condition2": {"ok": not zero_q, "vacuous": not block,
                       "witnesses": zero_q},
        "condition3": {"status": "not checked",
                       "reason": "a gauge action is not determined by one "
                                 "representation; the symbolic Z-grading "
                                 "(see words.grading) covers invariance"},
    }


def evaluate(rep, x, sys=None):
    """Matrix of ``x``: ``(al, a, be) -> S_al P_a S_be^*``."""
    sys = x.calc.sys if sys is None else sys
    b = getattr(rep, "_bound", None)
    if b is None or b.sys is not sys:
        b = rep._bound = _bind(sys, rep)
    out = rep.zero()
    for t, c in x.terms.items():
        if not x.calc.is_valid(t):
            raise InvalidGenerator(f"invalid term {x.calc.format_term(t)}")
        m = b.p_atom[t.atom]
        if t.left:
            m = b.word(t.left, t.atom) @ m
        if t.right:
            m = m @ b.word(t.right, t.atom).conj().T
        out = out + complex(c) * m
    return out


# ---------------------------------------------------------- boundary rep


def _has_cycle(sys):
    succ = {x: set() for x in range(sys.n)}
    for g in sys.labels:
        for x, y in enumerate(sys.bds.dual[g]):
            if y is not None:
                succ[x].add(y)
    state = {}

    def visit(x):
        state[x] = 1
        for y in succ[x]:
            s = state.get(y)
            if s == 1 or (s is None and visit(y)):
                return True
        state[x] = 2
        return False

    return any(state.get(x) is None and visit(x) for x in range(sys.n))


def boundary_representation(sys, max_dim=256):
    """Left-regular style representation on ``xi_{mu,x}``.

    Basis: words ``mu`` and atoms ``x`` of ``gen I_mu`` outside ``gen J``.
    ``P_A xi_{mu,x} = [x <= theta_mu(A)] xi_{mu,x}`` and ``S_{g,b} xi_{mu,x}
    = [x <= theta_mu(b)] xi_{g mu,x}``.  Only built when no atom lies on a
    cycle of the dual maps (so the word set is finite); None otherwise or
    when the dimension exceeds ``max_dim``.
    """
    if not sys.is_finite or _has_cycle(sys):
        return None
    outside = sys.algebra.top_mask & ~sys.gen_J
    basis = []
    frontier = [()]
    while frontier:
        nxt = []
        for mu in frontier:
            g = sys.word_gen(mu)
            for x in iter_bits(g & outside):
                basis.append((mu, x))
            if len(basis) > max_dim:
                return None
            for lab in sys.labels:
                w = (lab,) + mu
                if sys.word_gen(w):
                    nxt.append(w)
        frontier = nxt
    index = {k: i for i, k in enumerate(basis)}
    dim = len(basis)
    if dim == 0:
        return None
    labels = sys.algebra.labels
    theta_mu = {}

    def th(mu, mask):
        key = (mu, mask)
        if key not in theta_mu:
            theta_mu[key] = sys.theta_word(mu, mask)
        return theta_mu[key]

    P, S = {}, {}
    for a in range(sys.n):
        m = np.zeros((dim, dim), dtype=complex)
        for (mu, x), i in index.items():
            if th(mu, 1 << a) >> x & 1:
                m[i, i] = 1
        P[labels[a]] = m
    for g in sys.labels:
        for bt in iter_bits(sys.gen_I[g]):
            m = np.zeros((dim, dim), dtype=complex)
            for (mu, x), i in index.items():
                if th(mu, 1 << bt) >> x & 1:
                    m[index[((g,) + mu, x)], i] = 1
            S[(g, labels[bt])] = m
    return ConcreteRep(dim, P, S, name="boundary")


def rep_from_json(data):
    def mat(rows):
        return [[complex(v[0], v[1]) if isinstance(v, list) else complex(v)
                 for v in row] for row in rows]
    dim = int(data["dim"])
    P = {k: mat(v) for k, v in data.get("P", {}).items()}
    S = {}
    for key, v in data.get("S", {}).items():
        if "|" not in key:
            raise ShapeError(f"partial isometry key {key!r} must be "
                             "'label|atom'")
        g, a = key.split("|", 1)
        S[(g, a)] = mat(v)
    for name, m in list(P.items()) + list(S.items()):
        if len(m) != dim or any(len(r) != dim for r in m):
            raise ShapeError(f"matrix {name!r} is not {dim}x{dim}")
    return ConcreteRep(dim, P, S, float(data.get("tolerance", TOL)),
                       data.get("name", "rep"))


def rep_to_json(rep):
    def enc(m):
        return [[[float(v.real), float(v.imag)] if v.imag else float(v.real)
                 for v in row] for row in m]
    return {"dim": rep.dim, "P": {k: enc(v) for k, v in sorted(rep.P.items())},
            "S": {f"{g}|{a}": enc(v) for (g, a), v in sorted(rep.S.items())}}
