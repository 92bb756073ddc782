"""Hereditary saturated ideals, admissible pairs and gauge-invariant ideals.

All functions work on the finite backend, where every ideal is principal and
is handled through the bit mask of its generator.

Saturation is checked atom by atom.  Since ``theta`` and ``Delta`` are
union-additive, a set ``A`` of ``J`` with all images ``theta_g(A)`` inside
``H`` has every atom ``a <= A`` in ``J`` with ``theta_g(a) <= theta_g(A)``
inside ``H``; conversely if every atom of ``A`` is forced into ``H`` so is
``A``.  So "J-saturated" only needs testing on atoms of ``gen J``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .boolean import FiniteAlgebra, Principal, iter_bits, popcount
from .dynamics import make_system
from .errors import DepthExceeded, InvalidIdeal, SizeLimit
from .linalg import RowSpace
from .words import NormalTerm, calculus

MAX_ATOMS = 16


def _mask(sys, g):
    if isinstance(g, int):
        return g
    if hasattr(g, "value"):
        return g.value
    if isinstance(g, Principal):
        return g.generator.value
    return sys.algebra.mask_of(g)


# ---------------------------------------------------------------- checks


def hereditary_witness(sys, g):
    """A label whose image of ``g`` leaves ``g``, or None."""
    g = _mask(sys, g)
    for lab in sys.labels:
        if sys.theta(lab, g) & ~g:
            return lab
    return None


def saturation_witness(sys, g):
    """An atom of ``gen J`` outside ``g`` that saturation forces in."""
    g = _mask(sys, g)
    for a in iter_bits(sys.gen_J & ~g):
        if all(not sys.theta(lab, 1 << a) & ~g for lab in sys.labels):
            return a
    return None


def is_hereditary(sys, g):
    sys.bds.require_finite()
    return hereditary_witness(sys, g) is None


def is_J_saturated(sys, g):
    sys.bds.require_finite()
    return saturation_witness(sys, g) is None


def _closure_mask(sys, g):
    while True:
        prev = g
        changed = True
        while changed:
            img = 0
            for lab in sys.labels:
                img |= sys.theta(lab, g)
            changed = bool(img & ~g)
            g |= img
        for a in iter_bits(sys.gen_J & ~g):
            if all(not sys.theta(lab, 1 << a) & ~g for lab in sys.labels):
                g |= 1 << a
        if g == prev:
            return g


@dataclass(frozen=True, eq=False)
class HereditarySaturatedIdeal:
    system: object
    mask: int

    def __post_init__(self):
        if not (is_hereditary(self.system, self.mask)
                and is_J_saturated(self.system, self.mask)):
            raise InvalidIdeal(
                f"{self.system.algebra.labels_of(self.mask)} is not "
                "hereditary and J-saturated")

    @property
    def generator(self):
        return self.system.algebra.from_mask(self.mask)

    @property
    def ideal(self):
        return Principal(self.generator)

    def labels(self):
        return self.system.algebra.labels_of(self.mask)

    def __eq__(self, other):
        return (isinstance(other, HereditarySaturatedIdeal)
                and other.system is self.system and other.mask == self.mask)

    def __hash__(self):
        return hash(self.mask)

    def __repr__(self):
        return f"HSat({self.labels()})"


def saturation_closure(sys, g):
    sys.bds.require_finite()
    return HereditarySaturatedIdeal(sys, _closure_mask(sys, _mask(sys, g)))


def _check_size(sys, max_atoms):
    if sys.n > max_atoms:
        raise SizeLimit(f"{sys.n} atoms exceed the bound of {max_atoms}")


def _sort_key(sys):
    def key(m):
        return (popcount(m), list(iter_bits(m)))
    return key


def enumerate_hsat(sys, method="filter", max_atoms=MAX_ATOMS):
    """All hereditary J-saturated ideals, sorted by generator.

    ``method="filter"`` tests all ``2^n`` subsets; ``method="closure"``
    grows the family from ``closure(0)`` by closing ``H | {x}``: every closed
    set is reached by a chain of such single-atom steps.
    """
    sys.bds.require_finite()
    if method == "filter":
        _check_size(sys, max_atoms)
        masks = [m for m in range(1 << sys.n)
                 if is_hereditary(sys, m) and is_J_saturated(sys, m)]
    elif method == "closure":
        start = _closure_mask(sys, 0)
        seen = {start}
        todo = [start]
        while todo:
            h = todo.pop()
            for x in iter_bits(sys.algebra.top_mask & ~h):
                c = _closure_mask(sys, h | 1 << x)
                if c not in seen:
                    seen.add(c)
                    todo.append(c)
        masks = list(seen)
    else:
        raise ValueError(f"unknown method {method!r}")
    masks.sort(key=_sort_key(sys))
    return [HereditarySaturatedIdeal(sys, m) for m in masks]


def compute_BH_mask(sys, h):
    h = _mask(sys, h)
    out = h
    for x in iter_bits(sys.algebra.top_mask & ~h):
        if any(sys.theta(lab, 1 << x) & ~h for lab in sys.labels):
            out |= 1 << x
    return out


def compute_BH(sys, H):
    sys.bds.require_finite()
    return Principal(sys.algebra.from_mask(compute_BH_mask(sys, H)))


# ------------------------------------------------------- admissible pairs


@dataclass(frozen=True, eq=False)
class AdmissiblePair:
    system: object
    h: int
    s: int

    def __post_init__(self):
        sys = self.system
        if not (is_hereditary(sys, self.h) and is_J_saturated(sys, self.h)):
            raise InvalidIdeal("H is not hereditary and J-saturated")
        need = self.h | sys.gen_J
        if need & ~self.s or self.s & ~compute_BH_mask(sys, self.h):
            raise InvalidIdeal("S must satisfy H u J <= S <= B_H")

    @property
    def H(self):
        return HereditarySaturatedIdeal(self.system, self.h)

    @property
    def S(self):
        return Principal(self.system.algebra.from_mask(self.s))

    def key(self):
        return (popcount(self.h), list(iter_bits(self.h)),
                list(iter_bits(self.s)))

    def __le__(self, other):
        return not (self.h & ~other.h or self.s & ~other.s)

    def __eq__(self, other):
        return (isinstance(other, AdmissiblePair)
                and other.system is self.system
                and (other.h, other.s) == (self.h, self.s))

    def __hash__(self):
        return hash((self.h, self.s))

    def to_dict(self):
        lab = self.system.algebra.labels_of
        return {"H": lab(self.h), "S": lab(self.s)}

    def __repr__(self):
        d = self.to_dict()
        return f"Pair(H={d['H']}, S={d['S']})"


def pair(sys, H, S):
    return AdmissiblePair(sys, _mask(sys, H), _mask(sys, S))


def _submasks(mask):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class PairLattice:
    """Admissible pairs under componentwise inclusion.

    Meets and joins come from searching the finite poset, never from a
    componentwise formula.
    """

    def __init__(self, system, pairs):
        self.system = system
        self.pairs = list(pairs)
        n = len(self.pairs)
        self.down = [0] * n  # bitset of indices j with pairs[j] <= pairs[i]
        self.up = [0] * n
        for i, p in enumerate(self.pairs):
            for j, q in enumerate(self.pairs):
                if q <= p:
                    self.down[i] |= 1 << j
                    self.up[j] |= 1 << i

    def __len__(self):
        return len(self.pairs)

    def index(self, p):
        return self.pairs.index(p)

    def leq(self, i, j):
        return bool(self.down[j] >> i & 1)

    @property
    def order(self):
        return [[i, j] for j in range(len(self)) for i in iter_bits(self.down[j])]

    def meet_index(self, i, j):
        """Index of the unique greatest lower bound, or None."""
        lower = self.down[i] & self.down[j]
        hits = [m for m in iter_bits(lower) if self.down[m] & lower == lower]
        return hits[0] if len(hits) == 1 else None

    def join_index(self, i, j):
        upper = self.up[i] & self.up[j]
        hits = [m for m in iter_bits(upper) if self.up[m] & upper == upper]
        return hits[0] if len(hits) == 1 else None

    def meet(self, p, q):
        k = self.meet_index(self.index(p), self.index(q))
        return None if k is None else self.pairs[k]

    def join(self, p, q):
        k = self.join_index(self.index(p), self.index(q))
        return None if k is None else self.pairs[k]

    def lattice_failures(self):
        bad = []
        for i in range(len(self)):
            for j in range(i, len(self)):
                if self.meet_index(i, j) is None or self.join_index(i, j) is None:
                    bad.append((i, j))
        return bad

    def is_lattice(self):
        return not self.lattice_failures()

    def hasse(self):
        """Covering pairs ``[i, j]`` (i < j with nothing strictly between)."""
        edges = []
        for j in range(len(self)):
            below = self.down[j] & ~(1 << j)
            for i in iter_bits(below):
                between = below & self.up[i] & ~(1 << i)
                if not between:
                    edges.append([i, j])
        edges.sort()
        return edges

    def to_json(self):
        return {"pairs": [p.to_dict() for p in self.pairs],
                "order": self.order, "hasse": self.hasse()}

    def to_dot(self):
        lines = ["digraph pairs {", "  rankdir=BT;"]
        for i, p in enumerate(self.pairs):
            d = p.to_dict()
            label = "H={" + ",".join(d["H"]) + "} S={" + ",".join(d["S"]) + "}"
            lines.append(f'  p{i} [label="{label}"];')
        for i, j in self.hasse():
            lines.append(f"  p{i} -> p{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def admissible_pairs(sys, max_atoms=MAX_ATOMS):
    sys.bds.require_finite()
    out = []
    for H in enumerate_hsat(sys, "filter" if sys.n <= max_atoms else
                            "closure", max_atoms):
        low = H.mask | sys.gen_J
        free = compute_BH_mask(sys, H.mask) & ~low
        for sub in _submasks(free):
            out.append(AdmissiblePair(sys, H.mask, low | sub))
    out.sort(key=AdmissiblePair.key)
    return PairLattice(sys, out)


# -------------------------------------------------------------- quotients


@dataclass(frozen=True)
class QuotientResult:
    system: object
    atom_map: dict  # original atom index -> quotient atom index


def quotient_system(sys, H, S=None):
    """The system over ``B/H``; with ``S`` the relative ideal becomes [S].

    ``theta_g`` is well defined on classes because ``H`` is hereditary:
    ``theta_g(A) \\ H`` only depends on ``A \\ H``.
    """
    sys.bds.require_finite()
    if isinstance(H, AdmissiblePair):
        H, S = H.h, H.s
    h = _mask(sys, H)
    if not (is_hereditary(sys, h) and is_J_saturated(sys, h)):
        raise InvalidIdeal("quotients need a hereditary J-saturated ideal")
    keep = [x for x in range(sys.n) if not h >> x & 1]
    amap = {x: i for i, x in enumerate(keep)}
    labels = sys.algebra.labels
    alg = FiniteAlgebra([labels[x] for x in keep])

    def sub(mask):
        return sum(1 << amap[x] for x in iter_bits(mask & ~h))

    actions = {}
    for lab in sys.labels:
        f = sys.bds.dual[lab]
        actions[lab] = {labels[x]: labels[f[x]] for x in keep
                        if f[x] is not None and f[x] in amap}
    ideals = {lab: Principal(alg.from_mask(sub(sys.gen_I[lab])))
              for lab in sys.labels}
    rel = sys.gen_J if S is None else _mask(sys, S)
    qsys = make_system(alg, actions, ideals,
                       Principal(alg.from_mask(sub(rel))))
    return QuotientResult(qsys, amap)


# ------------------------------------------------------ ideal membership


def ideal_generators(sys, p):
    """Defect elements ``p_a - p_{a,H}`` for the atoms ``a`` of ``gen S``."""
    calc = calculus(sys)
    return [calc.defect(1 << a, p.h) for a in iter_bits(p.s)]


IN, NOT_IN, INCONCLUSIVE = "In", "NotIn", "Inconclusive"


@dataclass
class Membership:
    verdict: str
    combination: Optional[list] = None  # [(coeff, left, atom, right)]
    depth: int = 0

    def __bool__(self):
        return self.verdict == IN


def _image_in_quotient(x, quot):
    qcalc = calculus(quot.system)
    terms = {}
    for t, c in x.terms.items():
        a = quot.atom_map.get(t.atom)
        if a is not None:
            terms[NormalTerm(t.left, a, t.right)] = c
    return qcalc.element(terms)


def _spanning(calc, p, left, atom, right, defects):
    """``s_{left,a} q_a s_{right,a}^*`` with ``q_a`` the H-defect of ``a``."""
    terms = {}
    for t, c in defects[atom].terms.items():
        # t = (g, d, g) or (), a, (); conjugating prepends the words
        terms[NormalTerm(left + t.left, t.atom, right + t.right)] = c
    return calc.element(terms)


def _base_pairs(x):
    out = set()
    for t in x.terms:
        l, r = t.left, t.right
        k = 0
        while True:
            out.add((l[:len(l) - k], r[:len(r) - k]))
            if k >= min(len(l), len(r)) or l[len(l) - k - 1] != r[len(r) - k - 1]:
                break
            k += 1
    return sorted(out)


def ideal_membership(x, p, depth=None):
    """Decide ``x in I_(H,S)`` at bounded depth.

    ``NotIn``: the image of ``x`` in the quotient system by ``(H, S)`` has a
    nonzero canonical normal form, and ``I_(H,S)`` is the kernel of that
    quotient map.  ``In``: an explicit rational combination of spanning
    elements ``s_{al,a} (p_a - p_{a,H}) s_{be,a}^*`` (word pairs extended by
    up to ``depth`` letters) whose normal form equals that of ``x``.
    Otherwise ``Inconclusive``.
    """
    sys = p.system
    calc = calculus(sys)
    if depth is None:
        depth = 2 * sys.n
    if x.is_zero():
        return Membership(IN, [], 0)
    quot = quotient_system(sys, p)
    y = _image_in_quotient(x, quot)
    qcalc = calculus(quot.system)
    if not qcalc.normal_form(y, y.max_depth()).is_zero():
        return Membership(NOT_IN, None, y.max_depth())

    defects = {a: calc.defect(1 << a, p.h) for a in iter_bits(p.s)}
    bases = _base_pairs(x)
    family = []
    seen = set()
    level = [(l, r) for l, r in bases]
    for t in range(depth + 1):
        for l, r in level:
            avail = calc.word_gen(l) & calc.word_gen(r) & p.s
            for a in iter_bits(avail):
                if (l, a, r) not in seen:
                    seen.add((l, a, r))
                    family.append((l, a, r))
        if family:
            elems = [_spanning(calc, p, l, a, r, defects) for l, a, r in family]
            d = max([x.max_depth()] + [e.max_depth() for e in elems])
            space = RowSpace()
            for i, e in enumerate(elems):
                space.add(calc.normal_form(e, d).terms, i)
            sol = space.solve(calc.normal_form(x, d).terms)
            if sol is not None:
                combo = [(c, family[i][0], family[i][1], family[i][2])
                         for i, c in sorted(sol.items())]
                return Membership(IN, combo, t)
        nxt = []
        for l, r in level:
            for g in sys.labels:
                l2, r2 = l + (g,), r + (g,)
                if calc.word_gen(l2) & calc.word_gen(r2) & p.s:
                    nxt.append((l2, r2))
        level = nxt
        if not level:
            break
    return Membership(INCONCLUSIVE, None, depth)


def recover_pair(sys, p, depth=None):
    """Read ``(H, S)`` back off the ideal ``I_(H,S)`` by membership tests."""
    calc = calculus(sys)
    if depth is None:
        depth = 2 * sys.n

    def member(x, what):
        m = ideal_membership(x, p, depth)
        if m.verdict == INCONCLUSIVE:
            raise DepthExceeded(f"membership of {what} undecided at depth "
                                f"{depth}")
        return m.verdict == IN

    h = 0
    for a in range(sys.n):
        if member(calc.p(1 << a), f"p_{sys.atom_label(a)}"):
            h |= 1 << a
    s = 0
    for a in iter_bits(compute_BH_mask(sys, h)):
        if member(calc.defect(1 << a, h), f"defect of {sys.atom_label(a)}"):
            s |= 1 << a
    return AdmissiblePair(sys, h, s)


# ------------------------------------------------------------ exploration


def compare_quotient_lattice(sys, p, max_atoms=MAX_ATOMS):
    """Sizes of the quotient's pair lattice and of the interval above p.

    Exploratory only: no relation between the two is asserted.
    """
    lat = admissible_pairs(sys, max_atoms)
    above = [q for q in lat.pairs if p <= q]
    quot = quotient_system(sys, p)
    qlat = admissible_pairs(quot.system, max_atoms)
    return {"quotient_pairs": len(qlat), "interval_pairs": len(above),
            "equal_size": len(qlat) == len(above)}
