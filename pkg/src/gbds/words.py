"""Symbolic calculus for the dense spanning *-algebra of a finite system.

Every element is a finite rational combination of normal terms
``(alpha, a, beta)`` standing for ``s_{alpha,a} s_{beta,a}^*``, where ``a`` is
an atom lying in both word ideals ``I_alpha`` and ``I_beta``.  Products of
two normal terms are again a single normal term or zero (the four-case
product table), so no reduction is needed for multiplication.

The only relation not built into the term basis is the Cuntz-Krieger
identity for atoms of ``J``.  ``normal_form`` applies it as a one-way
expansion ``(alpha, a, beta) -> sum (alpha g, d, beta g)`` over labels ``g``
emitted by ``a`` and atoms ``d`` of ``theta_g(a)``.  Because the dual maps are
functions, expansions of distinct atoms never share a term, which makes the
depth-capped normal form canonical once the depth reaches the largest
``min(|alpha|, |beta|)`` in play.
"""

from __future__ import annotations

import re
import weakref
from fractions import Fraction
from typing import NamedTuple

from .boolean import Element, iter_bits
from .dynamics import format_word, parse_word
from .errors import (AlgebraMismatch, InvalidGenerator, NotExpandable,
                     ParseError, ShapeError)


class NormalTerm(NamedTuple):
    left: tuple
    atom: int
    right: tuple

    @property
    def degree(self):
        return len(self.left) - len(self.right)

    @property
    def depth(self):
        return min(len(self.left), len(self.right))

    def adjoint(self):
        return NormalTerm(self.right, self.atom, self.left)


class AlgElement:
    """Immutable rational combination of normal terms over one calculus."""

    __slots__ = ("calc", "terms")

    def __init__(self, calc, terms=None):
        self.calc = calc
        self.terms = {t: Fraction(c) for t, c in (terms or {}).items() if c}

    def _other(self, other):
        if not isinstance(other, AlgElement) or other.calc is not self.calc:
            raise AlgebraMismatch("elements of different systems")
        return other

    def __add__(self, other):
        other = self._other(other)
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return AlgElement(self.calc, out)

    def __neg__(self):
        return AlgElement(self.calc, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __mul__(self, other):
        if isinstance(other, AlgElement):
            return self.calc.mul(self, self._other(other))
        c = Fraction(other)
        return AlgElement(self.calc, {t: c * v for t, v in self.terms.items()})

    def __rmul__(self, other):
        c = Fraction(other)
        return AlgElement(self.calc, {t: c * v for t, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        return (isinstance(other, AlgElement) and other.calc is self.calc
                and other.terms == self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    @property
    def star(self):
        return self.calc.adjoint(self)

    def adjoint(self):
        return self.calc.adjoint(self)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def max_depth(self):
        return max((t.depth for t in self.terms), default=0)

    def max_length(self):
        return max((max(len(t.left), len(t.right)) for t in self.terms),
                   default=0)

    def __str__(self):
        return self.calc.format(self)

    def __repr__(self):
        return f"AlgElement({self.calc.format(self)})"


class WordCalculus:
    def __init__(self, rsys):
        rsys.bds.require_finite()
        self.sys = rsys
        self.labels = rsys.labels
        self.atom_labels = rsys.algebra.labels
        self._wgen = {(): rsys.algebra.top_mask}
        self._theta = {}
        self._expand = {}
        self._reps = {}  # id(rep) -> (rep, validated?) for eq_modulo_ck
        self._boundary = False  # not yet computed

    # --------------------------------------------------------- basics

    def word_gen(self, word):
        g = self._wgen.get(word)
        if g is None:
            g = self.sys.word_gen(word)
            self._wgen[word] = g
        return g

    def theta_atom(self, word, atom):
        key = (word, atom)
        m = self._theta.get(key)
        if m is None:
            m = self.sys.theta_word(word, 1 << atom)
            self._theta[key] = m
        return m

    def is_valid(self, t):
        bit = 1 << t.atom
        return bool(self.word_gen(t.left) & bit and self.word_gen(t.right)
                    & bit)

    def term(self, left, atom, right):
        left = parse_word(left, self.labels)
        right = parse_word(right, self.labels)
        atom = self._atom_index(atom)
        t = NormalTerm(left, atom, right)
        if not self.is_valid(t):
            raise InvalidGenerator(f"{self.format_term(t)} is not a valid "
                                   "term: the atom is outside a word ideal")
        return t

    def _atom_index(self, atom):
        if isinstance(atom, int):
            return atom
        if isinstance(atom, Element):
            bits = list(iter_bits(atom.value))
            if len(bits) != 1:
                raise InvalidGenerator("expected an atom")
            return bits[0]
        return self.sys.algebra.index[str(atom)]

    def _mask(self, a):
        if isinstance(a, Element):
            return a.value
        if isinstance(a, int):
            return a
        return self.sys.algebra.mask_of(a)

    def element(self, terms=None):
        return AlgElement(self, terms)

    @property
    def zero(self):
        return AlgElement(self)

    def from_term(self, t, coeff=1):
        return AlgElement(self, {t: coeff})

    # ----------------------------------------------------- generators

    def p(self, a):
        """Projection ``p_A`` as a sum of atom projections."""
        mask = self._mask(a)
        return AlgElement(self, {NormalTerm((), x, ()): 1
                                 for x in iter_bits(mask)})

    def s(self, word, b):
        """Partial isometry ``s_{word,B}``; B must lie in ``I_word``."""
        word = parse_word(word, self.labels)
        mask = self._mask(b)
        if mask & ~self.word_gen(word):
            raise InvalidGenerator(
                f"s[{format_word(word)};...]: set is not in the word ideal")
        return AlgElement(self, {NormalTerm(word, x, ()): 1
                                 for x in iter_bits(mask)})

    def defect(self, a, hereditary=0):
        """``p_A - sum_{g in Delta_[A]} s_{g,theta_g(A)} s_{g,theta_g(A)}^*``.

        ``Delta_[A]`` is taken in the quotient by the hereditary ideal with
        generator mask ``hereditary`` (empty: the plain defect projection).
        """
        mask = self._mask(a)
        terms = {NormalTerm((), x, ()): Fraction(1) for x in iter_bits(mask)}
        for g in self.labels:
            img = self.sys.theta(g, mask)
            if img & ~hereditary:
                for d in iter_bits(img):
                    t = NormalTerm((g,), d, (g,))
                    terms[t] = terms.get(t, 0) - 1
        return AlgElement(self, terms)

    def embed(self, kind, *args):
        if kind == "p":
            return self.p(*args)
        if kind == "s":
            return self.s(*args)
        raise InvalidGenerator(f"unknown generator kind {kind!r}")

    # ------------------------------------------------- multiplication

    def term_product(self, t, u):
        """Product of two normal terms: a normal term or None (zero)."""
        alpha, a, beta = t
        mu, c, nu = u
        if beta == mu:
            return NormalTerm(alpha, a, nu) if a == c else None
        lb, lm = len(beta), len(mu)
        if lb > lm:
            if beta[:lm] == mu:
                tail = beta[lm:]
                if self.theta_atom(tail, c) >> a & 1:
                    return NormalTerm(alpha, a, nu + tail)
            return None
        if mu[:lb] == beta:
            tail = mu[lb:]
            if self.theta_atom(tail, a) >> c & 1:
                return NormalTerm(alpha + tail, c, nu)
        return None

    def term_mul(self, t, u):
        r = self.term_product(t, u)
        if r is None:
            return self.zero
        assert self.is_valid(r), r
        return AlgElement(self, {r: 1})

    def mul(self, x, y):
        out = {}
        for t, c in x.terms.items():
            for u, d in y.terms.items():
                r = self.term_product(t, u)
                if r is not None:
                    out[r] = out.get(r, 0) + c * d
        return AlgElement(self, out)

    def adjoint(self, x):
        return AlgElement(self, {t.adjoint(): c for t, c in x.terms.items()})

    # ------------------------------------------------------ rewriting

    def expansion(self, t):
        """Atoms and words of the Cuntz-Krieger expansion of ``t``."""
        out = self._expand.get(t)
        if out is None:
            if not (self.sys.gen_J >> t.atom & 1):
                raise NotExpandable(
                    f"{self.format_term(t)}: atom is not in J")
            out = []
            for g in self.labels:
                for d in iter_bits(self.theta_atom((g,), t.atom)):
                    out.append(NormalTerm(t.left + (g,), d, t.right + (g,)))
            out = tuple(out)
            self._expand[t] = out
        return out

    def ck_expand(self, t):
        return AlgElement(self, {u: 1 for u in self.expansion(t)})

    def expandable(self, t, depth):
        return self.sys.gen_J >> t.atom & 1 and t.depth < depth

    def normal_form(self, x, depth):
        done = {}
        frontier = dict(x.terms)
        while frontier:
            nxt = {}
            for t, c in frontier.items():
                if self.expandable(t, depth):
                    for u in self.expansion(t):
                        nxt[u] = nxt.get(u, 0) + c
                else:
                    done[t] = done.get(t, 0) + c
            frontier = {t: c for t, c in nxt.items() if c}
        return AlgElement(self, done)

    # -------------------------------------------------------- grading

    def grading(self, x):
        parts = {}
        for t, c in x.terms.items():
            parts.setdefault(t.degree, {})[t] = c
        return {k: AlgElement(self, v) for k, v in sorted(parts.items())}

    def gauge_invariant(self, x):
        return all(t.degree == 0 for t in x.terms)

    # ------------------------------------------------- homomorphisms

    def word_isometry(self, word, atom, s_image, target):
        """Image of ``s_{word,atom}`` under the map given on one-letter
        generators, via ``s_{w1,B} s_{w2,theta_{w2}(B)} ... s_{wn,atom}``
        with ``B = gen I_{w1}``."""
        if not word:
            return None
        b = self.sys.gen_I[word[0]]
        factors = []
        for i, g in enumerate(word):
            if i > 0:
                b = self.sys.theta(g, b)
            set_i = (1 << atom) if i == len(word) - 1 else b
            img = target.zero
            for x in iter_bits(set_i):
                img = img + s_image(g, x)
            factors.append(img)
        out = factors[0]
        for f in factors[1:]:
            out = out * f
        return out

    def apply_hom(self, x, target, p_image, s_image):
        """Extend a generator assignment to a *-homomorphism on elements.

        ``p_image(atom)`` and ``s_image(label, atom)`` give the images of the
        atomic generators ``p_a`` and ``s_{label,a}`` in ``target``.
        """
        out = target.zero
        for t, c in x.terms.items():
            img = p_image(t.atom)
            left = self.word_isometry(t.left, t.atom, s_image, target)
            right = self.word_isometry(t.right, t.atom, s_image, target)
            if left is not None:
                img = left * img
            if right is not None:
                img = img * target.adjoint(right)
            out = out + c * img
        return out

    # ---------------------------------------------------- formatting

    def format_atom(self, x):
        return self.atom_labels[x]

    def format_term(self, t):
        a = self.format_atom(t.atom)
        if not t.left and not t.right:
            return f"p[{a}]"
        parts = []
        if t.left:
            parts.append(f"s[{format_word(t.left)};{a}]")
        if t.right:
            parts.append(f"s[{format_word(t.right)};{a}]^")
        return "*".join(parts)

    def format(self, x):
        if not x.terms:
            return "0"
        out = []
        for t, c in x.sorted_terms():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = self.format_term(t)
            if mag != 1:
                body = f"{mag}*{body}"
            out.append((sign, body))
        text = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    def parse(self, text):
        return _Parser(self, text).parse()


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"""
    \s*(?:
      (?P<num>\d+(?:/\d+)?)
    | (?P<gen>[pq]\[[^\]]*\] | s\[[^\];]*;[^\]]*\])
    | (?P<op>[-+*^()])
    )""", re.VERBOSE)


class _Parser:
    """expr := term (('+'|'-') term)* ; term := unary ('*' unary)* ;
    unary := '-' unary | factor ; factor := (num | gen | '(' expr ')') '^'*
    """

    def __init__(self, calc, text):
        self.calc = calc
        self.text = text
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"cannot parse term expression at "
                                 f"{text[pos:]!r}")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None,
                                                                      None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ParseError("empty term expression")
        x = self.expr()
        if self.i != len(self.tokens):
            raise ParseError(f"unexpected token {self.peek()[1]!r}")
        return self.lift(x)

    def lift(self, x):
        # the algebra has no unit, so the only scalar that is an element is 0
        if isinstance(x, AlgElement):
            return x
        if x == 0:
            return self.calc.zero
        raise ParseError("a nonzero scalar is not an element (no unit)")

    def expr(self):
        x = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            y = self.term()
            if isinstance(x, AlgElement) or isinstance(y, AlgElement):
                x, y = self.lift(x), self.lift(y)
            x = x + y if op == "+" else x - y
        return x

    def term(self):
        x = self.unary()
        while self.peek() == ("op", "*"):
            self.take()
            x = _times(x, self.unary())
        return x

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return _times(Fraction(-1), self.unary())
        return self.factor()

    def factor(self):
        kind, val = self.take()
        if kind == "num":
            x = Fraction(val)
        elif kind == "gen":
            x = self.generator(val)
        elif (kind, val) == ("op", "("):
            x = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("missing ')'")
        else:
            raise ParseError(f"unexpected token {val!r}")
        while self.peek() == ("op", "^"):
            self.take()
            if isinstance(x, AlgElement):
                x = x.adjoint()
        return x

    def generator(self, tok):
        calc = self.calc
        kind, body = tok[0], tok[2:-1]
        try:
            if kind in "pq":
                atoms = [a.strip() for a in body.split(",") if a.strip()]
                mask = calc.sys.algebra.mask_of(atoms)
                return calc.p(mask) if kind == "p" else calc.defect(mask)
            word, _, atoms = body.partition(";")
            atoms = [a.strip() for a in atoms.split(",") if a.strip()]
            return calc.s(word.strip(), calc.sys.algebra.mask_of(atoms))
        except KeyError as exc:
            raise ParseError(str(exc)) from None
        except Exception as exc:
            if isinstance(exc, InvalidGenerator):
                raise
            raise ParseError(f"bad generator {tok!r}: {exc}") from None


def _times(x, y):
    if isinstance(x, AlgElement) or isinstance(y, AlgElement):
        if isinstance(x, AlgElement) and isinstance(y, AlgElement):
            return x * y
        if isinstance(x, AlgElement):
            return x * y
        return y.__rmul__(x)
    return x * y


def embed(calc, kind, *args):
    return calc.embed(kind, *args)


def term_mul(calc, t, u):
    return calc.term_mul(t, u)


def adjoint(x):
    return x.calc.adjoint(x)


def ck_expand(calc, t):
    return calc.ck_expand(t)


def normal_form(x, depth):
    return x.calc.normal_form(x, depth)


def grading(x):
    return x.calc.grading(x)


def gauge_invariant(x):
    return x.calc.gauge_invariant(x)


EQUAL, DISTINCT, INCONCLUSIVE = "Equal", "Distinct", "Inconclusive"


def eq_modulo_ck(x, y, depth=0, reps=(), slack=1):
    """Compare two elements modulo the Cuntz-Krieger relations.

    ``Equal`` when the normal form of ``x - y`` vanishes at depth
    ``max(depth, longest word + slack)``.  ``Distinct`` only with a matrix
    witness: one of ``reps`` (validated representations) or the boundary
    representation when the system admits a finite one.  Otherwise
    ``Inconclusive``.  Returns ``(verdict, witness)``.
    """
    from .reps import boundary_representation, evaluate, validate_representation

    calc = x.calc
    diff = x - y
    d = max(depth, diff.max_length() + slack, x.max_length() + slack,
            y.max_length() + slack)
    if calc.normal_form(diff, d).is_zero():
        return EQUAL, None
    if calc._boundary is False:
        calc._boundary = boundary_representation(calc.sys)
    candidates = list(reps)
    if calc._boundary is not None:
        candidates.append(calc._boundary)
    for rep in candidates:
        known = calc._reps.get(id(rep))
        if known is None or known[0] is not rep:
            try:
                ok = validate_representation(calc.sys, rep).ok
            except ShapeError:
                ok = False
            known = calc._reps[id(rep)] = (rep, ok)
        if not known[1]:
            continue
        mx, my = evaluate(rep, x), evaluate(rep, y)
        residual = float(abs(mx - my).max()) if mx.size else 0.0
        if residual > rep.tolerance:
            return DISTINCT, {"rep": rep.name, "residual": residual}
    return INCONCLUSIVE, None


_CALCS = weakref.WeakKeyDictionary()


def calculus(rsys):
    """Shared WordCalculus for a system (its caches are reused)."""
    calc = _CALCS.get(rsys)
    if calc is None:
        calc = WordCalculus(rsys)
        _CALCS[rsys] = calc
    return calc
