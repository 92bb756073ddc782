"""Boolean algebra backends, elements, ideals and actions.

Four backends are supported:

* ``FiniteAlgebra`` -- the power set of an explicit list of atoms.  Element
  values are bit masks, so every finite Boolean algebra is covered and every
  ideal is principal.
* ``FinSubsets`` -- finite subsets of the natural numbers (a generalized
  Boolean algebra, no top element).
* ``FinCofin`` -- finite or cofinite subsets of the natural numbers.
* ``ProductAlgebra`` -- coordinatewise product of two backends.

All values are immutable; equality of elements is structural on the
canonical value.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import (ActionEvaluationError, AlgebraMismatch, DuplicateAtom,
                     UnsupportedBackend, UnsupportedIdealForm)


def iter_bits(mask):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask):
    return bin(mask).count("1")


# ---------------------------------------------------------------- backends


class Algebra:
    kind = "abstract"
    is_finite = False

    def element(self, value):
        return Element(self, self.canonical(value))

    def canonical(self, value):
        return value

    @property
    def empty(self):
        return Element(self, self._empty)

    def random_element(self, rng, bound=20):
        raise NotImplementedError


class FiniteAlgebra(Algebra):
    kind = "finite"
    is_finite = True

    def __init__(self, labels):
        labels = tuple(str(x) for x in labels)
        seen = set()
        for lab in labels:
            if lab in seen:
                raise DuplicateAtom(f"atom label {lab!r} occurs twice")
            seen.add(lab)
        self.labels = labels
        self.index = {lab: i for i, lab in enumerate(labels)}
        self.n = len(labels)
        self.top_mask = (1 << self.n) - 1
        self._empty = 0

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and other.labels == self.labels

    def __hash__(self):
        return hash(("finite", self.labels))

    def __repr__(self):
        return f"FiniteAlgebra({list(self.labels)!r})"

    def canonical(self, value):
        if isinstance(value, int):
            if value < 0 or value > self.top_mask:
                raise ValueError(f"mask {value} out of range")
            return value
        return self.mask_of(value)

    def mask_of(self, labels):
        mask = 0
        for lab in labels:
            try:
                mask |= 1 << self.index[str(lab)]
            except KeyError:
                raise KeyError(f"unknown atom {lab!r}") from None
        return mask

    def from_mask(self, mask):
        return Element(self, self.canonical(mask))

    def atom(self, label):
        return Element(self, 1 << self.index[str(label)])

    def atoms(self):
        return [Element(self, 1 << i) for i in range(self.n)]

    @property
    def top(self):
        return Element(self, self.top_mask)

    def all_elements(self):
        return [Element(self, m) for m in range(1 << self.n)]

    def size(self):
        return 1 << self.n

    def labels_of(self, mask):
        return [self.labels[i] for i in iter_bits(mask)]

    # value-level operations
    def union(self, a, b):
        return a | b

    def intersect(self, a, b):
        return a & b

    def difference(self, a, b):
        return a & ~b

    def is_empty(self, a):
        return a == 0

    def random_element(self, rng, bound=20):
        return Element(self, rng.getrandbits(self.n) if self.n else 0)

    def format_value(self, a):
        return "{" + ",".join(self.labels_of(a)) + "}"


class FinSubsets(Algebra):
    """Finite subsets of a countable universe (the natural numbers)."""

    kind = "finsubsets"

    def __init__(self, universe="N"):
        self.universe = universe
        self._empty = frozenset()

    def __eq__(self, other):
        return isinstance(other, FinSubsets) and other.universe == self.universe

    def __hash__(self):
        return hash(("finsubsets", self.universe))

    def __repr__(self):
        return f"FinSubsets({self.universe!r})"

    def canonical(self, value):
        value = frozenset(int(x) for x in value)
        if any(x < 0 for x in value):
            raise ValueError("universe elements are natural numbers")
        return value

    def union(self, a, b):
        return a | b

    def intersect(self, a, b):
        return a & b

    def difference(self, a, b):
        return a - b

    def is_empty(self, a):
        return not a

    def random_element(self, rng, bound=20):
        return Element(self, frozenset(i for i in range(1, bound + 1)
                                       if rng.random() < 0.3))

    def format_value(self, a):
        return "{" + ",".join(str(x) for x in sorted(a)) + "}"


FINITE, COFINITE = "finite", "cofinite"


class FinCofin(Algebra):
    """Finite or cofinite subsets of the natural numbers.

    A value is ``(mode, support)``: for ``finite`` the set is ``support``,
    for ``cofinite`` it is the complement of ``support``.
    """

    kind = "fincofin"

    def __init__(self, universe="N"):
        self.universe = universe
        self._empty = (FINITE, frozenset())

    def __eq__(self, other):
        return isinstance(other, FinCofin) and other.universe == self.universe

    def __hash__(self):
        return hash(("fincofin", self.universe))

    def __repr__(self):
        return f"FinCofin({self.universe!r})"

    def canonical(self, value):
        mode, support = value
        if mode not in (FINITE, COFINITE):
            raise ValueError(f"bad mode {mode!r}")
        return (mode, frozenset(int(x) for x in support))

    def finite(self, items=()):
        return Element(self, (FINITE, frozenset(items)))

    def cofinite(self, missing=()):
        return Element(self, (COFINITE, frozenset(missing)))

    @property
    def top(self):
        return self.cofinite()

    def union(self, a, b):
        (ma, sa), (mb, sb) = a, b
        if ma == FINITE and mb == FINITE:
            return (FINITE, sa | sb)
        if ma == FINITE:
            return (COFINITE, sb - sa)
        if mb == FINITE:
            return (COFINITE, sa - sb)
        return (COFINITE, sa & sb)

    def intersect(self, a, b):
        (ma, sa), (mb, sb) = a, b
        if ma == FINITE and mb == FINITE:
            return (FINITE, sa & sb)
        if ma == FINITE:
            return (FINITE, sa - sb)
        if mb == FINITE:
            return (FINITE, sb - sa)
        return (COFINITE, sa | sb)

    def difference(self, a, b):
        (ma, sa), (mb, sb) = a, b
        if ma == FINITE and mb == FINITE:
            return (FINITE, sa - sb)
        if ma == FINITE:
            return (FINITE, sa & sb)
        if mb == FINITE:
            return (COFINITE, sa | sb)
        return (FINITE, sb - sa)

    def is_empty(self, a):
        return a[0] == FINITE and not a[1]

    def random_element(self, rng, bound=20):
        mode = FINITE if rng.random() < 0.5 else COFINITE
        return Element(self, (mode, frozenset(
            i for i in range(1, bound + 1) if rng.random() < 0.3)))

    def format_value(self, a):
        mode, s = a
        body = ",".join(str(x) for x in sorted(s))
        return "{" + body + "}" if mode == FINITE else "N\\{" + body + "}"


class ProductAlgebra(Algebra):
    kind = "product"

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self._empty = (left._empty, right._empty)
        self.is_finite = left.is_finite and right.is_finite

    def __eq__(self, other):
        return (isinstance(other, ProductAlgebra)
                and other.left == self.left and other.right == self.right)

    def __hash__(self):
        return hash(("product", self.left, self.right))

    def __repr__(self):
        return f"ProductAlgebra({self.left!r}, {self.right!r})"

    def canonical(self, value):
        a, b = value
        if isinstance(a, Element):
            a = a.value
        if isinstance(b, Element):
            b = b.value
        return (self.left.canonical(a), self.right.canonical(b))

    def pair(self, a, b):
        return self.element((a, b))

    def union(self, a, b):
        return (self.left.union(a[0], b[0]), self.right.union(a[1], b[1]))

    def intersect(self, a, b):
        return (self.left.intersect(a[0], b[0]),
                self.right.intersect(a[1], b[1]))

    def difference(self, a, b):
        return (self.left.difference(a[0], b[0]),
                self.right.difference(a[1], b[1]))

    def is_empty(self, a):
        return self.left.is_empty(a[0]) and self.right.is_empty(a[1])

    def random_element(self, rng, bound=20):
        return Element(self, (self.left.random_element(rng, bound).value,
                              self.right.random_element(rng, bound).value))

    def format_value(self, a):
        return ("(" + self.left.format_value(a[0]) + ", "
                + self.right.format_value(a[1]) + ")")


def mk_finite_algebra(labels):
    return FiniteAlgebra(labels)


# ---------------------------------------------------------------- elements


@dataclass(frozen=True)
class Element:
    owner: Algebra
    value: object

    def _check(self, other):
        if not isinstance(other, Element) or other.owner != self.owner:
            raise AlgebraMismatch(
                f"elements of {self.owner!r} and "
                f"{getattr(other, 'owner', other)!r} cannot be combined")

    def __or__(self, other):
        self._check(other)
        return Element(self.owner, self.owner.union(self.value, other.value))

    def __and__(self, other):
        self._check(other)
        return Element(self.owner,
                       self.owner.intersect(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return Element(self.owner,
                       self.owner.difference(self.value, other.value))

    union = __or__
    intersect = __and__
    difference = __sub__

    def __le__(self, other):
        self._check(other)
        return self.owner.is_empty(self.owner.difference(self.value,
                                                         other.value))

    subseteq = __le__

    def is_empty(self):
        return self.owner.is_empty(self.value)

    def __bool__(self):
        return not self.is_empty()

    def equals(self, other):
        self._check(other)
        return self.value == other.value

    def atoms(self):
        """Atoms below a finite-backend element."""
        if not isinstance(self.owner, FiniteAlgebra):
            raise UnsupportedBackend("atoms exist only in the finite backend")
        return [Element(self.owner, 1 << i) for i in iter_bits(self.value)]

    def labels(self):
        return self.owner.labels_of(self.value)

    def __repr__(self):
        return self.owner.format_value(self.value)


# ------------------------------------------------------------------ ideals


class Ideal:
    owner: Algebra

    def contains(self, a):
        raise NotImplementedError

    def __contains__(self, a):
        return self.contains(a)


class Principal(Ideal):
    def __init__(self, generator):
        self.owner = generator.owner
        self.generator = generator

    def contains(self, a):
        return a <= self.generator

    def __eq__(self, other):
        return (isinstance(other, Principal)
                and other.generator == self.generator)

    def __hash__(self):
        return hash(("principal", self.generator))

    def __repr__(self):
        return f"Principal({self.generator!r})"


class RangeIdeal(Ideal):
    """The ideal of elements below some image of ``action``."""

    def __init__(self, action, description=""):
        self.owner = action.owner
        self.action = action
        self.description = description or f"range of {action!r}"

    def contains(self, a):
        if self.action.range_rule is None:
            raise UnsupportedBackend("action has no range-membership rule")
        return bool(self.action.range_rule(a))

    def __repr__(self):
        return f"RangeIdeal({self.description})"


class PredicateIdeal(Ideal):
    def __init__(self, owner, rule, description):
        self.owner = owner
        self.rule = rule
        self.description = description

    def contains(self, a):
        return bool(self.rule(a))

    def __repr__(self):
        return f"PredicateIdeal({self.description})"


def principal_ideal(g):
    return Principal(g)


def whole_algebra(algebra):
    if isinstance(algebra, FiniteAlgebra):
        return Principal(algebra.top)
    return PredicateIdeal(algebra, lambda a: True, "whole algebra")


def ideal_contains(ideal, a):
    if a.owner != ideal.owner:
        raise AlgebraMismatch("element and ideal live in different algebras")
    return ideal.contains(a)


def _principal_pair(i, j):
    if i.owner != j.owner:
        raise AlgebraMismatch("ideals live in different algebras")
    if not (isinstance(i, Principal) and isinstance(j, Principal)):
        raise UnsupportedIdealForm(
            "join/meet is only defined for principal ideals")
    return i.generator, j.generator


def ideal_join(i, j):
    g, h = _principal_pair(i, j)
    return Principal(g | h)


def ideal_meet(i, j):
    g, h = _principal_pair(i, j)
    return Principal(g & h)


def generator_mask(ideal):
    """Bit mask of the generator of a finite-backend ideal."""
    if not isinstance(ideal.owner, FiniteAlgebra):
        raise UnsupportedBackend("generator masks need the finite backend")
    if isinstance(ideal, Principal):
        return ideal.generator.value
    if isinstance(ideal, RangeIdeal):
        return ideal.action.apply_mask(ideal.owner.top_mask)
    # every ideal of a finite Boolean algebra is principal: take the union
    # of its member atoms
    mask = 0
    for atom in ideal.owner.atoms():
        if ideal.contains(atom):
            mask |= atom.value
    return mask


def normalize_ideal(ideal):
    if isinstance(ideal.owner, FiniteAlgebra) and not isinstance(ideal,
                                                                 Principal):
        return Principal(ideal.owner.from_mask(generator_mask(ideal)))
    return ideal


# ----------------------------------------------------------------- actions


class Action:
    owner: Algebra
    range_rule: Optional[Callable] = None

    def __call__(self, a):
        return action_apply(self, a)


class DualMapAction(Action):
    """theta(A) = {x : f(x) defined and f(x) in A} on a finite algebra.

    ``f`` is a tuple indexed by atom with entries an atom index or ``None``.
    Homomorphism laws hold for every input by construction.
    """

    def __init__(self, owner, f):
        if not isinstance(owner, FiniteAlgebra):
            raise UnsupportedBackend("dual maps need the finite backend")
        f = tuple(f)
        if len(f) != owner.n:
            raise ValueError("dual map must have one entry per atom")
        for y in f:
            if y is not None and not 0 <= y < owner.n:
                raise ValueError(f"dual map target {y} out of range")
        self.owner = owner
        self.f = f
        pre = [0] * owner.n
        for x, y in enumerate(f):
            if y is not None:
                pre[y] |= 1 << x
        self.preimage = tuple(pre)
        self.range_mask = sum(1 << x for x, y in enumerate(f) if y is not None)

    @classmethod
    def from_mapping(cls, owner, mapping):
        """``mapping``: atom label -> atom label (sources of the dual map)."""
        f = [None] * owner.n
        for x, y in mapping.items():
            f[owner.index[str(x)]] = owner.index[str(y)]
        return cls(owner, f)

    def apply_mask(self, mask):
        out = 0
        pre = self.preimage
        for y in iter_bits(mask):
            out |= pre[y]
        return out

    def range_rule(self, a):
        return a.value & ~self.range_mask == 0

    def mapping(self):
        lab = self.owner.labels
        return {lab[x]: lab[y] for x, y in enumerate(self.f) if y is not None}

    def __eq__(self, other):
        return (isinstance(other, DualMapAction) and other.owner == self.owner
                and other.f == self.f)

    def __hash__(self):
        return hash(("dual", self.owner, self.f))

    def __repr__(self):
        return f"DualMapAction({self.mapping()!r})"


class CallableAction(Action):
    """An action given by a Python callable on elements (infinite backends).

    The homomorphism laws are never trusted: see ``validate_action``.
    """

    def __init__(self, owner, fn, range_rule=None, description=""):
        self.owner = owner
        self.fn = fn
        self.range_rule = range_rule
        self.description = description or getattr(fn, "__name__", "callable")

    def __repr__(self):
        return f"CallableAction({self.description})"


def action_apply(theta, a):
    if a.owner != theta.owner:
        raise AlgebraMismatch("element is not in the action's algebra")
    if isinstance(theta, DualMapAction):
        return Element(theta.owner, theta.apply_mask(a.value))
    try:
        out = theta.fn(a)
    except Exception as exc:
        raise ActionEvaluationError(
            f"{theta!r} raised on {a!r}: {exc}") from exc
    if not isinstance(out, Element) or out.owner != theta.owner:
        raise ActionEvaluationError(f"{theta!r} returned a foreign value")
    return out


@dataclass
class ActionReport:
    ok: bool
    checked: int
    law: Optional[str] = None
    witness: Optional[tuple] = None

    def to_dict(self):
        d = {"ok": self.ok, "checked": self.checked}
        if not self.ok:
            d["law"] = self.law
            d["witness"] = [repr(x) for x in self.witness]
        return d


def validate_action(theta, samples=200, seed=0, bound=20):
    """Check the four homomorphism laws on ``samples`` random pairs."""
    rng = random.Random(seed)
    alg = theta.owner
    e = alg.empty
    if not action_apply(theta, e).is_empty():
        return ActionReport(False, 0, "theta(empty) = empty", (e,))
    for k in range(samples):
        a = alg.random_element(rng, bound)
        b = alg.random_element(rng, bound)
        ta, tb = action_apply(theta, a), action_apply(theta, b)
        laws = (("intersection", a & b, ta & tb),
                ("union", a | b, ta | tb),
                ("difference", a - b, ta - tb))
        for name, arg, expected in laws:
            if action_apply(theta, arg) != expected:
                return ActionReport(False, k + 1, name, (a, b))
    return ActionReport(True, samples)
