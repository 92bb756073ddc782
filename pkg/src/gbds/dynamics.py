"""Boolean dynamical systems and their first-order invariants.

Conventions
-----------
``theta_w`` for a word ``w = w1 w2 ... wn`` applies ``theta_{w1}`` first
and ``theta_{wn}`` last; the empty word acts as the identity.

On the finite backend every action is a dual partial map ``f`` on atoms and
``theta(A) = f^{-1}(A)``.  Two reductions used throughout:

* ``Delta`` is union-additive, ``Delta(A u B) = Delta(A) u Delta(B)``, because
  each ``theta_a`` is.  Hence ``A`` is regular (every nonzero ``B <= A`` has
  ``0 < lambda_B``) iff every atom below ``A`` has nonempty ``Delta``; with a
  finite alphabet ``lambda`` is always finite.  So ``B_reg`` is principal,
  generated by the atoms hit by some dual map.
* ``theta_a`` is monotone, so the range ideal ``R_a`` is generated by
  ``theta_a(top)``, and the word ideal ``I_{a1...an}`` is generated by
  ``theta_{a2...an}(gen I_{a1})``: any ``B`` in ``I_{a1}`` sits below the
  generator, hence so does each of its images.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .boolean import (DualMapAction, Element, FiniteAlgebra, Ideal,
                      PredicateIdeal, Principal, RangeIdeal, action_apply,
                      generator_mask, iter_bits, normalize_ideal,
                      whole_algebra)
from .errors import InvalidSystem, UnknownLabel, UnsupportedBackend


def parse_word(word, labels):
    """Turn ``word`` into a tuple of labels.

    Accepts a sequence of labels, a ``.``-separated string, or a plain string
    whose characters are all labels.
    """
    if isinstance(word, str):
        if word == "":
            return ()
        if "." in word:
            parts = tuple(word.split("."))
        elif word in labels:
            parts = (word,)
        else:
            parts = tuple(word)
    else:
        parts = tuple(word)
    for p in parts:
        if p not in labels:
            raise UnknownLabel(f"unknown label {p!r} in word {word!r}")
    return parts


def format_word(word):
    if all(len(x) == 1 for x in word):
        return "".join(word)
    return ".".join(word)


@dataclass(frozen=True, eq=False)
class BooleanDynamicalSystem:
    algebra: object
    labels: tuple
    actions: dict
    # closed-form invariants for infinite backends, e.g. {"regular": Ideal}
    closed_forms: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise InvalidSystem("labels must be pairwise distinct")
        if set(self.actions) != set(labels):
            raise InvalidSystem("every label needs exactly one action")
        for lab in labels:
            if self.actions[lab].owner != self.algebra:
                raise InvalidSystem(f"action {lab!r} lives on another algebra")

    @property
    def is_finite(self):
        return isinstance(self.algebra, FiniteAlgebra)

    def require_finite(self):
        if not self.is_finite:
            raise UnsupportedBackend(
                "this operation needs the finite backend")

    def action(self, label):
        try:
            return self.actions[label]
        except KeyError:
            raise UnknownLabel(f"unknown label {label!r}") from None

    def theta(self, label, mask):
        return self.action(label).apply_mask(mask)

    def theta_word(self, word, mask):
        for lab in word:
            if not mask:
                return 0
            mask = self.action(lab).apply_mask(mask)
        return mask

    @cached_property
    def dual(self):
        self.require_finite()
        return {lab: self.actions[lab].f for lab in self.labels}

    @cached_property
    def regular_mask(self):
        self.require_finite()
        mask = 0
        for lab in self.labels:
            for y in self.actions[lab].f:
                if y is not None:
                    mask |= 1 << y
        return mask

    def delta_mask(self, mask):
        return tuple(lab for lab in self.labels if self.theta(lab, mask))


@dataclass(frozen=True, eq=False)
class GeneralizedBDS:
    base: BooleanDynamicalSystem
    range_ideals: dict

    def __post_init__(self):
        if set(self.range_ideals) != set(self.base.labels):
            raise InvalidSystem("every label needs an ideal I_a")
        if self.base.is_finite:
            object.__setattr__(self, "range_ideals", {
                k: normalize_ideal(v) for k, v in self.range_ideals.items()})

    @property
    def algebra(self):
        return self.base.algebra

    @property
    def labels(self):
        return self.base.labels

    @cached_property
    def gen_I(self):
        return {lab: generator_mask(self.range_ideals[lab])
                for lab in self.labels}

    def word_gen(self, word):
        """Generator mask of the word ideal ``I_word`` (finite backend)."""
        if not word:
            return self.algebra.top_mask
        return self.base.theta_word(word[1:], self.gen_I[word[0]])


@dataclass(frozen=True, eq=False)
class RelativeGBDS:
    base: GeneralizedBDS
    relative_ideal: Ideal

    def __post_init__(self):
        if self.base.base.is_finite:
            object.__setattr__(self, "relative_ideal",
                               normalize_ideal(self.relative_ideal))

    @property
    def bds(self):
        return self.base.base

    @property
    def algebra(self):
        return self.base.base.algebra

    @property
    def labels(self):
        return self.base.base.labels

    @property
    def actions(self):
        return self.base.base.actions

    @property
    def range_ideals(self):
        return self.base.range_ideals

    @property
    def is_finite(self):
        return self.bds.is_finite

    @property
    def n(self):
        return self.algebra.n

    @cached_property
    def gen_J(self):
        return generator_mask(self.relative_ideal)

    @property
    def gen_I(self):
        return self.base.gen_I

    @property
    def regular_mask(self):
        return self.bds.regular_mask

    def theta(self, label, mask):
        return self.bds.theta(label, mask)

    def theta_word(self, word, mask):
        return self.bds.theta_word(word, mask)

    def word_gen(self, word):
        return self.base.word_gen(word)

    def with_relative(self, ideal):
        return RelativeGBDS(self.base, ideal)

    def atom_label(self, i):
        return self.algebra.labels[i]


# -------------------------------------------------------------- operations


def apply_word(sys, word, a):
    sys = _bds(sys)
    word = parse_word(word, sys.labels)
    for lab in word:
        a = action_apply(sys.action(lab), a)
    return a


def _bds(sys):
    if isinstance(sys, RelativeGBDS):
        return sys.bds
    if isinstance(sys, GeneralizedBDS):
        return sys.base
    return sys


def delta(sys, a):
    sys = _bds(sys)
    return tuple(lab for lab in sys.labels
                 if not action_apply(sys.actions[lab], a).is_empty())


def lam(sys, a):
    return len(delta(sys, a))


def regular_ideal(sys):
    sys = _bds(sys)
    if sys.is_finite:
        return Principal(sys.algebra.from_mask(sys.regular_mask))
    if "regular" in sys.closed_forms:
        return sys.closed_forms["regular"]
    raise UnsupportedBackend("B_reg needs the finite backend or a closed form")


def range_ideal(sys, label):
    sys = _bds(sys)
    act = sys.action(label)
    if sys.is_finite:
        return Principal(sys.algebra.from_mask(
            act.apply_mask(sys.algebra.top_mask)))
    if act.range_rule is None:
        raise UnsupportedBackend(
            f"action {label!r} has no range-membership rule")
    return RangeIdeal(act, f"R_{label}")


def word_ideal(gsys, word):
    if isinstance(gsys, RelativeGBDS):
        gsys = gsys.base
    word = parse_word(word, gsys.labels)
    if not word:
        return whole_algebra(gsys.algebra)
    if not gsys.base.is_finite:
        if len(word) == 1:
            return gsys.range_ideals[word[0]]
        raise UnsupportedBackend("word ideals need the finite backend")
    return Principal(gsys.algebra.from_mask(gsys.word_gen(word)))


# ------------------------------------------------------------- validation


@dataclass
class Violation:
    kind: str
    label: Optional[str]
    witness: object

    def to_dict(self):
        return {"kind": self.kind, "label": self.label,
                "witness": repr(self.witness)}


@dataclass
class Certificate:
    valid: bool
    violations: list

    def __bool__(self):
        return self.valid

    def to_dict(self):
        return {"valid": self.valid,
                "violations": [v.to_dict() for v in self.violations]}


def validate_system(rsys, samples=200, seed=0):
    """Check R_a <= I_a for every label and J <= B_reg.

    Exact on the finite backend; on other backends the inclusions are
    sampled (images of random elements, random members of J).
    """
    violations = []
    bds = rsys.bds
    alg = rsys.algebra
    if bds.is_finite:
        for lab in rsys.labels:
            r = bds.theta(lab, alg.top_mask)
            bad = r & ~rsys.gen_I[lab]
            if bad:
                violations.append(Violation("range-not-in-ideal", lab,
                                            alg.from_mask(bad)))
        bad = rsys.gen_J & ~bds.regular_mask
        if bad:
            violations.append(Violation("relative-not-regular", None,
                                        alg.from_mask(bad)))
        return Certificate(not violations, violations)

    rng = random.Random(seed)
    for lab in rsys.labels:
        act = bds.actions[lab]
        ideal = rsys.range_ideals[lab]
        for _ in range(samples):
            img = action_apply(act, alg.random_element(rng))
            if not ideal.contains(img):
                violations.append(Violation("range-not-in-ideal", lab, img))
                break
    reg = regular_ideal(bds)
    for _ in range(samples):
        b = alg.random_element(rng)
        if rsys.relative_ideal.contains(b) and not reg.contains(b):
            violations.append(Violation("relative-not-regular", None, b))
            break
    return Certificate(not violations, violations)


# ------------------------------------------------------------ construction


def make_system(algebra, actions, ideals=None, relative=None, check=True,
                closed_forms=None):
    """Assemble a relative generalized system.

    ``actions`` maps label -> Action (or, on the finite backend, a dict
    atom -> atom describing the dual map).  Missing ``ideals`` default to the
    range ideals, a missing ``relative`` ideal to ``B_reg``.  With ``check``
    an invalid system raises ``InvalidSystem`` carrying the report.
    """
    acts = {}
    for lab, act in actions.items():
        if isinstance(act, dict):
            act = DualMapAction.from_mapping(algebra, act)
        acts[str(lab)] = act
    bds = BooleanDynamicalSystem(algebra, tuple(acts), acts,
                                 dict(closed_forms or {}))
    ideals = dict(ideals or {})
    for lab in bds.labels:
        if lab not in ideals:
            ideals[lab] = range_ideal(bds, lab)
        elif isinstance(ideals[lab], Element):
            ideals[lab] = Principal(ideals[lab])
    gsys = GeneralizedBDS(bds, ideals)
    if relative is None:
        relative = regular_ideal(bds)
    elif isinstance(relative, Element):
        relative = Principal(relative)
    rsys = RelativeGBDS(gsys, relative)
    if check:
        cert = validate_system(rsys)
        if not cert.valid:
            raise InvalidSystem("system violates its defining inclusions",
                                cert)
    return rsys


def finite_system(atoms, dual, ideals=None, relative=None, check=True):
    """Shorthand for finite systems given by labels.

    ``dual``: label -> {atom: atom}; ``ideals``: label -> atom list;
    ``relative``: atom list.
    """
    alg = FiniteAlgebra(atoms)
    ideals = None if ideals is None else {
        lab: Principal(alg.element(v)) for lab, v in ideals.items()}
    if relative is not None:
        relative = Principal(alg.element(relative))
    return make_system(alg, dual, ideals, relative, check)


def atoms_of(mask):
    return list(iter_bits(mask))


def predicate_ideal(algebra, rule, description):
    return PredicateIdeal(algebra, rule, description)
