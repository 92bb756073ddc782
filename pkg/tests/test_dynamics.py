import random

import pytest

from _corpus import isolated, random_corpus, sys1
from gbds.boolean import Principal
from gbds.dynamics import (apply_word, delta, finite_system, lam,
                           range_ideal, regular_ideal, validate_system,
                           word_ideal)
from gbds.errors import InvalidSystem, UnknownLabel, UnsupportedBackend


def el(sys, *atoms):
    return sys.algebra.element(list(atoms))


def test_apply_word():
    s = sys1()
    assert apply_word(s, "ee", el(s, "v")).is_empty()
    assert apply_word(s, "", el(s, "v")).labels() == ["v"]
    assert apply_word(s, "e", el(s, "v", "w")).labels() == ["w"]
    with pytest.raises(UnknownLabel):
        apply_word(s, "f", el(s, "v"))


def test_delta():
    s = sys1()
    assert delta(s, el(s, "v")) == ("e",)
    assert delta(s, el(s, "w")) == ()
    assert delta(s, el(s)) == ()
    assert lam(s, el(s, "v", "w")) == 1


def test_regular_and_range():
    s = sys1()
    assert regular_ideal(s).generator.labels() == ["v"]
    assert regular_ideal(isolated()).generator.is_empty()
    assert range_ideal(s, "e").generator.labels() == ["w"]
    assert range_ideal(isolated(), "a").generator.is_empty()


def test_word_ideals():
    s = sys1()
    assert word_ideal(s, "e").generator.labels() == ["w"]
    assert word_ideal(s, "ee").generator.is_empty()
    assert word_ideal(s, "").generator.labels() == ["v", "w"]


def test_validate_system_examples():
    ok = finite_system(["v", "w"], {"e": {"w": "v"}}, {"e": ["w"]}, ["v"])
    assert validate_system(ok).valid
    with pytest.raises(InvalidSystem) as exc:
        finite_system(["v", "w"], {"e": {"w": "v"}}, relative=["w"])
    (v,) = exc.value.report.violations
    assert v.kind == "relative-not-regular" and v.witness.labels() == ["w"]
    bad = finite_system(["v", "w"], {"e": {"w": "v"}}, {"e": []}, check=False)
    cert = validate_system(bad)
    assert not cert.valid
    assert cert.violations[0].witness.labels() == ["w"]


def test_remark_needs_closed_form():
    from gbds.boolean import (CallableAction, FinCofin, FinSubsets,
                              ProductAlgebra)
    from gbds.dynamics import BooleanDynamicalSystem
    prod = ProductAlgebra(FinSubsets(), FinCofin())
    act = CallableAction(prod, lambda x: x)
    bds = BooleanDynamicalSystem(prod, ("a",), {"a": act})
    with pytest.raises(UnsupportedBackend):
        regular_ideal(bds)
    with pytest.raises(UnsupportedBackend):
        range_ideal(bds, "a")


def test_delta_additive_and_monotone():
    for s in random_corpus(30, seed=5):
        top = s.algebra.top_mask
        for a in range(top + 1):
            da = set(s.bds.delta_mask(a))
            for b in range(top + 1):
                db = set(s.bds.delta_mask(b))
                assert set(s.bds.delta_mask(a | b)) == da | db
                if a & ~b == 0:
                    assert da <= db


def test_word_composition():
    rng = random.Random(9)
    for s in random_corpus(30, seed=6):
        for _ in range(20):
            w1 = [rng.choice(s.labels) for _ in range(rng.randint(0, 3))]
            w2 = [rng.choice(s.labels) for _ in range(rng.randint(0, 3))]
            a = s.algebra.from_mask(rng.getrandbits(s.n))
            assert apply_word(s, w1 + w2, a).equals(
                apply_word(s, w2, apply_word(s, w1, a)))


def test_regular_is_largest_oracle():
    """Brute force: B_reg = union of all A whose nonzero subsets B have
    lambda_B > 0."""
    for s in random_corpus(40, seed=8):
        top = s.algebra.top_mask
        good = 0
        for a in range(top + 1):
            subs = [b for b in range(1, top + 1) if b & ~a == 0]
            if all(s.bds.delta_mask(b) for b in subs):
                good |= a
        assert good == s.regular_mask


def test_range_below_word_ideal():
    for s in random_corpus(30, seed=10):
        for g in s.labels:
            r = range_ideal(s, g).generator
            assert r <= word_ideal(s, g).generator
            for h in s.labels:
                longer = word_ideal(s, [g, h]).generator
                assert longer.equals(apply_word(s, [h], word_ideal(s, g).generator))
