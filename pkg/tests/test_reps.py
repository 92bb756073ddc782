import random

import numpy as np
import pytest

from _corpus import isolated, loop, random_corpus, random_element, sys1
from gbds.constructions import remark_representation
from gbds.errors import ShapeError
from gbds.reps import (ConcreteRep, boundary_representation, check_giut,
                       evaluate, rep_from_json, rep_to_json,
                       validate_representation)
from gbds.words import EQUAL, calculus, eq_modulo_ck

E11 = [[1, 0], [0, 0]]
E22 = [[0, 0], [0, 1]]
E12 = [[0, 1], [0, 0]]
E21 = [[0, 0], [1, 0]]


def standard():
    return ConcreteRep(2, {"v": E11, "w": E22}, {("e", "w"): E12}, name="std")


def loop_rep(z=np.exp(0.7j)):
    return ConcreteRep(1, {"v": [[1]]}, {("e", "v"): [[z]]}, name="circle")


def test_standard_rep_passes():
    assert validate_representation(sys1(), standard()).ok


def test_wrong_isometry_fails_commutation():
    rep = ConcreteRep(2, {"v": E11, "w": E22}, {("e", "w"): E21})
    report = validate_representation(sys1(), rep)
    bad = [c for c in report.failures() if c["relation"] == "ii"]
    assert bad and bad[0]["residual"] > 0.5


def test_shape_errors():
    with pytest.raises(ShapeError):
        ConcreteRep(2, {"v": [[1]]}, {})
    with pytest.raises(ShapeError):
        validate_representation(sys1(), ConcreteRep(2, {"v": E11}, {}))
    with pytest.raises(ShapeError):
        rep_from_json({"dim": 2, "P": {"v": [[1, 0]]}, "S": {}})


def test_remark_truncated_rep():
    for ideal in ("range", "principal"):
        trunc, rep = remark_representation(8, ideal)
        assert rep.dim == 18
        report = validate_representation(trunc.system, rep)
        assert report.ok and report.max_residual() < 1e-9


def test_giut_examples():
    g = check_giut(sys1(), standard())
    assert g["condition1"]["ok"] and g["condition2"]["vacuous"]
    assert g["condition3"]["status"] == "not checked"
    g = check_giut(sys1([]), standard())
    assert not g["condition2"]["ok"] and g["condition2"]["witnesses"] == ["v"]
    zero_v = ConcreteRep(2, {"v": [[0, 0], [0, 0]], "w": E22},
                         {("e", "w"): [[0, 0], [0, 0]]})
    g = check_giut(sys1([]), zero_v)
    assert g["condition1"]["witnesses"] == ["v"]


def test_evaluate_examples():
    c = calculus(sys1())
    rep = standard()
    assert np.allclose(evaluate(rep, c.parse("p[v] - s[e;w]*s[e;w]^")), 0)
    assert np.allclose(evaluate(rep, c.p("w")), E22)
    assert np.allclose(evaluate(rep, c.parse("s[e;w]*p[w]*s[e;w]^")), E11)


def test_rep_json_round_trip():
    rep = loop_rep()
    back = rep_from_json(rep_to_json(rep))
    assert np.allclose(back.S[("e", "v")], rep.S[("e", "v")])
    assert validate_representation(loop(), back).ok


def _validated_reps():
    out = [(sys1(), standard()), (sys1([]), standard()), (loop(), loop_rep())]
    systems = ([isolated()] + random_corpus(10, seed=31)
               + random_corpus(30, seed=32, acyclic=True))
    for s in systems:
        b = boundary_representation(s)
        if b is not None:
            out.append((s, b))
    return out


def test_boundary_reps_are_valid():
    reps = _validated_reps()
    assert len(reps) > 10
    for s, rep in reps:
        assert validate_representation(s, rep).ok


def test_evaluate_is_a_homomorphism():
    rng = random.Random(3)
    for s, rep in _validated_reps():
        c = calculus(s)
        for _ in range(30):
            x, y = random_element(c, rng), random_element(c, rng)
            mx, my = evaluate(rep, x), evaluate(rep, y)
            assert np.linalg.norm(evaluate(rep, x * y) - mx @ my) < 1e-9
            assert np.linalg.norm(evaluate(rep, x.adjoint()) - mx.conj().T) < 1e-9


def test_normal_form_preserves_evaluation():
    rng = random.Random(4)
    for s, rep in _validated_reps():
        c = calculus(s)
        for _ in range(30):
            x = random_element(c, rng)
            for d in (1, 2, 3):
                assert np.linalg.norm(evaluate(rep, c.normal_form(x, d))
                                      - evaluate(rep, x)) < 1e-9


def test_equal_verdicts_agree_in_reps():
    rng = random.Random(6)
    for s, rep in _validated_reps():
        c = calculus(s)
        for _ in range(20):
            x = random_element(c, rng)
            y = c.normal_form(x, 2) if rng.random() < 0.5 else random_element(c, rng)
            verdict, _ = eq_modulo_ck(x, y, 0, [rep])
            if verdict == EQUAL:
                assert np.linalg.norm(evaluate(rep, x) - evaluate(rep, y)) < 1e-9
