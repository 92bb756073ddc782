import random

import pytest

from _corpus import random_corpus, sys1
from gbds.boolean import popcount
from gbds.constructions import (LabelledGraph, graph_system,
                                import_labelled_graph, remark_example,
                                remark_truncation, tilde,
                                tilde_iso_generators)
from gbds.dynamics import delta, validate_system
from gbds.errors import NotWeaklyLeftResolving
from gbds.lattice import admissible_pairs
from gbds.words import EQUAL, calculus, eq_modulo_ck


def test_tilde_sys1_toeplitz():
    t = tilde(sys1([]))
    new = t.system
    assert new.algebra.labels == ("v", "w", "v'")
    assert new.bds.dual["e"] == (None, 0, None)
    assert new.algebra.labels_of(new.regular_mask) == ["v"]
    assert new.regular_mask == t.encode(0b01, 0)
    assert new.algebra.labels_of(new.gen_I["e"]) == ["w"]


def test_tilde_trivial_block():
    s = sys1()
    t = tilde(s)
    assert t.system.algebra.labels == s.algebra.labels
    assert t.system.bds.dual == s.bds.dual
    assert t.system.gen_J == s.gen_J


def test_tilde_iso_examples():
    s = sys1([])
    iso = tilde_iso_generators(s)
    src, tgt = calculus(s), calculus(iso.tilde.system)
    assert iso.rho(iso.phi(src.p("v"))) == src.p("v")
    vp = tgt.p(["v'"])
    assert eq_modulo_ck(iso.phi(iso.rho(vp)), vp, 1)[0] == EQUAL
    sw = src.s("e", "w")
    assert iso.rho(iso.phi(sw)) == sw
    assert iso.verify(2)


def test_tilde_random():
    rng = random.Random(5)
    for s in random_corpus(40, seed=21):
        # also try a random smaller J
        variants = [s, s.with_relative(_principal(s, s.gen_J & rng.getrandbits(s.n)))]
        for v in variants:
            t = tilde(v)
            block = v.regular_mask & ~v.gen_J
            assert t.system.n == v.n + popcount(block)
            assert t.system.regular_mask == t.encode(v.regular_mask, 0)
            assert validate_system(t.system).valid
            for g in v.labels:
                rng_mask = t.system.theta(g, t.system.algebra.top_mask)
                assert rng_mask & ~t.system.gen_I[g] == 0


def _principal(s, mask):
    from gbds.boolean import Principal
    return Principal(s.algebra.from_mask(mask))


def test_tilde_ideal_is_generated():
    """Open question: the literal set need not be downward closed; the
    generated ideal contains (0, [B]) below (A, [A])."""
    s = sys1([])
    s2 = s.with_relative(_principal(s, 0))
    t = tilde(s2)
    gen = t.system.gen_I["e"]
    assert gen == t.encode(s2.gen_I["e"])


def test_remark_graph_truncation():
    k = 3
    verts = [f"({i},{j})" for i in range(1, k + 1) for j in (1, 2)]
    edges = [(f"({i},1)", f"({i},2)", "a") for i in range(1, k + 1)]
    s = import_labelled_graph(LabelledGraph(verts, edges))
    assert s.n == 6
    assert s.actions["a"].mapping() == {f"({i},2)": f"({i},1)"
                                        for i in range(1, k + 1)}
    assert s.algebra.labels_of(s.gen_I["a"]) == [f"({i},2)"
                                                  for i in range(1, k + 1)]


def test_not_weakly_left_resolving():
    g = LabelledGraph(["u", "u2", "w"], [("u", "w", "a"), ("u2", "w", "a")])
    with pytest.raises(NotWeaklyLeftResolving) as exc:
        import_labelled_graph(g)
    assert exc.value.witness == ("a", "u", "u2", "w")


def test_one_edge_graph_is_sys1():
    s = graph_system(["v", "w"], [("e", "v", "w")])
    ref = sys1()
    assert s.bds.dual == ref.bds.dual and s.gen_I == ref.gen_I
    assert len(admissible_pairs(s)) == 2


def test_imported_actions_preserve_intersections():
    rng = random.Random(4)
    for _ in range(20):
        n = rng.randint(1, 5)
        verts = [f"v{i}" for i in range(n)]
        edges = set()
        for lab in "ab":
            targets = list(range(n))
            rng.shuffle(targets)
            for d in targets[:rng.randint(0, n)]:
                edges.add((f"v{rng.randrange(n)}", f"v{d}", lab))
        s = import_labelled_graph(LabelledGraph(verts, sorted(edges)))
        assert validate_system(s).valid
        for g in s.labels:
            for a in range(1 << n):
                for b in range(1 << n):
                    assert s.theta(g, a & b) == s.theta(g, a) & s.theta(g, b)


def test_remark_example():
    ex = remark_example()
    prod = ex.algebra
    m = ex.witness_membership()
    assert m["in_I"] and not m["in_R"]
    assert ex.witness.equals(prod.element((frozenset(),
                                           ("cofinite", frozenset()))))
    x = prod.element((frozenset([1, 2]), ("cofinite", frozenset([3]))))
    img = ex.range_system.actions["a"](x)
    assert img.equals(prod.element((frozenset(), ("finite", frozenset([1, 2])))))
    reg = ex.range_system.relative_ideal
    assert reg.contains(prod.element((frozenset([4]), ("finite", frozenset()))))
    assert not reg.contains(prod.element((frozenset(), ("finite", frozenset([1])))))
    for sysm in (ex.range_system, ex.principal_system):
        assert validate_system(sysm).valid


def test_remark_regular_closed_form_by_truncation():
    """Oracle: regular atoms of the finite truncation are exactly the L_i,
    which embed as (A, 0)."""
    tr = remark_truncation(5)
    s = tr.system
    reg = s.algebra.labels_of(s.regular_mask)
    assert reg == [f"L{i}" for i in range(1, 6)]
    ex = remark_example()
    closed = ex.range_system.relative_ideal
    for a in range(1 << s.n):
        e = tr.embed(a)
        is_reg = a & ~s.regular_mask == 0
        assert closed.contains(e) == is_reg


def test_truncation_embedding_commutes_with_theta():
    tr = remark_truncation(4, "principal")
    act = remark_example().range_system.actions["a"]
    for a in range(1 << tr.system.n):
        assert act(tr.embed(a)).equals(tr.embed(tr.system.theta("a", a)))
    ex = remark_example()
    top_right = tr.embed(tr.system.algebra.mask_of(
        [f"R{i}" for i in range(1, 5)] + ["Rinf"]))
    assert top_right.equals(ex.witness)
    assert delta(ex.range_system, ex.witness) == ()
