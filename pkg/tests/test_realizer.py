import json

import pytest

from dagquot.dag import colored_dag
from dagquot.quotients import (
    CommutatorScheme,
    FreeOfRank,
    FreeProduct,
    IdentityImage,
    InfiniteCyclic,
    Lamplighter,
    LeafImage,
    RelatorSet,
    check_soundness,
)
from dagquot.realizer import (
    CepEmbedding,
    RealizerError,
    SchemePresentError,
    cep_transfer,
    embedding_from_json,
    embedding_to_json,
    finite_core,
    lattice_to_dot,
    presentations_to_json,
    realization_from_json,
    realization_to_json,
    realize,
    removal_order,
)
from dagquot.words import generator, parse_word


def w(text, rank):
    return parse_word(text, rank)


def single(color):
    return colored_dag(["v"], [], {"v": color})


def chain():
    return colored_dag(["u", "w"], [("u", "w")], {"u": 0, "w": 0})


def antichain():
    return colored_dag(["u", "w"], [], {"u": 0, "w": 0})


def diamond():
    return colored_dag(
        ["a", "b", "c", "d"],
        [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
        {v: 0 for v in "abcd"},
    )


class TestRemovalOrder:
    def test_chain_is_forced(self):
        assert removal_order(chain()) == ["w", "u"]

    def test_antichain_largest_first(self):
        assert removal_order(antichain()) == ["w", "u"]

    def test_diamond(self):
        assert removal_order(diamond()) == ["d", "c", "b", "a"]


class TestRealizeBaseCases:
    def test_single_vertex_color0(self):
        r = realize(single(0))
        assert r.ambient_rank == 2
        q = r.assignment["v"]
        assert q.relators.finite_part == (w("x1", 2),)
        assert q.relators.schemes == ()
        assert q.expr == InfiniteCyclic()
        assert q.marking == {1: IdentityImage(), 2: LeafImage(0, 1)}

    def test_single_vertex_color1(self):
        r = realize(single(1))
        q = r.assignment["v"]
        assert q.relators.finite_part == ()
        assert q.relators.schemes == (
            CommutatorScheme(generator(2, 1), generator(2, 2)),
        )
        assert q.expr == Lamplighter()
        assert q.marking == {1: LeafImage(0, "lamp"), 2: LeafImage(0, "shift")}

    def test_empty_dag(self):
        r = realize(colored_dag([], [], {}))
        assert r.ambient_rank == 0 and r.assignment == {}


class TestRealizeChain:
    def test_lower_vertex_keeps_relators(self):
        r = realize(chain())
        assert r.ambient_rank == 4
        qu = r.assignment["u"]
        assert qu.relators.finite_part == (w("x1", 4),)
        assert qu.expr == FreeProduct((InfiniteCyclic(), FreeOfRank(2)))
        assert qu.marking == {
            1: IdentityImage(),
            2: LeafImage(0, 1),
            3: LeafImage(1, 1),
            4: LeafImage(1, 2),
        }

    def test_upper_vertex_kills_old_generators(self):
        r = realize(chain())
        qw = r.assignment["w"]
        assert qw.relators.finite_part == (w("x1", 4), w("x2", 4), w("x3", 4))
        assert qw.expr == InfiniteCyclic()
        assert qw.marking[4] == LeafImage(0, 1)

    def test_step_indices(self):
        r = realize(chain())
        assert r.step_index == {"u": 1, "w": 2}


class TestRealizeAntichain:
    def test_relator_sets(self):
        r = realize(antichain())
        assert r.assignment["u"].relators.finite_part == (
            w("x1", 4), w("x3", 4), w("x4", 4),
        )
        assert r.assignment["w"].relators.finite_part == (
            w("x1", 4), w("x2", 4), w("x3", 4),
        )

    def test_both_quotients_are_z(self):
        r = realize(antichain())
        assert r.assignment["u"].expr == InfiniteCyclic()
        assert r.assignment["w"].expr == InfiniteCyclic()
        assert r.assignment["u"].marking[2] == LeafImage(0, 1)
        assert r.assignment["w"].marking[4] == LeafImage(0, 1)


class TestRealizeDiamond:
    def test_relator_counts(self):
        r = realize(diamond())
        assert r.ambient_rank == 8
        finite = {v: r.assignment[v].relators.finite_part for v in "abcd"}
        assert finite["a"] == (w("x1", 8),)
        assert finite["b"] == tuple(w(f"x{i}", 8) for i in (1, 2, 3, 5, 6))
        assert finite["c"] == tuple(w(f"x{i}", 8) for i in (1, 2, 3, 4, 5))
        assert finite["d"] == tuple(w(f"x{i}", 8) for i in range(1, 8))

    def test_exprs(self):
        r = realize(diamond())
        assert r.assignment["a"].expr == FreeProduct(
            (InfiniteCyclic(),) + (FreeOfRank(2),) * 3
        )
        assert r.assignment["b"].expr == FreeProduct((InfiniteCyclic(), FreeOfRank(2)))
        assert r.assignment["d"].expr == InfiniteCyclic()


class TestStructuralInvariants:
    def test_color_scheme_correspondence(self):
        d = colored_dag(
            ["p", "q", "r"], [("p", "q")], {"p": 1, "q": 0, "r": 1}
        )
        real = realize(d)
        for v in d.vertices:
            q = real.assignment[v]
            if d.color[v] == 0:
                assert q.relators.schemes == ()
            else:
                assert len(q.relators.schemes) == 1

    def test_recontexting_is_verbatim(self):
        r = realize(chain())
        # the lower vertex's relator letters survive unchanged in rank 4
        assert r.assignment["u"].relators.finite_part[0].letters == ((1, 1),)

    def test_deterministic_bytes(self):
        d = colored_dag(
            ["a", "b", "c"], [("a", "c"), ("b", "c")], {"a": 1, "b": 0, "c": 1}
        )
        blob1 = json.dumps(realization_to_json(realize(d)), sort_keys=True)
        blob2 = json.dumps(realization_to_json(realize(d)), sort_keys=True)
        assert blob1 == blob2

    def test_all_quotients_sound(self):
        d = colored_dag(
            ["a", "b", "c"], [("a", "b")], {"a": 1, "b": 1, "c": 0}
        )
        for q in realize(d).assignment.values():
            check_soundness(q, probe_bound=5)


class TestFiniteCore:
    def test_finite_relators_pass_through(self):
        r = RelatorSet(4, (w("x1", 4), w("x2 x3", 4)))
        assert finite_core(r) == [w("x1", 4), w("x2 x3", 4)]

    def test_scheme_raises(self):
        s = CommutatorScheme(generator(2, 1), generator(2, 2))
        with pytest.raises(SchemePresentError):
            finite_core(RelatorSet(2, (), (s,)))

    def test_empty(self):
        assert finite_core(RelatorSet(3, ())) == []


class TestCepTransfer:
    def test_identity_embedding(self):
        r = realize(chain())
        e = CepEmbedding(
            alphabet_rank=4,
            ambient_relators=(),
            basis_words=tuple(generator(4, i) for i in range(1, 5)),
        )
        pres = cep_transfer(r, e)
        for v in ("u", "w"):
            assert pres[v].relators == r.assignment[v].relators.finite_part
            assert pres[v].schemes == r.assignment[v].relators.schemes
            assert pres[v].finitely_presented_claim

    def test_free_factor_of_free_product(self):
        r = realize(single(0))
        e = CepEmbedding(
            alphabet_rank=3,
            ambient_relators=(w("x3 x3", 3),),
            basis_words=(w("x1", 3), w("x2", 3)),
            note="free factor of a free product",
        )
        pres = cep_transfer(r, e)["v"]
        assert pres.relators == (w("x3 x3", 3), w("x1", 3))
        assert pres.schemes == ()
        assert "x3 x3" in str(pres) and str(pres).startswith("⟨")

    def test_scheme_transfer_under_identity(self):
        r = realize(single(1))
        e = CepEmbedding(2, (), (generator(2, 1), generator(2, 2)))
        pres = cep_transfer(r, e)["v"]
        assert pres.schemes == (CommutatorScheme(generator(2, 1), generator(2, 2)),)
        assert not pres.finitely_presented_claim
        assert "scheme(x1, x2)" in str(pres)

    def test_not_enough_basis_words(self):
        r = realize(chain())
        e = CepEmbedding(2, (), (generator(2, 1), generator(2, 2)))
        with pytest.raises(RealizerError):
            cep_transfer(r, e)

    def test_presentations_json(self):
        r = realize(single(0))
        e = CepEmbedding(2, (), (generator(2, 1), generator(2, 2)))
        data = presentations_to_json(cep_transfer(r, e))
        assert data["conditional_on_cep"] is True
        assert data["vertices"]["v"]["relators"] == ["x1"]


class TestSerialization:
    def test_realization_round_trip(self):
        d = colored_dag(
            ["a", "b", "c"], [("a", "b"), ("b", "c")], {"a": 1, "b": 0, "c": 1}
        )
        r = realize(d)
        r2 = realization_from_json(json.loads(json.dumps(realization_to_json(r))))
        assert r2.ambient_rank == r.ambient_rank
        assert r2.assignment == r.assignment
        assert r2.step_index == r.step_index
        assert r2.dag == r.dag

    def test_embedding_round_trip(self):
        e = CepEmbedding(3, (w("x3 x3", 3),), (w("x1", 3), w("x2", 3)), note="demo")
        assert embedding_from_json(embedding_to_json(e)) == e

    def test_lattice_dot_smoke(self):
        dot = lattice_to_dot(realize(chain()))
        assert dot.startswith("digraph") and '"u" -> "w"' in dot
