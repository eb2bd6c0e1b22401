import itertools
import random

import pytest

from conftest import random_word
from dagquot.stallings import (
    StallingsError,
    SubgroupGraph,
    basis,
    build_subgroup_graph,
    contains,
    express,
    from_json,
    index_in_ambient,
    substitute_basis,
    to_dot,
    to_json,
)
from dagquot.words import (
    RankMismatchError,
    identity,
    invert,
    multiply,
    parse_word,
)


def w(text, rank=2):
    return parse_word(text, rank)


def naive_members(generators, rank, max_gen_letters):
    """Oracle: all reduced words writable as products of at most
    max_gen_letters generators and inverse generators."""
    alphabet = [g for g in generators] + [invert(g) for g in generators]
    members = {identity(rank)}
    frontier = {identity(rank)}
    for _ in range(max_gen_letters):
        nxt = set()
        for word in frontier:
            for g in alphabet:
                prod = multiply(word, g)
                if prod not in members:
                    members.add(prod)
                    nxt.add(prod)
        frontier = nxt
    return members


class TestBuild:
    def test_conjugate_generator_pair(self):
        # the rank-2 subgroup generated by x1 and its conjugate by x2:
        # folded core has a base with an x1-loop and one more vertex
        # (reached by the x2-edge) carrying its own x1-loop
        g = build_subgroup_graph([w("x1"), w("x2^-1 x1 x2")])
        assert g.num_vertices == 2
        assert g.edges == frozenset({(0, 1, 0), (1, 1, 1), (1, 2, 0)})

    def test_empty_generators(self):
        g = build_subgroup_graph([], rank=2)
        assert g.num_vertices == 1 and not g.edges

    def test_full_rank_generators(self):
        g = build_subgroup_graph([w("x1"), w("x2")])
        assert g.num_vertices == 1
        assert g.edges == frozenset({(0, 1, 0), (0, 2, 0)})

    def test_generator_order_irrelevant(self, rng):
        for _ in range(20):
            gens = [random_word(rng, 2, 6) for _ in range(3)]
            gens = [g for g in gens if g]
            g1 = build_subgroup_graph(gens, rank=2)
            shuffled = gens[:]
            rng.shuffle(shuffled)
            g2 = build_subgroup_graph(shuffled, rank=2)
            assert g1 == g2

    def test_fold_confluence_ten_orders(self, rng):
        for _ in range(10):
            gens = [random_word(rng, 3, 6) for _ in range(3)]
            gens = [g for g in gens if g]
            reference = build_subgroup_graph(gens, rank=3)
            probes = [random_word(rng, 3, 8) for _ in range(100)]
            for k in range(10):
                shuffled = build_subgroup_graph(gens, rank=3, rng=random.Random(k))
                assert shuffled == reference
                assert [contains(shuffled, p) for p in probes] == [
                    contains(reference, p) for p in probes
                ]


class TestMembership:
    def test_generator_membership(self):
        g = build_subgroup_graph([w("x1"), w("x2^-1 x1 x2")])
        assert contains(g, w("x2^-1 x1 x2"))
        assert contains(g, w("x1"))

    def test_nonmember(self):
        # oracle: x2 is not among products of <= 4 generator letters, and the
        # graph proves it is not a member at all
        g = build_subgroup_graph([w("x1"), w("x2^-1 x1 x2")])
        members = naive_members([w("x1"), w("x2^-1 x1 x2")], 2, 4)
        assert w("x2") not in members
        assert not contains(g, w("x2"))

    def test_empty_word(self, rng):
        for _ in range(5):
            gens = [random_word(rng, 2, 5) for _ in range(2)]
            g = build_subgroup_graph([x for x in gens if x], rank=2)
            assert contains(g, identity(2))

    def test_all_generators_contained(self, rng):
        for _ in range(20):
            gens = [random_word(rng, 3, 6) for _ in range(3)]
            gens = [g for g in gens if g]
            graph = build_subgroup_graph(gens, rank=3)
            for gen in gens:
                assert contains(graph, gen)

    def test_closed_under_products(self, rng):
        gens = [w("x1 x2"), w("x2 x2")]
        g = build_subgroup_graph(gens)
        for word in naive_members(gens, 2, 4):
            assert contains(g, word)

    def test_rank_mismatch(self):
        g = build_subgroup_graph([w("x1")])
        with pytest.raises(RankMismatchError):
            contains(g, w("x1", 3))


class TestExpress:
    def test_round_trip_substitution(self, rng):
        for _ in range(30):
            gens = [random_word(rng, 2, 6) for _ in range(2)]
            gens = [g for g in gens if g]
            if not gens:
                continue
            graph = build_subgroup_graph(gens, rank=2)
            for member in itertools.islice(naive_members(gens, 2, 3), 40):
                expr = express(graph, member)
                assert expr is not None
                assert substitute_basis(graph, expr) == member

    def test_nonmember_returns_none(self):
        g = build_subgroup_graph([w("x1"), w("x2^-1 x1 x2")])
        assert express(g, w("x2")) is None
        assert express(g, w("x2 x1")) is None


class TestBasis:
    def test_conjugate_pair_basis(self):
        g = build_subgroup_graph([w("x1"), w("x2^-1 x1 x2")])
        b = basis(g)
        assert b == [w("x1"), w("x2^-1 x1 x2")]

    def test_trivial_graph(self):
        assert basis(build_subgroup_graph([], rank=2)) == []

    def test_full_group(self):
        assert len(basis(build_subgroup_graph([w("x1"), w("x2")]))) == 2

    def test_rank_formula_and_regeneration(self, rng):
        for _ in range(20):
            gens = [random_word(rng, 3, 6) for _ in range(3)]
            gens = [g for g in gens if g]
            graph = build_subgroup_graph(gens, rank=3)
            b = basis(graph)
            assert len(b) == len(graph.edges) - graph.num_vertices + 1
            for word in b:
                assert contains(graph, word)
            regenerated = build_subgroup_graph(b, rank=3) if b else build_subgroup_graph([], rank=3)
            assert regenerated == graph


class TestIndex:
    def test_index_two(self):
        # oracle: coset enumeration by hand gives two cosets, H and H x1
        g = build_subgroup_graph([w("x1 x1"), w("x2"), w("x1 x2 x1^-1")])
        assert index_in_ambient(g) == 2

    def test_whole_group(self):
        assert index_in_ambient(build_subgroup_graph([w("x1"), w("x2")])) == 1

    def test_infinite(self):
        assert index_in_ambient(build_subgroup_graph([w("x1")])) is None


class TestSerialization:
    def test_json_round_trip(self, rng):
        for _ in range(10):
            gens = [random_word(rng, 2, 5) for _ in range(2)]
            g = build_subgroup_graph([x for x in gens if x], rank=2)
            assert from_json(to_json(g)) == g

    def test_unfolded_rejected(self):
        with pytest.raises(StallingsError):
            SubgroupGraph(2, 3, frozenset({(0, 1, 1), (0, 1, 2)}))

    def test_dot_smoke(self):
        dot = to_dot(build_subgroup_graph([w("x1")]))
        assert dot.startswith("digraph") and "x1" in dot
