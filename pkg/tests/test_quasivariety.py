from itertools import combinations, product as iproduct

import pytest

from qvbench import fixtures as fx
from qvbench.core import (
    Congruence,
    Homomorphism,
    are_isomorphic,
    build_algebra,
    congruence_closure,
    enumerate_homomorphisms,
    is_congruence,
    is_embedding,
    is_homomorphism,
    permuted,
    quotient,
    trivial_algebra,
)
from qvbench.quasivariety import (
    Amalgam,
    CapExceeded,
    NotFoundWithinBound,
    Quasivariety,
    bounded_amalgamation,
    enumerate_members,
    free_algebra,
    members_up_to,
    membership,
    relative_congruence,
)


def intersect_k_congruences(A, pairs, K):
    """Oracle: intersect all compatible partitions that contain the pairs and
    whose quotient passes membership."""
    from tests.test_core import all_partitions

    relations = []
    for labels in all_partitions(A.size):
        if not all(labels[a] == labels[b] for a, b in pairs):
            continue
        if not is_congruence(A, labels):
            continue
        Q, _ = quotient(A, Congruence.from_labels(A, labels))
        if membership(Q, K).holds:
            relations.append(labels)
    assert relations, "total congruence should always qualify"
    meet = [
        tuple(lab[i] for lab in relations) for i in range(A.size)
    ]
    return Congruence.from_labels(A, meet)


WRONG_DIAMOND = build_algebra(
    "WrongDiamond",
    fx.BDL,
    4,
    {
        "meet": lambda a, b: a & b,
        # join broken at the atom pair: 1 v 2 = 1 instead of 3
        "join": lambda a, b: 1 if {a, b} == {1, 2} else a | b,
        "bot": 0,
        "top": 3,
    },
)


class TestMembership:
    def test_chain3_in_dl(self):
        result = membership(fx.CHAIN3, fx.DL)
        assert result.holds
        assert len(result.separating) == 2
        for h in result.separating:
            assert is_homomorphism(h)

    def test_trivial_in_any_generated(self):
        assert membership(trivial_algebra(fx.BDL), fx.DL).holds
        assert membership(trivial_algebra(fx.BA), fx.BOOL).holds

    def test_wrong_join_rejected(self):
        result = membership(WRONG_DIAMOND, fx.DL)
        assert not result.holds
        assert result.inseparable is not None

    def test_axiomatic_membership(self):
        assert membership(fx.DIAMOND, fx.DLAX).holds
        bad = membership(WRONG_DIAMOND, fx.DLAX)
        assert not bad.holds
        assert bad.failed_axiom is not None
        assert bad.assignment is not None

    def test_invariant_under_isomorphism(self):
        for perm in [(1, 0, 2, 3), (3, 2, 1, 0), (0, 2, 1, 3)]:
            assert membership(permuted(fx.DIAMOND, perm), fx.DL).holds


class TestRelativeCongruence:
    def test_collapse_m_with_top(self):
        theta = relative_congruence(fx.CHAIN3, [(1, 2)], fx.DL)
        assert theta.partition == (0, 1, 1)
        Q, _ = quotient(fx.CHAIN3, theta)
        assert are_isomorphic(Q, fx.CHAIN2)
        assert membership(Q, fx.DL).holds

    def test_empty_pairs_on_member(self):
        assert relative_congruence(fx.DIAMOND, [], fx.DL) == Congruence.identity(fx.DIAMOND)

    def test_collapse_ends_is_total(self):
        theta = relative_congruence(fx.CHAIN3, [(0, 2)], fx.DL)
        assert theta.partition == (0, 0, 0)

    def test_axiomatic_and_generated_agree_with_oracle(self):
        for A in members_up_to(fx.DL, 4):
            for a, b in combinations(range(A.size), 2):
                generated = relative_congruence(A, [(a, b)], fx.DL)
                axiomatic = relative_congruence(A, [(a, b)], fx.DLAX)
                oracle = intersect_k_congruences(A, [(a, b)], fx.DL)
                assert generated == axiomatic == oracle
                assert congruence_closure(A, [(a, b)]).finer_or_equal(generated)
                Q, _ = quotient(A, generated)
                assert membership(Q, fx.DL).holds


class TestFreeAlgebra:
    def test_free_dl_on_two(self):
        T, gens = free_algebra(fx.DL, ["x", "y"])
        assert T.size == 6
        assert set(gens) == {"x", "y"}

    def test_free_bool_on_one(self):
        T, _ = free_algebra(fx.BOOL, ["x"])
        assert T.size == 4

    def test_free_bool_on_two(self):
        T, _ = free_algebra(fx.BOOL, ["x", "y"])
        assert T.size == 16

    def test_universal_property_by_unique_lift_counting(self):
        for K, names in [(fx.DL, ["x", "y"]), (fx.BOOL, ["x"])]:
            T, gens = free_algebra(K, names)
            for U in members_up_to(K, 4):
                homs = enumerate_homomorphisms(T, U, K.signature)
                assert len(homs) == U.size ** len(names)
                images = sorted(tuple(h(gens[n]) for n in names) for h in homs)
                assert images == sorted(iproduct(range(U.size), repeat=len(names)))

    def test_axiomatic_presentation_rejected(self):
        with pytest.raises(ValueError, match="generated"):
            free_algebra(fx.DLAX, ["x"])

    def test_product_cap(self):
        with pytest.raises(CapExceeded):
            free_algebra(fx.DL, ["x", "y"], product_cap=3)


class TestEnumerateMembers:
    def test_sizes_one_and_two(self):
        assert len(enumerate_members(fx.DL, 1)) == 1
        members2 = enumerate_members(fx.DL, 2)
        assert len(members2) == 1
        assert are_isomorphic(members2[0], fx.CHAIN2)

    def test_size_four_chain_and_diamond(self):
        members = enumerate_members(fx.DL, 4)
        assert len(members) == 2
        assert sorted(
            ("chain" if are_isomorphic(A, fx.CHAIN4) else "diamond") for A in members
        ) == ["chain", "diamond"]

    def test_all_members_pass_membership(self):
        for A in members_up_to(fx.DL, 4):
            assert membership(A, fx.DL).holds

    def test_cap_enforced(self):
        with pytest.raises(CapExceeded):
            enumerate_members(fx.DL, 5)

    def test_axiomatic_enumeration_small(self):
        ms1 = enumerate_members(fx.DLAX, 1)
        assert len(ms1) == 1
        ms2 = enumerate_members(fx.DLAX, 2)
        assert len(ms2) == 1
        assert are_isomorphic(ms2[0], fx.CHAIN2)

    def test_axiomatic_matches_generated_at_size_three(self):
        """The axiom list is a complete base for the generated class at desk
        scale."""
        gen = enumerate_members(fx.DL, 3)
        axi = enumerate_members(fx.DLAX, 3)
        assert len(gen) == len(axi) == 1
        assert are_isomorphic(gen[0], axi[0])

    def test_bool_members(self):
        sizes = [A.size for A in members_up_to(fx.BOOL, 4)]
        assert sizes == [1, 2, 4]

    def test_msl_members(self):
        sizes = [A.size for A in members_up_to(fx.MSLQ, 4)]
        assert sizes == [1, 2, 3, 4, 4]


def embedding(A, B, mapping):
    h = Homomorphism(A, B, A.signature, mapping)
    assert is_homomorphism(h) and is_embedding(h)
    return h


class TestBoundedAmalgamation:
    def test_identity_span(self):
        ident = embedding(fx.CHAIN2, fx.CHAIN2, (0, 1))
        result = bounded_amalgamation(
            fx.CHAIN2, fx.CHAIN2, fx.CHAIN2, ident, ident, fx.DL, 2
        )
        assert isinstance(result, Amalgam)
        assert result.apex.size == 2

    def test_chain3_span_found_within_four(self):
        f = embedding(fx.CHAIN2, fx.CHAIN3, (0, 2))
        result = bounded_amalgamation(fx.CHAIN2, fx.CHAIN3, fx.CHAIN3, f, f, fx.DL, 4)
        assert isinstance(result, Amalgam)
        assert result.apex.size <= 4
        # replay: the square commutes and both legs embed
        assert is_embedding(result.left_leg) and is_embedding(result.right_leg)
        for a in range(2):
            assert result.left_leg(f(a)) == result.right_leg(f(a))

    def test_bound_too_small(self):
        f = embedding(fx.CHAIN2, fx.CHAIN3, (0, 2))
        result = bounded_amalgamation(fx.CHAIN2, fx.CHAIN3, fx.CHAIN3, f, f, fx.DL, 1)
        assert result == NotFoundWithinBound(1)

    def test_non_embedding_rejected(self):
        bad = Homomorphism(fx.CHAIN3, fx.CHAIN2, fx.BDL, (0, 0, 1))
        with pytest.raises(ValueError, match="embedding"):
            bounded_amalgamation(fx.CHAIN3, fx.CHAIN2, fx.CHAIN2, bad, bad, fx.DL, 2)
