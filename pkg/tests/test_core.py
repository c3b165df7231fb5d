from itertools import product as iproduct

import pytest
from hypothesis import given, settings, strategies as st

from qvbench import fixtures as fx
from qvbench.core import (
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    Signature,
    SignatureError,
    all_subuniverses,
    are_isomorphic,
    build_algebra,
    canonical_tables,
    congruence_closure,
    direct_product,
    enumerate_embeddings,
    enumerate_homomorphisms,
    generated_subalgebra,
    is_congruence,
    is_embedding,
    is_homomorphism,
    kernel,
    permuted,
    product_projection,
    quotient,
    reduct,
    subalgebra,
    trivial_algebra,
)


@st.composite
def algebras(draw, signature=fx.BDL, max_size=3):
    """Arbitrary total tables over the signature; no axioms assumed."""
    n = draw(st.integers(1, max_size))
    tables = tuple(
        tuple(draw(st.integers(0, n - 1)) for _ in range(n**k))
        for _, k in signature.symbols
    )
    return FiniteAlgebra("H", signature, n, tables)


def brute_force_homs(A, B, language):
    out = []
    for mapping in iproduct(range(B.size), repeat=A.size):
        h = Homomorphism(A, B, language, mapping)
        if is_homomorphism(h):
            out.append(mapping)
    return out


def all_partitions(n):
    """All partitions of range(n) as canonical label tuples."""
    if n == 0:
        return [()]
    out = []

    def rec(i, labels, blocks):
        if i == n:
            out.append(tuple(labels))
            return
        for b in range(blocks + 1):
            labels.append(b)
            rec(i + 1, labels, max(blocks, b + 1))
            labels.pop()

    rec(0, [], 0)
    return out


class TestSignature:
    def test_duplicate_symbol_rejected(self):
        with pytest.raises(SignatureError):
            Signature("bad", (("f", 1), ("f", 2)))

    def test_includes(self):
        assert fx.BA.includes(fx.BDL)
        assert not fx.BDL.includes(fx.BA)
        assert fx.BDL.includes(fx.MSL)


class TestDirectProduct:
    def test_unary_product_isomorphic_to_factor(self):
        P = direct_product([fx.CHAIN2])
        assert P.size == 2
        assert are_isomorphic(P, fx.CHAIN2)

    def test_square_of_chain2_is_diamond(self):
        P = direct_product([fx.CHAIN2, fx.CHAIN2])
        assert P.size == 4
        # oracle: brute-force lattice axiom check on the product tables
        for a, b in iproduct(range(4), repeat=2):
            assert P.apply("meet", (a, b)) == P.apply("meet", (b, a))
            assert P.apply("join", (a, P.apply("meet", (a, b)))) == a
        assert P == fx.DIAMOND

    def test_mixed_product_cardinality(self):
        assert direct_product([fx.CHAIN2, fx.CHAIN3]).size == 6

    def test_signature_mismatch(self):
        with pytest.raises(SignatureError):
            direct_product([fx.CHAIN2, fx.CHAIN2_MS])

    def test_projections_are_homomorphisms(self):
        factors = [fx.CHAIN2, fx.CHAIN3]
        P = direct_product(factors)
        for i in range(2):
            assert is_homomorphism(product_projection(P, factors, i))


class TestHomomorphisms:
    def test_chain3_to_chain2_exactly_two(self):
        homs = enumerate_homomorphisms(fx.CHAIN3, fx.CHAIN2, fx.BDL)
        assert [h.mapping for h in homs] == brute_force_homs(fx.CHAIN3, fx.CHAIN2, fx.BDL)
        assert [h.mapping for h in homs] == [(0, 0, 1), (0, 1, 1)]

    def test_identity_included(self):
        homs = enumerate_homomorphisms(fx.DIAMOND, fx.DIAMOND, fx.BDL)
        assert (0, 1, 2, 3) in [h.mapping for h in homs]

    def test_diamond_to_chain2_exactly_two(self):
        homs = enumerate_homomorphisms(fx.DIAMOND, fx.CHAIN2, fx.BDL)
        assert [h.mapping for h in homs] == brute_force_homs(fx.DIAMOND, fx.CHAIN2, fx.BDL)
        assert [h.mapping for h in homs] == [(0, 0, 1, 1), (0, 1, 0, 1)]

    @settings(max_examples=40, deadline=None)
    @given(A=algebras(max_size=3), B=algebras(max_size=3))
    def test_matches_naive_filter(self, A, B):
        got = [h.mapping for h in enumerate_homomorphisms(A, B, fx.BDL)]
        assert got == brute_force_homs(A, B, fx.BDL)

    def test_reduct_homs_across_signatures(self):
        homs = enumerate_homomorphisms(fx.FOUR_BA, fx.CHAIN2, fx.BDL)
        assert len(homs) == 2


class TestEmbeddings:
    def test_identity_is_embedding(self):
        assert is_embedding(Homomorphism(fx.CHAIN2, fx.CHAIN2, fx.BDL, (0, 1)))

    def test_collapse_is_not(self):
        assert not is_embedding(Homomorphism(fx.CHAIN3, fx.CHAIN2, fx.BDL, (0, 0, 1)))

    def test_chain3_into_diamond(self):
        h = Homomorphism(fx.CHAIN3, fx.DIAMOND, fx.BDL, (0, 1, 3))
        assert is_homomorphism(h) and is_embedding(h)


class TestGeneratedSubalgebra:
    def test_diamond_single_atom(self):
        assert generated_subalgebra(fx.DIAMOND, {1}) == frozenset({0, 1, 3})

    def test_fourba_single_atom(self):
        assert generated_subalgebra(fx.FOUR_BA, {1}) == frozenset({0, 1, 2, 3})

    def test_full_seed(self):
        assert generated_subalgebra(fx.CHAIN4, range(4)) == frozenset(range(4))

    @settings(max_examples=40, deadline=None)
    @given(A=algebras(max_size=4), data=st.data())
    def test_monotone_and_idempotent(self, A, data):
        seed1 = data.draw(st.sets(st.integers(0, A.size - 1)))
        seed2 = data.draw(st.sets(st.integers(0, A.size - 1)))
        g1 = generated_subalgebra(A, seed1)
        assert g1 <= generated_subalgebra(A, seed1 | seed2)
        assert generated_subalgebra(A, g1) == g1


class TestSubuniverses:
    def test_subuniverses_are_closed_and_complete(self):
        subs = all_subuniverses(fx.DIAMOND)
        naive = []
        for mask in range(1, 2**4):
            s = frozenset(i for i in range(4) if mask >> i & 1)
            if generated_subalgebra(fx.DIAMOND, s) == s:
                naive.append(s)
        assert sorted(subs, key=sorted) == sorted(naive, key=sorted)


class TestCongruences:
    def test_empty_pairs_identity(self):
        assert congruence_closure(fx.CHAIN3, []) == Congruence.identity(fx.CHAIN3)

    def test_chain3_collapse_bottom(self):
        theta = congruence_closure(fx.CHAIN3, [(0, 1)])
        assert theta.partition == (0, 0, 2)

    def test_chain3_collapse_ends_forces_total(self):
        theta = congruence_closure(fx.CHAIN3, [(0, 2)])
        assert theta.partition == (0, 0, 0)

    @settings(max_examples=30, deadline=None)
    @given(A=algebras(max_size=4), data=st.data())
    def test_least_compatible_partition(self, A, data):
        pair = (
            data.draw(st.integers(0, A.size - 1)),
            data.draw(st.integers(0, A.size - 1)),
        )
        theta = congruence_closure(A, [pair])
        assert is_congruence(A, theta.partition)
        assert theta.related(*pair)
        # oracle: intersection of all compatible partitions containing the pair
        candidates = [
            labels
            for labels in all_partitions(A.size)
            if labels[pair[0]] == labels[pair[1]] and is_congruence(A, labels)
        ]
        for labels in candidates:
            other = Congruence.from_labels(A, labels)
            assert theta.finer_or_equal(other)

    def test_quotient_projection_kernel(self):
        theta = congruence_closure(fx.CHAIN3, [(0, 1)])
        Q, proj = quotient(fx.CHAIN3, theta)
        assert Q.size == 2
        assert is_homomorphism(proj)
        assert set(proj.mapping) == set(range(Q.size))
        assert kernel(proj) == theta
        assert are_isomorphic(Q, fx.CHAIN2)

    def test_quotient_identity_and_total(self):
        Q1, _ = quotient(fx.DIAMOND, Congruence.identity(fx.DIAMOND))
        assert are_isomorphic(Q1, fx.DIAMOND)
        Q2, _ = quotient(fx.DIAMOND, Congruence.total(fx.DIAMOND))
        assert Q2.size == 1


class TestReduct:
    def test_fourba_to_diamond(self):
        assert reduct(fx.FOUR_BA, fx.BDL) == fx.DIAMOND

    def test_identity_reduct(self):
        assert reduct(fx.DIAMOND, fx.BDL) == fx.DIAMOND

    def test_twoba_to_chain2(self):
        assert reduct(fx.TWO_BA, fx.BDL) == fx.CHAIN2

    def test_missing_symbol(self):
        with pytest.raises(SignatureError):
            reduct(fx.CHAIN2, fx.BA)


class TestIsomorphism:
    def test_permuted_copy_isomorphic(self):
        B = permuted(fx.DIAMOND, (0, 2, 1, 3))
        assert are_isomorphic(fx.DIAMOND, B)
        assert canonical_tables(B) == canonical_tables(fx.DIAMOND)

    def test_chain4_not_diamond(self):
        assert not are_isomorphic(fx.CHAIN4, fx.DIAMOND)

    def test_subalgebra_embedding(self):
        S, incl = subalgebra(fx.DIAMOND, {0, 1, 3})
        assert S.size == 3
        assert is_homomorphism(incl) and is_embedding(incl)
        assert are_isomorphic(S, fx.CHAIN3)

    def test_trivial_algebra(self):
        t = trivial_algebra(fx.BDL)
        assert t.size == 1 and t.apply("meet", (0, 0)) == 0
