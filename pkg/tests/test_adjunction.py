from itertools import product as iproduct

import pytest

from qvbench import fixtures as fx
from qvbench.adjunction import (
    CounitInstance,
    ExpansionSpec,
    ExpansionViolation,
    FreeExtension,
    LiftViolation,
    PpExpansionSpec,
    UndefinedAt,
    check_counit_iso,
    check_expansion,
    check_unit_mono,
    counit,
    expand_algebra,
    free_extension,
    free_extension_map,
    induced_expansion,
    pp_expansion_membership,
    universal_property_check,
)
from qvbench.core import (
    Homomorphism,
    SignatureError,
    are_isomorphic,
    build_algebra,
    compose,
    enumerate_homomorphisms,
    is_embedding,
    is_homomorphism,
    reduct,
)
from qvbench.quasivariety import Quasivariety, generate_in_product, members_up_to, membership


class TestSpecs:
    def test_expansion_signature_inclusion_checked(self):
        with pytest.raises(SignatureError):
            ExpansionSpec(fx.BOOL, fx.DL)

    def test_pp_expansion_symbol_clash(self):
        with pytest.raises(SignatureError):
            PpExpansionSpec(fx.DL, (("meet", fx.COMPL),))

    def test_expanded_signature(self):
        assert fx.PP_COMPL.expanded_signature == fx.BA


class TestCheckExpansion:
    def test_dl_to_bool_ok(self):
        assert check_expansion(fx.DL_TO_BOOL, 4) == "ok"

    def test_trivial_ok(self):
        assert check_expansion(fx.DL_TRIVIAL, 4) == "ok"

    def test_msl_to_dl_ok(self):
        assert check_expansion(fx.MSL_TO_DL, 4) == "ok"

    def test_violation_surfaces(self):
        # a "Boolean" generator whose lattice part is not distributive is not
        # even a lattice here: break absorption so the reduct fails membership
        bad = build_algebra(
            "BadBA", fx.BA, 2,
            {"meet": min, "join": lambda a, b: 1, "bot": 0, "top": 1, "not": lambda a: 1 - a},
        )
        E = ExpansionSpec(fx.DL, Quasivariety("BadQ", fx.BA, generators=(bad,)))
        result = check_expansion(E, 2)
        assert isinstance(result, ExpansionViolation)


class TestExpandAlgebra:
    def test_diamond_becomes_fourba(self):
        assert expand_algebra(fx.DIAMOND, fx.PP_COMPL) == fx.FOUR_BA

    def test_chain2_becomes_twoba(self):
        assert expand_algebra(fx.CHAIN2, fx.PP_COMPL) == fx.TWO_BA

    def test_chain3_undefined_at_middle(self):
        result = expand_algebra(fx.CHAIN3, fx.PP_COMPL)
        assert result == UndefinedAt("not", (1,))

    def test_non_member_rejected(self):
        from tests.test_quasivariety import WRONG_DIAMOND

        with pytest.raises(ValueError, match="not a member"):
            expand_algebra(WRONG_DIAMOND, fx.PP_COMPL)

    def test_round_trip_idempotent(self):
        expanded = expand_algebra(fx.DIAMOND, fx.PP_COMPL)
        again = expand_algebra(reduct(expanded, fx.BDL), fx.PP_COMPL)
        assert again == expanded


class TestPpExpansionMembership:
    def test_fourba_in_class(self):
        B = reduct(fx.FOUR_BA, fx.PP_COMPL.expanded_signature)
        assert pp_expansion_membership(B, fx.PP_COMPL, 4).status == "in-class"

    def test_twoba_in_class(self):
        B = reduct(fx.TWO_BA, fx.PP_COMPL.expanded_signature)
        assert pp_expansion_membership(B, fx.PP_COMPL, 4).status == "in-class"

    def test_wrong_not_table_refused(self):
        bad = build_algebra(
            "BadFour", fx.BA, 4,
            {"meet": lambda a, b: a & b, "join": lambda a, b: a | b,
             "bot": 0, "top": 3,
             "not": lambda a: {0: 3, 1: 1, 2: 2, 3: 0}[a]},
        )
        result = pp_expansion_membership(bad, fx.PP_COMPL, 4)
        assert result.status == "no"
        assert result.certificate[0] == "mismatch"

    def test_subalgebra_of_expanded_member_in_closure(self):
        P = fx.PP_JC
        C = expand_algebra(fx.DIAMOND, P)
        from qvbench.core import subalgebra

        B, _ = subalgebra(C, {0, 1, 3})
        result = pp_expansion_membership(B, P, 4)
        assert result.status == "in-closure"
        witness_alg, witness_emb = result.witness
        assert is_embedding(witness_emb) and is_homomorphism(witness_emb)


class TestFreeExtension:
    def test_booleanization_of_chain3(self):
        fe = free_extension(fx.CHAIN3, fx.DL_TO_BOOL)
        assert fe.algebra.size == 4
        assert fe.unit_injective
        assert fe.unit.mapping == (0, 1, 3)
        assert membership(fe.algebra, fx.BOOL).holds

    def test_booleanization_of_diamond_is_bijective(self):
        fe = free_extension(fx.DIAMOND, fx.DL_TO_BOOL)
        assert fe.algebra.size == 4
        assert fe.unit_injective
        assert are_isomorphic(fe.algebra, fx.FOUR_BA)

    def test_join_completion_of_meet_diamond(self):
        fe = free_extension(fx.DIAMOND_MS, fx.MSL_TO_DL)
        assert fe.algebra.size == 5
        assert fe.unit_injective
        assert membership(fe.algebra, fx.DL).holds

    def test_unit_is_base_homomorphism(self):
        fe = free_extension(fx.CHAIN3, fx.DL_TO_BOOL)
        assert is_homomorphism(fe.unit)

    def test_output_in_expanded_class(self):
        for A in members_up_to(fx.MSLQ, 4):
            fe = free_extension(A, fx.MSL_TO_DL)
            assert membership(fe.algebra, fx.DL).holds


class TestCounit:
    def test_bijective_on_fourba(self):
        eps = counit(fx.FOUR_BA, fx.DL_TO_BOOL)
        assert eps.source.size == 4
        assert sorted(eps.mapping) == [0, 1, 2, 3]

    def test_bijective_on_twoba(self):
        eps = counit(fx.TWO_BA, fx.DL_TO_BOOL)
        assert sorted(eps.mapping) == [0, 1]

    def test_not_injective_on_diamond_over_msl(self):
        eps = counit(fx.DIAMOND, fx.MSL_TO_DL)
        assert eps.source.size == 5
        assert len(set(eps.mapping)) == 4  # surjective but not injective

    def test_counit_retracts_unit(self):
        for B in (fx.TWO_BA, fx.FOUR_BA):
            E = fx.DL_TO_BOOL
            eps = counit(B, E)
            fe = free_extension(reduct(B, fx.BDL), E)
            for b in range(B.size):
                assert eps(fe.unit(b)) == b


class TestUniversalProperty:
    def test_chain3_booleanization(self):
        assert universal_property_check(fx.CHAIN3, fx.DL_TO_BOOL, 4) == "ok"

    def test_chain2_small_bound(self):
        assert universal_property_check(fx.CHAIN2, fx.DL_TO_BOOL, 2) == "ok"

    def test_diamond_over_msl(self):
        assert universal_property_check(fx.DIAMOND_MS, fx.MSL_TO_DL, 4) == "ok"

    def test_truncated_free_extension_violates(self):
        """Dropping one hom-product factor breaks the lift for that very map."""
        A, E = fx.CHAIN3, fx.DL_TO_BOOL
        factors, homs = [], []
        for G in E.expanded.generators:
            for h in enumerate_homomorphisms(A, reduct(G, fx.BDL), fx.BDL):
                factors.append(G)
                homs.append(h)
        kept = factors[1:], homs[1:]
        seeds = [tuple(h(a) for h in kept[1]) for a in range(A.size)]
        gen = generate_in_product(kept[0], seeds, E.expanded.signature)
        truncated = FreeExtension(
            gen.algebra,
            Homomorphism(A, gen.algebra, fx.BDL, gen.seed_index),
            len(kept[0]),
            gen,
        )
        result = universal_property_check(A, E, 4, free=truncated)
        assert isinstance(result, LiftViolation)
        assert result.kind == "no-lift"


class TestUnitCounitSweeps:
    def test_unit_mono_dl_to_bool(self):
        assert all(i.embedding for i in check_unit_mono(fx.DL_TO_BOOL, 4))

    def test_unit_mono_trivial(self):
        assert all(i.embedding for i in check_unit_mono(fx.DL_TRIVIAL, 4))

    def test_unit_mono_msl_to_dl(self):
        # the unit stays injective here; the failure lives in the counit
        assert all(i.embedding for i in check_unit_mono(fx.MSL_TO_DL, 4))

    def test_counit_iso_dl_to_bool(self):
        assert all(i.bijective for i in check_counit_iso(fx.DL_TO_BOOL, 4))

    def test_counit_iso_trivial(self):
        assert all(i.bijective for i in check_counit_iso(fx.DL_TRIVIAL, 4))

    def test_counit_fails_at_diamond_over_msl(self):
        instances = check_counit_iso(fx.MSL_TO_DL, 4)
        bad = [i for i in instances if not i.bijective]
        assert len(bad) == 1
        assert are_isomorphic(bad[0].algebra, fx.DIAMOND)
        assert bad[0].counit.source.size == 5


class TestAdjunctionLaws:
    def algebra_pairs(self):
        return [
            (fx.CHAIN3, fx.DL_TO_BOOL),
            (fx.DIAMOND, fx.DL_TO_BOOL),
            (fx.DIAMOND_MS, fx.MSL_TO_DL),
            (fx.CHAIN2_MS, fx.MSL_TO_DL),
        ]

    def test_triangle_identity_on_free_extension(self):
        """counit at the free extension composed with the reflected unit is the
        identity."""
        for A, E in self.algebra_pairs():
            fe = free_extension(A, E)
            red = reduct(fe.algebra, E.base.signature)
            fe2 = free_extension(red, E)
            reflected_unit = free_extension_map(E, fe.unit, fe, fe2)
            eps = counit(fe.algebra, E)
            for x in range(fe.algebra.size):
                assert eps(reflected_unit(x)) == x

    def test_triangle_identity_on_reducts(self):
        for B, E in [(fx.TWO_BA, fx.DL_TO_BOOL), (fx.FOUR_BA, fx.DL_TO_BOOL),
                     (fx.DIAMOND, fx.MSL_TO_DL), (fx.CHAIN3, fx.MSL_TO_DL)]:
            red = reduct(B, E.base.signature)
            fe = free_extension(red, E)
            eps = counit(B, E)
            for b in range(B.size):
                assert eps(fe.unit(b)) == b

    def test_unit_naturality(self):
        """Reflecting a base map commutes with the units."""
        E = fx.DL_TO_BOOL
        for h in enumerate_homomorphisms(fx.CHAIN3, fx.DIAMOND, fx.BDL):
            feA = free_extension(fx.CHAIN3, E)
            feB = free_extension(fx.DIAMOND, E)
            Fh = free_extension_map(E, h, feA, feB)
            for a in range(fx.CHAIN3.size):
                assert Fh(feA.unit(a)) == feB.unit(h(a))

    def test_counit_naturality(self):
        """For expanded maps g, counit . reflect(reduct(g)) = g . counit."""
        E = fx.DL_TO_BOOL
        for g in enumerate_homomorphisms(fx.FOUR_BA, fx.TWO_BA, fx.BA):
            redg = Homomorphism(
                reduct(fx.FOUR_BA, fx.BDL), reduct(fx.TWO_BA, fx.BDL), fx.BDL, g.mapping
            )
            feA = free_extension(reduct(fx.FOUR_BA, fx.BDL), E)
            feB = free_extension(reduct(fx.TWO_BA, fx.BDL), E)
            Fg = free_extension_map(E, redg, feA, feB)
            epsA = counit(fx.FOUR_BA, E)
            epsB = counit(fx.TWO_BA, E)
            for x in range(feA.algebra.size):
                assert g(epsA(x)) == epsB(Fg(x))


class TestInducedExpansion:
    def test_compl_induces_bool(self):
        E = induced_expansion(fx.PP_COMPL)
        assert E.expanded.signature == fx.BA
        assert E.expanded.generators == (fx.TWO_BA.renamed("x"),)

    def test_partial_on_generator_rejected(self):
        # an operation undefined somewhere on a generator: complement over a
        # three-element chain generator
        DL3 = Quasivariety("DL3", fx.BDL, generators=(fx.CHAIN3,))
        P = PpExpansionSpec(DL3, (("not", fx.COMPL),))
        with pytest.raises(ValueError, match="not total"):
            induced_expansion(P)
