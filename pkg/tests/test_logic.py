from itertools import product as iproduct

import pytest
from hypothesis import given, settings, strategies as st

from qvbench import fixtures as fx
from qvbench.core import FiniteAlgebra, congruence_closure, quotient
from qvbench.logic import (
    App,
    Equation,
    PpFormula,
    Quasiequation,
    UnboundVariableError,
    Var,
    check_quasiequation,
    eval_term,
    holds,
    satisfies_pp,
)

MEET_XY = App("meet", (Var("x"), Var("y")))


def naive_pp(A, phi, assignment):
    """Oracle: expand the existential into a finite disjunction over all
    witness tuples and evaluate each conjunct directly."""
    for witness in iproduct(range(A.size), repeat=len(phi.bound_vars)):
        env = dict(assignment)
        env.update(zip(phi.bound_vars, witness))
        if all(
            eval_term(A, eq.left, env) == eval_term(A, eq.right, env)
            for eq in phi.body
        ):
            return True
    return False


@st.composite
def bdl_algebras(draw, max_size=4):
    n = draw(st.integers(1, max_size))
    tables = tuple(
        tuple(draw(st.integers(0, n - 1)) for _ in range(n**k))
        for _, k in fx.BDL.symbols
    )
    return FiniteAlgebra("H", fx.BDL, n, tables)


class TestEvalTerm:
    def test_meet_on_chain3(self):
        assert eval_term(fx.CHAIN3, MEET_XY, {"x": 1, "y": 2}) == 1

    def test_variable(self):
        assert eval_term(fx.DIAMOND, Var("x"), {"x": 2}) == 2

    def test_double_negation_on_twoba(self):
        t = App("not", (App("not", (Var("x"),)),))
        assert eval_term(fx.TWO_BA, t, {"x": 0}) == 0

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariableError):
            eval_term(fx.CHAIN2, Var("q"), {})

    def test_unknown_symbol(self):
        with pytest.raises(Exception, match="unknown symbol"):
            eval_term(fx.CHAIN2, App("xor", (Var("x"), Var("x"))), {"x": 0})


class TestSatisfiesPp:
    def test_complement_of_bottom(self):
        ok, witness = satisfies_pp(fx.CHAIN3, fx.COMPL.formula, {"x1": 0, "y": 2})
        assert ok and witness == {}

    def test_middle_has_no_complement(self):
        for y in range(3):
            ok, _ = satisfies_pp(fx.CHAIN3, fx.COMPL.formula, {"x1": 1, "y": y})
            assert not ok

    def test_reflexive_body_always_true(self):
        phi = PpFormula((), (Equation(Var("x"), Var("x")),))
        ok, witness = satisfies_pp(fx.DIAMOND, phi, {"x": 2})
        assert ok and witness == {}

    def test_witness_reported_lex_least(self):
        phi = PpFormula(("z1",), (Equation(Var("z1"), Var("z1")),))
        ok, witness = satisfies_pp(fx.DIAMOND, phi, {})
        assert ok and witness == {"z1": 0}

    @settings(max_examples=60, deadline=None)
    @given(A=bdl_algebras(), data=st.data())
    def test_agrees_with_naive_expansion(self, A, data):
        formulas = [fx.COMPL.formula, fx.COMPL_PADDED.formula, fx.JOIN_WITH_COMPL.formula]
        phi = data.draw(st.sampled_from(formulas))
        assignment = {
            v: data.draw(st.integers(0, A.size - 1), label=v) for v in phi.free_vars()
        }
        ok, witness = satisfies_pp(A, phi, assignment)
        assert ok == naive_pp(A, phi, assignment)
        if ok and witness:
            env = dict(assignment)
            env.update(witness)
            assert all(holds(A, eq, env) for eq in phi.body)


ANTISYMMETRY = Quasiequation(
    (
        Equation(App("meet", (Var("x"), Var("y"))), Var("x")),
        Equation(App("meet", (Var("y"), Var("x"))), Var("y")),
    ),
    Equation(Var("x"), Var("y")),
)

TRIVIALIZER = Quasiequation((), Equation(Var("x"), Var("y")))


class TestCheckQuasiequation:
    def test_antisymmetry_on_chain2(self):
        ok, cex = check_quasiequation(fx.CHAIN2, ANTISYMMETRY)
        assert ok and cex is None

    def test_trivializer_fails_with_least_counterexample(self):
        ok, cex = check_quasiequation(fx.CHAIN3, TRIVIALIZER)
        assert not ok
        assert cex == {"x": 0, "y": 1}

    def test_tautology(self):
        q = Quasiequation((Equation(Var("x"), Var("y")),), Equation(Var("x"), Var("y")))
        ok, _ = check_quasiequation(fx.DIAMOND, q)
        assert ok

    @settings(max_examples=40, deadline=None)
    @given(A=bdl_algebras(max_size=3), data=st.data())
    def test_premise_free_antitone_under_quotients(self, A, data):
        """Equations are preserved by surjective images."""
        q = data.draw(st.sampled_from([qe for qe in fx.DL_AXIOMS]))
        pair = (
            data.draw(st.integers(0, A.size - 1)),
            data.draw(st.integers(0, A.size - 1)),
        )
        ok_A, _ = check_quasiequation(A, q)
        if ok_A:
            Q, _ = quotient(A, congruence_closure(A, [pair]))
            ok_Q, _ = check_quasiequation(Q, q)
            assert ok_Q
