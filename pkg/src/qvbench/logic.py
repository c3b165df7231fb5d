"""Terms, equations, quasiequations, and primitive positive formulas, with
evaluation on finite algebras.

Conjunctions are flat lists: satisfaction does not depend on bracketing or
order.  Existential witnesses are reported lexicographically least, so every
search result is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

from .core import FiniteAlgebra, SignatureError


class LogicError(ValueError):
    pass


class UnboundVariableError(LogicError):
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple = ()


Term = Var | App


@dataclass(frozen=True)
class Equation:
    left: Term
    right: Term


@dataclass(frozen=True)
class Quasiequation:
    premises: tuple[Equation, ...]
    conclusion: Equation


@dataclass(frozen=True)
class PpFormula:
    """Existentially quantified conjunction of equations."""
    bound_vars: tuple[str, ...]
    body: tuple[Equation, ...]

    def __post_init__(self) -> None:
        if not self.body:
            raise LogicError("pp formula needs a nonempty body")
        if len(set(self.bound_vars)) != len(self.bound_vars):
            raise LogicError("bound variables must be distinct")

    def free_vars(self) -> list[str]:
        return sorted(equations_variables(self.body) - set(self.bound_vars))


def term_variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for child in t.args:
        out |= term_variables(child)
    return out


def equations_variables(eqs) -> set[str]:
    out: set[str] = set()
    for eq in eqs:
        out |= term_variables(eq.left) | term_variables(eq.right)
    return out


def rename_term(t: Term, renaming: dict[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(renaming.get(t.name, t.name))
    return App(t.symbol, tuple(rename_term(a, renaming) for a in t.args))


def rename_equation(eq: Equation, renaming: dict[str, str]) -> Equation:
    return Equation(rename_term(eq.left, renaming), rename_term(eq.right, renaming))


def eval_term(A: FiniteAlgebra, t: Term, assignment: dict[str, int]) -> int:
    """Structural recursion over the operation tables."""
    if isinstance(t, Var):
        try:
            return assignment[t.name]
        except KeyError:
            raise UnboundVariableError(f"unbound variable {t.name!r}") from None
    k = A.signature.arity(t.symbol)
    if k != len(t.args):
        raise SignatureError(f"{t.symbol}/{k} applied to {len(t.args)} arguments")
    return A.apply(t.symbol, tuple(eval_term(A, a, assignment) for a in t.args))


def holds(A: FiniteAlgebra, eq: Equation, assignment: dict[str, int]) -> bool:
    return eval_term(A, eq.left, assignment) == eval_term(A, eq.right, assignment)


def satisfies_pp(
    A: FiniteAlgebra, phi: PpFormula, assignment: dict[str, int]
) -> tuple[bool, dict[str, int] | None]:
    """Existential search over all witness tuples; returns the first witness in
    lexicographic order when satisfied."""
    for name in phi.free_vars():
        if name not in assignment:
            raise UnboundVariableError(f"free variable {name!r} not assigned")
    for witness in iproduct(range(A.size), repeat=len(phi.bound_vars)):
        env = dict(assignment)
        env.update(zip(phi.bound_vars, witness))
        if all(holds(A, eq, env) for eq in phi.body):
            return True, dict(zip(phi.bound_vars, witness))
    return False, None


def check_quasiequation(
    A: FiniteAlgebra, q: Quasiequation
) -> tuple[bool, dict[str, int] | None]:
    """Full enumeration over assignments to the occurring variables; a failure
    reports the lexicographically least violating assignment (variables sorted
    by name)."""
    names = sorted(
        equations_variables(q.premises) | equations_variables((q.conclusion,))
    )
    for values in iproduct(range(A.size), repeat=len(names)):
        env = dict(zip(names, values))
        if all(holds(A, p, env) for p in q.premises) and not holds(A, q.conclusion, env):
            return False, env
    return True, None
