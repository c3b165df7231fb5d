"""Bound-parameterized checks for the headline properties: simplicity of pp
expansions, the interpolation criterion, Beth-companion verdicts relative to a
test family, regular monomorphisms, mono-reflectivity, faithful term
equivalence, and the consistency harnesses tying them together.

Negative verdicts always carry a replayable certificate; "Beth companion"
verdicts are relative to the supplied operation family, since the full class of
implicit operations is not finitely enumerable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct

from .core import (
    FiniteAlgebra,
    Homomorphism,
    IsoRegistry,
    Signature,
    SignatureError,
    all_subuniverses,
    enumerate_homomorphisms,
    generated_subalgebra,
    is_embedding,
    is_homomorphism,
    reduct,
    subalgebra,
)
from .logic import App, Equation, Term, Var, eval_term, term_variables
from .adjunction import (
    CounitInstance,
    ExpansionSpec,
    PpExpansionSpec,
    UnitInstance,
    check_counit_iso,
    check_unit_mono,
    expand_algebra,
)
from .implicit import (
    FunctionalityViolation,
    ImplicitOpSpec,
    PartialOperation,
    induced_partial_op,
    witness_projection_specs,
)
from .implicit import check_totalizable, check_unique_witnesses
from .quasivariety import (
    DEFAULT_MEMBER_CAP,
    NotFoundWithinBound,
    Quasivariety,
    members_up_to,
    membership,
)


class PreconditionError(ValueError):
    """A check's stated precondition failed; no verdict is produced."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class Verdict:
    claim: str
    status: str  # "holds" | "fails" | "unknown-within-bound"
    bounds: tuple[tuple[str, int], ...] = ()
    certificate: object = None
    notes: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.status == "holds"


@dataclass(frozen=True)
class TermTranslation:
    """Arity-preserving map from source symbols to target terms in x1..xn;
    omitted symbols translate to themselves when the target shares them."""
    source: Signature
    target: Signature
    mapping: tuple[tuple[str, Term], ...] = ()

    def __post_init__(self) -> None:
        given = dict(self.mapping)
        for sym, term in given.items():
            k = self.source.arity(sym)
            allowed = {f"x{i + 1}" for i in range(k)}
            if not term_variables(term) <= allowed:
                raise SignatureError(f"translation of {sym}/{k} uses variables outside x1..x{k}")

    def term_for(self, sym: str) -> Term:
        given = dict(self.mapping)
        if sym in given:
            return given[sym]
        k = self.source.arity(sym)
        if self.target.arities.get(sym) != k:
            raise SignatureError(f"no translation given for {sym!r} and target lacks it")
        return App(sym, tuple(Var(f"x{i + 1}") for i in range(k)))


def apply_translation(tr: TermTranslation, B: FiniteAlgebra) -> FiniteAlgebra:
    """The source-signature algebra on B's universe interpreting each source
    symbol by its translated term evaluated in B."""
    if B.signature != tr.target:
        raise SignatureError(f"{B.name!r} is not over the translation target")
    tables = []
    for sym, k in tr.source.symbols:
        term = tr.term_for(sym)
        table = []
        for args in iproduct(range(B.size), repeat=k):
            env = {f"x{i + 1}": a for i, a in enumerate(args)}
            table.append(eval_term(B, term, env))
        tables.append(tuple(table))
    return FiniteAlgebra(f"tr({B.name})", tr.source, B.size, tuple(tables))


# ---------------------------------------------------------------------------
# Members of a pp expansion at a bound


@lru_cache(maxsize=None)
def expansion_members(P: PpExpansionSpec, bound: int, cap: int | None = None) -> tuple[FiniteAlgebra, ...]:
    """Members of the subalgebra closure of the expanded class up to the bound,
    up to isomorphism: subalgebras of expanded members, enumerated
    deterministically."""
    cap = cap if cap is not None else max(bound, DEFAULT_MEMBER_CAP)
    registry = IsoRegistry()
    sig = P.expanded_signature
    for D in members_up_to(P.base, bound, cap=cap):
        C = expand_algebra(D, P, check=False)
        if not isinstance(C, FiniteAlgebra):
            continue
        for sub in all_subuniverses(C, max_size=bound):
            S, _ = subalgebra(C, sub)
            registry.add(S)
    members = sorted(registry.members, key=lambda A: (A.size, A.tables))
    return tuple(A.renamed(f"S({P.base.name})[+]/n{A.size}#{i}") for i, A in enumerate(members))


def _in_class(B: FiniteAlgebra, P: PpExpansionSpec):
    """Is B literally an expanded member: base reduct in the base class and
    every added table reproduced by its induced operation?  Returns None or a
    certificate."""
    red = reduct(B, P.base.signature)
    base_membership = membership(red, P.base)
    if not base_membership.holds:
        return ("base-reduct", base_membership)
    for sym, spec in P.ops:
        op = induced_partial_op(red, spec)
        if isinstance(op, FunctionalityViolation):
            return ("functionality", op)
        if not op.is_total:
            missing = next(
                args
                for args in iproduct(range(B.size), repeat=spec.arity)
                if not op.defined_at(args)
            )
            return ("undefined-at", sym, missing)
        for args, value in op.graph:
            if B.apply(sym, args) != value:
                return ("mismatch", sym, args, B.apply(sym, args), value)
    return None


def check_simple(P: PpExpansionSpec, bound: int, cap: int | None = None) -> Verdict:
    """Simplicity of the pp expansion relative to its presenting family: every
    member of the subalgebra closure up to the bound must already be an
    expanded member.  The verdict is family-relative: a closure that fails here
    may still be presentable by a different operation family."""
    for B in expansion_members(P, bound, cap):
        cert = _in_class(B, P)
        if cert is not None:
            return Verdict(
                "simple-pp-expansion",
                "fails",
                (("max-size", bound),),
                certificate=(B, cert),
            )
    return Verdict("simple-pp-expansion", "holds", (("max-size", bound),))


def check_interpolation_criterion(
    A: FiniteAlgebra, s: ImplicitOpSpec, base_signature: Signature
) -> Verdict:
    """Term interpolation at every defined tuple, operationalized as
    subuniverse membership: the value of the operation on the base reduct must
    lie in the subalgebra of A (full signature) generated by the arguments,
    since term values at a tuple are exactly that subuniverse."""
    if not A.signature.includes(base_signature):
        raise SignatureError("algebra does not expand the base signature")
    op = induced_partial_op(A, s)
    if isinstance(op, FunctionalityViolation):
        return Verdict("interpolation-criterion", "fails", certificate=op)
    for args, value in op.graph:
        generated = generated_subalgebra(A, set(args))
        if value not in generated:
            return Verdict(
                "interpolation-criterion",
                "fails",
                certificate=(A, args, value, tuple(sorted(generated))),
            )
    return Verdict("interpolation-criterion", "holds")


def check_beth_companion(
    P: PpExpansionSpec,
    ops_under_test: tuple[ImplicitOpSpec, ...],
    bound: int,
    cap: int | None = None,
) -> Verdict:
    """Interpolation for every supplied operation on every member of the
    expansion up to the bound.  The verdict is explicitly relative to the
    supplied family: the class of all implicit operations is not enumerable."""
    notes = ("verdict relative to the supplied operation family",)
    if not ops_under_test:
        return Verdict(
            "beth-companion",
            "holds",
            (("max-size", bound),),
            notes=notes + ("vacuous: empty operation family",),
        )
    for B in expansion_members(P, bound, cap):
        for s in ops_under_test:
            v = check_interpolation_criterion(B, s, P.base.signature)
            if not v.holds:
                return Verdict(
                    "beth-companion",
                    "fails",
                    (("max-size", bound),),
                    certificate=(B, s.name, v.certificate),
                    notes=notes,
                )
    return Verdict("beth-companion", "holds", (("max-size", bound),), notes=notes)


@dataclass(frozen=True)
class RegularWitness:
    equalizer_of: tuple[Homomorphism, Homomorphism]
    codomain: FiniteAlgebra


def check_regular_mono(
    h: Homomorphism,
    M: Quasivariety,
    size_bound: int | None = None,
    cap: int | None = None,
) -> RegularWitness | NotFoundWithinBound:
    """Search for a parallel pair whose equalizer is exactly the image of the
    embedding.  Positive answers carry the replayable witness; negatives are
    bound-relative only.  The default codomain bound |B|^2 is a pragmatic
    choice."""
    if not is_embedding(h):
        raise PreconditionError("the given homomorphism is not an embedding")
    B = h.target
    bound = size_bound if size_bound is not None else B.size**2
    cap = cap if cap is not None else max(bound, DEFAULT_MEMBER_CAP)
    image = set(h.mapping)
    for C in members_up_to(M, bound, cap=cap):
        homs = enumerate_homomorphisms(B, C, M.signature)
        for i in range(len(homs)):
            for j in range(i, len(homs)):
                g1, g2 = homs[i], homs[j]
                equalizer = {b for b in range(B.size) if g1(b) == g2(b)}
                if equalizer == image:
                    return RegularWitness((g1, g2), C)
    return NotFoundWithinBound(bound)


def check_mono_reflective(E: ExpansionSpec, bound: int, cap: int | None = None) -> Verdict:
    """Three bounded sub-checks, all required: (a) fullness of the reduct
    functor (base-language maps between expanded members preserve the extra
    operations), (b) unit injectivity, (c) counit bijectivity."""
    cap = cap if cap is not None else max(bound, DEFAULT_MEMBER_CAP)
    expanded_members = members_up_to(E.expanded, bound, cap=cap)
    for A in expanded_members:
        for B in expanded_members:
            redA, redB = reduct(A, E.base.signature), reduct(B, E.base.signature)
            for h in enumerate_homomorphisms(redA, redB, E.base.signature):
                lifted = Homomorphism(A, B, E.expanded.signature, h.mapping)
                if not is_homomorphism(lifted):
                    return Verdict(
                        "mono-reflective",
                        "fails",
                        (("max-size", bound),),
                        certificate=("not-full", A, B, h.mapping),
                    )
    for inst in check_unit_mono(E, bound, cap=cap):
        if not inst.embedding:
            return Verdict(
                "mono-reflective",
                "fails",
                (("max-size", bound),),
                certificate=("unit-not-mono", inst),
            )
    for inst in check_counit_iso(E, bound, cap=cap):
        if not inst.bijective:
            return Verdict(
                "mono-reflective",
                "fails",
                (("max-size", bound),),
                certificate=("counit-not-iso", inst),
            )
    return Verdict("mono-reflective", "holds", (("max-size", bound),))


def unit_counit_verdict(E: ExpansionSpec, bound: int, cap: int | None = None) -> Verdict:
    """The conjunction: unit componentwise injective and counit componentwise
    bijective, over the enumerated members."""
    for inst in check_unit_mono(E, bound, cap=cap):
        if not inst.embedding:
            return Verdict(
                "unit-mono-counit-iso",
                "fails",
                (("max-size", bound),),
                certificate=("unit-not-mono", inst),
            )
    for inst in check_counit_iso(E, bound, cap=cap):
        if not inst.bijective:
            return Verdict(
                "unit-mono-counit-iso",
                "fails",
                (("max-size", bound),),
                certificate=("counit-not-iso", inst),
            )
    return Verdict("unit-mono-counit-iso", "holds", (("max-size", bound),))


def check_faithful_term_equivalence(
    M1: Quasivariety,
    M2: Quasivariety,
    tau: TermTranslation,
    rho: TermTranslation,
    K: Quasivariety,
    bound: int,
    cap: int | None = None,
) -> Verdict:
    """The four conditions of a faithful term equivalence relative to the base:
    translated members land in the other class and the translations compose to
    the identity on the nose, over the enumerated members."""
    for sym, k in K.signature.symbols:
        ident = App(sym, tuple(Var(f"x{i + 1}") for i in range(k)))
        if tau.term_for(sym) != ident or rho.term_for(sym) != ident:
            raise PreconditionError(
                f"translations must fix the base symbol {sym!r}", certificate=sym
            )
    if tau.source != M1.signature or tau.target != M2.signature:
        raise PreconditionError("tau must translate the first signature into the second")
    if rho.source != M2.signature or rho.target != M1.signature:
        raise PreconditionError("rho must translate the second signature into the first")
    cap = cap if cap is not None else max(bound, DEFAULT_MEMBER_CAP)
    bounds = (("max-size", bound),)
    # Round-trip failures are reported in preference to membership failures:
    # they replay by pure table evaluation, with no class reasoning.
    for A in members_up_to(M1, bound, cap=cap):
        rhoA = apply_translation(rho, A)
        back = apply_translation(tau, rhoA)
        if back.tables != A.tables:
            return Verdict(
                "faithful-term-equivalence", "fails", bounds,
                certificate=("(iii) round trip differs", A, _table_diff(back, A)),
            )
        if not membership(rhoA, M2).holds:
            return Verdict(
                "faithful-term-equivalence", "fails", bounds,
                certificate=("(i) translated member escapes the second class", A),
            )
    for B in members_up_to(M2, bound, cap=cap):
        tauB = apply_translation(tau, B)
        back = apply_translation(rho, tauB)
        if back.tables != B.tables:
            return Verdict(
                "faithful-term-equivalence", "fails", bounds,
                certificate=("(iv) round trip differs", B, _table_diff(back, B)),
            )
        if not membership(tauB, M1).holds:
            return Verdict(
                "faithful-term-equivalence", "fails", bounds,
                certificate=("(ii) translated member escapes the first class", B),
            )
    return Verdict("faithful-term-equivalence", "holds", bounds)


def _table_diff(got: FiniteAlgebra, expected: FiniteAlgebra):
    for (sym, k), tg, te in zip(expected.signature.symbols, got.tables, expected.tables):
        if tg != te:
            for flat, (a, b) in enumerate(zip(tg, te)):
                if a != b:
                    args = []
                    rest = flat
                    for _ in range(k):
                        args.append(rest % expected.size)
                        rest //= expected.size
                    return (sym, tuple(reversed(args)), a, b)
    return None


@dataclass(frozen=True)
class MainTheoremReport:
    """Agreement report between the three characterizations at one bound."""
    simple: Verdict | None
    unit_counit: Verdict
    mono_reflective: Verdict
    consistent: bool
    notes: tuple[str, ...] = ()


def cross_validate_main_theorem(
    E: ExpansionSpec,
    P: PpExpansionSpec | None,
    bound: int,
    cap: int | None = None,
) -> MainTheoremReport:
    """Run the three characterizations at the same bound and report agreement.
    The simplicity check is relative to the supplied family, so its
    disagreement with the categorical checks can also mean the closure is
    simple via a different family; the other two must always agree."""
    simple = check_simple(P, bound, cap) if P is not None else None
    uc = unit_counit_verdict(E, bound, cap)
    mr = check_mono_reflective(E, bound, cap)
    consistent = uc.status == mr.status
    notes = []
    if simple is None:
        notes.append("no operation family supplied; simplicity check not applicable")
    else:
        consistent = consistent and simple.status == uc.status
        if simple.status != uc.status:
            notes.append(
                "family-relative simplicity disagrees with the categorical checks; "
                "the closure may be simple via a different family"
            )
    return MainTheoremReport(simple, uc, mr, consistent, tuple(notes))


def check_simplicity_transfer(
    M1: Quasivariety,
    M2: Quasivariety,
    tau: TermTranslation,
    rho: TermTranslation,
    K: Quasivariety,
    bound: int,
    cap: int | None = None,
) -> Verdict:
    """Once the faithful term equivalence holds at the bound, the categorical
    simplicity verdicts of the two expansions must agree at the same bound."""
    fte = check_faithful_term_equivalence(M1, M2, tau, rho, K, bound, cap)
    if not fte.holds:
        raise PreconditionError(
            "faithful term equivalence does not hold at this bound", certificate=fte
        )
    v1 = unit_counit_verdict(ExpansionSpec(K, M1), bound, cap)
    v2 = unit_counit_verdict(ExpansionSpec(K, M2), bound, cap)
    if v1.status == v2.status:
        return Verdict(
            "simplicity-transfer", "holds", (("max-size", bound),),
            notes=(f"both expansions: {v1.status}",),
        )
    return Verdict(
        "simplicity-transfer", "fails", (("max-size", bound),),
        certificate=(v1, v2),
    )


@dataclass(frozen=True)
class HarnessReport:
    premises_established: bool
    premise_details: tuple[tuple[str, str], ...]
    simple: Verdict | None
    consistent: bool


def harness_unique_witness_expansions(
    P: PpExpansionSpec,
    bound: int,
    ext_bound: int | None = None,
    cap: int | None = None,
) -> HarnessReport:
    """Consistency harness: when every operation has unique witnesses, every
    member up to the bound totalizes within the extension bound, the witness
    projections are functional, and the interpolation criterion holds for the
    operations together with their witness projections, then the simplicity
    check must also pass at the bound.

    The witness projections are included in the interpolation family because
    the implication is family-relative without them and can genuinely fail.
    """
    ext_bound = ext_bound if ext_bound is not None else bound
    cap = cap if cap is not None else max(bound, ext_bound, DEFAULT_MEMBER_CAP)
    details: list[tuple[str, str]] = []
    established = True
    specs = tuple(spec for _, spec in P.ops)
    projections: list[ImplicitOpSpec] = []
    for spec in specs:
        uw = check_unique_witnesses(spec, P.base, bound, cap=cap)
        if uw != "ok":
            details.append((f"unique-witnesses[{spec.name}]", "fails"))
            established = False
        else:
            details.append((f"unique-witnesses[{spec.name}]", "holds"))
        for A in members_up_to(P.base, bound, cap=cap):
            t = check_totalizable(spec, P.base, A, ext_bound, cap=cap)
            if isinstance(t, NotFoundWithinBound):
                details.append((f"totalizable[{spec.name}] at {A.name}", "unknown-within-bound"))
                established = False
        projections.extend(witness_projection_specs(spec))
    for proj in projections:
        for A in members_up_to(P.base, bound, cap=cap):
            if isinstance(induced_partial_op(A, proj), FunctionalityViolation):
                details.append((f"projection-functional[{proj.name}] at {A.name}", "fails"))
                established = False
    beth = check_beth_companion(P, specs + tuple(projections), bound, cap=cap)
    details.append(("beth-companion[family+projections]", beth.status))
    if not beth.holds:
        established = False
    if not established:
        return HarnessReport(False, tuple(details), None, True)
    simple = check_simple(P, bound, cap=cap)
    return HarnessReport(True, tuple(details), simple, simple.holds)
