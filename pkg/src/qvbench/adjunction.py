"""Expansions of quasivarieties and the free-extension adjunction.

The free extension of an algebra is computed by the hom-product reflection:
the subalgebra of the product of generator copies indexed by all base-language
homomorphisms into generator reducts, generated by the element tuples.  Its
agreement with the term-algebra-quotient description is certified per instance
by the universal-property check.  Each element remembers one producing term
over the generator tuples (the generation trace), which is what the counit and
the functorial action chase through.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product as iproduct

from .core import (
    FiniteAlgebra,
    Homomorphism,
    Signature,
    SignatureError,
    enumerate_embeddings,
    enumerate_homomorphisms,
    generated_subalgebra,
    is_embedding,
    is_homomorphism,
    reduct,
    trivial_algebra,
)
from .implicit import (
    FunctionalityViolation,
    ImplicitOpSpec,
    PartialOperation,
    induced_partial_op,
)
from .quasivariety import (
    DEFAULT_MEMBER_CAP,
    DEFAULT_PRODUCT_CAP,
    GenResult,
    Quasivariety,
    generate_in_product,
    members_up_to,
    membership,
)


@dataclass(frozen=True)
class ExpansionSpec:
    """A base quasivariety together with one over a larger signature; whether
    the reduct functor actually lands in the base is a checked property, not an
    invariant."""
    base: Quasivariety
    expanded: Quasivariety

    def __post_init__(self) -> None:
        if not self.expanded.signature.includes(self.base.signature):
            raise SignatureError(
                f"signature of {self.expanded.name!r} does not include that of {self.base.name!r}"
            )


@dataclass(frozen=True)
class PpExpansionSpec:
    """A base quasivariety plus named pp operations; the derived signature adds
    one fresh symbol per operation."""
    base: Quasivariety
    ops: tuple[tuple[str, ImplicitOpSpec], ...]

    def __post_init__(self) -> None:
        base_syms = {sym for sym, _ in self.base.signature.symbols}
        seen = set()
        for sym, spec in self.ops:
            if sym in base_syms or sym in seen:
                raise SignatureError(f"operation symbol {sym!r} clashes")
            if not self.base.signature.includes(spec.signature):
                raise SignatureError(f"{spec.name!r} is not over a reduct of the base signature")
            seen.add(sym)

    @cached_property
    def expanded_signature(self) -> Signature:
        symbols = self.base.signature.symbols + tuple(
            (sym, spec.arity) for sym, spec in self.ops
        )
        suffix = ",".join(sym for sym, _ in self.ops)
        return Signature(f"{self.base.signature.name}[{suffix}]", symbols)


@dataclass(frozen=True)
class UndefinedAt:
    op_symbol: str
    args: tuple[int, ...]


@dataclass(frozen=True)
class ExpansionViolation:
    algebra: FiniteAlgebra
    certificate: object


def check_expansion(E: ExpansionSpec, bound: int, cap: int | None = None):
    """Bounded well-definedness of the reduct functor: every member of the
    expanded class up to `bound` must have its base reduct in the base class."""
    cap = cap if cap is not None else max(bound, DEFAULT_MEMBER_CAP)
    for B in members_up_to(E.expanded, bound, cap=cap):
        result = membership(reduct(B, E.base.signature), E.base)
        if not result.holds:
            return ExpansionViolation(B, result)
    return "ok"


def expand_algebra(
    A: FiniteAlgebra, P: PpExpansionSpec, check: bool = True
) -> FiniteAlgebra | UndefinedAt | FunctionalityViolation:
    """Interpret each added symbol by its induced operation; defined only when
    every one of them is total on A."""
    if check:
        result = membership(A, P.base)
        if not result.holds:
            raise ValueError(f"{A.name!r} is not a member of {P.base.name!r}")
    new_tables = []
    for sym, spec in P.ops:
        op = induced_partial_op(A, spec)
        if isinstance(op, FunctionalityViolation):
            return op
        if not op.is_total:
            for args in iproduct(range(A.size), repeat=spec.arity):
                if not op.defined_at(args):
                    return UndefinedAt(sym, args)
        table = tuple(
            op.as_dict[args] for args in iproduct(range(A.size), repeat=spec.arity)
        )
        new_tables.append(table)
    return FiniteAlgebra(
        f"{A.name}[+]", P.expanded_signature, A.size, A.tables + tuple(new_tables)
    )


@dataclass(frozen=True)
class PpMembership:
    status: str  # "in-class" | "in-closure" | "no" | "unknown-within-bound"
    witness: tuple[FiniteAlgebra, Homomorphism] | None = None
    certificate: object | None = None
    bound: int | None = None


def pp_expansion_membership(
    B: FiniteAlgebra, P: PpExpansionSpec, size_bound: int, cap: int | None = None
) -> PpMembership:
    """Classify B against the class of expanded members and its closure under
    subalgebras.  A table value disagreeing with a defined induced value is a
    definite refusal: embeddings preserve pp graphs, so no extension can
    reconcile them."""
    sig = P.expanded_signature
    if B.signature != sig:
        raise SignatureError(f"{B.name!r} is not over {sig.name!r}")
    red = reduct(B, P.base.signature)
    base_membership = membership(red, P.base)
    if not base_membership.holds:
        return PpMembership("no", certificate=base_membership)
    total = True
    for sym, spec in P.ops:
        op = induced_partial_op(red, spec)
        if isinstance(op, FunctionalityViolation):
            return PpMembership("no", certificate=op)
        for args, value in op.graph:
            if B.apply(sym, args) != value:
                return PpMembership(
                    "no",
                    certificate=("mismatch", sym, args, B.apply(sym, args), value),
                )
        if not op.is_total:
            total = False
    if total:
        return PpMembership("in-class")
    cap = cap if cap is not None else max(size_bound, DEFAULT_MEMBER_CAP)
    for D in members_up_to(P.base, size_bound, cap=cap):
        C = expand_algebra(D, P, check=False)
        if not isinstance(C, FiniteAlgebra):
            continue
        found = enumerate_embeddings(B, C, sig)
        if found:
            return PpMembership("in-closure", witness=(C, found[0]), bound=size_bound)
    return PpMembership("unknown-within-bound", bound=size_bound)


def induced_expansion(P: PpExpansionSpec) -> ExpansionSpec:
    """The expanded class generated by the expanded generators.  This presents
    the subalgebra closure of the expanded members exactly when every operation
    is total on every generator, which is required here."""
    expanded_gens = []
    for G in P.base.generators or ():
        C = expand_algebra(G, P, check=False)
        if not isinstance(C, FiniteAlgebra):
            raise ValueError(
                f"operations are not total on generator {G.name!r}; no generated presentation"
            )
        expanded_gens.append(C.renamed(f"{G.name}[+]"))
    if not expanded_gens:
        raise ValueError("induced expansions need a generated base presentation")
    M = Quasivariety(
        f"{P.base.name}[{','.join(sym for sym, _ in P.ops)}]",
        P.expanded_signature,
        generators=tuple(expanded_gens),
    )
    return ExpansionSpec(P.base, M)


@dataclass(frozen=True)
class FreeExtension:
    algebra: FiniteAlgebra     # the reflected algebra, a member of the expansion
    unit: Homomorphism         # base-language map into its reduct
    factor_count: int
    gen: GenResult

    @property
    def unit_injective(self) -> bool:
        return is_embedding(self.unit)


@lru_cache(maxsize=None)
def free_extension(
    A: FiniteAlgebra, E: ExpansionSpec, product_cap: int = DEFAULT_PRODUCT_CAP
) -> FreeExtension:
    """Reflect A into the expanded class: one product factor per pair of an
    expanded generator and a base-language homomorphism of A into its reduct;
    generate from the element tuples.  An empty index set degenerates to the
    one-element algebra with constant unit."""
    if not E.expanded.is_generated:
        raise ValueError("free extensions need a generated expanded presentation")
    if not membership(A, E.base).holds:
        raise ValueError(f"{A.name!r} is not a member of {E.base.name!r}")
    factors: list[FiniteAlgebra] = []
    homs: list[Homomorphism] = []
    for G in E.expanded.generators:
        for h in enumerate_homomorphisms(A, reduct(G, E.base.signature), E.base.signature):
            factors.append(G)
            homs.append(h)
    if not factors:
        F = trivial_algebra(E.expanded.signature, name=f"F({A.name})")
        unit = Homomorphism(A, F, E.base.signature, (0,) * A.size)
        gen = GenResult(F, ((),), (0,) * A.size, (("seed", 0),))
        return FreeExtension(F, unit, 0, gen)
    seeds = [tuple(h(a) for h in homs) for a in range(A.size)]
    gen = generate_in_product(
        factors, seeds, E.expanded.signature, product_cap, name=f"F({A.name})"
    )
    unit = Homomorphism(A, gen.algebra, E.base.signature, gen.seed_index)
    return FreeExtension(gen.algebra, unit, len(factors), gen)


def _chase_trace(fe: FreeExtension, seed_images: list[int], target: FiniteAlgebra) -> tuple[int, ...]:
    """Evaluate each element's producing term in the target, starting from the
    given images of the seed elements."""
    n = fe.algebra.size
    out: list[int | None] = [None] * n
    def value(i: int) -> int:
        if out[i] is not None:
            return out[i]
        origin = fe.gen.trace[i]
        if origin[0] == "seed":
            v = seed_images[origin[1]]
        else:
            sym = origin[0]
            v = target.apply(sym, tuple(value(j) for j in origin[1:]))
        out[i] = v
        return v
    return tuple(value(i) for i in range(n))


def counit(B: FiniteAlgebra, E: ExpansionSpec, product_cap: int = DEFAULT_PRODUCT_CAP) -> Homomorphism:
    """The evaluation map from the free extension of B's reduct back to B,
    obtained by generator chasing; it sends each unit image to its element and
    is re-verified to be the unique such homomorphism."""
    red = reduct(B, E.base.signature)
    fe = free_extension(red, E, product_cap)
    mapping = _chase_trace(fe, list(range(B.size)), B)
    eps = Homomorphism(fe.algebra, B, E.expanded.signature, mapping)
    if not is_homomorphism(eps):
        raise AssertionError("generator chasing did not produce a homomorphism")
    if any(mapping[fe.unit(b)] != b for b in range(B.size)):
        raise AssertionError("counit does not retract the unit")
    return eps


def free_extension_map(
    E: ExpansionSpec, h: Homomorphism, fe_source: FreeExtension, fe_target: FreeExtension
) -> Homomorphism:
    """Functorial action on a base homomorphism: send each producing term over
    source generators to the same term over the h-images of the generators."""
    seed_images = [fe_target.unit(h(a)) for a in range(h.source.size)]
    mapping = _chase_trace(fe_source, seed_images, fe_target.algebra)
    out = Homomorphism(fe_source.algebra, fe_target.algebra, E.expanded.signature, mapping)
    if not is_homomorphism(out):
        raise AssertionError("trace chasing did not produce a homomorphism")
    return out


@dataclass(frozen=True)
class LiftViolation:
    member: FiniteAlgebra
    base_map: Homomorphism
    kind: str  # "no-lift" | "not-generated"


def universal_property_check(
    A: FiniteAlgebra,
    E: ExpansionSpec,
    bound: int,
    free: FreeExtension | None = None,
    cap: int | None = None,
):
    """For every member B up to the bound and every base-language map
    A -> reduct(B), there must be exactly one expanded-language homomorphism
    from the free extension to B commuting with the unit.  Existence is checked
    by chasing the trace; uniqueness follows once the unit image generates the
    free extension, which is verified explicitly."""
    fe = free if free is not None else free_extension(A, E)
    generated = generated_subalgebra(fe.algebra, set(fe.unit.mapping))
    if len(generated) != fe.algebra.size:
        return LiftViolation(fe.algebra, fe.unit, "not-generated")
    cap = cap if cap is not None else max(bound, DEFAULT_MEMBER_CAP)
    for B in members_up_to(E.expanded, bound, cap=cap):
        redB = reduct(B, E.base.signature)
        for g in enumerate_homomorphisms(A, redB, E.base.signature):
            mapping = _chase_trace(fe, [g(a) for a in range(A.size)], B)
            candidate = Homomorphism(fe.algebra, B, E.expanded.signature, mapping)
            if not is_homomorphism(candidate):
                return LiftViolation(B, g, "no-lift")
            if any(mapping[fe.unit(a)] != g(a) for a in range(A.size)):
                return LiftViolation(B, g, "no-lift")
    return "ok"


@dataclass(frozen=True)
class UnitInstance:
    algebra: FiniteAlgebra
    embedding: bool
    unit: Homomorphism


def check_unit_mono(E: ExpansionSpec, bound: int, cap: int | None = None) -> list[UnitInstance]:
    """Per-member injectivity of the unit over the base class up to the bound."""
    cap = cap if cap is not None else max(bound, DEFAULT_MEMBER_CAP)
    out = []
    for A in members_up_to(E.base, bound, cap=cap):
        fe = free_extension(A, E)
        out.append(UnitInstance(A, fe.unit_injective, fe.unit))
    return out


@dataclass(frozen=True)
class CounitInstance:
    algebra: FiniteAlgebra
    bijective: bool
    counit: Homomorphism


def check_counit_iso(E: ExpansionSpec, bound: int, cap: int | None = None) -> list[CounitInstance]:
    """Per-member bijectivity of the counit over the expanded class up to the
    bound (the counit is always surjective here, so bijective = injective)."""
    cap = cap if cap is not None else max(bound, DEFAULT_MEMBER_CAP)
    out = []
    for B in members_up_to(E.expanded, bound, cap=cap):
        eps = counit(B, E)
        bij = eps.source.size == B.size and len(set(eps.mapping)) == B.size
        out.append(CounitInstance(B, bij, eps))
    return out
