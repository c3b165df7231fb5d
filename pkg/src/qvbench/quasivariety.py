"""Quasivariety presentations and the operations parameterized by them:
membership, relative congruence generation, free algebras, bounded member
enumeration, and bounded amalgamation.

Generated presentations are used with finite-scale semantics throughout:
membership in the generated class is decided as membership in ISP of the
generators, which is exact for finite algebras over finitely many finite
generators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct

from .core import (
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    IsoRegistry,
    Signature,
    SignatureError,
    all_subuniverses,
    congruence_closure,
    direct_product,
    enumerate_embeddings,
    enumerate_homomorphisms,
    is_embedding,
    quotient,
    subalgebra,
    trivial_algebra,
)
from .logic import Quasiequation, check_quasiequation, eval_term, term_variables

DEFAULT_MEMBER_CAP = 4
DEFAULT_PRODUCT_CAP = 10**6


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class NotFoundWithinBound:
    """Bound-relative negative: the search space up to `bound` was exhausted;
    never a global claim."""
    bound: int


@dataclass(frozen=True)
class Quasivariety:
    name: str = field(compare=False)
    signature: Signature = Signature("empty")
    generators: tuple[FiniteAlgebra, ...] | None = None
    axioms: tuple[Quasiequation, ...] | None = None

    def __post_init__(self) -> None:
        if (self.generators is None) == (self.axioms is None):
            raise ValueError("exactly one of generators/axioms must be given")
        if self.generators is not None:
            if not self.generators:
                raise ValueError("a generated presentation needs at least one generator")
            for g in self.generators:
                if g.signature != self.signature:
                    raise SignatureError(f"generator {g.name!r} is not over {self.signature.name!r}")

    @property
    def is_generated(self) -> bool:
        return self.generators is not None


@dataclass(frozen=True)
class MembershipResult:
    holds: bool
    # Generated presentations: a jointly injective separating family on
    # success, an inseparable pair on failure.
    separating: tuple[Homomorphism, ...] | None = None
    inseparable: tuple[int, int] | None = None
    # Axiomatic presentations: the first failing quasiequation with its
    # lexicographically least violating assignment.
    failed_axiom: Quasiequation | None = None
    assignment: tuple[tuple[str, int], ...] | None = None


def membership(A: FiniteAlgebra, K: Quasivariety) -> MembershipResult:
    """Decide membership of A in K with a replayable certificate."""
    if A.signature != K.signature:
        raise SignatureError(f"{A.name!r} is not over {K.signature.name!r}")
    if K.axioms is not None:
        for q in K.axioms:
            ok, cex = check_quasiequation(A, q)
            if not ok:
                return MembershipResult(
                    False, failed_axiom=q, assignment=tuple(sorted(cex.items()))
                )
        return MembershipResult(True)
    homs = [h for G in K.generators for h in enumerate_homomorphisms(A, G, K.signature)]
    chosen: list[Homomorphism] = []
    for a in range(A.size):
        for b in range(a + 1, A.size):
            for h in homs:
                if h(a) != h(b):
                    if h not in chosen:
                        chosen.append(h)
                    break
            else:
                return MembershipResult(False, inseparable=(a, b))
    return MembershipResult(True, separating=tuple(chosen))


def relative_congruence(A: FiniteAlgebra, pairs, K: Quasivariety) -> Congruence:
    """Least congruence theta containing `pairs` with A/theta in K.

    Axiomatic route: close the pairs, then while the quotient falsifies some
    axiom (first axiom in list order, least violating assignment) merge the
    offending conclusion values and re-close.  Generated route: intersect the
    kernels of all homomorphisms into generators whose kernel contains the
    pairs; the empty intersection is the total congruence.
    """
    pairs = list(pairs)
    if K.axioms is not None:
        collected = list(pairs)
        theta = congruence_closure(A, collected)
        while True:
            Q, proj = quotient(A, theta)
            for q in K.axioms:
                ok, cex = check_quasiequation(Q, q)
                if not ok:
                    c = eval_term(Q, q.conclusion.left, cex)
                    d = eval_term(Q, q.conclusion.right, cex)
                    rep_c = min(a for a in range(A.size) if proj(a) == c)
                    rep_d = min(a for a in range(A.size) if proj(a) == d)
                    collected.append((rep_c, rep_d))
                    theta = congruence_closure(A, collected)
                    break
            else:
                return theta
    selected = []
    for G in K.generators:
        for h in enumerate_homomorphisms(A, G, K.signature):
            if all(h(a) == h(b) for a, b in pairs):
                selected.append(h)
    if not selected:
        return Congruence.total(A)
    labels = [tuple(h(a) for h in selected) for a in range(A.size)]
    return Congruence.from_labels(A, labels)


@dataclass(frozen=True)
class GenResult:
    """A subalgebra of a product, generated from seed tuples, together with the
    data needed to chase elements back to their producing terms."""
    algebra: FiniteAlgebra
    elements: tuple[tuple[int, ...], ...]  # product tuples, in universe order
    seed_index: tuple[int, ...]            # universe index of each seed tuple
    # trace[i] is ("seed", j) or (symbol, arg universe indices)
    trace: tuple[tuple, ...]


def generate_in_product(
    factors: list[FiniteAlgebra],
    seeds: list[tuple[int, ...]],
    signature: Signature,
    product_cap: int = DEFAULT_PRODUCT_CAP,
    name: str = "gen",
) -> GenResult:
    """Close seed tuples under the componentwise operations of the factors,
    without materializing the full product.  The resulting universe is the set
    of reached tuples in lexicographic order."""
    potential = math.prod(f.size for f in factors) if factors else 1
    if potential > product_cap:
        raise CapExceeded(f"product of size {potential} exceeds cap {product_cap}")

    def apply(sym: str, args: list[tuple[int, ...]]) -> tuple[int, ...]:
        return tuple(
            f.apply(sym, tuple(a[i] for a in args)) for i, f in enumerate(factors)
        )

    reached: dict[tuple[int, ...], tuple] = {}
    queue: list[tuple[int, ...]] = []

    def add(t: tuple[int, ...], origin: tuple) -> None:
        if t not in reached:
            reached[t] = origin
            queue.append(t)

    for sym, k in signature.symbols:
        if k == 0:
            add(apply(sym, []), (sym,))
    for j, s in enumerate(seeds):
        add(s, ("seed", j))
    pos_ops = [(sym, k) for sym, k in signature.symbols if k > 0]
    done: list[tuple[int, ...]] = []
    while queue:
        x = queue.pop()
        for sym, k in pos_ops:
            pool = done + [x]
            for i in range(k):
                for rest in iproduct(pool, repeat=k - 1):
                    args = rest[:i] + (x,) + rest[i:]
                    add(apply(sym, list(args)), (sym,) + args)
        done.append(x)

    elements = sorted(reached)
    index = {t: i for i, t in enumerate(elements)}
    tables = []
    for sym, k in signature.symbols:
        table = []
        for args in iproduct(elements, repeat=k):
            table.append(index[apply(sym, list(args))])
        tables.append(tuple(table))
    algebra = FiniteAlgebra(name, signature, len(elements), tuple(tables))
    trace = []
    for t in elements:
        origin = reached[t]
        if origin[0] == "seed":
            trace.append(origin)
        else:
            trace.append((origin[0],) + tuple(index[a] for a in origin[1:]))
    seed_index = tuple(index[s] for s in seeds)
    return GenResult(algebra, tuple(elements), seed_index, tuple(trace))


def free_algebra(
    K: Quasivariety,
    names,
    product_cap: int = DEFAULT_PRODUCT_CAP,
) -> tuple[FiniteAlgebra, dict[str, int]]:
    """Free algebra of K on the given generator names, computed as the
    subalgebra of the product over all name assignments into generators,
    generated by the coordinate tuples of the names."""
    if not K.is_generated:
        raise ValueError("free algebras are only computed for generated presentations")
    names = list(names)
    if not names:
        raise ValueError("free algebras are taken over nonempty generator sets")
    if len(set(names)) != len(names):
        raise ValueError("generator names must be distinct")
    factors: list[FiniteAlgebra] = []
    columns: list[tuple[int, ...]] = []
    for G in K.generators:
        for assignment in iproduct(range(G.size), repeat=len(names)):
            factors.append(G)
            columns.append(assignment)
    seeds = [tuple(col[j] for col in columns) for j in range(len(names))]
    gen = generate_in_product(
        factors, seeds, K.signature, product_cap, name=f"T_{K.name}({len(names)})"
    )
    return gen.algebra, {nm: gen.seed_index[j] for j, nm in enumerate(names)}


# ---------------------------------------------------------------------------
# Member enumeration


def _partial_eval(tables, signature, size, t, env):
    """Term evaluation over partially filled tables; None when an entry is
    still unassigned."""
    from .logic import App, Var

    if isinstance(t, Var):
        return env[t.name]
    idx = 0
    args = []
    for child in t.args:
        v = _partial_eval(tables, signature, size, child, env)
        if v is None:
            return None
        args.append(v)
    sym_i = [s for s, _ in signature.symbols].index(t.symbol)
    flat = 0
    for a in args:
        flat = flat * size + a
    return tables[sym_i][flat]


def _axiomatic_models(signature: Signature, axioms, size: int) -> list[FiniteAlgebra]:
    """All size-`size` models of the axioms, by cell-wise backtracking with
    quasiequation propagation on the partially filled tables."""
    cells: list[tuple[int, int]] = []
    for i, (sym, k) in enumerate(signature.symbols):
        for flat in range(size**k):
            cells.append((i, flat))
    tables = [[None] * (size**k) for _, k in signature.symbols]

    axiom_vars = [
        sorted(
            set().union(
                *(term_variables(p.left) | term_variables(p.right) for p in q.premises),
                term_variables(q.conclusion.left) | term_variables(q.conclusion.right),
            )
        )
        for q in axioms
    ]

    def violated() -> bool:
        # A ground instance refutes the candidate only when every premise is
        # fully evaluable and true while the conclusion evaluates to a
        # disequality; unassigned cells leave the instance undecided.
        for q, names in zip(axioms, axiom_vars):
            for values in iproduct(range(size), repeat=len(names)):
                env = dict(zip(names, values))
                decided = True
                for p in q.premises:
                    lv = _partial_eval(tables, signature, size, p.left, env)
                    rv = _partial_eval(tables, signature, size, p.right, env)
                    if lv is None or rv is None or lv != rv:
                        decided = False
                        break
                if not decided:
                    continue
                lv = _partial_eval(tables, signature, size, q.conclusion.left, env)
                rv = _partial_eval(tables, signature, size, q.conclusion.right, env)
                if lv is not None and rv is not None and lv != rv:
                    return True
        return False

    found: list[FiniteAlgebra] = []

    def rec(ci: int) -> None:
        if ci == len(cells):
            found.append(
                FiniteAlgebra(
                    f"model{size}", signature, size, tuple(tuple(t) for t in tables)
                )
            )
            return
        sym_i, flat = cells[ci]
        for v in range(size):
            tables[sym_i][flat] = v
            if not violated():
                rec(ci + 1)
            tables[sym_i][flat] = None

    rec(0)
    return found


@lru_cache(maxsize=None)
def _member_classes(K: Quasivariety, max_size: int) -> tuple[FiniteAlgebra, ...]:
    """All members of K of size <= max_size, up to isomorphism, sorted by
    (size, tables)."""
    registry = IsoRegistry()
    if K.is_generated:
        # Every finite member of ISP(gens) of size <= N is a subalgebra of
        # C x G for some already-found member C (its projection) and some
        # generator G, so closing under that step from the trivial algebra is
        # complete at every bound.
        worklist = [registry.add(trivial_algebra(K.signature))[0]]
        while worklist:
            C = worklist.pop(0)
            for G in K.generators:
                P = direct_product([C, G])
                for sub in all_subuniverses(P, max_size=max_size):
                    S, _ = subalgebra(P, sub)
                    rep, added = registry.add(S)
                    if added:
                        worklist.append(rep)
    else:
        for size in range(1, max_size + 1):
            for model in _axiomatic_models(K.signature, K.axioms, size):
                registry.add(model)
    members = sorted(registry.members, key=lambda A: (A.size, A.tables))
    return tuple(
        A.renamed(f"{K.name}/n{A.size}#{i}")
        for i, A in enumerate(members)
    )


def members_up_to(K: Quasivariety, max_size: int, cap: int = DEFAULT_MEMBER_CAP) -> list[FiniteAlgebra]:
    if max_size > cap:
        raise CapExceeded(f"member bound {max_size} exceeds cap {cap}")
    return list(_member_classes(K, max_size))


def enumerate_members(K: Quasivariety, n: int, cap: int = DEFAULT_MEMBER_CAP) -> list[FiniteAlgebra]:
    """All size-n members of K up to isomorphism, deterministically ordered."""
    if n > cap:
        raise CapExceeded(f"member bound {n} exceeds cap {cap}")
    return [A for A in _member_classes(K, n) if A.size == n]


@dataclass(frozen=True)
class Amalgam:
    apex: FiniteAlgebra
    left_leg: Homomorphism
    right_leg: Homomorphism


def bounded_amalgamation(
    A: FiniteAlgebra,
    B: FiniteAlgebra,
    C: FiniteAlgebra,
    f: Homomorphism,
    g: Homomorphism,
    K: Quasivariety,
    size_bound: int,
    cap: int = DEFAULT_MEMBER_CAP,
) -> Amalgam | NotFoundWithinBound:
    """Search for D in K (|D| <= size_bound) with embeddings completing the
    span; the negative answer is bound-relative only."""
    if not (is_embedding(f) and is_embedding(g)):
        raise ValueError("both legs of the span must be embeddings")
    if f.source != A or g.source != A or f.target != B or g.target != C:
        raise ValueError("span legs do not match the given algebras")
    for D in members_up_to(K, size_bound, cap=cap):
        if D.size < max(B.size, C.size):
            continue
        for f2 in enumerate_embeddings(B, D, K.signature):
            pinned = {g(a): f2(f(a)) for a in range(A.size)}
            found = enumerate_embeddings(C, D, K.signature, pinned=pinned)
            if found:
                return Amalgam(D, f2, found[0])
    return NotFoundWithinBound(size_bound)
