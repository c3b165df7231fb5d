"""Finite algebras with total operation tables and the basic constructions on them.

Universes are always 0..n-1.  Product elements are encoded lexicographically
with the last factor varying fastest, so every construction here is
bit-reproducible.  All types are immutable after construction and every
operation is a pure function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import product as iproduct


class SignatureError(ValueError):
    """Symbols, arities, or signature inclusions do not line up."""


@dataclass(frozen=True)
class Signature:
    name: str = field(compare=False)
    symbols: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for sym, arity in self.symbols:
            if sym in seen:
                raise SignatureError(f"duplicate symbol {sym!r} in signature {self.name!r}")
            if arity < 0:
                raise SignatureError(f"symbol {sym!r} has negative arity")
            seen.add(sym)

    @cached_property
    def arities(self) -> dict[str, int]:
        return dict(self.symbols)

    def arity(self, sym: str) -> int:
        try:
            return self.arities[sym]
        except KeyError:
            raise SignatureError(f"unknown symbol {sym!r} in signature {self.name!r}") from None

    def includes(self, other: Signature) -> bool:
        """True when every symbol of `other` occurs here with the same arity."""
        return all(self.arities.get(sym) == k for sym, k in other.symbols)


@dataclass(frozen=True)
class FiniteAlgebra:
    name: str = field(compare=False)
    signature: Signature = Signature("empty")
    size: int = 1
    # tables[i] is the flat table for signature.symbols[i], row-major with the
    # last argument varying fastest; a nullary table is a 1-tuple.
    tables: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("algebras must have at least one element")
        if len(self.tables) != len(self.signature.symbols):
            raise SignatureError(
                f"{self.name!r}: expected {len(self.signature.symbols)} tables, got {len(self.tables)}"
            )
        for (sym, k), table in zip(self.signature.symbols, self.tables):
            if len(table) != self.size**k:
                raise SignatureError(f"{self.name!r}: table for {sym}/{k} has wrong length")
            if any(not (0 <= v < self.size) for v in table):
                raise ValueError(f"{self.name!r}: table for {sym} has out-of-universe entries")

    @cached_property
    def _ops(self) -> dict[str, tuple[int, tuple[int, ...]]]:
        return {
            sym: (k, self.tables[i])
            for i, (sym, k) in enumerate(self.signature.symbols)
        }

    def apply(self, sym: str, args: tuple[int, ...]) -> int:
        try:
            k, table = self._ops[sym]
        except KeyError:
            raise SignatureError(f"unknown symbol {sym!r} on algebra {self.name!r}") from None
        if len(args) != k:
            raise SignatureError(f"{sym}/{k} applied to {len(args)} arguments")
        i = 0
        for a in args:
            i = i * self.size + a
        return table[i]

    def constants(self) -> list[int]:
        return [self.apply(sym, ()) for sym, k in self.signature.symbols if k == 0]

    def renamed(self, name: str) -> FiniteAlgebra:
        return replace(self, name=name)


def build_algebra(name: str, signature: Signature, size: int, ops: dict) -> FiniteAlgebra:
    """Build an algebra from per-symbol specs: an int (nullary), a callable on
    argument tuples, or a nested row-major list (last argument innermost)."""
    tables = []
    for sym, k in signature.symbols:
        if sym not in ops:
            raise SignatureError(f"missing table for {sym!r}")
        spec = ops[sym]
        if callable(spec):
            table = tuple(spec(*args) for args in iproduct(range(size), repeat=k))
        elif isinstance(spec, int):
            if k != 0:
                raise SignatureError(f"bare element given for non-nullary {sym!r}")
            table = (spec,)
        else:
            table = tuple(_flatten_table(spec, k, size, sym))
        tables.append(table)
    extra = set(ops) - {sym for sym, _ in signature.symbols}
    if extra:
        raise SignatureError(f"tables for symbols not in signature: {sorted(extra)}")
    return FiniteAlgebra(name, signature, size, tuple(tables))


def _flatten_table(nested, k: int, size: int, sym: str) -> list[int]:
    if k == 0:
        if isinstance(nested, list):
            (v,) = nested
            return [v]
        return [nested]
    if not isinstance(nested, (list, tuple)) or len(nested) != size:
        raise SignatureError(f"table for {sym!r} is not {size}-deep at level {k}")
    out: list[int] = []
    for row in nested:
        if k == 1:
            out.append(row)
        else:
            out.extend(_flatten_table(row, k - 1, size, sym))
    return out


def trivial_algebra(signature: Signature, name: str = "triv") -> FiniteAlgebra:
    tables = tuple((0,) * (1**k) for _, k in signature.symbols)
    return FiniteAlgebra(name, signature, 1, tables)


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    language: Signature
    mapping: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def apply_tuple(self, args: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(self.mapping[a] for a in args)


def is_homomorphism(h: Homomorphism) -> bool:
    """Exhaustive preservation check of h over its language."""
    if len(h.mapping) != h.source.size:
        return False
    if any(not (0 <= v < h.target.size) for v in h.mapping):
        return False
    for sym, k in h.language.symbols:
        for args in iproduct(range(h.source.size), repeat=k):
            if h.mapping[h.source.apply(sym, args)] != h.target.apply(sym, h.apply_tuple(args)):
                return False
    return True


def is_embedding(h: Homomorphism) -> bool:
    return len(set(h.mapping)) == len(h.mapping)


def identity_homomorphism(A: FiniteAlgebra, language: Signature | None = None) -> Homomorphism:
    return Homomorphism(A, A, language or A.signature, tuple(range(A.size)))


def compose(g: Homomorphism, f: Homomorphism) -> Homomorphism:
    """g after f; languages must agree."""
    if g.language != f.language:
        raise SignatureError("composing homomorphisms over different languages")
    return Homomorphism(f.source, g.target, f.language, tuple(g.mapping[v] for v in f.mapping))


def _hom_search(
    A: FiniteAlgebra,
    B: FiniteAlgebra,
    language: Signature,
    injective: bool = False,
    pinned: dict[int, int] | None = None,
    limit: int | None = None,
) -> list[tuple[int, ...]]:
    """Backtracking search for language-homomorphisms A -> B, in lexicographic
    order of the map arrays.  Nullary symbols pin values before the search."""
    n, m = A.size, B.size
    mapping = [-1] * n
    for sym, k in language.symbols:
        if k == 0:
            a, b = A.apply(sym, ()), B.apply(sym, ())
            if mapping[a] not in (-1, b):
                return []
            mapping[a] = b
    for a, b in (pinned or {}).items():
        if mapping[a] not in (-1, b):
            return []
        mapping[a] = b
    if injective:
        fixed = [v for v in mapping if v != -1]
        if len(set(fixed)) != len(fixed):
            return []

    # For each position p, the op instances that mention p (as argument or
    # result); an instance is checked as soon as its last position is assigned.
    by_pos: list[list[tuple[str, tuple[int, ...], int]]] = [[] for _ in range(n)]
    for sym, k in language.symbols:
        if k == 0:
            continue
        for args in iproduct(range(n), repeat=k):
            res = A.apply(sym, args)
            for p in set(args) | {res}:
                by_pos[p].append((sym, args, res))

    used = set(v for v in mapping if v != -1)
    results: list[tuple[int, ...]] = []

    def consistent(p: int) -> bool:
        for sym, args, res in by_pos[p]:
            vr = mapping[res]
            if vr == -1:
                continue
            imgs = []
            for a in args:
                v = mapping[a]
                if v == -1:
                    break
                imgs.append(v)
            else:
                if B.apply(sym, tuple(imgs)) != vr:
                    return False
        return True

    # Pre-assigned positions participate in the same depth-first sweep so the
    # emitted order stays lexicographic.  Returns True once the limit is hit.
    def rec(p: int) -> bool:
        if p == n:
            results.append(tuple(mapping))
            return limit is not None and len(results) >= limit
        if mapping[p] != -1:
            if not consistent(p):
                return False
            return rec(p + 1)
        for v in range(m):
            if injective and v in used:
                continue
            mapping[p] = v
            used.add(v)
            done = consistent(p) and rec(p + 1)
            mapping[p] = -1
            used.discard(v)
            if done:
                return True
        return False

    rec(0)
    return results


def enumerate_homomorphisms(A: FiniteAlgebra, B: FiniteAlgebra, language: Signature) -> list[Homomorphism]:
    """All language-homomorphisms A -> B, duplicate-free, in lexicographic
    order of the map arrays."""
    if not A.signature.includes(language) or not B.signature.includes(language):
        raise SignatureError("language is not a reduct of both signatures")
    return [Homomorphism(A, B, language, m) for m in _hom_search(A, B, language)]


def enumerate_embeddings(
    A: FiniteAlgebra,
    B: FiniteAlgebra,
    language: Signature,
    pinned: dict[int, int] | None = None,
) -> list[Homomorphism]:
    if not A.signature.includes(language) or not B.signature.includes(language):
        raise SignatureError("language is not a reduct of both signatures")
    return [
        Homomorphism(A, B, language, m)
        for m in _hom_search(A, B, language, injective=True, pinned=pinned)
    ]


def direct_product(factors: list[FiniteAlgebra], name: str | None = None) -> FiniteAlgebra:
    """Componentwise product; element (a_0,..,a_k) is encoded lexicographically
    with the last factor fastest."""
    if not factors:
        raise ValueError("direct_product needs at least one factor")
    sig = factors[0].signature
    for f in factors[1:]:
        if f.signature != sig:
            raise SignatureError("product factors must share a signature")
    sizes = [f.size for f in factors]
    total = math.prod(sizes)
    tables = []
    for idx, (sym, k) in enumerate(sig.symbols):
        table = []
        for args in iproduct(range(total), repeat=k):
            decoded = [decode_product_element(sizes, a) for a in args]
            value = tuple(
                f.apply(sym, tuple(d[i] for d in decoded)) for i, f in enumerate(factors)
            )
            table.append(encode_product_element(sizes, value))
        tables.append(tuple(table))
    name = name or "x".join(f.name for f in factors)
    return FiniteAlgebra(name, sig, total, tuple(tables))


def encode_product_element(sizes: list[int], coords: tuple[int, ...]) -> int:
    e = 0
    for n, c in zip(sizes, coords):
        e = e * n + c
    return e


def decode_product_element(sizes: list[int], e: int) -> tuple[int, ...]:
    coords = []
    for n in reversed(sizes):
        coords.append(e % n)
        e //= n
    return tuple(reversed(coords))


def product_projection(product: FiniteAlgebra, factors: list[FiniteAlgebra], i: int) -> Homomorphism:
    sizes = [f.size for f in factors]
    mapping = tuple(decode_product_element(sizes, e)[i] for e in range(product.size))
    return Homomorphism(product, factors[i], product.signature, mapping)


def reduct(A: FiniteAlgebra, language: Signature) -> FiniteAlgebra:
    """Same universe, tables restricted to the given language."""
    if not A.signature.includes(language):
        raise SignatureError(f"{language.name!r} is not a reduct of {A.signature.name!r}")
    tables = tuple(A._ops[sym][1] for sym, _ in language.symbols)
    return FiniteAlgebra(A.name, language, A.size, tables)


def _closure_run(A: FiniteAlgebra, done: list[int], queue: list[int], members: set[int]) -> set[int]:
    """Work loop shared by closure and closure_extend: combine each queued
    element with everything already processed.  Only tuples that mention the
    new element are generated, and table lookups are inlined."""
    n = A.size
    pos_ops = [
        (k, table)
        for (sym, k), table in zip(A.signature.symbols, A.tables)
        if k > 0
    ]
    while queue:
        x = queue.pop()
        for k, table in pos_ops:
            pool = done + [x]
            for i in range(k):
                for rest in iproduct(pool, repeat=k - 1):
                    flat = 0
                    for a in rest[:i] + (x,) + rest[i:]:
                        flat = flat * n + a
                    v = table[flat]
                    if v not in members:
                        members.add(v)
                        queue.append(v)
        done.append(x)
    return members


def closure(A: FiniteAlgebra, seed) -> set[int]:
    """Least subset of the universe containing `seed` and all constants, closed
    under all operations."""
    members: set[int] = set()
    for x in seed:
        if not (0 <= x < A.size):
            raise ValueError(f"seed element {x} outside universe")
        members.add(x)
    members.update(A.constants())
    return _closure_run(A, [], sorted(members), set(members))


def closure_extend(A: FiniteAlgebra, closed, x: int) -> set[int]:
    """Closure of closed | {x} where `closed` is already a closed set (or
    empty); skips recombining the old elements with each other."""
    members = set(closed)
    if x in members:
        return members
    members.add(x)
    return _closure_run(A, sorted(closed), [x], members)


def generated_subalgebra(A: FiniteAlgebra, seed) -> frozenset[int]:
    """Subuniverse generated by `seed` (fixpoint iteration); monotone in seed
    and idempotent."""
    return frozenset(closure(A, seed))


def subalgebra(A: FiniteAlgebra, subset, name: str | None = None) -> tuple[FiniteAlgebra, Homomorphism]:
    """The algebra on a closed subset (re-indexed by its sorted order) together
    with the inclusion embedding."""
    elems = sorted(set(subset))
    index = {e: i for i, e in enumerate(elems)}
    tables = []
    for sym, k in A.signature.symbols:
        table = []
        for args in iproduct(elems, repeat=k):
            v = A.apply(sym, args)
            if v not in index:
                raise ValueError(f"subset not closed under {sym} at {args}")
            table.append(index[v])
        tables.append(tuple(table))
    S = FiniteAlgebra(name or f"{A.name}|{len(elems)}", A.signature, len(elems), tuple(tables))
    return S, Homomorphism(S, A, A.signature, tuple(elems))


def all_subuniverses(A: FiniteAlgebra, max_size: int | None = None) -> list[frozenset[int]]:
    """All nonempty subuniverses of size <= max_size, found by closing single-
    element extensions of already-closed sets; sorted by (size, elements)."""
    base = frozenset(closure(A, ()))
    seen = {base}
    queue = [base]
    while queue:
        S = queue.pop(0)
        for x in range(A.size):
            if x in S:
                continue
            T = frozenset(closure_extend(A, S, x))
            if max_size is not None and len(T) > max_size:
                continue
            if T not in seen:
                seen.add(T)
                queue.append(T)
    out = [S for S in seen if S and (max_size is None or len(S) <= max_size)]
    return sorted(out, key=lambda S: (len(S), sorted(S)))


@dataclass(frozen=True)
class Congruence:
    """Partition given by its canonical block-index array: partition[i] is the
    least element of i's block."""
    algebra: FiniteAlgebra
    partition: tuple[int, ...]

    @classmethod
    def from_labels(cls, A: FiniteAlgebra, labels) -> Congruence:
        least: dict[int, int] = {}
        for i, lab in enumerate(labels):
            least.setdefault(lab, i)
        return cls(A, tuple(least[lab] for lab in labels))

    @classmethod
    def identity(cls, A: FiniteAlgebra) -> Congruence:
        return cls(A, tuple(range(A.size)))

    @classmethod
    def total(cls, A: FiniteAlgebra) -> Congruence:
        return cls(A, (0,) * A.size)

    def related(self, a: int, b: int) -> bool:
        return self.partition[a] == self.partition[b]

    def blocks(self) -> list[list[int]]:
        by_rep: dict[int, list[int]] = {}
        for i, rep in enumerate(self.partition):
            by_rep.setdefault(rep, []).append(i)
        return [by_rep[r] for r in sorted(by_rep)]

    def finer_or_equal(self, other: Congruence) -> bool:
        return all(
            other.related(i, j)
            for i in range(len(self.partition))
            for j in range(len(self.partition))
            if self.related(i, j)
        )


def is_congruence(A: FiniteAlgebra, partition: tuple[int, ...]) -> bool:
    """Compatibility check: related argument tuples give related values."""
    for sym, k in A.signature.symbols:
        if k == 0:
            continue
        buckets: dict[tuple[int, ...], int] = {}
        for args in iproduct(range(A.size), repeat=k):
            key = tuple(partition[a] for a in args)
            v = A.apply(sym, args)
            if key in buckets:
                if partition[buckets[key]] != partition[v]:
                    return False
            else:
                buckets[key] = v
    return True


def congruence_closure(A: FiniteAlgebra, pairs) -> Congruence:
    """Least congruence containing the given pairs: union-find plus
    compatibility re-propagation until fixpoint."""
    parent = list(range(A.size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = ra
        return True

    for a, b in pairs:
        union(a, b)
    changed = True
    while changed:
        changed = False
        for sym, k in A.signature.symbols:
            if k == 0:
                continue
            buckets: dict[tuple[int, ...], int] = {}
            for args in iproduct(range(A.size), repeat=k):
                key = tuple(find(a) for a in args)
                v = A.apply(sym, args)
                if key in buckets:
                    if union(v, buckets[key]):
                        changed = True
                else:
                    buckets[key] = v
    return Congruence.from_labels(A, [find(i) for i in range(A.size)])


def quotient(A: FiniteAlgebra, theta: Congruence) -> tuple[FiniteAlgebra, Homomorphism]:
    """Block algebra plus canonical projection; blocks are numbered in order of
    least representatives."""
    if theta.algebra != A:
        raise ValueError("congruence does not belong to this algebra")
    reps = sorted(set(theta.partition))
    index = {r: i for i, r in enumerate(reps)}
    proj = tuple(index[theta.partition[a]] for a in range(A.size))
    tables = []
    for sym, k in A.signature.symbols:
        table = []
        for args in iproduct(reps, repeat=k):
            table.append(proj[A.apply(sym, args)])
        tables.append(tuple(table))
    Q = FiniteAlgebra(f"{A.name}/~", A.signature, len(reps), tuple(tables))
    return Q, Homomorphism(A, Q, A.signature, proj)


def kernel(h: Homomorphism) -> Congruence:
    return Congruence.from_labels(h.source, h.mapping)


def _permuted_tables(A: FiniteAlgebra, perm: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    n = A.size
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    tables = []
    for (sym, k), table in zip(A.signature.symbols, A.tables):
        out = []
        for args in iproduct(range(n), repeat=k):
            flat = 0
            for a in args:
                flat = flat * n + inv[a]
            out.append(perm[table[flat]])
        tables.append(tuple(out))
    return tuple(tables)


def permuted(A: FiniteAlgebra, perm: tuple[int, ...]) -> FiniteAlgebra:
    """The isomorphic copy along perm (perm[old] = new)."""
    return FiniteAlgebra(A.name, A.signature, A.size, _permuted_tables(A, perm))


# Above this size, lex-min canonization over all permutations is replaced by
# fingerprint bucketing plus backtracking isomorphism rejection.
CANONIZE_LIMIT = 4

from itertools import permutations as _permutations


def canonical_tables(A: FiniteAlgebra) -> tuple[tuple[int, ...], ...]:
    """Lexicographically least table tuple over all permuted copies."""
    best = None
    for perm in _permutations(range(A.size)):
        t = _permuted_tables(A, perm)
        if best is None or t < best:
            best = t
    return best


def fingerprint(A: FiniteAlgebra):
    """Cheap isomorphism invariant used to bucket candidates before the
    backtracking check."""
    per_symbol = []
    profiles = [[] for _ in range(A.size)]
    for (sym, k), table in zip(A.signature.symbols, A.tables):
        counts = [0] * A.size
        for v in table:
            counts[v] += 1
        per_symbol.append(tuple(sorted(counts)))
        for e in range(A.size):
            diag = A.apply(sym, (e,) * k)
            profiles[e].append((counts[e], diag == e))
    return (A.size, tuple(per_symbol), tuple(sorted(tuple(p) for p in profiles)))


def find_isomorphism(A: FiniteAlgebra, B: FiniteAlgebra) -> tuple[int, ...] | None:
    if A.signature != B.signature or A.size != B.size:
        return None
    maps = _hom_search(A, B, A.signature, injective=True, limit=1)
    return maps[0] if maps else None


def are_isomorphic(A: FiniteAlgebra, B: FiniteAlgebra) -> bool:
    if A.size != B.size or A.signature != B.signature:
        return False
    if fingerprint(A) != fingerprint(B):
        return False
    return find_isomorphism(A, B) is not None


class IsoRegistry:
    """Deduplicates algebras up to isomorphism.  At size <= CANONIZE_LIMIT a
    candidate is kept iff no lexicographically smaller permuted copy was kept
    before (canonical forms); above that, fingerprint buckets plus
    backtracking."""

    def __init__(self) -> None:
        self._canonical: dict = {}
        self._buckets: dict = {}
        self.members: list[FiniteAlgebra] = []

    def add(self, A: FiniteAlgebra) -> tuple[FiniteAlgebra, bool]:
        if A.size <= CANONIZE_LIMIT:
            key = (A.size, canonical_tables(A))
            if key in self._canonical:
                return self._canonical[key], False
            rep = FiniteAlgebra(A.name, A.signature, A.size, key[1])
            self._canonical[key] = rep
            self.members.append(rep)
            return rep, True
        key = fingerprint(A)
        for rep in self._buckets.get(key, []):
            if find_isomorphism(A, rep) is not None:
                return rep, False
        self._buckets.setdefault(key, []).append(A)
        self.members.append(A)
        return A, True
