"""Homomorphism search and classification into the four-kind hierarchy.

Kind chain: Hom < Embedding < Immersion < StrongImmersion.  Immersion is
decided exactly by the retraction criterion (valid over finite targets);
strong immersion is a bounded decision over h-inductive sentences whose
premises are pointed diagrams of target subsets of size <= k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import BudgetExceeded, SignatureError, StructureError
from .structures import FiniteStructure


class MorphismKind(IntEnum):
    HOM = 0
    EMBEDDING = 1
    IMMERSION = 2
    STRONG_IMMERSION = 3

    @classmethod
    def from_letter(cls, letter: str) -> "MorphismKind":
        table = {"h": cls.HOM, "e": cls.EMBEDDING, "i": cls.IMMERSION, "s": cls.STRONG_IMMERSION}
        if letter not in table:
            raise ValueError(f"unknown morphism kind letter {letter!r}")
        return table[letter]

    @property
    def letter(self) -> str:
        return "heis"[int(self)]


@dataclass(frozen=True, eq=False)
class Morphism:
    source: FiniteStructure
    target: FiniteStructure
    map: Mapping[str, str]
    certificate: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.source.signature != self.target.signature:
            raise SignatureError("morphism endpoints have different signatures")
        tgt = set(self.target.universe)
        for e in self.source.universe:
            if e not in self.map:
                raise StructureError(f"map not total at {e}")
            if self.map[e] not in tgt:
                raise StructureError(f"map sends {e} outside the target universe")

    def __call__(self, e: str) -> str:
        return self.map[e]

    def apply(self, tup: Sequence[str]) -> Tuple[str, ...]:
        return tuple(self.map[e] for e in tup)

    def map_key(self) -> Tuple[Tuple[str, str], ...]:
        return tuple((e, self.map[e]) for e in self.source.universe)

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.map_key() == other.map_key()
        )

    def __hash__(self):
        return hash((self.source, self.target, self.map_key()))

    def is_injective(self) -> bool:
        vals = [self.map[e] for e in self.source.universe]
        return len(set(vals)) == len(vals)

    def compose(self, other: "Morphism") -> "Morphism":
        """self after other: (self . other)(x) = self(other(x))."""
        if other.target != self.source:
            raise StructureError("composition endpoints do not match")
        return Morphism(other.source, self.target, {e: self.map[other.map[e]] for e in other.source.universe})


def identity(s: FiniteStructure) -> Morphism:
    return Morphism(s, s, {e: e for e in s.universe})


@dataclass(frozen=True)
class HomConstraint:
    """Partial constraints for hom search.

    required: forced assignments; distinct_pairs: source pairs that must get
    distinct images; forbidden: (source, target) pairs that are disallowed.
    """

    required: Tuple[Tuple[str, str], ...] = ()
    distinct_pairs: Tuple[Tuple[str, str], ...] = ()
    forbidden: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        seen: Dict[str, str] = {}
        for s, t in self.required:
            if seen.get(s, t) != t:
                raise StructureError(f"conflicting required assignments for {s}")
            seen[s] = t

    @classmethod
    def make(
        cls,
        required: Optional[Mapping[str, str]] = None,
        distinct_pairs: Sequence[Tuple[str, str]] = (),
        forbidden: Sequence[Tuple[str, str]] = (),
    ) -> "HomConstraint":
        return cls(
            required=tuple(sorted((required or {}).items())),
            distinct_pairs=tuple(distinct_pairs),
            forbidden=tuple(forbidden),
        )


# ---------------------------------------------------------------------------
# Atomic preservation / reflection


def is_homomorphism(m: Morphism) -> bool:
    a, b = m.source, m.target
    for name, _ in a.signature.relations:
        brel = b.rel(name)
        for tup in a.rel(name):
            if m.apply(tup) not in brel:
                return False
    for name, _ in a.signature.functions:
        btab = b.functions[name]
        for args, val in a.functions[name].items():
            if btab[m.apply(args)] != m.map[val]:
                return False
    for c in a.signature.constants:
        if m.map[a.const(c)] != b.const(c):
            return False
    return True


def is_embedding(m: Morphism) -> bool:
    if not m.is_injective() or not is_homomorphism(m):
        return False
    a, b = m.source, m.target
    for name, arity in a.signature.relations:
        arel, brel = a.rel(name), b.rel(name)
        for tup in itertools.product(a.universe, repeat=arity):
            if m.apply(tup) in brel and tup not in arel:
                return False
    return True


# ---------------------------------------------------------------------------
# Backtracking hom search


def _source_facts(a: FiniteStructure):
    facts = []
    for name, _ in a.signature.relations:
        for tup in sorted(a.rel(name)):
            facts.append(("rel", name, tup))
    for name, _ in a.signature.functions:
        for args, val in sorted(a.functions[name].items()):
            facts.append(("func", name, args + (val,)))
    return facts


def search_homs(
    a: FiniteStructure,
    b: FiniteStructure,
    constraint: Optional[HomConstraint] = None,
    limit: Optional[int] = None,
    node_cap: Optional[int] = None,
) -> Iterator[Dict[str, str]]:
    """All homomorphisms a -> b satisfying the constraint, by backtracking
    in universe order.  Deterministic: images tried in target universe order."""
    if a.signature != b.signature:
        raise SignatureError("hom search across different signatures")
    constraint = constraint or HomConstraint()
    required = dict(constraint.required)
    for c in a.signature.constants:
        src = a.const(c)
        tgt = b.const(c)
        if required.get(src, tgt) != tgt:
            return
        required[src] = tgt
    forbidden = set(constraint.forbidden)
    distinct = list(constraint.distinct_pairs)
    facts = _source_facts(a)
    order = list(a.universe)
    pos = {e: i for i, e in enumerate(order)}
    # facts checkable once all their elements are assigned; index by last element
    facts_by_last: List[List[Tuple]] = [[] for _ in order]
    for kind, name, tup in facts:
        last = max(pos[e] for e in tup)
        facts_by_last[last].append((kind, name, tup))
    distinct_by_last: List[List[Tuple[str, str]]] = [[] for _ in order]
    for x, y in distinct:
        distinct_by_last[max(pos[x], pos[y])].append((x, y))

    assignment: Dict[str, str] = {}
    nodes = 0
    found = 0

    def ok_at(i: int) -> bool:
        for kind, name, tup in facts_by_last[i]:
            img = tuple(assignment[e] for e in tup)
            if kind == "rel":
                if img not in b.rel(name):
                    return False
            else:
                if b.functions[name][img[:-1]] != img[-1]:
                    return False
        for x, y in distinct_by_last[i]:
            if assignment[x] == assignment[y]:
                return False
        return True

    def dfs(i: int) -> Iterator[Dict[str, str]]:
        nonlocal nodes, found
        if i == len(order):
            found += 1
            yield dict(assignment)
            return
        e = order[i]
        candidates = [required[e]] if e in required else list(b.universe)
        for cand in candidates:
            if (e, cand) in forbidden:
                continue
            nodes += 1
            if node_cap is not None and nodes > node_cap:
                raise BudgetExceeded(f"hom search exceeded node cap {node_cap}")
            assignment[e] = cand
            if ok_at(i):
                yield from dfs(i + 1)
                if limit is not None and found >= limit:
                    del assignment[e]
                    return
            del assignment[e]

    yield from dfs(0)


def find_hom(
    a: FiniteStructure,
    b: FiniteStructure,
    constraint: Optional[HomConstraint] = None,
    node_cap: Optional[int] = None,
) -> Optional[Dict[str, str]]:
    for m in search_homs(a, b, constraint, limit=1, node_cap=node_cap):
        return m
    return None


def hom_exists(a: FiniteStructure, b: FiniteStructure) -> bool:
    return find_hom(a, b) is not None


# ---------------------------------------------------------------------------
# Immersions


def retraction(m: Morphism) -> Optional[Morphism]:
    """A homomorphism r: target -> source with r . m = id, if one exists."""
    if not m.is_injective():
        return None
    required = {m.map[e]: e for e in m.source.universe}
    r = find_hom(m.target, m.source, HomConstraint.make(required=required))
    return Morphism(m.target, m.source, r) if r is not None else None


def is_immersion(m: Morphism) -> bool:
    """Exact over finite targets: an immersion iff a retraction exists."""
    return is_homomorphism(m) and retraction(m) is not None


# ---------------------------------------------------------------------------
# Strong immersions (bounded)


def is_strong_immersion(m: Morphism, k: Optional[int] = None) -> Tuple[bool, Optional[dict]]:
    """Bounded decision of `target models the h-inductive theory of the
    source with parameters`.

    Enumerates h-inductive sentences whose premise is the pointed positive
    diagram of a target subset W of size <= k (m-images named by source
    constants) and whose conclusion is the strongest disjunction of pointed
    source diagrams of size <= k.  Returns (True, None) at the bound or
    (False, witness).
    """
    a, b = m.source, m.target
    if k is None:
        k = len(b.universe)
    if k < 1:
        raise ValueError("k must be >= 1")
    if not is_homomorphism(m):
        return False, {"reason": "not a homomorphism"}
    preimages: Dict[str, List[str]] = {}
    for e in a.universe:
        preimages.setdefault(m.map[e], []).append(e)
    image = set(preimages)

    for size in range(1, min(k, len(b.universe)) + 1):
        for w in itertools.combinations(b.universe, size):
            wset = set(w)
            params = [e for e in w if e in image]
            xs = [e for e in w if e not in image]
            # premise facts: all atomic facts of the target among W
            facts = _subset_facts(b, wset)
            # collapse constraint: all source preimages of one parameter are
            # forced equal by the premise; in the source they differ
            injective_here = all(len(preimages[p]) == 1 for p in params)

            def a_sat(abar: Tuple[str, ...]) -> bool:
                if not injective_here:
                    return False
                env = {p: preimages[p][0] for p in params}
                env.update(zip(xs, abar))
                return _facts_hold(a, facts, env, {c: a.const(c) for c in a.signature.constants})

            sat_a = [abar for abar in itertools.product(a.universe, repeat=len(xs)) if a_sat(abar)]
            good_images = set()
            for abar in sat_a:
                concl_universe = set(
                    e for p in params for e in preimages[p]
                ) | set(abar)
                if len(concl_universe) <= k:
                    good_images.add(tuple(m.map[e] for e in abar))

            bconsts = {c: b.const(c) for c in b.signature.constants}
            for bbar in itertools.product(b.universe, repeat=len(xs)):
                env = {p: p for p in params}
                env.update(zip(xs, bbar))
                if not _facts_hold(b, facts, env, bconsts):
                    continue
                if bbar not in good_images:
                    return False, {
                        "premise_subset": list(w),
                        "parameters": list(params),
                        "witness": list(bbar),
                        "bound": k,
                    }
    return True, None


def _subset_facts(s: FiniteStructure, subset: set) -> List[Tuple]:
    facts = []
    for name, _ in s.signature.relations:
        for tup in sorted(s.rel(name)):
            if set(tup) <= subset:
                facts.append(("rel", name, tup))
    for name, _ in s.signature.functions:
        for args, val in sorted(s.functions[name].items()):
            if set(args) <= subset and val in subset:
                facts.append(("func", name, args + (val,)))
    for c in s.signature.constants:
        if s.const(c) in subset:
            facts.append(("const", c, (s.const(c),)))
    return facts


def _facts_hold(s: FiniteStructure, facts, env: Mapping[str, str], consts: Mapping[str, str]) -> bool:
    for kind, name, tup in facts:
        img = tuple(env[e] for e in tup)
        if kind == "rel":
            if img not in s.rel(name):
                return False
        elif kind == "func":
            if s.functions[name][img[:-1]] != img[-1]:
                return False
        else:
            if consts[name] != img[0]:
                return False
    return True


# ---------------------------------------------------------------------------
# Classification and enumeration


def classify_morphism(m: Morphism, k: Optional[int] = None) -> MorphismKind:
    """Strongest kind in the chain that holds (strong immersion at bound k,
    defaulting to the target size)."""
    if not is_homomorphism(m):
        raise StructureError("not a homomorphism")
    if not is_embedding(m):
        return MorphismKind.HOM
    if not is_immersion(m):
        return MorphismKind.EMBEDDING
    strong, _ = is_strong_immersion(m, k)
    return MorphismKind.STRONG_IMMERSION if strong else MorphismKind.IMMERSION


def enumerate_homs(
    a: FiniteStructure,
    b: FiniteStructure,
    constraint: Optional[HomConstraint] = None,
    kind: MorphismKind = MorphismKind.HOM,
    k: Optional[int] = None,
    node_cap: Optional[int] = None,
) -> List[Morphism]:
    """All morphisms of at least the requested kind, sorted by map encoding.
    Morphisms of kind >= Immersion carry their certificate."""
    out = []
    for mp in search_homs(a, b, constraint, node_cap=node_cap):
        m = Morphism(a, b, mp)
        cert: Any = None
        if kind >= MorphismKind.EMBEDDING and not is_embedding(m):
            continue
        if kind >= MorphismKind.IMMERSION:
            r = retraction(m)
            if r is None:
                continue
            cert = {"retraction": dict(r.map)}
        if kind >= MorphismKind.STRONG_IMMERSION:
            strong, _ = is_strong_immersion(m, k)
            if not strong:
                continue
            cert = dict(cert or {})
            cert["strong_bound"] = k if k is not None else len(b.universe)
        out.append(Morphism(a, b, mp, certificate=cert))
    out.sort(key=lambda m: m.map_key())
    return out
