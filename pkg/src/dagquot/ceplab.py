"""Decidable congruence-extension experiments.

An extension H <= G has the congruence extension property (CEP) when every
subset R of H satisfies: the H-normal closure of R equals H intersected with
the G-normal closure of R.  Since H-normal closures of subsets range exactly
over the normal subgroups of H, the finite check quantifies over the normal
subgroup lattice of H instead of over all subsets (an exponential-to-lattice
reduction; the equation for R reduces to the equation for N = the H-closure
of R).

Finite groups ingest as multiplication tables or as permutation generators
(the table is computed by orbit closure, capped at order 10080).  The module
also reproduces, with a machine-checkable certificate, the classical
free-group counterexample: H generated by a and its conjugate a^b inside the
free group on {a, b} fails CEP for R = {a^b}.
"""

from __future__ import annotations

import itertools
import json
import random
import re
from dataclasses import dataclass, field

from . import stallings
from .quotients import (
    IdentityImage,
    InfiniteCyclic,
    LeafImage,
    MarkedQuotient,
    RelatorSet,
    eval_word,
)
from .verifier import Certificate, EvalTrace, SubstitutionFact
from .words import Word, conjugate, generator

ORDER_CAP = 10080


class GroupTableError(ValueError):
    pass


# ---------------------------------------------------------------------------
# finite groups as multiplication tables


@dataclass
class FiniteGroup:
    """A finite group given by its full multiplication table.

    Element 0 is the identity; ``table[a][b]`` is the product a*b.
    """

    order: int
    table: tuple[tuple[int, ...], ...]
    names: tuple[str, ...]
    _inv: tuple[int, ...] = field(default=(), repr=False, compare=False)
    _subgroups: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.validate()
        inv = [None] * self.order
        for a in range(self.order):
            for b in range(self.order):
                if self.table[a][b] == 0:
                    inv[a] = b
        self._inv = tuple(inv)

    def validate(self) -> None:
        n = self.order
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise GroupTableError("table is not order x order")
        if len(self.names) != n:
            raise GroupTableError("need one name per element")
        for a in range(n):
            if self.table[0][a] != a or self.table[a][0] != a:
                raise GroupTableError("element 0 is not an identity")
        for a in range(n):
            if 0 not in self.table[a]:
                raise GroupTableError(f"element {a} has no inverse")
        # full associativity check for desk-scale tables, sampled above that
        if n <= 200:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = random.Random(0)
            triples = (
                (rng.randrange(n), rng.randrange(n), rng.randrange(n))
                for _ in range(20000)
            )
        for a, b, c in triples:
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise GroupTableError(f"associativity fails at ({a}, {b}, {c})")

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def conj(self, a: int, by: int) -> int:
        return self.mul(self.mul(self.inv(by), a), by)

    def name_set(self, elems) -> list[str]:
        return sorted(self.names[e] for e in elems)


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    elements: frozenset[int]

    def __post_init__(self):
        g = self.parent
        if 0 not in self.elements:
            raise GroupTableError("subgroup must contain the identity")
        for a in self.elements:
            if g.inv(a) not in self.elements:
                raise GroupTableError("subgroup is not inverse-closed")
            for b in self.elements:
                if g.mul(a, b) not in self.elements:
                    raise GroupTableError("subgroup is not product-closed")

    def __len__(self) -> int:
        return len(self.elements)


def subgroup_generated(g: FiniteGroup, gens) -> Subgroup:
    return Subgroup(g, _closure(g, frozenset(gens) | {0}))


def _closure(g: FiniteGroup, seed: frozenset[int]) -> frozenset[int]:
    elems = set(seed) | {0}
    frontier = list(elems)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(elems):
                for c in (g.mul(a, b), g.mul(b, a), g.inv(a)):
                    if c not in elems:
                        elems.add(c)
                        nxt.append(c)
        frontier = nxt
    return frozenset(elems)


def normal_closure_in(g: FiniteGroup, ambient: frozenset[int], seed) -> frozenset[int]:
    """Smallest subgroup of ``ambient`` containing seed and closed under
    conjugation by ambient (seed must lie inside ambient)."""
    conjugates = {g.conj(s, x) for s in seed for x in ambient}
    return _closure(g, frozenset(conjugates))


def normal_closure_finite(g: FiniteGroup, seed) -> Subgroup:
    return Subgroup(g, normal_closure_in(g, frozenset(range(g.order)), seed))


def all_subgroups_within(g: FiniteGroup, ambient: frozenset[int]) -> list[frozenset[int]]:
    """Every subgroup of the given subgroup, by one-generator extensions."""
    if ambient in g._subgroups:
        return g._subgroups[ambient]
    found = {frozenset({0})}
    worklist = [frozenset({0})]
    while worklist:
        current = worklist.pop()
        for x in sorted(ambient - current):
            bigger = _closure(g, current | {x})
            if bigger <= ambient and bigger not in found:
                found.add(bigger)
                worklist.append(bigger)
    result = sorted(found, key=lambda s: (len(s), sorted(s)))
    g._subgroups[ambient] = result
    return result


def all_subgroups(g: FiniteGroup) -> list[frozenset[int]]:
    return all_subgroups_within(g, frozenset(range(g.order)))


def normal_subgroups_within(g: FiniteGroup, ambient: frozenset[int]) -> list[frozenset[int]]:
    out = []
    for sub in all_subgroups_within(g, ambient):
        if all(g.conj(a, x) in sub for a in sub for x in ambient):
            out.append(sub)
    return out


# ---------------------------------------------------------------------------
# CEP checks


@dataclass(frozen=True)
class CepViolation:
    """A normal subgroup of H whose two closure sides disagree."""

    seed_normal: frozenset[int]  # N, normal in H (equals its H-closure)
    intersection: frozenset[int]  # H meet the ambient closure of N


def _cep_violation(
    g: FiniteGroup, ambient: frozenset[int], sub: frozenset[int]
) -> CepViolation | None:
    for n in normal_subgroups_within(g, sub):
        meet = normal_closure_in(g, ambient, n) & sub
        if meet != n:
            return CepViolation(n, meet)
    return None


def is_cep_pair(g: FiniteGroup, ambient: frozenset[int], sub: frozenset[int]) -> bool:
    if not sub <= ambient:
        raise GroupTableError("chain is not nested")
    return _cep_violation(g, ambient, sub) is None


def is_cep_finite(g: FiniteGroup, h: Subgroup) -> tuple[bool, CepViolation | None]:
    violation = _cep_violation(g, frozenset(range(g.order)), h.elements)
    return violation is None, violation


def is_almost_cep_finite(
    g: FiniteGroup, h: Subgroup, max_s: int
) -> frozenset[int] | None:
    """Smallest S in H minus the identity (|S| <= max_s) such that every
    normal subgroup of H missing S satisfies the closure equation."""
    ambient = frozenset(range(g.order))
    normals = normal_subgroups_within(g, h.elements)

    def works(s: frozenset[int]) -> bool:
        for n in normals:
            if s & n:
                continue
            if normal_closure_in(g, ambient, n) & h.elements != n:
                return False
        return True

    pool = sorted(h.elements - {0})
    for size in range(max_s + 1):
        for combo in itertools.combinations(pool, size):
            if works(frozenset(combo)):
                return frozenset(combo)
    return None


@dataclass
class TransitivityReport:
    group_name: str
    chains_checked: int
    violations: list[tuple[str, frozenset[int], frozenset[int]]]

    @property
    def ok(self) -> bool:
        return not self.violations


def cep_transitivity_scan(g: FiniteGroup, name: str = "") -> TransitivityReport:
    """Check, over every chain H <= K <= G, that CEP composes and restricts:
    CEP(H,K) and CEP(K,G) imply CEP(H,G), and CEP(H,G) implies CEP(H,K).
    Both are theorems; a violation would expose an implementation bug."""
    whole = frozenset(range(g.order))
    subs = all_subgroups(g)
    cep: dict[tuple[frozenset, frozenset], bool] = {}

    def cep_of(ambient: frozenset, sub: frozenset) -> bool:
        key = (ambient, sub)
        if key not in cep:
            cep[key] = is_cep_pair(g, ambient, sub)
        return cep[key]

    violations = []
    chains = 0
    for k in subs:
        for h in all_subgroups_within(g, k):
            chains += 1
            hk, kg, hg = cep_of(k, h), cep_of(whole, k), cep_of(whole, h)
            if hk and kg and not hg:
                violations.append(("transitivity", h, k))
            if hg and not hk:
                violations.append(("restriction", h, k))
    return TransitivityReport(name, chains, violations)


# ---------------------------------------------------------------------------
# built-in groups

Perm = tuple[int, ...]


def _perm_mul(p: Perm, q: Perm) -> Perm:
    # apply p first, then q
    return tuple(q[p[i]] for i in range(len(p)))


def _perm_inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, img in enumerate(p):
        out[img] = i
    return tuple(out)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(text: str, degree: int) -> Perm:
    """Cycle notation, 1-based: '(1 2 3)(4 5)' or '()' for the identity."""
    text = text.strip()
    perm = list(range(degree))
    if text in ("()", "", "e"):
        return tuple(perm)
    if _CYCLE_RE.sub("", text).strip():
        raise GroupTableError(f"cannot parse permutation {text!r}")
    moved: set[int] = set()
    for cycle in _CYCLE_RE.findall(text):
        try:
            entries = [int(tok) - 1 for tok in cycle.replace(",", " ").split()]
        except ValueError as exc:
            raise GroupTableError(f"bad cycle ({cycle}): {exc}") from exc
        if not entries:
            continue
        if any(not 0 <= e < degree for e in entries) or moved & set(entries):
            raise GroupTableError(f"bad cycle ({cycle}) for degree {degree}")
        if len(set(entries)) != len(entries):
            raise GroupTableError(f"repeated point in cycle ({cycle})")
        moved |= set(entries)
        for i, src in enumerate(entries):
            perm[src] = entries[(i + 1) % len(entries)]
    return tuple(perm)


def permutation_name(p: Perm) -> str:
    seen = set()
    cycles = []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            seen.add(start)
            continue
        cycle = [start]
        seen.add(start)
        nxt = p[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = p[nxt]
        cycles.append("(" + " ".join(str(i + 1) for i in cycle) + ")")
    return "".join(cycles) if cycles else "()"


def group_from_permutations(degree: int, gen_texts) -> tuple[FiniteGroup, list[Perm]]:
    gens = [parse_permutation(t, degree) for t in gen_texts]
    ident = tuple(range(degree))
    elems: list[Perm] = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for q in gens:
                prod = _perm_mul(p, q)
                if prod not in index:
                    if len(elems) >= ORDER_CAP:
                        raise GroupTableError(f"order cap {ORDER_CAP} exceeded")
                    index[prod] = len(elems)
                    elems.append(prod)
                    nxt.append(prod)
        frontier = nxt
    table = tuple(
        tuple(index[_perm_mul(a, b)] for b in elems) for a in elems
    )
    names = tuple(permutation_name(p) for p in elems)
    return FiniteGroup(len(elems), table, names), elems


_Q8_MUL = {
    # (symbol product, sign) for the quaternion units
    ("1", "1"): ("1", 1), ("1", "i"): ("i", 1), ("1", "j"): ("j", 1), ("1", "k"): ("k", 1),
    ("i", "1"): ("i", 1), ("j", "1"): ("j", 1), ("k", "1"): ("k", 1),
    ("i", "i"): ("1", -1), ("j", "j"): ("1", -1), ("k", "k"): ("1", -1),
    ("i", "j"): ("k", 1), ("j", "k"): ("i", 1), ("k", "i"): ("j", 1),
    ("j", "i"): ("k", -1), ("k", "j"): ("i", -1), ("i", "k"): ("j", -1),
}


def _quaternion_group() -> FiniteGroup:
    units = [(1, "1"), (-1, "1"), (1, "i"), (-1, "i"),
             (1, "j"), (-1, "j"), (1, "k"), (-1, "k")]
    index = {u: n for n, u in enumerate(units)}

    def mul(a, b):
        sym, sign = _Q8_MUL[(a[1], b[1])]
        return (a[0] * b[0] * sign, sym)

    table = tuple(tuple(index[mul(a, b)] for b in units) for a in units)
    names = tuple(("" if s > 0 else "-") + sym for s, sym in units)
    return FiniteGroup(8, table, names)


def _klein_group() -> FiniteGroup:
    table = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))
    return FiniteGroup(4, table, ("e", "a", "b", "ab"))


BUILTIN_GENERATORS = {
    "s3": (3, ["(1 2)", "(1 2 3)"]),
    "s4": (4, ["(1 2)", "(1 2 3 4)"]),
    "a4": (4, ["(1 2 3)", "(2 3 4)"]),
    "d4": (4, ["(1 2 3 4)", "(1 3)"]),
}


def builtin_group(name: str) -> FiniteGroup:
    name = name.lower()
    if name in BUILTIN_GENERATORS:
        degree, gens = BUILTIN_GENERATORS[name]
        return group_from_permutations(degree, gens)[0]
    if name == "q8":
        return _quaternion_group()
    if name == "c2xc2":
        return _klein_group()
    raise GroupTableError(f"unknown builtin group {name!r}")


def builtin_names() -> list[str]:
    return sorted(list(BUILTIN_GENERATORS) + ["q8", "c2xc2"])


def subgroup_from_generator_names(g: FiniteGroup, gen_names) -> Subgroup:
    ids = []
    for name in gen_names:
        if name not in g.names:
            raise GroupTableError(f"no element named {name!r}")
        ids.append(g.names.index(name))
    return subgroup_generated(g, ids)


def d4_in_s4() -> tuple[FiniteGroup, Subgroup]:
    g = builtin_group("s4")
    return g, subgroup_from_generator_names(g, ["(1 2 3 4)", "(1 3)"])


def a3_in_s3() -> tuple[FiniteGroup, Subgroup]:
    g = builtin_group("s3")
    return g, subgroup_from_generator_names(g, ["(1 2 3)"])


def group_from_json(data) -> FiniteGroup:
    if "table" in data:
        order = int(data["order"])
        table = tuple(tuple(int(x) for x in row) for row in data["table"])
        names = tuple(str(n) for n in data.get("names", range(order)))
        return FiniteGroup(order, table, names)
    if "generators" in data:
        return group_from_permutations(int(data["degree"]), data["generators"])[0]
    raise GroupTableError("group JSON needs either a table or permutation generators")


def load_group(path) -> FiniteGroup:
    with open(path, encoding="utf-8") as fh:
        return group_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# the free-group counterexample, certified


def free_counterexample_demo() -> Certificate:
    """Certify that H = <a, a^b> <= F2 fails CEP for R = {a^b}.

    Three checked facts:
      1. a and a^b lie in H, constructively: basis expressions whose
         substitution reproduces the words;
      2. a is NOT in the H-normal closure of a^b: the retraction of H onto Z
         killing the basis element a^b kills that whole closure, yet sends a
         to 1;
      3. both generators of H die in the ambient quotient killing a, and a^b
         is the conjugate of a by b, so H lies inside the ambient closure of
         a^b.
    Hence the H-closure is a proper subgroup of H = H meet the ambient
    closure: the two sides of the congruence extension equation differ.
    """
    a = generator(2, 1)
    b = generator(2, 2)
    r = conjugate(a, b)  # x2^-1 x1 x2

    graph = stallings.build_subgroup_graph([a, r])
    base_words = tuple(stallings.basis(graph))
    if base_words != (a, r):
        raise GroupTableError("unexpected basis for the counterexample subgroup")
    expr_a = stallings.express(graph, a)
    expr_r = stallings.express(graph, r)
    assert expr_a is not None and expr_r is not None

    # retraction of H = F(basis) onto Z killing the second basis element
    retraction = MarkedQuotient(
        rank=2,
        relators=RelatorSet(2, (generator(2, 2),)),
        expr=InfiniteCyclic(),
        marking={1: LeafImage(0, 1), 2: IdentityImage()},
    )
    # ambient quotient F2 -> Z killing a
    ambient_quotient = MarkedQuotient(
        rank=2,
        relators=RelatorSet(2, (generator(2, 1),)),
        expr=InfiniteCyclic(),
        marking={1: IdentityImage(), 2: LeafImage(0, 1)},
    )

    hom_value_a = eval_word(retraction, expr_a)
    if hom_value_a.is_identity:
        raise GroupTableError("retraction unexpectedly kills a")

    traces = (
        EvalTrace("closure-side:hom-kills-relator", retraction, expr_r,
                  eval_word(retraction, expr_r)),
        EvalTrace("closure-side:hom-value-of-a", retraction, expr_a, hom_value_a),
        EvalTrace("ambient-side:a-dies", ambient_quotient, a,
                  eval_word(ambient_quotient, a)),
        EvalTrace("ambient-side:conjugate-dies", ambient_quotient, r,
                  eval_word(ambient_quotient, r)),
    )
    word_facts = (
        SubstitutionFact("a-in-subgroup", base_words, expr_a, a),
        SubstitutionFact("conjugate-in-subgroup", base_words, expr_r, r),
        SubstitutionFact(
            "relator-is-conjugate-of-a",
            (a, b),
            Word(2, ((2, -1), (1, 1), (2, 1))),
            r,
        ),
    )
    notes = (
        "subgroup: H generated by x1 and x2^-1 x1 x2 inside the free group of rank 2",
        "the retraction H -> Z (basis element x1 -> 1, x2^-1 x1 x2 -> 0) kills the "
        "H-normal closure of x2^-1 x1 x2 but not x1, so x1 is outside that closure",
        "x2^-1 x1 x2 and x1 are conjugate, so their ambient normal closures agree; "
        "both generators of H die in the ambient quotient killing x1, so H lies "
        "inside the ambient closure",
        "conclusion: the H-closure of the relator is a proper subgroup of "
        "H = H meet its ambient closure; the extension is not CEP",
    )
    return Certificate(
        kind="cep-counterexample",
        subject=("free-rank-2-conjugate-generator",),
        traces=traces,
        word_facts=word_facts,
        notes=notes,
    )
