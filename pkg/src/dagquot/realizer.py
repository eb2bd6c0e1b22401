"""Constructive realization of colored DAGs in free groups.

The construction is an induction on the number of vertices.  Starting from
the empty DAG in the rank-0 free group, vertices are adjoined one at a time:
each induction step picks a maximal vertex of the remaining DAG (largest id,
for determinism), allocates two fresh ambient generators, and extends every
normal subgroup built so far:

  * vertices strictly below the new one keep their relators verbatim and
    their quotient gains a free free-product factor on the fresh pair;
  * all other old vertices add both fresh generators as relators, leaving
    their quotient unchanged;
  * the new vertex kills every older generator and adds, on the fresh pair,
    either the first fresh generator (color 0: quotient becomes Z) or the
    commutator scheme whose normal closure is the kernel onto the
    lamplighter group Z wr Z (color 1: quotient not finitely presented).

The final ambient rank is exactly twice the number of vertices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import dag as dagmod
from .dag import ColoredDag
from .quotients import (
    CommutatorScheme,
    FreeOfRank,
    GroupExpr,
    IdentityImage,
    InfiniteCyclic,
    Lamplighter,
    LeafImage,
    MarkedQuotient,
    RelatorSet,
    check_soundness,
    free_product,
    leaves,
    quotient_from_json,
    quotient_to_json,
)
from .words import Word, RankMismatchError, Hom, apply_hom, format_word, generator, parse_word


class RealizerError(ValueError):
    pass


class SchemePresentError(RealizerError):
    """The relator set carries a scheme, so it has no finite core here."""


@dataclass(frozen=True)
class Realization:
    """A colored DAG realized by normal subgroups of a free group.

    ``dag`` is stored transitively closed; ``step_index`` records, for each
    vertex, which induction step created it (step j owns generators
    x_{2j-1}, x_{2j}).
    """

    dag: ColoredDag
    ambient_rank: int
    assignment: dict[str, MarkedQuotient]
    step_index: dict[str, int]

    def __post_init__(self):
        if set(self.assignment) != set(self.dag.vertices):
            raise RealizerError("assignment must cover exactly the DAG vertices")
        for v, q in self.assignment.items():
            if q.rank != self.ambient_rank:
                raise RealizerError(
                    f"vertex {v}: quotient rank {q.rank} != ambient rank {self.ambient_rank}"
                )


def removal_order(d: ColoredDag) -> list[str]:
    """Vertices in the order the induction peels them off: repeatedly the
    largest-id maximal vertex of what remains."""
    remaining = set(d.vertices)
    edges = set(d.edges)
    order = []
    while remaining:
        maximal = [v for v in remaining if not any(s == v for s, _ in edges)]
        w = max(maximal)
        order.append(w)
        remaining.remove(w)
        edges = {(s, t) for s, t in edges if s != w and t != w}
    return order


def realize(d: ColoredDag) -> Realization:
    dagmod.validate(d)
    closed = dagmod.transitive_closure(d)
    build = list(reversed(removal_order(closed)))

    quotients: dict[str, MarkedQuotient] = {}
    for j, w in enumerate(build, start=1):
        rank = 2 * j
        lo, hi = 2 * j - 1, 2 * j
        for u in build[: j - 1]:
            old = quotients[u]
            marking = {
                idx: img for idx, img in old.marking.items()
            }
            if closed.has_edge(u, w):
                # u below the new vertex: relators survive, quotient gains F2
                expr = free_product([old.expr, FreeOfRank(2)])
                new_leaf = len(leaves(expr)) - 1
                marking[lo] = LeafImage(new_leaf, 1)
                marking[hi] = LeafImage(new_leaf, 2)
                quotients[u] = MarkedQuotient(
                    rank, old.relators.promoted(rank), expr, marking
                )
            else:
                marking[lo] = IdentityImage()
                marking[hi] = IdentityImage()
                quotients[u] = MarkedQuotient(
                    rank,
                    old.relators.promoted(rank).extended(
                        [generator(rank, lo), generator(rank, hi)]
                    ),
                    old.expr,
                    marking,
                )
        kill = [generator(rank, i) for i in range(1, rank - 1)]
        marking = {i: IdentityImage() for i in range(1, rank - 1)}
        if closed.color[w] == 0:
            relators = RelatorSet(rank, tuple(kill) + (generator(rank, lo),))
            expr: GroupExpr = InfiniteCyclic()
            marking[lo] = IdentityImage()
            marking[hi] = LeafImage(0, 1)
        else:
            scheme = CommutatorScheme(generator(rank, lo), generator(rank, hi))
            relators = RelatorSet(rank, tuple(kill), (scheme,))
            expr = Lamplighter()
            marking[lo] = LeafImage(0, "lamp")
            marking[hi] = LeafImage(0, "shift")
        quotients[w] = MarkedQuotient(rank, relators, expr, marking)

    for q in quotients.values():
        check_soundness(q, probe_bound=3)

    return Realization(
        dag=closed,
        ambient_rank=2 * len(build),
        assignment={v: quotients[v] for v in sorted(quotients)},
        step_index={v: build.index(v) + 1 for v in sorted(quotients)},
    )


def finite_core(r: RelatorSet) -> list[Word]:
    """The finite relator list, available exactly when no scheme is present.

    The construction makes finite cores explicit: a color-0 vertex ends up
    with a finite relator set on the nose, and a color-1 vertex has none
    within this construction.
    """
    if r.schemes:
        raise SchemePresentError(
            "relator set carries an infinite scheme; no finite core here"
        )
    return list(r.finite_part)


# ---------------------------------------------------------------------------
# transfer along a CEP embedding


@dataclass(frozen=True)
class CepEmbedding:
    """A finitely presented ambient group plus the images of a free basis.

    ``basis_words`` are the images, in the ambient alphabet, of a free basis
    whose span is assumed to satisfy the congruence extension property.
    That assumption is recorded (``note``), not decided: no algorithm here
    certifies CEP-ness of a subgroup of an arbitrary presented group.
    """

    alphabet_rank: int
    ambient_relators: tuple[Word, ...]
    basis_words: tuple[Word, ...]
    note: str = ""

    def __post_init__(self):
        if not self.basis_words:
            raise RealizerError("embedding needs at least one basis word")
        for w in self.basis_words + self.ambient_relators:
            if w.rank != self.alphabet_rank:
                raise RankMismatchError(
                    f"embedding word rank {w.rank} != alphabet rank {self.alphabet_rank}"
                )


@dataclass(frozen=True)
class Presentation:
    """Relators over the embedding alphabet, schemes carried symbolically."""

    alphabet_rank: int
    relators: tuple[Word, ...]
    schemes: tuple[CommutatorScheme, ...]
    finitely_presented_claim: bool

    def __str__(self) -> str:
        gens = ", ".join(f"x{i}" for i in range(1, self.alphabet_rank + 1))
        rels = [format_word(w) or "1" for w in self.relators]
        rels += [
            f"scheme({format_word(s.a)}, {format_word(s.t)})" for s in self.schemes
        ]
        return f"⟨ {gens} | {', '.join(rels)} ⟩"


def cep_transfer(r: Realization, e: CepEmbedding) -> dict[str, Presentation]:
    """Rewrite each vertex's relators through the embedding and adjoin the
    ambient relators; valid conditional on CEP of the supplied basis."""
    if len(e.basis_words) < r.ambient_rank:
        raise RealizerError(
            f"embedding supplies {len(e.basis_words)} basis words, "
            f"need {r.ambient_rank}"
        )
    f = Hom(r.ambient_rank, e.alphabet_rank, tuple(e.basis_words[: r.ambient_rank]))
    out: dict[str, Presentation] = {}
    for v in sorted(r.assignment):
        q = r.assignment[v]
        rewritten = tuple(apply_hom(f, w) for w in q.relators.finite_part)
        schemes = tuple(
            CommutatorScheme(apply_hom(f, s.a), apply_hom(f, s.t))
            for s in q.relators.schemes
        )
        out[v] = Presentation(
            alphabet_rank=e.alphabet_rank,
            relators=e.ambient_relators + rewritten,
            schemes=schemes,
            finitely_presented_claim=not schemes,
        )
    return out


# ---------------------------------------------------------------------------
# serialization


def realization_to_json(r: Realization) -> dict:
    return {
        "ambient_rank": r.ambient_rank,
        "dag": dagmod.to_json(r.dag),
        "step_index": {v: r.step_index[v] for v in sorted(r.step_index)},
        "vertices": {v: quotient_to_json(q) for v, q in sorted(r.assignment.items())},
    }


def realization_from_json(data) -> Realization:
    d = dagmod.from_json(data["dag"])
    assignment = {v: quotient_from_json(q) for v, q in data["vertices"].items()}
    return Realization(
        dag=d,
        ambient_rank=int(data["ambient_rank"]),
        assignment={v: assignment[v] for v in sorted(assignment)},
        step_index={v: int(i) for v, i in sorted(data["step_index"].items())},
    )


def embedding_to_json(e: CepEmbedding) -> dict:
    return {
        "alphabet_rank": e.alphabet_rank,
        "relators": [format_word(w) for w in e.ambient_relators],
        "basis": [format_word(w) for w in e.basis_words],
        "note": e.note,
    }


def embedding_from_json(data) -> CepEmbedding:
    rank = int(data["alphabet_rank"])
    return CepEmbedding(
        alphabet_rank=rank,
        ambient_relators=tuple(parse_word(t, rank) for t in data.get("relators", ())),
        basis_words=tuple(parse_word(t, rank) for t in data.get("basis", ())),
        note=str(data.get("note", "")),
    )


def load_embedding(path) -> CepEmbedding:
    with open(path, encoding="utf-8") as fh:
        return embedding_from_json(json.load(fh))


def presentations_to_json(pres: dict[str, Presentation], note: str = "") -> dict:
    return {
        "conditional_on_cep": True,
        "note": note or "valid conditional on CEP of the supplied basis",
        "vertices": {
            v: {
                "alphabet_rank": p.alphabet_rank,
                "relators": [format_word(w) for w in p.relators],
                "schemes": [
                    {"a": format_word(s.a), "t": format_word(s.t)} for s in p.schemes
                ],
                "finitely_presented_claim": p.finitely_presented_claim,
                "text": str(p),
            }
            for v, p in sorted(pres.items())
        },
    }


def lattice_to_dot(r: Realization) -> str:
    """DOT of the realized order, each vertex annotated with its quotient."""
    lines = ["digraph realized_lattice {"]
    for v in sorted(r.assignment):
        q = r.assignment[v]
        color = r.dag.color[v]
        extra = ", peripheries=2" if color == 1 else ""
        label = (
            f"{v} (c={color})\\nG/N = {q.expr}\\n"
            f"{len(q.relators.finite_part)} relators, {len(q.relators.schemes)} schemes"
        )
        lines.append(f'  "{v}" [label="{label}"{extra}];')
    for u, v in sorted(r.dag.edges):
        lines.append(f'  "{u}" -> "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
