"""Relator sets, structural group expressions, and decidable word problems
for the quotients this package constructs.

A constructed quotient is always a free product of copies of Z, free groups,
and the wreath product Z wr Z (the "lamplighter over Z", the package's fixed
two-generated non-finitely-presented group).  Each ambient generator is
marked with its image in one leaf of that free product, which makes the word
problem decidable by free-product normal forms plus leaf-local arithmetic.

Infinite relator families appear only as commutator schemes: the family
[a, t^-i a t^i] for i >= 1, which generates the kernel of the free group on
(a, t) onto Z wr Z.  Membership questions never truncate the scheme; they go
through exact evaluation in the marked quotient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .snf import AbelianInvariants, invariants_from_rows
from .words import (
    Word,
    RankMismatchError,
    commutator,
    conjugate,
    exponent_vector,
    format_word,
    parse_word,
    power,
)


class QuotientModelError(ValueError):
    """A marked quotient fails its structural or soundness checks."""


# ---------------------------------------------------------------------------
# structural group expressions


@dataclass(frozen=True)
class TrivialGroup:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class InfiniteCyclic:
    def __str__(self) -> str:
        return "Z"


@dataclass(frozen=True)
class FreeOfRank:
    rank: int

    def __str__(self) -> str:
        return f"F{self.rank}"


@dataclass(frozen=True)
class Lamplighter:
    def __str__(self) -> str:
        return "Z wr Z"


@dataclass(frozen=True)
class FreeProduct:
    parts: tuple["GroupExpr", ...]

    def __str__(self) -> str:
        return " * ".join(str(p) for p in self.parts)


GroupExpr = Union[TrivialGroup, InfiniteCyclic, FreeOfRank, Lamplighter, FreeProduct]
LeafExpr = Union[InfiniteCyclic, FreeOfRank, Lamplighter]


def free_product(parts) -> GroupExpr:
    """Flattened free product; trivial factors are dropped."""
    flat: list[GroupExpr] = []
    for p in parts:
        if isinstance(p, FreeProduct):
            flat.extend(p.parts)
        elif isinstance(p, TrivialGroup):
            continue
        else:
            flat.append(p)
    if not flat:
        return TrivialGroup()
    if len(flat) == 1:
        return flat[0]
    return FreeProduct(tuple(flat))


def leaves(expr: GroupExpr) -> tuple[LeafExpr, ...]:
    if isinstance(expr, TrivialGroup):
        return ()
    if isinstance(expr, FreeProduct):
        out: list[LeafExpr] = []
        for p in expr.parts:
            out.extend(leaves(p))
        return tuple(out)
    return (expr,)


def has_lamplighter(expr: GroupExpr) -> bool:
    return any(isinstance(leaf, Lamplighter) for leaf in leaves(expr))


def predicted_invariants(expr: GroupExpr) -> AbelianInvariants:
    """Abelianization read off the structural expression (always torsion-free)."""
    free_rank = 0
    for leaf in leaves(expr):
        if isinstance(leaf, InfiniteCyclic):
            free_rank += 1
        elif isinstance(leaf, FreeOfRank):
            free_rank += leaf.rank
        elif isinstance(leaf, Lamplighter):
            free_rank += 2
    return AbelianInvariants(free_rank, ())


def expr_to_json(expr: GroupExpr):
    if isinstance(expr, TrivialGroup):
        return {"kind": "trivial"}
    if isinstance(expr, InfiniteCyclic):
        return {"kind": "z"}
    if isinstance(expr, FreeOfRank):
        return {"kind": "free", "rank": expr.rank}
    if isinstance(expr, Lamplighter):
        return {"kind": "lamplighter"}
    return {"kind": "product", "parts": [expr_to_json(p) for p in expr.parts]}


def expr_from_json(data) -> GroupExpr:
    kind = data["kind"]
    if kind == "trivial":
        return TrivialGroup()
    if kind == "z":
        return InfiniteCyclic()
    if kind == "free":
        return FreeOfRank(int(data["rank"]))
    if kind == "lamplighter":
        return Lamplighter()
    if kind == "product":
        return FreeProduct(tuple(expr_from_json(p) for p in data["parts"]))
    raise QuotientModelError(f"unknown group expression kind {kind!r}")


# ---------------------------------------------------------------------------
# relator sets and commutator schemes


@dataclass(frozen=True)
class CommutatorScheme:
    """The relator family [a, t^-i a t^i], i >= 1."""

    a: Word
    t: Word

    def __post_init__(self):
        if self.a.rank != self.t.rank:
            raise RankMismatchError("scheme words must share a rank")
        if self.a.is_identity or self.t.is_identity:
            raise QuotientModelError("scheme words must be nontrivial")

    @property
    def rank(self) -> int:
        return self.a.rank

    def member(self, i: int) -> Word:
        if i < 1:
            raise ValueError(f"scheme member index must be >= 1, got {i}")
        return commutator(self.a, conjugate(self.a, power(self.t, i)))

    def promoted(self, rank: int) -> "CommutatorScheme":
        return CommutatorScheme(self.a.promoted(rank), self.t.promoted(rank))


def scheme_member(s: CommutatorScheme, i: int) -> Word:
    return s.member(i)


@dataclass(frozen=True)
class RelatorSet:
    rank: int
    finite_part: tuple[Word, ...]
    schemes: tuple[CommutatorScheme, ...] = ()

    def __post_init__(self):
        for w in self.finite_part:
            if w.rank != self.rank:
                raise RankMismatchError(f"relator rank {w.rank} != {self.rank}")
            if w.is_identity:
                raise QuotientModelError("finite relators must be nontrivial")
        for s in self.schemes:
            if s.rank != self.rank:
                raise RankMismatchError(f"scheme rank {s.rank} != {self.rank}")

    def promoted(self, rank: int) -> "RelatorSet":
        return RelatorSet(
            rank,
            tuple(w.promoted(rank) for w in self.finite_part),
            tuple(s.promoted(rank) for s in self.schemes),
        )

    def extended(self, extra) -> "RelatorSet":
        return RelatorSet(self.rank, self.finite_part + tuple(extra), self.schemes)


def relators_to_json(r: RelatorSet) -> dict:
    return {
        "rank": r.rank,
        "finite": [format_word(w) for w in r.finite_part],
        "schemes": [{"a": format_word(s.a), "t": format_word(s.t)} for s in r.schemes],
    }


def relators_from_json(data) -> RelatorSet:
    rank = int(data["rank"])
    finite = tuple(parse_word(text, rank) for text in data.get("finite", ()))
    schemes = tuple(
        CommutatorScheme(parse_word(s["a"], rank), parse_word(s["t"], rank))
        for s in data.get("schemes", ())
    )
    return RelatorSet(rank, finite, schemes)


# ---------------------------------------------------------------------------
# lamplighter arithmetic: elements are (shift, finitely supported Z -> Z)

LampElem = tuple[int, tuple[tuple[int, int], ...]]

LAMP_IDENTITY: LampElem = (0, ())


def _lamps_from_dict(d: dict[int, int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((p, v) for p, v in d.items() if v != 0))


def lamp_mul(x: LampElem, y: LampElem) -> LampElem:
    (s1, f1), (s2, f2) = x, y
    acc = dict(f1)
    for pos, val in f2:
        acc[pos + s1] = acc.get(pos + s1, 0) + val
    return (s1 + s2, _lamps_from_dict(acc))


def lamp_inv(x: LampElem) -> LampElem:
    s, f = x
    return (-s, _lamps_from_dict({p - s: -v for p, v in f}))


def lamplighter_eval(w: Word) -> tuple[int, dict[int, int]]:
    """Image of a rank-2 word under lamp = x1 -> (delta_0, 0), shift = x2 -> (0, +1)."""
    if w.rank != 2:
        raise RankMismatchError("lamplighter_eval expects a rank-2 word")
    lamp: LampElem = (0, ((0, 1),))
    shift: LampElem = (1, ())
    acc = LAMP_IDENTITY
    for idx, sign in w.letters:
        img = lamp if idx == 1 else shift
        acc = lamp_mul(acc, img if sign > 0 else lamp_inv(img))
    return acc[0], dict(acc[1])


# ---------------------------------------------------------------------------
# markings and normal forms


@dataclass(frozen=True)
class IdentityImage:
    def __str__(self) -> str:
        return "identity"


@dataclass(frozen=True)
class LeafImage:
    leaf: int
    value: int | str  # Z: exponent; free leaf: generator index; lamplighter: "lamp"/"shift"


MarkImage = Union[IdentityImage, LeafImage]


@dataclass(frozen=True)
class NormalForm:
    """Canonical free-product normal form: alternating leaf-local syllables."""

    syllables: tuple[tuple[int, object], ...] = ()

    @property
    def is_identity(self) -> bool:
        return not self.syllables

    def __len__(self) -> int:
        return len(self.syllables)


NF_IDENTITY = NormalForm(())


def _free_concat(p1, p2):
    out = list(p1)
    for idx, sign in p2:
        if out and out[-1][0] == idx and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((idx, sign))
    return tuple(out)


def _leaf_mul(leaf: LeafExpr, p1, p2):
    if isinstance(leaf, InfiniteCyclic):
        return p1 + p2
    if isinstance(leaf, FreeOfRank):
        return _free_concat(p1, p2)
    return lamp_mul(p1, p2)


def _leaf_is_identity(leaf: LeafExpr, payload) -> bool:
    if isinstance(leaf, InfiniteCyclic):
        return payload == 0
    if isinstance(leaf, FreeOfRank):
        return payload == ()
    return payload == LAMP_IDENTITY


def _image_payload(leaf: LeafExpr, value, sign: int):
    if isinstance(leaf, InfiniteCyclic):
        return value * sign
    if isinstance(leaf, FreeOfRank):
        return ((value, sign),)
    if value == "lamp":
        return (0, ((0, sign),))
    return (sign, ())


@dataclass(frozen=True)
class MarkedQuotient:
    """A quotient with decidable word problem: relators, a structural free
    product expression, and the image of every ambient generator."""

    rank: int
    relators: RelatorSet
    expr: GroupExpr
    marking: dict[str, MarkImage] | dict[int, MarkImage]

    def __post_init__(self):
        if self.relators.rank != self.rank:
            raise QuotientModelError("relator rank does not match quotient rank")
        lvs = leaves(self.expr)
        if set(self.marking) != set(range(1, self.rank + 1)):
            raise QuotientModelError("marking must cover exactly generators 1..rank")
        for idx, img in self.marking.items():
            if isinstance(img, IdentityImage):
                continue
            if not 0 <= img.leaf < len(lvs):
                raise QuotientModelError(f"marking of x{idx} uses unknown leaf {img.leaf}")
            leaf = lvs[img.leaf]
            if isinstance(leaf, InfiniteCyclic) and not isinstance(img.value, int):
                raise QuotientModelError(f"x{idx}: Z leaf image must be an integer")
            if isinstance(leaf, FreeOfRank) and not (
                isinstance(img.value, int) and 1 <= img.value <= leaf.rank
            ):
                raise QuotientModelError(f"x{idx}: free leaf image must be a generator index")
            if isinstance(leaf, Lamplighter) and img.value not in ("lamp", "shift"):
                raise QuotientModelError(f"x{idx}: lamplighter image must be lamp or shift")

    @property
    def leaf_list(self) -> tuple[LeafExpr, ...]:
        return leaves(self.expr)


def _push_syllable(syls, lvs, leaf_idx: int, payload) -> None:
    if _leaf_is_identity(lvs[leaf_idx], payload):
        return
    if syls and syls[-1][0] == leaf_idx:
        prev_leaf, prev_payload = syls.pop()
        merged = _leaf_mul(lvs[prev_leaf], prev_payload, payload)
        if not _leaf_is_identity(lvs[prev_leaf], merged):
            syls.append((prev_leaf, merged))
        return
    syls.append((leaf_idx, payload))


def eval_word(q: MarkedQuotient, w: Word) -> NormalForm:
    """Canonical normal form of the image of w; a homomorphism in w."""
    if w.rank != q.rank:
        raise RankMismatchError(f"word rank {w.rank} != quotient rank {q.rank}")
    lvs = q.leaf_list
    syls: list[tuple[int, object]] = []
    for idx, sign in w.letters:
        img = q.marking[idx]
        if isinstance(img, IdentityImage):
            continue
        _push_syllable(syls, lvs, img.leaf, _image_payload(lvs[img.leaf], img.value, sign))
    return NormalForm(tuple(syls))


def nf_mul(q: MarkedQuotient, n1: NormalForm, n2: NormalForm) -> NormalForm:
    lvs = q.leaf_list
    syls = list(n1.syllables)
    for leaf_idx, payload in n2.syllables:
        _push_syllable(syls, lvs, leaf_idx, payload)
    return NormalForm(tuple(syls))


def is_trivial(q: MarkedQuotient, w: Word) -> bool:
    return eval_word(q, w).is_identity


def check_soundness(q: MarkedQuotient, probe_bound: int = 3) -> None:
    """Every relator (scheme members probed up to the bound) must die in q."""
    for w in q.relators.finite_part:
        if not is_trivial(q, w):
            raise QuotientModelError(f"finite relator {format_word(w)} survives in quotient")
    for s in q.relators.schemes:
        for i in range(1, probe_bound + 1):
            if not is_trivial(q, s.member(i)):
                raise QuotientModelError(f"scheme member i={i} survives in quotient")


def abelianization(rank: int, r: RelatorSet) -> AbelianInvariants:
    """Invariants of Z^rank modulo the relator exponent vectors.

    Scheme members are commutators, hence have zero exponent vector and are
    skipped exactly (no truncation is involved).
    """
    rows = [exponent_vector(w) for w in r.finite_part]
    return invariants_from_rows(rank, rows)


# ---------------------------------------------------------------------------
# serialization


def _payload_to_json(payload):
    # payload shapes are disjoint: int (Z leaf), tuple of letter pairs
    # (free leaf), (shift, lamps) pair (lamplighter leaf)
    if isinstance(payload, int):
        return {"z": payload}
    if len(payload) == 2 and isinstance(payload[0], int):
        return {"shift": payload[0], "lamps": [[p, v] for p, v in payload[1]]}
    return {"letters": [[i, s] for i, s in payload]}


def _payload_from_json(data):
    if "z" in data:
        return int(data["z"])
    if "shift" in data:
        return (int(data["shift"]), tuple((int(p), int(v)) for p, v in data["lamps"]))
    return tuple((int(i), int(s)) for i, s in data["letters"])


def nf_to_json(nf: NormalForm) -> list:
    return [
        {"leaf": leaf_idx, **_payload_to_json(payload)}
        for leaf_idx, payload in nf.syllables
    ]


def nf_from_json(data) -> NormalForm:
    return NormalForm(
        tuple((int(entry["leaf"]), _payload_from_json(entry)) for entry in data)
    )


def marking_to_json(marking) -> dict:
    out = {}
    for idx in sorted(marking):
        img = marking[idx]
        if isinstance(img, IdentityImage):
            out[str(idx)] = "identity"
        else:
            out[str(idx)] = {"leaf": img.leaf, "value": img.value}
    return out


def marking_from_json(data) -> dict[int, MarkImage]:
    out: dict[int, MarkImage] = {}
    for key, val in data.items():
        if val == "identity":
            out[int(key)] = IdentityImage()
        else:
            value = val["value"]
            out[int(key)] = LeafImage(int(val["leaf"]), value)
    return out


def quotient_to_json(q: MarkedQuotient) -> dict:
    return {
        "rank": q.rank,
        "relators": relators_to_json(q.relators),
        "expr": expr_to_json(q.expr),
        "marking": marking_to_json(q.marking),
    }


def quotient_from_json(data) -> MarkedQuotient:
    return MarkedQuotient(
        rank=int(data["rank"]),
        relators=relators_from_json(data["relators"]),
        expr=expr_from_json(data["expr"]),
        marking=marking_from_json(data["marking"]),
    )
