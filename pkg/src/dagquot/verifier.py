"""Certificates that a realization satisfies its defining conditions, plus an
independent re-checker.

Three certificate kinds cover the realization conditions:

  * inclusion - reachable pairs: every generator of the source normal
    subgroup evaluates to the identity in the target quotient.  Scheme
    generators carry a coverage tag: "exact" when a structural reason kills
    every member at once (trivial images, or images inside one lamplighter
    leaf with zero shift, whose base is abelian), otherwise "probed" up to
    the bound.
  * separation - unreachable ordered pairs: a witness generator of the
    source with a nontrivial normal form in the target quotient.  A failed
    search is reported as inconclusive, never as a pass.
  * color - the structural biconditional: color 0 iff the relator set is
    scheme-free iff the quotient expression has no lamplighter leaf.  (Free
    products of finitely presented groups are finitely presented; a free
    product with a non-finitely-presented factor is not.)

Certificates store enough evidence to be re-checked from scratch by
evaluation alone; ``check_certificate`` shares no state with generation.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from typing import Union

from .quotients import (
    Lamplighter,
    MarkedQuotient,
    NormalForm,
    abelianization,
    eval_word,
    nf_from_json,
    nf_to_json,
    predicted_invariants,
    quotient_from_json,
    quotient_to_json,
)
from .realizer import Realization
from .words import Word, Hom, apply_hom, format_word, parse_word
from .dag import leq


class VerifierError(ValueError):
    pass


class NotComparableError(VerifierError):
    pass


class TraceFailedError(VerifierError):
    """A relator of the source survives in the target quotient: the
    realization itself is broken, so this is surfaced, not swallowed."""


class WitnessNotFoundError(VerifierError):
    def __init__(self, bound: int):
        self.bound = bound
        super().__init__(f"no separation witness found up to scheme bound {bound}")


class StructureMismatchError(VerifierError):
    pass


QuotientRef = Union[str, MarkedQuotient]  # vertex id, or an inline quotient


@dataclass(frozen=True)
class EvalTrace:
    label: str
    quotient: QuotientRef
    word: Word
    expected: NormalForm


@dataclass(frozen=True)
class SchemeCoverage:
    scheme_index: int
    coverage: str  # "exact" | "probed"
    reason: str


@dataclass(frozen=True)
class WitnessEvidence:
    word: Word
    provenance: str  # e.g. "finite[2]" or "scheme[0].member[3]"
    image: NormalForm  # nontrivial normal form in the target quotient


@dataclass(frozen=True)
class ColorFacts:
    color: int
    scheme_free: bool
    lamplighter_free: bool
    justification: str


@dataclass(frozen=True)
class SubstitutionFact:
    """A pure word identity: expression(basis words) reduces to target."""

    label: str
    basis: tuple[Word, ...]
    expression: Word
    target: Word


@dataclass(frozen=True)
class Certificate:
    kind: str  # "inclusion" | "separation" | "color" | "cep-counterexample"
    subject: tuple[str, ...]
    bound: int = 0
    traces: tuple[EvalTrace, ...] = ()
    scheme_coverage: tuple[SchemeCoverage, ...] = ()
    witness: WitnessEvidence | None = None
    color_facts: ColorFacts | None = None
    word_facts: tuple[SubstitutionFact, ...] = ()
    notes: tuple[str, ...] = ()


def _resolve(r: Realization | None, ref: QuotientRef) -> MarkedQuotient:
    if isinstance(ref, MarkedQuotient):
        return ref
    if r is None:
        raise VerifierError(f"certificate references vertex {ref!r} but no realization given")
    if ref not in r.assignment:
        raise VerifierError(f"unknown vertex {ref!r}")
    return r.assignment[ref]


# ---------------------------------------------------------------------------
# certificate generation


JUSTIFICATION_COLOR = (
    "free products of finitely presented groups are finitely presented; "
    "a free product with a non-finitely-presented factor is not finitely presented"
)


def _scheme_exactness(qv: MarkedQuotient, scheme) -> tuple[str, str]:
    """Decide whether all scheme members die in qv at once."""
    img_a = eval_word(qv, scheme.a)
    img_t = eval_word(qv, scheme.t)
    if img_a.is_identity:
        return "exact", "a-image-trivial"
    if img_t.is_identity:
        return "exact", "t-image-trivial"
    if (
        len(img_a) == 1
        and len(img_t) == 1
        and img_a.syllables[0][0] == img_t.syllables[0][0]
        and isinstance(qv.leaf_list[img_a.syllables[0][0]], Lamplighter)
        and img_a.syllables[0][1][0] == 0
    ):
        # conjugation preserves the zero shift and the base group of the
        # lamplighter leaf is abelian, so a commutes with all its conjugates
        return "exact", "abelian-base-zero-shift"
    return "probed", f"members checked for i <= bound only"


def certify_inclusion(r: Realization, u: str, v: str, bound: int = 5) -> Certificate:
    if not leq(r.dag, u, v):
        raise NotComparableError(f"no path {u} -> {v}")
    qv = r.assignment[v]
    rel_u = r.assignment[u].relators
    traces: list[EvalTrace] = []
    for k, w in enumerate(rel_u.finite_part):
        nf = eval_word(qv, w)
        if not nf.is_identity:
            raise TraceFailedError(
                f"relator finite[{k}] of {u} survives in quotient of {v}"
            )
        traces.append(EvalTrace(f"finite[{k}]", v, w, nf))
    coverage: list[SchemeCoverage] = []
    for si, s in enumerate(rel_u.schemes):
        traces.append(EvalTrace(f"scheme[{si}].a", v, s.a, eval_word(qv, s.a)))
        traces.append(EvalTrace(f"scheme[{si}].t", v, s.t, eval_word(qv, s.t)))
        for i in range(1, bound + 1):
            member = s.member(i)
            nf = eval_word(qv, member)
            if not nf.is_identity:
                raise TraceFailedError(
                    f"scheme[{si}] member i={i} of {u} survives in quotient of {v}"
                )
            traces.append(EvalTrace(f"scheme[{si}].member[{i}]", v, member, nf))
        cov, reason = _scheme_exactness(qv, s)
        coverage.append(SchemeCoverage(si, cov, reason))
    return Certificate(
        kind="inclusion",
        subject=(u, v),
        bound=bound,
        traces=tuple(traces),
        scheme_coverage=tuple(coverage),
    )


def _witness_candidates(rel, bound: int):
    cands = [(w, f"finite[{k}]") for k, w in enumerate(rel.finite_part)]
    for si, s in enumerate(rel.schemes):
        cands.extend(
            (s.member(i), f"scheme[{si}].member[{i}]") for i in range(1, bound + 1)
        )
    return sorted(cands, key=lambda c: (len(c[0]), c[0].letters))


def certify_separation(r: Realization, u: str, v: str, bound: int = 5) -> Certificate:
    if leq(r.dag, u, v):
        raise NotComparableError(f"path {u} -> {v} exists; nothing to separate")
    qv = r.assignment[v]
    for w, provenance in _witness_candidates(r.assignment[u].relators, bound):
        nf = eval_word(qv, w)
        if not nf.is_identity:
            return Certificate(
                kind="separation",
                subject=(u, v),
                bound=bound,
                witness=WitnessEvidence(w, provenance, nf),
            )
    raise WitnessNotFoundError(bound)


def certify_distinctness(r: Realization, u: str, v: str, bound: int = 5) -> Certificate:
    if u == v:
        raise NotComparableError("distinctness needs two distinct vertices")
    # certify in a direction that is NOT below: a witness in the source that
    # survives in the target shows the two normal subgroups differ
    note = f"distinctness of ({u}, {v})"
    if leq(r.dag, u, v):
        cert = certify_separation(r, v, u, bound)
    elif leq(r.dag, v, u):
        cert = certify_separation(r, u, v, bound)
    else:
        try:
            cert = certify_separation(r, u, v, bound)
        except WitnessNotFoundError:
            cert = certify_separation(r, v, u, bound)
    return Certificate(
        kind=cert.kind,
        subject=cert.subject,
        bound=cert.bound,
        witness=cert.witness,
        notes=(note,),
    )


def certify_color(r: Realization, v: str) -> Certificate:
    q = r.assignment[v]
    color = r.dag.color[v]
    scheme_free = not q.relators.schemes
    from .quotients import has_lamplighter

    lamp_free = not has_lamplighter(q.expr)
    if not ((color == 0) == scheme_free == lamp_free):
        raise StructureMismatchError(
            f"vertex {v}: color {color}, scheme_free={scheme_free}, "
            f"lamplighter_free={lamp_free}"
        )
    return Certificate(
        kind="color",
        subject=(v,),
        color_facts=ColorFacts(color, scheme_free, lamp_free, JUSTIFICATION_COLOR),
    )


# ---------------------------------------------------------------------------
# independent re-checking


_PROV_FINITE = re.compile(r"^finite\[(\d+)\]$")
_PROV_SCHEME = re.compile(r"^scheme\[(\d+)\]\.member\[(\d+)\]$")


def _witness_is_generator(r: Realization, source: str, w: WitnessEvidence) -> bool:
    rel = r.assignment[source].relators
    m = _PROV_FINITE.match(w.provenance)
    if m:
        k = int(m.group(1))
        return k < len(rel.finite_part) and rel.finite_part[k] == w.word
    m = _PROV_SCHEME.match(w.provenance)
    if m:
        si, i = int(m.group(1)), int(m.group(2))
        return si < len(rel.schemes) and rel.schemes[si].member(i) == w.word
    return False


def check_certificate_detailed(
    r: Realization | None, c: Certificate
) -> tuple[bool, list[str]]:
    """Re-run every piece of evidence from scratch; list all mismatches."""
    problems: list[str] = []

    for t in c.traces:
        try:
            q = _resolve(r, t.quotient)
            nf = eval_word(q, t.word)
        except Exception as exc:  # malformed trace counts as a failure
            problems.append(f"trace {t.label}: {exc}")
            continue
        if nf != t.expected:
            problems.append(
                f"trace {t.label}: recomputed normal form differs for "
                f"{format_word(t.word) or '1'}"
            )

    try:
        _check_kind_specific(r, c, problems)
    except Exception as exc:  # malformed subject/evidence counts as a failure
        problems.append(f"certificate is malformed: {exc}")

    for f in c.word_facts:
        try:
            h = Hom(len(f.basis), f.target.rank, f.basis)
            if apply_hom(h, f.expression) != f.target:
                problems.append(f"word fact {f.label}: substitution identity fails")
        except Exception as exc:
            problems.append(f"word fact {f.label}: {exc}")

    return not problems, problems


def _check_kind_specific(r: Realization | None, c: Certificate, problems: list[str]) -> None:
    if c.kind == "inclusion" and r is not None:
        u, v = c.subject
        rel = r.assignment[u].relators
        have = {t.label for t in c.traces}
        need = {f"finite[{k}]" for k in range(len(rel.finite_part))}
        for si in range(len(rel.schemes)):
            need |= {f"scheme[{si}].member[{i}]" for i in range(1, c.bound + 1)}
            need |= {f"scheme[{si}].a", f"scheme[{si}].t"}
        if not need <= have:
            problems.append(f"inclusion evidence is missing traces: {sorted(need - have)}")
        for t in c.traces:
            if (t.label.startswith("finite[") or ".member[" in t.label) and not t.expected.is_identity:
                problems.append(f"trace {t.label}: expected form is not the identity")
        covered = {sc.scheme_index for sc in c.scheme_coverage}
        if covered != set(range(len(rel.schemes))):
            problems.append("scheme coverage tags do not match the scheme list")
        for sc in c.scheme_coverage:
            if sc.coverage == "exact":
                qv = r.assignment[v]
                cov, reason = _scheme_exactness(qv, rel.schemes[sc.scheme_index])
                if cov != "exact" or reason != sc.reason:
                    problems.append(
                        f"scheme[{sc.scheme_index}]: exactness reason "
                        f"{sc.reason!r} does not re-derive"
                    )

    if c.kind == "separation":
        if c.witness is None:
            problems.append("separation certificate carries no witness")
        elif r is not None:
            u, v = c.subject
            if not _witness_is_generator(r, u, c.witness):
                problems.append(
                    f"witness provenance {c.witness.provenance!r} does not "
                    f"match the relators of {u}"
                )
            nf = eval_word(r.assignment[v], c.witness.word)
            if nf.is_identity:
                problems.append("witness image is trivial in the target quotient")
            if nf != c.witness.image:
                problems.append("stored witness normal form does not re-derive")

    if c.kind == "color":
        if c.color_facts is None:
            problems.append("color certificate carries no facts")
        elif r is not None:
            (v,) = c.subject
            q = r.assignment[v]
            from .quotients import has_lamplighter

            facts = ColorFacts(
                r.dag.color[v],
                not q.relators.schemes,
                not has_lamplighter(q.expr),
                c.color_facts.justification,
            )
            if facts != c.color_facts:
                problems.append("color facts do not re-derive from the realization")
            elif not ((facts.color == 0) == facts.scheme_free == facts.lamplighter_free):
                problems.append("color biconditional fails")


def check_certificate(r: Realization | None, c: Certificate) -> bool:
    ok, _ = check_certificate_detailed(r, c)
    return ok


# ---------------------------------------------------------------------------
# whole-realization verification


@dataclass
class ReportEntry:
    check: str  # inclusion | separation | distinctness | color | abelianization
    subject: tuple[str, ...]
    status: str  # pass | fail | inconclusive
    detail: str = ""
    certificate: Certificate | None = None


@dataclass
class Report:
    entries: list[ReportEntry]
    verdict: bool
    elapsed: float
    bound: int

    def count(self, check: str, status: str | None = None) -> int:
        return sum(
            1
            for e in self.entries
            if e.check == check and (status is None or e.status == status)
        )

    @property
    def inconclusive(self) -> int:
        return sum(1 for e in self.entries if e.status == "inconclusive")


def verify_all(r: Realization, bound: int = 5) -> Report:
    """Certify every pair and vertex, re-check each certificate, and
    cross-check every vertex's abelianization against its structural
    expression."""
    start = time.perf_counter()
    entries: list[ReportEntry] = []
    ids = sorted(r.assignment)

    def run(check: str, subject: tuple[str, ...], make) -> None:
        try:
            cert = make()
        except WitnessNotFoundError as exc:
            entries.append(ReportEntry(check, subject, "inconclusive", str(exc)))
            return
        except (TraceFailedError, StructureMismatchError) as exc:
            entries.append(ReportEntry(check, subject, "fail", str(exc)))
            return
        ok, problems = check_certificate_detailed(r, cert)
        status = "pass" if ok else "fail"
        entries.append(ReportEntry(check, subject, status, "; ".join(problems), cert))

    for u in ids:
        for v in ids:
            if u == v:
                continue
            if leq(r.dag, u, v):
                run("inclusion", (u, v), lambda u=u, v=v: certify_inclusion(r, u, v, bound))
            else:
                run("separation", (u, v), lambda u=u, v=v: certify_separation(r, u, v, bound))
    for i, u in enumerate(ids):
        for v in ids[i + 1:]:
            run("distinctness", (u, v), lambda u=u, v=v: certify_distinctness(r, u, v, bound))
    for v in ids:
        run("color", (v,), lambda v=v: certify_color(r, v))

    for v in ids:
        q = r.assignment[v]
        computed = abelianization(q.rank, q.relators)
        predicted = predicted_invariants(q.expr)
        if computed == predicted:
            entries.append(ReportEntry("abelianization", (v,), "pass", str(computed)))
        else:
            entries.append(
                ReportEntry(
                    "abelianization",
                    (v,),
                    "fail",
                    f"computed {computed} but structure predicts {predicted}",
                )
            )

    verdict = all(e.status == "pass" for e in entries)
    return Report(entries, verdict, time.perf_counter() - start, bound)


# ---------------------------------------------------------------------------
# serialization


def _ref_to_json(ref: QuotientRef):
    if isinstance(ref, MarkedQuotient):
        return {"inline": quotient_to_json(ref)}
    return {"vertex": ref}


def _ref_from_json(data) -> QuotientRef:
    if "inline" in data:
        return quotient_from_json(data["inline"])
    return data["vertex"]


def _word_to_json(w: Word) -> dict:
    return {"rank": w.rank, "word": format_word(w)}


def _word_from_json(data) -> Word:
    return parse_word(data["word"], int(data["rank"]))


def certificate_to_json(c: Certificate) -> dict:
    out: dict = {"kind": c.kind, "subject": list(c.subject), "bound": c.bound}
    out["traces"] = [
        {
            "label": t.label,
            "quotient": _ref_to_json(t.quotient),
            "word": _word_to_json(t.word),
            "expected": nf_to_json(t.expected),
        }
        for t in c.traces
    ]
    out["scheme_coverage"] = [
        {"scheme": sc.scheme_index, "coverage": sc.coverage, "reason": sc.reason}
        for sc in c.scheme_coverage
    ]
    if c.witness is not None:
        out["witness"] = {
            "word": _word_to_json(c.witness.word),
            "provenance": c.witness.provenance,
            "image": nf_to_json(c.witness.image),
        }
    if c.color_facts is not None:
        out["color_facts"] = {
            "color": c.color_facts.color,
            "scheme_free": c.color_facts.scheme_free,
            "lamplighter_free": c.color_facts.lamplighter_free,
            "justification": c.color_facts.justification,
        }
    out["word_facts"] = [
        {
            "label": f.label,
            "basis": [_word_to_json(w) for w in f.basis],
            "expression": _word_to_json(f.expression),
            "target": _word_to_json(f.target),
        }
        for f in c.word_facts
    ]
    out["notes"] = list(c.notes)
    return out


def certificate_from_json(data) -> Certificate:
    witness = None
    if data.get("witness"):
        witness = WitnessEvidence(
            _word_from_json(data["witness"]["word"]),
            data["witness"]["provenance"],
            nf_from_json(data["witness"]["image"]),
        )
    color_facts = None
    if data.get("color_facts"):
        cf = data["color_facts"]
        color_facts = ColorFacts(
            int(cf["color"]), bool(cf["scheme_free"]),
            bool(cf["lamplighter_free"]), cf["justification"],
        )
    return Certificate(
        kind=data["kind"],
        subject=tuple(data["subject"]),
        bound=int(data.get("bound", 0)),
        traces=tuple(
            EvalTrace(
                t["label"],
                _ref_from_json(t["quotient"]),
                _word_from_json(t["word"]),
                nf_from_json(t["expected"]),
            )
            for t in data.get("traces", ())
        ),
        scheme_coverage=tuple(
            SchemeCoverage(int(sc["scheme"]), sc["coverage"], sc["reason"])
            for sc in data.get("scheme_coverage", ())
        ),
        witness=witness,
        color_facts=color_facts,
        word_facts=tuple(
            SubstitutionFact(
                f["label"],
                tuple(_word_from_json(w) for w in f["basis"]),
                _word_from_json(f["expression"]),
                _word_from_json(f["target"]),
            )
            for f in data.get("word_facts", ())
        ),
        notes=tuple(data.get("notes", ())),
    )


def report_to_json(rep: Report) -> dict:
    return {
        "verdict": "pass" if rep.verdict else "fail",
        "bound": rep.bound,
        "elapsed_seconds": round(rep.elapsed, 6),
        "counts": {
            "pass": sum(1 for e in rep.entries if e.status == "pass"),
            "fail": sum(1 for e in rep.entries if e.status == "fail"),
            "inconclusive": rep.inconclusive,
        },
        "entries": [
            {
                "check": e.check,
                "subject": list(e.subject),
                "status": e.status,
                "detail": e.detail,
                "certificate": (
                    certificate_to_json(e.certificate) if e.certificate else None
                ),
            }
            for e in rep.entries
        ],
    }
