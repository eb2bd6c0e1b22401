"""Batch front-end: realize -> verify -> report pipelines over JSON files.

Exit codes: 0 = pass, 1 = math-level failure or inconclusive verification,
2 = input error (bad JSON, cycles, rank mismatches, unknown names).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import ceplab, dag as dagmod
from .realizer import (
    cep_transfer,
    lattice_to_dot,
    load_embedding,
    presentations_to_json,
    realization_from_json,
    realization_to_json,
    realize,
)
from .verifier import certificate_to_json, check_certificate_detailed, report_to_json, verify_all


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    out: Path | None = None
    bound: int = 5
    emit_dot: bool = False
    seed: int = 0
    embedding: Path | None = None


def _write_json(path: Path, data) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def _write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _outdir(cfg: RunConfig) -> Path:
    out = cfg.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_realize(cfg: RunConfig) -> int:
    try:
        d = dagmod.load(cfg.input)
    except (dagmod.DagError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    r = realize(d)
    report = verify_all(r, cfg.bound)
    out = _outdir(cfg)
    _write_json(out / "realization.json", realization_to_json(r))
    _write_json(out / "report.json", report_to_json(report))
    _write_text(out / "lattice.dot", lattice_to_dot(r))
    if cfg.emit_dot:
        _write_text(out / "dag.dot", dagmod.to_dot(d))
    print(
        f"realized {len(d.vertices)} vertices in ambient free rank "
        f"{r.ambient_rank}; verdict: {'pass' if report.verdict else 'FAIL'}"
    )
    return 0 if report.verdict else 1


def cmd_verify(cfg: RunConfig) -> int:
    try:
        with open(cfg.input, encoding="utf-8") as fh:
            r = realization_from_json(json.load(fh))
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = verify_all(r, cfg.bound)
    out = _outdir(cfg)
    _write_json(out / "report.json", report_to_json(report))
    if cfg.emit_dot:
        _write_text(out / "lattice.dot", lattice_to_dot(r))
    print(f"verdict: {'pass' if report.verdict else 'FAIL'} "
          f"({report.inconclusive} inconclusive)")
    return 0 if report.verdict else 1


def cmd_transfer(cfg: RunConfig) -> int:
    try:
        with open(cfg.input, encoding="utf-8") as fh:
            r = realization_from_json(json.load(fh))
        e = load_embedding(cfg.embedding)
        presentations = cep_transfer(r, e)
    except (KeyError, ValueError, OSError) as exc:
        # covers RealizerError, WordError, rank mismatches, missing basis words
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = _outdir(cfg)
    note = "valid conditional on CEP of the supplied basis"
    if e.note:
        note += f"; embedding provenance: {e.note}"
    _write_json(out / "presentations.json", presentations_to_json(presentations, note))
    print(f"transferred {len(presentations)} vertex presentations "
          f"(conditional on CEP of the supplied basis)")
    return 0


def cmd_cep(cfg: RunConfig, group_name: str | None, subgroup_gens, scan: bool, max_s: int | None) -> int:
    try:
        if group_name:
            g = ceplab.builtin_group(group_name)
            label = group_name
        else:
            g = ceplab.load_group(cfg.input)
            label = str(cfg.input)
    except (ceplab.GroupTableError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result: dict = {"group": label, "order": g.order}
    code = 0
    if scan:
        rep = ceplab.cep_transitivity_scan(g, label)
        result["transitivity_scan"] = {
            "chains_checked": rep.chains_checked,
            "violations": [
                {"kind": kind, "inner": g.name_set(h), "middle": g.name_set(k)}
                for kind, h, k in rep.violations
            ],
        }
        if not rep.ok:
            code = 1
    if subgroup_gens:
        try:
            h = ceplab.subgroup_from_generator_names(g, subgroup_gens)
        except ceplab.GroupTableError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        is_cep, violation = ceplab.is_cep_finite(g, h)
        result["subgroup"] = g.name_set(h.elements)
        result["is_cep"] = is_cep
        if violation is not None:
            result["violation"] = {
                "normal_subgroup": g.name_set(violation.seed_normal),
                "intersection_with_ambient_closure": g.name_set(violation.intersection),
            }
        if max_s is not None:
            witness = ceplab.is_almost_cep_finite(g, h, max_s)
            result["almost_cep_witness"] = (
                None if witness is None else g.name_set(witness)
            )
    text = json.dumps(result, indent=2, sort_keys=True)
    if cfg.out:
        _write_json(_outdir(cfg) / "cep.json", result)
    print(text)
    return code


def _demo_counterexample(cfg: RunConfig) -> int:
    cert = ceplab.free_counterexample_demo()
    ok, problems = check_certificate_detailed(None, cert)
    out = _outdir(cfg)
    _write_json(out / "certificate.json", certificate_to_json(cert))
    lines = ["free-group congruence extension counterexample", ""]
    lines += [f"* {note}" for note in cert.notes]
    lines.append("")
    for t in cert.traces:
        shape = "identity" if t.expected.is_identity else "nontrivial"
        lines.append(f"checked {t.label}: image is {shape}")
    for f in cert.word_facts:
        lines.append(f"checked {f.label}: substitution identity holds")
    lines.append("")
    lines.append(f"certificate re-check: {'pass' if ok else 'FAIL: ' + '; '.join(problems)}")
    _write_text(out / "transcript.txt", "\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0 if ok else 1


def _demo_s4_d4(cfg: RunConfig) -> int:
    g, h = ceplab.d4_in_s4()
    is_cep, violation = ceplab.is_cep_finite(g, h)
    verified = False
    if violation is not None:
        closure = ceplab.normal_closure_in(
            g, frozenset(range(g.order)), violation.seed_normal
        )
        verified = (closure & h.elements) == violation.intersection and (
            violation.intersection != violation.seed_normal
        )
    out = _outdir(cfg)
    result = {
        "group": "s4",
        "subgroup": g.name_set(h.elements),
        "is_cep": is_cep,
        "violation": None
        if violation is None
        else {
            "normal_subgroup": g.name_set(violation.seed_normal),
            "intersection_with_ambient_closure": g.name_set(violation.intersection),
        },
        "recheck": verified,
    }
    _write_json(out / "cep_violation.json", result)
    lines = [
        "dihedral Sylow subgroup of the symmetric group on 4 points",
        f"CEP holds: {is_cep}",
    ]
    if violation is not None:
        lines.append(
            "violating normal subgroup: "
            + ", ".join(g.name_set(violation.seed_normal))
        )
        lines.append(
            "meets ambient closure in: "
            + ", ".join(g.name_set(violation.intersection))
        )
        lines.append(f"both sides recomputed and unequal: {verified}")
    _write_text(out / "transcript.txt", "\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0 if (not is_cep and verified) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dagquot",
        description="realize colored DAGs as normal-subgroup lattices of free "
        "groups, verify with algebraic certificates, transfer along CEP embeddings",
    )
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for sampled operations (default 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realize", help="realize a colored DAG JSON file and verify")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--bound", type=int, default=5)
    p.add_argument("--dot", action="store_true", help="also emit the input DAG as DOT")

    p = sub.add_parser("verify", help="re-verify a stored realization")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--bound", type=int, default=5)
    p.add_argument("--dot", action="store_true")

    p = sub.add_parser("transfer", help="rewrite a realization along a CEP embedding")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--embedding", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("cep", help="finite-group CEP checks")
    p.add_argument("--group", choices=ceplab.builtin_names())
    p.add_argument("--input", type=Path, help="group JSON (table or permutations)")
    p.add_argument("--subgroup", nargs="+", metavar="ELEM",
                   help="generator names of the subgroup, e.g. '(1 2 3 4)'")
    p.add_argument("--scan", action="store_true", help="run the transitivity scan")
    p.add_argument("--max-s", type=int, default=None,
                   help="also search for an almost-CEP witness set up to this size")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("demo", help="reproduce a bundled worked example")
    p.add_argument("name", choices=["sec3-counterexample", "s4-d4-cep"])
    p.add_argument("--out", required=True, type=Path)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(
        command=args.command,
        input=getattr(args, "input", None),
        out=getattr(args, "out", None),
        bound=getattr(args, "bound", 5),
        emit_dot=getattr(args, "dot", False),
        seed=args.seed,
        embedding=getattr(args, "embedding", None),
    )
    if cfg.bound < 1:
        print("error: --bound must be >= 1", file=sys.stderr)
        return 2
    if cfg.command == "realize":
        return cmd_realize(cfg)
    if cfg.command == "verify":
        return cmd_verify(cfg)
    if cfg.command == "transfer":
        return cmd_transfer(cfg)
    if cfg.command == "cep":
        if not args.group and not cfg.input:
            print("error: cep needs --group or --input", file=sys.stderr)
            return 2
        return cmd_cep(cfg, args.group, args.subgroup, args.scan, args.max_s)
    if cfg.command == "demo":
        if args.name == "sec3-counterexample":
            return _demo_counterexample(cfg)
        return _demo_s4_d4(cfg)
    print(f"error: unknown command {cfg.command!r}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
