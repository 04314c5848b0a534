"""Command-line front end.

Subcommands: enum, orbit, fixed, partition, stabilizer, coinv, snf, cw,
transfer, certify, check, braid-check.  All JSON output is schema-versioned
and byte-identical across runs and worker counts.

Exit codes: 0 success, 2 inconclusive certificate, 64 usage error,
65 data/validation error, 1 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import autos, orbits, subgroups, targets, words
from .certify import (
    InternalInvariantError,
    braid_invariant_check,
    certify as run_certify,
    check_certificate,
)
from .linalg import IntMatrix, coinvariants, snf

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65

HOM_SCHEMA = "finorbit/hom/1"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_cap() -> int:
    env = os.environ.get("FINORBIT_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"FINORBIT_CAP must be an integer, got {env!r}")
    return orbits.DEFAULT_ORBIT_CAP


def build_parser() -> _Parser:
    p = _Parser(prog="finorbit")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kwargs):
        return sub.add_parser(name, **kwargs)

    enum = add("enum", help="enumerate Hom(group, target) for a finite target")
    enum.add_argument("--group", required=True)
    enum.add_argument("--target", required=True)
    enum.add_argument("--budget", type=int, default=1_000_000)
    enum.add_argument("--conjugacy", action="store_true")
    enum.add_argument("--out")

    orb = add("orbit", help="BFS orbit of a homomorphism under a catalog")
    orb.add_argument("--hom", required=True)
    orb.add_argument("--gens", required=True)
    orb.add_argument("--cap", type=int, default=None)
    orb.add_argument("--workers", type=int, default=1)
    orb.add_argument("--dot")
    orb.add_argument("--out")

    fixed = add("fixed", help="homomorphisms fixed by every catalog entry")
    fixed.add_argument("--group", required=True)
    fixed.add_argument("--target", required=True)
    fixed.add_argument("--gens", required=True)
    fixed.add_argument("--budget", type=int, default=1_000_000)
    fixed.add_argument("--out")

    part = add("partition", help="orbit partition of Hom(group, target)")
    part.add_argument("--group", required=True)
    part.add_argument("--target", required=True)
    part.add_argument("--gens", required=True)
    part.add_argument("--budget", type=int, default=1_000_000)
    part.add_argument("--out")

    stab = add("stabilizer", help="Schreier generators of an orbit stabilizer")
    stab.add_argument("--hom", required=True)
    stab.add_argument("--gens", required=True)
    stab.add_argument("--cap", type=int, default=None)
    stab.add_argument("--out")

    coinv = add("coinv", help="co-invariants of a matrix action on Z^n")
    coinv.add_argument("--dim", type=int, required=True)
    coinv.add_argument("--matrices", required=True)
    coinv.add_argument("--out")

    snf_cmd = add("snf", help="Smith normal form with transforms")
    snf_cmd.add_argument("--matrix", required=True)
    snf_cmd.add_argument("--out")

    cw = add("cw", help="character decomposition check for a finite quotient")
    cw.add_argument("--group", required=True)
    cw.add_argument("--quotient", required=True)
    cw.add_argument("--format", choices=["json", "text"], default="json")
    cw.add_argument("--out")

    tr = add("transfer", help="transfer matrix into the kernel homology")
    tr.add_argument("--group", required=True)
    tr.add_argument("--quotient", required=True)
    tr.add_argument("--out")

    cert = add("certify", help="run the image-finiteness certificate pipeline")
    cert.add_argument("--hom", required=True)
    cert.add_argument("--gens", required=True)
    cert.add_argument("--orbit-cap", type=int, default=None)
    cert.add_argument("--closure-cap", type=int, default=None)
    cert.add_argument("--workers", type=int, default=1)
    cert.add_argument("--out")

    chk = add("check", help="re-verify a certificate without re-running the pipeline")
    chk.add_argument("--cert", required=True)
    chk.add_argument("--out")

    braid = add("braid-check", help="braid invariance of the exponent-sum map")
    braid.add_argument("--n", type=int, required=True)
    braid.add_argument("--order-cap", type=int, default=1000)
    braid.add_argument("--out")

    return p


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------


def load_gallery(name: str) -> dict:
    from importlib import resources

    ref = resources.files("finorbit").joinpath(f"gallery/{name}.json")
    if not ref.is_file():
        raise DataError(f"no gallery instance named {name!r}")
    return json.loads(ref.read_text(encoding="utf-8"))


def load_hom(spec: str) -> orbits.Homomorphism:
    if spec.startswith("gallery:"):
        doc = load_gallery(spec[len("gallery:") :])
    else:
        try:
            with open(spec, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read homomorphism file {spec!r}: {exc}")
    if doc.get("schema") != HOM_SCHEMA:
        raise DataError(f"expected schema {HOM_SCHEMA!r} in {spec!r}")
    p = words.presentation_from_json(doc["presentation"])
    target = targets.parse_target(doc["target"])
    images = tuple(target.element_from_json(e) for e in doc["images"])
    return orbits.Homomorphism(p, target, images)


def hom_to_json(h: orbits.Homomorphism, name: str | None = None) -> dict:
    doc = {"schema": HOM_SCHEMA, **h.to_json()}
    if name:
        doc["name"] = name
    return doc


def parse_quotient_spec(p: words.Presentation, spec: str) -> subgroups.FiniteQuotient:
    """``<target>:<json image list>``, e.g. cyclic:2:[1,1]."""
    head, _, tail = spec.rpartition(":")
    if not head or not tail.startswith("["):
        raise DataError(f"malformed quotient spec {spec!r}")
    target = targets.parse_target(head)
    try:
        raw = json.loads(tail)
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed quotient images in {spec!r}: {exc}")
    images = tuple(target.element_from_json(e) for e in raw)
    return subgroups.finite_quotient(p, target, images)


def _parse_group(spec: str) -> words.Presentation:
    try:
        return words.parse_group_spec(spec)
    except ValueError as exc:
        raise UsageError(str(exc))


def _parse_target(spec: str) -> targets.TargetGroup:
    try:
        return targets.parse_target(spec)
    except ValueError as exc:
        raise UsageError(str(exc))


def _catalog(spec: str, p: words.Presentation):
    try:
        return autos.get_catalog(spec, p)
    except (ValueError, autos.PresentationMismatchError) as exc:
        raise UsageError(str(exc))


def _load_matrix_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read matrix file {path!r}: {exc}")


def _emit(doc, out_path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_enum(args) -> int:
    p = _parse_group(args.group)
    target = _parse_target(args.target)
    homs = orbits.enumerate_homs(p, target, budget=args.budget)
    doc = {
        "schema": "finorbit/enum/1",
        "group": p.key,
        "target": target.key,
        "count": len(homs),
        "homs": [[target.element_to_json(e) for e in h.images] for h in homs],
    }
    if args.conjugacy:
        classes = orbits.partition_up_to_conjugation(homs)
        doc["conjugacy_class_count"] = len(classes)
        doc["conjugacy_class_sizes"] = [len(c) for c in classes]
    _emit(doc, args.out)
    return EXIT_OK


def _orbit_doc(res: orbits.OrbitResult, target) -> dict:
    image_order = None
    if res.complete:
        base = res.homs[res.base_index]
        c = targets.closure(base.images, target, cap=res.cap)
        image_order = c.order
    return {
        "schema": "finorbit/orbit/1",
        "status": "complete" if res.complete else "cap",
        "size": res.size,
        "cap": res.cap,
        "base_index": res.base_index,
        "image_order": image_order,
    }


def _cmd_orbit(args) -> int:
    rho = load_hom(args.hom)
    catalog = _catalog(args.gens, rho.presentation)
    cap = args.cap if args.cap is not None else _default_cap()
    res = orbits.orbit(rho, catalog, cap=cap, workers=args.workers)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(orbits.export_orbit_dot(res))
    _emit(_orbit_doc(res, rho.target), args.out)
    return EXIT_OK


def _cmd_fixed(args) -> int:
    p = _parse_group(args.group)
    target = _parse_target(args.target)
    catalog = _catalog(args.gens, p)
    homs = orbits.enumerate_homs(p, target, budget=args.budget)
    fixed = orbits.fixed_points(homs, catalog)
    doc = {
        "schema": "finorbit/fixed/1",
        "group": p.key,
        "target": target.key,
        "gens": args.gens,
        "total_homs": len(homs),
        "fixed": [[target.element_to_json(e) for e in h.images] for h in fixed],
    }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_partition(args) -> int:
    p = _parse_group(args.group)
    target = _parse_target(args.target)
    catalog = _catalog(args.gens, p)
    homs = orbits.enumerate_homs(p, target, budget=args.budget)
    parts = orbits.orbit_partition(homs, catalog)
    doc = {
        "schema": "finorbit/partition/1",
        "group": p.key,
        "target": target.key,
        "gens": args.gens,
        "total_homs": len(homs),
        "orbit_sizes": sorted(len(o.homs) for o in parts),
        "orbits": [
            [[target.element_to_json(e) for e in h.images] for h in o.homs] for o in parts
        ],
    }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_stabilizer(args) -> int:
    rho = load_hom(args.hom)
    catalog = _catalog(args.gens, rho.presentation)
    cap = args.cap if args.cap is not None else _default_cap()
    res = orbits.orbit(rho, catalog, cap=cap)
    if not res.complete:
        _emit({"error": "orbit exceeded cap; stabilizer undefined"}, args.out)
        return EXIT_DATA
    data = orbits.stabilizer_generators(res, catalog)
    doc = {
        "schema": "finorbit/stabilizer/1",
        "orbit_size": data.orbit_size,
        "schreier_generator_count": len(data.schreier_generators),
        "labels": [a.label for a in data.schreier_generators],
    }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_coinv(args) -> int:
    raw = _load_matrix_file(args.matrices)
    if not isinstance(raw, list):
        raise DataError("matrices file must hold a JSON list of matrices")
    mats = [IntMatrix.from_json(m) if isinstance(m, dict) else IntMatrix.from_rows(m) for m in raw]
    inv = coinvariants(args.dim, mats)
    doc = {"schema": "finorbit/coinvariants/1", "dim": args.dim, **inv.to_json()}
    doc["finite"] = inv.is_finite
    doc["order"] = inv.order()
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_snf(args) -> int:
    raw = _load_matrix_file(args.matrix)
    mat = IntMatrix.from_json(raw) if isinstance(raw, dict) else IntMatrix.from_rows(raw)
    res = snf(mat)
    doc = {
        "schema": "finorbit/snf/1",
        "U": res.U.to_json(),
        "D": res.D.to_json(),
        "V": res.V.to_json(),
        "diagonal": list(res.diagonal),
        "verified": res.verify(mat),
    }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_cw(args) -> int:
    p = _parse_group(args.group)
    fq = parse_quotient_spec(p, args.quotient)
    report = subgroups.cw_verify(fq)
    if args.format == "text":
        text = report.to_table(fq.quotient)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        doc = {"schema": "finorbit/cw/1", **report.to_json()}
        doc["character_by_element"] = dict(
            zip(report.element_keys(fq.quotient), report.character)
        )
        doc["predicted_by_element"] = dict(
            zip(report.element_keys(fq.quotient), report.predicted)
        )
        _emit(doc, args.out)
    return EXIT_OK if report.verdict == "PASS" else EXIT_DATA


def _cmd_transfer(args) -> int:
    p = _parse_group(args.group)
    fq = parse_quotient_spec(p, args.quotient)
    h = subgroups.subgroup_homology(fq)
    mat = subgroups.transfer_map(h)
    doc = {
        "schema": "finorbit/transfer/1",
        "group": p.key,
        "quotient_order": fq.order,
        "rank": h.rank,
        "matrix": mat.to_json(),
    }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_certify(args) -> int:
    rho = load_hom(args.hom)
    catalog = _catalog(args.gens, rho.presentation)
    orbit_cap = args.orbit_cap if args.orbit_cap is not None else _default_cap()
    closure_cap = args.closure_cap if args.closure_cap is not None else _default_cap()
    cert = run_certify(
        rho,
        catalog,
        catalog_spec=args.gens,
        orbit_cap=orbit_cap,
        closure_cap=closure_cap,
        workers=args.workers,
    )
    _emit(cert.doc, args.out)
    return EXIT_OK if cert.image_finite else EXIT_INCONCLUSIVE


def _cmd_check(args) -> int:
    try:
        with open(args.cert, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read certificate {args.cert!r}: {exc}")
    report = check_certificate(doc)
    _emit(
        {
            "schema": "finorbit/check/1",
            "ok": report.ok,
            "checks_run": report.checks_run,
            "failures": list(report.failures),
        },
        args.out,
    )
    return EXIT_OK if report.ok else EXIT_DATA


def _cmd_braid_check(args) -> int:
    report = braid_invariant_check(args.n, order_cap=args.order_cap)
    _emit({"schema": "finorbit/braid-check/1", **report}, args.out)
    return EXIT_OK if report["verdict"] == "PASS" else EXIT_DATA


_COMMANDS = {
    "enum": _cmd_enum,
    "orbit": _cmd_orbit,
    "fixed": _cmd_fixed,
    "partition": _cmd_partition,
    "stabilizer": _cmd_stabilizer,
    "coinv": _cmd_coinv,
    "snf": _cmd_snf,
    "cw": _cmd_cw,
    "transfer": _cmd_transfer,
    "certify": _cmd_certify,
    "check": _cmd_check,
    "braid-check": _cmd_braid_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (DataError, ValueError, KeyError) as exc:
        sys.stdout.write(json.dumps({"error": str(exc)}, sort_keys=True) + "\n")
        return EXIT_DATA
    except InternalInvariantError as exc:
        sys.stderr.write(f"internal invariant violation: {exc}\n")
        return EXIT_INTERNAL


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
