"""Command line interface.

Subcommands: validate, triples, check, query, pattern, migrate.  Exit codes:
0 success (instance valid, constraints satisfied, results produced), 1 a
violation or an empty result under --expect-some, 2 bad input (parse or
typing errors), 3 the requested completion does not become stationary within
the path bound.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path as FsPath

from .dsl import Document, load_document, load_schema
from .errors import CatliftError, ParseError, UnboundedError
from .fibration import format_triples, grothendieck_triples
from .instance import Instance, load_instance, save_instance, validate_instance
from .migration import delta, pi, sigma
from .presentation import DEFAULT_BOUND, SchemaPresentation, compose_morphisms
from .query import Query, ResultSet, check_strict, gamma_strict, orbit_quotient, run_query
from .pattern import compile_pattern
from .solver import Lift


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        FsPath(out).write_text(text, encoding="utf-8")


def _json_dump(payload: object) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _csv_dump(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _load_pair(args) -> tuple[SchemaPresentation, Instance]:
    schema = load_schema(args.schema)
    inst = load_instance(schema, args.instance)
    return schema, inst


def _doc_for(args, schema: SchemaPresentation, path: str) -> Document:
    return load_document(path, env={schema.name: schema})


def _single(kind: str, table: dict, name: str | None):
    if name is not None:
        if name not in table:
            raise ParseError(f"no {kind} named {name}; found {sorted(table)}")
        return table[name]
    if len(table) != 1:
        raise ParseError(f"expected exactly one {kind}, found {sorted(table)}")
    return next(iter(table.values()))


# -- subcommands -------------------------------------------------------------


def _cmd_validate(args) -> int:
    schema, inst = _load_pair(args)
    report = validate_instance(inst)
    if args.figure:
        from .viz import render_schema

        render_schema(schema, args.figure)
    if args.format == "json":
        _write_text(_json_dump({"ok": report.ok, "issues": report.issues}), args.out)
    else:
        rows = [["ok", str(report.ok).lower()]]
        rows += [["issue", msg] for msg in report.issues]
        _write_text(_csv_dump(["field", "value"], rows), args.out)
    return 0 if report.ok else 1


def _cmd_triples(args) -> int:
    schema, inst = _load_pair(args)
    report = validate_instance(inst)
    if not report.ok:
        raise CatliftError("instance invalid; run validate for details")
    triples = grothendieck_triples(inst)
    if args.figure:
        from .viz import render_elements

        render_elements(inst, triples, args.figure)
    if args.format == "json":
        payload = [
            {
                "subject": [t.subject.table, t.subject.row_id],
                "predicate": t.predicate,
                "object": [t.object.table, t.object.row_id],
            }
            for t in triples
        ]
        _write_text(_json_dump(payload), args.out)
    elif args.format == "csv":
        rows = [
            [t.subject.table, t.subject.row_id, t.predicate, t.object.table, t.object.row_id]
            for t in triples
        ]
        header = ["subject_table", "subject_id", "predicate", "object_table", "object_id"]
        _write_text(_csv_dump(header, rows), args.out)
    else:
        _write_text(format_triples(triples), args.out)
    return 0


def _cmd_check(args) -> int:
    schema, inst = _load_pair(args)
    doc = _doc_for(args, schema, args.constraints)
    if not doc.constraints:
        raise ParseError("constraint file declares no constraints")
    results: list[tuple[str, bool, str]] = []
    all_ok = True
    for name in doc.constraints:
        for report in _check_set(doc.constraints[name], inst):
            results.append(report)
            all_ok = all_ok and report[1]
    if args.format == "json":
        payload = [
            {"constraint": n, "satisfied": ok, "witness": witness}
            for n, ok, witness in results
        ]
        _write_text(_json_dump(payload), args.out)
    else:
        rows = [[n, str(ok).lower(), witness] for n, ok, witness in results]
        _write_text(_csv_dump(["constraint", "satisfied", "witness"], rows), args.out)
    return 0 if all_ok else 1


def _check_set(cs, inst) -> list[tuple[str, bool, str]]:
    from .solver import check_constraint_set

    out = []
    for report in check_constraint_set(cs, inst):
        witness = ""
        if report.witness is not None:
            witness = " ".join(
                f"{obj}={row.row_id}" for obj, row in sorted(report.witness.items())
            )
        out.append((report.name, report.satisfied, witness))
    return out


def _result_rows(results: ResultSet) -> tuple[list[str], list[list[str]]]:
    if results.query.select is not None:
        objects = list(results.query.select.domain.objects)
        header = objects
        rows = [
            [assignment[o].row_id for o in objects] for assignment in results.projected()
        ]
        return header, rows
    objects = list(results.query.shape.objects)
    return objects, [[lift.get(o).row_id for o in objects] for lift in results.lifts]


def _emit_results(args, results: ResultSet, orbits: list[list[Lift]] | None) -> None:
    header, rows = _result_rows(results)
    if orbits is not None:
        shape_objects = list(results.query.shape.objects)
        header = ["orbit_size"] + shape_objects
        rows = [
            [str(len(orbit))] + [orbit[0].get(o).row_id for o in shape_objects]
            for orbit in orbits
        ]
    if args.figure:
        from .viz import render_result_counts

        assignments = [dict(zip(header, row)) for row in rows]
        render_result_counts(header, assignments, args.figure)
    if args.format == "json":
        if orbits is not None:
            payload = [
                {
                    "orbit_size": len(orbit),
                    "representative": {
                        o: [orbit[0].get(o).table, orbit[0].get(o).row_id]
                        for o in results.query.shape.objects
                    },
                }
                for orbit in orbits
            ]
        else:
            payload = results.as_json()
        _write_text(_json_dump(payload), args.out)
    else:
        _write_text(_csv_dump(header, rows), args.out)


def _dedup(
    args, schema: SchemaPresentation, inst: Instance, query: Query, results: ResultSet
) -> ResultSet:
    doc = _doc_for(args, schema, args.dedup_by)
    reduction = _single("reduction", doc.reductions, None)
    check_strict(reduction.via, reduction.onto, query.n, bound=args.bound)
    small = Query(
        name=f"{query.name}_small",
        n=reduction.onto,
        m=compose_morphisms(query.m, reduction.via),
        binding=query.binding,
    )
    strict = run_query(small, inst, workers=args.workers)
    move = gamma_strict(reduction.via)
    shadowed = {move(lift).key() for lift in strict.lifts}
    kept = [lift for lift in results.lifts if lift.key() not in shadowed]
    return ResultSet(query=results.query, lifts=kept)


def _cmd_query(args) -> int:
    schema, inst = _load_pair(args)
    doc = _doc_for(args, schema, args.query)
    query: Query = _single("query", doc.queries, args.name)
    results = run_query(query, inst, workers=args.workers)
    if args.dedup_by:
        results = _dedup(args, schema, inst, query, results)
    orbits = None
    if args.orbits:
        sym_doc = _doc_for(args, schema, args.orbits)
        symmetry = _single("symmetry", sym_doc.symmetries, None)
        orbits = orbit_quotient(symmetry, results.lifts)
    _emit_results(args, results, orbits)
    count = len(orbits) if orbits is not None else len(results.lifts)
    if args.expect_some and count == 0:
        return 1
    return 0


def _cmd_pattern(args) -> int:
    schema, inst = _load_pair(args)
    doc = _doc_for(args, schema, args.pattern)
    gp = _single("pattern", doc.patterns, args.name)
    query = compile_pattern(gp, schema, inst)
    results = run_query(query, inst, workers=args.workers)
    _emit_results(args, results, None)
    if args.expect_some and not results.lifts:
        return 1
    return 0


def _cmd_migrate(args) -> int:
    source = load_schema(args.schema)
    target = load_schema(args.target)
    doc = load_document(args.functor, env={source.name: source, target.name: target})
    f = _single("functor", doc.functors, args.name)
    if args.mode == "delta":
        inst = load_instance(f.codomain, args.instance)
        moved = delta(f, inst)
    elif args.mode == "sigma":
        inst = load_instance(f.domain, args.instance)
        moved = sigma(f, inst, bound=args.bound)
    else:
        inst = load_instance(f.domain, args.instance)
        moved = pi(f, inst, bound=args.bound)
    out_dir = FsPath(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_instance(moved, out_dir)
    rows = [[obj, str(len(moved.rows[obj]))] for obj in moved.schema.objects]
    if args.format == "json":
        payload = {obj: len(moved.rows[obj]) for obj in moved.schema.objects}
        _write_text(_json_dump(payload), args.out)
    else:
        _write_text(_csv_dump(["table", "rows"], rows), args.out)
    return 0


# -- argument wiring ----------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, formats: tuple[str, ...]) -> None:
    p.add_argument("-s", "--schema", required=True, help="schema file")
    p.add_argument("-i", "--instance", required=True, help="instance directory")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="path length bound")
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", default=None, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catlift")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance against its schema")
    _add_common(p, ("csv", "json"))
    p.add_argument("--figure", default=None, help="render the schema graph here")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("triples", help="emit the instance as subject/predicate/object triples")
    _add_common(p, ("text", "csv", "json"))
    p.add_argument("--figure", default=None, help="render the element graph here")
    p.set_defaults(func=_cmd_triples)

    p = sub.add_parser("check", help="check lifting constraints against an instance")
    _add_common(p, ("csv", "json"))
    p.add_argument("--constraints", required=True, help="constraint file")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("query", help="run a query against an instance")
    _add_common(p, ("csv", "json"))
    p.add_argument("--query", required=True, help="query file")
    p.add_argument("--name", default=None, help="query name when the file holds several")
    p.add_argument("--dedup-by", default=None, help="reduction file for strict-image removal")
    p.add_argument("--orbits", default=None, help="symmetry file for orbit counting")
    p.add_argument("--expect-some", action="store_true", help="exit 1 when no results")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--figure", default=None, help="render result counts here")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("pattern", help="compile a triple pattern and run it")
    _add_common(p, ("csv", "json"))
    p.add_argument("--pattern", required=True, help="pattern file")
    p.add_argument("--name", default=None, help="pattern name when the file holds several")
    p.add_argument("--expect-some", action="store_true", help="exit 1 when no results")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--figure", default=None, help="render result counts here")
    p.set_defaults(func=_cmd_pattern)

    p = sub.add_parser("migrate", help="move an instance along a schema mapping")
    _add_common(p, ("csv", "json"))
    p.add_argument("--target", required=True, help="the other schema file")
    p.add_argument("--functor", required=True, help="file declaring the mapping")
    p.add_argument("--name", default=None, help="functor name when the file holds several")
    p.add_argument("--mode", choices=("delta", "sigma", "pi"), required=True)
    p.add_argument("--out-dir", required=True, help="directory for the migrated CSVs")
    p.set_defaults(func=_cmd_migrate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnboundedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CatliftError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
