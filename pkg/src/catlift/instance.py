"""Instances: set-valued functors on a schema, stored as one CSV per object.

An instance assigns each object a finite ordered set of row IDs and each
generator a total column function between them.  Every path then evaluates
to a composite function, and a valid instance makes the two sides of each
schema equation evaluate identically on every row.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from .errors import TypingError
from .presentation import Path, SchemaPresentation


@dataclass(frozen=True, order=True)
class Row:
    """A row reference: the table it lives in plus its ID."""

    table: str
    row_id: str


@dataclass
class Instance:
    """Rows per object and a column function per generator."""

    schema: SchemaPresentation
    rows: dict[str, tuple[str, ...]]
    columns: dict[tuple[str, str], dict[str, str]]

    _row_index: dict[tuple[str, str], int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for o in self.schema.objects:
            if o not in self.rows:
                raise TypingError(f"instance: object {o} has no row set")
            ids = self.rows[o]
            if len(set(ids)) != len(ids):
                raise TypingError(f"instance: duplicate row IDs in {o}")
        for g in self.schema.generators:
            if (g.source, g.name) not in self.columns:
                raise TypingError(f"instance: generator {g.name} has no column")
        index: dict[tuple[str, str], int] = {}
        for o, ids in self.rows.items():
            for i, rid in enumerate(ids):
                index[(o, rid)] = i
        self._row_index = index

    def row_order(self, row: Row) -> int:
        try:
            return self._row_index[(row.table, row.row_id)]
        except KeyError:
            raise TypingError(f"instance: unknown row {row}") from None

    def has_row(self, row: Row) -> bool:
        return (row.table, row.row_id) in self._row_index

    def rows_of(self, obj: str) -> tuple[Row, ...]:
        return tuple(Row(obj, rid) for rid in self.rows[obj])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.rows == other.rows
            and self.columns == other.columns
        )


def transport(inst: Instance, row: Row, path: Path) -> Row:
    """Follow a path from a row, one column function at a time."""
    if row.table != path.source:
        raise TypingError(f"transport: {row} does not start {path.pretty()}")
    at = row
    obj = path.source
    for step in path.steps:
        g = inst.schema.generator(obj, step)
        col = inst.columns[(obj, step)]
        if at.row_id not in col:
            raise TypingError(f"transport: column {step} undefined at {at}")
        at = Row(g.target, col[at.row_id])
        obj = g.target
    return at


def eval_path(inst: Instance, path: Path) -> dict[str, str]:
    """The function a path denotes, as a dict over the source rows."""
    return {
        rid: transport(inst, Row(path.source, rid), path).row_id
        for rid in inst.rows[path.source]
    }


@dataclass
class ValidationReport:
    """Violations found by validate_instance, empty when the instance is valid."""

    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues


def validate_instance(inst: Instance) -> ValidationReport:
    """Check columns are total, land in declared rows, and satisfy equations."""
    report = ValidationReport()
    for g in inst.schema.generators:
        col = inst.columns[(g.source, g.name)]
        targets = set(inst.rows[g.target])
        for rid in inst.rows[g.source]:
            if rid not in col:
                report.issues.append(f"{g.source}.{g.name}: no value for row {rid}")
            elif col[rid] not in targets:
                report.issues.append(
                    f"{g.source}.{g.name}: row {rid} points at missing {g.target} row {col[rid]}"
                )
        for rid in col:
            if (g.source, rid) not in inst._row_index:
                report.issues.append(f"{g.source}.{g.name}: value for undeclared row {rid}")
    if report.issues:
        return report
    for lhs, rhs in inst.schema.equations:
        for rid in inst.rows[lhs.source]:
            left = transport(inst, Row(lhs.source, rid), lhs)
            right = transport(inst, Row(rhs.source, rid), rhs)
            if left != right:
                report.issues.append(
                    f"rule {lhs.pretty()} = {rhs.pretty()} fails at row {rid}:"
                    f" {left.row_id} != {right.row_id}"
                )
    return report


def load_instance(schema: SchemaPresentation, directory: str | FsPath) -> Instance:
    """Read one ``<Object>.csv`` per object, columns in declaration order."""
    directory = FsPath(directory)
    rows: dict[str, tuple[str, ...]] = {}
    columns: dict[tuple[str, str], dict[str, str]] = {}
    for obj in schema.objects:
        path = directory / f"{obj}.csv"
        if not path.exists():
            raise TypingError(f"load_instance: missing table file {path}")
        gens = schema.generators_from(obj)
        expected = ["id"] + [g.name for g in gens]
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != expected:
                raise TypingError(
                    f"load_instance: {path.name} header {header} != {expected}"
                )
            ids: list[str] = []
            for record in reader:
                if len(record) != len(expected):
                    raise TypingError(f"load_instance: ragged row in {path.name}")
                ids.append(record[0])
                for g, value in zip(gens, record[1:]):
                    columns.setdefault((obj, g.name), {})[record[0]] = value
            rows[obj] = tuple(ids)
        for g in gens:
            columns.setdefault((obj, g.name), {})
    return Instance(schema=schema, rows=rows, columns=columns)


def save_instance(inst: Instance, directory: str | FsPath) -> None:
    """Write one CSV per object; column order and row order are canonical."""
    directory = FsPath(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for obj in inst.schema.objects:
        gens = inst.schema.generators_from(obj)
        with (directory / f"{obj}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["id"] + [g.name for g in gens])
            for rid in inst.rows[obj]:
                writer.writerow([rid] + [inst.columns[(obj, g.name)][rid] for g in gens])


@dataclass
class InstanceMorphism:
    """A natural transformation between two instances on the same schema."""

    source: Instance
    target: Instance
    components: dict[str, dict[str, str]]

    def apply(self, row: Row) -> Row:
        return Row(row.table, self.components[row.table][row.row_id])


def check_instance_morphism(h: InstanceMorphism) -> list[str]:
    """Naturality: each component must commute with every column function."""
    issues: list[str] = []
    if h.source.schema != h.target.schema:
        return ["source and target live on different schemas"]
    for obj in h.source.schema.objects:
        comp = h.components.get(obj)
        if comp is None:
            issues.append(f"missing component at {obj}")
            continue
        valid = set(h.target.rows[obj])
        for rid in h.source.rows[obj]:
            if comp.get(rid) not in valid:
                issues.append(f"component at {obj} does not send row {rid} to a target row")
    if issues:
        return issues
    for g in h.source.schema.generators:
        src_col = h.source.columns[(g.source, g.name)]
        tgt_col = h.target.columns[(g.source, g.name)]
        for rid in h.source.rows[g.source]:
            if h.components[g.target][src_col[rid]] != tgt_col[h.components[g.source][rid]]:
                issues.append(f"naturality fails at {g.source}.{g.name} on row {rid}")
    return issues


def enumerate_instance_morphisms(a: Instance, b: Instance) -> list[InstanceMorphism]:
    """All natural transformations a -> b, by brute-force assignment."""
    if a.schema != b.schema:
        raise TypingError("enumerate_instance_morphisms: schemas differ")
    per_object: list[list[dict[str, str]]] = []
    for obj in a.schema.objects:
        src, tgt = a.rows[obj], b.rows[obj]
        if src and not tgt:
            return []
        assignments = [
            dict(zip(src, choice))
            for choice in itertools.product(tgt, repeat=len(src))
        ]
        per_object.append(assignments)
    out: list[InstanceMorphism] = []
    for combo in itertools.product(*per_object):
        h = InstanceMorphism(
            source=a,
            target=b,
            components=dict(zip(a.schema.objects, combo)),
        )
        if not check_instance_morphism(h):
            out.append(h)
    return out


def instances_isomorphic(a: Instance, b: Instance) -> bool:
    """Whether two instances on one schema differ only by renaming rows."""
    if a.schema != b.schema:
        return False
    if any(len(a.rows[o]) != len(b.rows[o]) for o in a.schema.objects):
        return False
    for h in enumerate_instance_morphisms(a, b):
        if all(
            len(set(h.components[o].values())) == len(b.rows[o])
            for o in a.schema.objects
        ):
            return True
    return False
