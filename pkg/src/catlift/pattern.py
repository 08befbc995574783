"""Graph patterns compiled into lifting problems.

A pattern is a list of (subject, predicate, object) triples whose terms are
variables or constants, plus a typing of terms by schema objects.  Variables
unify by name; each constant occurrence stands alone, pinned to its referent
row.  Compilation produces a query whose shape has one object per term, one
generator per triple, and whose sides pin the constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    AmbiguousReferentError,
    NoReferentError,
    PatternError,
    TypingError,
    UnknownPredicateError,
)
from .fibration import Triple, grothendieck_triples
from .instance import Instance, Row
from .presentation import Generator, Path, SchemaMorphism, SchemaPresentation
from .query import Query


@dataclass(frozen=True)
class Term:
    """A pattern term: a named variable or a constant literal."""

    name: str
    is_variable: bool

    @staticmethod
    def parse(token: str) -> "Term":
        if token.startswith("?"):
            return Term(name=token, is_variable=True)
        return Term(name=token.strip('"'), is_variable=False)


@dataclass
class GraphPattern:
    """Triples with a typing; predicates may be aliased to schema paths."""

    triples: list[tuple[Term, str, Term]]
    typing: dict[str, str]
    predicate_paths: dict[str, tuple[str, ...]] = field(default_factory=dict)
    label_columns: dict[str, str] = field(default_factory=dict)


def _referent(inst: Instance, table: str, label_column: str | None, constant: str) -> Row:
    """Resolve a constant to a row: by label column, or by row ID itself."""
    if label_column is None:
        if inst.has_row(Row(table, constant)):
            return Row(table, constant)
        raise NoReferentError(f"no {table} row with ID {constant}")
    column = inst.columns.get((table, label_column))
    if column is None:
        raise TypingError(f"label column {table}.{label_column} does not exist")
    hits = [rid for rid in inst.rows[table] if column[rid] == constant]
    if not hits:
        raise NoReferentError(f"no {table} row labelled {constant}")
    if len(hits) > 1:
        raise AmbiguousReferentError(
            f"{len(hits)} {table} rows labelled {constant}: {hits}"
        )
    return Row(table, hits[0])


def compile_pattern(
    gp: GraphPattern, schema: SchemaPresentation, inst: Instance
) -> Query:
    """Compile a pattern into a query over the instance.

    The shape has one object per variable and one per constant occurrence;
    generator t{i} carries triple i, mapped onto the predicate's generator
    (or its aliased path).  The sides pin each constant occurrence to its
    referent row.
    """
    shape_objects: list[str] = []
    term_object: dict[int, tuple[str, str]] = {}  # triple slot -> (object, term name)
    variable_object: dict[str, str] = {}
    constant_objects: list[tuple[str, str]] = []  # (object name, constant)
    occurrences: dict[str, int] = {}
    for name in (t.name for triple in gp.triples for t in (triple[0], triple[2]) if not t.is_variable):
        occurrences[name] = occurrences.get(name, 0) + 1
    seen: dict[str, int] = {}

    def object_for(term: Term) -> str:
        if term.is_variable:
            if term.name not in variable_object:
                variable_object[term.name] = term.name
                shape_objects.append(term.name)
            return variable_object[term.name]
        seen[term.name] = seen.get(term.name, 0) + 1
        name = term.name if occurrences[term.name] == 1 else f"{term.name}#{seen[term.name]}"
        shape_objects.append(name)
        constant_objects.append((name, term.name))
        return name

    slots: list[tuple[str, str, str]] = []
    for subject, predicate, obj in gp.triples:
        slots.append((object_for(subject), predicate, object_for(obj)))

    def typed(literal: str) -> str:
        table = gp.typing.get(literal)
        if table is None:
            raise PatternError(f"term {literal} has no typing")
        if table not in schema.objects:
            raise TypingError(f"typing of {literal} names unknown object {table}")
        return table

    object_map: dict[str, str] = {}
    for name in shape_objects:
        object_map[name] = typed(name if name.startswith("?") else name.split("#", 1)[0])

    generators: list[Generator] = []
    generator_map: dict[tuple[str, str], Path] = {}
    for i, (src, predicate, tgt) in enumerate(slots):
        gname = f"t{i}"
        generators.append(Generator(gname, src, tgt))
        table = object_map[src]
        if predicate in gp.predicate_paths:
            steps = gp.predicate_paths[predicate]
        elif any(g.name == predicate for g in schema.generators_from(table)):
            steps = (predicate,)
        else:
            raise UnknownPredicateError(
                f"predicate {predicate} is not a column of {table} and has no alias"
            )
        image = Path(table, steps)
        if schema.path_target(image) != object_map[tgt]:
            raise TypingError(
                f"triple {i}: predicate {predicate} lands in"
                f" {schema.path_target(image)}, but {tgt} is typed {object_map[tgt]}"
            )
        generator_map[(src, gname)] = image

    shape = SchemaPresentation(
        name="pattern", objects=tuple(shape_objects), generators=tuple(generators)
    )
    n = SchemaMorphism("n", shape, schema, object_map, generator_map)

    sides = SchemaPresentation(
        name="constants",
        objects=tuple(name for name, _ in constant_objects),
        generators=(),
    )
    m = SchemaMorphism(
        "m", sides, shape, {name: name for name, _ in constant_objects}, {}
    )
    binding: dict[str, Row] = {}
    for name, constant in constant_objects:
        table = object_map[name]
        binding[name] = _referent(inst, table, gp.label_columns.get(table), constant)
    return Query(name="pattern", n=n, m=m, binding=binding)


@dataclass
class ReifiedInstance:
    """An instance with every cell promoted to a row of an edge table."""

    schema: SchemaPresentation
    instance: Instance
    edges: dict[Row, Triple]


def reify_edges(inst: Instance) -> ReifiedInstance:
    """Promote generators to edge tables with subject and object columns.

    Each generator of the equation-free input schema becomes an object named
    Source.generator holding one row per source row, with columns subject
    (the source row) and object (its image).  Variables over relationships
    then range over the edge tables.
    """
    schema = inst.schema
    if schema.equations:
        raise TypingError("reify_edges expects an equation-free schema")
    objects = list(schema.objects)
    generators: list[Generator] = []
    rows: dict[str, tuple[str, ...]] = dict(inst.rows)
    columns: dict[tuple[str, str], dict[str, str]] = {}
    edges: dict[Row, Triple] = {}
    for g in schema.generators:
        edge_object = f"{g.source}.{g.name}"
        objects.append(edge_object)
        generators.append(Generator("subject", edge_object, g.source))
        generators.append(Generator("object", edge_object, g.target))
        column = inst.columns[(g.source, g.name)]
        rows[edge_object] = inst.rows[g.source]
        columns[(edge_object, "subject")] = {rid: rid for rid in inst.rows[g.source]}
        columns[(edge_object, "object")] = dict(column)
        for rid in inst.rows[g.source]:
            edges[Row(edge_object, rid)] = Triple(
                subject=Row(g.source, rid),
                predicate=g.name,
                object=Row(g.target, column[rid]),
            )
    reified_schema = SchemaPresentation(
        name=f"reified_{schema.name}",
        objects=tuple(objects),
        generators=tuple(generators),
    )
    reified = Instance(schema=reified_schema, rows=rows, columns=columns)
    assert set(edges.values()) == set(grothendieck_triples(inst))
    return ReifiedInstance(schema=reified_schema, instance=reified, edges=edges)
