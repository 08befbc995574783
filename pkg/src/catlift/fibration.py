"""The category of elements of an instance and its projection.

Every instance induces a projection from its category of elements down to
the schema; that projection grants each element exactly one outgoing arrow
over each schema arrow leaving its table.  Functors with that unique-lift
property are called relational fibrations here, and they are exactly the
functors that arise this way.  The element category is kept implicit for
solving (transport on demand) and is materialized only for the small
definition-level checks, since schemas with loops make its hom-sets infinite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from .concrete import ConcreteCategory, ConcreteFunctor, materialize, path_arrow
from .errors import NotAFibrationError, TypingError
from .instance import Instance, Row, transport
from .presentation import (
    DEFAULT_BOUND,
    Generator,
    Path,
    SchemaMorphism,
    SchemaPresentation,
)


@dataclass(frozen=True)
class Triple:
    """One cell of an instance: subject row, generator name, object row."""

    subject: Row
    predicate: str
    object: Row


@dataclass
class RelationalFibration:
    """An instance bundled with its schema, viewed as an implicit projection."""

    schema: SchemaPresentation
    instance: Instance


def grothendieck_triples(inst: Instance) -> list[Triple]:
    """All cells of the instance, in declaration-then-row order."""
    out: list[Triple] = []
    for obj in inst.schema.objects:
        for rid in inst.rows[obj]:
            for g in inst.schema.generators_from(obj):
                out.append(
                    Triple(
                        subject=Row(obj, rid),
                        predicate=g.name,
                        object=Row(g.target, inst.columns[(obj, g.name)][rid]),
                    )
                )
    return out


def format_triples(triples: list[Triple]) -> str:
    """Line-per-cell text rendering, one statement per line."""
    lines = [
        f"<({t.subject.table},{t.subject.row_id})> <{t.predicate}>"
        f" <({t.object.table},{t.object.row_id})> ."
        for t in triples
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def element_name(row: Row) -> tuple[str, str]:
    return (row.table, row.row_id)


def grothendieck_concrete(
    fib: RelationalFibration, bound: int = DEFAULT_BOUND
) -> ConcreteFunctor:
    """The category of elements as a concrete functor onto the materialized schema.

    Objects are (table, row) pairs; the arrows from one over a schema arrow f
    are exactly the pairs (element, f) whose transport lands correctly, so
    each hom-set mirrors a schema hom-set filtered by transport.  Requires the
    schema to materialize; raises UnboundedError through materialize if not.
    """
    base = materialize(fib.schema, bound)
    inst = fib.instance

    objects: list[Hashable] = [
        element_name(row) for obj in fib.schema.objects for row in inst.rows_of(obj)
    ]
    arrows: dict[Hashable, tuple[Hashable, Hashable]] = {}
    arrow_map: dict[Hashable, Hashable] = {}
    identities: dict[Hashable, Hashable] = {}
    for obj in fib.schema.objects:
        for row in inst.rows_of(obj):
            here = element_name(row)
            for f, (s, t) in base.arrows.items():
                if s != obj:
                    continue
                steps = _arrow_steps(f)
                landing = transport(inst, row, Path(obj, steps))
                name = (here, f)
                arrows[name] = (here, element_name(landing))
                arrow_map[name] = f
                if f == base.identities[obj]:
                    identities[here] = name

    composition: dict[tuple[Hashable, Hashable], Hashable] = {}
    for name, (src, tgt) in arrows.items():
        for name2, (src2, _) in arrows.items():
            if tgt != src2:
                continue
            composition[(name, name2)] = (src, base.composition[(arrow_map[name], arrow_map[name2])])

    elements = ConcreteCategory(
        objects=tuple(objects),
        arrows=arrows,
        identities=identities,
        composition=composition,
    )
    return ConcreteFunctor(
        domain=elements,
        codomain=base,
        object_map={element_name(row): obj for obj in fib.schema.objects for row in inst.rows_of(obj)},
        arrow_map=arrow_map,
    )


def _arrow_steps(arrow_name: str) -> tuple[str, ...]:
    inner = arrow_name[arrow_name.index("[") + 1 : -1]
    return tuple(inner.split()) if inner else ()


@dataclass
class FibrationVerdict:
    """Yes, or No with the first failing (object, arrow) square."""

    ok: bool
    witness: tuple[Hashable, Hashable] | None = None
    reason: str = ""


def is_relational_fibration(f: ConcreteFunctor) -> FibrationVerdict:
    """Check unique lifting: one outgoing arrow over each base arrow.

    Enumeration follows domain object order then codomain arrow order, so the
    reported witness is the first failing square.
    """
    for x in f.domain.objects:
        outgoing = [(a, f.apply_arrow(a)) for a in f.domain.arrows_from(x)]
        for base_arrow, (s, _) in f.codomain.arrows.items():
            if s != f.apply_object(x):
                continue
            n = sum(1 for _, img in outgoing if img == base_arrow)
            if n == 0:
                return FibrationVerdict(
                    ok=False, witness=(x, base_arrow), reason="no lift"
                )
            if n > 1:
                return FibrationVerdict(
                    ok=False, witness=(x, base_arrow), reason="multiple lifts"
                )
    return FibrationVerdict(ok=True)


def fibers_to_instance(f: ConcreteFunctor) -> Instance:
    """Extract the instance a relational fibration projects from.

    Rows over an object are its fiber; the column of a generator sends each
    element along its unique lift.  Defined only on relational fibrations
    whose codomain was produced by materialize (so generators resolve).
    """
    verdict = is_relational_fibration(f)
    if not verdict.ok:
        raise NotAFibrationError(
            f"fibers_to_instance: {verdict.reason} at {verdict.witness!r}"
        )
    schema = f.codomain.schema
    if schema is None:
        raise TypingError("fibers_to_instance: codomain lacks a schema presentation")

    def row_id(x: Hashable) -> str:
        return x[1] if isinstance(x, tuple) and len(x) == 2 else str(x)

    rows: dict[str, tuple[str, ...]] = {o: () for o in schema.objects}
    fiber_of: dict[Hashable, str] = {}
    for x in f.domain.objects:
        obj = f.apply_object(x)
        rows[obj] = rows[obj] + (row_id(x),)
        fiber_of[x] = obj

    columns: dict[tuple[str, str], dict[str, str]] = {
        (g.source, g.name): {} for g in schema.generators
    }
    for x in f.domain.objects:
        obj = fiber_of[x]
        for g in schema.generators_from(obj):
            base = path_arrow(f.codomain, Path(obj, (g.name,)))
            lifts = [
                a for a in f.domain.arrows_from(x) if f.apply_arrow(a) == base
            ]
            target = f.domain.target(lifts[0])
            columns[(obj, g.name)][row_id(x)] = row_id(target)
    return Instance(schema=schema, rows=rows, columns=columns)


def check_discrete_fibers(f: ConcreteFunctor) -> list[str]:
    """Fibers contain no arrows besides identities."""
    issues = []
    for a, (s, t) in f.domain.arrows.items():
        if f.apply_arrow(a) == f.codomain.identities[f.apply_object(s)]:
            if a != f.domain.identities.get(s) or s != t:
                issues.append(f"non-identity arrow {a!r} sits over an identity")
    return issues


def check_faithful(f: ConcreteFunctor) -> list[str]:
    """Parallel arrows with the same image coincide."""
    issues = []
    arrows = list(f.domain.arrows.items())
    for i, (a, ends_a) in enumerate(arrows):
        for b, ends_b in arrows[i + 1 :]:
            if ends_a == ends_b and f.apply_arrow(a) == f.apply_arrow(b):
                issues.append(f"arrows {a!r} and {b!r} are parallel with equal image")
    return issues


def check_triangle_filler(f: ConcreteFunctor) -> list[str]:
    """Every open triangle over a commuting base triangle closes upstairs."""
    issues = []
    for u, (x, y) in f.domain.arrows.items():
        for v, (x2, z) in f.domain.arrows.items():
            if x2 != x:
                continue
            for h, (hs, ht) in f.codomain.arrows.items():
                if hs != f.apply_object(y) or ht != f.apply_object(z):
                    continue
                if f.codomain.composition[(f.apply_arrow(u), h)] != f.apply_arrow(v):
                    continue
                fillers = [
                    w
                    for w, (ws, wt) in f.domain.arrows.items()
                    if ws == y and wt == z and f.apply_arrow(w) == h
                    and f.domain.composition[(u, w)] == v
                ]
                if len(fillers) != 1:
                    issues.append(
                        f"triangle at {u!r}, {v!r} over {h!r} has {len(fillers)} fillers"
                    )
    return issues


def elements_presentation(
    inst: Instance,
) -> tuple[SchemaPresentation, SchemaMorphism]:
    """The category of elements as a presentation, with its projection.

    One object per row, one generator per cell (named after the schema
    generator; names stay unique per source), and each schema equation
    restated at every row of its source.  The projection forgets rows.
    """
    schema = inst.schema
    objects = tuple(
        f"{obj}:{rid}" for obj in schema.objects for rid in inst.rows[obj]
    )
    generators: list[Generator] = []
    for obj in schema.objects:
        for rid in inst.rows[obj]:
            for g in schema.generators_from(obj):
                tgt = inst.columns[(obj, g.name)][rid]
                generators.append(
                    Generator(g.name, f"{obj}:{rid}", f"{g.target}:{tgt}")
                )
    equations: list[tuple[Path, Path]] = []
    for lhs, rhs in schema.equations:
        for rid in inst.rows[lhs.source]:
            here = f"{lhs.source}:{rid}"
            equations.append((Path(here, lhs.steps), Path(here, rhs.steps)))

    elements = SchemaPresentation(
        name=f"elements_{schema.name}",
        objects=objects,
        generators=tuple(generators),
        equations=tuple(equations),
    )
    projection = SchemaMorphism(
        name=f"project_{schema.name}",
        domain=elements,
        codomain=schema,
        object_map={
            f"{obj}:{rid}": obj for obj in schema.objects for rid in inst.rows[obj]
        },
        generator_map={
            (g.source, g.name): Path(g.source.split(":", 1)[0], (g.name,))
            for g in generators
        },
    )
    return elements, projection
