"""Data migration along a schema morphism F: three functors on instances.

delta pulls an instance back along F (rename tables, evaluate columns).
sigma pushes forward freely: each target table collects source rows routed
through the comma category under F and glues them by zigzags of columns.
pi pushes forward conservatively: each target table holds the matching
families, computed as lifts of the comma category's projection.  sigma and
pi are the left and right companions of delta, witnessed by the hom-set
counting tests rather than assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from typing import Callable

from .errors import TypingError, UnboundedError
from .instance import Instance, InstanceMorphism, Row, transport
from .presentation import (
    DEFAULT_BOUND,
    Path,
    SchemaMorphism,
    SchemaPresentation,
    comma_category,
    compose_morphisms,
    hom_classes,
)
from .query import Query, run_query, where_less
from .solver import Lift


def delta(f: SchemaMorphism, inst: Instance) -> Instance:
    """Pull back along f: rows are reused, columns evaluate image paths."""
    if inst.schema != f.codomain:
        raise TypingError("delta: instance does not live on the codomain")
    rows = {s: inst.rows[f.object_map[s]] for s in f.domain.objects}
    columns: dict[tuple[str, str], dict[str, str]] = {}
    for g in f.domain.generators:
        image = f.generator_map[(g.source, g.name)]
        columns[(g.source, g.name)] = {
            rid: transport(inst, Row(image.source, rid), image).row_id
            for rid in rows[g.source]
        }
    return Instance(schema=f.domain, rows=rows, columns=columns)


def _element_tag(
    schema: SchemaPresentation, inst: Instance, c: str, steps: tuple[str, ...], rid: str
) -> tuple[int, int, int, tuple[str, ...]]:
    return (schema.object_index(c), inst._row_index[(c, rid)], len(steps), steps)


def _tag_id(c: str, rid: str, steps: tuple[str, ...]) -> str:
    return ":".join([c, rid, *steps])


@dataclass
class SigmaResult:
    """The pushed-forward instance plus its insertion components."""

    instance: Instance
    # S object -> (source row -> pushed row ID over F of that object)
    unit: dict[str, dict[str, str]]


def sigma_with_unit(
    f: SchemaMorphism, inst: Instance, bound: int = DEFAULT_BOUND
) -> SigmaResult:
    """Free pushforward along f, with the row insertion maps.

    Rows over a target object are zigzag classes of (source object, route,
    source row) elements; the class ID is its least member tag.  Raises
    UnboundedError when routes do not saturate at the bound.
    """
    if inst.schema != f.domain:
        raise TypingError("sigma: instance does not live on the domain")
    source, target = f.domain, f.codomain
    routes = {obj: hom_classes(target, obj, bound) for obj in set(f.object_map.values())}

    class_id: dict[tuple[str, str, tuple[str, ...], str], str] = {}
    rep_element: dict[tuple[str, str], tuple[str, tuple[str, ...], str]] = {}
    rows: dict[str, tuple[str, ...]] = {}
    for d in target.objects:
        elements: list[tuple[str, tuple[str, ...], str]] = []
        for c in source.objects:
            for rep in routes[f.object_map[c]].reps.get(d, ()):
                elements.extend((c, rep, rid) for rid in inst.rows[c])
        parent: dict[tuple, tuple] = {e: e for e in elements}

        def find(e: tuple) -> tuple:
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        def union(a: tuple, b: tuple) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for g in source.generators:
            image = f.generator_map[(g.source, g.name)]
            column = inst.columns[(g.source, g.name)]
            lookup = routes[f.object_map[g.source]].rep_of
            for rep2 in routes[f.object_map[g.target]].reps.get(d, ()):
                combined = lookup.get(image.steps + rep2)
                if combined is None:
                    raise UnboundedError(
                        f"sigma: route through {g.name} escapes bound {bound}"
                    )
                for rid in inst.rows[g.source]:
                    union((g.source, combined, rid), (g.target, rep2, column[rid]))

        classes: dict[tuple, list[tuple[str, tuple[str, ...], str]]] = {}
        for e in elements:
            classes.setdefault(find(e), []).append(e)
        tagged = []
        for members in classes.values():
            best = min(members, key=lambda e: _element_tag(source, inst, e[0], e[1], e[2]))
            tagged.append((_element_tag(source, inst, best[0], best[1], best[2]), best, members))
        tagged.sort()
        ids = []
        for _, best, members in tagged:
            cid = _tag_id(best[0], best[2], best[1])
            ids.append(cid)
            rep_element[(d, cid)] = best
            for c, rep, rid in members:
                class_id[(d, c, rep, rid)] = cid
        rows[d] = tuple(ids)

    columns: dict[tuple[str, str], dict[str, str]] = {}
    for h in target.generators:
        col: dict[str, str] = {}
        for cid in rows[h.source]:
            c, steps, rid = rep_element[(h.source, cid)]
            lookup = routes[f.object_map[c]].rep_of
            extended = lookup.get(steps + (h.name,))
            if extended is None:
                raise UnboundedError(f"sigma: column {h.name} escapes bound {bound}")
            col[cid] = class_id[(h.target, c, extended, rid)]
        columns[(h.source, h.name)] = col

    unit = {
        c: {
            rid: class_id[(f.object_map[c], c, routes[f.object_map[c]].rep_of[()], rid)]
            for rid in inst.rows[c]
        }
        for c in source.objects
    }
    return SigmaResult(
        instance=Instance(schema=target, rows=rows, columns=columns), unit=unit
    )


def sigma(f: SchemaMorphism, inst: Instance, bound: int = DEFAULT_BOUND) -> Instance:
    return sigma_with_unit(f, inst, bound).instance


def pi(f: SchemaMorphism, inst: Instance, bound: int = DEFAULT_BOUND) -> Instance:
    """Conservative pushforward: rows over d are the d-indexed matching families.

    A family is a lift of the projection out of the comma category under d;
    its row ID serializes the assignment.  Raises UnboundedError when a
    comma category does not saturate at the bound.
    """
    if inst.schema != f.domain:
        raise TypingError("pi: instance does not live on the domain")
    target = f.codomain
    commas: dict[str, tuple[SchemaPresentation, SchemaMorphism]] = {}
    lifts: dict[str, list[Lift]] = {}
    for d in target.objects:
        comma, projection = comma_category(f, d, bound)
        commas[d] = (comma, projection)
        lifts[d] = run_query(where_less(f"pi@{d}", projection), inst).lifts

    rows = {d: tuple(lift.key() for lift in lifts[d]) for d in target.objects}
    columns: dict[tuple[str, str], dict[str, str]] = {}
    for h in target.generators:
        routes = hom_classes(target, h.source, bound)
        comma2, _ = commas[h.target]
        col: dict[str, str] = {}
        for lift in lifts[h.source]:
            assignment = lift.as_dict()
            moved: list[tuple[str, Row]] = []
            for name2 in comma2.objects:
                c, steps2 = _split_comma_name(name2)
                combined = routes.rep_of.get((h.name,) + steps2)
                if combined is None:
                    raise UnboundedError(f"pi: column {h.name} escapes bound {bound}")
                moved.append((name2, assignment[_join_comma_name(c, combined)]))
            col[lift.key()] = Lift(tuple(moved)).key()
        columns[(h.source, h.name)] = col
    return Instance(schema=target, rows=rows, columns=columns)


def _split_comma_name(name: str) -> tuple[str, tuple[str, ...]]:
    c, _, inner = name.partition("[")
    inner = inner[:-1]
    return c, tuple(inner.split()) if inner else ()


def _join_comma_name(c: str, steps: tuple[str, ...]) -> str:
    return f"{c}[{' '.join(steps)}]"


def map_query_along_sigma(
    f: SchemaMorphism,
    inst: Instance,
    target_inst: Instance,
    h: InstanceMorphism,
    query: Query,
    bound: int = DEFAULT_BOUND,
):
    """Push a query on the source instance to one on a target instance.

    The map sends each source row to its class under insertion followed by
    the given morphism out of the pushforward; the pushed query composes the
    probe with f and moves the binding through that map.  Returns the pushed
    query and the row translation used on results.
    """
    pushed = sigma_with_unit(f, inst, bound)
    if h.source != pushed.instance or h.target != target_inst:
        raise TypingError("map_query_along_sigma: morphism must leave the pushforward")

    def move_row(row: Row) -> Row:
        over = f.object_map[row.table]
        return Row(over, h.components[over][pushed.unit[row.table][row.row_id]])

    pushed_query = Query(
        name=f"{query.name}@sigma",
        n=compose_morphisms(query.n, f),
        m=query.m,
        binding={w: move_row(row) for w, row in query.binding.items()},
    )

    def move_lift(lift: Lift) -> Lift:
        return Lift(tuple((r, move_row(row)) for r, row in lift.assignment))

    return pushed_query, move_lift


def query_invariance_under_delta(
    f: SchemaMorphism, target_inst: Instance, query: Query
) -> tuple[Query, Callable[[Lift], Lift]]:
    """Push a query on the pullback to the target instance.

    Row IDs survive delta unchanged, so the pushed binding reuses them at
    the renamed tables; the returned translation is a bijection on results,
    which the tests verify in both directions.
    """
    pushed = Query(
        name=f"{query.name}@delta",
        n=compose_morphisms(query.n, f),
        m=query.m,
        binding={
            w: Row(f.object_map[row.table], row.row_id)
            for w, row in query.binding.items()
        },
    )

    def move_lift(lift: Lift) -> Lift:
        return Lift(
            tuple(
                (r, Row(f.object_map[row.table], row.row_id))
                for r, row in lift.assignment
            )
        )

    return pushed, move_lift


def brute_force_colimit(
    f: SchemaMorphism, inst: Instance, bound: int = DEFAULT_BOUND
) -> Instance:
    """Reference pushforward: quotient by every comma morphism, not just zigzags.

    Enumerates comma morphisms as source hom-classes checked against route
    equality, so it exercises different machinery than sigma; used as the
    independent route in tests.
    """
    source, target = f.domain, f.codomain
    routes = {obj: hom_classes(target, obj, bound) for obj in set(f.object_map.values())}
    source_homs = {c: hom_classes(source, c, bound) for c in source.objects}

    class_id: dict[tuple[str, str, tuple[str, ...], str], str] = {}
    rep_element: dict[tuple[str, str], tuple[str, tuple[str, ...], str]] = {}
    rows: dict[str, tuple[str, ...]] = {}
    for d in target.objects:
        elements: list[tuple[str, tuple[str, ...], str]] = []
        for c in source.objects:
            for rep in routes[f.object_map[c]].reps.get(d, ()):
                elements.extend((c, rep, rid) for rid in inst.rows[c])
        parent = {e: e for e in elements}

        def find(e: tuple) -> tuple:
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        for c in source.objects:
            for c2 in source.objects:
                for u in source_homs[c].reps.get(c2, ()):
                    image = f.apply_path(Path(c, u))
                    lookup = routes[f.object_map[c]].rep_of
                    for rep2 in routes[f.object_map[c2]].reps.get(d, ()):
                        combined = lookup.get(image.steps + rep2)
                        if combined is None:
                            raise UnboundedError("brute_force_colimit: route escapes bound")
                        for rid in inst.rows[c]:
                            moved = transport(inst, Row(c, rid), Path(c, u)).row_id
                            a, b = find((c, combined, rid)), find((c2, rep2, moved))
                            if a != b:
                                parent[a] = b

        classes: dict[tuple, list[tuple[str, tuple[str, ...], str]]] = {}
        for e in elements:
            classes.setdefault(find(e), []).append(e)
        tagged = []
        for members in classes.values():
            best = min(members, key=lambda e: _element_tag(source, inst, e[0], e[1], e[2]))
            tagged.append((_element_tag(source, inst, best[0], best[1], best[2]), best, members))
        tagged.sort()
        ids = []
        for _, best, members in tagged:
            cid = _tag_id(best[0], best[2], best[1])
            ids.append(cid)
            rep_element[(d, cid)] = best
            for c, rep, rid in members:
                class_id[(d, c, rep, rid)] = cid
        rows[d] = tuple(ids)

    columns: dict[tuple[str, str], dict[str, str]] = {}
    for h in target.generators:
        col = {}
        for cid in rows[h.source]:
            c, steps, rid = rep_element[(h.source, cid)]
            extended = routes[f.object_map[c]].rep_of[steps + (h.name,)]
            col[cid] = class_id[(h.target, c, extended, rid)]
        columns[(h.source, h.name)] = col
    return Instance(schema=target, rows=rows, columns=columns)


def brute_force_limit(
    f: SchemaMorphism, inst: Instance, bound: int = DEFAULT_BOUND
) -> Instance:
    """Reference conservative pushforward: filter full products of fiber rows.

    Families are checked against every comma morphism enumerated from source
    hom-classes, independently of the solver's backtracking.
    """
    target = f.codomain
    source_homs = {c: hom_classes(f.domain, c, bound) for c in f.domain.objects}
    rows: dict[str, tuple[str, ...]] = {}
    families: dict[str, list[dict[str, Row]]] = {}
    commas: dict[str, SchemaPresentation] = {}
    for d in target.objects:
        comma, _ = comma_category(f, d, bound)
        commas[d] = comma
        pools = []
        names = list(comma.objects)
        for name in names:
            c, _ = _split_comma_name(name)
            pools.append(list(inst.rows_of(c)))
        routes = hom_classes(target, d, bound)
        found: list[dict[str, Row]] = []
        for combo in itertools.product(*pools):
            family = dict(zip(names, combo))
            ok = True
            for name in names:
                c, steps = _split_comma_name(name)
                for c2 in f.domain.objects:
                    for u in source_homs[c].reps.get(c2, ()):
                        image = f.apply_path(Path(c, u))
                        combined = routes.rep_of.get(steps + image.steps)
                        if combined is None:
                            raise UnboundedError("brute_force_limit: route escapes bound")
                        other = _join_comma_name(c2, combined)
                        if other not in family:
                            ok = False
                            break
                        if transport(inst, family[name], Path(c, u)) != family[other]:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                found.append(family)
        families[d] = found
        rows[d] = tuple(
            Lift(tuple((name, fam[name]) for name in names)).key() for fam in found
        )
    columns: dict[tuple[str, str], dict[str, str]] = {}
    for h in target.generators:
        routes = hom_classes(target, h.source, bound)
        col = {}
        names2 = list(commas[h.target].objects)
        for fam in families[h.source]:
            key = Lift(tuple((n, fam[n]) for n in commas[h.source].objects)).key()
            moved = []
            for name2 in names2:
                c, steps2 = _split_comma_name(name2)
                combined = routes.rep_of[(h.name,) + steps2]
                moved.append((name2, fam[_join_comma_name(c, combined)]))
            col[key] = Lift(tuple(moved)).key()
        columns[(h.source, h.name)] = col
    return Instance(schema=target, rows=rows, columns=columns)
