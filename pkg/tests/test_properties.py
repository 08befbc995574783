"""Property tests for the structural invariants, driven by hypothesis."""

from __future__ import annotations

import tempfile
from pathlib import Path as FsPath

from hypothesis import given, settings, strategies as st

from catlift import (
    EQUAL,
    Generator,
    Instance,
    InstanceMorphism,
    Path,
    SchemaPresentation,
    check_instance_morphism,
    compose_paths,
    delta,
    format_schema,
    load_instance,
    parse_schema,
    paths_equal,
    save_instance,
    sigma_with_unit,
    validate_instance,
)

SETTINGS = settings(max_examples=60, deadline=None, derandomize=True)


@st.composite
def schemas(draw, allow_loops: bool = True) -> SchemaPresentation:
    """Small presentations, optionally with parallel-path equations.

    With ``allow_loops=False`` every generator strictly increases the object
    index, so all hom-sets are finite.
    """
    size = draw(st.integers(min_value=1, max_value=4))
    objects = tuple(f"T{i}" for i in range(size))
    generators: list[Generator] = []
    arrow_count = draw(st.integers(min_value=0, max_value=4))
    if not allow_loops and size == 1:
        arrow_count = 0
    for j in range(arrow_count):
        if allow_loops:
            source = draw(st.integers(min_value=0, max_value=size - 1))
            target = draw(st.integers(min_value=source, max_value=size - 1))
        else:
            source = draw(st.integers(min_value=0, max_value=size - 2))
            target = draw(st.integers(min_value=source + 1, max_value=size - 1))
        generators.append(Generator(f"g{j}", objects[source], objects[target]))
    schema = SchemaPresentation(
        "prop", objects=objects, generators=tuple(generators)
    )
    pairs = _parallel_pairs(schema)
    if pairs and draw(st.booleans()):
        lhs, rhs = draw(st.sampled_from(pairs))
        schema = SchemaPresentation(
            "prop",
            objects=objects,
            generators=tuple(generators),
            equations=((lhs, rhs),),
        )
    return schema


def _parallel_pairs(schema: SchemaPresentation) -> list[tuple[Path, Path]]:
    by_endpoints: dict[tuple[str, str], list[Path]] = {}
    frontier = [(o, Path(o, ())) for o in schema.objects]
    for _ in range(3):
        grown = []
        for at, path in frontier:
            end = schema.path_target(path)
            by_endpoints.setdefault((at, end), []).append(path)
            for g in schema.generators_from(end):
                grown.append((at, Path(at, path.steps + (g.name,))))
        frontier = grown
    pairs = []
    for paths in by_endpoints.values():
        for i, lhs in enumerate(paths):
            for rhs in paths[i + 1 :]:
                if lhs.steps != rhs.steps:
                    pairs.append((lhs, rhs))
    return pairs


@st.composite
def instances(draw, schema: SchemaPresentation | None = None) -> Instance:
    if schema is None:
        schema = draw(schemas().filter(lambda s: not s.equations))
    counts = {
        o: draw(st.integers(min_value=0, max_value=3)) for o in schema.objects
    }
    for g in schema.generators:
        if counts[g.source] > 0 and counts[g.target] == 0:
            counts[g.target] = 1
    rows = {o: tuple(f"{o}r{i}" for i in range(counts[o])) for o in schema.objects}
    columns: dict[tuple[str, str], dict[str, str]] = {}
    for g in schema.generators:
        columns[(g.source, g.name)] = {
            rid: rows[g.target][
                draw(st.integers(min_value=0, max_value=len(rows[g.target]) - 1))
            ]
            for rid in rows[g.source]
        }
    return Instance(schema=schema, rows=rows, columns=columns)


@SETTINGS
@given(schemas())
def test_schema_serialization_round_trips(schema):
    assert parse_schema(format_schema(schema)) == schema


@SETTINGS
@given(instances())
def test_instance_save_load_round_trips(inst):
    assert validate_instance(inst).issues == []
    with tempfile.TemporaryDirectory() as tmp:
        save_instance(inst, FsPath(tmp))
        assert load_instance(inst.schema, FsPath(tmp)) == inst


@SETTINGS
@given(schemas(), st.data())
def test_path_composition_is_associative(schema, data):
    chains = _composable_triples(schema)
    if not chains:
        return
    p, q, r = data.draw(st.sampled_from(chains))
    left = compose_paths(schema, compose_paths(schema, p, q), r)
    right = compose_paths(schema, p, compose_paths(schema, q, r))
    assert left == right
    assert left.source == p.source
    assert schema.path_target(left) == schema.path_target(r)


def _composable_triples(schema: SchemaPresentation):
    singles = [Path(g.source, (g.name,)) for g in schema.generators]
    singles += [Path(o, ()) for o in schema.objects]
    triples = []
    for p in singles:
        for q in singles:
            if q.source != schema.path_target(p):
                continue
            for r in singles:
                if r.source == schema.path_target(q):
                    triples.append((p, q, r))
    return triples[:200]


@SETTINGS
@given(schemas())
def test_declared_equations_hold(schema):
    # A small bound keeps the closure cheap on schemas whose loops make the
    # path universe exponential; the declared sides are at most three steps.
    for lhs, rhs in schema.equations:
        assert paths_equal(schema, lhs, rhs, bound=6) == EQUAL


@SETTINGS
@given(st.data())
def test_pushforward_unit_is_natural(data):
    source = data.draw(schemas(allow_loops=False).filter(lambda s: not s.equations))
    target = data.draw(schemas(allow_loops=False).filter(lambda s: not s.equations))
    f = _any_morphism(source, target, data)
    if f is None:
        return
    inst = data.draw(instances(schema=source))
    result = sigma_with_unit(f, inst)
    unit = InstanceMorphism(
        source=inst,
        target=delta(f, result.instance),
        components=result.unit,
    )
    assert check_instance_morphism(unit) == []


def _any_morphism(source, target, data):
    from catlift import SchemaMorphism

    from helpers import paths_between

    object_map = {}
    for o in source.objects:
        object_map[o] = data.draw(st.sampled_from(target.objects))
    generator_map = {}
    for g in source.generators:
        options = paths_between(
            target, object_map[g.source], object_map[g.target], max_len=2
        )
        if not options:
            return None
        steps = data.draw(st.sampled_from(options))
        generator_map[(g.source, g.name)] = Path(object_map[g.source], steps)
    return SchemaMorphism("f", source, target, object_map, generator_map)
