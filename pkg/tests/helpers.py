"""Shared builders for the randomized sweeps.

Random schemas are acyclic (arrows only point from earlier objects to later
ones), so every hom-set is finite and the bounded closure always saturates.
Random instances stay consistent by construction because acyclic schemas
carry no equations.
"""

from __future__ import annotations

import random

from catlift import (
    Generator,
    Instance,
    Path,
    SchemaMorphism,
    SchemaPresentation,
)


def random_dag_schema(
    rng: random.Random,
    name: str = "rand",
    max_objects: int = 4,
    max_arrows: int = 4,
    min_objects: int = 1,
) -> SchemaPresentation:
    """A random equation-free schema whose arrows all point forward."""
    n = rng.randint(min_objects, max_objects)
    objects = tuple(f"{name}{i}" for i in range(n))
    generators = []
    if n >= 2:
        for j in range(rng.randint(0, max_arrows)):
            i = rng.randrange(n - 1)
            t = rng.randrange(i + 1, n)
            generators.append(Generator(f"g{j}", objects[i], objects[t]))
    return SchemaPresentation(name=name, objects=objects, generators=tuple(generators))


def random_instance(
    rng: random.Random,
    schema: SchemaPresentation,
    max_rows: int = 5,
    min_rows: int = 0,
) -> Instance:
    """Random rows and columns; targets of populated tables are kept nonempty."""
    counts = {o: rng.randint(min_rows, max_rows) for o in schema.objects}
    for _ in schema.objects:
        for g in schema.generators:
            if counts[g.source] > 0 and counts[g.target] == 0:
                counts[g.target] = 1
    rows = {o: tuple(f"{o}r{i}" for i in range(counts[o])) for o in schema.objects}
    columns = {
        (g.source, g.name): {rid: rng.choice(rows[g.target]) for rid in rows[g.source]}
        for g in schema.generators
    }
    return Instance(schema=schema, rows=rows, columns=columns)


def paths_between(
    schema: SchemaPresentation, source: str, target: str, max_len: int = 3
) -> list[tuple[str, ...]]:
    """All step tuples from source to target up to the length cap."""
    out: list[tuple[str, ...]] = []
    frontier: list[tuple[str, tuple[str, ...]]] = [(source, ())]
    for _ in range(max_len + 1):
        following: list[tuple[str, tuple[str, ...]]] = []
        for at, steps in frontier:
            if at == target:
                out.append(steps)
            for g in schema.generators_from(at):
                following.append((g.target, steps + (g.name,)))
        frontier = following
    return out


def random_morphism(
    rng: random.Random,
    domain: SchemaPresentation,
    codomain: SchemaPresentation,
    name: str = "f",
    attempts: int = 40,
    max_len: int = 3,
) -> SchemaMorphism | None:
    """A random functor between equation-free schemas; None when none is found."""
    for _ in range(attempts):
        object_map = {o: rng.choice(codomain.objects) for o in domain.objects}
        generator_map: dict[tuple[str, str], Path] = {}
        ok = True
        for g in domain.generators:
            options = paths_between(
                codomain, object_map[g.source], object_map[g.target], max_len
            )
            if not options:
                ok = False
                break
            generator_map[(g.source, g.name)] = Path(
                object_map[g.source], rng.choice(options)
            )
        if ok:
            return SchemaMorphism(
                name=name,
                domain=domain,
                codomain=codomain,
                object_map=object_map,
                generator_map=generator_map,
            )
    return None


def rename_rows(inst: Instance, prefix: str = "z_") -> tuple[Instance, dict]:
    """The same instance with every row ID prefixed; returns the renaming."""
    mapping = {
        (o, rid): prefix + rid for o in inst.schema.objects for rid in inst.rows[o]
    }
    rows = {o: tuple(mapping[(o, rid)] for rid in inst.rows[o]) for o in inst.schema.objects}
    columns = {
        key: {mapping[(key[0], rid)]: mapping[(inst.schema.generator(*key).target, tgt)]
              for rid, tgt in col.items()}
        for key, col in inst.columns.items()
    }
    return Instance(schema=inst.schema, rows=rows, columns=columns), mapping
