"""Constraints and queries as lifting problems, and their solver.

A constraint is a pair of schema morphisms (m: W -> R, n: R -> S).  A square
binds the W shape into an instance on S compatibly with n and m; a lift is a
binding of the whole R shape agreeing with the square.  Constraints demand
at least one lift per square, queries enumerate all lifts of one square.

Lifts over an instance are determined by their object assignment alone: the
projection from the category of elements grants exactly one arrow over each
schema arrow, so arrow assignments transport for free.  The solver therefore
backtracks over R objects in declaration order, seeding from the binding and
propagating column transport forward, which keeps output in canonical order.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import TypingError
from .instance import Instance, Row, transport
from .presentation import (
    DEFAULT_BOUND,
    Generator,
    Path,
    SchemaMorphism,
    SchemaPresentation,
    enumerate_schema_morphisms,
    identity_morphism,
    pushout_presentation,
)


@dataclass(frozen=True)
class Lift:
    """An assignment of one row to each R object, in declaration order."""

    assignment: tuple[tuple[str, Row], ...]

    def get(self, obj: str) -> Row:
        for o, row in self.assignment:
            if o == obj:
                return row
        raise KeyError(obj)

    def as_dict(self) -> dict[str, Row]:
        return dict(self.assignment)

    def key(self) -> str:
        """Canonical ID: sorted object=row pairs joined by semicolons."""
        return ";".join(
            f"{o}={row.row_id}" for o, row in sorted(self.assignment)
        )


@dataclass
class LiftingConstraint:
    """A lifting problem (m: W -> R, n: R -> S) with a display name."""

    name: str
    m: SchemaMorphism
    n: SchemaMorphism

    def __post_init__(self) -> None:
        if self.m.codomain != self.n.domain:
            raise TypingError(f"constraint {self.name}: m and n do not meet at R")

    @property
    def shape(self) -> SchemaPresentation:
        return self.n.domain

    @property
    def sides(self) -> SchemaPresentation:
        return self.m.domain


@dataclass
class ConstraintSet:
    """A named family of lifting constraints checked together."""

    name: str
    constraints: list[LiftingConstraint]


@dataclass
class SquareInput:
    """A constraint plus a W binding: one commutative square to fill."""

    constraint: LiftingConstraint
    binding: dict[str, Row] = field(default_factory=dict)


def validate_square(sq: SquareInput, inst: Instance) -> None:
    """Reject bindings that are not functors from W over the base."""
    c = sq.constraint
    w_schema = c.sides
    if inst.schema != c.n.codomain:
        raise TypingError("square: instance lives on the wrong schema")
    for w in w_schema.objects:
        row = sq.binding.get(w)
        if row is None:
            raise TypingError(f"square: W object {w} unbound")
        expected = c.n.object_map[c.m.object_map[w]]
        if row.table != expected or not inst.has_row(row):
            raise TypingError(f"square: {w} bound to {row}, expected a {expected} row")
    for g in w_schema.generators:
        base = c.n.apply_path(c.m.apply_path(Path(g.source, (g.name,))))
        if transport(inst, sq.binding[g.source], base) != sq.binding[g.target]:
            raise TypingError(f"square: binding breaks W generator {g.name}")


def _pins(sq: SquareInput) -> dict[str, Row] | None:
    """R objects forced by the binding; None when two pins clash."""
    pins: dict[str, Row] = {}
    for w, row in sq.binding.items():
        r = sq.constraint.m.object_map[w]
        if pins.get(r, row) != row:
            return None
        pins[r] = row
    return pins


def enumerate_lifts(sq: SquareInput, inst: Instance, workers: int = 1) -> list[Lift]:
    """All lifts of one square, lexicographic in declaration-then-row order.

    Worker counts only partition the top branch of the search; results are
    sorted canonically afterwards, so every worker count yields identical
    output.
    """
    validate_square(sq, inst)
    c = sq.constraint
    shape = c.shape
    pins = _pins(sq)
    if pins is None:
        return []

    order = list(shape.objects)
    position = {o: i for i, o in enumerate(order)}
    base_path = {
        (g.source, g.name): c.n.apply_path(Path(g.source, (g.name,)))
        for g in shape.generators
    }
    # For each object, the constraints decidable once it is assigned.
    forward: list[list[tuple[Generator, int]]] = [[] for _ in order]
    backward: list[list[tuple[Generator, int]]] = [[] for _ in order]
    for g in shape.generators:
        i, j = position[g.source], position[g.target]
        if i < j:
            forward[j].append((g, i))
        else:
            backward[i].append((g, j))

    def candidates(k: int, assigned: list[Row]) -> list[Row]:
        obj = order[k]
        determined: Row | None = None
        for g, i in forward[k]:
            value = transport(inst, assigned[i], base_path[(g.source, g.name)])
            if determined is not None and determined != value:
                return []
            determined = value
        pool: list[Row]
        if obj in pins:
            pool = [pins[obj]]
        elif determined is not None:
            pool = [determined]
        else:
            pool = list(inst.rows_of(c.n.object_map[obj]))
        if determined is not None:
            pool = [r for r in pool if r == determined]
        out = []
        for r in pool:
            # A generator into an earlier object (or a self-loop) filters here.
            if all(
                transport(inst, r, base_path[(g.source, g.name)])
                == (r if i == k else assigned[i])
                for g, i in backward[k]
            ):
                out.append(r)
        return out

    def search(k: int, assigned: list[Row], into: list[Lift]) -> None:
        if k == len(order):
            into.append(Lift(tuple(zip(order, assigned))))
            return
        for r in candidates(k, assigned):
            search(k + 1, assigned + [r], into)

    if not order:
        return [Lift(())]
    results: list[Lift] = []
    first = candidates(0, [])
    if workers > 1 and len(first) > 1:
        chunks = [first[i::workers] for i in range(workers)]

        def run(chunk: list[Row]) -> list[Lift]:
            acc: list[Lift] = []
            for r in chunk:
                search(1, [r], acc)
            return acc

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(run, chunks):
                results.extend(part)
    else:
        for r in first:
            search(1, [r], results)

    def sort_key(lift: Lift) -> tuple[int, ...]:
        return tuple(inst.row_order(row) for _, row in lift.assignment)

    results.sort(key=sort_key)
    return results


def enumerate_lifts_oracle(sq: SquareInput, inst: Instance) -> list[Lift]:
    """Reference solver: filter the full product of row assignments.

    Slow and obviously correct; kept as the independent route for the
    equivalence tests against enumerate_lifts.
    """
    validate_square(sq, inst)
    c = sq.constraint
    shape = c.shape
    pins = _pins(sq)
    if pins is None:
        return []
    pools = [list(inst.rows_of(c.n.object_map[o])) for o in shape.objects]
    out: list[Lift] = []
    for combo in itertools.product(*pools):
        at = dict(zip(shape.objects, combo))
        if any(at[o] != row for o, row in pins.items()):
            continue
        ok = True
        for g in shape.generators:
            base = c.n.apply_path(Path(g.source, (g.name,)))
            if transport(inst, at[g.source], base) != at[g.target]:
                ok = False
                break
        if ok:
            out.append(Lift(tuple((o, at[o]) for o in shape.objects)))
    return out


def enumerate_bindings(c: LiftingConstraint, inst: Instance) -> list[dict[str, Row]]:
    """All valid W bindings of a constraint, in declaration-then-row order."""
    w_schema = c.sides
    pools = [
        list(inst.rows_of(c.n.object_map[c.m.object_map[w]]))
        for w in w_schema.objects
    ]
    out: list[dict[str, Row]] = []
    for combo in itertools.product(*pools):
        binding = dict(zip(w_schema.objects, combo))
        ok = True
        for g in w_schema.generators:
            base = c.n.apply_path(c.m.apply_path(Path(g.source, (g.name,))))
            if transport(inst, binding[g.source], base) != binding[g.target]:
                ok = False
                break
        if ok:
            out.append(binding)
    return out


@dataclass
class ConstraintReport:
    """Satisfied, or Violated with the first failing binding."""

    name: str
    satisfied: bool
    witness: dict[str, Row] | None = None

    def as_json(self) -> dict:
        payload: dict = {
            "constraint": self.name,
            "status": "Satisfied" if self.satisfied else "Violated",
        }
        if self.witness is not None:
            payload["witness"] = {
                w: [row.table, row.row_id] for w, row in sorted(self.witness.items())
            }
        return payload


def check_constraint(c: LiftingConstraint, inst: Instance) -> ConstraintReport:
    """A constraint holds when every valid square admits at least one lift."""
    for binding in enumerate_bindings(c, inst):
        if not enumerate_lifts(SquareInput(c, binding), inst):
            return ConstraintReport(name=c.name, satisfied=False, witness=binding)
    return ConstraintReport(name=c.name, satisfied=True)


def check_constraint_set(cs: ConstraintSet, inst: Instance) -> list[ConstraintReport]:
    return [check_constraint(c, inst) for c in cs.constraints]


@dataclass
class UniversalReport:
    """Whether an instance satisfies a generating family universally."""

    ok: bool
    detail: str = ""
    witness: dict[str, Row] | None = None


def check_universal(
    inst: Instance, family: list[SchemaMorphism], bound: int = DEFAULT_BOUND
) -> UniversalReport:
    """Check every constraint (m, n) with m in the family and n arbitrary.

    Enumerates all functors n from each member's R into the instance schema;
    raises UnboundedError (from the enumeration) when that does not saturate.
    """
    for i, m in enumerate(family):
        for j, n in enumerate(enumerate_schema_morphisms(m.codomain, inst.schema, bound)):
            c = LiftingConstraint(name=f"family[{i}]#{j}", m=m, n=n)
            report = check_constraint(c, inst)
            if not report.satisfied:
                return UniversalReport(
                    ok=False,
                    detail=f"member {i} fails under functor {j}: objects {n.object_map}",
                    witness=report.witness,
                )
    return UniversalReport(ok=True)


# ---------------------------------------------------------------------------
# Generating family for the unique-lift laws


def lift_existence_generator() -> SchemaMorphism:
    """m: one dot into one arrow; demands an outgoing lift at every element."""
    sides = SchemaPresentation("dot", objects=("a",), generators=())
    shape = SchemaPresentation(
        "arrow", objects=("a", "b"), generators=(Generator("f", "a", "b"),)
    )
    return SchemaMorphism(
        name="exists_lift",
        domain=sides,
        codomain=shape,
        object_map={"a": "a"},
        generator_map={},
    )


def lift_uniqueness_generator() -> SchemaMorphism:
    """m: a two-arrow wedge onto one arrow; demands lifts never fork."""
    sides = SchemaPresentation(
        "wedge",
        objects=("a", "b1", "b2"),
        generators=(Generator("f1", "a", "b1"), Generator("f2", "a", "b2")),
    )
    shape = SchemaPresentation(
        "arrow", objects=("a", "b"), generators=(Generator("f", "a", "b"),)
    )
    return SchemaMorphism(
        name="unique_lift",
        domain=sides,
        codomain=shape,
        object_map={"a": "a", "b1": "b", "b2": "b"},
        generator_map={
            ("a", "f1"): Path("a", ("f",)),
            ("a", "f2"): Path("a", ("f",)),
        },
    )


def lift_law_generators() -> list[SchemaMorphism]:
    return [lift_existence_generator(), lift_uniqueness_generator()]


# ---------------------------------------------------------------------------
# Constraint library


def _resolve_column(schema: SchemaPresentation, column: str) -> Generator:
    """Find a generator by bare or Table.column name; ambiguity is an error."""
    if "." in column:
        table, name = column.split(".", 1)
        return schema.generator(table, name)
    hits = [g for g in schema.generators if g.name == column]
    if not hits:
        raise TypingError(f"no column named {column} in schema {schema.name}")
    if len(hits) > 1:
        raise TypingError(f"column name {column} is ambiguous; qualify it as Table.{column}")
    return hits[0]


def nonempty(schema: SchemaPresentation, table: str) -> LiftingConstraint:
    """At least one row in the table: empty sides into a single dot."""
    if table not in schema.objects:
        raise TypingError(f"no table named {table}")
    sides = SchemaPresentation("none", objects=(), generators=())
    shape = SchemaPresentation("dot", objects=("A",), generators=())
    m = SchemaMorphism("m", sides, shape, {}, {})
    n = SchemaMorphism("n", shape, schema, {"A": table}, {})
    return LiftingConstraint(name=f"nonempty({table})", m=m, n=n)


def exactly_one(schema: SchemaPresentation, table: str) -> ConstraintSet:
    """Exactly one row: nonempty plus a two-dots-to-one merge constraint."""
    base = nonempty(schema, table)
    sides = SchemaPresentation("pair", objects=("a1", "a2"), generators=())
    m = SchemaMorphism(
        "m", sides, base.shape, {"a1": "A", "a2": "A"}, {}
    )
    at_most = LiftingConstraint(name=f"at_most_one({table})", m=m, n=base.n)
    return ConstraintSet(name=f"exactly_one({table})", constraints=[base, at_most])


def surjective_fk(schema: SchemaPresentation, column: str) -> LiftingConstraint:
    """Every target row is hit: a dot at B into the arrow A -> B."""
    g = _resolve_column(schema, column)
    sides = SchemaPresentation("dot", objects=("b",), generators=())
    shape = SchemaPresentation(
        "arrow", objects=("A", "B"), generators=(Generator("F", "A", "B"),)
    )
    m = SchemaMorphism("m", sides, shape, {"b": "B"}, {})
    n = SchemaMorphism(
        "n",
        shape,
        schema,
        {"A": g.source, "B": g.target},
        {("A", "F"): Path(g.source, (g.name,))},
    )
    return LiftingConstraint(name=f"surjective({column})", m=m, n=n)


def injective_fk(schema: SchemaPresentation, column: str) -> LiftingConstraint:
    """No two source rows share a value: a cospan folded onto the arrow."""
    g = _resolve_column(schema, column)
    sides = SchemaPresentation(
        "cospan",
        objects=("a1", "a2", "b"),
        generators=(Generator("f1", "a1", "b"), Generator("f2", "a2", "b")),
    )
    shape = SchemaPresentation(
        "arrow", objects=("A", "B"), generators=(Generator("F", "A", "B"),)
    )
    m = SchemaMorphism(
        "m",
        sides,
        shape,
        {"a1": "A", "a2": "A", "b": "B"},
        {("a1", "f1"): Path("A", ("F",)), ("a2", "f2"): Path("A", ("F",))},
    )
    n = SchemaMorphism(
        "n",
        shape,
        schema,
        {"A": g.source, "B": g.target},
        {("A", "F"): Path(g.source, (g.name,))},
    )
    return LiftingConstraint(name=f"injective({column})", m=m, n=n)


def _span_pair(schema: SchemaPresentation, left: str, right: str) -> tuple[Generator, Generator]:
    f, g = _resolve_column(schema, left), _resolve_column(schema, right)
    if f.source != g.source:
        raise TypingError(f"columns {left} and {right} leave different tables")
    return f, g


def transitive(schema: SchemaPresentation, left: str, right: str) -> LiftingConstraint:
    """Chained relation rows imply the composite row.

    The relation table holds rows with legs left, right into the entity
    table; two rows chained through a shared middle entity must be closed by
    a third row connecting the ends.
    """
    f, g = _span_pair(schema, left, right)
    if f.target != g.target:
        raise TypingError("transitive needs both legs to land in one table")
    sides = SchemaPresentation(
        "chain",
        objects=("r1", "r2", "a1", "a2", "a3"),
        generators=(
            Generator("f1", "r1", "a1"),
            Generator("g1", "r1", "a2"),
            Generator("f2", "r2", "a2"),
            Generator("g2", "r2", "a3"),
        ),
    )
    shape = SchemaPresentation(
        "chain_closed",
        objects=("R1", "R2", "R3", "A1", "A2", "A3"),
        generators=(
            Generator("F1", "R1", "A1"),
            Generator("G1", "R1", "A2"),
            Generator("F2", "R2", "A2"),
            Generator("G2", "R2", "A3"),
            Generator("F3", "R3", "A1"),
            Generator("G3", "R3", "A3"),
        ),
    )
    m = SchemaMorphism(
        "m",
        sides,
        shape,
        {"r1": "R1", "r2": "R2", "a1": "A1", "a2": "A2", "a3": "A3"},
        {
            ("r1", "f1"): Path("R1", ("F1",)),
            ("r1", "g1"): Path("R1", ("G1",)),
            ("r2", "f2"): Path("R2", ("F2",)),
            ("r2", "g2"): Path("R2", ("G2",)),
        },
    )
    n = SchemaMorphism(
        "n",
        shape,
        schema,
        {
            "R1": f.source, "R2": f.source, "R3": f.source,
            "A1": f.target, "A2": f.target, "A3": f.target,
        },
        {
            ("R1", "F1"): Path(f.source, (f.name,)),
            ("R1", "G1"): Path(f.source, (g.name,)),
            ("R2", "F2"): Path(f.source, (f.name,)),
            ("R2", "G2"): Path(f.source, (g.name,)),
            ("R3", "F3"): Path(f.source, (f.name,)),
            ("R3", "G3"): Path(f.source, (g.name,)),
        },
    )
    return LiftingConstraint(name=f"transitive({left},{right})", m=m, n=n)


def symmetric(schema: SchemaPresentation, left: str, right: str) -> LiftingConstraint:
    """Every relation row has a mirror row.  Extrapolated from transitive."""
    f, g = _span_pair(schema, left, right)
    if f.target != g.target:
        raise TypingError("symmetric needs both legs to land in one table")
    sides = SchemaPresentation(
        "one_row",
        objects=("r1", "a1", "a2"),
        generators=(Generator("f1", "r1", "a1"), Generator("g1", "r1", "a2")),
    )
    shape = SchemaPresentation(
        "mirrored",
        objects=("R1", "R2", "A1", "A2"),
        generators=(
            Generator("F1", "R1", "A1"),
            Generator("G1", "R1", "A2"),
            Generator("F2", "R2", "A2"),
            Generator("G2", "R2", "A1"),
        ),
    )
    m = SchemaMorphism(
        "m",
        sides,
        shape,
        {"r1": "R1", "a1": "A1", "a2": "A2"},
        {("r1", "f1"): Path("R1", ("F1",)), ("r1", "g1"): Path("R1", ("G1",))},
    )
    n = SchemaMorphism(
        "n",
        shape,
        schema,
        {"R1": f.source, "R2": f.source, "A1": f.target, "A2": f.target},
        {
            ("R1", "F1"): Path(f.source, (f.name,)),
            ("R1", "G1"): Path(f.source, (g.name,)),
            ("R2", "F2"): Path(f.source, (f.name,)),
            ("R2", "G2"): Path(f.source, (g.name,)),
        },
    )
    return LiftingConstraint(name=f"symmetric({left},{right})", m=m, n=n)


def reflexive(schema: SchemaPresentation, left: str, right: str) -> LiftingConstraint:
    """Every entity relates to itself.  Extrapolated from transitive."""
    f, g = _span_pair(schema, left, right)
    if f.target != g.target:
        raise TypingError("reflexive needs both legs to land in one table")
    sides = SchemaPresentation("dot", objects=("a",), generators=())
    shape = SchemaPresentation(
        "looped",
        objects=("R1", "A"),
        generators=(Generator("F1", "R1", "A"), Generator("G1", "R1", "A")),
    )
    m = SchemaMorphism("m", sides, shape, {"a": "A"}, {})
    n = SchemaMorphism(
        "n",
        shape,
        schema,
        {"R1": f.source, "A": f.target},
        {
            ("R1", "F1"): Path(f.source, (f.name,)),
            ("R1", "G1"): Path(f.source, (g.name,)),
        },
    )
    return LiftingConstraint(name=f"reflexive({left},{right})", m=m, n=n)


def forest(schema: SchemaPresentation) -> LiftingConstraint:
    """The no-2-cycle constraint on a single self-referencing column.

    Sides are the free category on two objects swapped by a pair of
    generators; the shape is the one-loop schema itself, with n the
    identity.  Note the sides only bind mutual 2-cycles, so longer cycles
    pass; kept verbatim from its source, discrepancy documented in tests.
    """
    if len(schema.objects) != 1 or len(schema.generators) != 1:
        raise TypingError("forest expects the one-object one-loop schema")
    node = schema.objects[0]
    loop = schema.generators[0]
    if loop.source != node or loop.target != node:
        raise TypingError("forest expects the single generator to be a loop")
    sides = SchemaPresentation(
        "two_cycle",
        objects=("v1", "v2"),
        generators=(Generator("p1", "v1", "v2"), Generator("p2", "v2", "v1")),
    )
    m = SchemaMorphism(
        "m",
        sides,
        schema,
        {"v1": node, "v2": node},
        {("v1", "p1"): Path(node, (loop.name,)), ("v2", "p2"): Path(node, (loop.name,))},
    )
    return LiftingConstraint(name="forest", m=m, n=identity_morphism(schema))


def product(
    schema: SchemaPresentation, table: str, left: str, right: str
) -> ConstraintSet:
    """The table is the product of its two factor targets.

    Existence: every factor pair is covered by some row.  Uniqueness: two
    rows with equal legs coincide, phrased through the doubled cone shape.
    """
    f, g = _span_pair(schema, left, right)
    if f.source != table:
        raise TypingError(f"columns {left},{right} do not leave {table}")
    shape = SchemaPresentation(
        "cone",
        objects=("A", "B", "C"),
        generators=(Generator("F", "A", "B"), Generator("G", "A", "C")),
    )
    n = SchemaMorphism(
        "n",
        shape,
        schema,
        {"A": table, "B": f.target, "C": g.target},
        {("A", "F"): Path(table, (f.name,)), ("A", "G"): Path(table, (g.name,))},
    )
    pair_sides = SchemaPresentation("factors", objects=("b", "c"), generators=())
    exists = LiftingConstraint(
        name=f"product_exists({table})",
        m=SchemaMorphism("m1", pair_sides, shape, {"b": "B", "c": "C"}, {}),
        n=n,
    )
    doubled = SchemaPresentation(
        "two_cones",
        objects=("a1", "a2", "b", "c"),
        generators=(
            Generator("F1", "a1", "b"),
            Generator("G1", "a1", "c"),
            Generator("F2", "a2", "b"),
            Generator("G2", "a2", "c"),
        ),
    )
    unique = LiftingConstraint(
        name=f"product_unique({table})",
        m=SchemaMorphism(
            "m2",
            doubled,
            shape,
            {"a1": "A", "a2": "A", "b": "B", "c": "C"},
            {
                ("a1", "F1"): Path("A", ("F",)),
                ("a1", "G1"): Path("A", ("G",)),
                ("a2", "F2"): Path("A", ("F",)),
                ("a2", "G2"): Path("A", ("G",)),
            },
        ),
        n=n,
    )
    return ConstraintSet(name=f"product({table})", constraints=[exists, unique])


def uniqueness_of(c: LiftingConstraint) -> LiftingConstraint:
    """The companion constraint holding iff squares of ``c`` never have two lifts.

    Glue two copies of the shape along the sides, then fold both copies back
    onto the shape; a lift of the glued shape is a pair of lifts of ``c``
    over one square, and the fold forces them equal.
    """
    pushout, inl, inr = pushout_presentation(c.m, c.m)
    object_map: dict[str, str] = {}
    generator_map: dict[tuple[str, str], Path] = {}
    for side in (inl, inr):
        for r_obj, p_obj in side.object_map.items():
            object_map[p_obj] = r_obj
        for (src, name), image in side.generator_map.items():
            generator_map[(image.source, image.steps[0])] = Path(src, (name,))
    fold = SchemaMorphism(
        name="fold",
        domain=pushout,
        codomain=c.shape,
        object_map=object_map,
        generator_map=generator_map,
    )
    return LiftingConstraint(name=f"unique({c.name})", m=fold, n=c.n)
