"""Queries as lifting problems and the maps between their result sets.

A query is a square: a probe n: R -> S, a side shape m: W -> R, and a
binding of W into the instance.  Its results are the lifts of that square.
Result sets are functorial against three kinds of data: strict morphisms
between probes (precomposition), natural transformations between probes
(transport along connecting columns), and full query morphisms combining
both with a side translation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TypingError
from .instance import Instance, InstanceMorphism, Row, transport
from .presentation import (
    DEFAULT_BOUND,
    EQUAL,
    Generator,
    Path,
    SchemaMorphism,
    SchemaPresentation,
    compose_morphisms,
    paths_equal,
)
from .solver import Lift, LiftingConstraint, SquareInput, enumerate_lifts


@dataclass
class Query:
    """A probe with sides and a binding; optionally a projection to report."""

    name: str
    n: SchemaMorphism
    m: SchemaMorphism
    binding: dict[str, Row] = field(default_factory=dict)
    select: SchemaMorphism | None = None

    def __post_init__(self) -> None:
        if self.m.codomain != self.n.domain:
            raise TypingError(f"query {self.name}: m and n do not meet at the shape")
        if self.select is not None and self.select.codomain != self.n.domain:
            raise TypingError(f"query {self.name}: select leg misses the shape")

    @property
    def shape(self) -> SchemaPresentation:
        return self.n.domain

    def square(self) -> SquareInput:
        return SquareInput(
            LiftingConstraint(name=self.name, m=self.m, n=self.n), self.binding
        )


def where_less(name: str, n: SchemaMorphism, select: SchemaMorphism | None = None) -> Query:
    """A query with empty sides: every lift of the probe is a result."""
    empty = SchemaPresentation("empty", objects=(), generators=())
    m = SchemaMorphism("m", empty, n.domain, {}, {})
    return Query(name=name, n=n, m=m, binding={}, select=select)


@dataclass
class ResultSet:
    """The lifts of a query's square, in canonical order."""

    query: Query
    lifts: list[Lift]

    def as_json(self) -> list[dict[str, list[str]]]:
        return [
            {obj: [row.table, row.row_id] for obj, row in lift.assignment}
            for lift in self.lifts
        ]

    def projected(self) -> list[dict[str, Row]]:
        """Rows over the select shape; the whole lift when there is none."""
        if self.query.select is None:
            return [lift.as_dict() for lift in self.lifts]
        q = self.query.select
        return [
            {x: lift.get(q.object_map[x]) for x in q.domain.objects}
            for lift in self.lifts
        ]


def run_query(query: Query, inst: Instance, workers: int = 1) -> ResultSet:
    return ResultSet(query=query, lifts=enumerate_lifts(query.square(), inst, workers))


def check_strict(
    f: SchemaMorphism,
    n_small: SchemaMorphism,
    n_big: SchemaMorphism,
    bound: int = DEFAULT_BOUND,
) -> None:
    """Require n_small . f = n_big (objects exactly, generators up to equations)."""
    if f.domain != n_big.domain or f.codomain != n_small.domain:
        raise TypingError("strict morphism endpoints do not match the probes")
    composite = compose_morphisms(f, n_small)
    for r in f.domain.objects:
        if composite.object_map[r] != n_big.object_map[r]:
            raise TypingError(f"strictness fails on object {r}")
    for g in f.domain.generators:
        verdict = paths_equal(
            n_small.codomain,
            composite.generator_map[(g.source, g.name)],
            n_big.generator_map[(g.source, g.name)],
            bound,
        )
        if verdict != EQUAL:
            raise TypingError(f"strictness fails on generator {g.name}: {verdict}")


def gamma_strict(f: SchemaMorphism):
    """Precomposition along f: results of the small probe map into the big one.

    For f: R_big -> R_small with n_small . f = n_big, each lift of the small
    probe pulls back to a lift of the big probe.  Verify strictness with
    check_strict before relying on the output.
    """

    def apply(lift: Lift) -> Lift:
        return Lift(
            tuple((r, dict(lift.assignment)[f.object_map[r]]) for r in f.domain.objects)
        )

    return apply


def orbit_quotient(
    s: SchemaMorphism, results: list[Lift]
) -> list[list[Lift]]:
    """Group results into orbits of the symmetry s (a strict automorphism).

    Orbits are sorted by their least member's canonical key, members
    likewise, so the first member of each orbit is its canonical
    representative.
    """
    mapper = gamma_strict(s)
    index = {lift: i for i, lift in enumerate(results)}
    parent = list(range(len(results)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, lift in enumerate(results):
        image = mapper(lift)
        if image not in index:
            raise TypingError("orbit_quotient: symmetry leads outside the result set")
        ri, rj = find(i), find(index[image])
        if ri != rj:
            parent[ri] = rj
    groups: dict[int, list[Lift]] = {}
    for i, lift in enumerate(results):
        groups.setdefault(find(i), []).append(lift)
    orbits = [sorted(g, key=lambda l: l.key()) for g in groups.values()]
    orbits.sort(key=lambda g: g[0].key())
    return orbits


@dataclass
class NaturalTransformation:
    """Components from one probe to another: a codomain path per shape object."""

    source: SchemaMorphism
    target: SchemaMorphism
    components: dict[str, Path]

    def validate(self, bound: int = DEFAULT_BOUND) -> list[str]:
        issues: list[str] = []
        if self.source.domain != self.target.domain:
            return ["probes have different shapes"]
        if self.source.codomain != self.target.codomain:
            return ["probes land in different schemas"]
        schema = self.source.codomain
        for a in self.source.domain.objects:
            comp = self.components.get(a)
            if comp is None:
                issues.append(f"missing component at {a}")
                continue
            if comp.source != self.source.object_map[a]:
                issues.append(f"component at {a} starts at the wrong object")
            elif schema.path_target(comp) != self.target.object_map[a]:
                issues.append(f"component at {a} ends at the wrong object")
        if issues:
            return issues
        from .presentation import compose_paths

        for g in self.source.domain.generators:
            left = compose_paths(
                schema,
                self.source.generator_map[(g.source, g.name)],
                self.components[g.target],
            )
            right = compose_paths(
                schema,
                self.components[g.source],
                self.target.generator_map[(g.source, g.name)],
            )
            if paths_equal(schema, left, right, bound) != EQUAL:
                issues.append(f"naturality fails at generator {g.name}")
        return issues


def whisker(alpha: NaturalTransformation, f: SchemaMorphism) -> NaturalTransformation:
    """Restrict a transformation along a functor into its shapes' domain."""
    return NaturalTransformation(
        source=compose_morphisms(f, alpha.source),
        target=compose_morphisms(f, alpha.target),
        components={a: alpha.components[f.object_map[a]] for a in f.domain.objects},
    )


def transport_lift(
    inst: Instance, lift: Lift, alpha: NaturalTransformation
) -> tuple[Lift, dict[str, tuple[Row, Path]]]:
    """Push a lift of the source probe along a transformation of probes.

    Each shape object moves along the unique connecting arrow over its
    component path; returns the moved lift and those connecting arrows
    (source row plus base path) as the witness.
    """
    moved: list[tuple[str, Row]] = []
    connecting: dict[str, tuple[Row, Path]] = {}
    for obj in alpha.source.domain.objects:
        row = lift.get(obj)
        comp = alpha.components[obj]
        moved.append((obj, transport(inst, row, comp)))
        connecting[obj] = (row, comp)
    return Lift(tuple(moved)), connecting


@dataclass
class ProbeMorphism:
    """A shape translation plus a transformation: (G, alpha): F -> F'.

    The transformation's source must be F restricted along G; callers build
    it that way, and validate() rechecks the endpoints and naturality.
    """

    G: SchemaMorphism
    alpha: NaturalTransformation

    def validate(self, bound: int = DEFAULT_BOUND) -> list[str]:
        issues = self.alpha.validate(bound)
        if self.alpha.source.domain != self.G.domain:
            issues.append("transformation is not indexed by the translated shape")
        return issues


def apply_probe_morphism(
    inst: Instance, pm: ProbeMorphism, lift: Lift
) -> tuple[Lift, dict[str, tuple[Row, Path]]]:
    """Results move contravariantly: restrict along G, then transport."""
    restricted = Lift(
        tuple(
            (a, lift.get(pm.G.object_map[a]))
            for a in pm.G.domain.objects
        )
    )
    return transport_lift(inst, restricted, pm.alpha)


def column_table_schema(k: int) -> SchemaPresentation:
    """The star schema: one key table with k attribute columns."""
    if k < 0:
        raise TypingError("column_table_schema: k must be nonnegative")
    return SchemaPresentation(
        name=f"columns{k}",
        objects=("K",) + tuple(f"c{i}" for i in range(1, k + 1)),
        generators=tuple(Generator(f"col{i}", "K", f"c{i}") for i in range(1, k + 1)),
    )


@dataclass
class QueryMorphism:
    """A morphism of queries over one instance.

    F translates shapes, G translates sides, alpha connects the probes, and
    gamma records the connecting arrows between the bindings.
    """

    source: Query
    target: Query
    F: SchemaMorphism
    G: SchemaMorphism
    alpha: NaturalTransformation
    gamma: dict[str, tuple[Row, Path]]


def complete_query_morphism(
    source: Query,
    target_n: SchemaMorphism,
    target_m: SchemaMorphism,
    F: SchemaMorphism,
    G: SchemaMorphism,
    alpha: NaturalTransformation,
    inst: Instance,
    bound: int = DEFAULT_BOUND,
) -> QueryMorphism:
    """Fill in the target binding and connecting data, which are forced.

    Given the commuting translation square m . G = F . m' and a
    transformation alpha: n . F -> n', the target binding must be the
    transport of the source binding along alpha restricted to the sides; no
    other choice satisfies the projection condition.
    """
    left = compose_morphisms(G, source.m)
    right = compose_morphisms(target_m, F)
    if left.object_map != right.object_map:
        raise TypingError("side translation square does not commute on objects")
    for g in target_m.domain.generators:
        key = (g.source, g.name)
        if paths_equal(
            source.shape, left.generator_map[key], right.generator_map[key], bound
        ) != EQUAL:
            raise TypingError("side translation square does not commute on generators")
    issues = alpha.validate(bound)
    if issues:
        raise TypingError(f"probe transformation invalid: {issues[0]}")
    for given, wanted, label in (
        (alpha.source, compose_morphisms(F, source.n), "source"),
        (alpha.target, target_n, "target"),
    ):
        if given.object_map != wanted.object_map or any(
            paths_equal(wanted.codomain, given.generator_map[k], wanted.generator_map[k], bound)
            != EQUAL
            for k in wanted.generator_map
        ):
            raise TypingError(f"probe transformation has the wrong {label}")

    restricted = whisker(alpha, target_m)
    source_binding = Lift(
        tuple(
            (w2, source.binding[G.object_map[w2]])
            for w2 in target_m.domain.objects
        )
    )
    moved, gamma = transport_lift(inst, source_binding, restricted)
    target = Query(
        name=f"{source.name}'",
        n=target_n,
        m=target_m,
        binding=moved.as_dict(),
    )
    return QueryMorphism(
        source=source, target=target, F=F, G=G, alpha=alpha, gamma=gamma
    )


def induced_result_map(qm: QueryMorphism, inst: Instance):
    """The function on result sets a query morphism induces.

    Restrict a result along F, transport along alpha, and land in the target
    query's results; each image is checked against the target binding.
    """

    def apply(lift: Lift) -> Lift:
        restricted = Lift(
            tuple(
                (r2, lift.get(qm.F.object_map[r2]))
                for r2 in qm.F.domain.objects
            )
        )
        moved, _ = transport_lift(inst, restricted, qm.alpha)
        for w2 in qm.target.m.domain.objects:
            expected = qm.target.binding[w2]
            if moved.get(qm.target.m.object_map[w2]) != expected:
                raise TypingError("induced result violates the target binding")
        return moved

    return apply


def result_instance(
    query: Query, inst: Instance, workers: int = 1
) -> tuple[Instance, InstanceMorphism, ResultSet]:
    """Results as a constant instance on the shape, mapping into the pullback.

    Every shape object carries the full result list; columns are identities.
    The component at each object reads off that object's row, giving a
    natural map into the instance pulled back along the probe.
    """
    from .migration import delta

    rs = run_query(query, inst, workers)
    ids = tuple(lift.key() for lift in rs.lifts)
    shape = query.shape
    constant = Instance(
        schema=shape,
        rows={r: ids for r in shape.objects},
        columns={
            (g.source, g.name): {i: i for i in ids} for g in shape.generators
        },
    )
    pulled = delta(query.n, inst)
    components = {
        r: {
            lift.key(): lift.get(r).row_id
            for lift in rs.lifts
        }
        for r in shape.objects
    }
    return constant, InstanceMorphism(source=constant, target=pulled, components=components), rs
