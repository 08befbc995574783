"""Finitely presented categories used as database schemas.

A schema is a presentation: a finite set of objects (tables), a finite set of
arrow generators (foreign-key columns), and a finite set of path equations
(integrity rules).  Paths compose by concatenation; the empty path at an
object is its identity.  Path equality is semidecidable, so it is decided by
a bounded congruence closure that reports Equal, Distinct, or Inconclusive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import TypingError, UnboundedError

EQUAL = "Equal"
DISTINCT = "Distinct"
INCONCLUSIVE = "Inconclusive"

DEFAULT_BOUND = 16


@dataclass(frozen=True)
class Generator:
    """An arrow generator: a named column from one object to another."""

    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Path:
    """A composable sequence of generator names starting at ``source``.

    The empty sequence is the identity at ``source``.
    """

    source: str
    steps: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.steps, tuple):
            object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def pretty(self) -> str:
        return f"[{self.source}; {' '.join(self.steps) if self.steps else 'id'}]"


@dataclass(frozen=True, eq=True)
class SchemaPresentation:
    """A finitely presented category: objects, generators, path equations."""

    name: str
    objects: tuple[str, ...]
    generators: tuple[Generator, ...]
    equations: tuple[tuple[Path, Path], ...] = ()

    # Lookup caches, excluded from equality and hashing.
    _by_source: dict[str, tuple[Generator, ...]] = field(
        default_factory=dict, compare=False, repr=False, hash=False
    )
    _by_key: dict[tuple[str, str], Generator] = field(
        default_factory=dict, compare=False, repr=False, hash=False
    )

    def __post_init__(self) -> None:
        if len(set(self.objects)) != len(self.objects):
            raise TypingError(f"schema {self.name}: duplicate object names")
        objs = set(self.objects)
        by_source: dict[str, list[Generator]] = {o: [] for o in self.objects}
        by_key: dict[tuple[str, str], Generator] = {}
        for g in self.generators:
            if g.source not in objs or g.target not in objs:
                raise TypingError(f"schema {self.name}: generator {g.name} has undeclared endpoint")
            key = (g.source, g.name)
            if key in by_key:
                raise TypingError(f"schema {self.name}: generator {g.name} duplicated at {g.source}")
            by_key[key] = g
            by_source[g.source].append(g)
        object.__setattr__(self, "_by_source", {o: tuple(gs) for o, gs in by_source.items()})
        object.__setattr__(self, "_by_key", by_key)
        for lhs, rhs in self.equations:
            if lhs.source != rhs.source:
                raise TypingError(f"schema {self.name}: equation sides start at different objects")
            if self.path_target(lhs) != self.path_target(rhs):
                raise TypingError(f"schema {self.name}: equation sides end at different objects")

    def __hash__(self) -> int:
        return hash((self.name, self.objects, self.generators, self.equations))

    def generators_from(self, obj: str) -> tuple[Generator, ...]:
        if obj not in self._by_source:
            raise TypingError(f"schema {self.name}: unknown object {obj}")
        return self._by_source[obj]

    def generator(self, source: str, name: str) -> Generator:
        g = self._by_key.get((source, name))
        if g is None:
            raise TypingError(f"schema {self.name}: no generator {name} at {source}")
        return g

    def object_index(self, obj: str) -> int:
        try:
            return self.objects.index(obj)
        except ValueError:
            raise TypingError(f"schema {self.name}: unknown object {obj}") from None

    def path_target(self, path: Path) -> str:
        """Endpoint of a path, checking each step is a declared generator."""
        at = path.source
        if at not in self._by_source:
            raise TypingError(f"schema {self.name}: unknown object {at}")
        for step in path.steps:
            at = self.generator(at, step).target
        return at

    def identity(self, obj: str) -> Path:
        if obj not in self._by_source:
            raise TypingError(f"schema {self.name}: unknown object {obj}")
        return Path(obj)


def compose_paths(schema: SchemaPresentation, p: Path, q: Path) -> Path:
    """Concatenate two paths; the target of ``p`` must be the source of ``q``."""
    if schema.path_target(p) != q.source:
        raise TypingError(
            f"cannot compose {p.pretty()} with {q.pretty()}: endpoint mismatch"
        )
    return Path(p.source, p.steps + q.steps)


def _paths_from(schema: SchemaPresentation, source: str, bound: int) -> list[tuple[str, ...]]:
    """All step tuples of length <= bound leaving ``source``, shortest first."""
    out: list[tuple[str, ...]] = [()]
    frontier: list[tuple[tuple[str, ...], str]] = [((), source)]
    for _ in range(bound):
        nxt: list[tuple[tuple[str, ...], str]] = []
        for steps, at in frontier:
            for g in schema.generators_from(at):
                nxt.append((steps + (g.name,), g.target))
        out.extend(steps for steps, _ in nxt)
        frontier = nxt
        if not frontier:
            break
    return out


class _UnionFind:
    """Plain union-find with path compression and size merging."""

    def __init__(self) -> None:
        self.parent: dict[object, object] = {}
        self.size: dict[object, int] = {}

    def add(self, x: object) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x: object) -> object:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: object, b: object) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


class _Closure:
    """Bounded congruence closure of the equations on paths out of one object.

    Every path of length <= bound leaving ``source`` is a node; two nodes are
    unioned when one rewrites to the other by a single equation applied at
    some position.  A class is "blocked" when some member has a rewrite whose
    result exceeds the bound: such a class may be incomplete.
    """

    def __init__(self, schema: SchemaPresentation, source: str, bound: int) -> None:
        self.schema = schema
        self.source = source
        self.bound = bound
        self.paths = _paths_from(schema, source, bound)
        self.uf = _UnionFind()
        for p in self.paths:
            self.uf.add(p)
        self._blocked: set[tuple[str, ...]] = set()
        rules: list[tuple[str, tuple[str, ...], tuple[str, ...]]] = []
        for lhs, rhs in schema.equations:
            rules.append((lhs.source, lhs.steps, rhs.steps))
            rules.append((rhs.source, rhs.steps, lhs.steps))
        for steps in self.paths:
            prefix_obj = source
            for i in range(len(steps) + 1):
                for at, frm, to in rules:
                    if at != prefix_obj or steps[i : i + len(frm)] != frm:
                        continue
                    rewritten = steps[:i] + to + steps[i + len(frm) :]
                    if len(rewritten) <= bound:
                        self.uf.union(steps, rewritten)
                    else:
                        self._blocked.add(steps)
                if i < len(steps):
                    prefix_obj = schema.generator(prefix_obj, steps[i]).target

    def same(self, p: tuple[str, ...], q: tuple[str, ...]) -> bool:
        return self.uf.find(p) == self.uf.find(q)

    def class_blocked(self, p: tuple[str, ...]) -> bool:
        root = self.uf.find(p)
        return any(self.uf.find(b) == root for b in self._blocked)

    def classes(self) -> dict[object, list[tuple[str, ...]]]:
        out: dict[object, list[tuple[str, ...]]] = {}
        for p in self.paths:
            out.setdefault(self.uf.find(p), []).append(p)
        return out


def paths_equal(
    schema: SchemaPresentation, p: Path, q: Path, bound: int = DEFAULT_BOUND
) -> str:
    """Decide path equality up to a length bound.

    Returns EQUAL when the bounded closure relates the paths, DISTINCT when it
    does not and both classes are rewrite-closed inside the bound (so no
    longer derivation could relate them), and INCONCLUSIVE otherwise.
    """
    if p.source != q.source or schema.path_target(p) != schema.path_target(q):
        return DISTINCT
    if max(len(p), len(q)) > bound:
        raise TypingError("paths_equal: path longer than the bound")
    closure = _Closure(schema, p.source, bound)
    if closure.same(p.steps, q.steps):
        return EQUAL
    if closure.class_blocked(p.steps) or closure.class_blocked(q.steps):
        return INCONCLUSIVE
    return DISTINCT


@dataclass(frozen=True)
class HomClasses:
    """Path classes out of one object, one shortlex representative per class."""

    source: str
    bound: int
    # target object -> tuple of representative step tuples, shortlex order
    reps: dict[str, tuple[tuple[str, ...], ...]]
    # every enumerated step tuple -> its representative
    rep_of: dict[tuple[str, ...], tuple[str, ...]]


def hom_classes(
    schema: SchemaPresentation, source: str, bound: int = DEFAULT_BOUND
) -> HomClasses:
    """Enumerate morphism classes out of ``source`` via the bounded closure.

    Saturation demands every class own a representative of length <= bound/2,
    leaving headroom so composites of representatives stay inside the closed
    universe; otherwise the hom-sets are treated as still growing.
    """
    closure = _Closure(schema, source, bound)
    rep_of: dict[tuple[str, ...], tuple[str, ...]] = {}
    by_target: dict[str, list[tuple[str, ...]]] = {}
    for members in closure.classes().values():
        rep = min(members, key=lambda s: (len(s), s))
        if len(rep) > bound // 2:
            raise UnboundedError(
                f"hom-classes out of {source} still growing at bound {bound}"
                f" (class with shortest representative {list(rep)})"
            )
        for m in members:
            rep_of[m] = rep
        by_target.setdefault(schema.path_target(Path(source, rep)), []).append(rep)
    reps = {
        tgt: tuple(sorted(lst, key=lambda s: (len(s), s)))
        for tgt, lst in by_target.items()
    }
    return HomClasses(source=source, bound=bound, reps=reps, rep_of=rep_of)


@dataclass
class SchemaMorphism:
    """A functor between presentations: objects to objects, generators to paths."""

    name: str
    domain: SchemaPresentation
    codomain: SchemaPresentation
    object_map: dict[str, str]
    generator_map: dict[tuple[str, str], Path]

    def __post_init__(self) -> None:
        for o in self.domain.objects:
            if o not in self.object_map:
                raise TypingError(f"functor {self.name}: object {o} unmapped")
            if self.object_map[o] not in self.codomain.objects:
                raise TypingError(f"functor {self.name}: image of {o} undeclared")
        for g in self.domain.generators:
            img = self.generator_map.get((g.source, g.name))
            if img is None:
                raise TypingError(f"functor {self.name}: generator {g.name} unmapped")
            if img.source != self.object_map[g.source]:
                raise TypingError(
                    f"functor {self.name}: image of {g.name} starts at {img.source},"
                    f" expected {self.object_map[g.source]}"
                )
            if self.codomain.path_target(img) != self.object_map[g.target]:
                raise TypingError(
                    f"functor {self.name}: image of {g.name} ends at the wrong object"
                )

    def apply_object(self, obj: str) -> str:
        return self.object_map[obj]

    def apply_path(self, path: Path) -> Path:
        """Translate a domain path by concatenating generator images."""
        at = path.source
        steps: list[str] = []
        for step in path.steps:
            g = self.domain.generator(at, step)
            steps.extend(self.generator_map[(at, step)].steps)
            at = g.target
        return Path(self.object_map[path.source], tuple(steps))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SchemaMorphism):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and self.object_map == other.object_map
            and self.generator_map == other.generator_map
        )


def identity_morphism(schema: SchemaPresentation) -> SchemaMorphism:
    return SchemaMorphism(
        name=f"id_{schema.name}",
        domain=schema,
        codomain=schema,
        object_map={o: o for o in schema.objects},
        generator_map={
            (g.source, g.name): Path(g.source, (g.name,)) for g in schema.generators
        },
    )


def compose_morphisms(first: SchemaMorphism, second: SchemaMorphism) -> SchemaMorphism:
    """The composite applying ``first`` and then ``second``."""
    if first.codomain != second.domain:
        raise TypingError("compose_morphisms: middle schemas differ")
    return SchemaMorphism(
        name=f"{second.name}.{first.name}",
        domain=first.domain,
        codomain=second.codomain,
        object_map={o: second.object_map[v] for o, v in first.object_map.items()},
        generator_map={
            key: second.apply_path(img) for key, img in first.generator_map.items()
        },
    )


@dataclass
class FunctorReport:
    """Outcome of check_functor: typing issues and unpreserved equations."""

    issues: list[str] = field(default_factory=list)
    undecided: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues and not self.undecided


def check_functor(f: SchemaMorphism, bound: int = DEFAULT_BOUND) -> FunctorReport:
    """Verify a morphism sends each domain equation to equal codomain paths."""
    report = FunctorReport()
    for lhs, rhs in f.domain.equations:
        left, right = f.apply_path(lhs), f.apply_path(rhs)
        verdict = paths_equal(f.codomain, left, right, bound)
        if verdict == DISTINCT:
            report.issues.append(
                f"equation {lhs.pretty()} = {rhs.pretty()} maps to distinct paths"
                f" {left.pretty()} != {right.pretty()}"
            )
        elif verdict == INCONCLUSIVE:
            report.undecided.append(
                f"equation {lhs.pretty()} = {rhs.pretty()} undecided at bound {bound}"
            )
    return report


def pushout_presentation(
    m1: SchemaMorphism, m2: SchemaMorphism
) -> tuple[SchemaPresentation, SchemaMorphism, SchemaMorphism]:
    """Pushout of two presentation morphisms out of a shared domain.

    Objects are glued by union-find on the two object sets, merging the two
    images of each shared object; the representative is the least tagged name
    in declaration order, renamed with a side tag when bare names collide.
    Generators are the disjoint union, and each shared generator contributes
    an equation identifying its two translated images.
    """
    if m1.domain != m2.domain:
        raise TypingError("pushout_presentation: morphisms must share their domain")
    shared, left, right = m1.domain, m1.codomain, m2.codomain

    uf = _UnionFind()
    tags: list[tuple[int, str]] = []
    for side, schema in ((0, left), (1, right)):
        for o in schema.objects:
            uf.add((side, o))
            tags.append((side, o))
    for o in shared.objects:
        uf.union((0, m1.object_map[o]), (1, m2.object_map[o]))

    order = {tag: i for i, tag in enumerate(tags)}
    members: dict[object, list[tuple[int, str]]] = {}
    for tag in tags:
        members.setdefault(uf.find(tag), []).append(tag)
    classes = sorted(members.values(), key=lambda ms: min(order[t] for t in ms))
    rep_tag = {id_cls: min(cls, key=lambda t: order[t]) for id_cls, cls in enumerate(classes)}

    bare_counts: dict[str, int] = {}
    for i in range(len(classes)):
        bare_counts[rep_tag[i][1]] = bare_counts.get(rep_tag[i][1], 0) + 1
    side_suffix = {0: "@l", 1: "@r"}
    class_name: dict[tuple[int, str], str] = {}
    names: list[str] = []
    for i, cls in enumerate(classes):
        side, bare = rep_tag[i]
        name = bare if bare_counts[bare] == 1 else bare + side_suffix[side]
        names.append(name)
        for t in cls:
            class_name[t] = name

    gen_tags = [(0, g) for g in left.generators] + [(1, g) for g in right.generators]
    gen_bare: dict[tuple[str, str], int] = {}
    for side, g in gen_tags:
        key = (class_name[(side, g.source)], g.name)
        gen_bare[key] = gen_bare.get(key, 0) + 1
    gen_name: dict[tuple[int, str, str], str] = {}
    generators: list[Generator] = []
    for side, g in gen_tags:
        src = class_name[(side, g.source)]
        name = g.name if gen_bare[(src, g.name)] == 1 else g.name + side_suffix[side]
        gen_name[(side, g.source, g.name)] = name
        generators.append(Generator(name, src, class_name[(side, g.target)]))

    def translate(side: int, path: Path, schema: SchemaPresentation) -> Path:
        at = path.source
        steps = []
        for step in path.steps:
            steps.append(gen_name[(side, at, step)])
            at = schema.generator(at, step).target
        return Path(class_name[(side, path.source)], tuple(steps))

    equations: list[tuple[Path, Path]] = []
    for side, schema in ((0, left), (1, right)):
        for lhs, rhs in schema.equations:
            equations.append((translate(side, lhs, schema), translate(side, rhs, schema)))
    for g in shared.generators:
        img1 = translate(0, m1.generator_map[(g.source, g.name)], left)
        img2 = translate(1, m2.generator_map[(g.source, g.name)], right)
        if img1 != img2:
            equations.append((img1, img2))

    pushout = SchemaPresentation(
        name=f"po_{left.name}_{right.name}",
        objects=tuple(names),
        generators=tuple(generators),
        equations=tuple(equations),
    )

    def injection(side: int, schema: SchemaPresentation, label: str) -> SchemaMorphism:
        return SchemaMorphism(
            name=label,
            domain=schema,
            codomain=pushout,
            object_map={o: class_name[(side, o)] for o in schema.objects},
            generator_map={
                (g.source, g.name): Path(
                    class_name[(side, g.source)], (gen_name[(side, g.source, g.name)],)
                )
                for g in schema.generators
            },
        )

    return pushout, injection(0, left, "inl"), injection(1, right, "inr")


def _comma_object_name(obj: str, steps: tuple[str, ...]) -> str:
    return f"{obj}[{' '.join(steps)}]"


def comma_category(
    f: SchemaMorphism, anchor: str, bound: int = DEFAULT_BOUND
) -> tuple[SchemaPresentation, SchemaMorphism]:
    """The comma category of ``f`` under an anchor object of its codomain.

    Objects are pairs (domain object c, morphism class anchor -> f(c)); each
    domain generator g: c -> c' induces one generator per such pair, landing
    at the class of the composite.  Returns the presentation together with
    its projection onto the domain of ``f``.  Raises UnboundedError when the
    classes out of the anchor do not saturate at the bound.
    """
    target = f.codomain
    if anchor not in target.objects:
        raise TypingError(f"comma_category: unknown anchor object {anchor}")
    classes = hom_classes(target, anchor, bound)

    objects: list[tuple[str, tuple[str, ...]]] = []
    for c in f.domain.objects:
        for rep in classes.reps.get(f.object_map[c], ()):
            objects.append((c, rep))
    names = {pair: _comma_object_name(*pair) for pair in objects}

    generators: list[Generator] = []
    gen_source: dict[str, tuple[str, str]] = {}
    for c, rep in objects:
        for g in f.domain.generators_from(c):
            extended = rep + f.generator_map[(c, g.name)].steps
            if len(extended) > bound:
                raise UnboundedError(
                    f"comma_category: composite past bound {bound} at {names[(c, rep)]}"
                )
            rep2 = classes.rep_of[extended]
            generators.append(
                Generator(g.name, names[(c, rep)], names[(g.target, rep2)])
            )
            gen_source[names[(c, rep)]] = (c, rep)

    comma = SchemaPresentation(
        name=f"comma_{anchor}_{f.name}",
        objects=tuple(names[pair] for pair in objects),
        generators=tuple(generators),
    )
    projection = SchemaMorphism(
        name=f"proj_{anchor}",
        domain=comma,
        codomain=f.domain,
        object_map={names[(c, rep)]: c for c, rep in objects},
        generator_map={
            (g.source, g.name): Path(gen_source[g.source][0], (g.name,))
            for g in generators
        },
    )
    return comma, projection


def enumerate_paths(
    schema: SchemaPresentation, source: str, target: str, bound: int
) -> list[Path]:
    """All paths source -> target of length <= bound, shortlex order."""
    return [
        Path(source, steps)
        for steps in _paths_from(schema, source, bound)
        if schema.path_target(Path(source, steps)) == target
    ]


def enumerate_schema_morphisms(
    domain: SchemaPresentation,
    codomain: SchemaPresentation,
    bound: int = DEFAULT_BOUND,
) -> list[SchemaMorphism]:
    """Every functor between two presentations, by exhaustive assignment.

    The codomain's hom-classes must saturate at the bound (UnboundedError
    otherwise); equation preservation is checked per candidate.
    """
    classes = {o: hom_classes(codomain, o, bound) for o in codomain.objects}
    out: list[SchemaMorphism] = []
    object_choices = list(itertools.product(codomain.objects, repeat=len(domain.objects)))
    for combo in object_choices:
        omap = dict(zip(domain.objects, combo))
        per_gen: list[list[Path]] = []
        feasible = True
        for g in domain.generators:
            reps = classes[omap[g.source]].reps.get(omap[g.target], ())
            if not reps:
                feasible = False
                break
            per_gen.append([Path(omap[g.source], rep) for rep in reps])
        if not feasible:
            continue
        for images in itertools.product(*per_gen):
            gmap = {
                (g.source, g.name): img
                for g, img in zip(domain.generators, images)
            }
            candidate = SchemaMorphism(
                name="cand", domain=domain, codomain=codomain,
                object_map=omap, generator_map=gmap,
            )
            if all(
                _reduced_image(candidate, classes, lhs)
                == _reduced_image(candidate, classes, rhs)
                for lhs, rhs in domain.equations
            ):
                out.append(candidate)
    return out


def _reduced_image(
    f: SchemaMorphism, classes: dict[str, HomClasses], path: Path
) -> tuple[str, ...]:
    """Translate a domain path and reduce to its class representative stepwise.

    Reducing after each generator image keeps the accumulator inside the
    enumerated universe (representatives are at most bound/2 long).
    """
    table = classes[f.object_map[path.source]].rep_of
    at = path.source
    acc: tuple[str, ...] = ()
    for step in path.steps:
        acc = table[acc + f.generator_map[(at, step)].steps]
        at = f.domain.generator(at, step).target
    return acc
