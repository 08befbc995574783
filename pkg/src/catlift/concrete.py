"""Concrete finite categories with explicit composition tables.

A presentation whose hom-classes saturate below the bound can be materialized
into one of these; they also get built by hand in tests and by the
category-of-elements construction.  Object and morphism names are arbitrary
hashables so row pairs can name objects directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable

from .errors import TypingError, UnboundedError
from .presentation import (
    DEFAULT_BOUND,
    Path,
    SchemaPresentation,
    hom_classes,
)


@dataclass
class ConcreteCategory:
    """Objects, arrows with endpoints, identities, and a composition table."""

    objects: tuple[Hashable, ...]
    arrows: dict[Hashable, tuple[Hashable, Hashable]]
    identities: dict[Hashable, Hashable]
    # (f, g) -> the arrow "f then g", total over composable pairs
    composition: dict[tuple[Hashable, Hashable], Hashable]

    # set when produced by materialize, so instances can be recovered later
    schema: SchemaPresentation | None = field(default=None, compare=False)
    path_class: dict[tuple[str, tuple[str, ...]], Hashable] = field(
        default_factory=dict, compare=False, repr=False
    )

    def source(self, f: Hashable) -> Hashable:
        return self.arrows[f][0]

    def target(self, f: Hashable) -> Hashable:
        return self.arrows[f][1]

    def hom(self, a: Hashable, b: Hashable) -> tuple[Hashable, ...]:
        return tuple(f for f, (s, t) in self.arrows.items() if s == a and t == b)

    def arrows_from(self, a: Hashable) -> tuple[Hashable, ...]:
        return tuple(f for f, (s, _) in self.arrows.items() if s == a)

    def compose(self, f: Hashable, g: Hashable) -> Hashable:
        """The composite doing ``f`` first and ``g`` second."""
        if self.target(f) != self.source(g):
            raise TypingError(f"compose: {f!r} then {g!r} not composable")
        return self.composition[(f, g)]

    def validate(self) -> list[str]:
        """Identity, totality, unit, and associativity checks."""
        issues: list[str] = []
        for o in self.objects:
            i = self.identities.get(o)
            if i is None or self.arrows.get(i) != (o, o):
                issues.append(f"object {o!r} lacks an identity loop")
        for f, (_, ft) in self.arrows.items():
            for g, (gs, _) in self.arrows.items():
                if ft == gs and (f, g) not in self.composition:
                    issues.append(f"composition missing for {f!r};{g!r}")
        if issues:
            return issues
        for f, (fs, ft) in self.arrows.items():
            if self.composition[(self.identities[fs], f)] != f:
                issues.append(f"left unit fails at {f!r}")
            if self.composition[(f, self.identities[ft])] != f:
                issues.append(f"right unit fails at {f!r}")
        for f, (_, ft) in self.arrows.items():
            for g, (gs, gt) in self.arrows.items():
                if ft != gs:
                    continue
                for h, (hs, _) in self.arrows.items():
                    if gt != hs:
                        continue
                    if self.composition[(self.composition[(f, g)], h)] != self.composition[
                        (f, self.composition[(g, h)])
                    ]:
                        issues.append(f"associativity fails at {f!r};{g!r};{h!r}")
        return issues

    def evaluate_path(self, start: Hashable, steps: tuple[Hashable, ...]) -> Hashable:
        """Fold a sequence of arrows from an object into one composite arrow."""
        acc = self.identities[start]
        for step in steps:
            acc = self.compose(acc, step)
        return acc


def materialize(
    schema: SchemaPresentation, bound: int = DEFAULT_BOUND
) -> ConcreteCategory:
    """Present the schema as a concrete category, if its hom-sets saturate.

    Arrow names are ``obj[steps]`` for the shortlex-least path in each class.
    Raises UnboundedError when some hom-set keeps growing at the bound.
    """
    per_source = {o: hom_classes(schema, o, bound) for o in schema.objects}

    def arrow_name(src: str, steps: tuple[str, ...]) -> str:
        return f"{src}[{' '.join(steps)}]"

    arrows: dict[Hashable, tuple[Hashable, Hashable]] = {}
    identities: dict[Hashable, Hashable] = {}
    path_class: dict[tuple[str, tuple[str, ...]], Hashable] = {}
    for src in schema.objects:
        classes = per_source[src]
        for tgt in schema.objects:
            for rep in classes.reps.get(tgt, ()):
                arrows[arrow_name(src, rep)] = (src, tgt)
        identities[src] = arrow_name(src, classes.rep_of[()])
        for steps, rep in classes.rep_of.items():
            path_class[(src, steps)] = arrow_name(src, rep)

    composition: dict[tuple[Hashable, Hashable], Hashable] = {}
    for src in schema.objects:
        classes = per_source[src]
        for tgt in schema.objects:
            for rep in classes.reps.get(tgt, ()):
                for rep2 in itertools.chain.from_iterable(
                    per_source[tgt].reps.get(t2, ()) for t2 in schema.objects
                ):
                    combined = rep + rep2
                    if combined not in classes.rep_of:
                        raise UnboundedError(
                            f"materialize: composite escapes bound {bound} at {src}"
                        )
                    composition[(arrow_name(src, rep), arrow_name(tgt, rep2))] = (
                        arrow_name(src, classes.rep_of[combined])
                    )

    return ConcreteCategory(
        objects=tuple(schema.objects),
        arrows=arrows,
        identities=identities,
        composition=composition,
        schema=schema,
        path_class=path_class,
    )


def path_arrow(category: ConcreteCategory, path: Path) -> Hashable:
    """Look up the arrow a schema path denotes in a materialized category."""
    if category.schema is None:
        raise TypingError("path_arrow: category was not produced by materialize")
    key = (path.source, path.steps)
    if key not in category.path_class:
        # Reduce stepwise; representatives are short enough that each
        # concatenation stays inside the enumerated universe.
        acc: tuple[str, ...] = ()
        for step in path.steps:
            nxt = category.path_class.get((path.source, acc + (step,)))
            if nxt is None:
                raise UnboundedError(f"path_arrow: {path.pretty()} escapes the bound")
            acc = _rep_steps(nxt)
        return category.path_class[(path.source, acc)]
    return category.path_class[key]


def _rep_steps(arrow_name: str) -> tuple[str, ...]:
    inner = arrow_name[arrow_name.index("[") + 1 : -1]
    return tuple(inner.split()) if inner else ()


@dataclass
class ConcreteFunctor:
    """A functor between concrete categories, given by explicit maps."""

    domain: ConcreteCategory
    codomain: ConcreteCategory
    object_map: dict[Hashable, Hashable]
    arrow_map: dict[Hashable, Hashable]

    def validate(self) -> list[str]:
        issues: list[str] = []
        for o in self.domain.objects:
            if self.object_map.get(o) not in self.codomain.objects:
                issues.append(f"object {o!r} unmapped")
        for f, (s, t) in self.domain.arrows.items():
            img = self.arrow_map.get(f)
            if img is None or img not in self.codomain.arrows:
                issues.append(f"arrow {f!r} unmapped")
                continue
            if self.codomain.arrows[img] != (self.object_map[s], self.object_map[t]):
                issues.append(f"arrow {f!r} image has wrong endpoints")
        if issues:
            return issues
        for o in self.domain.objects:
            if self.arrow_map[self.domain.identities[o]] != self.codomain.identities[
                self.object_map[o]
            ]:
                issues.append(f"identity at {o!r} not preserved")
        for pair, h in self.domain.composition.items():
            f, g = pair
            if self.codomain.composition[(self.arrow_map[f], self.arrow_map[g])] != (
                self.arrow_map[h]
            ):
                issues.append(f"composition {f!r};{g!r} not preserved")
        return issues

    def apply_object(self, o: Hashable) -> Hashable:
        return self.object_map[o]

    def apply_arrow(self, f: Hashable) -> Hashable:
        return self.arrow_map[f]


def enumerate_functors_to_concrete(
    domain: SchemaPresentation, target: ConcreteCategory
) -> list[dict]:
    """All functors from a presentation into a concrete category.

    Each result maps objects to target objects and generators to target
    arrows, with every presentation equation checked by evaluation.
    """
    out: list[dict] = []
    for combo in itertools.product(target.objects, repeat=len(domain.objects)):
        omap = dict(zip(domain.objects, combo))
        per_gen: list[tuple[Hashable, ...]] = []
        feasible = True
        for g in domain.generators:
            choices = target.hom(omap[g.source], omap[g.target])
            if not choices:
                feasible = False
                break
            per_gen.append(choices)
        if not feasible:
            continue
        for images in itertools.product(*per_gen):
            gmap = {(g.source, g.name): img for g, img in zip(domain.generators, images)}

            def ev(path: Path) -> Hashable:
                acc = target.identities[omap[path.source]]
                at = path.source
                for step in path.steps:
                    acc = target.compose(acc, gmap[(at, step)])
                    at = domain.generator(at, step).target
                return acc

            if all(ev(lhs) == ev(rhs) for lhs, rhs in domain.equations):
                out.append({"objects": omap, "generators": gmap})
    return out
