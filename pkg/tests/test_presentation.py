"""Presentations, the bounded word problem, functors, pushouts, commas."""

from __future__ import annotations

import random

import pytest

from catlift import (
    DISTINCT,
    EQUAL,
    INCONCLUSIVE,
    Generator,
    Path,
    SchemaMorphism,
    SchemaPresentation,
    TypingError,
    UnboundedError,
    check_functor,
    compose_morphisms,
    compose_paths,
    identity_morphism,
    paths_equal,
)
from catlift.presentation import (
    comma_category,
    enumerate_schema_morphisms,
    hom_classes,
    pushout_presentation,
)

from conftest import FIXTURES
from catlift import load_schema
from helpers import random_dag_schema, random_morphism


def p(source: str, *steps: str) -> Path:
    return Path(source, tuple(steps))


DOT = SchemaPresentation("dot", objects=("a",), generators=())
ARROW = SchemaPresentation(
    "arrow", objects=("a", "b"), generators=(Generator("f", "a", "b"),)
)


# -- construction guards -------------------------------------------------------


def test_duplicate_objects_rejected():
    with pytest.raises(TypingError):
        SchemaPresentation("bad", objects=("A", "A"), generators=())


def test_undeclared_endpoint_rejected():
    with pytest.raises(TypingError):
        SchemaPresentation("bad", objects=("A",), generators=(Generator("f", "A", "B"),))


def test_duplicate_generator_key_rejected():
    gens = (Generator("f", "A", "B"), Generator("f", "A", "B"))
    with pytest.raises(TypingError):
        SchemaPresentation("bad", objects=("A", "B"), generators=gens)


def test_equation_endpoints_must_agree():
    gens = (Generator("f", "A", "B"), Generator("g", "A", "A"))
    with pytest.raises(TypingError):
        SchemaPresentation(
            "bad",
            objects=("A", "B"),
            generators=gens,
            equations=((p("A", "f"), p("A", "g")),),
        )


def test_path_target_checks_every_step(emp):
    schema, _ = emp
    assert schema.path_target(p("Employee", "worksIn", "name")) == "DNString"
    with pytest.raises(TypingError):
        schema.path_target(p("Employee", "name"))


def test_compose_paths_requires_matching_endpoint(emp):
    schema, _ = emp
    left = p("Employee", "worksIn")
    right = p("Department", "secretary")
    assert compose_paths(schema, left, right) == p("Employee", "worksIn", "secretary")
    with pytest.raises(TypingError):
        compose_paths(schema, left, p("Employee", "first"))


# -- bounded word problem ------------------------------------------------------


def test_declared_rules_hold(emp):
    schema, _ = emp
    assert paths_equal(schema, p("Employee", "manager", "worksIn"), p("Employee", "worksIn")) == EQUAL
    assert paths_equal(schema, p("Department", "secretary", "worksIn"), p("Department")) == EQUAL


def test_derived_equalities_hold(emp):
    schema, _ = emp
    long = p("Employee", "manager", "manager", "worksIn")
    assert paths_equal(schema, long, p("Employee", "worksIn")) == EQUAL
    round_trip = p("Employee", "worksIn", "secretary", "worksIn")
    assert paths_equal(schema, round_trip, p("Employee", "worksIn")) == EQUAL


def test_distinct_classes_are_certified(emp):
    schema, _ = emp
    assert paths_equal(schema, p("Employee", "manager"), p("Employee")) == DISTINCT
    assert paths_equal(schema, p("Employee", "manager"), p("Employee", "manager", "manager")) == DISTINCT
    assert paths_equal(schema, p("Employee", "first"), p("Employee", "last")) == DISTINCT


def test_growing_class_reports_inconclusive():
    idem = SchemaPresentation(
        "idem",
        objects=("A",),
        generators=(Generator("u", "A", "A"),),
        equations=((p("A", "u"), p("A", "u", "u")),),
    )
    assert paths_equal(idem, p("A", "u"), p("A", "u", "u", "u"), 8) == EQUAL
    assert paths_equal(idem, p("A", "u"), p("A"), 8) == INCONCLUSIVE


def test_paths_longer_than_bound_rejected():
    loop = SchemaPresentation("loop", objects=("A",), generators=(Generator("u", "A", "A"),))
    with pytest.raises(TypingError):
        paths_equal(loop, p("A", *["u"] * 9), p("A"), 8)


def test_hom_classes_saturate_on_ln(ln):
    schema, _ = ln
    hc = hom_classes(schema, "Person")
    assert hc.reps == {
        "Person": ((),),
        "FNames": (("First",),),
        "LNames": (("Last",),),
    }
    assert hc.rep_of[("First",)] == ("First",)


def test_hom_classes_raise_on_looped_schemas(emp, dds):
    for schema, obj in ((emp[0], "Employee"), (emp[0], "Department"), (dds[0], "v")):
        with pytest.raises(UnboundedError):
            hom_classes(schema, obj)


# -- morphisms -----------------------------------------------------------------


def test_morphism_requires_total_maps(ln):
    schema, _ = ln
    with pytest.raises(TypingError):
        SchemaMorphism("f", DOT, schema, {}, {})
    with pytest.raises(TypingError):
        SchemaMorphism("f", ARROW, schema, {"a": "Person", "b": "FNames"}, {})


def test_morphism_generator_image_endpoints_checked(ln):
    schema, _ = ln
    with pytest.raises(TypingError):
        SchemaMorphism(
            "f",
            ARROW,
            schema,
            {"a": "Person", "b": "FNames"},
            {("a", "f"): Path("Person", ("Last",))},
        )


def test_identity_and_composition(ln):
    schema, _ = ln
    ident = identity_morphism(schema)
    into = SchemaMorphism(
        "probe",
        ARROW,
        schema,
        {"a": "Person", "b": "LNames"},
        {("a", "f"): Path("Person", ("Last",))},
    )
    assert compose_morphisms(into, ident) == into
    assert compose_morphisms(identity_morphism(ARROW), into) == into
    assert ident.apply_path(p("Person", "First")) == p("Person", "First")


def test_apply_path_concatenates_images(emp):
    schema, _ = emp
    wedge = SchemaPresentation(
        "wedge", objects=("x", "y"), generators=(Generator("g", "x", "y"),)
    )
    f = SchemaMorphism(
        "f",
        wedge,
        schema,
        {"x": "Employee", "y": "DNString"},
        {("x", "g"): p("Employee", "worksIn", "name")},
    )
    assert f.apply_path(p("x", "g")) == p("Employee", "worksIn", "name")


def test_check_functor_flags_broken_equations(tmp_path):
    eq = SchemaPresentation(
        "eq",
        objects=("X", "Y"),
        generators=(Generator("u", "X", "Y"), Generator("v", "X", "Y")),
        equations=((p("X", "u"), p("X", "v")),),
    )
    flat = load_schema(FIXTURES / "ln" / "flat.cat")
    broken = SchemaMorphism(
        "broken",
        eq,
        flat,
        {"X": "Person", "Y": "Names"},
        {("X", "u"): p("Person", "First"), ("X", "v"): p("Person", "Last")},
    )
    report = check_functor(broken)
    assert not report.ok and report.issues
    fine = SchemaMorphism(
        "fine",
        eq,
        flat,
        {"X": "Person", "Y": "Names"},
        {("X", "u"): p("Person", "First"), ("X", "v"): p("Person", "First")},
    )
    assert check_functor(fine).ok


# -- pushouts ------------------------------------------------------------------


def test_pushout_of_dot_inclusions():
    include = SchemaMorphism("m", DOT, ARROW, {"a": "a"}, {})
    po, inl, inr = pushout_presentation(include, include)
    assert po.objects == ("a", "b@l", "b@r")
    assert {(g.name, g.source, g.target) for g in po.generators} == {
        ("f@l", "a", "b@l"),
        ("f@r", "a", "b@r"),
    }
    assert po.equations == ()
    assert inl.object_map == {"a": "a", "b": "b@l"}
    assert inr.object_map == {"a": "a", "b": "b@r"}


def test_pushout_identifies_shared_generators():
    ident = identity_morphism(ARROW)
    po, inl, inr = pushout_presentation(ident, ident)
    assert po.objects == ("a", "b")
    names = sorted(g.name for g in po.generators)
    assert names == ["f@l", "f@r"]
    assert paths_equal(po, p("a", "f@l"), p("a", "f@r")) == EQUAL
    for o in ARROW.objects:
        assert inl.object_map[o] == inr.object_map[o]


def test_pushout_cocone_commutes_randomized():
    rng = random.Random(7)
    checked = 0
    for _ in range(40):
        shared = random_dag_schema(rng, "w", max_objects=2, max_arrows=1)
        left = random_dag_schema(rng, "l", max_objects=3, max_arrows=2)
        right = random_dag_schema(rng, "r", max_objects=3, max_arrows=2)
        m1 = random_morphism(rng, shared, left, "m1")
        m2 = random_morphism(rng, shared, right, "m2")
        if m1 is None or m2 is None:
            continue
        po, inl, inr = pushout_presentation(m1, m2)
        left_leg = compose_morphisms(m1, inl)
        right_leg = compose_morphisms(m2, inr)
        assert left_leg.object_map == right_leg.object_map
        for g in shared.generators:
            key = (g.source, g.name)
            verdict = paths_equal(
                po, left_leg.generator_map[key], right_leg.generator_map[key]
            )
            assert verdict == EQUAL
        checked += 1
    assert checked >= 20


def test_pushout_universal_property_randomized():
    rng = random.Random(11)
    checked = 0
    for _ in range(60):
        shared = random_dag_schema(rng, "w", max_objects=2, max_arrows=1)
        left = random_dag_schema(rng, "l", max_objects=2, max_arrows=2)
        right = random_dag_schema(rng, "r", max_objects=2, max_arrows=2)
        m1 = random_morphism(rng, shared, left, "m1")
        m2 = random_morphism(rng, shared, right, "m2")
        if m1 is None or m2 is None:
            continue
        po, inl, inr = pushout_presentation(m1, m2)
        target = random_dag_schema(rng, "t", max_objects=3, max_arrows=3)
        u = random_morphism(rng, po, target, "u")
        if u is None:
            continue
        c1 = compose_morphisms(inl, u)
        c2 = compose_morphisms(inr, u)
        mediators = [
            cand
            for cand in enumerate_schema_morphisms(po, target)
            if _matches(compose_morphisms(inl, cand), c1, target)
            and _matches(compose_morphisms(inr, cand), c2, target)
        ]
        assert len(mediators) == 1
        assert _matches(mediators[0], u, target)
        checked += 1
    assert checked >= 20


def _matches(f: SchemaMorphism, g: SchemaMorphism, target: SchemaPresentation) -> bool:
    if f.object_map != g.object_map:
        return False
    return all(
        paths_equal(target, f.generator_map[k], g.generator_map[k]) == EQUAL
        for k in f.generator_map
    )


# -- comma categories ----------------------------------------------------------


def _squash(ln_schema: SchemaPresentation) -> SchemaMorphism:
    flat = load_schema(FIXTURES / "ln" / "flat.cat")
    return SchemaMorphism(
        "squash",
        ln_schema,
        flat,
        {"Person": "Person", "FNames": "Names", "LNames": "Names"},
        {
            ("Person", "First"): Path("Person", ("First",)),
            ("Person", "Last"): Path("Person", ("Last",)),
        },
    )


def test_comma_category_at_person(ln):
    schema, _ = ln
    comma, projection = comma_category(_squash(schema), "Person")
    assert comma.objects == (
        "Person[]",
        "FNames[First]",
        "FNames[Last]",
        "LNames[First]",
        "LNames[Last]",
    )
    arrows = {(g.source, g.name, g.target) for g in comma.generators}
    assert arrows == {
        ("Person[]", "First", "FNames[First]"),
        ("Person[]", "Last", "LNames[Last]"),
    }
    assert projection.object_map["FNames[Last]"] == "FNames"


def test_comma_category_at_names(ln):
    schema, _ = ln
    comma, _ = comma_category(_squash(schema), "Names")
    assert comma.objects == ("FNames[]", "LNames[]")
    assert comma.generators == ()


def test_comma_category_raises_on_loops(dds):
    schema, _ = dds
    ident = identity_morphism(schema)
    with pytest.raises(UnboundedError):
        comma_category(ident, "v")


# -- functor enumeration -------------------------------------------------------


def test_enumerate_schema_morphisms_counts(ln):
    schema, _ = ln
    assert len(enumerate_schema_morphisms(DOT, schema)) == 3
    assert len(enumerate_schema_morphisms(ARROW, schema)) == 5


def test_enumerate_schema_morphisms_raises_when_unbounded(emp):
    schema, _ = emp
    with pytest.raises(UnboundedError):
        enumerate_schema_morphisms(ARROW, schema)
