"""Pullback and the two pushforwards, checked against reference builds."""

from __future__ import annotations

import random

import pytest

from catlift import (
    Generator,
    Instance,
    InstanceMorphism,
    SchemaMorphism,
    SchemaPresentation,
    TypingError,
    UnboundedError,
    check_instance_morphism,
    delta,
    enumerate_instance_morphisms,
    load_document,
    load_instance,
    load_schema,
    pi,
    run_query,
    sigma,
    sigma_with_unit,
    validate_instance,
)
from catlift.migration import brute_force_colimit, brute_force_limit

from conftest import FIXTURES
from helpers import random_dag_schema, random_instance, random_morphism


@pytest.fixture(scope="module")
def squash_setup(ln):
    schema, inst = ln
    flat = load_schema(FIXTURES / "ln" / "flat.cat")
    doc = load_document(FIXTURES / "ln" / "squash.fun", env={"LN": schema, "flat": flat})
    squash = doc.functors["squash"]
    flat_inst = load_instance(flat, FIXTURES / "ln" / "flat_instance")
    return schema, inst, flat, squash, flat_inst


# -- delta --------------------------------------------------------------------


def test_delta_renames_and_evaluates(squash_setup):
    _, _, _, squash, flat_inst = squash_setup
    pulled = delta(squash, flat_inst)
    assert validate_instance(pulled).issues == []
    assert pulled.rows == {
        "Person": ("p1", "p2"),
        "FNames": ("n-ann", "n-bob", "n-smith"),
        "LNames": ("n-ann", "n-bob", "n-smith"),
    }
    assert pulled.columns == {
        ("Person", "First"): {"p1": "n-ann", "p2": "n-bob"},
        ("Person", "Last"): {"p1": "n-smith", "p2": "n-bob"},
    }


def test_delta_requires_codomain_instance(squash_setup, ln):
    _, inst, _, squash, _ = squash_setup
    with pytest.raises(TypingError):
        delta(squash, inst)


# -- sigma --------------------------------------------------------------------


def test_sigma_merges_shared_surname(squash_setup):
    _, inst, _, squash, _ = squash_setup
    pushed = sigma(squash, inst)
    assert validate_instance(pushed).issues == []
    assert pushed.rows == {
        "Person": ("Person:x137", "Person:x139", "Person:x144"),
        "Names": (
            "Person:x137:First",
            "Person:x137:Last",
            "Person:x139:First",
            "Person:x144:First",
            "Person:x144:Last",
        ),
    }
    assert pushed.columns[("Person", "Last")] == {
        "Person:x137": "Person:x137:Last",
        "Person:x139": "Person:x137:Last",
        "Person:x144": "Person:x144:Last",
    }


def test_sigma_matches_reference_build(squash_setup):
    _, inst, _, squash, _ = squash_setup
    assert sigma(squash, inst) == brute_force_colimit(squash, inst)


def test_sigma_unit_lands_in_pullback(squash_setup):
    _, inst, _, squash, _ = squash_setup
    result = sigma_with_unit(squash, inst)
    assert result.unit["LNames"] == {
        "Smith": "Person:x137:Last",
        "Jones": "Person:x144:Last",
    }
    unit = InstanceMorphism(
        source=inst,
        target=delta(squash, result.instance),
        components=result.unit,
    )
    assert check_instance_morphism(unit) == []


def test_sigma_requires_domain_instance(squash_setup):
    _, _, _, squash, flat_inst = squash_setup
    with pytest.raises(TypingError):
        sigma(squash, flat_inst)


# -- pi -----------------------------------------------------------------------


def test_pi_builds_matching_families(squash_setup):
    _, inst, _, squash, _ = squash_setup
    conservative = pi(squash, inst)
    assert validate_instance(conservative).issues == []
    assert {k: len(v) for k, v in conservative.rows.items()} == {
        "Person": 18,
        "Names": 6,
    }
    assert conservative.rows["Names"] == (
        "FNames[]=Ann;LNames[]=Smith",
        "FNames[]=Ann;LNames[]=Jones",
        "FNames[]=Bob;LNames[]=Smith",
        "FNames[]=Bob;LNames[]=Jones",
        "FNames[]=Deb;LNames[]=Smith",
        "FNames[]=Deb;LNames[]=Jones",
    )
    assert conservative.rows["Person"][0] == (
        "FNames[First]=Ann;FNames[Last]=Ann;LNames[First]=Smith;LNames[Last]=Smith;Person[]=x137"
    )


def test_pi_matches_reference_build(squash_setup):
    _, inst, _, squash, _ = squash_setup
    assert pi(squash, inst) == brute_force_limit(squash, inst)


# -- unbounded targets ----------------------------------------------------------


def _loop_functor():
    dot = SchemaPresentation("dot", objects=("A",), generators=())
    loop = SchemaPresentation(
        "loop", objects=("v",), generators=(Generator("p", "v", "v"),)
    )
    f = SchemaMorphism("embed", dot, loop, {"A": "v"}, {})
    one = Instance(schema=dot, rows={"A": ("a0",)}, columns={})
    return f, one


def test_sigma_unbounded_on_looped_target():
    f, one = _loop_functor()
    with pytest.raises(UnboundedError):
        sigma(f, one)


def test_pi_unbounded_on_looped_target():
    f, one = _loop_functor()
    with pytest.raises(UnboundedError):
        pi(f, one)


# -- query transport ------------------------------------------------------------


def test_map_query_along_sigma_preserves_results(squash_setup, ln):
    schema, inst, _, squash, _ = squash_setup
    from catlift.migration import map_query_along_sigma

    doc = load_document(FIXTURES / "ln" / "same_last.qry", env={"LN": schema})
    query = doc.queries["same_last"]
    pushed_inst = sigma(squash, inst)
    identity = InstanceMorphism(
        source=pushed_inst,
        target=pushed_inst,
        components={
            obj: {rid: rid for rid in pushed_inst.rows[obj]}
            for obj in pushed_inst.schema.objects
        },
    )
    pushed_query, move_lift = map_query_along_sigma(
        squash, inst, pushed_inst, identity, query
    )
    target_results = run_query(pushed_query, pushed_inst).lifts
    for lift in run_query(query, inst).lifts:
        assert move_lift(lift) in target_results


def test_query_invariance_under_delta_bijects(squash_setup, ln):
    schema, _, _, squash, flat_inst = squash_setup
    from catlift.migration import query_invariance_under_delta

    doc = load_document(FIXTURES / "ln" / "same_last.qry", env={"LN": schema})
    query = doc.queries["same_last"]
    pulled = delta(squash, flat_inst)
    pushed_query, move_lift = query_invariance_under_delta(squash, flat_inst, query)
    source_results = run_query(query, pulled).lifts
    target_results = run_query(pushed_query, flat_inst).lifts
    images = [move_lift(l) for l in source_results]
    assert sorted(l.key() for l in images) == sorted(l.key() for l in target_results)
    assert len(set(images)) == len(images)


# -- adjunction counts ------------------------------------------------------------


def test_hom_counts_transpose_small(squash_setup):
    ln_schema, _, flat, squash, _ = squash_setup
    tiny = Instance(
        schema=ln_schema,
        rows={"Person": ("x1",), "FNames": ("a",), "LNames": ("s",)},
        columns={
            ("Person", "First"): {"x1": "a"},
            ("Person", "Last"): {"x1": "s"},
        },
    )
    target = Instance(
        schema=flat,
        rows={"Person": ("q1",), "Names": ("m", "n")},
        columns={
            ("Person", "First"): {"q1": "m"},
            ("Person", "Last"): {"q1": "n"},
        },
    )
    free = enumerate_instance_morphisms(sigma(squash, tiny), target)
    transposed = enumerate_instance_morphisms(tiny, delta(squash, target))
    assert len(free) == len(transposed) == 1

    cofree = enumerate_instance_morphisms(delta(squash, target), tiny)
    cotransposed = enumerate_instance_morphisms(target, pi(squash, tiny))
    assert len(cofree) == len(cotransposed)


# -- randomized agreement -----------------------------------------------------


def test_pushforwards_match_references_randomized():
    rng = random.Random(31)
    compared = 0
    for _ in range(60):
        source = random_dag_schema(rng, "s", max_objects=3, max_arrows=2)
        target = random_dag_schema(rng, "t", max_objects=3, max_arrows=2)
        f = random_morphism(rng, source, target, "f", max_len=2)
        if f is None:
            continue
        inst = random_instance(rng, source, max_rows=2)
        assert sigma(f, inst) == brute_force_colimit(f, inst)
        assert pi(f, inst) == brute_force_limit(f, inst)
        compared += 1
    assert compared >= 25
