"""Fixture loaders shared by the whole suite."""

from __future__ import annotations

from pathlib import Path

import pytest

from catlift import Instance, SchemaPresentation, load_instance, load_schema

FIXTURES = Path(__file__).parent / "fixtures"


def load_pair(name: str, instance: str = "instance") -> tuple[SchemaPresentation, Instance]:
    schema = load_schema(FIXTURES / name / "schema.cat")
    return schema, load_instance(schema, FIXTURES / name / instance)


@pytest.fixture(scope="session")
def emp() -> tuple[SchemaPresentation, Instance]:
    return load_pair("emp")


@pytest.fixture(scope="session")
def ln() -> tuple[SchemaPresentation, Instance]:
    return load_pair("ln")


@pytest.fixture(scope="session")
def dds() -> tuple[SchemaPresentation, Instance]:
    return load_pair("dds")


@pytest.fixture(scope="session")
def hometown() -> tuple[SchemaPresentation, Instance]:
    return load_pair("hometown")


@pytest.fixture(scope="session")
def grid_good() -> tuple[SchemaPresentation, Instance]:
    return load_pair("grid", "good")


@pytest.fixture(scope="session")
def grid_bad() -> tuple[SchemaPresentation, Instance]:
    return load_pair("grid", "bad")


@pytest.fixture(scope="session")
def party() -> tuple[SchemaPresentation, Instance]:
    return load_pair("party")
