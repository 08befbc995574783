"""catlift: schemas as finitely presented categories, instances as functors.

Instances are checked, queried, and migrated through lifting problems
against the projection from the category of elements.
"""

from .errors import (
    AmbiguousReferentError,
    CatliftError,
    NoReferentError,
    NotAFibrationError,
    ParseError,
    PatternError,
    TypingError,
    UnboundedError,
    UnknownPredicateError,
)
from .presentation import (
    DEFAULT_BOUND,
    DISTINCT,
    EQUAL,
    INCONCLUSIVE,
    Generator,
    Path,
    SchemaMorphism,
    SchemaPresentation,
    check_functor,
    comma_category,
    compose_morphisms,
    compose_paths,
    hom_classes,
    identity_morphism,
    paths_equal,
    pushout_presentation,
)
from .instance import (
    Instance,
    InstanceMorphism,
    Row,
    check_instance_morphism,
    enumerate_instance_morphisms,
    eval_path,
    instances_isomorphic,
    load_instance,
    save_instance,
    transport,
    validate_instance,
)
from .concrete import ConcreteCategory, ConcreteFunctor, materialize
from .fibration import (
    RelationalFibration,
    Triple,
    elements_presentation,
    fibers_to_instance,
    format_triples,
    grothendieck_concrete,
    grothendieck_triples,
    is_relational_fibration,
)
from .solver import (
    ConstraintSet,
    Lift,
    LiftingConstraint,
    SquareInput,
    check_constraint,
    check_constraint_set,
    check_universal,
    enumerate_bindings,
    enumerate_lifts,
    uniqueness_of,
)
from .query import (
    NaturalTransformation,
    ProbeMorphism,
    Query,
    QueryMorphism,
    ResultSet,
    apply_probe_morphism,
    check_strict,
    column_table_schema,
    complete_query_morphism,
    gamma_strict,
    induced_result_map,
    orbit_quotient,
    result_instance,
    run_query,
    transport_lift,
    where_less,
    whisker,
)
from .migration import delta, pi, sigma, sigma_with_unit
from .pattern import GraphPattern, Term, compile_pattern, reify_edges
from .dsl import (
    Document,
    format_functor,
    format_schema,
    load_document,
    load_schema,
    parse_document,
    parse_schema,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousReferentError",
    "CatliftError",
    "ConcreteCategory",
    "ConcreteFunctor",
    "ConstraintSet",
    "DEFAULT_BOUND",
    "DISTINCT",
    "Document",
    "EQUAL",
    "Generator",
    "GraphPattern",
    "INCONCLUSIVE",
    "Instance",
    "InstanceMorphism",
    "Lift",
    "LiftingConstraint",
    "NaturalTransformation",
    "NoReferentError",
    "NotAFibrationError",
    "ParseError",
    "Path",
    "PatternError",
    "ProbeMorphism",
    "Query",
    "QueryMorphism",
    "RelationalFibration",
    "ResultSet",
    "Row",
    "SchemaMorphism",
    "SchemaPresentation",
    "SquareInput",
    "Term",
    "Triple",
    "TypingError",
    "UnboundedError",
    "UnknownPredicateError",
    "apply_probe_morphism",
    "check_constraint",
    "check_constraint_set",
    "check_functor",
    "check_instance_morphism",
    "check_strict",
    "check_universal",
    "column_table_schema",
    "comma_category",
    "compile_pattern",
    "complete_query_morphism",
    "compose_morphisms",
    "compose_paths",
    "delta",
    "elements_presentation",
    "enumerate_bindings",
    "enumerate_instance_morphisms",
    "enumerate_lifts",
    "eval_path",
    "fibers_to_instance",
    "format_functor",
    "format_schema",
    "format_triples",
    "gamma_strict",
    "grothendieck_concrete",
    "grothendieck_triples",
    "hom_classes",
    "identity_morphism",
    "induced_result_map",
    "instances_isomorphic",
    "is_relational_fibration",
    "load_document",
    "load_instance",
    "load_schema",
    "materialize",
    "orbit_quotient",
    "parse_document",
    "parse_schema",
    "paths_equal",
    "pi",
    "pushout_presentation",
    "reify_edges",
    "result_instance",
    "run_query",
    "save_instance",
    "sigma",
    "sigma_with_unit",
    "transport",
    "transport_lift",
    "uniqueness_of",
    "validate_instance",
    "where_less",
    "whisker",
]
