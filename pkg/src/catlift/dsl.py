"""Plain-text formats for schemas, mappings, constraints, queries, patterns.

A document is a sequence of named blocks.  Blocks may refer to earlier blocks
in the same document or to schemas supplied through the environment (the CLI
passes the schema loaded with ``-s``).  ``#`` starts a comment; statements end
with ``;``; ``[ f g ]`` is a path and ``[ ]`` the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Mapping

from .errors import ParseError
from .instance import Row
from .pattern import GraphPattern, Term
from .presentation import Generator, Path, SchemaMorphism, SchemaPresentation
from .query import Query
from .solver import (
    ConstraintSet,
    LiftingConstraint,
    exactly_one,
    forest,
    injective_fk,
    nonempty,
    product,
    reflexive,
    surjective_fk,
    symmetric,
    transitive,
)

_PUNCT = set("{};:()=[],")


@dataclass(frozen=True)
class _Token:
    value: str
    line: int
    quoted: bool = False


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError(f"line {line}: unterminated string")
                j += 1
            if j >= n:
                raise ParseError(f"line {line}: unterminated string")
            tokens.append(_Token(text[i + 1 : j], line, quoted=True))
            i = j + 1
        elif ch == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(_Token("->", line))
            i += 2
        elif ch in _PUNCT:
            tokens.append(_Token(ch, line))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in _PUNCT and text[j] not in '#"':
                if text[j] == "-" and j + 1 < n and text[j + 1] == ">":
                    break
                j += 1
            tokens.append(_Token(text[i:j], line))
            i = j
    return tokens


@dataclass
class Reduction:
    """Collapse query results along a shape map, reporting over new sides."""

    name: str
    via: SchemaMorphism
    onto: SchemaMorphism


@dataclass
class Document:
    """Everything declared in one source file, by kind and name."""

    schemas: dict[str, SchemaPresentation] = field(default_factory=dict)
    functors: dict[str, SchemaMorphism] = field(default_factory=dict)
    constraints: dict[str, ConstraintSet] = field(default_factory=dict)
    queries: dict[str, Query] = field(default_factory=dict)
    patterns: dict[str, GraphPattern] = field(default_factory=dict)
    reductions: dict[str, Reduction] = field(default_factory=dict)
    symmetries: dict[str, SchemaMorphism] = field(default_factory=dict)

    def only_schema(self) -> SchemaPresentation:
        if len(self.schemas) != 1:
            raise ParseError(f"expected exactly one schema, found {len(self.schemas)}")
        return next(iter(self.schemas.values()))


class _Parser:
    def __init__(self, tokens: list[_Token], env: Mapping[str, SchemaPresentation]):
        self.tokens = tokens
        self.pos = 0
        self.env = env
        self.doc = Document()

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, value: str) -> _Token:
        tok = self.next()
        if tok.value != value or tok.quoted:
            raise ParseError(f"line {tok.line}: expected {value!r}, found {tok.value!r}")
        return tok

    def word(self, what: str) -> str:
        tok = self.next()
        if tok.quoted or tok.value in _PUNCT or tok.value == "->":
            raise ParseError(f"line {tok.line}: expected {what}, found {tok.value!r}")
        return tok.value

    def schema_named(self, name: str, line: int) -> SchemaPresentation:
        if name in self.doc.schemas:
            return self.doc.schemas[name]
        if name in self.env:
            return self.env[name]
        raise ParseError(f"line {line}: unknown schema {name}")

    def functor_named(self, name: str, line: int) -> SchemaMorphism:
        if name not in self.doc.functors:
            raise ParseError(f"line {line}: unknown functor {name}")
        return self.doc.functors[name]

    # -- blocks ------------------------------------------------------------

    def document(self) -> Document:
        while self.peek() is not None:
            tok = self.next()
            handler = {
                "schema": self.schema_block,
                "functor": self.functor_block,
                "constraints": self.constraints_block,
                "lifting": self.lifting_block,
                "query": self.query_block,
                "pattern": self.pattern_block,
                "reduction": self.reduction_block,
                "symmetry": self.symmetry_block,
            }.get(tok.value)
            if handler is None:
                raise ParseError(f"line {tok.line}: unknown block kind {tok.value!r}")
            handler()
        return self.doc

    def steps(self) -> tuple[str, ...]:
        self.expect("[")
        out: list[str] = []
        while True:
            tok = self.next()
            if tok.value == "]" and not tok.quoted:
                return tuple(out)
            if tok.quoted or tok.value in _PUNCT:
                raise ParseError(f"line {tok.line}: bad path step {tok.value!r}")
            out.append(tok.value)

    def schema_block(self) -> None:
        name = self.word("schema name")
        self.expect("{")
        objects: list[str] = []
        generators: list[Generator] = []
        equations: list[tuple[Path, Path]] = []
        while True:
            tok = self.next()
            if tok.value == "}":
                break
            if tok.value == "objects":
                while self.peek() is not None and self.peek().value != ";":
                    objects.append(self.word("object name"))
                self.expect(";")
            elif tok.value == "arrow":
                gname = self.word("arrow name")
                self.expect(":")
                src = self.word("source object")
                self.expect("->")
                tgt = self.word("target object")
                self.expect(";")
                generators.append(Generator(gname, src, tgt))
            elif tok.value == "eq":
                src = self.word("equation source")
                lhs = Path(src, self.steps())
                self.expect("=")
                rhs = Path(src, self.steps())
                self.expect(";")
                equations.append((lhs, rhs))
            else:
                raise ParseError(f"line {tok.line}: unknown schema statement {tok.value!r}")
        self.doc.schemas[name] = SchemaPresentation(
            name, tuple(objects), tuple(generators), tuple(equations)
        )

    def _arrow_key(self, schema: SchemaPresentation, token: str, line: int) -> Generator:
        if "." in token:
            src, gname = token.split(".", 1)
            return schema.generator(src, gname)
        hits = [g for g in schema.generators if g.name == token]
        if not hits:
            raise ParseError(f"line {line}: {schema.name} has no arrow {token}")
        if len(hits) > 1:
            raise ParseError(
                f"line {line}: arrow {token} is ambiguous in {schema.name}; qualify as Object.{token}"
            )
        return hits[0]

    def functor_block(self) -> None:
        name = self.word("functor name")
        self.expect(":")
        dom_tok = self.next()
        domain = self.schema_named(dom_tok.value, dom_tok.line)
        self.expect("->")
        cod_tok = self.next()
        codomain = self.schema_named(cod_tok.value, cod_tok.line)
        self.expect("{")
        object_map: dict[str, str] = {}
        generator_map: dict[tuple[str, str], Path] = {}
        pending: list[tuple[Generator, tuple[str, ...]]] = []
        while True:
            tok = self.next()
            if tok.value == "}":
                break
            if tok.value == "object":
                src = self.word("object name")
                self.expect("->")
                object_map[src] = self.word("image object")
                self.expect(";")
            elif tok.value == "arrow":
                key = self.next()
                g = self._arrow_key(domain, key.value, key.line)
                self.expect("->")
                pending.append((g, self.steps()))
                self.expect(";")
            else:
                raise ParseError(f"line {tok.line}: unknown functor statement {tok.value!r}")
        for g, steps in pending:
            image_src = object_map.get(g.source)
            if image_src is None:
                raise ParseError(f"functor {name}: arrow {g.name} mapped before object {g.source}")
            generator_map[(g.source, g.name)] = Path(image_src, steps)
        self.doc.functors[name] = SchemaMorphism(
            name, domain, codomain, object_map, generator_map
        )

    def constraints_block(self) -> None:
        name = self.word("constraint set name")
        self.expect("on")
        tok = self.next()
        schema = self.schema_named(tok.value, tok.line)
        self.expect("{")
        collected: list[LiftingConstraint] = []

        def extend(built: LiftingConstraint | ConstraintSet) -> None:
            if isinstance(built, ConstraintSet):
                collected.extend(built.constraints)
            else:
                collected.append(built)

        while True:
            tok = self.next()
            if tok.value == "}":
                break
            kind = tok.value
            if kind == "nonempty":
                extend(nonempty(schema, self.word("table")))
            elif kind == "exactly_one":
                extend(exactly_one(schema, self.word("table")))
            elif kind == "surjective":
                extend(surjective_fk(schema, self.word("column")))
            elif kind == "injective":
                extend(injective_fk(schema, self.word("column")))
            elif kind == "transitive":
                extend(transitive(schema, self.word("left column"), self.word("right column")))
            elif kind == "symmetric":
                extend(symmetric(schema, self.word("left column"), self.word("right column")))
            elif kind == "reflexive":
                extend(reflexive(schema, self.word("left column"), self.word("right column")))
            elif kind == "forest":
                extend(forest(schema))
            elif kind == "product":
                extend(
                    product(
                        schema,
                        self.word("table"),
                        self.word("left column"),
                        self.word("right column"),
                    )
                )
            else:
                raise ParseError(f"line {tok.line}: unknown constraint {kind!r}")
            self.expect(";")
        self.doc.constraints[name] = ConstraintSet(name=name, constraints=collected)

    def lifting_block(self) -> None:
        name = self.word("lifting name")
        self.expect("{")
        m = n = None
        while True:
            tok = self.next()
            if tok.value == "}":
                break
            if tok.value == "m":
                self.expect("=")
                ref = self.next()
                m = self.functor_named(ref.value, ref.line)
                self.expect(";")
            elif tok.value == "n":
                self.expect("=")
                ref = self.next()
                n = self.functor_named(ref.value, ref.line)
                self.expect(";")
            else:
                raise ParseError(f"line {tok.line}: unknown lifting statement {tok.value!r}")
        if m is None or n is None:
            raise ParseError(f"lifting {name}: both m and n are required")
        self.doc.constraints[name] = ConstraintSet(
            name=name, constraints=[LiftingConstraint(name=name, m=m, n=n)]
        )

    def query_block(self) -> None:
        name = self.word("query name")
        self.expect("on")
        tok = self.next()
        base = self.schema_named(tok.value, tok.line)
        self.expect("{")
        n = m = select = None
        binds: list[tuple[str, str, int]] = []
        while True:
            tok = self.next()
            if tok.value == "}":
                break
            if tok.value == "onto":
                ref = self.next()
                n = self.functor_named(ref.value, ref.line)
                self.expect(";")
            elif tok.value == "embed":
                ref = self.next()
                m = self.functor_named(ref.value, ref.line)
                self.expect(";")
            elif tok.value == "bind":
                obj = self.word("side object")
                self.expect("=")
                rid = self.next()
                binds.append((obj, rid.value, rid.line))
                self.expect(";")
            elif tok.value == "select":
                ref = self.next()
                select = self.functor_named(ref.value, ref.line)
                self.expect(";")
            else:
                raise ParseError(f"line {tok.line}: unknown query statement {tok.value!r}")
        if n is None:
            raise ParseError(f"query {name}: missing onto")
        if n.codomain != base:
            raise ParseError(f"query {name}: onto lands in {n.codomain.name}, not {base.name}")
        if m is None:
            empty = SchemaPresentation("empty", objects=(), generators=())
            m = SchemaMorphism("m", empty, n.domain, {}, {})
        binding: dict[str, Row] = {}
        for obj, rid, line in binds:
            if obj not in m.domain.objects:
                raise ParseError(f"line {line}: bind names unknown side object {obj}")
            table = n.apply_object(m.apply_object(obj))
            binding[obj] = Row(table, rid)
        self.doc.queries[name] = Query(name=name, n=n, m=m, binding=binding, select=select)

    def pattern_block(self) -> None:
        name = self.word("pattern name")
        self.expect("on")
        self.next()  # base schema name, resolved by the caller at compile time
        self.expect("{")
        triples: list[tuple[Term, str, Term]] = []
        typing: dict[str, str] = {}
        predicate_paths: dict[str, tuple[str, ...]] = {}
        label_columns: dict[str, str] = {}

        def term(tok: _Token) -> Term:
            if tok.quoted:
                return Term(tok.value, is_variable=False)
            return Term.parse(tok.value)

        while True:
            tok = self.next()
            if tok.value == "}":
                break
            if tok.value == "(" and not tok.quoted:
                subject = term(self.next())
                predicate = self.word("predicate")
                obj = term(self.next())
                self.expect(")")
                triples.append((subject, predicate, obj))
            elif tok.value == "type":
                t = self.next()
                self.expect("=")
                typing[t.value] = self.word("object name")
                self.expect(";")
            elif tok.value == "label":
                table = self.word("object name")
                self.expect("=")
                label_columns[table] = self.word("column name")
                self.expect(";")
            elif tok.value == "alias":
                predicate = self.word("predicate name")
                self.expect("=")
                predicate_paths[predicate] = self.steps()
                self.expect(";")
            else:
                raise ParseError(f"line {tok.line}: unknown pattern statement {tok.value!r}")
        self.doc.patterns[name] = GraphPattern(
            triples=triples,
            typing=typing,
            predicate_paths=predicate_paths,
            label_columns=label_columns,
        )

    def reduction_block(self) -> None:
        name = self.word("reduction name")
        self.expect("{")
        via = onto = None
        while True:
            tok = self.next()
            if tok.value == "}":
                break
            if tok.value == "via":
                ref = self.next()
                via = self.functor_named(ref.value, ref.line)
                self.expect(";")
            elif tok.value == "onto":
                ref = self.next()
                onto = self.functor_named(ref.value, ref.line)
                self.expect(";")
            else:
                raise ParseError(f"line {tok.line}: unknown reduction statement {tok.value!r}")
        if via is None or onto is None:
            raise ParseError(f"reduction {name}: both via and onto are required")
        self.doc.reductions[name] = Reduction(name=name, via=via, onto=onto)

    def symmetry_block(self) -> None:
        name = self.word("symmetry name")
        self.expect("{")
        via = None
        while True:
            tok = self.next()
            if tok.value == "}":
                break
            if tok.value == "via":
                ref = self.next()
                via = self.functor_named(ref.value, ref.line)
                self.expect(";")
            else:
                raise ParseError(f"line {tok.line}: unknown symmetry statement {tok.value!r}")
        if via is None:
            raise ParseError(f"symmetry {name}: via is required")
        self.doc.symmetries[name] = via


def parse_document(
    text: str, env: Mapping[str, SchemaPresentation] | None = None
) -> Document:
    """Parse a source file into its blocks, resolving schema names via env."""
    return _Parser(_tokenize(text), env or {}).document()


def parse_schema(text: str) -> SchemaPresentation:
    """Parse a file expected to hold a single schema block."""
    return parse_document(text).only_schema()


def load_document(
    path: str | FsPath, env: Mapping[str, SchemaPresentation] | None = None
) -> Document:
    return parse_document(FsPath(path).read_text(encoding="utf-8"), env)


def load_schema(path: str | FsPath) -> SchemaPresentation:
    return parse_schema(FsPath(path).read_text(encoding="utf-8"))


# -- serializers ------------------------------------------------------------


def _fmt_steps(steps: tuple[str, ...]) -> str:
    return "[ " + " ".join(steps) + " ]" if steps else "[ ]"


def format_schema(schema: SchemaPresentation) -> str:
    lines = [f"schema {schema.name} {{"]
    if schema.objects:
        lines.append("  objects " + " ".join(schema.objects) + " ;")
    for g in schema.generators:
        lines.append(f"  arrow {g.name} : {g.source} -> {g.target} ;")
    for lhs, rhs in schema.equations:
        lines.append(f"  eq {lhs.source} {_fmt_steps(lhs.steps)} = {_fmt_steps(rhs.steps)} ;")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_functor(f: SchemaMorphism) -> str:
    lines = [f"functor {f.name} : {f.domain.name} -> {f.codomain.name} {{"]
    for obj in f.domain.objects:
        lines.append(f"  object {obj} -> {f.object_map[obj]} ;")
    for g in f.domain.generators:
        image = f.generator_map[(g.source, g.name)]
        lines.append(f"  arrow {g.source}.{g.name} -> {_fmt_steps(image.steps)} ;")
    lines.append("}")
    return "\n".join(lines) + "\n"
