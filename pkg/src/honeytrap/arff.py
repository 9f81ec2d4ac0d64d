"""Reading and writing ARFF dataset files.

Covers the subset of the format the pipeline needs: numeric and nominal
attributes, ``?`` for missing values, ``%`` comment lines, and quoted
names or labels with backslash escapes.  String, date and relational
attributes and sparse data rows are rejected with an explicit error
rather than half-parsed.

Values are held in memory as ``float`` (numeric), ``int`` (index into
the nominal category list) or ``None`` (missing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import (
    ArffParseError,
    AttributeNotFoundError,
    AttributeTypeError,
    UnsupportedArffError,
)

Value = Union[float, int, None]

_NUMERIC_KINDS = ("numeric", "real", "integer")
_UNSUPPORTED_KINDS = ("string", "date", "relational")

_UNESCAPE = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "%": "%"}
_ESCAPE = {"\n": "\\n", "\t": "\\t", "\r": "\\r", "\\": "\\\\", "'": "\\'"}
_QUOTE_TRIGGERS = " \t\n\r,'\"{}%\\"


@dataclass(frozen=True)
class AttributeSpec:
    """One column of a dataset: a name plus either numeric or nominal type.

    ``categories`` is ``None`` for numeric attributes and the ordered,
    duplicate-free tuple of value labels for nominal ones.
    """

    name: str
    categories: tuple[str, ...] | None = None

    @property
    def is_nominal(self) -> bool:
        return self.categories is not None

    def check(self) -> None:
        if not self.name:
            raise ArffParseError("attribute name must be non-empty")
        if self.categories is not None:
            if not self.categories:
                raise ArffParseError(f"attribute {self.name!r} declares no categories")
            if any(not c for c in self.categories):
                raise ArffParseError(f"attribute {self.name!r} has an empty category label")
            if len(set(self.categories)) != len(self.categories):
                raise ArffParseError(f"attribute {self.name!r} has duplicate category labels")


@dataclass
class Dataset:
    """A parsed dataset: relation name, column schema, and value rows.

    ``class_index`` marks which attribute carries the class label; it is
    runtime metadata (the file format has no way to record it) and is
    therefore excluded from equality.
    """

    relation: str
    attributes: list[AttributeSpec]
    instances: list[list[Value]]
    class_index: int | None = field(default=None, compare=False)

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def n_instances(self) -> int:
        return len(self.instances)

    @property
    def class_attribute(self) -> AttributeSpec:
        if self.class_index is None:
            raise AttributeNotFoundError("no class attribute has been designated")
        return self.attributes[self.class_index]

    def index_of(self, name: str) -> int:
        for i, spec in enumerate(self.attributes):
            if spec.name == name:
                return i
        raise AttributeNotFoundError(f"no attribute named {name!r}")

    def column(self, index: int) -> list[Value]:
        return [row[index] for row in self.instances]

    def validate(self) -> None:
        """Check the structural invariants; raise an ArffError subclass if broken."""
        seen: set[str] = set()
        for spec in self.attributes:
            spec.check()
            if spec.name in seen:
                raise ArffParseError(f"duplicate attribute name {spec.name!r}")
            seen.add(spec.name)
        if self.class_index is not None and not (0 <= self.class_index < len(self.attributes)):
            raise AttributeNotFoundError(f"class index {self.class_index} out of range")
        n = len(self.attributes)
        for rownum, row in enumerate(self.instances):
            if len(row) != n:
                raise ArffParseError(f"instance {rownum} has {len(row)} values, expected {n}")
            for spec, value in zip(self.attributes, row):
                if value is None:
                    continue
                if spec.is_nominal:
                    if not isinstance(value, int) or isinstance(value, bool) or not (
                        0 <= value < len(spec.categories)
                    ):
                        raise ArffParseError(
                            f"instance {rownum}: bad category index {value!r} for {spec.name!r}"
                        )
                else:
                    if isinstance(value, bool) or not isinstance(value, (int, float)):
                        raise AttributeTypeError(
                            f"instance {rownum}: non-numeric value {value!r} for {spec.name!r}"
                        )
                    if not math.isfinite(value):
                        raise ArffParseError(
                            f"instance {rownum}: non-finite value for {spec.name!r}"
                        )


def designate_class(dataset: Dataset, name: str) -> Dataset:
    """Return the same dataset with the named attribute marked as the class.

    The class attribute must be nominal.
    """
    index = dataset.index_of(name)
    spec = dataset.attributes[index]
    if not spec.is_nominal:
        raise AttributeTypeError(f"class attribute {name!r} must be nominal")
    return Dataset(dataset.relation, dataset.attributes, dataset.instances, class_index=index)


# ---------------------------------------------------------------------------
# parsing


def _read_quoted(line: str, pos: int, lineno: int | None) -> tuple[str, int]:
    quote = line[pos]
    pos += 1
    out: list[str] = []
    while pos < len(line):
        ch = line[pos]
        if ch == "\\":
            if pos + 1 >= len(line):
                raise ArffParseError("dangling backslash escape", lineno)
            nxt = line[pos + 1]
            out.append(_UNESCAPE.get(nxt, nxt))
            pos += 2
            continue
        if ch == quote:
            return "".join(out), pos + 1
        out.append(ch)
        pos += 1
    raise ArffParseError("unterminated quoted string", lineno)


def _skip_spaces(line: str, pos: int) -> int:
    while pos < len(line) and line[pos] in " \t":
        pos += 1
    return pos


def _read_name_token(line: str, pos: int, lineno: int | None) -> tuple[str, int]:
    """Read one attribute/relation name: quoted, or bare up to whitespace."""
    pos = _skip_spaces(line, pos)
    if pos >= len(line):
        raise ArffParseError("expected a name", lineno)
    if line[pos] in "'\"":
        return _read_quoted(line, pos, lineno)
    start = pos
    while pos < len(line) and line[pos] not in " \t":
        pos += 1
    return line[start:pos], pos


def _split_delimited(
    line: str, pos: int, lineno: int | None, terminator: str | None
) -> tuple[list[tuple[str, bool]], int]:
    """Split a comma-separated value list into (text, was_quoted) cells.

    With ``terminator`` set (``'}'`` for nominal declarations) the scan
    stops after that character; otherwise it consumes the whole line.
    """
    cells: list[tuple[str, bool]] = []
    while True:
        pos = _skip_spaces(line, pos)
        if terminator and pos < len(line) and line[pos] == terminator and not cells:
            return cells, pos + 1  # empty list, e.g. "{}"
        if pos < len(line) and line[pos] in "'\"":
            text, pos = _read_quoted(line, pos, lineno)
            quoted = True
            pos = _skip_spaces(line, pos)
            if pos < len(line) and line[pos] not in ",":
                if terminator and line[pos] == terminator:
                    cells.append((text, quoted))
                    return cells, pos + 1
                raise ArffParseError(f"unexpected text after quoted value: {line[pos:]!r}", lineno)
        else:
            start = pos
            while pos < len(line) and line[pos] != "," and (
                terminator is None or line[pos] != terminator
            ):
                pos += 1
            text = line[start:pos].strip(" \t")
            quoted = False
            if terminator and pos < len(line) and line[pos] == terminator:
                cells.append((text, quoted))
                return cells, pos + 1
        cells.append((text, quoted))
        if pos >= len(line):
            if terminator:
                raise ArffParseError(f"missing closing {terminator!r}", lineno)
            return cells, pos
        # line[pos] is ','
        pos += 1


def parse_attribute_declaration(rest: str, lineno: int | None = None) -> AttributeSpec:
    """Parse the text after the ``@attribute`` keyword into an AttributeSpec."""
    name, pos = _read_name_token(rest, 0, lineno)
    if not name:
        raise ArffParseError("attribute name must be non-empty", lineno)
    pos = _skip_spaces(rest, pos)
    body = rest[pos:].rstrip()
    if not body:
        raise ArffParseError(f"attribute {name!r} has no type", lineno)
    if body.startswith("{"):
        cells, end = _split_delimited(body, 1, lineno, terminator="}")
        if body[end:].strip():
            raise ArffParseError(f"unexpected text after category list: {body[end:]!r}", lineno)
        labels = tuple(text for text, _ in cells)
        spec = AttributeSpec(name, labels)
        spec.check()
        return spec
    kind = body.split()[0].lower()
    if kind in _NUMERIC_KINDS:
        if len(body.split()) > 1:
            raise ArffParseError(f"unexpected text after attribute type: {body!r}", lineno)
        return AttributeSpec(name, None)
    if kind in _UNSUPPORTED_KINDS:
        raise UnsupportedArffError(f"{kind} attributes are not supported (attribute {name!r})")
    raise ArffParseError(f"unknown attribute type {body!r}", lineno)


def parse(source: str | Iterable[str]) -> Dataset:
    """Parse dataset text into a :class:`Dataset`.

    ``source`` may be a string, an open text file, or any iterable of
    lines.  Comment (``%``) and blank lines are ignored everywhere.
    Raises :class:`ArffParseError` (with a line number) for malformed
    input and :class:`UnsupportedArffError` for recognized-but-rejected
    constructs such as string attributes or sparse rows.
    """
    if hasattr(source, "read"):
        source = source.read()  # type: ignore[union-attr]
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [line.rstrip("\n").rstrip("\r") for line in source]

    relation: str | None = None
    attributes: list[AttributeSpec] = []
    names: set[str] = set()
    instances: list[list[Value]] = []
    in_data = False

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not in_data:
            keyword = line.split(None, 1)[0].lower()
            rest = line[len(keyword):].strip()
            if keyword == "@relation":
                if relation is not None:
                    raise ArffParseError("duplicate @relation declaration", lineno)
                name, pos = _read_name_token(rest, 0, lineno)
                if rest[pos:].strip():
                    raise ArffParseError(f"unexpected text after relation name: {rest[pos:]!r}", lineno)
                relation = name
            elif keyword == "@attribute":
                if relation is None:
                    raise ArffParseError("@attribute before @relation", lineno)
                try:
                    spec = parse_attribute_declaration(rest, lineno)
                except ArffParseError:
                    raise
                if spec.name in names:
                    raise ArffParseError(f"duplicate attribute name {spec.name!r}", lineno)
                names.add(spec.name)
                attributes.append(spec)
            elif keyword == "@data":
                if rest:
                    raise ArffParseError(f"unexpected text after @data: {rest!r}", lineno)
                if relation is None:
                    raise ArffParseError("@data before @relation", lineno)
                if not attributes:
                    raise ArffParseError("no attributes declared before @data", lineno)
                in_data = True
            else:
                raise ArffParseError(f"unknown declaration {keyword!r}", lineno)
            continue
        # data section
        if line.startswith("{"):
            raise UnsupportedArffError(f"line {lineno}: sparse data rows are not supported")
        cells, _ = _split_delimited(line, 0, lineno, terminator=None)
        if len(cells) != len(attributes):
            raise ArffParseError(
                f"expected {len(attributes)} values, got {len(cells)}", lineno
            )
        row: list[Value] = []
        for spec, (text, quoted) in zip(attributes, cells):
            if not quoted and text == "?":
                row.append(None)
                continue
            if spec.is_nominal:
                try:
                    row.append(spec.categories.index(text))
                except ValueError:
                    raise ArffParseError(
                        f"value {text!r} is not a declared category of {spec.name!r}", lineno
                    ) from None
            else:
                try:
                    number = float(text)
                except ValueError:
                    raise ArffParseError(
                        f"bad numeric value {text!r} for {spec.name!r}", lineno
                    ) from None
                if not math.isfinite(number):
                    raise ArffParseError(
                        f"non-finite numeric value {text!r} for {spec.name!r}", lineno
                    )
                row.append(number)
        instances.append(row)

    if not in_data:
        raise ArffParseError("missing @data section")
    return Dataset(relation or "", attributes, instances)


# ---------------------------------------------------------------------------
# serialization


def _quote(text: str) -> str:
    if text and text != "?" and not any(ch in _QUOTE_TRIGGERS for ch in text):
        return text
    escaped = "".join(_ESCAPE.get(ch, ch) for ch in text)
    return f"'{escaped}'"


def format_number(x: float) -> str:
    """Render a numeric cell: integers without a decimal point, else repr."""
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def attribute_line(spec: AttributeSpec) -> str:
    """Render one ``@attribute`` declaration line."""
    if spec.is_nominal:
        labels = ",".join(_quote(c) for c in spec.categories)
        return f"@attribute {_quote(spec.name)} {{{labels}}}"
    return f"@attribute {_quote(spec.name)} numeric"


def serialize(dataset: Dataset) -> str:
    """Render a dataset in canonical form.

    Canonical means: lowercase keywords, LF line endings, no space after
    commas, names and labels quoted only when needed, numeric cells via
    :func:`format_number`.  Parsing the output yields a dataset equal to
    the input, and serializing that parse is byte-identical.
    """
    dataset.validate()
    lines = [f"@relation {_quote(dataset.relation)}"]
    for spec in dataset.attributes:
        lines.append(attribute_line(spec))
    lines.append("@data")
    for row in dataset.instances:
        cells = []
        for spec, value in zip(dataset.attributes, row):
            if value is None:
                cells.append("?")
            elif spec.is_nominal:
                cells.append(_quote(spec.categories[value]))
            else:
                cells.append(format_number(float(value)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
