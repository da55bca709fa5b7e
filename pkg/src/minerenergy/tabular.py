"""CSV/JSON reading and writing shared by the catalogs, history and emitters.

Readers accept bytes, text, a path-less binary/text stream, and skip blank
lines and ``#`` comment lines. Row numbers in diagnostics are physical line
numbers in the source, so they point at the offending line in an editor.
"""

from __future__ import annotations

import csv
import io
import json
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from typing import IO, Callable, Iterable, Iterator, Sequence, TypeVar, Union

from .errors import ParseError, SchemaError

Source = Union[bytes, str, IO[bytes], IO[str]]
T = TypeVar("T")


def _text(source: Source) -> str:
    if isinstance(source, bytes):
        data: bytes | str = source
    elif isinstance(source, str):
        return source
    else:
        data = source.read()
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise SchemaError(f"input is not valid UTF-8: {exc}") from None
    return data


def read_rows(source: Source, header: Sequence[str]) -> Iterator[tuple[int, dict[str, str]]]:
    """Yield ``(line_number, {column: cell})`` after checking the header exactly."""
    lines = _text(source).splitlines()
    numbered = [
        (i, line)
        for i, line in enumerate(lines, start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not numbered:
        raise SchemaError(f"missing header; expected {','.join(header)}")
    first_no, first = numbered[0]
    got = [c.strip() for c in next(csv.reader([first]))]
    if got != list(header):
        unknown = [c for c in got if c not in header]
        hint = f" (unknown columns: {', '.join(unknown)})" if unknown else ""
        raise SchemaError(
            f"line {first_no}: header {','.join(got)} does not match "
            f"{','.join(header)}{hint}"
        )
    for line_no, line in numbered[1:]:
        cells = next(csv.reader([line]))
        if len(cells) != len(header):
            raise ParseError(
                line_no, "*", f"expected {len(header)} fields, found {len(cells)}"
            )
        yield line_no, {name: cell.strip() for name, cell in zip(header, cells)}


def parse_decimal(cell: str, row: int, column: str) -> Decimal:
    if not cell:
        raise ParseError(row, column, "empty value")
    # "1,000" and "1_000" must not sneak through as thousands separators
    if any(ch in cell for ch in ",_ "):
        raise ParseError(row, column, f"malformed number {cell!r}")
    try:
        d = Decimal(cell)
    except InvalidOperation:
        raise ParseError(row, column, f"malformed number {cell!r}") from None
    if not d.is_finite():
        raise ParseError(row, column, f"non-finite number {cell!r}")
    return d


def build(row: int, column: str, ctor: Callable[[Decimal], T], value: Decimal) -> T:
    """Construct a quantity, turning invariant violations into a ParseError."""
    try:
        return ctor(value)
    except ValueError as exc:
        raise ParseError(row, column, str(exc)) from None


def fmt_decimal(d: Decimal) -> str:
    """Plain positional notation with trailing zeros stripped (5E+3 -> 5000)."""
    if d == 0:
        return "0"
    s = format(d.normalize(), "f")
    return s


def fmt_fixed(d: Decimal, places: int) -> str:
    q = Decimal(1).scaleb(-places)
    out = d.quantize(q, rounding=ROUND_HALF_EVEN)
    if out == 0:
        out = abs(out)  # no "-0.000"
    return format(out, "f")


def write_csv(header: Sequence[str], rows: Iterable[Sequence[str]]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue().encode("utf-8")


def write_json(header: Sequence[str], rows: Iterable[Sequence[object]]) -> bytes:
    records = [dict(zip(header, r)) for r in rows]
    return (json.dumps(records, indent=2) + "\n").encode("utf-8")


def emit(header: Sequence[str], rows: Sequence[Sequence[object]], fmt: str) -> bytes:
    """Render rows as CSV or flat JSON.

    Cells are strings except booleans, which CSV writes as ``true``/``false``
    and JSON keeps as booleans.
    """
    if fmt == "csv":
        return write_csv(
            header,
            ([("true" if c else "false") if isinstance(c, bool) else c for c in r] for r in rows),
        )
    if fmt == "json":
        return write_json(header, rows)
    raise ValueError(f"unknown format {fmt!r}")
