"""Plain-text dataset and parameter files.

Dataset files are comma-delimited with a two-line header and a column
header row::

    mode,probabilities            (or: mode,counts)
    universe,x;y;z
    menu,alternative,value
    x;y,x,7/15
    x;y,y,8/15
    ...

Menus are ';'-joined alternative identifiers (canonically in universe
order).  Values may be rational literals ``p/q`` (or integers) or decimal
floats; exact mode accepts rational literals only, so nothing is lost to
rounding.  Counts files take non-negative integers.  Probability rows for
each menu must sum to 1 within 1e-6 (exactly, in exact mode).

Parameter files hold one value per row::

    universe,x;y;z;t
    anchor,x
    alpha,3/4
    u,x,1
    u,y,2
    ...
    v,t,1/5

Blank lines and lines starting with '#' are ignored everywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .estimate import ChoiceCounts
from .types import (
    DatasetFormatError,
    LamError,
    LamParams,
    Menu,
    Scalar,
    StochasticChoice,
    Universe,
    is_exact_scalar,
)

__all__ = [
    "format_scalar",
    "parse_scalar",
    "parse_dataset",
    "serialize_dataset",
    "parse_params",
    "serialize_params",
    "parse_report",
]

#: Row-sum tolerance for probability dataset files (float mode).
FILE_ROW_SUM_TOL = 1e-6

Dataset = Union[StochasticChoice, ChoiceCounts]


def format_scalar(x: Scalar) -> str:
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def parse_scalar(token: str, exact: bool, line: int | None = None) -> Scalar:
    """Parse 'p/q', integer, or decimal literals; exact mode forbids decimals."""
    tok = token.strip()
    try:
        if "/" in tok:
            num, den = tok.split("/")
            value = Fraction(int(num), int(den))
            return value if exact else float(value)
        if exact:
            try:
                return Fraction(int(tok))
            except ValueError:
                raise DatasetFormatError(
                    f"exact mode requires rational literals, got {tok!r}", line
                ) from None
        return float(tok)
    except (ValueError, ZeroDivisionError) as e:
        raise DatasetFormatError(f"bad numeric value {tok!r}: {e}", line) from None


def _content_rows(text: str) -> list[tuple[int, list[str]]]:
    rows = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append((i, [f.strip() for f in line.split(",")]))
    return rows


def _parse_menu_token(universe: Universe, token: str, line: int) -> Menu:
    members = [m for m in token.split(";") if m]
    if not members:
        raise DatasetFormatError("empty menu", line)
    for m in members:
        if m not in universe.alternatives:
            raise DatasetFormatError(f"unknown alternative {m!r}", line)
    if len(set(members)) != len(members):
        raise DatasetFormatError(f"menu {token!r} repeats an alternative", line)
    return frozenset(members)


def _menu_token(universe: Universe, menu: Menu) -> str:
    return ";".join(universe.sorted_members(menu))


def parse_dataset(text: str, exact: bool = False) -> Dataset:
    """Parse a dataset file into choice probabilities or counts."""
    rows = _content_rows(text)
    if len(rows) < 4:
        raise DatasetFormatError("dataset needs a header and at least one row")
    (l1, r1), (l2, r2), (l3, r3), *data_rows = rows
    if len(r1) != 2 or r1[0] != "mode" or r1[1] not in ("probabilities", "counts"):
        raise DatasetFormatError("first row must be 'mode,probabilities' or 'mode,counts'", l1)
    mode = r1[1]
    if len(r2) != 2 or r2[0] != "universe":
        raise DatasetFormatError("second row must be 'universe,<id;id;...>'", l2)
    alternatives = [a for a in r2[1].split(";") if a]
    try:
        universe = Universe(tuple(alternatives))
    except LamError as e:
        raise DatasetFormatError(str(e), l2) from None
    if r3 != ["menu", "alternative", "value"]:
        raise DatasetFormatError("third row must be 'menu,alternative,value'", l3)

    table: dict[Menu, dict[str, Scalar]] = {}
    for line, fields in data_rows:
        if len(fields) != 3:
            raise DatasetFormatError(
                f"expected 'menu,alternative,value', got {len(fields)} fields", line
            )
        menu_tok, alt, value_tok = fields
        menu = _parse_menu_token(universe, menu_tok, line)
        if alt not in universe.alternatives:
            raise DatasetFormatError(f"unknown alternative {alt!r}", line)
        if alt not in menu:
            raise DatasetFormatError(f"alternative {alt!r} is not in menu {menu_tok!r}", line)
        if mode == "counts":
            try:
                value: Scalar = int(value_tok)
            except ValueError:
                raise DatasetFormatError(
                    f"counts must be integers, got {value_tok!r}", line
                ) from None
            if value < 0:
                raise DatasetFormatError(f"counts must be non-negative, got {value_tok!r}", line)
        else:
            value = parse_scalar(value_tok, exact, line)
        row = table.setdefault(menu, {})
        if alt in row:
            raise DatasetFormatError(
                f"duplicate row for ({menu_tok!r}, {alt!r})", line
            )
        row[alt] = value

    if mode == "counts":
        try:
            return ChoiceCounts(universe, table)
        except LamError as e:
            raise DatasetFormatError(str(e)) from None

    for menu, row in table.items():
        total = sum(row.values())
        eff = 0 if all(is_exact_scalar(v) for v in row.values()) else FILE_ROW_SUM_TOL
        if abs(total - 1) > eff:
            raise DatasetFormatError(
                f"probabilities for menu {_menu_token(universe, menu)!r} sum to "
                f"{format_scalar(total)}, not 1"
            )
    try:
        return StochasticChoice(universe, table, eps_sum=FILE_ROW_SUM_TOL)
    except LamError as e:
        raise DatasetFormatError(str(e)) from None


def serialize_dataset(data: Dataset) -> str:
    """Canonical dataset text: menus sorted, members in universe order."""
    universe = data.universe
    if isinstance(data, ChoiceCounts):
        mode = "counts"
        rows_of = lambda menu: data.counts[menu]
    else:
        mode = "probabilities"
        rows_of = lambda menu: data.table[menu]
    lines = [
        f"mode,{mode}",
        "universe," + ";".join(universe.alternatives),
        "menu,alternative,value",
    ]
    for menu in data.domain:
        tok = _menu_token(universe, menu)
        row = rows_of(menu)
        for alt in universe.sorted_members(menu):
            if alt in row:
                lines.append(f"{tok},{alt},{format_scalar(row[alt])}")
    return "\n".join(lines) + "\n"


def parse_params(text: str, exact: bool = False) -> LamParams:
    """Parse a parameter file (universe, anchor, alpha, u and v rows)."""
    rows = _content_rows(text)
    universe: Universe | None = None
    anchor: str | None = None
    alpha: Scalar | None = None
    vectors: dict[str, dict[str, Scalar]] = {"u": {}, "v": {}}
    for line, fields in rows:
        key = fields[0]
        if key == "universe" and len(fields) == 2:
            try:
                universe = Universe(tuple(a for a in fields[1].split(";") if a))
            except LamError as e:
                raise DatasetFormatError(str(e), line) from None
        elif key == "anchor" and len(fields) == 2:
            anchor = fields[1]
        elif key == "alpha" and len(fields) == 2:
            alpha = parse_scalar(fields[1], exact, line)
        elif key in vectors and len(fields) == 3:
            vectors[key][fields[1]] = parse_scalar(fields[2], exact, line)
        else:
            raise DatasetFormatError(f"unrecognized row {fields!r}", line)
    for name, value in (("universe", universe), ("anchor", anchor), ("alpha", alpha)):
        if value is None:
            raise DatasetFormatError(f"params file is missing {name!r}")
    try:
        return LamParams(universe, vectors["u"], vectors["v"], alpha, anchor)
    except LamError as e:
        raise DatasetFormatError(str(e)) from None


def serialize_params(params: LamParams) -> str:
    lines = [
        "universe," + ";".join(params.universe.alternatives),
        f"anchor,{params.anchor}",
        f"alpha,{format_scalar(params.alpha)}",
    ]
    for name, vec in (("u", params.u), ("v", params.v)):
        for alt in params.universe.alternatives:
            lines.append(f"{name},{alt},{format_scalar(vec[alt])}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> list[list[str]]:
    """Rows of a structured report, for downstream commands that read one."""
    return [fields for _, fields in _content_rows(text)]
