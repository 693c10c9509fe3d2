"""Core domain types for stochastic-choice alignment analysis.

The observable primitive is a stochastic choice function: a map from
(menu, alternative) to choice probability.  An AI agent choosing on
behalf of a human principal is modeled as a mixture of two Luce rules,
one driven by the human's utility ``u`` and one by the AI's intrinsic
utility ``v``, mixed with a compliance weight ``alpha`` (the probability
that the AI defers to the human).

Every quantity in this package is generic over two scalar modes:

* exact mode  -- values are :class:`fractions.Fraction` (or int); all
  comparisons are exact and tolerances default to zero,
* float mode  -- values are doubles; tolerances default to 1e-9.

Types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Union

Scalar = Union[int, Fraction, float]

#: Default absolute tolerance for float-mode zero tests and comparisons.
FLOAT_TOL = 1e-9

#: Default tolerance for row sums of a stochastic choice table (float mode).
ROW_SUM_TOL = 1e-9


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class LamError(Exception):
    """Base error for this package."""


class InvalidParameterError(LamError, ValueError):
    """A parameter violates its contract (non-positive utility, bad alpha, ...)."""


class MissingDataError(LamError):
    """A menu or alternative required by an operation is not in the data."""


class InsufficientDataError(LamError):
    """The observed domain does not support the requested procedure."""


class NotLuceError(LamError):
    """Data that must be a Luce rule (positive + IIA) is not one."""


class NotIdentifiedError(LamError):
    """Compliance cannot be identified from the data.

    Raised when the AI data exhibits no IIA violation, in which case the
    behavior is consistent with several regimes at once.  The ambiguous
    regimes are listed in :attr:`possible_regimes`.
    """

    def __init__(self, message: str, possible_regimes: tuple[str, ...] = ()):
        super().__init__(message)
        self.possible_regimes = possible_regimes


class PartiallyIdentifiedError(LamError):
    """AI and human choices coincide: alpha and v are not separately identified."""


class DegenerateDivisionError(LamError):
    """An operation requires alpha < 1 but alpha = 1 was supplied."""


class InconsistentInputsError(LamError):
    """Inputs are jointly incompatible with any valid representation."""


class GapUndefinedError(LamError):
    """Deception gap requested for a field result that is not identified."""


class DatasetFormatError(LamError):
    """A dataset or params file is malformed; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


# ---------------------------------------------------------------------------
# Scalar-mode helpers
# ---------------------------------------------------------------------------


def is_exact_scalar(x: Scalar) -> bool:
    """True when ``x`` participates in exact rational arithmetic."""
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def resolve_tol(tol: Scalar | None, exact: bool) -> Scalar:
    """Pick the effective tolerance: explicit > exact-zero > float default."""
    if tol is not None:
        return tol
    return 0 if exact else FLOAT_TOL


# ---------------------------------------------------------------------------
# Universe and menus
# ---------------------------------------------------------------------------

Menu = frozenset  # menus are frozensets of alternative identifiers


@dataclass(frozen=True)
class Universe:
    """Ordered finite set of at least three distinct alternative identifiers."""

    alternatives: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alts = tuple(self.alternatives)
        object.__setattr__(self, "alternatives", alts)
        if len(alts) < 3:
            raise InvalidParameterError("a universe needs at least 3 alternatives")
        if len(set(alts)) != len(alts):
            raise InvalidParameterError("alternative identifiers must be unique")
        if any(not isinstance(a, str) or not a for a in alts):
            raise InvalidParameterError("alternative identifiers must be non-empty strings")
        forbidden = set(",;#") | set(" \t\r\n")
        if any(forbidden & set(a) for a in alts):
            raise InvalidParameterError(
                "alternative identifiers may not contain separators "
                "(',', ';', '#') or whitespace"
            )
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(alts)})

    @property
    def size(self) -> int:
        return len(self.alternatives)

    def index(self, alt: str) -> int:
        try:
            return self._index[alt]
        except KeyError:
            raise MissingDataError(f"unknown alternative {alt!r}") from None

    def menu(self, members: Iterable[str]) -> Menu:
        """Validate and normalize a menu: non-empty subset of the universe."""
        m = frozenset(members)
        if not m:
            raise InvalidParameterError("menus must be non-empty")
        for a in m:
            self.index(a)
        return m

    def menu_key(self, menu: Iterable[str]) -> tuple[int, ...]:
        """Sort key giving the canonical (lexicographic) order on menus."""
        return tuple(sorted(self._index[a] for a in menu))

    def sorted_members(self, menu: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(menu, key=self.index))

    def all_menus(self, min_size: int = 2) -> list[Menu]:
        """All menus of at least ``min_size`` alternatives, in canonical order."""
        out = []
        for r in range(min_size, self.size + 1):
            for combo in combinations(self.alternatives, r):
                out.append(frozenset(combo))
        return sorted(out, key=self.menu_key)


# ---------------------------------------------------------------------------
# Stochastic choice functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StochasticChoice:
    """A stochastic choice function over an observed set of menus.

    ``table`` maps each observed menu to a row of choice probabilities for
    its members.  Rows must sum to one (exactly in exact mode, within
    ``eps_sum`` in float mode).  Members missing from a row have implicit
    probability zero, which clears row validation but marks the function as
    not strictly positive.
    """

    universe: Universe
    table: Mapping[Menu, Mapping[str, Scalar]]
    eps_sum: float = ROW_SUM_TOL
    is_exact: bool = field(init=False, compare=False)
    is_positive: bool = field(init=False, compare=False)

    def __post_init__(self):
        norm: dict[Menu, dict[str, Scalar]] = {}
        exact = True
        positive = True
        for raw_menu, raw_row in self.table.items():
            menu = self.universe.menu(raw_menu)
            if menu in norm:
                raise InvalidParameterError(
                    f"duplicate menu {self.universe.sorted_members(menu)}"
                )
            row: dict[str, Scalar] = {}
            for alt, p in raw_row.items():
                if alt not in menu:
                    raise InvalidParameterError(
                        f"alternative {alt!r} recorded outside its menu"
                    )
                if isinstance(p, int) and not isinstance(p, bool):
                    p = Fraction(p)
                exact = exact and is_exact_scalar(p)
                row[alt] = p
            eff = 0 if all(is_exact_scalar(p) for p in row.values()) else self.eps_sum
            for alt, p in row.items():
                if p < -eff or p > 1 + eff:
                    raise InvalidParameterError(
                        f"probability {p!r} for {alt!r} outside [0, 1]"
                    )
                if p < 0:
                    row[alt] = 0.0
            total = sum(row.values())
            if abs(total - 1) > eff:
                raise InvalidParameterError(
                    f"row for menu {self.universe.sorted_members(menu)} sums to "
                    f"{total!r}, not 1"
                )
            positive = positive and all(row.get(a, 0) > 0 for a in menu)
            norm[menu] = row
        if not norm:
            raise InvalidParameterError("a stochastic choice function needs data")
        object.__setattr__(self, "table", norm)
        object.__setattr__(self, "is_exact", exact)
        object.__setattr__(self, "is_positive", positive)

    @property
    def domain(self) -> tuple[Menu, ...]:
        """Observed menus in canonical order."""
        return tuple(sorted(self.table, key=self.universe.menu_key))

    def has_menu(self, menu: Iterable[str]) -> bool:
        return frozenset(menu) in self.table

    def prob(self, alt: str, menu: Iterable[str]) -> Scalar:
        """Choice probability of ``alt`` from ``menu``; zero off the menu."""
        m = frozenset(menu)
        try:
            row = self.table[m]
        except KeyError:
            raise MissingDataError(
                f"menu {tuple(sorted(menu))} not in the observed domain"
            ) from None
        self.universe.index(alt)
        if alt not in m:
            return 0
        return row.get(alt, 0)

    def row(self, menu: Iterable[str]) -> dict[str, Scalar]:
        m = frozenset(menu)
        if m not in self.table:
            raise MissingDataError(
                f"menu {tuple(sorted(menu))} not in the observed domain"
            )
        return {a: self.table[m].get(a, 0) for a in self.universe.sorted_members(m)}

    def as_float(self) -> "StochasticChoice":
        return StochasticChoice(
            self.universe,
            {m: {a: float(p) for a, p in row.items()} for m, row in self.table.items()},
            eps_sum=max(self.eps_sum, ROW_SUM_TOL),
        )


def sup_distance(a: StochasticChoice, b: StochasticChoice) -> Scalar:
    """Sup-norm distance between two choice functions on their common menus."""
    common = [m for m in a.domain if b.has_menu(m)]
    if not common:
        raise InsufficientDataError("the two choice functions share no menus")
    worst: Scalar = 0
    for m in common:
        for alt in m:
            d = abs(a.prob(alt, m) - b.prob(alt, m))
            if d > worst:
                worst = d
    return worst


# ---------------------------------------------------------------------------
# Model parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LamParams:
    """A mixture representation: utilities ``u``, ``v`` > 0 and compliance.

    Utilities are kept on the canonical scale u(anchor) = v(anchor) = 1,
    which pins down the otherwise arbitrary scale factor of each Luce rule.
    Use :meth:`normalized` to build parameters from unscaled utilities.
    """

    universe: Universe
    u: Mapping[str, Scalar]
    v: Mapping[str, Scalar]
    alpha: Scalar
    anchor: str
    is_exact: bool = field(init=False, compare=False)

    def __post_init__(self):
        self.universe.index(self.anchor)
        exact = is_exact_scalar(self.alpha)
        if isinstance(self.alpha, int) and not isinstance(self.alpha, bool):
            object.__setattr__(self, "alpha", Fraction(self.alpha))
        for name, vec in (("u", self.u), ("v", self.v)):
            clean: dict[str, Scalar] = {}
            for alt in self.universe.alternatives:
                if alt not in vec:
                    raise InvalidParameterError(f"{name} missing value for {alt!r}")
                val = vec[alt]
                if isinstance(val, int) and not isinstance(val, bool):
                    val = Fraction(val)  # ints join the exact path
                if not val > 0:
                    raise InvalidParameterError(
                        f"{name}({alt!r}) = {val!r}; utilities must be positive"
                    )
                exact = exact and is_exact_scalar(val)
                clean[alt] = val
            anchor_val = clean[self.anchor]
            slack = 0 if is_exact_scalar(anchor_val) else 1e-12
            if abs(anchor_val - 1) > slack:
                raise InvalidParameterError(
                    f"{name}({self.anchor!r}) must equal 1 on the canonical scale; "
                    "use LamParams.normalized"
                )
            object.__setattr__(self, name, clean)
        if not (0 <= self.alpha <= 1):
            raise InvalidParameterError(f"alpha = {self.alpha!r} outside [0, 1]")
        object.__setattr__(self, "is_exact", exact)

    @classmethod
    def normalized(
        cls,
        universe: Universe,
        u: Mapping[str, Scalar],
        v: Mapping[str, Scalar],
        alpha: Scalar,
        anchor: str | None = None,
    ) -> "LamParams":
        """Build params from unscaled positive utilities, dividing by the anchor."""
        anchor = universe.alternatives[0] if anchor is None else anchor
        scales = {}
        for name, vec in (("u", u), ("v", v)):
            if anchor not in vec or not vec[anchor] > 0:
                raise InvalidParameterError(f"{name} needs a positive anchor value")
            base = vec[anchor]
            scales[name] = Fraction(base) if is_exact_scalar(base) else base
        return cls(
            universe=universe,
            u={a: u[a] / scales["u"] for a in universe.alternatives},
            v={a: v[a] / scales["v"] for a in universe.alternatives},
            alpha=alpha,
            anchor=anchor,
        )

    def swapped(self) -> "LamParams":
        """The observationally equivalent representation (v, u, 1 - alpha)."""
        return LamParams(self.universe, dict(self.v), dict(self.u), 1 - self.alpha, self.anchor)

    def ratio(self) -> dict[str, Scalar]:
        """Per-alternative ratio u(a)/v(a); constant iff perfectly aligned."""
        return {a: self.u[a] / self.v[a] for a in self.universe.alternatives}

    def as_float(self) -> "LamParams":
        return LamParams(
            self.universe,
            {a: float(x) for a, x in self.u.items()},
            {a: float(x) for a, x in self.v.items()},
            float(self.alpha),
            self.anchor,
        )

    def u_vector(self) -> tuple[Scalar, ...]:
        return tuple(self.u[a] for a in self.universe.alternatives)

    def v_vector(self) -> tuple[Scalar, ...]:
        return tuple(self.v[a] for a in self.universe.alternatives)


# ---------------------------------------------------------------------------
# Instability tuples and regime reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InstabilityTuple:
    """Index (x, y, S, T) at which instability measures are evaluated."""

    x: str
    y: str
    menu_s: Menu
    menu_t: Menu

    def __post_init__(self):
        object.__setattr__(self, "menu_s", frozenset(self.menu_s))
        object.__setattr__(self, "menu_t", frozenset(self.menu_t))
        if self.x == self.y:
            raise InvalidParameterError("instability tuples need two distinct alternatives")
        for alt in (self.x, self.y):
            if alt not in self.menu_s or alt not in self.menu_t:
                raise InvalidParameterError(
                    f"{alt!r} must belong to both menus of the tuple"
                )

    def describe(self, universe: Universe) -> str:
        s = ",".join(universe.sorted_members(self.menu_s))
        t = ",".join(universe.sorted_members(self.menu_t))
        return f"({self.x},{self.y},{{{s}}},{{{t}}})"


REGIMES = ("aligned", "compliant", "autonomous", "adversarial", "misaligned")


@dataclass(frozen=True)
class RegimeReport:
    """Behavioral regime of a parameter tuple plus the ratio diagnostic."""

    regime: str
    ratio: Mapping[str, Scalar]
    tol: Scalar

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise InvalidParameterError(f"unknown regime {self.regime!r}")
