"""Laboratory-setting identification: recover (u, v, alpha) from both agents.

With the human's choices observed alongside the AI's, identification runs
in three steps: read u off the human's Luce rule, read compliance off the
ratio of the AI's own instability to the composite instability of the pair
(the two are proportional with slope alpha across every tuple), then peel
the human component out of the AI data and read v off the remaining Luce
rule.  The whole pipeline collapses into three explicit degenerate cases:
identical AI and human data (alpha and v not separately identified), an
IIA-satisfying AI that differs from the human (compliance must be zero),
and data admitting no mixture representation at all (inconsistent).

``check_axioms`` tests the five behavioral conditions that characterize
consistency with the mixture model, reporting a concrete witness for every
failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Mapping

from .choice import (
    composite_instability,
    iia_violations,
    instability_tuples,
    lam_table,
    own_instability,
    recover_luce_utility,
    satisfies_iia,
)
from .types import (
    DegenerateDivisionError,
    InconsistentInputsError,
    InstabilityTuple,
    InsufficientDataError,
    InvalidParameterError,
    LamParams,
    Menu,
    NotIdentifiedError,
    NotLuceError,
    PartiallyIdentifiedError,
    Scalar,
    StochasticChoice,
    resolve_tol,
    sup_distance,
)

__all__ = [
    "AlphaEstimate",
    "LabResult",
    "AxiomVerdict",
    "AxiomReport",
    "estimate_alpha",
    "recover_autonomous",
    "identify_lab",
    "check_axioms",
]

AlphaStrategy = Literal["single-tuple", "least-squares"]


def _common_menus(a: StochasticChoice, b: StochasticChoice) -> list[Menu]:
    menus = [m for m in a.domain if b.has_menu(m)]
    if not menus:
        raise InsufficientDataError("the AI and human data share no menus")
    return menus


# ---------------------------------------------------------------------------
# Compliance estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaEstimate:
    """Compliance estimate with per-tuple diagnostics.

    ``samples`` holds (tuple, own instability, composite instability) for
    every canonical tuple with a usable composite term; the per-tuple ratio
    estimates are their quotients.  ``r_squared`` measures how well the
    proportionality law fits (1 means exact), which is the model-fit
    diagnostic for noisy data.  ``alpha`` is clamped to [0, 1] in float
    mode; ``raw`` is the unclamped value.
    """

    alpha: Scalar
    raw: Scalar
    strategy: AlphaStrategy
    best: InstabilityTuple
    samples: tuple[tuple[InstabilityTuple, Scalar, Scalar], ...]
    r_squared: Scalar
    n_tuples: int


def estimate_alpha(
    rho_ai: StochasticChoice,
    rho_h: StochasticChoice,
    strategy: AlphaStrategy = "least-squares",
    tol: Scalar | None = None,
) -> AlphaEstimate:
    """Estimate compliance from the instability proportionality law.

    single-tuple picks the tuple with the largest composite instability and
    returns the ratio own/composite there; least-squares returns the slope
    of own-on-composite over all tuples with composite magnitude above tol.
    The two agree exactly on noiseless mixture data.

    Raises :class:`PartiallyIdentifiedError` when the AI and human data
    coincide, and :class:`NotIdentifiedError` when the AI data has no IIA
    violation (compliance could be 0 or 1, or the utilities aligned).
    """
    exact = rho_ai.is_exact and rho_h.is_exact
    eff = resolve_tol(tol, exact)
    menus = _common_menus(rho_ai, rho_h)

    if sup_distance(rho_ai, rho_h) <= eff:
        raise PartiallyIdentifiedError(
            "AI and human choices coincide; alpha and v are not separately identified"
        )

    rows: list[tuple[InstabilityTuple, Scalar, Scalar]] = []
    any_violation = False
    for t in instability_tuples(rho_ai.universe, menus, canonical=True):
        d = own_instability(rho_ai, t)
        p = composite_instability(rho_ai, rho_h, t)
        if abs(d) > eff:
            any_violation = True
        rows.append((t, d, p))
    if not any_violation:
        raise NotIdentifiedError(
            "AI data satisfies IIA: compliance is 0 or 1, or the utilities "
            "are aligned; it cannot be point-identified",
            possible_regimes=("autonomous", "compliant", "aligned"),
        )

    usable = [(t, d, p) for t, d, p in rows if abs(p) > eff]
    if not usable:
        raise InconsistentInputsError(
            "AI data violates IIA while every composite instability vanishes; "
            "no mixture representation exists"
        )

    best = max(usable, key=lambda r: abs(r[2]))
    if strategy == "single-tuple":
        raw = best[1] / best[2]
    elif strategy == "least-squares":
        raw = sum(d * p for _, d, p in usable) / sum(p * p for _, _, p in usable)
    else:
        raise InvalidParameterError(f"unknown alpha strategy {strategy!r}")

    ss_tot = sum(d * d for _, d, _ in rows)
    ss_res = sum((d - raw * p) ** 2 for _, d, p in rows)
    r_squared = 1 - ss_res / ss_tot if ss_tot > 0 else 1

    alpha = raw if exact else min(max(raw, 0.0), 1.0)
    return AlphaEstimate(
        alpha=alpha,
        raw=raw,
        strategy=strategy,
        best=best[0],
        samples=tuple(usable),
        r_squared=r_squared,
        n_tuples=len(usable),
    )


# ---------------------------------------------------------------------------
# Autonomous-rule recovery and the full pipeline
# ---------------------------------------------------------------------------


def recover_autonomous(
    rho_ai: StochasticChoice,
    rho_h: StochasticChoice,
    alpha: Scalar,
    tol: Scalar | None = None,
) -> StochasticChoice:
    """Peel the human component out of the AI data.

    Returns the table (rho_ai - alpha * rho_h) / (1 - alpha) over the
    common menus.  Entries below -tol mean the pair admits no mixture with
    this alpha and raise :class:`InconsistentInputsError`; entries in
    [-tol, 0) are clamped to zero.
    """
    exact = rho_ai.is_exact and rho_h.is_exact
    eff = resolve_tol(tol, exact)
    if not alpha < 1 - eff:
        raise DegenerateDivisionError(
            "alpha = 1 leaves no autonomous component to recover"
        )
    menus = _common_menus(rho_ai, rho_h)
    table: dict[Menu, dict[str, Scalar]] = {}
    for menu in menus:
        row: dict[str, Scalar] = {}
        for alt in rho_ai.universe.sorted_members(menu):
            p = (rho_ai.prob(alt, menu) - alpha * rho_h.prob(alt, menu)) / (1 - alpha)
            if p < -eff:
                raise InconsistentInputsError(
                    f"autonomous probability of {alt!r} in "
                    f"{rho_ai.universe.sorted_members(menu)} is {p!r}; the pair "
                    f"admits no mixture with alpha = {alpha!r}"
                )
            row[alt] = max(p, 0) if exact else max(p, 0.0)
        table[menu] = row
    return StochasticChoice(rho_ai.universe, table, eps_sum=max(rho_ai.eps_sum, 1e-9))


@dataclass(frozen=True)
class LabResult:
    """Outcome of laboratory identification.

    point-identified: ``params`` holds (u, v, alpha) and reproduces the AI
    data on its domain within ``tol``; partially-identified: the AI and
    human data coincide, only ``human_utility`` is pinned down;
    inconsistent: the pair admits no mixture representation (see
    ``reason``).
    """

    status: Literal["point-identified", "partially-identified", "inconsistent"]
    human_utility: Mapping[str, Scalar] | None
    params: LamParams | None
    alpha_diagnostics: AlphaEstimate | None
    recovered_autonomous: StochasticChoice | None
    tol: Scalar
    reason: str = ""


def identify_lab(
    rho_ai: StochasticChoice,
    rho_h: StochasticChoice,
    anchor: str,
    strategy: AlphaStrategy = "least-squares",
    tol: Scalar | None = None,
) -> LabResult:
    """Run the three-step laboratory identification pipeline.

    Recovers u from the human data, branches on the degenerate cases
    (identical data; IIA-satisfying AI data), and otherwise estimates
    compliance, reconstructs the autonomous rule, and recovers v from it.
    Any step that fails marks the pair inconsistent rather than raising.
    """
    exact = rho_ai.is_exact and rho_h.is_exact
    eff = resolve_tol(tol, exact)

    def inconsistent(reason: str) -> LabResult:
        return LabResult(
            status="inconsistent",
            human_utility=None,
            params=None,
            alpha_diagnostics=None,
            recovered_autonomous=None,
            tol=eff,
            reason=reason,
        )

    try:
        u = recover_luce_utility(rho_h, anchor, tol=eff)
    except NotLuceError as e:
        return inconsistent(f"human data is not a Luce rule: {e}")

    if sup_distance(rho_ai, rho_h) <= eff:
        return LabResult(
            status="partially-identified",
            human_utility=u,
            params=None,
            alpha_diagnostics=None,
            recovered_autonomous=None,
            tol=eff,
            reason="AI and human choices coincide: the AI is perfectly compliant "
            "or perfectly aligned, and alpha and v cannot be separated",
        )

    if satisfies_iia(rho_ai, eff):
        # different data without IIA violations forces alpha = 0
        try:
            v = recover_luce_utility(rho_ai, anchor, tol=eff)
        except NotLuceError as e:
            return inconsistent(f"AI data satisfies IIA but is not a Luce rule: {e}")
        params = LamParams(
            rho_ai.universe, u, v, 0 if exact else 0.0, anchor
        )
        return LabResult(
            status="point-identified",
            human_utility=u,
            params=params,
            alpha_diagnostics=None,
            recovered_autonomous=rho_ai,
            tol=eff,
        )

    try:
        est = estimate_alpha(rho_ai, rho_h, strategy=strategy, tol=eff)
    except InconsistentInputsError as e:
        return inconsistent(str(e))

    if est.raw < -eff or est.raw > 1 + eff:
        return inconsistent(
            f"estimated compliance {est.raw!r} falls outside [0, 1]"
        )
    alpha = est.alpha

    try:
        rho_a = recover_autonomous(rho_ai, rho_h, alpha, tol=eff)
        v = recover_luce_utility(rho_a, anchor, tol=eff)
    except (DegenerateDivisionError, InconsistentInputsError, NotLuceError) as e:
        return inconsistent(f"autonomous component is not a Luce rule: {e}")

    params = LamParams(rho_ai.universe, u, v, alpha, anchor)
    residual = sup_distance(lam_table(params, rho_ai.domain), rho_ai)
    if residual > eff:
        return inconsistent(
            f"recovered parameters miss the AI data by {residual!r}"
        )
    return LabResult(
        status="point-identified",
        human_utility=u,
        params=params,
        alpha_diagnostics=est,
        recovered_autonomous=rho_a,
        tol=eff,
    )


# ---------------------------------------------------------------------------
# Axiomatic consistency check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomVerdict:
    passed: bool
    witness: tuple | None = None
    note: str = ""


@dataclass(frozen=True)
class AxiomReport:
    """Verdicts for the five conditions characterizing mixture consistency.

    positivity            every recorded probability is strictly positive
    h_iia                 the human data satisfies IIA
    proportionality       own and composite instabilities are proportional
                          across tuples (checked by cross-products)
    bounded_instability   own and composite instabilities share signs and
                          own never exceeds composite (strictly, when the
                          own term is non-zero)
    bounded_divergence    AI choice probabilities dominate the human's
                          scaled by the instability ratio

    The pair is consistent with the mixture model iff all five hold.
    """

    positivity: AxiomVerdict
    h_iia: AxiomVerdict
    proportionality: AxiomVerdict
    bounded_instability: AxiomVerdict
    bounded_divergence: AxiomVerdict
    tol: Scalar

    @property
    def overall(self) -> bool:
        return all(
            v.passed
            for v in (
                self.positivity,
                self.h_iia,
                self.proportionality,
                self.bounded_instability,
                self.bounded_divergence,
            )
        )

    def verdicts(self) -> dict[str, AxiomVerdict]:
        return {
            "positivity": self.positivity,
            "h_iia": self.h_iia,
            "proportionality": self.proportionality,
            "bounded_instability": self.bounded_instability,
            "bounded_divergence": self.bounded_divergence,
        }


def check_axioms(
    rho_ai: StochasticChoice,
    rho_h: StochasticChoice,
    tol: Scalar | None = None,
    exhaustive: bool = False,
) -> AxiomReport:
    """Test the five behavioral conditions, producing witnesses for failures.

    Proportionality and bounded divergence are checked in slope form
    against the tuple with the largest composite instability, which is
    equivalent to the full quadratic-size scans; pass ``exhaustive=True``
    to run those scans verbatim instead.
    """
    exact = rho_ai.is_exact and rho_h.is_exact
    eff = resolve_tol(tol, exact)
    universe = rho_ai.universe
    menus = _common_menus(rho_ai, rho_h)

    # positivity, over each function's own recorded domain
    positivity = AxiomVerdict(True)
    for name, rho in (("ai", rho_ai), ("human", rho_h)):
        if not positivity.passed:
            break
        for menu in rho.domain:
            bad = [a for a in universe.sorted_members(menu) if not rho.prob(a, menu) > eff]
            if bad:
                positivity = AxiomVerdict(
                    False,
                    witness=(name, universe.sorted_members(menu), bad[0]),
                    note=f"{name} probability of {bad[0]!r} is not positive",
                )
                break

    viol_h = iia_violations(rho_h, eff)
    h_iia = (
        AxiomVerdict(True)
        if not viol_h
        else AxiomVerdict(
            False,
            witness=(viol_h[0],),
            note="human data violates IIA at " + viol_h[0].describe(universe),
        )
    )

    rows = [
        (t, own_instability(rho_ai, t), composite_instability(rho_ai, rho_h, t))
        for t in instability_tuples(universe, menus, canonical=True)
    ]

    proportionality = _check_proportionality(universe, rows, eff, exhaustive)
    bounded_instability = _check_bounded_instability(universe, rows, eff)
    bounded_divergence = _check_bounded_divergence(
        universe, rows, rho_ai, rho_h, menus, eff, exhaustive
    )

    return AxiomReport(
        positivity=positivity,
        h_iia=h_iia,
        proportionality=proportionality,
        bounded_instability=bounded_instability,
        bounded_divergence=bounded_divergence,
        tol=eff,
    )


def _check_proportionality(universe, rows, eff, exhaustive) -> AxiomVerdict:
    if exhaustive:
        for i, (t1, d1, p1) in enumerate(rows):
            for t2, d2, p2 in rows[i + 1 :]:
                if abs(d1 * p2 - d2 * p1) > eff:
                    return AxiomVerdict(
                        False,
                        witness=(t1, t2),
                        note="instability ratios differ between "
                        + t1.describe(universe)
                        + " and "
                        + t2.describe(universe),
                    )
        return AxiomVerdict(True)
    anchor_row = None
    for t, d, p in rows:
        if anchor_row is None or abs(p) > abs(anchor_row[2]):
            anchor_row = (t, d, p)
    if anchor_row is None:
        return AxiomVerdict(True, note="no tuples to compare")
    t_ref, d_ref, p_ref = anchor_row
    for t, d, p in rows:
        if abs(d * p_ref - d_ref * p) > eff:
            return AxiomVerdict(
                False,
                witness=(t, t_ref),
                note="instability ratios differ between "
                + t.describe(universe)
                + " and "
                + t_ref.describe(universe),
            )
    return AxiomVerdict(True)


def _check_bounded_instability(universe, rows, eff) -> AxiomVerdict:
    for t, d, p in rows:
        sign_ok = d * p >= -eff
        size_ok = abs(d) <= abs(p) + eff
        if abs(d) > eff:
            sign_ok = sign_ok and d * p > 0
            if eff == 0:
                size_ok = size_ok and abs(d) < abs(p)
        if not (sign_ok and size_ok):
            return AxiomVerdict(
                False,
                witness=(t, d, p),
                note="own instability "
                + f"{d!r} is not dominated by composite {p!r} at "
                + t.describe(universe),
            )
    return AxiomVerdict(True)


def _check_bounded_divergence(
    universe, rows, rho_ai, rho_h, menus, eff, exhaustive
) -> AxiomVerdict:
    def entry_check(t, d, p) -> AxiomVerdict | None:
        strict = abs(d) > eff
        for menu in menus:
            for z in universe.sorted_members(menu):
                lhs = rho_ai.prob(z, menu) * abs(p)
                rhs = rho_h.prob(z, menu) * abs(d)
                if strict and eff == 0:
                    fail = lhs <= rhs
                else:
                    fail = lhs < rhs - eff
                if fail:
                    return AxiomVerdict(
                        False,
                        witness=(t, universe.sorted_members(menu), z),
                        note=f"AI probability of {z!r} in "
                        f"{universe.sorted_members(menu)} is too small for the "
                        "instability ratio at " + t.describe(universe),
                    )
        return None

    if exhaustive:
        for t, d, p in rows:
            bad = entry_check(t, d, p)
            if bad is not None:
                return bad
        return AxiomVerdict(True)

    # slope form: the binding tuple is the one with the largest |d|/|p|;
    # a tuple with vanishing composite but non-vanishing own term fails
    # outright (no probability can compensate a zero left-hand side).
    binding = None
    for t, d, p in rows:
        if abs(p) <= eff:
            if abs(d) > eff:
                return AxiomVerdict(
                    False,
                    witness=(t, d, p),
                    note="composite instability vanishes while own does not at "
                    + t.describe(universe),
                )
            continue
        if binding is None or abs(d) * abs(binding[2]) > abs(binding[1]) * abs(p):
            binding = (t, d, p)
    if binding is None:
        return AxiomVerdict(True, note="no tuples to compare")
    bad = entry_check(*binding)
    return bad if bad is not None else AxiomVerdict(True)
