"""Finite-sample layer: simulation and maximum-likelihood fitting.

The identification machinery works on exact choice probabilities; real
data arrives as counts.  This module provides the bridge: a seeded
multinomial sampler for the forward model, the multinomial
log-likelihood, and an EM fitter for the two-component Luce mixture.

EM here is the standard mixture recipe.  The E-step attributes each
observation to the human-utility component with responsibility
alpha * Luce_u / mixture; the M-step re-estimates alpha as the mean
responsibility and re-fits each component's utilities on its
responsibility-weighted counts with minorize-maximize updates (each inner
update provably increases the weighted Luce likelihood, so the overall
likelihood never decreases).  Estimation is double-precision throughout;
exact inputs are converted on entry.

Randomness comes from numpy's default generator (PCG64), seeded
explicitly: identical seeds give identical draws on any platform.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping

import numpy as np

from .choice import lam_choice, luce_choice
from .types import (
    InvalidParameterError,
    LamParams,
    Menu,
    StochasticChoice,
    Universe,
)

__all__ = [
    "ChoiceCounts",
    "FitResult",
    "simulate_counts",
    "log_likelihood",
    "log_likelihood_gradient",
    "em_step",
    "fit_mle",
]


@dataclass(frozen=True)
class ChoiceCounts:
    """Observed choice counts per (menu, alternative)."""

    universe: Universe
    counts: Mapping[Menu, Mapping[str, int]]

    def __post_init__(self):
        norm: dict[Menu, dict[str, int]] = {}
        for raw_menu, row in self.counts.items():
            menu = self.universe.menu(raw_menu)
            clean: dict[str, int] = {}
            for alt, n in row.items():
                if alt not in menu:
                    raise InvalidParameterError(
                        f"count recorded for {alt!r} outside its menu"
                    )
                if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 0:
                    raise InvalidParameterError(
                        f"count for {alt!r} must be a non-negative integer, got {n!r}"
                    )
                clean[alt] = int(n)
            if sum(clean.values()) <= 0:
                raise InvalidParameterError(
                    f"menu {self.universe.sorted_members(menu)} has no observations"
                )
            norm[menu] = clean
        if not norm:
            raise InvalidParameterError("choice counts need at least one menu")
        object.__setattr__(self, "counts", norm)

    @property
    def domain(self) -> tuple[Menu, ...]:
        return tuple(sorted(self.counts, key=self.universe.menu_key))

    def trials(self, menu: Iterable[str]) -> int:
        return sum(self.counts[frozenset(menu)].values())

    def total(self) -> int:
        return sum(self.trials(m) for m in self.counts)

    def to_frequencies(self) -> StochasticChoice:
        """Empirical choice frequencies, suitable for the identification routines."""
        table = {}
        for menu, row in self.counts.items():
            n = sum(row.values())
            table[menu] = {alt: c / n for alt, c in row.items()}
        return StochasticChoice(self.universe, table)


def simulate_counts(
    params: LamParams,
    menus: Iterable[Iterable[str]],
    n_per_menu: int,
    seed: int,
) -> ChoiceCounts:
    """Draw ``n_per_menu`` i.i.d. mixture choices from each menu.

    Sampling is multinomial per menu with PCG64 randomness; the same seed
    reproduces the same counts exactly.
    """
    if n_per_menu < 1:
        raise InvalidParameterError("n_per_menu must be at least 1")
    universe = params.universe
    rng = np.random.default_rng(seed)
    counts: dict[Menu, dict[str, int]] = {}
    for raw in sorted((universe.menu(m) for m in menus), key=universe.menu_key):
        members = universe.sorted_members(raw)
        probs = lam_choice(params, raw)
        p = np.array([float(probs[a]) for a in members])
        p = p / p.sum()
        draw = rng.multinomial(n_per_menu, p)
        counts[raw] = {a: int(c) for a, c in zip(members, draw)}
    return ChoiceCounts(universe, counts)


# ---------------------------------------------------------------------------
# Likelihood and its gradient
# ---------------------------------------------------------------------------


def log_likelihood(params: LamParams, data: ChoiceCounts) -> float:
    """Multinomial log-likelihood of the counts under the mixture model."""
    ll = 0.0
    for menu, row in data.counts.items():
        probs = lam_choice(params, menu)
        for alt, n in row.items():
            if n:
                ll += n * math.log(float(probs[alt]))
    return ll


def log_likelihood_gradient(
    params: LamParams, data: ChoiceCounts
) -> dict[tuple[str, str], float]:
    """Analytic gradient in unconstrained coordinates.

    Coordinates are log u(a) and log v(a) for every non-anchor a (the
    anchor is pinned at log 1 = 0) and the log-odds of alpha.  Keys are
    ("log_u", a), ("log_v", a), and ("logit_alpha", "").
    """
    a = float(params.alpha)
    if not 0 < a < 1:
        raise InvalidParameterError("gradient needs interior alpha")
    universe = params.universe
    grad: dict[tuple[str, str], float] = {}
    for alt in universe.alternatives:
        if alt != params.anchor:
            grad[("log_u", alt)] = 0.0
            grad[("log_v", alt)] = 0.0
    d_alpha = 0.0
    for menu, row in data.counts.items():
        pu = luce_choice(params.u, menu)
        pv = luce_choice(params.v, menu)
        mix = {x: a * float(pu[x]) + (1 - a) * float(pv[x]) for x in pu}
        wu_tot = 0.0
        wv_tot = 0.0
        for x, n in row.items():
            if not n:
                continue
            wu = n * a * float(pu[x]) / mix[x]
            wv = n - wu
            wu_tot += wu
            wv_tot += wv
            d_alpha += n * (float(pu[x]) - float(pv[x])) / mix[x]
            if x != params.anchor:
                grad[("log_u", x)] += wu
                grad[("log_v", x)] += wv
        for k in menu:
            if k != params.anchor:
                grad[("log_u", k)] -= float(pu[k]) * wu_tot
                grad[("log_v", k)] -= float(pv[k]) * wv_tot
    grad[("logit_alpha", "")] = a * (1 - a) * d_alpha
    return grad


# ---------------------------------------------------------------------------
# EM
# ---------------------------------------------------------------------------


def _weighted_luce_mm(
    universe: Universe,
    weighted: dict[Menu, dict[str, float]],
    init: Mapping[str, float],
    anchor: str,
    inner_tol: float = 1e-12,
    max_inner: int = 500,
) -> dict[str, float]:
    """Minorize-maximize fit of Luce utilities to weighted counts.

    Iterates u(k) <- W(k) / sum over menus containing k of N(S)/u(S),
    where W(k) are k's weighted wins and N(S) the menu's weighted total.
    Each update increases the weighted likelihood; alternatives with no
    weighted wins keep their current value (their likelihood term is
    flat at zero weight).
    """
    wins = {a: 0.0 for a in universe.alternatives}
    menu_totals: dict[Menu, float] = {}
    for menu, row in weighted.items():
        menu_totals[menu] = sum(row.values())
        for alt, w in row.items():
            wins[alt] += w
    u = {a: float(init[a]) for a in universe.alternatives}
    for _ in range(max_inner):
        sums = {menu: sum(u[a] for a in menu) for menu in weighted}
        biggest = 0.0
        new = dict(u)
        for k in universe.alternatives:
            if wins[k] <= 0.0:
                continue
            denom = sum(
                menu_totals[menu] / sums[menu] for menu in weighted if k in menu
            )
            if denom <= 0.0:
                continue
            cand = wins[k] / denom
            biggest = max(biggest, abs(math.log(cand / u[k])))
            new[k] = cand
        u = new
        if biggest < inner_tol:
            break
    scale = u[anchor]
    return {a: val / scale for a, val in u.items()}


def em_step(params: LamParams, data: ChoiceCounts) -> LamParams:
    """One EM update of (u, v, alpha); never decreases the likelihood.

    At a boundary alpha (0 or 1) the responsibilities degenerate, so the
    mixture weight is frozen, only the active component is refit, and a
    warning is emitted.
    """
    p = params.as_float()
    universe = p.universe
    a = p.alpha

    if a <= 0.0 or a >= 1.0:
        warnings.warn(
            "alpha is at a boundary; freezing it and updating the active "
            "component only",
            RuntimeWarning,
            stacklevel=2,
        )
        raw = {m: {x: float(n) for x, n in row.items()} for m, row in data.counts.items()}
        if a >= 1.0:
            u = _weighted_luce_mm(universe, raw, p.u, p.anchor)
            return LamParams(universe, u, dict(p.v), a, p.anchor)
        v = _weighted_luce_mm(universe, raw, p.v, p.anchor)
        return LamParams(universe, dict(p.u), v, a, p.anchor)

    wu_table: dict[Menu, dict[str, float]] = {}
    wv_table: dict[Menu, dict[str, float]] = {}
    resp_sum = 0.0
    total = 0.0
    for menu, row in data.counts.items():
        pu = luce_choice(p.u, menu)
        pv = luce_choice(p.v, menu)
        wu_row = {}
        wv_row = {}
        for x, n in row.items():
            mix = a * pu[x] + (1 - a) * pv[x]
            wu = n * a * pu[x] / mix
            wu_row[x] = wu
            wv_row[x] = n - wu
            resp_sum += wu
            total += n
        wu_table[menu] = wu_row
        wv_table[menu] = wv_row

    new_alpha = resp_sum / total
    new_u = _weighted_luce_mm(universe, wu_table, p.u, p.anchor)
    new_v = _weighted_luce_mm(universe, wv_table, p.v, p.anchor)
    return LamParams(universe, new_u, new_v, new_alpha, p.anchor)


@dataclass(frozen=True)
class FitResult:
    """Best fit over the EM starts.

    ``ll_trace`` is the likelihood path of the winning start and
    ``monotone`` certifies that no step of any start decreased the
    likelihood beyond 1e-10.  ``status`` is ``degenerate-fit`` when every
    start collapsed to a boundary mixture weight.
    """

    params: LamParams
    log_likelihood: float
    iterations: int
    converged: bool
    empirical_rho: StochasticChoice
    ll_trace: tuple[float, ...]
    monotone: bool
    status: Literal["ok", "degenerate-fit"]
    n_starts: int
    seed: int


def fit_mle(
    data: ChoiceCounts,
    inits: int = 10,
    seed: int = 0,
    tol_ll: float = 1e-10,
    max_iter: int = 2000,
) -> FitResult:
    """Multi-start EM for the mixture model; deterministic given the seed.

    The first start is symmetric (u = v = 1, weight 1/2): equal components
    are EM-invariant, so on effectively single-rule data this start
    converges to the exact aligned optimum that random starts only crawl
    toward.  Remaining starts draw log-utilities from a standard normal
    (anchor pinned) and a uniform interior mixture weight.  Each start runs
    EM to relative likelihood convergence ``tol_ll`` or ``max_iter``, and
    the best final likelihood wins (ties keep the earlier start).  Starts
    whose mixture weight collapses to a boundary are marked degenerate and
    only win if every start degenerates.
    """
    if inits < 1:
        raise InvalidParameterError("need at least one start")
    universe = data.universe
    anchor = universe.alternatives[0]
    rng = np.random.default_rng(seed)

    best = None  # (degenerate, -ll) minimizing tuple, params, trace, iters, converged
    monotone = True
    for start in range(inits):
        u0 = {a: 1.0 for a in universe.alternatives}
        v0 = {a: 1.0 for a in universe.alternatives}
        alpha0 = 0.5
        if start > 0:
            for a in universe.alternatives:
                if a != anchor:
                    u0[a] = math.exp(rng.normal())
                    v0[a] = math.exp(rng.normal())
            alpha0 = float(rng.uniform(0.1, 0.9))
        params = LamParams(universe, u0, v0, alpha0, anchor)

        trace = [log_likelihood(params, data)]
        converged = False
        for _ in range(max_iter):
            params = em_step(params, data)
            trace.append(log_likelihood(params, data))
            rel = (trace[-1] - trace[-2]) / max(1.0, abs(trace[-2]))
            if abs(rel) < tol_ll:
                converged = True
                break
        monotone = monotone and all(
            b - a >= -1e-10 for a, b in zip(trace, trace[1:])
        )
        degenerate = not (1e-12 < params.alpha < 1 - 1e-12)
        key = (degenerate, -trace[-1])
        if best is None or key < best[0]:
            best = (key, params, tuple(trace), len(trace) - 1, converged)

    _, params, trace, iters, converged = best
    return FitResult(
        params=params,
        log_likelihood=trace[-1],
        iterations=iters,
        converged=converged,
        empirical_rho=data.to_frequencies(),
        ll_trace=trace,
        monotone=monotone,
        status="degenerate-fit" if best[0][0] else "ok",
        n_starts=inits,
        seed=seed,
    )
