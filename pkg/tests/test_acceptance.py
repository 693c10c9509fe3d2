"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see per-criterion
timing.  Criteria 1 and 2 reproduce the two worked examples exactly in
rational arithmetic; criteria 3-7 are randomized property suites with
fixed seeds; criterion 8 documents that split.
"""

import math
import random
import time
from fractions import Fraction as F
from itertools import combinations

import gen
from lam import (
    InstabilityTuple,
    LamParams,
    check_axioms,
    composite_instability,
    cross_instability,
    em_step,
    fit_mle,
    identification_polynomial,
    identify_field,
    identify_lab,
    implied_alpha,
    instability_tuples,
    lam_table,
    log_likelihood,
    log_likelihood_gradient,
    luce_table,
    own_instability,
    simulate_counts,
)


def announce(number: int, started: float, limit: float | None, detail: str) -> None:
    elapsed = time.perf_counter() - started
    if limit is not None:
        assert elapsed < limit, f"criterion {number} took {elapsed:.1f}s (limit {limit}s)"
    print(f"criterion {number}: PASS ({elapsed:.2f}s) {detail}")


def test_criterion_1_lab_golden(ex_a_ai, ex_a_human, ex_a_params, ex_a_autonomous):
    started = time.perf_counter()
    t = InstabilityTuple("x", "y", frozenset("xyz"), frozenset("xy"))
    assert own_instability(ex_a_ai, t) == F(1, 45)
    assert composite_instability(ex_a_ai, ex_a_human, t) == F(2, 45)

    result = identify_lab(ex_a_ai, ex_a_human, "x")
    assert result.status == "point-identified"
    assert result.params.alpha == F(1, 2)
    assert result.params.u_vector() == (F(1), F(2, 3), F(1, 3))
    assert result.params.v_vector() == (F(1), F(2), F(3))
    assert result.recovered_autonomous.table == ex_a_autonomous.table
    assert result.params == ex_a_params
    announce(1, started, 1.0, "lab example reproduced exactly in rational mode")


def test_criterion_2_field_golden(ex_b_ai, ex_b_params):
    started = time.perf_counter()

    def roots(target, ref):
        poly = identification_polynomial(ex_b_ai, "x", target, *ref)
        from lam import candidate_utilities

        return candidate_utilities(poly, ex_b_ai)

    cs_y = roots("y", ("z", "t"))
    assert set(cs_y.admissible) == {F(2), F(4, 5), F(263, 196)}
    cs_z = roots("z", ("y", "t"))
    assert set(cs_z.admissible) == {F(4), F(2, 5), F(481, 244)}
    cs_t = roots("t", ("y", "z"))
    assert set(cs_t.admissible) == {F(5), F(1, 5)}
    assert [(r.value, r.reason) for r in cs_t.rejected] == [
        (F(2), "denominator-vanishing")
    ]

    result = identify_field(ex_b_ai, "x")
    assert result.status == "identified-up-to-swap"

    tables = {
        "y": {
            (frozenset({F(2), F(4, 5)}), (F(1, 4), F(3, 4)), True),
            (frozenset({F(2), F(263, 196)}), (F(35, 86), F(51, 86)), True),
            (frozenset({F(4, 5), F(263, 196)}), (F(-35, 118), F(153, 118)), False),
        },
        "z": {
            (frozenset({F(4), F(2, 5)}), (F(1, 4), F(3, 4)), True),
            (frozenset({F(4), F(481, 244)}), (F(9, 154), F(145, 154)), True),
            (frozenset({F(2, 5), F(481, 244)}), (F(-3, 142), F(145, 142)), False),
        },
        "t": {(frozenset({F(5), F(1, 5)}), (F(1, 4), F(3, 4)), True)},
    }
    for alt, want in tables.items():
        got = {
            (frozenset(row.pair), row.implied.values, row.implied.feasible)
            for row in result.consistency[alt]
        }
        assert got == want

    assert result.alpha_pair == (F(3, 4), F(1, 4))
    assert result.primary.u_vector() == (F(1), F(2), F(4), F(5))
    assert result.primary.v_vector() == (F(1), F(4, 5), F(2, 5), F(1, 5))
    assert result.primary == ex_b_params
    assert result.swapped == ex_b_params.swapped()
    announce(2, started, 5.0, "field example reproduced exactly in rational mode")


def test_criterion_3_lab_round_trip():
    started = time.perf_counter()
    rng = random.Random(202503)
    instances = []
    while len(instances) < 500:
        params = gen.random_params(rng, rng.choice([3, 4, 5]))
        if 0 < params.alpha < 1:
            instances.append(params)

    for params in instances:
        ai, human = gen.forward_pair(params)
        result = identify_lab(ai, human, params.anchor)
        assert result.status == "point-identified"
        assert result.params == params  # exact rational equality

    worst = 0.0
    for params in instances:
        fl = params.as_float()
        ai, human = gen.forward_pair(fl)
        result = identify_lab(ai, human, fl.anchor)
        assert result.status == "point-identified"
        got = result.params
        err = max(
            abs(got.alpha - fl.alpha),
            max(abs(got.u[a] - fl.u[a]) for a in fl.universe.alternatives),
            max(abs(got.v[a] - fl.v[a]) for a in fl.universe.alternatives),
        )
        worst = max(worst, err)
    assert worst < 1e-8
    announce(3, started, 60.0, f"500 exact + float round trips, float error {worst:.2e}")


def _certify_non_generic(params, result):
    """Exact-arithmetic certificates that a draw sits outside the generic set."""
    uni = params.universe
    anchor = params.anchor
    targets = [a for a in uni.alternatives if a != anchor]
    rho = lam_table(params, uni.all_menus(2))
    reasons = []
    for y in targets:
        if params.u[y] == params.v[y]:
            reasons.append(f"u({y}) equals v({y})")
    true_pair = tuple(sorted((params.alpha, 1 - params.alpha)))
    for y in targets:
        others = [b for b in targets if b != y]
        for z, t in combinations(others, 2):
            poly = identification_polynomial(rho, anchor, y, z, t)
            if poly.is_zero():
                continue
            for w in (params.u[y], params.v[y]):
                if any(w == p for p in poly.pole_values()):
                    reasons.append(
                        f"true utility for {y} sits on a denominator zero"
                    )
    for y, sets in result.candidates.items():
        truth = {params.u[y], params.v[y]}
        for cs in sets:
            for pair in combinations(cs.admissible, 2):
                if set(pair) == truth:
                    continue
                ia = implied_alpha(rho, anchor, y, pair)
                if ia.feasible and ia.values == true_pair:
                    reasons.append(
                        f"a spurious pair for {y} implies the true compliance pair"
                    )
    return reasons


def test_criterion_4_field_round_trip():
    started = time.perf_counter()
    rng = random.Random(777)
    failures = []
    for i in range(200):
        alpha = gen.random_alpha_generic(rng, margin=F(1, 20))
        params = gen.random_params(rng, rng.choice([4, 5]), alpha=alpha)
        rho = lam_table(params, params.universe.all_menus(2))
        result = identify_field(rho, params.anchor)
        if result.status == "identified-up-to-swap" and params in (
            result.primary,
            result.swapped,
        ):
            continue
        reasons = _certify_non_generic(params, result)
        failures.append((i, result.status, reasons))
        print(f"  field round-trip failure #{i}: {result.status}; certified: {reasons}")
        assert reasons, f"failure #{i} is not certifiably non-generic: {result.reason}"
    assert len(failures) <= 2, f"{len(failures)} failures out of 200 exceeds 1%"
    announce(
        4,
        started,
        120.0,
        f"200 exact swap-class round trips, {len(failures)} certified non-generic failures",
    )


def test_criterion_5_axiom_equivalence():
    started = time.perf_counter()
    rng = random.Random(555)
    disagreements = 0

    for i in range(250):
        params = gen.random_params(rng, rng.choice([3, 4]))
        ai, human = (t.as_float() for t in gen.forward_pair(params))
        report = check_axioms(ai, human)
        result = identify_lab(ai, human, params.anchor)
        assert report.overall, f"axioms failed on mixture-generated pair {i}"
        assert result.status != "inconsistent"
        disagreements += report.overall != (result.status != "inconsistent")

    for i in range(250):
        params = gen.random_params(rng, rng.choice([3, 4]))
        ai, human = (t.as_float() for t in gen.forward_pair(params))
        if rng.random() < 0.5:
            ai = gen.perturb_entry(ai, rng)
        else:
            human = gen.perturb_entry(human, rng)
        report = check_axioms(ai, human)
        result = identify_lab(ai, human, params.anchor)
        assert not report.overall, f"axioms passed on perturbed pair {i}"
        failed = [v for v in report.verdicts().values() if not v.passed]
        assert failed and all(v.witness is not None for v in failed)
        assert result.status == "inconsistent"
        disagreements += report.overall != (result.status != "inconsistent")

    assert disagreements == 0
    announce(5, started, None, "500 pairs, axiom verdicts agree with identification")


def test_criterion_6_closed_forms():
    started = time.perf_counter()
    rng = random.Random(616)
    worst = 0.0
    for _ in range(1000):
        params = gen.random_params(rng, rng.choice([3, 4])).as_float()
        uni = params.universe
        menus = uni.all_menus(2)
        u, v, a = params.u, params.v, params.alpha
        rho_u = luce_table(uni, u, menus)
        rho_v = luce_table(uni, v, menus)
        mix = lam_table(params, menus)
        tuples = list(instability_tuples(uni, menus, canonical=True))
        rng.shuffle(tuples)
        for t in tuples[:12]:
            u_s = sum(u[i] for i in t.menu_s)
            u_t = sum(u[i] for i in t.menu_t)
            v_s = sum(v[i] for i in t.menu_s)
            v_t = sum(v[i] for i in t.menu_t)
            num = u[t.x] * v[t.y] - u[t.y] * v[t.x]

            assert abs(own_instability(rho_u, t)) <= 1e-12
            got = cross_instability(rho_u, rho_v, t)
            worst = max(worst, abs(got - num / (u_s * v_t)))
            got = cross_instability(rho_v, rho_u, t)
            worst = max(worst, abs(got - (-num) / (u_t * v_s)))
            got = composite_instability(rho_u, rho_v, t)
            want = num * (u_t * v_s - u_s * v_t) / (u_s * u_t * v_s * v_t)
            worst = max(worst, abs(got - want))
            got = cross_instability(mix, rho_u, t)
            worst = max(worst, abs(got - (1 - a) * (-num) / (u_t * v_s)))
            got = cross_instability(mix, rho_v, t)
            worst = max(worst, abs(got - a * num / (u_s * v_t)))
            assert worst <= 1e-12
    announce(6, started, None, f"1000 instances, worst closed-form gap {worst:.2e}")


def test_criterion_7_estimation(uni4, ex_b_params):
    started = time.perf_counter()

    # EM ascent on arbitrary data and starts
    rng = random.Random(808)
    for _ in range(5):
        truth = gen.random_params(rng, rng.choice([3, 4])).as_float()
        counts = simulate_counts(
            truth, truth.universe.all_menus(2), 3000, seed=rng.randrange(10**6)
        )
        params = gen.random_params(rng, truth.universe.size).as_float()
        ll = log_likelihood(params, counts)
        for _ in range(80):
            params = em_step(params, counts)
            nxt = log_likelihood(params, counts)
            assert nxt >= ll - 1e-10
            ll = nxt

    # analytic gradient against central differences at 50 random points
    counts = simulate_counts(ex_b_params, uni4.all_menus(2), 2000, seed=8)
    grng = random.Random(9)
    step = 1e-5
    for _ in range(50):
        u = {a: (1.0 if a == "x" else math.exp(grng.uniform(-1, 1))) for a in "xyzt"}
        v = {a: (1.0 if a == "x" else math.exp(grng.uniform(-1, 1))) for a in "xyzt"}
        point = LamParams(uni4, u, v, grng.uniform(0.1, 0.9), "x")
        grad = log_likelihood_gradient(point, counts)

        def moved(key, dh):
            uu, vv, aa = dict(point.u), dict(point.v), point.alpha
            kind, alt = key
            if kind == "log_u":
                uu[alt] *= math.exp(dh)
            elif kind == "log_v":
                vv[alt] *= math.exp(dh)
            else:
                aa = 1 / (1 + math.exp(-(math.log(aa / (1 - aa)) + dh)))
            return LamParams(uni4, uu, vv, aa, "x")

        for key, got in grad.items():
            fd = (
                log_likelihood(moved(key, step), counts)
                - log_likelihood(moved(key, -step), counts)
            ) / (2 * step)
            assert abs(fd - got) <= 1e-6 * max(1.0, abs(got))

    # statistical recovery of the field example parameters
    counts = simulate_counts(ex_b_params, uni4.all_menus(2), 10**5, seed=33)
    fit = fit_mle(counts, inits=4, seed=7, tol_ll=1e-13, max_iter=60000)
    assert fit.monotone, "some EM step decreased the likelihood"
    target = ex_b_params.as_float()
    alpha_err = min(abs(fit.params.alpha - 0.75), abs(fit.params.alpha - 0.25))
    assert alpha_err < 0.03
    util_err = min(
        max(
            max(abs(cand.u[a] - target.u[a]) for a in "xyzt"),
            max(abs(cand.v[a] - target.v[a]) for a in "xyzt"),
        )
        for cand in (fit.params, fit.params.swapped())
    )
    assert util_err < 0.05
    announce(
        7,
        started,
        300.0,
        f"EM monotone, gradients at 50 points, recovery err alpha {alpha_err:.4f} "
        f"util {util_err:.4f}",
    )


def test_criterion_8_coverage_note(ex_a_ai, ex_b_ai):
    started = time.perf_counter()
    # the only exact reference values are the two worked examples, which
    # criteria 1 and 2 reproduce in rational arithmetic; criteria 3-7 are
    # randomized property suites.  This placeholder documents that coverage.
    assert ex_a_ai.is_exact and ex_b_ai.is_exact
    announce(8, started, None, "criteria 1-2 exact worked examples; 3-7 property suites")
