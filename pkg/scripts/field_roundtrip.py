#!/usr/bin/env python3
"""Randomized field-identification experiment.

Draws random rational mixture parameters with compliance bounded away
from 0, 1/2, and 1, forward-simulates the AI choice table alone, and
checks that the swap class comes back exactly.  Failures are printed
with their diagnostics; with generic draws they should be rare and
traceable to a non-generic coincidence.
"""

import argparse
import random
import time
from fractions import Fraction as F

from lam import LamParams, Universe, identify_field, lam_table

ALTS = "abcdefgh"


def random_params(rng, n, margin):
    uni = Universe(tuple(ALTS[:n]))
    while True:
        alpha = F(rng.randint(1, 39), 40)
        if min(alpha, 1 - alpha, abs(alpha - F(1, 2))) < margin:
            continue
        u = {a: F(rng.randint(1, 20), rng.randint(1, 20)) for a in uni.alternatives}
        v = {a: F(rng.randint(1, 20), rng.randint(1, 20)) for a in uni.alternatives}
        params = LamParams.normalized(uni, u, v, alpha)
        if len(set(params.ratio().values())) > 1:
            return params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 5])
    ap.add_argument("--margin", type=float, default=0.05,
                    help="distance of compliance from 0, 1/2, and 1")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    margin = F(args.margin).limit_denominator(1000)
    recovered = 0
    failures = []
    started = time.perf_counter()
    for i in range(args.instances):
        params = random_params(rng, rng.choice(args.sizes), margin)
        rho = lam_table(params, params.universe.all_menus(2))
        result = identify_field(rho, params.anchor)
        if result.status == "identified-up-to-swap" and params in (
            result.primary,
            result.swapped,
        ):
            recovered += 1
        else:
            failures.append(i)
            print(f"failure #{i}: status={result.status}")
            print(f"  reason: {result.reason}")
            print(f"  alpha:  {params.alpha}, u={params.u_vector()}, v={params.v_vector()}")

    elapsed = time.perf_counter() - started
    print(f"instances   {args.instances}")
    print(f"recovered   {recovered} ({100 * recovered / args.instances:.1f}%)")
    print(f"failures    {len(failures)}")
    print(f"elapsed     {elapsed:.2f}s")


if __name__ == "__main__":
    main()
