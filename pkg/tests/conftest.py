"""Shared test helpers: seeded random spec generation and rational points."""

from __future__ import annotations

import random
from fractions import Fraction

from snowrep.game_core import RepeatedGameSpec, regime_thresholds


def random_spec(rnd: random.Random, m_range=(2, 9), avoid_knife_edges=False) -> RepeatedGameSpec:
    """A random valid snowdrift spec with small rational payoffs.

    Payoffs are built from positive rational increments so the strict ordering
    holds by construction.  With avoid_knife_edges the draw is rejected when R
    hits any of the exact regime thresholds.
    """
    while True:
        def increment():
            return Fraction(rnd.randint(1, 12), rnd.randint(1, 4))

        P = Fraction(rnd.randint(0, 6), rnd.randint(1, 3))
        S = P + increment()
        R = S + increment()
        T = R + increment()
        m = rnd.randint(*m_range)
        spec = RepeatedGameSpec.of(T, R, S, P, m)
        if avoid_knife_edges:
            th = regime_thresholds(spec)
            if R in (th.alld_vs_tft, th.half_ts, th.stft_vs_tft, th.tft_edge):
                continue
        return spec


def random_rational_point(rnd: random.Random, interior=True, denom=60):
    """A random rational simplex point with denominator dividing denom."""
    while True:
        cuts = sorted(rnd.randint(0, denom) for _ in range(3))
        parts = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], denom - cuts[2]]
        if interior and any(p == 0 for p in parts):
            continue
        return tuple(Fraction(p, denom) for p in parts)
