"""Population-level analytics: average payoff, cooperation level, closed-form gaps.

Two scalar measures compare population states: the average population payoff
x^T A x, and the average cooperation level

    x_C = sum_ij x_i x_j C_ij / (2m)

where C_ij counts the cooperative moves by both players when strategies i and
j meet for m rounds.  At the ALLC/ALLD mix x14 only the ALLC players cooperate,
so x_C = (S-P)/(S-P+T-R); on the ALLC/TFT edge everybody cooperates and
x_C = 1.

The closed-form gaps between equilibria (evaluated here exactly) are what the
R-sweep tabulates: TFT/STFT coexistence beats ALLC/ALLD coexistence in both
payoff and cooperation whenever it exists, and the Nash part of the ALLC/TFT
edge beats ALLC/ALLD by m(T-R)(R-S)/(T-R+S-P).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .game_core import (
    CoopCounts,
    PayoffMatrix,
    RepeatedGameSpec,
    SnowdriftViolation,
    _Matrix4,
    as_fraction,
    build_repeated_matrix,
    cooperation_counts,
    reduce_matrix,
    regime_thresholds,
)
from .dynamics import RegimeError, _is_exact, utility
from .equilibria import (
    X12,
    X34,
    equilibrium_catalog,
)
from .stability import nash_interval_X12


def average_payoff(x, A: _Matrix4):
    """Average population payoff x^T A x."""
    return utility(x, x, A)


def cooperation_level(x, counts: CoopCounts):
    """Population-weighted fraction of cooperative moves per m-round match."""
    denom = 2 * counts.m
    if _is_exact(x):
        return sum(
            x[i] * x[j] * Fraction(counts.C[i][j], denom)
            for i in range(4)
            for j in range(4)
        )
    return float(
        sum(
            float(x[i]) * float(x[j]) * counts.C[i][j] / denom
            for i in range(4)
            for j in range(4)
        )
    )


def gap_x23_x14(spec: RepeatedGameSpec) -> tuple[Fraction, Fraction]:
    """Closed-form (payoff gap, cooperation gap) of x23 over x14.

    Defined whenever the TFT/STFT edge point lies in the simplex (a'32 >= 0);
    both gaps are positive, with parity-dependent prefactors.
    """
    a = reduce_matrix(spec).entries
    if a[2][1] < 0:
        raise RegimeError("x23 lies outside the simplex in this regime")
    T, R, S, P = spec.payoffs.as_tuple()
    m = spec.m
    denom = T - R + S - P
    if m % 2 == 0:
        payoff_gap = Fraction(m * (S - T) ** 2, 4 * denom)
        coop_gap = Fraction(T - S, 2 * denom)
    else:
        payoff_gap = Fraction((m * m - 1) * (S - T) ** 2, 4 * m * denom)
        coop_gap = Fraction((m - 1) * (T - S), 2 * m * denom)
    return payoff_gap, coop_gap


def gap_xalpha_x14(spec: RepeatedGameSpec) -> Fraction:
    """Payoff advantage of any Nash point of the ALLC/TFT edge over x14.

    Independent of the position on the edge: every ALLC/TFT mix earns m*R
    against itself.  Requires the Nash part of the edge to be nonempty.
    """
    if nash_interval_X12(spec) is None:
        raise RegimeError("the ALLC/TFT edge has no Nash points in this regime")
    T, R, S, P = spec.payoffs.as_tuple()
    return Fraction(spec.m * (T - R) * (R - S), T - R + S - P)


@dataclass(frozen=True)
class MetricsRow:
    R: Fraction
    label: str
    avg_payoff: Fraction
    coop_level: Fraction


def sweep_R(
    T, S, P, m: int, R_grid: Iterable
) -> list[MetricsRow]:
    """Evaluate payoff and cooperation at every catalog equilibrium over an R grid.

    Analytics are evaluated at the exact catalog coordinates (no integration).
    The constant-metric continua X12 and X34 get one row each; grid values that
    violate T > R > S are skipped with a warning.  Rows are ordered by (R, label).
    """
    T, S, P = as_fraction(T), as_fraction(S), as_fraction(P)
    rows: list[MetricsRow] = []
    for R in R_grid:
        R = as_fraction(R)
        try:
            spec = RepeatedGameSpec.of(T, R, S, P, m)
        except SnowdriftViolation as err:
            warnings.warn(f"skipping R={R}: {err}")
            continue
        A = build_repeated_matrix(spec)
        counts = cooperation_counts(m)
        cat = equilibrium_catalog(spec)
        for eq in cat.points:
            rows.append(MetricsRow(
                R=R,
                label=eq.label,
                avg_payoff=average_payoff(eq.point, A),
                coop_level=cooperation_level(eq.point, counts),
            ))
        for cont in cat.continua:
            if cont.label not in (X12, X34):
                continue  # metrics vary along X123; no single row represents it
            point = cont.start
            rows.append(MetricsRow(
                R=R,
                label=cont.label,
                avg_payoff=average_payoff(point, A),
                coop_level=cooperation_level(point, counts),
            ))
    rows.sort(key=lambda r: (r.R, r.label))
    return rows


def sweep_csv(rows: Sequence[MetricsRow]) -> str:
    """Plot-ready CSV with header R,label,avg_payoff,coop_level."""
    lines = ["R,label,avg_payoff,coop_level"]
    for row in rows:
        lines.append(
            f"{float(row.R)!r},{row.label},{float(row.avg_payoff)!r},{float(row.coop_level)!r}"
        )
    return "\n".join(lines) + "\n"
