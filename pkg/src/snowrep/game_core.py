"""Payoff matrices and exact regime classification for the repeated snowdrift game.

The base game is a symmetric 2x2 game with payoffs T (temptation), R (reward),
S (sucker's payoff) and P (punishment) in the snowdrift ordering T > R > S > P.
Repeating the base game for m >= 2 rounds between players using one of the four
reactive strategies

    ALLC = (1,1,1)   always cooperate
    TFT  = (1,1,0)   cooperate first, then copy the opponent's last move
    STFT = (0,1,0)   defect first, then copy the opponent's last move
    ALLD = (0,0,0)   always defect

yields a 4x4 accumulated payoff matrix A.  Subtracting m*R from columns 1-2 and
m*P from columns 3-4 gives a reduced matrix A' with zero 2x2 blocks on the
diagonal; the replicator dynamics are identical under A and A'.

Everything in this module is exact.  Payoffs are `fractions.Fraction` and all
regime thresholds are compared in rational arithmetic, because the parameter
space splits along knife-edge equalities (for instance R = (T+S)/2) that
floating point cannot resolve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

RationalLike = Union[Fraction, int, str]

# Strategy indices, used consistently everywhere (matrices, simplex coordinates,
# serialized output).
ALLC, TFT, STFT, ALLD = 0, 1, 2, 3
STRATEGY_NAMES = ("ALLC", "TFT", "STFT", "ALLD")

# Reactive strategy triples (p, q, r): probability of cooperating in round one,
# after opponent cooperation, and after opponent defection.  All four are
# deterministic, so the entries are 0/1.
REACTIVE_TRIPLES = ((1, 1, 1), (1, 1, 0), (0, 1, 0), (0, 0, 0))

# Names for the exact R-threshold equalities recorded by classify_regime.
EQ_ALLD_TFT = "R=(T+(m-1)P)/m"
EQ_HALF_TS = "R=(T+S)/2"
EQ_STFT_TFT = "R=(ceil(m/2)T+floor(m/2)S)/m"
EQ_TFT_EDGE = "R=(ceil((m-2)/2)S+floor(m/2)T)/(m-1)"

SIGN_PP = "++"
SIGN_P = "+"
SIGN_0 = "0"
SIGN_M = "-"
SIGN_MM = "--"


class SnowdriftViolation(ValueError):
    """Raised when payoffs do not satisfy the strict ordering T > R > S > P."""

    def __init__(self, inequality: str):
        self.inequality = inequality
        super().__init__(f"snowdrift ordering violated: {inequality} fails")


def as_fraction(value: RationalLike) -> Fraction:
    """Convert an int, Fraction, decimal string or 'p/q' string to a Fraction."""
    if isinstance(value, float):
        raise TypeError(
            f"refusing float payoff {value!r}: pass a string or Fraction so the "
            "value is exact"
        )
    return Fraction(value)


@dataclass(frozen=True)
class BasePayoffs:
    """The four snowdrift payoffs as exact rationals."""

    T: Fraction
    R: Fraction
    S: Fraction
    P: Fraction

    @classmethod
    def of(cls, T: RationalLike, R: RationalLike, S: RationalLike,
           P: RationalLike) -> "BasePayoffs":
        return cls(as_fraction(T), as_fraction(R), as_fraction(S), as_fraction(P))

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.T, self.R, self.S, self.P)


def snowdrift_violation(p: BasePayoffs) -> str | None:
    """Return the name of the first violated strict inequality, or None if valid."""
    for name, lhs, rhs in (("T>R", p.T, p.R), ("R>S", p.R, p.S), ("S>P", p.S, p.P)):
        if not lhs > rhs:
            return name
    return None


def validate_snowdrift(p: BasePayoffs) -> None:
    """Raise SnowdriftViolation unless T > R > S > P holds strictly."""
    bad = snowdrift_violation(p)
    if bad is not None:
        raise SnowdriftViolation(bad)


@dataclass(frozen=True)
class RepeatedGameSpec:
    """A snowdrift base game repeated for m >= 2 rounds."""

    payoffs: BasePayoffs
    m: int

    def __post_init__(self):
        validate_snowdrift(self.payoffs)
        if not (isinstance(self.m, int) and self.m >= 2):
            raise ValueError(f"number of rounds must be an integer >= 2, got {self.m}")

    @classmethod
    def of(cls, T: RationalLike, R: RationalLike, S: RationalLike,
           P: RationalLike, m: int) -> "RepeatedGameSpec":
        return cls(BasePayoffs.of(T, R, S, P), m)


class _Matrix4:
    """Immutable 4x4 matrix of exact rationals with a cached float view."""

    __slots__ = ("entries", "_array")

    def __init__(self, rows: Iterable[Iterable[Fraction]]):
        self.entries = tuple(tuple(Fraction(v) for v in row) for row in rows)
        if len(self.entries) != 4 or any(len(r) != 4 for r in self.entries):
            raise ValueError("expected a 4x4 matrix")
        self._array = None

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def as_array(self) -> np.ndarray:
        if self._array is None:
            self._array = np.array(
                [[float(v) for v in row] for row in self.entries], dtype=float
            )
            self._array.setflags(write=False)
        return self._array

    def __eq__(self, other):
        return isinstance(other, _Matrix4) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        rows = "; ".join(" ".join(str(v) for v in row) for row in self.entries)
        return f"{type(self).__name__}([{rows}])"


class PayoffMatrix(_Matrix4):
    """Accumulated m-round payoff matrix in strategy order (ALLC, TFT, STFT, ALLD)."""


class ReducedMatrix(_Matrix4):
    """Payoff matrix after the dynamics-preserving column shifts.

    Column shifts: -m*R on columns 1-2 and -m*P on columns 3-4, leaving zero
    2x2 blocks in the top-left and bottom-right corners.
    """


def build_repeated_matrix(spec: RepeatedGameSpec) -> PayoffMatrix:
    """Accumulated payoffs of each strategy pair over the m rounds.

    The entries follow from deterministic play of the reactive strategies, e.g.
    TFT against STFT alternates single-sided cooperation, collecting
    ceil(m/2)*S + floor(m/2)*T.
    """
    T, R, S, P = spec.payoffs.as_tuple()
    m = spec.m
    hi, lo = (m + 1) // 2, m // 2  # ceil(m/2), floor(m/2)
    return PayoffMatrix([
        [m * R,            m * R,            S + (m - 1) * R, m * S],
        [m * R,            m * R,            hi * S + lo * T, S + (m - 1) * P],
        [T + (m - 1) * R,  hi * T + lo * S,  m * P,           m * P],
        [m * T,            T + (m - 1) * P,  m * P,           m * P],
    ])


def reduce_matrix(spec: RepeatedGameSpec) -> ReducedMatrix:
    """The column-shifted matrix with zero diagonal blocks."""
    T, R, S, P = spec.payoffs.as_tuple()
    m = spec.m
    hi, lo = (m + 1) // 2, m // 2
    zero = Fraction(0)
    return ReducedMatrix([
        [zero,              zero,                      S + (m - 1) * R - m * P, m * (S - P)],
        [zero,              zero,                      hi * S + lo * T - m * P, S - P],
        [T - R,             hi * T + lo * S - m * R,   zero,                    zero],
        [m * (T - R),       T + (m - 1) * P - m * R,   zero,                    zero],
    ])


def shift_column(A: _Matrix4, j: int, c: RationalLike) -> PayoffMatrix:
    """Add the constant c to every entry of column j (0-based).

    Column shifts leave the replicator vector field unchanged, which is how the
    reduced matrix is justified.
    """
    if not 0 <= j <= 3:
        raise ValueError(f"column index must be in 0..3, got {j}")
    c = as_fraction(c)
    rows = [
        [v + c if k == j else v for k, v in enumerate(row)]
        for row in A.entries
    ]
    return PayoffMatrix(rows)


# --- regime thresholds ---------------------------------------------------


@dataclass(frozen=True)
class RegimeThresholds:
    """The exact R-values at which the reduced-matrix sign pattern changes.

    alld_vs_tft = (T+(m-1)P)/m            sign threshold of a'[ALLD][TFT]
    stft_vs_tft = (ceil(m/2)T+floor(m/2)S)/m   sign threshold of a'[STFT][TFT]
    tft_edge    = (ceil((m-2)/2)S+floor(m/2)T)/(m-1)
                                           ordering threshold of a'[ALLC][STFT]
                                           versus a'[TFT][STFT]
    half_ts     = (T+S)/2                  always equals min(stft_vs_tft, tft_edge)
    """

    alld_vs_tft: Fraction
    stft_vs_tft: Fraction
    tft_edge: Fraction
    half_ts: Fraction


def regime_thresholds(spec: RepeatedGameSpec) -> RegimeThresholds:
    T, R, S, P = spec.payoffs.as_tuple()
    m = spec.m
    hi, lo = (m + 1) // 2, m // 2
    return RegimeThresholds(
        alld_vs_tft=Fraction(T + (m - 1) * P, m),
        stft_vs_tft=Fraction(hi * T + lo * S, m),
        tft_edge=Fraction(((m - 1) // 2) * S + lo * T, m - 1),
        half_ts=Fraction(T + S, 2),
    )


@dataclass(frozen=True)
class SignStructure:
    """Sign case (1..7) of the reduced matrix plus per-entry tags.

    Tags mark, within each column, the larger positive entry '++', a positive
    entry '+', an exact zero '0', a negative entry '-', and the more negative
    entry '--'.  Keys are 0-based (row, col) pairs for the 8 off-block entries.
    """

    case_id: int
    tags: dict[tuple[int, int], str]


def sign_structure(spec: RepeatedGameSpec) -> SignStructure:
    """Classify the sign pattern of the reduced matrix by exact comparison of R
    against the regime thresholds."""
    R = spec.payoffs.R
    th = regime_thresholds(spec)
    odd = spec.m % 2 == 1

    if R < th.alld_vs_tft:
        case = 1
    elif R < th.half_ts:
        case = 2
    elif odd:
        if R == th.half_ts:
            case = 3
        elif R <= th.stft_vs_tft:
            case = 4
        else:
            case = 7
    else:
        if R < th.tft_edge:
            case = 5
        elif R == th.tft_edge:
            case = 6
        else:
            case = 7

    tags = {
        (STFT, ALLC): SIGN_P,
        (ALLD, ALLC): SIGN_PP,
        (ALLC, ALLD): SIGN_PP,
        (TFT, ALLD): SIGN_P,
    }
    if case in (1, 2, 5):
        tags[(ALLC, STFT)], tags[(TFT, STFT)] = SIGN_P, SIGN_PP
    elif case in (3, 6):
        tags[(ALLC, STFT)], tags[(TFT, STFT)] = SIGN_PP, SIGN_PP
    else:
        tags[(ALLC, STFT)], tags[(TFT, STFT)] = SIGN_PP, SIGN_P

    if case == 1:
        tags[(STFT, TFT)], tags[(ALLD, TFT)] = SIGN_PP, SIGN_P
    elif case == 2:
        tags[(STFT, TFT)] = SIGN_PP
        tags[(ALLD, TFT)] = SIGN_0 if R == th.alld_vs_tft else SIGN_M
    elif case == 3:
        tags[(STFT, TFT)], tags[(ALLD, TFT)] = SIGN_PP, SIGN_M
    elif case == 4:
        tags[(STFT, TFT)] = SIGN_0 if R == th.stft_vs_tft else SIGN_PP
        tags[(ALLD, TFT)] = SIGN_M
    elif case == 5:
        tags[(STFT, TFT)] = SIGN_0 if R == th.half_ts else SIGN_M
        tags[(ALLD, TFT)] = SIGN_MM
    else:  # cases 6 and 7
        tags[(STFT, TFT)], tags[(ALLD, TFT)] = SIGN_M, SIGN_MM

    return SignStructure(case_id=case, tags=tags)


@dataclass(frozen=True)
class RegimeClass:
    """Which equilibrium case (1..5) and convergence theorem (1..4) govern a spec.

    boundary_equalities records every R-threshold that is hit exactly so that
    knife-edge parameter sets are reported rather than silently resolved.
    """

    equilibrium_case: int
    theorem_id: int
    parity: str  # "even" or "odd"
    boundary_equalities: frozenset[str]


def classify_regime(spec: RepeatedGameSpec) -> RegimeClass:
    R = spec.payoffs.R
    th = regime_thresholds(spec)
    odd = spec.m % 2 == 1

    equalities = set()
    if R == th.alld_vs_tft:
        equalities.add(EQ_ALLD_TFT)
    if R == th.half_ts:
        equalities.add(EQ_HALF_TS)
    if R == th.stft_vs_tft:
        equalities.add(EQ_STFT_TFT)
    if R == th.tft_edge:
        equalities.add(EQ_TFT_EDGE)

    if R < th.alld_vs_tft:
        eq_case = 1
    elif R < th.half_ts:
        eq_case = 2
    elif odd:
        if R == th.half_ts:
            eq_case = 3
        elif R < th.stft_vs_tft:
            eq_case = 2
        else:
            # At R = stft_vs_tft the TFT/STFT edge point coincides with the
            # all-TFT vertex, which the X12 continuum already contains.
            eq_case = 5
    else:
        eq_case = 4 if R == th.tft_edge else 5

    if R < th.half_ts:
        theorem = 1
    elif odd:
        theorem = 3 if R <= th.stft_vs_tft else 4
    else:
        theorem = 2 if R <= th.tft_edge else 4

    return RegimeClass(
        equilibrium_case=eq_case,
        theorem_id=theorem,
        parity="odd" if odd else "even",
        boundary_equalities=frozenset(equalities),
    )


# --- cooperation bookkeeping ----------------------------------------------


def play_rounds(i: int, j: int, m: int) -> list[tuple[bool, bool]]:
    """Trace the deterministic match between strategies i and j for m rounds.

    Returns the per-round (player i cooperates, player j cooperates) moves.
    """
    pi, qi, ri = REACTIVE_TRIPLES[i]
    pj, qj, rj = REACTIVE_TRIPLES[j]
    moves = []
    ci, cj = bool(pi), bool(pj)
    for _ in range(m):
        moves.append((ci, cj))
        ci, cj = bool(qi if cj else ri), bool(qj if ci else rj)
    return moves


@dataclass(frozen=True)
class CoopCounts:
    """C[i][j]: cooperative moves by both players combined when i meets j."""

    C: tuple[tuple[int, ...], ...]
    m: int

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.C[i][j]


def cooperation_counts(m: int) -> CoopCounts:
    """Count cooperative moves for every strategy pairing by tracing the automata."""
    if m < 2:
        raise ValueError(f"number of rounds must be >= 2, got {m}")
    rows = []
    for i in range(4):
        row = []
        for j in range(4):
            moves = play_rounds(i, j, m)
            row.append(sum(int(a) + int(b) for a, b in moves))
        rows.append(tuple(row))
    return CoopCounts(C=tuple(rows), m=m)


def trace_payoff(i: int, j: int, spec: RepeatedGameSpec) -> Fraction:
    """Accumulated payoff of strategy i against j from the round-by-round trace.

    Independent of the closed forms in build_repeated_matrix; used as an oracle.
    """
    T, R, S, P = spec.payoffs.as_tuple()
    total = Fraction(0)
    for ci, cj in play_rounds(i, j, spec.m):
        if ci and cj:
            total += R
        elif ci:
            total += S
        elif cj:
            total += T
        else:
            total += P
    return total
