"""Exact enumeration of equilibrium points and continua per payoff regime.

The equilibrium set of the simplex boundary is, depending on the regime, a
combination of

    X12  the ALLC/TFT edge (every point fixed: equal payoff columns),
    X34  the STFT/ALLD edge (likewise),
    x13, x14, x23, x24  isolated mixed points on the other four edges,
    X123 a segment of the ALLC/TFT/STFT face, present only on two knife-edge
         parameter sets where a'13 = a'23.

When the TFT-vs-STFT ordering a'13 < a'23 holds there is in addition exactly
one interior equilibrium x_int, the intersection point of the two ratio planes
x1/x2 = b2 and x4/x3 = b1 on the invariant line L_int.

All coordinates are exact rationals, so catalog soundness is checked with a
residual that is identically zero rather than merely small.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .game_core import (
    ALLC,
    ALLD,
    STFT,
    TFT,
    RegimeClass,
    ReducedMatrix,
    RepeatedGameSpec,
    classify_regime,
    reduce_matrix,
)
from .dynamics import RatioConstants, RegimeError, ratio_constants, replicator_rhs

RationalPoint = tuple[Fraction, Fraction, Fraction, Fraction]

# Point labels.
P1, P2, P3, P4 = "p1", "p2", "p3", "p4"
X13, X14, X23, X24, X_INT = "x13", "x14", "x23", "x24", "x_int"
# Continuum labels.
X12, X34, X123, L_INT_LABEL = "X12", "X34", "X123", "L_int"

VERTEX_POINTS: dict[str, RationalPoint] = {
    P1: (Fraction(1), Fraction(0), Fraction(0), Fraction(0)),
    P2: (Fraction(0), Fraction(1), Fraction(0), Fraction(0)),
    P3: (Fraction(0), Fraction(0), Fraction(1), Fraction(0)),
    P4: (Fraction(0), Fraction(0), Fraction(0), Fraction(1)),
}


@dataclass(frozen=True)
class Equilibrium:
    label: str
    point: RationalPoint

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.point])


@dataclass(frozen=True)
class Continuum:
    """A line segment of the simplex, parametrized t in [0,1] from start to end.

    For the equilibrium continua X12, X34 and X123 every point has exactly zero
    replicator residual.  The invariant line L_int is also represented this way
    but only its midpoint parameter (x_int) is an equilibrium.
    """

    label: str
    start: RationalPoint
    end: RationalPoint

    def point_at(self, t):
        if isinstance(t, (Fraction, int)):
            return tuple(a + t * (b - a) for a, b in zip(self.start, self.end))
        s = np.array([float(v) for v in self.start])
        e = np.array([float(v) for v in self.end])
        return s + float(t) * (e - s)

    def sample(self, n: int = 101, interior_only: bool = True):
        """n evenly spaced rational parameter values (endpoints excluded by default)."""
        ts = [Fraction(k + 1, n + 1) for k in range(n)] if interior_only else [
            Fraction(k, n - 1) for k in range(n)
        ]
        return [self.point_at(t) for t in ts]

    def project(self, x: np.ndarray) -> tuple[float, float]:
        """Euclidean projection onto the segment: (parameter t, distance)."""
        s = np.array([float(v) for v in self.start])
        e = np.array([float(v) for v in self.end])
        d = e - s
        t = float(np.clip(np.dot(np.asarray(x, dtype=float) - s, d) / np.dot(d, d), 0.0, 1.0))
        return t, float(np.linalg.norm(np.asarray(x, dtype=float) - (s + t * d)))


@dataclass(frozen=True)
class EquilibriumCatalog:
    points: tuple[Equilibrium, ...]
    continua: tuple[Continuum, ...]
    regime: RegimeClass

    def point(self, label: str) -> Equilibrium:
        for p in self.points:
            if p.label == label:
                return p
        raise KeyError(label)

    def continuum(self, label: str) -> Continuum:
        for c in self.continua:
            if c.label == label:
                return c
        raise KeyError(label)

    def labels(self) -> tuple[str, ...]:
        return tuple(p.label for p in self.points) + tuple(c.label for c in self.continua)


def _edge_point(label: str, i: int, j: int, wi: Fraction, wj: Fraction) -> Equilibrium:
    total = wi + wj
    point = [Fraction(0)] * 4
    point[i] = wi / total
    point[j] = wj / total
    return Equilibrium(label, tuple(point))


def edge_equilibrium(spec: RepeatedGameSpec, label: str) -> Equilibrium:
    """Closed-form mixed equilibrium on one of the four cross edges.

    Only meaningful in regimes where the point lies in the simplex; callers
    outside those regimes get a ValueError from the positivity check.
    """
    a = reduce_matrix(spec).entries
    if label == X14:
        eq = _edge_point(X14, ALLC, ALLD, a[ALLC][ALLD], a[ALLD][ALLC])
    elif label == X13:
        eq = _edge_point(X13, ALLC, STFT, a[ALLC][STFT], a[STFT][ALLC])
    elif label == X23:
        eq = _edge_point(X23, TFT, STFT, a[TFT][STFT], a[STFT][TFT])
    elif label == X24:
        eq = _edge_point(X24, TFT, ALLD, a[TFT][ALLD], a[ALLD][TFT])
    else:
        raise KeyError(label)
    if any(v < 0 for v in eq.point):
        raise ValueError(f"{label} lies outside the simplex in this regime")
    return eq


def _x123_continuum(spec: RepeatedGameSpec) -> Continuum:
    """The zero set of a'31 x1 + a'32 x2 - a'13 x3 inside the ALLC/TFT/STFT face.

    One endpoint is always x13.  The other sits on the TFT/STFT edge when
    a'32 > 0, on the ALLC/TFT edge when a'32 < 0, and at the TFT vertex when
    a'32 = 0.
    """
    a = reduce_matrix(spec).entries
    a13, a31, a32 = a[ALLC][STFT], a[STFT][ALLC], a[STFT][TFT]
    start = _edge_point(X123, ALLC, STFT, a13, a31).point
    if a32 > 0:
        end = _edge_point(X123, TFT, STFT, a13, a32).point
    elif a32 < 0:
        end = _edge_point(X123, ALLC, TFT, -a32, a31).point
    else:
        end = VERTEX_POINTS[P2]
    return Continuum(X123, start, end)


def boundary_catalog(spec: RepeatedGameSpec) -> EquilibriumCatalog:
    """All boundary equilibria for the spec's regime.

    The ALLC/TFT and STFT/ALLD edges are always continua of equilibria (their
    2x2 payoff blocks have equal columns); the cross-edge points and the X123
    segment appear exactly per the regime case.
    """
    regime = classify_regime(spec)
    case = regime.equilibrium_case

    points = [edge_equilibrium(spec, X13), edge_equilibrium(spec, X14)]
    if case in (1, 2, 3):
        points.append(edge_equilibrium(spec, X23))
    if case == 1:
        points.append(edge_equilibrium(spec, X24))

    continua = [
        Continuum(X12, VERTEX_POINTS[P1], VERTEX_POINTS[P2]),
        Continuum(X34, VERTEX_POINTS[P3], VERTEX_POINTS[P4]),
    ]
    if case in (3, 4):
        continua.append(_x123_continuum(spec))

    points.sort(key=lambda e: e.label)
    return EquilibriumCatalog(tuple(points), tuple(continua), regime)


@dataclass(frozen=True)
class InteriorEquilibrium:
    """The unique interior equilibrium and the invariant line through it."""

    point: RationalPoint
    ratios: RatioConstants
    normalizer: Fraction  # r > 0, the common denominator of the closed form
    line: Continuum  # L_int, from its X12 endpoint to its X34 endpoint


def interior_equilibrium(spec: RepeatedGameSpec) -> Optional[InteriorEquilibrium]:
    """Closed-form interior equilibrium, or None when the regime has none.

    Existence needs the ratio thresholds to cut the open simplex (a'13 < a'23,
    i.e. b1 > 0) and the closed form to land strictly inside it.  The second
    check is not redundant: for R below (T+S)/2 it always holds, but in the
    even-m band (T+S)/2 <= R < tft_edge the stable root of the on-line cubic
    can sit beyond the X12 end of the invariant line (e.g. T,R,S,P =
    97/6, 31/2, 7/2, 3/2 with m=2), and then no interior equilibrium exists:
    on-line trajectories drain into the ALLC/TFT edge instead.
    """
    a = reduce_matrix(spec).entries
    a13, a14 = a[ALLC][STFT], a[ALLC][ALLD]
    a23, a24 = a[TFT][STFT], a[TFT][ALLD]
    a31, a32 = a[STFT][ALLC], a[STFT][TFT]
    a41, a42 = a[ALLD][ALLC], a[ALLD][TFT]
    if a13 >= a23:
        return None

    d1 = a13 * a24 - a14 * a23  # < 0 whenever a'13 < a'23
    d2 = a31 * a42 - a32 * a41
    numerators = (
        (a42 - a32) * d1,
        (a31 - a41) * d1,
        (a24 - a14) * d2,
        (a13 - a23) * d2,
    )
    if any(v <= 0 for v in numerators):
        return None
    r = sum(numerators)
    assert r == d1 * (a31 - a41 + a42 - a32) + d2 * (a13 - a23 + a24 - a14)
    point = tuple(v / r for v in numerators)

    b = ratio_constants(reduce_matrix(spec))
    on_x12 = (b.b2 / (1 + b.b2), 1 / (1 + b.b2), Fraction(0), Fraction(0))
    on_x34 = (Fraction(0), Fraction(0), 1 / (1 + b.b1), b.b1 / (1 + b.b1))
    line = Continuum(L_INT_LABEL, on_x12, on_x34)
    return InteriorEquilibrium(point=point, ratios=b, normalizer=r, line=line)


def equilibrium_catalog(spec: RepeatedGameSpec) -> EquilibriumCatalog:
    """Boundary catalog plus the interior equilibrium when it exists."""
    cat = boundary_catalog(spec)
    interior = interior_equilibrium(spec)
    if interior is None:
        return cat
    points = cat.points + (Equilibrium(X_INT, interior.point),)
    return EquilibriumCatalog(points, cat.continua, cat.regime)


def x123_membership(x, reduced: ReducedMatrix, tol: float = 1e-12) -> bool:
    """Whether x lies on the X123 set: interior of the ALLC/TFT/STFT face with
    a'31 x1 + a'32 x2 - a'13 x3 = 0 (exact for rational x, within tol otherwise)."""
    if x[ALLD] != 0:
        return False
    if any(x[i] <= 0 for i in (ALLC, TFT, STFT)):
        return False
    a = reduced.entries
    value = a[STFT][ALLC] * x[0] + a[STFT][TFT] * x[1] - a[ALLC][STFT] * x[2]
    if isinstance(value, Fraction):
        return value == 0
    return abs(float(value)) <= tol


def residual(x, matrix) -> Fraction | float:
    """Max-norm of the replicator right-hand side; the equilibrium test oracle."""
    return max(abs(v) for v in replicator_rhs(x, matrix))
