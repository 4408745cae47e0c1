"""Nash and evolutionary-stability checks, and the interior-saddle spectrum.

A state is in Nash equilibrium with itself when x^T A x >= y^T A x for every
mixed y; since y -> y^T A x is linear it suffices to compare against the four
vertices.  Evolutionary stability adds the tie-breaking condition
x^T A y > y^T A y for every y != x with equal payoff against x; that condition
is checked by sampling the equality face, which here is always a sub-simplex
spanned by the best-response vertices.

The reduced 3-variable Jacobian (eliminating x4 = 1 - x1 - x2 - x3) is
computed analytically, exactly so for rational points, with a forward-difference
version kept as a cross-check.  At the interior equilibrium the characteristic
polynomial lambda^3 + a lambda^2 + b lambda + c satisfies c = a*b with
a > 0 > b, so the eigenvalues are -a and +/- sqrt(-b): a hyperbolic saddle
with a two-dimensional stable manifold.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .game_core import (
    ALLC,
    ALLD,
    STFT,
    TFT,
    RepeatedGameSpec,
    _Matrix4,
    build_repeated_matrix,
    reduce_matrix,
    regime_thresholds,
)
from .dynamics import RegimeError, _is_exact
from .equilibria import interior_equilibrium

NASH_TOL = 1e-12


@dataclass(frozen=True)
class NashReport:
    is_nash: bool
    witness: Optional[int]  # best-response vertex when not Nash
    payoff_gap: float  # max_i (Ax)_i - x^T A x


def is_nash(x, matrix: _Matrix4, tol: float = NASH_TOL) -> NashReport:
    """Vertex best-response test; exact when x is rational."""
    if _is_exact(x):
        a = matrix.entries
        fitness = [sum(a[i][j] * x[j] for j in range(4)) for i in range(4)]
        own = sum(x[i] * fitness[i] for i in range(4))
        gaps = [f - own for f in fitness]
        worst = max(range(4), key=lambda i: gaps[i])
        ok = gaps[worst] <= 0
        return NashReport(ok, None if ok else worst, float(gaps[worst]))
    A = matrix.as_array()
    xv = np.asarray(x, dtype=float)
    fitness = A @ xv
    own = float(xv @ fitness)
    worst = int(np.argmax(fitness))
    gap = float(fitness[worst] - own)
    ok = gap <= tol
    return NashReport(ok, None if ok else worst, gap)


def nash_interval_X12(spec: RepeatedGameSpec) -> Optional[tuple[Fraction, Fraction]]:
    """The sub-segment of the ALLC/TFT edge that is Nash, as an interval of the
    ALLC share alpha.

    A point (alpha, 1-alpha, 0, 0) is Nash exactly when both STFT and ALLD earn
    at most zero reduced payoff against it, i.e. when the ratio alpha/(1-alpha)
    is at most q = min(-a'32/a'31, -a'42/a'41).  Returns None when q < 0
    (no Nash points), [0, 0] when q = 0 (only the all-TFT vertex) and
    [0, q/(1+q)] otherwise.  Note q/(1+q) < 1 always: the all-ALLC vertex is
    never Nash because STFT earns a'31 > 0 against it.
    """
    a = reduce_matrix(spec).entries
    q = min(
        Fraction(-a[STFT][TFT], a[STFT][ALLC]),
        Fraction(-a[ALLD][TFT], a[ALLD][ALLC]),
    )
    if q < 0:
        return None
    return (Fraction(0), q / (1 + q))


@dataclass(frozen=True)
class SingletonNashFlags:
    x13: bool
    x24: bool
    x14: bool
    x23: bool


def singleton_nash_flags(spec: RepeatedGameSpec) -> SingletonNashFlags:
    """Which of the four cross-edge points are Nash.

    x13 and x24 never are (ALLD, respectively ALLC, earns strictly more against
    them); x14 always is; x23 is Nash exactly for R < (T+S)/2, plus the odd-m
    knife edge R = (T+S)/2.
    """
    R = spec.payoffs.R
    th = regime_thresholds(spec)
    odd = spec.m % 2 == 1
    x23 = R < th.half_ts or (odd and R == th.half_ts)
    return SingletonNashFlags(x13=False, x24=False, x14=True, x23=x23)


@dataclass(frozen=True)
class EssReport:
    condition1: bool  # Nash condition
    condition2: bool  # stability against equal-payoff invaders (sampled)
    sample_count: int
    witness: Optional[np.ndarray] = None  # invader violating condition 2


def check_ess(
    x,
    matrix: _Matrix4,
    n_samples: int = 10_000,
    seed: int = 0,
    tol: float = NASH_TOL,
) -> EssReport:
    """Sampled evolutionary-stability check.

    Condition 1 is the exact/tolerance vertex test.  Condition 2 draws
    Dirichlet-uniform invaders y from the face spanned by the best-response
    vertices (the polytope where y^T A x = x^T A x) and requires
    x^T A y > y^T A y; samples numerically indistinguishable from x are
    skipped since the condition only quantifies over y != x.
    """
    nash = is_nash(x, matrix, tol)
    if not nash.is_nash:
        return EssReport(False, False, 0)

    A = matrix.as_array()
    xv = np.asarray(x, dtype=float)
    fitness = A @ xv
    own = float(xv @ fitness)
    face = np.flatnonzero(fitness >= own - 1e-9)
    if len(face) <= 1:
        # the equality face is just {x} itself
        return EssReport(True, True, 0)

    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(len(face)), size=n_samples)
    Y = np.zeros((n_samples, 4))
    Y[:, face] = weights
    xAy = Y @ (A.T @ xv)
    yAy = np.einsum("ij,ij->i", Y, Y @ A.T)
    distinct = np.linalg.norm(Y - xv, axis=1) > 1e-6
    bad = distinct & (xAy <= yAy)
    if bad.any():
        return EssReport(True, False, int(distinct.sum()), witness=Y[np.argmax(bad)])
    return EssReport(True, True, int(distinct.sum()))


# --- reduced Jacobian and the interior spectrum -------------------------------


def jacobian_reduced(x, matrix: _Matrix4):
    """Jacobian of the 3-variable system in (x1, x2, x3) with x4 eliminated.

    Rational x and matrix give an exact rational Jacobian (list of lists of
    Fractions); float input gives a float ndarray.
    """
    if _is_exact(x):
        a = matrix.entries
        x4 = [x[0], x[1], x[2], 1 - x[0] - x[1] - x[2]]
        fitness = [sum(a[i][j] * x4[j] for j in range(4)) for i in range(4)]
        avg = sum(x4[i] * fitness[i] for i in range(4))
        rows = []
        for i in range(3):
            row = []
            for j in range(3):
                du_i = a[i][j] - a[i][3]
                dphi = (fitness[j] - fitness[3]) + sum(
                    x4[k] * (a[k][j] - a[k][3]) for k in range(4)
                )
                val = x4[i] * (du_i - dphi)
                if i == j:
                    val += fitness[i] - avg
                row.append(val)
            rows.append(row)
        return rows
    A = matrix.as_array()
    xv = np.asarray(x, dtype=float)
    x4 = np.append(xv[:3], 1.0 - xv[:3].sum())
    fitness = A @ x4
    avg = float(x4 @ fitness)
    J = np.empty((3, 3))
    back = A.T @ x4  # (A^T x)_j, for the quadratic-form derivative
    for i in range(3):
        for j in range(3):
            du_i = A[i, j] - A[i, 3]
            dphi = (fitness[j] - fitness[3]) + (back[j] - back[3])
            J[i, j] = x4[i] * (du_i - dphi)
            if i == j:
                J[i, j] += fitness[i] - avg
    return J


def jacobian_reduced_fd(x, matrix: _Matrix4, step: float = 1e-7) -> np.ndarray:
    """Forward-difference Jacobian of the reduced system; the numeric oracle."""
    A = matrix.as_array()

    def f(y3):
        y = np.append(y3, 1.0 - y3.sum())
        fit = A @ y
        return ((fit - y @ fit) * y)[:3]

    x3 = np.asarray(x, dtype=float)[:3]
    base = f(x3)
    J = np.empty((3, 3))
    for j in range(3):
        bumped = x3.copy()
        bumped[j] += step
        J[:, j] = (f(bumped) - base) / step
    return J


@dataclass(frozen=True)
class InteriorSpectrum:
    """Characteristic coefficients and eigenvalues at the interior equilibrium."""

    a: float
    b: float
    c: float
    eigenvalues: tuple[float, float, float]  # (-a, +sqrt(-b), -sqrt(-b))


def characteristic_coefficients(J) -> tuple:
    """Coefficients (a, b, c) of lambda^3 + a lambda^2 + b lambda + c for a 3x3
    matrix, exact for rational entries."""
    tr = J[0][0] + J[1][1] + J[2][2]
    minors = (
        J[1][1] * J[2][2] - J[1][2] * J[2][1]
        + J[0][0] * J[2][2] - J[0][2] * J[2][0]
        + J[0][0] * J[1][1] - J[0][1] * J[1][0]
    )
    det = (
        J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1])
        - J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0])
        + J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0])
    )
    return (-tr, minors, -det)


def interior_spectrum(spec: RepeatedGameSpec) -> InteriorSpectrum:
    """Eigenvalues {-a, +sqrt(-b), -sqrt(-b)} of the reduced Jacobian at x_int.

    Verifies the saddle signature: a > 0 > b and c = a*b (exactly, in rational
    arithmetic), which forces exactly two negative and one positive eigenvalue.
    """
    interior = interior_equilibrium(spec)
    if interior is None:
        raise RegimeError("no interior equilibrium in this regime")
    A = build_repeated_matrix(spec)
    J = jacobian_reduced(interior.point, A)
    a, b, c = characteristic_coefficients(J)
    assert a > 0 > b, f"saddle signature violated: a={a}, b={b}"
    assert c == a * b, f"characteristic identity c = ab violated: c={c}, ab={a * b}"
    root = float(-b) ** 0.5
    return InteriorSpectrum(
        a=float(a), b=float(b), c=float(c),
        eigenvalues=(-float(a), root, -root),
    )
