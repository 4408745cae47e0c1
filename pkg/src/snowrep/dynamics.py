"""Replicator vector field, simplex-preserving integration and zone geometry.

State vectors live on the 4-simplex: shares (x1, x2, x3, x4) of ALLC, TFT,
STFT and ALLD players.  The vector field is

    dx_i/dt = [u(e_i, x) - u(x, x)] * x_i,      u(x, y) = x^T A y.

Two ratios organise the interior dynamics.  With the reduced matrix a',

    d/dt (x1/x2) = [(a'13 - a'23) x3 + (a'14 - a'24) x4] * (x1/x2)
    d/dt (x4/x3) = [(a'41 - a'31) x1 + (a'42 - a'32) x2] * (x4/x3)

so x1/x2 increases exactly where x4/x3 > b1 and x4/x3 increases exactly where
x1/x2 > b2, with b1 = -(a'13-a'23)/(a'14-a'24) and b2 = -(a'42-a'32)/(a'41-a'31).
The two ratio planes cut the open simplex into the zones D14, D23 (positively
invariant) and Y14, Y23, plus the plane pieces and the invariant line L_int.

Rational inputs are evaluated exactly; the integrator works in float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .game_core import (
    ALLC,
    ALLD,
    STFT,
    TFT,
    PayoffMatrix,
    ReducedMatrix,
    _Matrix4,
)

# Zone labels.
D14 = "D14"
D23 = "D23"
Y14 = "Y14"
Y23 = "Y23"
P11 = "P11"
P12 = "P12"
P21 = "P21"
P22 = "P22"
L_INT = "L_int"
BOUNDARY = "boundary"

# Trajectory terminal statuses.
CONVERGED = "converged"
MAX_TIME = "max_time"
FAILED = "failed"
STOPPED = "stopped"  # retired by a stop_when predicate, not by convergence

SIMPLEX_SUM_TOL = 1e-12


class IntegrationError(RuntimeError):
    """Raised when a trajectory leaves the simplex beyond the guard tolerance."""


def _is_exact(x) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in x)


def project_to_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection of arbitrary vectors onto the probability simplex.

    Accepts a single vector or an (n, 4) batch; the standard sort-and-threshold
    construction.
    """
    Y = np.atleast_2d(np.asarray(y, dtype=float))
    u = np.sort(Y, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1) - 1.0
    ks = np.arange(1, Y.shape[1] + 1)
    cond = u - css / ks > 0
    rho = cond.sum(axis=1)
    theta = css[np.arange(len(Y)), rho - 1] / rho
    out = np.clip(Y - theta[:, None], 0.0, None)
    return out[0] if np.asarray(y).ndim == 1 else out


def check_simplex(x, tol: float = SIMPLEX_SUM_TOL) -> None:
    """Validate nonnegative shares summing to 1 within tol."""
    if len(x) != 4:
        raise ValueError(f"expected 4 shares, got {len(x)}")
    if any(v < 0 for v in x):
        raise ValueError(f"negative share in {x}")
    if abs(float(sum(x)) - 1.0) > tol:
        raise ValueError(f"shares sum to {float(sum(x))!r}, not 1")


def utility(x, y, matrix: _Matrix4):
    """Bilinear payoff x^T A y.  Exact when both points are rational."""
    if _is_exact(x) and _is_exact(y):
        a = matrix.entries
        return sum(x[i] * sum(a[i][j] * y[j] for j in range(4)) for i in range(4))
    A = matrix.as_array()
    return float(np.asarray(x, dtype=float) @ A @ np.asarray(y, dtype=float))


def replicator_rhs(x, matrix: _Matrix4):
    """The growth rates [u(e_i,x) - u(x,x)] * x_i for all four strategies.

    Returns a list of Fractions for rational x, otherwise a float ndarray.
    Components sum to zero (exactly in the rational case).
    """
    if _is_exact(x):
        a = matrix.entries
        fitness = [sum(a[i][j] * x[j] for j in range(4)) for i in range(4)]
        avg = sum(x[i] * fitness[i] for i in range(4))
        return [(fitness[i] - avg) * x[i] for i in range(4)]
    A = matrix.as_array()
    xv = np.asarray(x, dtype=float)
    fitness = A @ xv
    avg = xv @ fitness
    return (fitness - avg) * xv


def residual_norm(x, matrix: _Matrix4):
    """Max-norm of the replicator right-hand side; zero exactly at equilibria."""
    rhs = replicator_rhs(x, matrix)
    return max(abs(v) for v in rhs)


# --- ratios and zones -------------------------------------------------------


@dataclass(frozen=True)
class RatioConstants:
    """Exact thresholds b1 (for x4/x3) and b2 (for x1/x2).

    b2 > 0 always; b1 has the sign of a'[TFT][STFT] - a'[ALLC][STFT].
    """

    b1: Fraction
    b2: Fraction


def ratio_constants(reduced: ReducedMatrix) -> RatioConstants:
    a = reduced.entries
    b1 = -Fraction(a[ALLC][STFT] - a[TFT][STFT], a[ALLC][ALLD] - a[TFT][ALLD])
    b2 = -Fraction(a[ALLD][TFT] - a[STFT][TFT], a[ALLD][ALLC] - a[STFT][ALLC])
    return RatioConstants(b1=b1, b2=b2)


def ratio_derivative(x, reduced: ReducedMatrix, which: str):
    """Time derivative of x1/x2 (which="12") or x4/x3 (which="43").

    Requires a strictly interior point: the ratio is undefined otherwise.
    """
    if any(v <= 0 for v in x):
        raise ValueError(f"ratio derivative needs a strictly interior point, got {x}")
    a = reduced.entries
    if which == "12":
        slope = (a[ALLC][STFT] - a[TFT][STFT]) * x[2] + (a[ALLC][ALLD] - a[TFT][ALLD]) * x[3]
        ratio = x[0] / x[1] if _is_exact(x) else float(x[0]) / float(x[1])
    elif which == "43":
        slope = (a[ALLD][ALLC] - a[STFT][ALLC]) * x[0] + (a[ALLD][TFT] - a[STFT][TFT]) * x[1]
        ratio = x[3] / x[2] if _is_exact(x) else float(x[3]) / float(x[2])
    else:
        raise ValueError(f"which must be '12' or '43', got {which!r}")
    if not _is_exact(x):
        slope = float(slope)
    return slope * ratio


def zone_of(x, b: RatioConstants) -> str:
    """Classify a simplex point by the strict ratio-plane inequalities.

    Any exactly-zero coordinate yields "boundary".  When b1 <= 0 the plane
    x4/x3 = b1 misses the open simplex, so D23, Y14, P11, P12, P22 and L_int
    are empty and never returned.
    """
    if any(v == 0 for v in x):
        return BOUNDARY
    r12 = x[0] / x[1]
    r43 = x[3] / x[2]
    if r12 > b.b2:
        if r43 > b.b1:
            return D14
        return P11 if r43 == b.b1 else Y14
    if r12 < b.b2:
        if r43 < b.b1:
            return D23
        return P12 if r43 == b.b1 else Y23
    if r43 > b.b1:
        return P21
    if r43 < b.b1:
        return P22
    return L_INT


def zones_of_batch(X: np.ndarray, b: RatioConstants) -> np.ndarray:
    """Vectorized zone_of for an (n, 4) float array; returns an object array."""
    b1, b2 = float(b.b1), float(b.b2)
    out = np.empty(len(X), dtype=object)
    with np.errstate(divide="ignore", invalid="ignore"):
        r12 = X[:, 0] / X[:, 1]
        r43 = X[:, 3] / X[:, 2]
    boundary = (X == 0.0).any(axis=1)
    out[:] = BOUNDARY
    inner = ~boundary
    hi12, lo12 = r12 > b2, r12 < b2
    hi43, lo43 = r43 > b1, r43 < b1
    out[inner & hi12 & hi43] = D14
    out[inner & lo12 & lo43] = D23
    out[inner & hi12 & lo43] = Y14
    out[inner & lo12 & hi43] = Y23
    out[inner & hi12 & ~hi43 & ~lo43] = P11
    out[inner & lo12 & ~hi43 & ~lo43] = P12
    out[inner & ~hi12 & ~lo12 & hi43] = P21
    out[inner & ~hi12 & ~lo12 & lo43] = P22
    out[inner & ~hi12 & ~lo12 & ~hi43 & ~lo43] = L_INT
    return out


# --- integration -------------------------------------------------------------


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration parameters.

    Fixed-step RK4 keeps trajectories reproducible bit for bit for a given
    config; eps_conv is the max-norm threshold on the right-hand side below
    which a state counts as converged.  sample_every controls how many steps
    lie between recorded samples (and observer callbacks).
    """

    dt: float = 0.01
    t_max: float = 1e4
    eps_conv: float = 1e-10
    renorm: bool = True
    sample_every: int = 10


@dataclass
class Trajectory:
    """Sampled solution of the replicator dynamics."""

    times: np.ndarray
    states: np.ndarray
    status: str
    t_end: float
    x_end: np.ndarray


def _rhs_batch(X: np.ndarray, A: np.ndarray) -> np.ndarray:
    fitness = X @ A.T
    avg = np.einsum("ij,ij->i", X, fitness)
    return (fitness - avg[:, None]) * X


def _rk4_step(X: np.ndarray, A: np.ndarray, dt: float, k1: np.ndarray) -> np.ndarray:
    k2 = _rhs_batch(X + 0.5 * dt * k1, A)
    k3 = _rhs_batch(X + 0.5 * dt * k2, A)
    k4 = _rhs_batch(X + dt * k3, A)
    return X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_batch(
    X0: np.ndarray,
    matrix: _Matrix4,
    cfg: IntegratorConfig = IntegratorConfig(),
    observer: Optional[Callable[[float, np.ndarray, np.ndarray, np.ndarray], Optional[bool]]] = None,
    stop_when: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate many trajectories at once with per-row convergence retirement.

    Returns (X_final, t_final, status) arrays.  The observer, if given, is
    called as observer(t, X, active_mask, rhs_norm) every cfg.sample_every
    steps (and once at t=0); returning True stops the whole run early.
    stop_when, if given, is evaluated on the active rows at the same cadence
    and rows where it returns True are retired with status "stopped" (used for
    early labeling, e.g. once a trajectory enters an invariant zone).

    Coordinates that start at exactly 0 stay pinned at 0 (faces are invariant);
    after each step negative round-off is clipped and rows rescaled to sum 1.
    A row that leaves the simplex by more than 1e-6 before renormalization is
    marked "failed" and retired, which signals that dt is too large.
    """
    A = matrix.as_array()
    X = np.array(X0, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    n = len(X)
    zero_mask = X == 0.0

    t_final = np.full(n, np.nan)
    status = np.full(n, MAX_TIME, dtype=object)
    rhs_norm = np.full(n, np.inf)

    active_idx = np.arange(n)
    dt = cfg.dt
    n_steps = int(np.ceil(cfg.t_max / dt))
    step = 0
    while True:
        t = step * dt
        Xa = X[active_idx]
        k1 = _rhs_batch(Xa, A)
        norms = np.abs(k1).max(axis=1)
        rhs_norm[active_idx] = norms

        done = norms < cfg.eps_conv
        if done.any():
            idx = active_idx[done]
            t_final[idx] = t
            status[idx] = CONVERGED
            active_idx = active_idx[~done]
            Xa = X[active_idx]
            k1 = k1[~done]

        if step % cfg.sample_every == 0:
            if stop_when is not None and len(active_idx) > 0:
                hit = np.asarray(stop_when(Xa), dtype=bool)
                if hit.any():
                    idx = active_idx[hit]
                    t_final[idx] = t
                    status[idx] = STOPPED
                    active_idx = active_idx[~hit]
                    Xa = X[active_idx]
                    k1 = k1[~hit]
            if observer is not None:
                active_mask = np.zeros(n, dtype=bool)
                active_mask[active_idx] = True
                if observer(t, X, active_mask, rhs_norm):
                    break
        if len(active_idx) == 0 or step >= n_steps:
            break

        Xn = _rk4_step(Xa, A, dt, k1)

        bad = (Xn.min(axis=1) < -1e-6) | (np.abs(Xn.sum(axis=1) - 1.0) > 1e-6)
        if bad.any():
            idx = active_idx[bad]
            t_final[idx] = t
            status[idx] = FAILED
            active_idx = active_idx[~bad]
            Xn = Xn[~bad]
            if len(active_idx) == 0:
                break

        if cfg.renorm:
            Xn[zero_mask[active_idx]] = 0.0
            np.clip(Xn, 0.0, None, out=Xn)
            Xn /= Xn.sum(axis=1, keepdims=True)
        X[active_idx] = Xn
        step += 1

    unfinished = status == MAX_TIME
    t_final[unfinished] = step * dt
    if single:
        return X[0], t_final[0], status[0]
    return X, t_final, status


def integrate(
    x0,
    matrix: _Matrix4,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Integrate a single trajectory, recording samples every cfg.sample_every steps."""
    check_simplex(np.asarray(x0, dtype=float), tol=1e-9)
    times: list[float] = []
    states: list[np.ndarray] = []

    def record(t, X, active, rhs_norm):
        times.append(t)
        states.append(X[0].copy())
        return False

    x_end, t_end, st = integrate_batch(
        np.asarray(x0, dtype=float), matrix, cfg, observer=record
    )
    if not times or times[-1] != t_end:
        times.append(float(t_end))
        states.append(np.array(x_end, dtype=float))
    if st == FAILED:
        raise IntegrationError(
            f"state left the simplex at t={t_end:g}; reduce dt (currently {cfg.dt:g})"
        )
    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        status=str(st),
        t_end=float(t_end),
        x_end=np.array(x_end, dtype=float),
    )


# --- edge dynamics -----------------------------------------------------------

EDGE_ALL_FIXED = "all_fixed"
EDGE_STABLE_INTERIOR = "stable_interior"
EDGE_UNSTABLE_INTERIOR = "unstable_interior"
EDGE_FIRST_DOMINATES = "first_dominates"
EDGE_SECOND_DOMINATES = "second_dominates"


@dataclass(frozen=True)
class EdgePortrait:
    """Restricted 2-strategy replicator dynamics on an edge of the simplex."""

    i: int
    j: int
    matrix2: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
    fixed_share_i: Optional[Fraction]  # interior fixed point, share of strategy i
    classification: str

    def fixed_point(self) -> Optional[tuple[Fraction, Fraction, Fraction, Fraction]]:
        if self.fixed_share_i is None:
            return None
        point = [Fraction(0)] * 4
        point[self.i] = self.fixed_share_i
        point[self.j] = 1 - self.fixed_share_i
        return tuple(point)


def edge_dynamics(A: PayoffMatrix, i: int, j: int) -> EdgePortrait:
    """Classify the dynamics restricted to the edge spanned by strategies i and j.

    With alpha = a[i][j] - a[j][j] (gain of i against j) and
    beta = a[j][i] - a[i][i] (gain of j against i), an interior fixed point
    exists at share alpha/(alpha+beta) of strategy i exactly when alpha and
    beta have the same strict sign; it is stable when both are positive.
    """
    if i == j:
        raise ValueError("edge needs two distinct strategies")
    a = A.entries
    alpha = a[i][j] - a[j][j]
    beta = a[j][i] - a[i][i]
    m2 = ((a[i][i], a[i][j]), (a[j][i], a[j][j]))

    if alpha == 0 and beta == 0:
        return EdgePortrait(i, j, m2, None, EDGE_ALL_FIXED)
    if alpha > 0 and beta > 0:
        return EdgePortrait(i, j, m2, Fraction(alpha, alpha + beta), EDGE_STABLE_INTERIOR)
    if alpha < 0 and beta < 0:
        return EdgePortrait(i, j, m2, Fraction(alpha, alpha + beta), EDGE_UNSTABLE_INTERIOR)
    if alpha >= 0 and beta <= 0:
        return EdgePortrait(i, j, m2, None, EDGE_FIRST_DOMINATES)
    return EdgePortrait(i, j, m2, None, EDGE_SECOND_DOMINATES)


# --- dynamics restricted to the invariant line L_int -------------------------


class RegimeError(ValueError):
    """Raised when an operation is evaluated outside its admitting regime."""


@dataclass(frozen=True)
class LineCoefficients:
    """Coefficients of dx2/dt = k (f x2 - g)(r x2 - s) x2 on L_int."""

    k: Fraction
    f: Fraction
    g: Fraction
    r: Fraction
    s: Fraction


def line_coefficients(reduced: ReducedMatrix) -> LineCoefficients:
    a = reduced.entries
    a13, a14 = a[ALLC][STFT], a[ALLC][ALLD]
    a23, a24 = a[TFT][STFT], a[TFT][ALLD]
    a31, a32 = a[STFT][ALLC], a[STFT][TFT]
    a41, a42 = a[ALLD][ALLC], a[ALLD][TFT]
    if a13 >= a23:
        raise RegimeError("the invariant interior line requires a'13 < a'23")
    d1 = a13 * a24 - a14 * a23
    d2 = a31 * a42 - a32 * a41
    r = d1 * (a31 - a41 + a42 - a32) + d2 * (a13 - a23 + a24 - a14)
    # a23 - a13 + a14 - a24 > 0 in the admitting regime, so k > 0; the zeros of
    # the cubic sit at x2 = 0, s/r and g/f.
    k = Fraction(1, (a41 - a31) ** 2 * (a23 - a13 + a14 - a24))
    return LineCoefficients(
        k=k,
        f=a32 - a42 + a41 - a31,
        g=a41 - a31,
        r=r,
        s=d1 * (a31 - a41),
    )


def line_restricted_rhs(x2, reduced: ReducedMatrix):
    """dx2/dt on the invariant line x1 = b2 x2, x4 = b1 x3.

    Only defined in regimes that admit the line (b1 > 0).  Roots sit at 0,
    s/r (the interior equilibrium share of TFT) and g/f.
    """
    c = line_coefficients(reduced)
    if isinstance(x2, (Fraction, int)):
        return c.k * (c.f * x2 - c.g) * (c.r * x2 - c.s) * x2
    return float(c.k) * (float(c.f) * x2 - float(c.g)) * (float(c.r) * x2 - float(c.s)) * x2


def point_on_line(x2: Fraction, b: RatioConstants) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """The point of L_int with TFT share x2 (exact rationals)."""
    if b.b1 <= 0:
        raise RegimeError("L_int requires b1 > 0")
    x1 = b.b2 * x2
    rest = 1 - x1 - x2
    if rest <= 0:
        raise ValueError(f"x2={x2} puts the line point outside the simplex")
    x3 = rest / (1 + b.b1)
    x4 = b.b1 * x3
    return (x1, x2, x3, x4)
