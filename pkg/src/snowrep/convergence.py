"""Theorem-driven limit prediction, empirical limit matching, separatrix sampling.

Every trajectory of the dynamics converges to a single point, so the analysis
reduces to predicting which equilibrium a start can reach and verifying it
empirically:

  * For R below (T+S)/2 the interior splits into the invariant zones D14/D23
    (whose trajectories reach x14 respectively x23) and the rest, where the
    stable manifold W^s(x_int) of the interior saddle separates the two basins.
  * For intermediate R the limit set depends on the parity of m; the TFT/STFT
    mix disappears and parts of the ALLC/TFT edge take over.
  * For large R every interior trajectory ends at x14 or the Nash segment of
    the ALLC/TFT edge.

Bisection along a segment joining the two basins produces points of
W^s(x_int); their trajectories shadow the manifold into a neighbourhood of
x_int before escaping into one of the D zones.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .game_core import (
    RepeatedGameSpec,
    build_repeated_matrix,
    classify_regime,
    reduce_matrix,
    regime_thresholds,
)
from .dynamics import (
    BOUNDARY,
    CONVERGED,
    D14,
    D23,
    FAILED,
    MAX_TIME,
    STOPPED,
    IntegratorConfig,
    RegimeError,
    integrate,
    integrate_batch,
    ratio_constants,
    zone_of,
    zones_of_batch,
)
from .equilibria import (
    P1,
    P2,
    P3,
    P4,
    VERTEX_POINTS,
    X12,
    X123,
    X13,
    X14,
    X23,
    X24,
    X34,
    X_INT,
    EquilibriumCatalog,
    equilibrium_catalog,
    interior_equilibrium,
)
from .stability import nash_interval_X12

UNMATCHED = "unmatched"

# Priority used to break distance ties when matching: a limit sitting exactly
# on a vertex is reported as the vertex, not as an endpoint of a continuum.
_PRIORITY = {"vertex": 0, "point": 1, "continuum": 2}

_EDGE_LABELS = {
    frozenset((0, 2)): X13,
    frozenset((0, 3)): X14,
    frozenset((1, 2)): X23,
    frozenset((1, 3)): X24,
}


class BisectionError(RuntimeError):
    """Raised when a segment does not bracket two distinct attractors."""


@dataclass(frozen=True)
class LimitPrediction:
    """Admissible limit labels for a start, per its regime and zone.

    alpha_range, when set, restricts an X12 candidate to the Nash sub-interval
    of ALLC shares.  deterministic means the prediction is a single point.
    """

    candidates: tuple[str, ...]
    deterministic: bool
    alpha_range: Optional[tuple[float, float]] = None


def _support(x0) -> tuple[int, ...]:
    return tuple(i for i in range(4) if x0[i] != 0)


def _interior_prediction(x0, spec: RepeatedGameSpec) -> LimitPrediction:
    regime = classify_regime(spec)
    th = regime_thresholds(spec)
    R = spec.payoffs.R

    def nash_range():
        interval = nash_interval_X12(spec)
        if interval is None:
            return None
        return (float(interval[0]), float(interval[1]))

    if regime.theorem_id == 1:
        b = ratio_constants(reduce_matrix(spec))
        zone = zone_of(x0, b)
        if zone == D14:
            return LimitPrediction((X14,), True)
        if zone == D23:
            return LimitPrediction((X23,), True)
        return LimitPrediction((X14, X23, X_INT), False)

    if regime.theorem_id == 2:
        # x_int can be absent inside this band (see interior_equilibrium)
        saddle = (X_INT,) if interior_equilibrium(spec) is not None else ()
        if R == th.half_ts:
            return LimitPrediction((X14,) + saddle + (P2,), False)
        if R < th.tft_edge:
            return LimitPrediction((X14,) + saddle + (X12,), False, nash_range())
        return LimitPrediction((X14, X123, X12), False, nash_range())

    if regime.theorem_id == 3:
        if R == th.half_ts:
            return LimitPrediction((X14, X23, X123), False)
        return LimitPrediction((X14,), True)

    return LimitPrediction((X14, X12), False, nash_range())


def _face_prediction(support: tuple[int, ...], spec: RepeatedGameSpec) -> LimitPrediction:
    """Candidates for a start in the open 2-face spanned by three vertices.

    Sound superset: every catalog equilibrium contained in the closed face,
    plus the face's vertices not already covered by an included continuum.
    """
    face = set(support)
    cat = equilibrium_catalog(spec)
    labels: list[str] = []
    covered: set[int] = set()
    for cont in cat.continua:
        members = {i for i in range(4) if cont.start[i] != 0 or cont.end[i] != 0}
        if members <= face:
            labels.append(cont.label)
            covered |= members
    for eq in cat.points:
        if set(_support(eq.point)) <= face:
            labels.append(eq.label)
    for i in sorted(face - covered):
        labels.append((P1, P2, P3, P4)[i])
    return LimitPrediction(tuple(labels), False)


def _edge_prediction(support: tuple[int, ...], spec: RepeatedGameSpec, x0) -> LimitPrediction:
    i, j = support
    pair = frozenset(support)
    if pair == frozenset((0, 1)):
        alpha = float(x0[0])
        return LimitPrediction((X12,), True, (alpha, alpha))
    if pair == frozenset((2, 3)):
        return LimitPrediction((X34,), True)
    a = reduce_matrix(spec).entries
    if pair == frozenset((1, 2)) and a[2][1] <= 0:
        # TFT dominates the TFT/STFT edge once a'32 <= 0
        return LimitPrediction((P2,), True)
    if pair == frozenset((1, 3)) and a[3][1] <= 0:
        return LimitPrediction((P2,), True)
    return LimitPrediction((_EDGE_LABELS[pair],), True)


def predict_limit(x0, spec: RepeatedGameSpec) -> LimitPrediction:
    """Admissible limits for the trajectory through x0.

    Boundary starts (exact zero coordinates) are confined to their face: edges
    resolve to a single point by the 2-strategy dynamics, 2-faces to the
    catalog equilibria of that face.  Interior starts follow the convergence
    theorem for the regime, refined by the invariant D zones when R < (T+S)/2.
    """
    support = _support(x0)
    if len(support) == 4:
        return _interior_prediction(x0, spec)
    if len(support) == 1:
        return LimitPrediction(((P1, P2, P3, P4)[support[0]],), True)
    if len(support) == 2:
        return _edge_prediction(support, spec, x0)
    return _face_prediction(support, spec)


def run_to_limit(x0, spec: RepeatedGameSpec, cfg: IntegratorConfig = IntegratorConfig()):
    """Integrate until the right-hand side norm drops below cfg.eps_conv.

    Returns (terminal point, status); status "max_time" marks an unresolved run.
    """
    A = build_repeated_matrix(spec)
    traj = integrate(x0, A, cfg)
    return traj.x_end, traj.status


@dataclass(frozen=True)
class MatchResult:
    label: str
    param: Optional[float]  # share of the lower-index strategy for X12/X34
    distance: float


def match_catalog(point, catalog: EquilibriumCatalog, tol: float = 1e-5) -> Optional[MatchResult]:
    """Nearest catalog entry within tol, or None.

    Vertices win distance ties against points, and points against continua, so
    a limit exactly at an endpoint is reported by its most specific label.
    """
    xv = np.asarray(point, dtype=float)
    candidates: list[tuple[float, int, str, Optional[float]]] = []
    for label, vert in VERTEX_POINTS.items():
        d = float(np.linalg.norm(xv - np.array([float(v) for v in vert])))
        candidates.append((d, _PRIORITY["vertex"], label, None))
    for eq in catalog.points:
        d = float(np.linalg.norm(xv - eq.as_floats()))
        candidates.append((d, _PRIORITY["point"], eq.label, None))
    for cont in catalog.continua:
        t, d = cont.project(xv)
        param = 1.0 - t if cont.label in (X12, X34) else t
        candidates.append((d, _PRIORITY["continuum"], cont.label, param))
    winner = min(candidates)
    if winner[0] > tol:
        return None
    return MatchResult(label=winner[2], param=winner[3], distance=winner[0])


def label_consistent(match: MatchResult, prediction: LimitPrediction,
                     alpha_tol: float = 1e-6) -> bool:
    """Whether a matched limit label is admissible under a prediction.

    A vertex match counts as contained in a predicted continuum through it
    (p1/p2 in X12, p3/p4 in X34); X12 matches must respect the Nash alpha
    range when the prediction carries one.
    """
    cands = prediction.candidates
    if match.label in cands:
        if match.label == X12 and prediction.alpha_range is not None:
            lo, hi = prediction.alpha_range
            return lo - alpha_tol <= match.param <= hi + alpha_tol
        return True
    if match.label in (P1, P2) and X12 in cands:
        alpha = 1.0 if match.label == P1 else 0.0
        if prediction.alpha_range is not None:
            lo, hi = prediction.alpha_range
            return lo - alpha_tol <= alpha <= hi + alpha_tol
        return True
    if match.label in (P3, P4) and X34 in cands:
        return True
    return False


# --- seeded interior sampling -------------------------------------------------


def sample_interior(rng: np.random.Generator, n: int) -> np.ndarray:
    """Dirichlet(1,1,1,1)-uniform interior points; exact-zero draws are redrawn."""
    X = rng.dirichlet(np.ones(4), size=n)
    while True:
        bad = (X <= 0.0).any(axis=1)
        if not bad.any():
            return X
        X[bad] = rng.dirichlet(np.ones(4), size=int(bad.sum()))


# --- basin statistics ----------------------------------------------------------


@dataclass(frozen=True)
class BasinRecord:
    start: tuple[float, float, float, float]
    terminal: tuple[float, float, float, float]
    status: str
    label: str
    param: Optional[float]
    t_end: float
    consistent: bool


@dataclass(frozen=True)
class BasinStats:
    counts: dict[str, int]
    n_samples: int
    seed: int
    unresolved: int
    prediction_violations: int
    records: tuple[BasinRecord, ...]


def basin_sample(
    spec: RepeatedGameSpec,
    n_samples: int,
    cfg: IntegratorConfig = IntegratorConfig(),
    seed: int = 0,
    match_tol: float = 1e-5,
) -> BasinStats:
    """Monte-Carlo basin statistics from Dirichlet-uniform interior starts.

    Each converged run is matched against the equilibrium catalog and checked
    against predict_limit for its start; prediction_violations counts matched
    limits outside their admissible set (the convergence theorems say this must
    be zero).
    """
    if n_samples < 0:
        raise ValueError("n_samples must be >= 0")
    catalog = equilibrium_catalog(spec)
    A = build_repeated_matrix(spec)
    counts: dict[str, int] = {}
    records: list[BasinRecord] = []
    unresolved = 0
    violations = 0
    if n_samples == 0:
        return BasinStats(counts, 0, seed, 0, 0, ())

    rng = np.random.default_rng(seed)
    X0 = sample_interior(rng, n_samples)
    Xf, tf, status = integrate_batch(X0, A, cfg)
    for k in range(n_samples):
        st = str(status[k])
        label, param, consistent = UNMATCHED, None, True
        if st == CONVERGED:
            match = match_catalog(Xf[k], catalog, tol=match_tol)
            if match is not None:
                label, param = match.label, match.param
                consistent = label_consistent(match, predict_limit(X0[k], spec))
                if not consistent:
                    violations += 1
            counts[label] = counts.get(label, 0) + 1
        else:
            unresolved += 1
        records.append(BasinRecord(
            start=tuple(float(v) for v in X0[k]),
            terminal=tuple(float(v) for v in Xf[k]),
            status=st,
            label=label,
            param=param,
            t_end=float(tf[k]),
            consistent=consistent,
        ))
    return BasinStats(
        counts=counts,
        n_samples=n_samples,
        seed=seed,
        unresolved=unresolved,
        prediction_violations=violations,
        records=tuple(records),
    )


# --- separatrix bisection -------------------------------------------------------


def _d_zone_stopper(spec: RepeatedGameSpec):
    b = ratio_constants(reduce_matrix(spec))
    b1, b2 = float(b.b1), float(b.b2)

    def stop(X: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            r12 = X[:, 0] / X[:, 1]
            r43 = X[:, 3] / X[:, 2]
        return ((r12 > b2) & (r43 > b1)) | ((r12 < b2) & (r43 < b1))

    return stop


def basin_labels_fast(X0: np.ndarray, spec: RepeatedGameSpec,
                      cfg: IntegratorConfig) -> np.ndarray:
    """Label interior starts x14/x23 by integrating until a D zone is entered.

    Valid in regimes with R < (T+S)/2: the D zones are positively invariant and
    decide the limit, so a zone hit settles the outcome long before numerical
    convergence.  Rows that never leave the undecided region within t_max get
    label None (numerically on the stable manifold).
    """
    if classify_regime(spec).theorem_id != 1:
        raise RegimeError("fast zone labeling needs the R < (T+S)/2 regime")
    A = build_repeated_matrix(spec)
    b = ratio_constants(reduce_matrix(spec))
    # eps_conv=0: a run shadowing the manifold slows near x_int and must not be
    # retired as converged there.
    run_cfg = replace(cfg, eps_conv=0.0)
    Xf, _, status = integrate_batch(X0, A, run_cfg, stop_when=_d_zone_stopper(spec))
    zones = zones_of_batch(np.atleast_2d(Xf), b)
    labels = np.full(len(zones), None, dtype=object)
    labels[zones == D14] = X14
    labels[zones == D23] = X23
    return labels


@dataclass(frozen=True)
class SeparatrixSample:
    """A bisection sample of the stable manifold of the interior saddle."""

    point: tuple[float, float, float, float]
    gap: float  # bracket width after bisection, in state-space norm
    label_low: str
    label_high: str
    approach_distance: float  # closest approach of the sample's trajectory to x_int
    t_low: float
    t_high: float
    seed_a: tuple[float, float, float, float]
    seed_b: tuple[float, float, float, float]


def separatrix_bisect(
    seed_a,
    seed_b,
    spec: RepeatedGameSpec,
    cfg: IntegratorConfig = IntegratorConfig(),
    iters: int = 60,
) -> SeparatrixSample:
    """Bisect the segment [seed_a, seed_b] down to a stable-manifold sample.

    The seeds must converge to x14 and x23 (in either order); the returned
    midpoint lies within gap = 2^-iters * |seed_b - seed_a| of the manifold
    along the segment and its trajectory passes close to x_int before
    escaping.  Segments whose endpoints share a label are rejected.
    """
    interior = interior_equilibrium(spec)
    if interior is None:
        raise RegimeError("separatrix bisection needs an interior saddle")
    a = np.asarray(seed_a, dtype=float)
    bpt = np.asarray(seed_b, dtype=float)
    if np.allclose(a, bpt):
        raise BisectionError("degenerate segment: the seeds coincide")

    catalog = equilibrium_catalog(spec)

    def slow_label(x):
        xf, status = run_to_limit(x, spec, cfg)
        if status != CONVERGED:
            return None
        match = match_catalog(xf, catalog)
        return None if match is None else match.label

    label_a, label_b = slow_label(a), slow_label(bpt)
    if {label_a, label_b} != {X14, X23}:
        raise BisectionError(
            f"seeds must reach x14 and x23, got {label_a!r} and {label_b!r}"
        )

    fast = classify_regime(spec).theorem_id == 1

    def label_at(t: float) -> Optional[str]:
        x = a + t * (bpt - a)
        if fast:
            return basin_labels_fast(x[None, :], spec, cfg)[0]
        return slow_label(x)

    t_lo, t_hi = 0.0, 1.0
    lab_lo, lab_hi = label_a, label_b
    for _ in range(iters):
        t_mid = 0.5 * (t_lo + t_hi)
        lab = label_at(t_mid)
        if lab is None:
            # numerically on the manifold: keep it inside the bracket
            lab = lab_lo
        if lab == lab_lo:
            t_lo = t_mid
        elif lab == lab_hi:
            t_hi = t_mid
        else:
            raise BisectionError(
                f"third attractor {lab!r} on the segment; refusing to bisect"
            )

    t_mid = 0.5 * (t_lo + t_hi)
    point = a + t_mid * (bpt - a)
    gap = (t_hi - t_lo) * float(np.linalg.norm(bpt - a))

    x_int = np.array([float(v) for v in interior.point])
    closest = [np.inf]

    def watch(t, X, active, rhs_norm):
        closest[0] = min(closest[0], float(np.linalg.norm(X[0] - x_int)))
        return False

    watch_cfg = replace(cfg, eps_conv=0.0, sample_every=1)
    A = build_repeated_matrix(spec)
    integrate_batch(point[None, :], A, watch_cfg,
                    observer=watch, stop_when=_d_zone_stopper(spec))

    return SeparatrixSample(
        point=tuple(float(v) for v in point),
        gap=gap,
        label_low=lab_lo,
        label_high=lab_hi,
        approach_distance=closest[0],
        t_low=t_lo,
        t_high=t_hi,
        seed_a=tuple(float(v) for v in a),
        seed_b=tuple(float(v) for v in bpt),
    )


def separatrix_sweep(
    spec: RepeatedGameSpec,
    n_samples: int,
    cfg: IntegratorConfig = IntegratorConfig(),
    iters: int = 60,
    seed: int = 0,
    max_draws: int = 200,
) -> list[SeparatrixSample]:
    """Sample the stable manifold by bisecting random cross-basin segments."""
    rng = np.random.default_rng(seed)
    samples: list[SeparatrixSample] = []
    draws = 0
    while len(samples) < n_samples:
        if draws >= max_draws:
            raise BisectionError(
                f"could not find {n_samples} cross-basin segments in {max_draws} draws"
            )
        draws += 1
        pair = sample_interior(rng, 2)
        labels = basin_labels_fast(pair, spec, cfg)
        if set(labels) != {X14, X23}:
            continue
        samples.append(separatrix_bisect(pair[0], pair[1], spec, cfg, iters))
    return samples
