"""Serialization of catalogs, trajectories and statistics to CSV/JSON-ready forms.

Rationals serialize as exact "p/q" strings; floats use repr() so that a given
config and seed always produce byte-identical output.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .game_core import (
    RepeatedGameSpec,
    build_repeated_matrix,
    classify_regime,
    cooperation_counts,
    reduce_matrix,
    sign_structure,
)
from .dynamics import Trajectory, ratio_constants, zone_of, zones_of_batch
from .equilibria import EquilibriumCatalog, InteriorEquilibrium, interior_equilibrium
from .convergence import BasinStats, SeparatrixSample
from .metrics import average_payoff, cooperation_level


def rational_str(v: Fraction) -> str:
    return str(v)


def point_strs(point) -> list[str]:
    return [str(v) for v in point]


def classify_report(spec: RepeatedGameSpec) -> dict:
    regime = classify_regime(spec)
    signs = sign_structure(spec)
    b = ratio_constants(reduce_matrix(spec))
    return {
        "payoffs": {
            "T": str(spec.payoffs.T),
            "R": str(spec.payoffs.R),
            "S": str(spec.payoffs.S),
            "P": str(spec.payoffs.P),
        },
        "m": spec.m,
        "sign_case": signs.case_id,
        "sign_tags": {f"a{i + 1}{j + 1}": tag for (i, j), tag in sorted(signs.tags.items())},
        "equilibrium_case": regime.equilibrium_case,
        "theorem": regime.theorem_id,
        "parity": regime.parity,
        "boundary_equalities": sorted(regime.boundary_equalities),
        "b1": str(b.b1),
        "b2": str(b.b2),
    }


def catalog_report(spec: RepeatedGameSpec) -> dict:
    from .equilibria import equilibrium_catalog

    cat = equilibrium_catalog(spec)
    interior = interior_equilibrium(spec)
    doc = {
        "regime": {
            "equilibrium_case": cat.regime.equilibrium_case,
            "theorem": cat.regime.theorem_id,
            "parity": cat.regime.parity,
            "boundary_equalities": sorted(cat.regime.boundary_equalities),
        },
        "points": [
            {"label": eq.label, "coords": point_strs(eq.point)} for eq in cat.points
        ],
        "continua": [
            {
                "label": cont.label,
                "start": point_strs(cont.start),
                "end": point_strs(cont.end),
            }
            for cont in cat.continua
        ],
    }
    if interior is not None:
        doc["interior_line"] = {
            "label": interior.line.label,
            "start": point_strs(interior.line.start),
            "end": point_strs(interior.line.end),
            "b1": str(interior.ratios.b1),
            "b2": str(interior.ratios.b2),
            "normalizer": str(interior.normalizer),
        }
    return doc


TRAJECTORY_HEADER = "t,x1,x2,x3,x4,ratio12,ratio43,zone,avg_payoff,coop_level"


def trajectory_csv(traj: Trajectory, spec: RepeatedGameSpec) -> str:
    """One row per recorded sample, with the two tracked ratios, the zone label
    and the population analytics."""
    A = build_repeated_matrix(spec)
    Af = A.as_array()
    counts = cooperation_counts(spec.m)
    b = ratio_constants(reduce_matrix(spec))
    zones = zones_of_batch(traj.states, b)
    Cf = np.array(counts.C, dtype=float) / (2 * spec.m)

    lines = [TRAJECTORY_HEADER]
    with np.errstate(divide="ignore", invalid="ignore"):
        for t, x, zone in zip(traj.times, traj.states, zones):
            r12 = float(x[0] / x[1])  # inf/nan on the boundary, suppressed above
            r43 = float(x[3] / x[2])
            payoff = float(x @ Af @ x)
            coop = float(x @ Cf @ x)
            cells = [float(t), float(x[0]), float(x[1]), float(x[2]), float(x[3]),
                     r12, r43]
            lines.append(
                ",".join(repr(v) for v in cells) + f",{zone},{payoff!r},{coop!r}"
            )
    return "\n".join(lines) + "\n"


def basin_report(stats: BasinStats, include_records: bool = False) -> dict:
    doc = {
        "n_samples": stats.n_samples,
        "seed": stats.seed,
        "counts": dict(sorted(stats.counts.items())),
        "unresolved": stats.unresolved,
        "prediction_violations": stats.prediction_violations,
    }
    if include_records:
        doc["records"] = [
            {
                "start": [repr(v) for v in rec.start],
                "terminal": [repr(v) for v in rec.terminal],
                "status": rec.status,
                "label": rec.label,
                "param": None if rec.param is None else repr(rec.param),
                "t_end": repr(rec.t_end),
                "consistent": rec.consistent,
            }
            for rec in stats.records
        ]
    return doc


SEPARATRIX_HEADER = "index,x1,x2,x3,x4,gap,approach_distance,label_low,label_high"


def separatrix_csv(samples: Sequence[SeparatrixSample]) -> str:
    lines = [SEPARATRIX_HEADER]
    for k, s in enumerate(samples):
        x = s.point
        lines.append(
            f"{k},{x[0]!r},{x[1]!r},{x[2]!r},{x[3]!r},"
            f"{s.gap!r},{s.approach_distance!r},{s.label_low},{s.label_high}"
        )
    return "\n".join(lines) + "\n"
