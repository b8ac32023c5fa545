"""Sequential search for hidden tail structure over nested cones.

The cones are indexed by the number of jointly-large components: level 1
is "some component is large", level ``l`` is "at least l components are
large simultaneously".  The search fits a tail index and an angular
measure at the current level, asks which deeper levels that measure still
charges, and re-fits at the first uncharged level.  The paper-of-record
decision rule is visual; here it is a numeric surrogate (mass of the
pushforward near zero) with the thresholds exposed, and every run carries
the raw masses so a human can overrule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .data import SampleMatrix, rank_transform
from .errors import HrvError, KTooLargeError, LevelOutOfRangeError
from .spectral import SpectralAtoms, estimate_spectral_rank, estimate_spectral_standard
from .tail import TailFit, hill_estimate

__all__ = [
    "DetectionConfig",
    "DegeneracyResult",
    "LevelReport",
    "DetectionReport",
    "pushforward_M",
    "degeneracy_test",
    "sequential_hrv_search",
]

STOP_REACHED_BOTTOM = "reached_d"
STOP_MASS_ON_SUBCONE = "mass_on_subcone"
STOP_ALPHA_ORDER = "alpha_order_violation"
STOP_NO_TAIL = "no_tail"


@dataclass(frozen=True)
class DetectionConfig:
    """Numeric surrogate for the visual degeneracy rule, plus the tail-order slack.

    ``epsilon`` is the "effectively zero" cut on pushforward components and
    ``cutoff`` the mass fraction below it that counts as degenerate.  Both
    depend on the scale separation the sample can actually express: with a
    small ``n/k`` the spread of a genuinely degenerate pushforward stays
    well above tiny epsilons, so slide them per run and sweep k.
    """

    epsilon: float = 0.05
    cutoff: float = 0.9
    alpha_tolerance: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0.0 < self.cutoff <= 1.0:
            raise ValueError(f"cutoff must be in (0, 1], got {self.cutoff}")
        if self.alpha_tolerance < 0.0:
            raise ValueError("alpha_tolerance must be >= 0")


class WeightedScalars(NamedTuple):
    weights: np.ndarray
    values: np.ndarray


class DegeneracyResult(NamedTuple):
    verdict: str  # "degenerate" | "nondegenerate"
    mass_below_epsilon: float


def pushforward_M(atoms: SpectralAtoms, p: int) -> WeightedScalars:
    """Component-extraction pushforward: each atom maps to its p-th largest entry.

    Only meaningful for ``p`` strictly deeper than the atoms' own level
    (at or above it the value is identically >= 1).
    """
    if not atoms.level < p <= atoms.dim:
        raise LevelOutOfRangeError(
            f"need atoms.level < p <= d, got level={atoms.level}, p={p}, d={atoms.dim}"
        )
    idx = atoms.dim - p
    values = np.partition(atoms.points, idx, axis=1)[:, idx]
    return WeightedScalars(weights=atoms.weights.copy(), values=values)


def degeneracy_test(
    samples: WeightedScalars,
    epsilon: float = 0.05,
    cutoff: float = 0.9,
) -> DegeneracyResult:
    """Degenerate iff at least ``cutoff`` of the mass sits at values <= epsilon."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if not 0.0 < cutoff <= 1.0:
        raise ValueError(f"cutoff must be in (0, 1], got {cutoff}")
    w = np.asarray(samples.weights, dtype=np.float64)
    v = np.asarray(samples.values, dtype=np.float64)
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must have positive total mass")
    mass = float(w[v <= epsilon].sum() / total)
    verdict = "degenerate" if mass >= cutoff else "nondegenerate"
    return DegeneracyResult(verdict=verdict, mass_below_epsilon=mass)


@dataclass(frozen=True)
class LevelReport:
    """What happened at one cone level during the search."""

    level: int
    visited: bool
    fit: TailFit | None = None
    atoms: SpectralAtoms | None = None
    error: str | None = None
    verdicts: dict[int, str] = field(default_factory=dict)
    mass_below_epsilon: dict[int, float] = field(default_factory=dict)
    next_cone_mass: dict[int, float] = field(default_factory=dict)
    alpha_ordered: bool | None = None

    def to_dict(self) -> dict:
        out: dict = {"level": self.level, "visited": self.visited}
        if self.error is not None:
            out["error"] = self.error
        if self.fit is not None:
            out["alpha_hat"] = self.fit.alpha_hat
            out["k"] = self.fit.k
            out["scale_at_k"] = self.fit.scale_at_k
        if self.atoms is not None:
            out["atom_count"] = self.atoms.count
        if self.verdicts:
            out["verdicts"] = {str(p): v for p, v in sorted(self.verdicts.items())}
            out["mass_below_epsilon"] = {
                str(p): self.mass_below_epsilon[p] for p in sorted(self.mass_below_epsilon)
            }
            out["next_cone_mass"] = {
                str(p): self.next_cone_mass[p] for p in sorted(self.next_cone_mass)
            }
        if self.alpha_ordered is not None:
            out["alpha_ordered"] = self.alpha_ordered
        return out


@dataclass(frozen=True)
class DetectionReport:
    """Full record of a sequential search: one entry per cone level."""

    mode: str
    k: int
    config: DetectionConfig
    levels: tuple[LevelReport, ...]
    stop_reason: str
    stop_level: int

    def level(self, l: int) -> LevelReport:
        return self.levels[l - 1]

    def fitted_levels(self) -> list[LevelReport]:
        return [entry for entry in self.levels if entry.visited and entry.fit is not None]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "k": self.k,
            "config": {
                "epsilon": self.config.epsilon,
                "cutoff": self.config.cutoff,
                "alpha_tolerance": self.config.alpha_tolerance,
            },
            "stop_reason": self.stop_reason,
            "stop_level": self.stop_level,
            "levels": [entry.to_dict() for entry in self.levels],
        }


def _fit_level(sample: SampleMatrix, mode: str, level: int, k: int) -> tuple[TailFit, SpectralAtoms]:
    if mode == "standard":
        fit = hill_estimate(sample.level_values(level), k)
        atoms = estimate_spectral_standard(sample, level, k)
    else:
        fit = hill_estimate(rank_transform(sample, level).values, k)
        atoms = estimate_spectral_rank(sample, level, k)
    return fit, atoms


def sequential_hrv_search(
    sample: SampleMatrix,
    mode: str = "rank",
    k: int = 100,
    config: DetectionConfig | None = None,
) -> DetectionReport:
    """Walk the nested cones from level 1, fitting where structure can exist.

    At each fitted level the angular atoms are pushed to every deeper level
    ``p``; let ``p*`` be the deepest nondegenerate one.  Mass reaching
    ``p*`` forecloses hidden structure on everything up to ``p*``, so the
    next candidate is ``p* + 1``.  The walk stops when mass reaches the
    bottom cone, the bottom is fitted, a fit fails, or a fitted tail index
    drops below its predecessor by more than the configured slack.
    """
    if mode not in ("standard", "rank"):
        raise ValueError(f"mode must be 'standard' or 'rank', got {mode!r}")
    if not 1 <= k < sample.n:
        raise KTooLargeError(f"need 1 <= k < n, got k={k}, n={sample.n}")
    cfg = config or DetectionConfig()
    d = sample.d

    reports: dict[int, LevelReport] = {}
    stop_reason = STOP_REACHED_BOTTOM
    stop_level = 1
    previous_fit: TailFit | None = None
    level = 1
    while level <= d:
        stop_level = level
        try:
            fit, atoms = _fit_level(sample, mode, level, k)
        except HrvError as exc:
            reports[level] = LevelReport(level=level, visited=True, error=f"{type(exc).__name__}: {exc}")
            stop_reason = STOP_NO_TAIL
            break

        alpha_ordered: bool | None = None
        if previous_fit is not None:
            alpha_ordered = fit.alpha_hat >= previous_fit.alpha_hat - cfg.alpha_tolerance

        verdicts: dict[int, str] = {}
        masses: dict[int, float] = {}
        positive: dict[int, float] = {}
        prev_positive = np.inf
        for p in range(level + 1, d + 1):
            pushed = pushforward_M(atoms, p)
            result = degeneracy_test(pushed, cfg.epsilon, cfg.cutoff)
            verdicts[p] = result.verdict
            masses[p] = result.mass_below_epsilon
            pos = float(pushed.weights[pushed.values > 0].sum())
            # components shrink with p, so charged mass cannot grow
            assert pos <= prev_positive + 1e-12
            prev_positive = pos
            positive[p] = pos

        reports[level] = LevelReport(
            level=level,
            visited=True,
            fit=fit,
            atoms=atoms,
            verdicts=verdicts,
            mass_below_epsilon=masses,
            next_cone_mass=positive,
            alpha_ordered=alpha_ordered,
        )

        if alpha_ordered is False:
            stop_reason = STOP_ALPHA_ORDER
            break
        previous_fit = fit

        if level == d:
            stop_reason = STOP_REACHED_BOTTOM
            break
        p_star = max((p for p, v in verdicts.items() if v == "nondegenerate"), default=level)
        if p_star == d:
            stop_reason = STOP_MASS_ON_SUBCONE
            break
        level = p_star + 1

    entries = tuple(
        reports.get(l, LevelReport(level=l, visited=False)) for l in range(1, d + 1)
    )
    return DetectionReport(
        mode=mode,
        k=k,
        config=cfg,
        levels=entries,
        stop_reason=stop_reason,
        stop_level=stop_level,
    )
