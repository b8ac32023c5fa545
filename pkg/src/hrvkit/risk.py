"""Tail-risk probability estimation for joint exceedances and linear combinations.

Two families of risk regions are covered: "some/all coordinates exceed
their thresholds" (non-compliance via inclusion-exclusion), and "a
positive linear combination exceeds a level" (dike style, two
components).  The semi-parametric estimators plug a fitted tail index and
an atomic angular measure into closed-form integrals, which keeps the
estimates strictly positive wherever the angular measure charges the
queried directions; the rank-empirical comparison estimator counts
points and can hit exact zero.
"""

from __future__ import annotations

import itertools
import math
import warnings as _warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .data import SampleMatrix, inverse_rank_matrix, rank_transform
from .detect import DetectionReport
from .errors import (
    BadAlphaError,
    BadThresholdError,
    DegenerateMassWarning,
    ExtrapolationWarning,
    HrvError,
    InteriorDivergenceWarning,
    KTooLargeError,
    LevelOutOfRangeError,
    NoAtomsError,
)
from .finiteness import interior_exponent_check, LOG_BRANCH_TOL
from .spectral import SpectralAtoms, estimate_spectral_rank, estimate_spectral_standard
from .tail import TailFit, hill_estimate, intermediate_scale

__all__ = [
    "RiskEstimate",
    "MarginalScales",
    "pareto_radial_integral",
    "marginal_tail_probability",
    "marginal_scale_rank",
    "joint_exceedance_semiparam",
    "joint_exceedance_hr",
    "noncompliance_probability",
    "linear_combination_risk",
]


@dataclass(frozen=True)
class RiskEstimate:
    """A tail probability with its decomposition and fitting diagnostics."""

    probability: float
    method: str  # "semiparam" | "rank_empirical" | "marginal"
    components: dict[str, float] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.probability < 0:
            raise BadThresholdError(f"probability must be >= 0, got {self.probability}")

    def to_dict(self) -> dict:
        return {
            "probability": self.probability,
            "method": self.method,
            "components": dict(self.components),
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj


@dataclass(frozen=True)
class MarginalScales:
    """Per-column scale plug-ins and marginal tail indices for rank-mode formulas.

    ``scales[j]`` is the order statistic of column j at rank
    ``ceil(1 / m_(k))`` taken from the level-``level`` rank transform, and
    ``beta_hats[j]`` the column's fitted tail index.
    """

    scales: np.ndarray
    beta_hats: np.ndarray
    order_index: int
    level: int
    k: int


def pareto_radial_integral(power: float, alpha: float, lower: float, upper: float) -> float:
    """Closed form of ``integral_lower^upper r^power * alpha * r^(-alpha-1) dr``.

    Uses the exponent ``e = power - alpha``; near ``e = 0`` the integral
    degenerates to ``alpha * log(upper/lower)`` and the closed form is
    evaluated through ``expm1`` to stay continuous across the switch.
    """
    if alpha <= 0:
        raise BadAlphaError(f"alpha must be > 0, got {alpha}")
    if lower <= 0 or upper <= 0:
        raise BadThresholdError("integration bounds must be > 0")
    if upper <= lower:
        return 0.0
    e = power - alpha
    log_ratio = math.log(upper / lower)
    if abs(e) < LOG_BRANCH_TOL:
        return alpha * log_ratio
    return alpha * lower**e * math.expm1(e * log_ratio) / e


def marginal_tail_probability(column: Iterable[float], k: int, z: float) -> float:
    """Tail extrapolation ``(k/n) * (z / X_(k))^(-alpha_hat)`` with a Hill fit.

    At ``z = X_(k)`` this returns exactly ``k/n``.  Below ``X_(k)`` the
    power-law form is extrapolated outside its anchoring range and a
    warning is emitted.
    """
    if z <= 0:
        raise BadThresholdError(f"threshold must be > 0, got {z}")
    data = np.asarray(column, dtype=np.float64)
    fit = hill_estimate(data, k)
    n = data.size
    if z < fit.scale_at_k:
        _warnings.warn(
            f"threshold {z} below the anchoring order statistic {fit.scale_at_k}; "
            "extrapolating the tail formula inward",
            ExtrapolationWarning,
            stacklevel=2,
        )
    return float((k / n) * (z / fit.scale_at_k) ** (-fit.alpha_hat))


def marginal_scale_rank(
    sample: SampleMatrix,
    k: int,
    level: int = 2,
    k_marginal: int | None = None,
) -> MarginalScales:
    """Rank-based plug-in scales: column order statistics at rank ``ceil(1/m_(k))``.

    ``m_(k)`` is the k-th largest level-``level`` rank value; its reciprocal
    points at the marginal order statistic matching the joint threshold.
    Marginal tail indices come from per-column Hill fits at ``k_marginal``
    (default: ``min(k, n - 1)``); columns whose fit is unavailable (n = 1,
    constant tails) carry NaN.
    """
    n = sample.n
    if not 1 <= k <= n:
        raise KTooLargeError(f"need 1 <= k <= n, got k={k}, n={n}")
    m_k = rank_transform(sample, level).order_stats[k - 1]
    order_index = int(math.ceil(1.0 / m_k))
    order_index = min(order_index, n)
    km = min(k, n - 1) if k_marginal is None else k_marginal
    scales = np.empty(sample.d)
    betas = np.full(sample.d, np.nan)
    for j in range(sample.d):
        col = sample.column(j)
        scales[j] = intermediate_scale(col, order_index)
        if km >= 1:
            try:
                betas[j] = hill_estimate(col, km).alpha_hat
            except HrvError:
                pass
    return MarginalScales(scales=scales, beta_hats=betas, order_index=order_index, level=level, k=k)


def _level_data(sample: SampleMatrix, mode: str, level: int) -> np.ndarray:
    if mode == "standard":
        return sample.level_values(level)
    return rank_transform(sample, level).values


def _fit_for_level(sample: SampleMatrix, mode: str, level: int, k: int) -> TailFit:
    data = _level_data(sample, mode, level)
    return hill_estimate(data, min(k, sample.n - 1))


def joint_exceedance_semiparam(
    sample: SampleMatrix,
    indices: Sequence[int],
    thresholds: Sequence[float],
    k: int,
    mode: str = "rank",
    atoms: SpectralAtoms | None = None,
    tail_fit: TailFit | None = None,
    scales: MarginalScales | None = None,
) -> RiskEstimate:
    """Semi-parametric estimate of ``P[Z^i > t_i for all queried i]``.

    The angular atoms default to the fit at level ``len(indices)``; a
    detection report may justify passing atoms from a shallower level when
    that level's measure still charges the queried cone.  Standard mode
    scales thresholds by the level order statistic; rank mode standardizes
    them through the per-column plug-in scales and marginal indices.
    """
    idx = list(indices)
    t = np.asarray(thresholds, dtype=np.float64)
    if len(idx) != t.size or len(idx) == 0:
        raise BadThresholdError("need one threshold per queried column")
    if len(set(idx)) != len(idx):
        raise BadThresholdError(f"queried columns must be distinct, got {idx}")
    if (t <= 0).any():
        raise BadThresholdError("thresholds must be > 0")
    if any(not 0 <= j < sample.d for j in idx):
        raise LevelOutOfRangeError(f"column indices {idx} outside [0, {sample.d - 1}]")
    if mode not in ("standard", "rank"):
        raise ValueError(f"mode must be 'standard' or 'rank', got {mode!r}")
    if not 1 <= k <= sample.n:
        raise KTooLargeError(f"need 1 <= k <= n, got k={k}, n={sample.n}")

    level = len(idx) if atoms is None else atoms.level
    if level > len(idx):
        raise LevelOutOfRangeError(
            f"atoms at level {level} cannot price a {len(idx)}-way exceedance"
        )
    if atoms is None:
        atoms = (
            estimate_spectral_standard(sample, level, k)
            if mode == "standard"
            else estimate_spectral_rank(sample, level, k)
        )
    if atoms.count == 0:
        raise NoAtomsError("no angular atoms available")
    if tail_fit is None:
        tail_fit = _fit_for_level(sample, mode, level, k)
    alpha = tail_fit.alpha_hat

    theta = atoms.points[:, idx]
    diagnostics: dict = {
        "k": k,
        "mode": mode,
        "level": level,
        "alpha_hat": alpha,
        "warnings": [],
    }

    with np.errstate(divide="ignore", invalid="ignore"):
        if mode == "standard":
            scale = intermediate_scale(sample.level_values(level), k)
            ratios = t[None, :] / (scale * theta)
            diagnostics["scale_at_k"] = scale
        else:
            if scales is None:
                scales = marginal_scale_rank(sample, k, level=level)
            u = (t / scales.scales[idx]) ** scales.beta_hats[idx]
            ratios = u[None, :] / theta
            diagnostics["marginal_scales"] = scales.scales[idx]
            diagnostics["beta_hats"] = scales.beta_hats[idx]
            diagnostics["order_index"] = scales.order_index
        worst = np.max(ratios, axis=1)  # zero component -> inf ratio -> no contribution
        contributions = np.where(np.isfinite(worst), worst ** (-alpha), 0.0)
        # an atom with every queried component infinite prices the region as infinite
        contributions = np.where(worst == 0.0, np.inf, contributions)

    total = float((k / sample.n) * (atoms.weights * contributions).sum())
    if math.isinf(total):
        diagnostics["warnings"].append("atom with all queried components infinite")
    return RiskEstimate(
        probability=total,
        method="semiparam",
        components={"joint": total},
        diagnostics=diagnostics,
    )


def joint_exceedance_hr(
    sample: SampleMatrix,
    thresholds: Sequence[float],
    k: int,
    scales: MarginalScales | None = None,
) -> RiskEstimate:
    """Rank-empirical comparison estimator for a two-column joint exceedance.

    Counts standardized points in the exceedance rectangle; the result is
    always an integer multiple of ``1/n`` and is exactly zero once the
    thresholds outrun the sample.
    """
    if sample.d != 2:
        raise LevelOutOfRangeError("rank-empirical comparison form is two-column only")
    t = np.asarray(thresholds, dtype=np.float64)
    if t.size != 2 or (t <= 0).any():
        raise BadThresholdError("need two positive thresholds")
    if not 1 <= k <= sample.n:
        raise KTooLargeError(f"need 1 <= k <= n, got k={k}, n={sample.n}")
    if scales is None:
        scales = marginal_scale_rank(sample, k, level=2)
    rt = rank_transform(sample, 2)
    m_k = rt.order_stats[k - 1]
    inverse = inverse_rank_matrix(sample)
    u = (t / scales.scales) ** scales.beta_hats
    qualifies = (inverse > m_k * u[None, :]).all(axis=1)
    count = int(qualifies.sum())
    return RiskEstimate(
        probability=count / sample.n,
        method="rank_empirical",
        components={"count": float(count)},
        diagnostics={
            "k": k,
            "order_index": scales.order_index,
            "beta_hats": scales.beta_hats,
            "marginal_scales": scales.scales,
            "warnings": [],
        },
    )


def _applicable_level(report: DetectionReport, j: int):
    """Deepest fitted level <= j whose measure still charges the j-cone."""
    best = None
    for entry in report.fitted_levels():
        if entry.level > j:
            continue
        if entry.level == j or entry.verdicts.get(j) == "nondegenerate":
            if best is None or entry.level > best.level:
                best = entry
    return best


def noncompliance_probability(
    sample: SampleMatrix,
    thresholds: Sequence[float],
    detection: DetectionReport,
    k: int,
) -> RiskEstimate:
    """Inclusion-exclusion estimate of ``P[some coordinate exceeds its threshold]``.

    Each j-way interaction term is priced with the deepest fitted level
    the detection report marks as charging that cone; terms with no such
    level are zeroed with a warning rather than silently dropped.
    """
    d = sample.d
    t = np.asarray(thresholds, dtype=np.float64)
    if t.size != d or (t <= 0).any():
        raise BadThresholdError(f"need {d} positive thresholds")
    if d > 12:
        raise LevelOutOfRangeError("inclusion-exclusion beyond 12 columns is not supported")

    mode = detection.mode
    components: dict[str, float] = {}
    warnings_out: list[str] = []
    total = 0.0
    for j in range(1, d + 1):
        for subset in itertools.combinations(range(d), j):
            key = ",".join(str(c + 1) for c in subset)
            if j == 1:
                value = float(
                    marginal_tail_probability(sample.column(subset[0]), min(k, sample.n - 1), t[subset[0]])
                )
            else:
                entry = _applicable_level(detection, j)
                if entry is None:
                    message = (
                        f"no fitted level charges the {j}-way cone; "
                        f"term P[{key}] set to 0"
                    )
                    warnings_out.append(message)
                    _warnings.warn(message, DegenerateMassWarning, stacklevel=2)
                    value = 0.0
                else:
                    value = joint_exceedance_semiparam(
                        sample,
                        indices=list(subset),
                        thresholds=t[list(subset)],
                        k=k,
                        mode=mode,
                        atoms=entry.atoms,
                        tail_fit=entry.fit,
                    ).probability
            components[key] = value
            total += value if j % 2 == 1 else -value

    probability = max(total, 0.0)
    if total < 0:
        warnings_out.append(f"inclusion-exclusion sum {total} clipped to 0")
    return RiskEstimate(
        probability=probability,
        method="semiparam",
        components=components,
        diagnostics={"k": k, "mode": mode, "warnings": warnings_out},
    )


def linear_combination_risk(
    sample: SampleMatrix,
    gamma: Sequence[float],
    y: float,
    k: int,
    beta_hats: Sequence[float] | None = None,
) -> RiskEstimate:
    """Estimate ``P[gamma1 Z^1 + gamma2 Z^2 > y]`` for a two-column sample.

    Decomposes into the two marginal exceedances, minus the joint
    exceedance, plus an interior term integrating the hidden measure over
    the strip where only the sum is large.  The interior radial integral
    uses the quadrature-verified closed form; its finiteness depends on an
    angular moment that no finite sample can certify, so a concentration
    warning is attached whenever a few atoms dominate.
    """
    if sample.d != 2:
        raise LevelOutOfRangeError("linear-combination risk is developed for two columns")
    g = np.asarray(gamma, dtype=np.float64)
    if g.size != 2 or (g <= 0).any():
        raise BadThresholdError("need two positive combination weights")
    if y <= 0:
        raise BadThresholdError(f"level must be > 0, got {y}")
    if not 1 <= k <= sample.n:
        raise KTooLargeError(f"need 1 <= k <= n, got k={k}, n={sample.n}")

    scales = marginal_scale_rank(sample, k, level=2)
    if beta_hats is not None:
        scales = MarginalScales(
            scales=scales.scales,
            beta_hats=np.asarray(beta_hats, dtype=np.float64),
            order_index=scales.order_index,
            level=scales.level,
            k=scales.k,
        )
    atoms = estimate_spectral_rank(sample, 2, k)
    fit = _fit_for_level(sample, "rank", 2, k)
    alpha = fit.alpha_hat
    b1, b2 = float(scales.beta_hats[0]), float(scales.beta_hats[1])

    km = min(k, sample.n - 1)
    marginal_1 = marginal_tail_probability(sample.column(0), km, y / g[0])
    marginal_2 = marginal_tail_probability(sample.column(1), km, y / g[1])
    joint = joint_exceedance_semiparam(
        sample,
        indices=[0, 1],
        thresholds=[y / g[0], y / g[1]],
        k=k,
        mode="rank",
        atoms=atoms,
        tail_fit=fit,
        scales=scales,
    )

    check = interior_exponent_check((b1, b2), alpha, atoms=atoms)
    phi1 = g[0] * scales.scales[0]
    phi2 = g[1] * scales.scales[1]
    t1 = atoms.points[:, 0]
    t2 = atoms.points[:, 1]
    interior_sum = 0.0
    for w, a1, a2 in zip(atoms.weights, t1, t2):
        if a1 <= 0.0 or a2 <= 0.0 or not (np.isfinite(a1) and np.isfinite(a2)):
            continue  # the radial strip is empty on the axes
        lower = y / (phi1 * a1 + phi2 * a2)
        upper = y / max(phi1 * a1, phi2 * a2)
        radial = pareto_radial_integral(b1 + b2 - 2.0, alpha, lower, upper)
        interior_sum += w * b1 * b2 * a1 ** (b1 - 1.0) * a2 ** (b2 - 1.0) * radial
    interior = (k / sample.n) * interior_sum

    warnings_out = list(check.warnings)
    for message in warnings_out:
        _warnings.warn(message, InteriorDivergenceWarning, stacklevel=2)

    total = marginal_1 + marginal_2 - joint.probability + interior
    return RiskEstimate(
        probability=max(total, 0.0),
        method="semiparam",
        components={
            "marginal_1": marginal_1,
            "marginal_2": marginal_2,
            "joint_both": joint.probability,
            "interior": interior,
        },
        diagnostics={
            "k": k,
            "alpha_hat": alpha,
            "beta_hats": scales.beta_hats,
            "marginal_scales": scales.scales,
            "exponent": check.exponent,
            "branch": check.branch,
            "warnings": warnings_out,
        },
    )
