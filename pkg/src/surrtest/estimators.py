"""Treatment-effect estimators on the transported outcome scale.

The chain: fit a conditional-mean surface on the prior study's control arm,
push the current study's (surrogate, covariate) pairs through it, then
contrast arms.  Three estimator families live here:

* gold standard: difference of observed outcome means (needs current outcomes);
* pooled-ignorant: pushes surrogates through a 1-D curve, ignoring the covariate;
* heterogeneity-aware: pushes (surrogate, covariate) through the 2-D surface,
  in four algebraic forms (simple, twostage, pooled, augmented) that are
  asymptotically equivalent; the pooled form is the headline estimator.

Every estimator here is a pure function of immutable inputs; sums are numpy
pairwise sums over arrays in construction order, so results are reproducible
and independent of any outer parallelism.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .data import PairedStudies, StudyArm, TwoArmStudy
from .errors import MissingOutcome, ZeroDenominator
from .smoothing import (
    Bandwidths,
    KernelKind,
    SmoothingConfig,
    nw_curve_many,
    nw_surface_many,
)

__all__ = [
    "Method",
    "EstimateWithSE",
    "Mu0Surface",
    "Mu0Curve",
    "fit_mu0_surface",
    "fit_mu0_curve",
    "transform_arm",
    "m_hat",
    "delta_h_simple",
    "delta_h_twostage",
    "delta_h_pooled",
    "delta_h_aug",
    "sigma_h",
    "sigma_aug",
    "delta_p",
    "delta_gold",
    "pte_ratio",
    "estimate_suite",
]


class Method(enum.Enum):
    GOLD = "gold"
    P = "p"
    H_SIMPLE = "h_simple"
    H_TWOSTAGE = "h_twostage"
    H_POOLED = "h_pooled"
    H_AUG = "h_aug"


@dataclass(frozen=True)
class EstimateWithSE:
    """A point estimate with its standard error and provenance counts.

    n_clamped counts surface/curve/smoother evaluations that fell outside the
    kernel support and were re-evaluated at the nearest data point (always 0
    under the ERROR out-of-bounds policy).
    """

    estimate: float
    se: float
    method: Method
    n1: int
    n0: int
    n_clamped: int = 0


@dataclass(frozen=True)
class Mu0Surface:
    """Conditional outcome mean given (surrogate, covariate), fit on prior control data.

    Built exclusively from the prior study's control arm; current-study
    outcomes never enter.
    """

    s: np.ndarray
    w: np.ndarray
    y: np.ndarray
    h_s: float
    h_w: float
    kernel: KernelKind
    cfg: SmoothingConfig

    def evaluate_many(self, s0s, w0s):
        """Vector evaluation; returns (values, clamped-query count)."""
        return nw_surface_many(self.s, self.w, self.y, self.h_s, self.h_w,
                               self.kernel, s0s, w0s, self.cfg)

    def evaluate(self, s0: float, w0: float) -> float:
        vals, _ = self.evaluate_many([s0], [w0])
        return float(vals[0])


@dataclass(frozen=True)
class Mu0Curve:
    """Conditional outcome mean given the surrogate alone, fit on prior control data."""

    s: np.ndarray
    y: np.ndarray
    h: float
    kernel: KernelKind
    cfg: SmoothingConfig

    def evaluate_many(self, s0s):
        return nw_curve_many(self.s, self.y, self.h, self.kernel, s0s, self.cfg)

    def evaluate(self, s0: float) -> float:
        vals, _ = self.evaluate_many([s0])
        return float(vals[0])


def fit_mu0_surface(paired: PairedStudies, bw: Bandwidths,
                    kernel: KernelKind, cfg: SmoothingConfig) -> Mu0Surface:
    arm = paired.prior.control
    if not arm.has_outcome:
        raise MissingOutcome("prior control arm has no outcomes; cannot fit surface")
    return Mu0Surface(s=arm.s, w=arm.w, y=arm.y,
                      h_s=bw.h2, h_w=bw.h3, kernel=kernel, cfg=cfg)


def fit_mu0_curve(paired: PairedStudies, bw: Bandwidths,
                  kernel: KernelKind, cfg: SmoothingConfig) -> Mu0Curve:
    arm = paired.prior.control
    if not arm.has_outcome:
        raise MissingOutcome("prior control arm has no outcomes; cannot fit curve")
    return Mu0Curve(s=arm.s, y=arm.y, h=bw.h4, kernel=kernel, cfg=cfg)


def transform_arm(surface: Mu0Surface, arm: StudyArm) -> np.ndarray:
    """Surface value at each of the arm's (s, w) points (the transported outcomes)."""
    vals, _ = surface.evaluate_many(arm.s, arm.w)
    return vals


def m_hat(arm_g: StudyArm, surface: Mu0Surface, w0: float, h_g: float,
          kernel: KernelKind, cfg: SmoothingConfig) -> float:
    """Arm-level mean of transported outcomes at covariate value w0.

    One-dimensional kernel smooth of the arm's transported outcomes against
    its own covariate values.
    """
    tvals, _ = surface.evaluate_many(arm_g.s, arm_g.w)
    vals, _ = nw_curve_many(arm_g.w, tvals, h_g, kernel, [w0], cfg)
    return float(vals[0])


def _two_sample_se(a: np.ndarray, b: np.ndarray) -> float:
    va = float(np.var(a, ddof=1)) if a.size > 1 else 0.0
    vb = float(np.var(b, ddof=1)) if b.size > 1 else 0.0
    return math.sqrt(va / a.size + vb / b.size)


@dataclass(frozen=True)
class _HParts:
    """Shared intermediates for the heterogeneity-aware estimators.

    s1t/s0t are the transported outcomes per arm; mg_wk holds the arm-g
    smoothed mean evaluated at arm k's covariate points.
    """

    s1t: np.ndarray
    s0t: np.ndarray
    m1_w1: np.ndarray
    m1_w0: np.ndarray
    m0_w1: np.ndarray
    m0_w0: np.ndarray
    n_clamped: int

    @property
    def n1(self) -> int:
        return self.s1t.size

    @property
    def n0(self) -> int:
        return self.s0t.size


def _compute_h_parts(paired: PairedStudies, surface: Mu0Surface,
                     bw: Bandwidths, cfg: SmoothingConfig) -> _HParts:
    tre = paired.current.treated
    ctl = paired.current.control
    s1t, c1 = surface.evaluate_many(tre.s, tre.w)
    s0t, c0 = surface.evaluate_many(ctl.s, ctl.w)
    w_all = np.concatenate([tre.w, ctl.w])
    m1_all, c2 = nw_curve_many(tre.w, s1t, bw.h1, surface.kernel, w_all, cfg)
    m0_all, c3 = nw_curve_many(ctl.w, s0t, bw.h0, surface.kernel, w_all, cfg)
    n1 = tre.n
    return _HParts(
        s1t=s1t, s0t=s0t,
        m1_w1=m1_all[:n1], m1_w0=m1_all[n1:],
        m0_w1=m0_all[:n1], m0_w0=m0_all[n1:],
        n_clamped=c1 + c0 + c2 + c3,
    )


def _pooled_from_parts(p: _HParts) -> float:
    n = p.n1 + p.n0
    return float((p.m1_w0.sum() + p.m1_w1.sum() - p.m0_w0.sum() - p.m0_w1.sum()) / n)


def _sigma_h_from_parts(p: _HParts, delta_h: float) -> float:
    n1, n0 = p.n1, p.n0
    n = n1 + n0
    pi1 = n1 / n
    pi0 = n0 / n
    # each arm's residual is centered: the pi-weighted m level sits pi1*delta
    # below the treated mean and pi0*delta above the control mean, so the
    # treated term subtracts pi1*delta and the control term adds pi0*delta.
    # With a subtracted control term the control residuals carry a
    # -2*pi0*delta offset and the variance estimate is inflated whenever
    # delta is large against the control-arm spread.
    r1 = p.s1t - pi0 * p.m1_w1 - pi1 * p.m0_w1 - pi1 * delta_h
    r0 = p.s0t - pi0 * p.m1_w0 - pi1 * p.m0_w0 + pi0 * delta_h
    return math.sqrt(float((r1 * r1).sum()) / n1**2 + float((r0 * r0).sum()) / n0**2)


def _sigma_aug_from_parts(p: _HParts, delta_h: float) -> float:
    n1, n0 = p.n1, p.n0
    n = n1 + n0
    pi1 = n1 / n
    pi0 = n0 / n
    e1 = p.s1t - p.m1_w1
    e0 = p.s0t - p.m0_w0
    g1 = p.m1_w1 - p.m0_w1 - delta_h
    g0 = p.m1_w0 - p.m0_w0 - delta_h
    return math.sqrt(
        float((e1 * e1).sum()) / n1**2
        + float((e0 * e0).sum()) / n0**2
        + pi1**2 / n1**2 * float((g1 * g1).sum())
        + pi0**2 / n0**2 * float((g0 * g0).sum())
    )


def _aug_from_parts(p: _HParts) -> float:
    n1, n0 = p.n1, p.n0
    n = n1 + n0
    pi1 = n1 / n
    pi0 = n0 / n
    mopt_w1 = pi0 * p.m1_w1 + pi1 * p.m0_w1
    mopt_w0 = pi0 * p.m1_w0 + pi1 * p.m0_w0
    return float((p.s1t - mopt_w1).mean() - (p.s0t - mopt_w0).mean())


def delta_h_simple(paired: PairedStudies, surface: Mu0Surface,
                   cfg: SmoothingConfig) -> EstimateWithSE:
    """Difference of arm means of transported outcomes (no covariate smoothing)."""
    tre = paired.current.treated
    ctl = paired.current.control
    s1t, c1 = surface.evaluate_many(tre.s, tre.w)
    s0t, c0 = surface.evaluate_many(ctl.s, ctl.w)
    return EstimateWithSE(
        estimate=float(s1t.mean() - s0t.mean()),
        se=_two_sample_se(s1t, s0t),
        method=Method.H_SIMPLE, n1=tre.n, n0=ctl.n, n_clamped=c1 + c0)


def delta_h_twostage(paired: PairedStudies, surface: Mu0Surface,
                     bw: Bandwidths, cfg: SmoothingConfig) -> EstimateWithSE:
    """Each arm's smoothed means evaluated at its own covariate points, then contrasted."""
    p = _compute_h_parts(paired, surface, bw, cfg)
    est = float(p.m1_w1.mean() - p.m0_w0.mean())
    return EstimateWithSE(estimate=est, se=_sigma_h_from_parts(p, est),
                          method=Method.H_TWOSTAGE, n1=p.n1, n0=p.n0,
                          n_clamped=p.n_clamped)


def delta_h_pooled(paired: PairedStudies, surface: Mu0Surface,
                   bw: Bandwidths, cfg: SmoothingConfig) -> EstimateWithSE:
    """The headline estimator: both smoothed means averaged over the pooled covariates.

    Randomization makes the covariate distribution identical across arms, so
    evaluating both arm means over all n covariate values recovers the same
    limit with lower variance.
    """
    p = _compute_h_parts(paired, surface, bw, cfg)
    est = _pooled_from_parts(p)
    return EstimateWithSE(estimate=est, se=_sigma_h_from_parts(p, est),
                          method=Method.H_POOLED, n1=p.n1, n0=p.n0,
                          n_clamped=p.n_clamped)


def delta_h_aug(paired: PairedStudies, surface: Mu0Surface,
                bw: Bandwidths, cfg: SmoothingConfig) -> EstimateWithSE:
    """Augmented form: transported outcomes centered by the optimal covariate trend.

    The centering trend is the arm-probability-weighted blend of the two
    smoothed means; its standard error uses the four-term augmented variance
    with the pooled point estimate as the contrast center.
    """
    p = _compute_h_parts(paired, surface, bw, cfg)
    est = _aug_from_parts(p)
    return EstimateWithSE(estimate=est,
                          se=_sigma_aug_from_parts(p, _pooled_from_parts(p)),
                          method=Method.H_AUG, n1=p.n1, n0=p.n0,
                          n_clamped=p.n_clamped)


def sigma_h(paired: PairedStudies, surface: Mu0Surface, bw: Bandwidths,
            delta_h: float, cfg: SmoothingConfig) -> float:
    """Standard error of the pooled heterogeneity-aware estimator.

    Square root of the two-arm sum of squared residuals of transported
    outcomes around the blended smoothed means, with the arm-share-scaled
    point estimate removed, each arm weighted by 1/n_g^2.
    """
    p = _compute_h_parts(paired, surface, bw, cfg)
    return _sigma_h_from_parts(p, delta_h)


def sigma_aug(paired: PairedStudies, surface: Mu0Surface, bw: Bandwidths,
              delta_h: float, cfg: SmoothingConfig) -> float:
    """Standard error of the augmented estimator (four-term decomposition)."""
    p = _compute_h_parts(paired, surface, bw, cfg)
    return _sigma_aug_from_parts(p, delta_h)


def delta_p(paired: PairedStudies, curve: Mu0Curve,
            cfg: SmoothingConfig) -> EstimateWithSE:
    """Covariate-ignoring estimator: arm contrast of 1-D transported surrogates."""
    tre = paired.current.treated
    ctl = paired.current.control
    y1t, c1 = curve.evaluate_many(tre.s)
    y0t, c0 = curve.evaluate_many(ctl.s)
    return EstimateWithSE(
        estimate=float(y1t.mean() - y0t.mean()),
        se=_two_sample_se(y1t, y0t),
        method=Method.P, n1=tre.n, n0=ctl.n, n_clamped=c1 + c0)


def delta_gold(current: TwoArmStudy) -> EstimateWithSE:
    """Difference of observed outcome means with the unpooled two-sample SE."""
    if not (current.treated.has_outcome and current.control.has_outcome):
        raise MissingOutcome("gold-standard contrast needs outcomes in both arms")
    y1 = current.treated.y
    y0 = current.control.y
    return EstimateWithSE(
        estimate=float(y1.mean() - y0.mean()),
        se=_two_sample_se(y1, y0),
        method=Method.GOLD, n1=current.treated.n, n0=current.control.n)


def pte_ratio(delta_h: EstimateWithSE, gold: EstimateWithSE) -> float:
    """Fraction of the outcome-scale effect captured on the transported scale."""
    if gold.estimate == 0.0:
        raise ZeroDenominator("gold-standard estimate is zero; ratio undefined")
    return delta_h.estimate / gold.estimate


def estimate_suite(paired: PairedStudies, bw: Bandwidths, cfg: SmoothingConfig,
                   include_gold: bool = True) -> dict:
    """All estimators off one shared set of intermediates.

    Returns a dict keyed by Method.  The heavy pieces (surface transforms,
    smoothed means) are computed once and reused, so this is the entry point
    the simulation harness and CLI both use.  The gold row appears only when
    requested and both current arms carry outcomes.
    """
    surface = fit_mu0_surface(paired, bw, cfg.kernel, cfg)
    curve = fit_mu0_curve(paired, bw, cfg.kernel, cfg)
    p = _compute_h_parts(paired, surface, bw, cfg)
    n1, n0 = p.n1, p.n0

    pooled = _pooled_from_parts(p)
    simple = float(p.s1t.mean() - p.s0t.mean())
    twostage = float(p.m1_w1.mean() - p.m0_w0.mean())
    aug = _aug_from_parts(p)

    out = {
        Method.H_POOLED: EstimateWithSE(pooled, _sigma_h_from_parts(p, pooled),
                                        Method.H_POOLED, n1, n0, p.n_clamped),
        Method.H_SIMPLE: EstimateWithSE(simple, _two_sample_se(p.s1t, p.s0t),
                                        Method.H_SIMPLE, n1, n0, p.n_clamped),
        Method.H_TWOSTAGE: EstimateWithSE(twostage, _sigma_h_from_parts(p, twostage),
                                          Method.H_TWOSTAGE, n1, n0, p.n_clamped),
        Method.H_AUG: EstimateWithSE(aug, _sigma_aug_from_parts(p, pooled),
                                     Method.H_AUG, n1, n0, p.n_clamped),
        Method.P: delta_p(paired, curve, cfg),
    }
    cur = paired.current
    if include_gold and cur.treated.has_outcome and cur.control.has_outcome:
        out[Method.GOLD] = delta_gold(cur)
    return out
