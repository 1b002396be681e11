"""Closed-form benchmark values and their Monte-Carlo adjudication.

Two worked examples with exact answers. They pin down what the estimators
target and expose how the covariate-ignoring contrast can overshoot.
"""
from surrtest.oracles import (
    DISCRETE_DELTA_P_NOTE,
    DiscreteMix,
    discrete_example,
    lognormal_counterexample_analytic,
    lognormal_counterexample_mc,
    lognormal_delta_p_linearized,
)

# --- discrete two-group mix ----------------------------------------------
# everything is a weighted average of two subgroup values, so the three
# quantities are exact affine functions of the mix probability
for p in (0.95, 0.5, 0.05):
    t = discrete_example(DiscreteMix(p_female=p))
    print(f"p_female={p:4}: delta={t.delta:7.3f}  delta_p={t.delta_p:6.2f}  "
          f"delta_h={t.delta_h:7.3f}")
print(DISCRETE_DELTA_P_NOTE)

# the covariate-ignoring value never moves with the mix, which is the point:
# at p=0.95 it overstates the truth, at p=0.05 it understates it

# --- lognormal continuous example ----------------------------------------
# delta and delta_h agree exactly; delta_p picks up an extra half-variance
# term in the exponent and overshoots for every effect size
delta0 = 0.5
analytic = lognormal_counterexample_analytic(delta0)
linearized = lognormal_delta_p_linearized(delta0)
print(f"\nlognormal at delta0={delta0}:")
print(f"  delta   = delta_h = {analytic.delta:.6f}")
print(f"  delta_p           = {analytic.delta_p:.6f}  (overshoot "
      f"{analytic.delta_p - analytic.delta:+.4f})")
print(f"  linearized variant = {linearized:.6f}")

mc = lognormal_counterexample_mc(delta0, n=500_000, master_seed=1)
print(f"  MC check: delta {mc.delta:.4f} (se {mc.delta_se:.4f}), "
      f"delta_p {mc.delta_p:.4f} (se {mc.delta_p_se:.4f})")
for name, exact, got, se in (
        ("delta", analytic.delta, mc.delta, mc.delta_se),
        ("delta_p", analytic.delta_p, mc.delta_p, mc.delta_p_se)):
    z = abs(got - exact) / se
    print(f"  {name}: |MC - analytic| = {z:.2f} MC se")
z_lin = abs(mc.delta_p - linearized) / mc.delta_p_se
print(f"  delta_p vs linearized variant: {z_lin:.1f} MC se away, "
      f"so the exponential form is the right one")
