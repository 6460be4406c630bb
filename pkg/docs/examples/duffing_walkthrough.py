"""
Duffing-Ueda: ODE reference and a NARMAX model
==============================================

The reference is the forced Duffing-Ueda oscillator integrated with RK4.
The identified NARMAX model G and its rearranged twin H are driven by the
same cosine forcing.
"""

# %%
import numpy as np

from lbeval import DuffingParams, integrate_duffing, run_procedure
from lbeval.studies import duffing_study

params = DuffingParams()
y = integrate_duffing(params, 100).to_array()
print("ODE samples 0..5:", y[:6])

# %%
# A step-halving check of the integrator: the error ratio should sit near 16.
ref = integrate_duffing(DuffingParams(substeps=256), 120).to_array()
errs = [np.abs(integrate_duffing(DuffingParams(substeps=s), 120).to_array()
               - ref).max() for s in (1, 2, 4, 8)]
print("RK4 halving ratios:", np.array(errs[:-1]) / np.array(errs[1:]))

# %%
# Full procedure in both fidelity modes.
for fidelity in ("equivalent", "paper-verbatim"):
    out = run_procedure(duffing_study(fidelity=fidelity))
    s = out.summary()
    print(fidelity)
    for step in ("step1_2", "step3"):
        print(f"  {step}: d_rmse@65 = {s[step]['d_rmse_pct@65']:.4g}%"
              f"  d_mape@65 = {s[step]['d_mape_pct@65']:.4g}%")
