"""
Running RMSE and LRMSE
======================

Plots the running indices of both case studies. Needs matplotlib, which is
not a dependency of the package.
"""

import matplotlib.pyplot as plt
import numpy as np

from lbeval import get_study, run_procedure


def series(s):
    return np.array([np.nan if v is None else v for v in s.values])


fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
for row, name in enumerate(("sine-map", "duffing")):
    out = run_procedure(get_study(name))
    for col, (title, rep) in enumerate((("system vs G", out.report_step1_2),
                                        ("G vs H", out.report_step3))):
        ax = axes[row, col]
        ax.plot(series(rep.rmse), label="RMSE")
        ax.plot(series(rep.lrmse), "--", label="LRMSE")
        ax.axvline(65, color="grey", lw=0.5)
        ax.set_title(f"{name}: {title}")
        ax.legend()
axes[1, 0].set_xlabel("n")
axes[1, 1].set_xlabel("n")
fig.tight_layout()
plt.show()
