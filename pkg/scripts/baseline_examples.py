"""Chattering and bias of the baseline implicit differentiators.

Ramp: the first-order IRED is exact after one sample while the HIDD output
alternates between 0 and lambda_2 L T. Parabola: the I-HDD family settles at
a y_1 offset of |1 + c| alpha T.
"""

import numpy as np

from ired.core import DifferentiatorConfig
from ired.differentiators import Hidd1, IhddFamily, Ired
from ired.sim import SignalModel, run
from ired.tuning import tune_gains


def ramp() -> None:
    L, T, lam = 1.0, 0.1, (4.0, 1.1)
    sig = SignalModel.polynomial([0.0, lam[1] * L * T / 2])
    ired = run(Ired(DifferentiatorConfig(1, L, T, lam)), sig, None, 200)
    hidd = run(Hidd1(L, T, lam), sig, None, 200)
    print("ramp f(t) = 0.055 t")
    print("   k   IRED y1    HIDD y1")
    for k in range(6):
        print(f"  {k:2d}  {ired.y[k, 0]:.6f}  {hidd.y[k, 0]:.6f}")
    print(f"  tail max |e|: IRED {np.max(np.abs(ired.errors[100:])):.2e}, HIDD {np.max(np.abs(hidd.errors[100:])):.4f}")


def parabola() -> None:
    T = 0.1
    gains = tune_gains(2, 1.1)
    print("\nparabola f(t) = alpha t^2, steady y1 error vs |1+c| alpha T")
    for alpha in (0.5, 2.0):
        sig = SignalModel.polynomial([0.0, 0.0, alpha])
        for c in (1.0, 0.0, -1.0):
            rec = run(IhddFamily(2 * alpha, T, gains, c=c), sig, None, 400)
            e = rec.errors[-4:, 0]
            print(f"  alpha={alpha:3.1f} c={c:+.0f}: last errors {np.round(e, 6)}  expected |e| {abs(1 + c) * alpha * T:.3f}")
        rec = run(Ired(DifferentiatorConfig(2, 2 * alpha, T, gains)), sig, None, 400)
        print(f"  alpha={alpha:3.1f} IRED : tail max |e1| {np.max(np.abs(rec.errors[-100:, 0])):.2e}")


if __name__ == "__main__":
    ramp()
    parabola()
