"""Worst-case monomial versus generic signals: how tight is the exactness bound.

For each order m the worst-case monomial M t^{m+1}/(m+1)! attains
c(i, m+1) M T^{m+1-i}; random signals with the same derivative bound stay
below it. Prints the ratio error / bound.
"""

import numpy as np

from ired.core import DifferentiatorConfig, compute_coefficients
from ired.differentiators import Ired, init_from_derivatives
from ired.sim import SignalModel, Sinusoid, run
from ired.tuning import tune_gains


def matched(cfg, sig):
    return init_from_derivatives(cfg, sig(0.0), [sig.derivative(i, 0.0) for i in range(1, cfg.m + 1)])


def main() -> None:
    L, T = 1.0, 0.1
    rng = np.random.default_rng(0)
    for m in range(1, 6):
        cfg = DifferentiatorConfig(m, L, T, tune_gains(m, 1.5))
        c = compute_coefficients(m)
        bound = np.array([float(c(i, m + 1)) * L * T ** (m + 1 - i) for i in range(1, m + 1)])
        worst = SignalModel.monomial_worst_case(L, m)
        rec = run(Ired(cfg, matched(cfg, worst)), worst, None, 30)
        ratio_worst = np.abs(rec.errors[m + 1 :]) / bound
        ratios = []
        for _ in range(20):
            w = rng.uniform(0.2, 1.5)
            sig = SignalModel.mixture([0.0], [Sinusoid(L / w ** (m + 1), w, rng.uniform(0, 6.3))])
            r = run(Ired(cfg, matched(cfg, sig)), sig, None, 400)
            ratios.append(np.max(np.abs(r.errors[m + 1 :]) / bound, axis=0))
        print(
            f"m={m}: monomial ratio {ratio_worst.min():.9f}..{ratio_worst.max():.9f}"
            f"   random signals max ratio {np.round(np.max(ratios, axis=0), 6)}"
        )


if __name__ == "__main__":
    main()
