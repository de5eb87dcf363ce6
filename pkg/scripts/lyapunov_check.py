"""Count strict-decrease checks of the Lyapunov function along trajectories.

Every step whose post-step value exceeds the noise level gamma_n (N/2L)^{1/n}
must be strictly smaller than the value before the step.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracles import lyapunov_decrease  # noqa: E402


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--steps", type=int, default=600)
    p.add_argument("--spread", type=float, default=10.0, help="scale of the initial error")
    args = p.parse_args()
    print(" m  N        checked  violations  steps")
    for m in (1, 2, 3):
        for N in (0.0, 1e-3, 1e-2):
            checked, bad, total = lyapunov_decrease(m, N, args.trials, args.steps, seed=90 + m, spread=args.spread)
            print(f" {m}  {N:<7g}  {checked:7d}  {bad:10d}  {total}")


if __name__ == "__main__":
    main()
