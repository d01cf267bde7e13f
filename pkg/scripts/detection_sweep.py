"""CHSH detection-efficiency threshold as a function of the state angle."""
import argparse
import math

import numpy as np

from bellkit.families import catalog
from bellkit.optimizer import detection_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=9)
    args = ap.parse_args()
    chsh = catalog("CHSH")
    print(f"{'theta':>8} {'eta* (both)':>12} {'eta_a* (eta_b=1)':>17}")
    for theta in np.linspace(math.pi / 4, 0.05, args.points):
        sym = detection_threshold(chsh, theta).eta_star
        one = detection_threshold(chsh, theta, "fixed_b", 1.0).eta_star
        fmt = lambda v: "none" if v is None else f"{v:.6f}"
        print(f"{theta:>8.4f} {fmt(sym):>12} {fmt(one):>17}")


if __name__ == "__main__":
    main()
