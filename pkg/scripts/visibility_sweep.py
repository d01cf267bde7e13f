"""Visibility threshold of the AS family as n grows, plus the d=2 vs d=n check."""
import argparse

from bellkit.families import gen_as
from bellkit.optimizer import OptimizerConfig, seesaw_value, visibility_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", default="2,4,6,8,10,16,24,32,50")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = OptimizerConfig(seed=args.seed)
    print(f"{'n':>4} {'bound':>6} {'quantum':>12} {'V_n':>9} {'|d2-dn|':>9}")
    for n in map(int, args.n.split(",")):
        ineq = gen_as(n)
        res = visibility_threshold(ineq, 2, cfg)
        gap = abs(res.quantum_value - seesaw_value(ineq, n, cfg).value) if n <= 10 else float("nan")
        flag = " *" if res.conjectured else ""
        print(f"{n:>4} {res.bound:>6.0f} {res.quantum_value:>12.8f} {res.visibility:>9.6f} {gap:>9.1e}{flag}")
    print("* bound from the closed form, not enumerated")


if __name__ == "__main__":
    main()
