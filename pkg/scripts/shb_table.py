"""Guessing game: local bound by two enumerations against the closed form, and the quantum score."""
import math

from bellkit.local import local_bound_probability
from bellkit.shb import shb_inequality, shb_local_formula, shb_local_oracle, shb_quantum_score

print(f"{'n':>2} {'m':>2} {'local':>6} {'oracle':>7} {'formula':>8}")
for n, m in [(1, 2), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2), (4, 3)]:
    print(f"{n:>2} {m:>2} {int(local_bound_probability(shb_inequality(n, m))):>6} "
          f"{shb_local_oracle(n, m):>7} {shb_local_formula(n):>8}")

print(f"\n{'m':>2} {'score':>12} {'2 sqrt(m)':>12}")
for m in range(2, 9):
    print(f"{m:>2} {shb_quantum_score(m).score:>12.9f} {2 * math.sqrt(m):>12.9f}")
