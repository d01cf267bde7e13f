"""Local bound, facet status, and d=2/d=3 quantum values for every catalogued inequality."""
import time

from bellkit.families import CATALOG_NAMES, catalog
from bellkit.local import facet_check, local_bound_correlation
from bellkit.optimizer import seesaw_value

print(f"{'name':>6} {'bound':>6} {'facet(full)':>12} {'facet(corr)':>12} {'q d=2':>10} {'q d=3':>10} {'secs':>6}")
for name in CATALOG_NAMES:
    t0 = time.perf_counter()
    ineq = catalog(name)
    bound = local_bound_correlation(ineq)
    full = facet_check(ineq).is_facet
    corr = facet_check(ineq, "correlation").is_facet
    q2, q3 = (seesaw_value(ineq, d).value for d in (2, 3))
    print(f"{name:>6} {int(bound):>6} {str(full):>12} {str(corr):>12} {q2:>10.6f} {q3:>10.6f} "
          f"{time.perf_counter() - t0:>6.2f}")
