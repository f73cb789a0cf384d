"""The closed-form calculators: regret bounds, cell bounds, concentration.

Everything here is arithmetic; no optimization runs.  Note the literal
upper-bound variant: printed with a positive exponent, it exceeds one for
every valid T, which is why the sign-corrected variant is the default and
the report carries a degeneracy flag.
"""

from hitlbo import (cell_ub, dominance_factor, make_bound_report,
                    mean_concentration_bound, normregret_lower, path_success,
                    required_samples)

print("normalized-regret bounds over an N = 2^100 domain:")
print("     T       lower     upper(corrected)   upper(literal)   dominance")
for T in (10 ** 3, 10 ** 5, 10 ** 7, 10 ** 9):
    r = make_bound_report(T, 1 << 100)
    print(f"{T:10d}   {r.regret_lower:7.4f}      {r.regret_upper:7.4f}        "
          f"{r.regret_upper_literal:9.4f}      {r.dominance:7.4f}")

print("\nlower bound sweep (T evaluations, N domain points):")
for T, N in ((256, 65536), (1024, 65536), (4096, 65536), (65536, 65536)):
    print(f"  T={T:6d} N={N}  ->  {normregret_lower(T, N):.5f}")

print("\ncell upper bounds: val / (sqrt(log2 X) / sqrt(log2 N)):")
for val, X, N in ((5.0, 256, 65536), (3.2, 1024, 1024), (2.0, 16, 1024)):
    print(f"  val={val} X={X:5d} N={N:6d}  ->  ub {cell_ub(val, X, N):.4f}")

print("\nmean concentration of m re-samples on a unit value range:")
for m in (1, 2, 4, 8):
    p = mean_concentration_bound(m, 0.5, 0.0, 1.0)
    print(f"  m={m}: deviation >= 0.5 with probability <= {p:.2e}")

print("\nhow many re-samples keep a depth-h expansion path on track?")
for h in (4, 16, 64):
    m = required_samples(h, 0.25, 0.0, 1.0, target=0.9)
    print(f"  depth {h:3d}: m = {m:2d} "
          f"(path success {path_success(m, 0.25, 0.0, 1.0, h):.4f})")

print(f"\ndominance factor tends to 1 as T grows: "
      f"{dominance_factor(10 ** 7):.4f} at 1e7, {dominance_factor(10 ** 12):.4f} at 1e12")
