"""Wiener-process priors and exact noise-free posteriors.

The Wiener kernel min(s, t) is the expert-free special case: its only
hyperparameter is a variance, which the reduction's scale can absorb.
This script draws a few realizations, checks their covariance empirically,
and shows how conditioning shrinks the posterior.
"""

import numpy as np

from hitlbo import posterior, sample_realization, wiener

spec = wiener(1.0)

print("three realizations on 0..15 (note every path starts at exactly 0):")
for seed in range(3):
    w = sample_realization(spec, list(range(16)), seed=seed)
    print(f"  seed {seed}: " + " ".join(f"{v:6.2f}" for v in w))

n = 4000
cols = np.array([sample_realization(spec, [100, 900], seed=s) for s in range(n)])
print(f"\nempirical covariance over {n} seeded paths (theory: min(s, t)):")
print(f"  var(W_100)        = {np.var(cols[:, 0], ddof=1):7.2f}   (theory 100)")
print(f"  cov(W_100, W_900) = {np.cov(cols.T, ddof=1)[0, 1]:7.2f}   (theory 100)")
print(f"  var(W_900)        = {np.var(cols[:, 1], ddof=1):7.2f}   (theory 900)")

print("\nposterior after observing W_2 = 0.5 and W_8 = -1.0:")
obs = [(2, 0.5), (8, -1.0)]
queries = [0, 1, 2, 4, 6, 8, 12, 20]
means, variances = posterior(spec, obs, queries)
for q, m, v in zip(queries, means, variances):
    marker = "  <- observed" if q in (2, 8) else ""
    print(f"  t={q:2d}  mean {m:7.3f}  std {np.sqrt(v):6.3f}{marker}")

print("\nadding a third observation never increases any posterior variance:")
_, before = posterior(spec, obs, queries)
_, after = posterior(spec, obs + [(4, 0.1)], queries)
print("  max variance increase:", float(np.max(after - before)))
