"""Turn a combinatorial instance into a univariate black-box function.

A max-clique instance over n vertices has 2^n candidate assignments.  The
reduction maps the integer domain [1, 2^n] bijectively onto those
assignments by recursive halving: each halving step fixes one variable of
a seeded permutation.  Different seeds shuffle where each assignment
lands, but the multiset of values over the domain never changes, and the
maximum is always the true optimum.
"""

from collections import Counter

from hitlbo import (brute_force_optimum, build_reduction, decode_assignment,
                    eval_point, parse_graph)

TRIANGLE_PLUS = """\
p edge 4 5
e 1 2
e 2 3
e 1 3
e 3 4
e 1 4
"""

instance = parse_graph(TRIANGLE_PLUS)
print(f"instance: max clique over {instance.n} vertices, edges {instance.edges}")

opt = brute_force_optimum(instance)
print(f"brute force optimum: {opt.value} at {opt.witness} "
      f"({opt.epsilon_optimal_count} optimal assignment(s))\n")

rf = build_reduction(instance, seed=7)
print(f"reduction with seed 7: domain [{rf.d0}, {rf.d1}], "
      f"variable order {rf.permutation}")
for x in range(rf.d0, rf.d1 + 1):
    bits = decode_assignment(rf, x)
    print(f"  f({x:2d}) = {eval_point(rf, x):3.0f}   assignment {bits}")

print("\nsame instance, three seeds; the value multiset is identical:")
for seed in (7, 8, 9):
    rf_s = build_reduction(instance, seed=seed)
    values = [eval_point(rf_s, x) for x in range(rf_s.d0, rf_s.d1 + 1)]
    print(f"  seed {seed}: max={max(values):.0f}  histogram={dict(Counter(values))}")

print("\npartial assignment v1=1 halves the domain and keeps the rest:")
rf_p = build_reduction(instance, seed=7, partial={0: 1}, d0=1, d1=8)
for x in range(1, 9):
    print(f"  f({x}) = {eval_point(rf_p, x):3.0f}  {decode_assignment(rf_p, x)}")
