import itertools

import pytest

from hitlbo import (brute_force_optimum, build_reduction, decode_assignment,
                    eval_point, evaluate_assignment, from_descriptor,
                    max_sat_instance, parse_cnf, resample)
from hitlbo.generators import random_cnf_instance, random_graph_instance
from hitlbo.reduction import ReducedFunction, descriptor


def identity_rf(instance, d0=1):
    """Reduction with the declared variable order, built directly."""
    n = instance.n
    return ReducedFunction(instance=instance, seed=0, scale=1.0, partial=(),
                           d0=d0, d1=d0 + (1 << n) - 1,
                           permutation=tuple(range(n)))


class TestBuild:
    def test_triangle_domain(self, triangle):
        rf = build_reduction(triangle, seed=7, scale=1.0, d0=1, d1=8)
        assert rf.domain_size == 8
        assert sorted(rf.permutation) == [0, 1, 2]

    def test_partial_shrinks_domain(self, triangle):
        rf = build_reduction(triangle, seed=7, partial={0: 1}, d0=1, d1=4)
        assert rf.domain_size == 4
        assert sorted(rf.permutation) == [1, 2]

    def test_domain_size_mismatch(self, triangle):
        with pytest.raises(ValueError, match="domain size"):
            build_reduction(triangle, seed=7, d0=1, d1=6)

    def test_scale_must_be_positive(self, triangle):
        with pytest.raises(ValueError, match="scale"):
            build_reduction(triangle, seed=7, scale=0.0)

    def test_seed_range(self, triangle):
        with pytest.raises(ValueError, match="64 bits"):
            build_reduction(triangle, seed=-1)

    def test_partial_validation(self, triangle):
        with pytest.raises(ValueError, match="undeclared"):
            build_reduction(triangle, seed=1, partial={9: 1}, d0=1, d1=4)
        with pytest.raises(ValueError, match="0 or 1"):
            build_reduction(triangle, seed=1, partial={0: 2}, d0=1, d1=4)


class TestDecode:
    def test_identity_convention(self, or2):
        rf = identity_rf(or2)
        assert decode_assignment(rf, 1) == (0, 0)
        assert decode_assignment(rf, 4) == (1, 1)
        # hand trace: halves {1,2}/{3,4} pick second -> 1; then {3}/{4} first -> 0
        assert decode_assignment(rf, 3) == (1, 0)

    def test_out_of_domain(self, or2):
        rf = identity_rf(or2)
        with pytest.raises(ValueError, match="outside domain"):
            decode_assignment(rf, 5)

    def test_partial_merged(self, triangle):
        rf = build_reduction(triangle, seed=3, partial={1: 1}, d0=1, d1=4)
        for x in range(1, 5):
            assert decode_assignment(rf, x)[1] == 1


class TestEvalPoint:
    def test_or_clause_endpoints(self, or2):
        rf = identity_rf(or2)
        assert eval_point(rf, 1) == 0.0  # decodes to (0, 0)
        assert eval_point(rf, 4) == 1.0  # decodes to (1, 1)

    def test_linear_scaling(self, or2):
        rf = ReducedFunction(instance=or2, seed=0, scale=2.0, partial=(),
                             d0=1, d1=4, permutation=(0, 1))
        assert eval_point(rf, 4) == 2.0


class TestResample:
    def test_deterministic(self, triangle):
        rf = build_reduction(triangle, seed=9)
        a = resample(rf, new_seed=1)
        b = resample(rf, new_seed=1)
        assert a == b

    def test_both_orders_of_two_variables_appear(self, or2):
        rf = build_reduction(or2, seed=0)
        perms = {resample(rf, new_seed=s).permutation for s in range(32)}
        assert perms == {(0, 1), (1, 0)}

    def test_scale_rescales_values(self, triangle):
        rf = build_reduction(triangle, seed=5)
        rf3 = resample(rf, new_seed=5, new_scale=3.0)
        for x in range(rf.d0, rf.d1 + 1):
            assert eval_point(rf3, x) == 3.0 * eval_point(rf, x)


def _pool():
    return [
        random_graph_instance(6, 0.5, 11),
        random_cnf_instance(8, 24, 3, 12),
        random_graph_instance(9, 0.4, 13),
        random_graph_instance(5, 0.3, 14, kind="min_vertex_cover"),
    ]


class TestInvariants:
    def test_bijection_over_extensions(self):
        for inst in _pool():
            for seed in (0, 1, 2):
                rf = build_reduction(inst, seed=seed)
                decoded = {decode_assignment(rf, x) for x in range(rf.d0, rf.d1 + 1)}
                assert len(decoded) == 1 << inst.n

    def test_bijection_with_partial(self, triangle):
        rf = build_reduction(triangle, seed=4, partial={2: 0}, d0=1, d1=4)
        decoded = {decode_assignment(rf, x) for x in range(1, 5)}
        expected = {bits + (0,) for bits in itertools.product((0, 1), repeat=2)}
        assert decoded == expected

    def test_value_multiset_is_seed_invariant(self):
        for inst in _pool():
            rf0 = build_reduction(inst, seed=0)
            ref = sorted(eval_point(rf0, x) for x in range(rf0.d0, rf0.d1 + 1))
            for seed in (1, 17, 123456):
                rf = build_reduction(inst, seed=seed)
                vals = sorted(eval_point(rf, x) for x in range(rf.d0, rf.d1 + 1))
                assert vals == ref

    def test_optimum_preserved(self):
        for inst in _pool():
            opt = brute_force_optimum(inst).value
            rf = build_reduction(inst, seed=2, scale=1.5)
            assert max(eval_point(rf, x) for x in range(rf.d0, rf.d1 + 1)) == 1.5 * opt

    def test_restriction_coherence(self):
        inst = random_cnf_instance(5, 15, 3, 21)
        var, bit = 2, 1
        rf_full = build_reduction(inst, seed=6)
        full_restricted = sorted(
            eval_point(rf_full, x) for x in range(rf_full.d0, rf_full.d1 + 1)
            if decode_assignment(rf_full, x)[var] == bit)
        rf_part = build_reduction(inst, seed=8, partial={var: bit}, d0=1, d1=16)
        part_values = sorted(eval_point(rf_part, x) for x in range(1, 17))
        assert part_values == full_restricted

    def test_partial_optimum_matches_restricted_brute_force(self):
        inst = random_graph_instance(7, 0.5, 31)
        var, bit = 3, 0
        best = max(evaluate_assignment(inst, bits)
                   for bits in itertools.product((0, 1), repeat=7) if bits[var] == bit)
        rf = build_reduction(inst, seed=9, partial={var: bit}, d0=1, d1=64)
        assert max(eval_point(rf, x) for x in range(1, 65)) == best


class TestDescriptor:
    def test_round_trip(self, triangle):
        rf = build_reduction(triangle, seed=42, scale=0.5, partial={1: 0}, d0=1, d1=4)
        doc = descriptor(rf, instance_ref={"path": "triangle.graph"})
        rebuilt = from_descriptor(doc, triangle)
        assert rebuilt == rf

    def test_cnf_round_trip(self):
        inst = parse_cnf("p cnf 3 2\n1 -2 0\n2 3 0\n")
        rf = build_reduction(inst, seed=5)
        assert from_descriptor(descriptor(rf), inst) == rf


def test_max_sat_trivial_constant_objective():
    inst = max_sat_instance(2, [(1, -1)])  # tautology: every assignment scores 1
    rf = build_reduction(inst, seed=0)
    assert {eval_point(rf, x) for x in range(1, 5)} == {1.0}
