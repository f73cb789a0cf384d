import threading
import time

import pytest

from hitlbo import (ConsistencyLedger, ExpertTimeout, LedgerContradiction,
                    MLEExpert, SimulatedExpert, mle_expert_respond,
                    sample_realization, squared_exponential, wiener)
from hitlbo.expert import CellStats, ExpertBridge, ExpertQuery, ExpertResponse


def make_query(qid="r:q0", run_id="r", lo=1, hi=64, stats_values=()):
    return ExpertQuery(query_id=qid, run_id=run_id, lo=lo, hi=hi, prefix=(),
                       stats=CellStats.from_values(list(stats_values)))


class TestSimulatedExpert:
    def test_constant_oracle(self):
        expert = SimulatedExpert(wiener(1.0))
        r1 = expert.respond(make_query("a"), [])
        r2 = expert.respond(make_query("b", lo=65, hi=128), [])
        assert r1.prior == r2.prior == wiener(1.0)

    def test_never_contradicts_ledger(self):
        expert = SimulatedExpert(wiener(2.0))
        ledger = ConsistencyLedger()
        for i in range(100):
            q = make_query(f"q{i}", lo=1 + (i % 4) * 16, hi=(1 + i % 4) * 16)
            ledger.record(q.lo, q.hi, expert.respond(q, []).prior)
        assert len(ledger.entries) == 100


class TestLedger:
    def test_same_region_contradiction(self):
        ledger = ConsistencyLedger(tolerance=0.10)
        ledger.record(1, 8, wiener(5.0))
        with pytest.raises(LedgerContradiction, match="variance"):
            ledger.check(1, 8, wiener(1.0))

    def test_overlap_detection(self):
        ledger = ConsistencyLedger(tolerance=0.10)
        ledger.record(1, 8, wiener(5.0))
        ledger.record(9, 16, wiener(1.0))  # disjoint region is free to differ
        with pytest.raises(LedgerContradiction):
            ledger.check(8, 9, wiener(1.0))  # overlaps both

    def test_within_tolerance_accepted(self):
        ledger = ConsistencyLedger(tolerance=0.25)
        ledger.record(1, 16, wiener(1.0))
        ledger.record(1, 8, wiener(1.2))

    def test_kernel_family_conflict(self):
        ledger = ConsistencyLedger()
        ledger.record(1, 8, wiener(1.0))
        with pytest.raises(LedgerContradiction, match="kernel family"):
            ledger.check(4, 6, squared_exponential(1.0, 2.0))

    def test_mean_conflict(self):
        ledger = ConsistencyLedger(tolerance=0.10)
        ledger.record(1, 8, wiener(1.0, mean=10.0))
        with pytest.raises(LedgerContradiction, match="mean"):
            ledger.check(1, 8, wiener(1.0, mean=5.0))

    def test_feasible_band(self):
        ledger = ConsistencyLedger(tolerance=0.25)
        assert ledger.feasible_variance_band(1, 8) is None
        ledger.record(1, 16, wiener(2.0))
        lo, hi = ledger.feasible_variance_band(1, 8)
        assert lo == pytest.approx(2.0 / 1.25)
        assert hi == pytest.approx(2.5)

    def test_state_round_trip(self):
        ledger = ConsistencyLedger()
        ledger.record(1, 8, wiener(1.0))
        ledger.record(9, 16, squared_exponential(2.0, 4.0, mean=1.0))
        clone = ConsistencyLedger.from_state(ledger.to_state())
        assert clone.entries == ledger.entries


class TestMLE:
    def test_insufficient_history_falls_back(self):
        resp = mle_expert_respond(make_query(), [(1, 0.5)], wiener(1.0))
        assert resp.prior == wiener(1.0)
        assert "insufficient" in resp.annotation

    def test_constant_history_floored(self):
        hist = [(p, 2.0) for p in range(1, 9)]
        resp = mle_expert_respond(make_query(), hist, wiener(1.0))
        assert resp.prior.variance == pytest.approx(1e-12)

    def test_calibration_against_known_variance(self):
        # 16 points from a variance-4 process: fitted variance within a
        # factor of 2 of the truth in at least 80% of 100 seeded trials
        q = make_query(lo=1, hi=64)
        pts = list(range(1, 65, 4))
        hits = 0
        for trial in range(100):
            w = sample_realization(wiener(4.0), pts, seed=5000 + trial)
            hist = [(1 + p, float(v)) for p, v in zip(pts, w)]
            fitted = mle_expert_respond(q, hist, wiener(1.0)).prior.variance
            if 2.0 <= fitted <= 8.0:
                hits += 1
        assert hits >= 80

    def test_stationary_fit_returns_lengthscale(self):
        q = make_query(lo=1, hi=32)
        pts = list(range(32))
        w = sample_realization(squared_exponential(2.0, 6.0), pts, seed=3)
        hist = [(1 + p, float(v)) for p, v in zip(pts, w)]
        resp = mle_expert_respond(q, hist, squared_exponential(1.0, 4.0))
        assert resp.prior.kernel == "se"
        assert resp.prior.lengthscale > 0

    def test_expert_clamps_to_stay_consistent(self):
        expert = MLEExpert(wiener(1.0), tolerance=0.25)
        q1 = make_query("q1", lo=1, hi=64)
        first = expert.respond(q1, [])  # no history -> default, recorded
        assert first.prior == wiener(1.0)
        # strong history pushing the fit far above the recorded default
        pts = list(range(1, 65, 2))
        w = sample_realization(wiener(50.0), pts, seed=8)
        hist = [(p, float(v)) for p, v in zip(pts, w)]
        second = expert.respond(make_query("q2", lo=1, hi=32), hist)
        assert second.prior.variance <= 1.25 + 1e-9
        # everything the expert said passes a fresh ledger with the same tolerance
        ledger = ConsistencyLedger(tolerance=0.25)
        ledger.record(1, 64, first.prior)
        ledger.record(1, 32, second.prior)


class TestBridge:
    def test_round_trip(self):
        bridge = ExpertBridge()
        bridge.register_run("r", ConsistencyLedger())
        bridge.enqueue(make_query("r:q0"))
        assert [q.query_id for q in bridge.pending()] == ["r:q0"]
        threading.Thread(
            target=lambda: (time.sleep(0.05),
                            bridge.respond(ExpertResponse("r:q0", wiener(1.0)))),
        ).start()
        resp = bridge.await_response("r:q0", timeout=5.0)
        assert resp.prior == wiener(1.0)
        assert bridge.pending() == []

    def test_unknown_id_rejected_queue_unchanged(self):
        bridge = ExpertBridge()
        bridge.enqueue(make_query("r:q0"))
        with pytest.raises(KeyError):
            bridge.respond(ExpertResponse("r:q9", wiener(1.0)))
        assert [q.query_id for q in bridge.pending()] == ["r:q0"]

    def test_exactly_once(self):
        bridge = ExpertBridge()
        bridge.enqueue(make_query("r:q0"))
        bridge.respond(ExpertResponse("r:q0", wiener(1.0)))
        with pytest.raises(KeyError):
            bridge.respond(ExpertResponse("r:q0", wiener(1.0)))
        bridge.await_response("r:q0", timeout=0.1)
        with pytest.raises(KeyError, match="consumed"):
            bridge.await_response("r:q0", timeout=0.1)

    def test_contradiction_keeps_query_pending(self):
        bridge = ExpertBridge()
        ledger = ConsistencyLedger(tolerance=0.10)
        ledger.record(1, 16, wiener(5.0))
        bridge.register_run("r", ledger)
        bridge.enqueue(make_query("r:q0", lo=1, hi=8))
        with pytest.raises(LedgerContradiction):
            bridge.respond(ExpertResponse("r:q0", wiener(1.0)))
        assert [q.query_id for q in bridge.pending()] == ["r:q0"]
        bridge.respond(ExpertResponse("r:q0", wiener(5.0)))
        assert bridge.await_response("r:q0", timeout=0.1).prior == wiener(5.0)

    def test_timeout(self):
        bridge = ExpertBridge()
        bridge.enqueue(make_query("r:q0"))
        start = time.monotonic()
        with pytest.raises(ExpertTimeout):
            bridge.await_response("r:q0", timeout=0.05)
        assert time.monotonic() - start < 2.0

    def test_fifo_order_per_run(self):
        bridge = ExpertBridge()
        for i in range(3):
            bridge.enqueue(make_query(f"r:q{i}"))
        assert [q.query_id for q in bridge.pending("r")] == ["r:q0", "r:q1", "r:q2"]
