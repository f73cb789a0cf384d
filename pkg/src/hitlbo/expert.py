"""The prior-providing oracle boundary.

Three experts answer prior queries from a running search:

* :class:`SimulatedExpert` always returns a configured ground-truth spec
  (useful when the objective is a synthetic GP realization),
* :class:`MLEExpert` fits hyperparameters from the run's own evaluations
  inside the queried cell, by exact log-likelihood over a fixed grid,
* :class:`RemoteExpert` forwards the query over an in-process queue to a
  human answering through the HTTP bridge.

Every response released to a run must be mutually consistent: the
:class:`ConsistencyLedger` tracks specs per domain region and rejects a
new spec whose kernel family differs from, or whose hyperparameters drift
beyond a relative tolerance of, any previously accepted spec on an
overlapping region.  The MLE expert consults the ledger and clamps its
fits into the feasible band, so an automated expert can never contradict
itself; humans answering remotely get a 409-style rejection instead.
"""

from __future__ import annotations

import threading
import time
import zlib
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from typing import Protocol, Sequence

import numpy as np

from .gp import PriorSpec, log_marginal_likelihood

DEFAULT_TOLERANCE = 0.25
VARIANCE_GRID_POINTS = 17
VARIANCE_GRID_DECADES = 6
LENGTHSCALE_GRID_POINTS = 9
MLE_HISTORY_CAP = 64
_VARIANCE_FLOOR = 1e-12


class ExpertTimeout(Exception):
    """No response arrived in time; the run should suspend, not abort."""


class LedgerContradiction(Exception):
    """A response contradicts an earlier prior on an overlapping region."""


@dataclass(frozen=True)
class CellStats:
    count: int
    minimum: float | None
    maximum: float | None
    mean: float | None

    @staticmethod
    def from_values(values: Sequence[float]) -> "CellStats":
        if not values:
            return CellStats(0, None, None, None)
        arr = np.asarray(values, dtype=np.float64)
        return CellStats(len(arr), float(arr.min()), float(arr.max()), float(arr.mean()))

    def to_wire(self) -> dict:
        return {"count": self.count, "min": self.minimum,
                "max": self.maximum, "mean": self.mean}


@dataclass(frozen=True)
class ExpertQuery:
    """Context shipped to the expert for one prior request.

    ``deadline`` is an ISO-8601 hint set by transports that enforce a
    timeout; the search itself never expires a query.
    """

    query_id: str
    run_id: str
    lo: int
    hi: int
    prefix: tuple[tuple[str, int], ...]
    stats: CellStats
    sibling: tuple[int, int] | None = None
    deadline: str | None = None

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def to_wire(self) -> dict:
        return {
            "query_id": self.query_id,
            "run_id": self.run_id,
            "cell": {"lo": self.lo, "hi": self.hi, "size": self.size},
            "prefix": {name: bit for name, bit in self.prefix},
            "stats": self.stats.to_wire(),
            "sibling": None if self.sibling is None
            else {"lo": self.sibling[0], "hi": self.sibling[1]},
            "deadline": self.deadline,
        }


@dataclass(frozen=True)
class ExpertResponse:
    query_id: str
    prior: PriorSpec
    annotation: str = ""


class Expert(Protocol):
    def respond(self, query: ExpertQuery,
                observations: Sequence[tuple[int, float]]) -> ExpertResponse: ...


def _relative_gap(a: float, b: float) -> float:
    denom = max(abs(a), abs(b))
    if denom == 0:
        return 0.0
    return abs(a - b) / denom


class ConsistencyLedger:
    """Per-run record of released priors, keyed by domain region.

    Two specs contradict when their regions overlap and either the kernel
    families differ or a shared hyperparameter (variance, lengthscale, mean)
    moves by more than ``tolerance`` relative to the larger magnitude.
    """

    def __init__(self, tolerance: float = DEFAULT_TOLERANCE):
        if tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        self.tolerance = tolerance
        self.entries: list[tuple[int, int, PriorSpec]] = []

    def _overlapping(self, lo: int, hi: int) -> list[tuple[int, int, PriorSpec]]:
        return [e for e in self.entries if e[0] <= hi and lo <= e[1]]

    def _conflict(self, old: PriorSpec, new: PriorSpec) -> str | None:
        if old.kernel != new.kernel:
            return f"kernel family {new.kernel!r} contradicts earlier {old.kernel!r}"
        tol = self.tolerance + 1e-12
        if _relative_gap(old.variance, new.variance) > tol:
            return (f"variance {new.variance:g} contradicts earlier {old.variance:g} "
                    f"(relative gap above {self.tolerance:.0%})")
        if old.lengthscale is not None and new.lengthscale is not None \
                and _relative_gap(old.lengthscale, new.lengthscale) > tol:
            return (f"lengthscale {new.lengthscale:g} contradicts earlier "
                    f"{old.lengthscale:g}")
        if _relative_gap(old.mean, new.mean) > tol:
            return f"mean {new.mean:g} contradicts earlier {old.mean:g}"
        return None

    def check(self, lo: int, hi: int, spec: PriorSpec) -> None:
        for elo, ehi, old in self._overlapping(lo, hi):
            reason = self._conflict(old, spec)
            if reason:
                raise LedgerContradiction(
                    f"region [{lo}, {hi}] vs [{elo}, {ehi}]: {reason}")

    def record(self, lo: int, hi: int, spec: PriorSpec) -> None:
        self.check(lo, hi, spec)
        self.entries.append((lo, hi, spec))

    def feasible_variance_band(self, lo: int, hi: int) -> tuple[float, float] | None:
        """Variance interval a new spec on [lo, hi] may use without conflict.

        Non-empty whenever the ledger invariant holds (overlapping entries
        are pairwise within tolerance of each other).
        """
        overlapping = self._overlapping(lo, hi)
        if not overlapping:
            return None
        variances = [e[2].variance for e in overlapping]
        band_lo = max(variances) / (1.0 + self.tolerance)
        band_hi = min(variances) * (1.0 + self.tolerance)
        if band_lo > band_hi:  # pragma: no cover - excluded by the invariant
            mid = float(np.sqrt(band_lo * band_hi))
            return mid, mid
        return band_lo, band_hi

    def to_state(self) -> list:
        from .gp import prior_to_wire
        return [[lo, hi, prior_to_wire(spec)] for lo, hi, spec in self.entries]

    @classmethod
    def from_state(cls, state: list, tolerance: float = DEFAULT_TOLERANCE) -> "ConsistencyLedger":
        from .gp import prior_from_wire
        ledger = cls(tolerance)
        ledger.entries = [(int(lo), int(hi), prior_from_wire(doc)) for lo, hi, doc in state]
        return ledger


class SimulatedExpert:
    """Constant oracle returning the configured ground-truth prior."""

    def __init__(self, truth: PriorSpec):
        self.truth = truth

    def respond(self, query: ExpertQuery,
                observations: Sequence[tuple[int, float]]) -> ExpertResponse:
        return ExpertResponse(query_id=query.query_id, prior=self.truth,
                              annotation="simulated ground truth")


def _variance_grid(center: float) -> np.ndarray:
    center = max(center, _VARIANCE_FLOOR)
    half = VARIANCE_GRID_DECADES / 2.0
    return center * np.power(10.0, np.linspace(-half, half, VARIANCE_GRID_POINTS))


def _lengthscale_grid(size: int) -> np.ndarray:
    return np.geomspace(max(1.0, size / 64.0), max(4.0, float(size)),
                        LENGTHSCALE_GRID_POINTS)


def mle_expert_respond(query: ExpertQuery, history: Sequence[tuple[int, float]],
                       default: PriorSpec) -> ExpertResponse:
    """Fit a prior to the run's evaluations inside the queried cell.

    Maximizes the exact GP log likelihood over a fixed hyperparameter grid:
    17 log-spaced variances spanning 6 decades around the sample variance
    and, for stationary kernels, 9 log-spaced lengthscales up to the cell
    size.  Points are taken in cell-local offsets.  Fewer than two
    observations, or a constant history, fall back to the configured
    default (with the variance floored for the constant case).
    """
    if len(history) < 2:
        return ExpertResponse(query.query_id, default, "default: insufficient history")
    if len(history) > MLE_HISTORY_CAP:
        # bounded fitting window keeps the grid search tractable
        digest = zlib.crc32(query.query_id.encode("utf-8"))
        keep = np.random.default_rng(np.random.SeedSequence(digest)).choice(
            len(history), size=MLE_HISTORY_CAP, replace=False)
        history = [history[i] for i in sorted(keep)]
    local = [(p - query.lo, v) for p, v in history]
    values = np.array([v for _, v in local])
    sample_var = float(np.var(values, ddof=1))
    if sample_var <= 0:
        floored = PriorSpec(default.kernel, _VARIANCE_FLOOR,
                            default.lengthscale, default.mean, default.jitter)
        return ExpertResponse(query.query_id, floored, "default: constant history")
    lengthscales = [default.lengthscale] if default.kernel == "wiener" \
        else list(_lengthscale_grid(query.size))
    best_spec = None
    best_ll = -np.inf
    for ls in lengthscales:
        for v in _variance_grid(sample_var):
            spec = PriorSpec(default.kernel, float(v),
                             None if default.kernel == "wiener" else float(ls),
                             default.mean, default.jitter)
            ll = log_marginal_likelihood(spec, local)
            if ll > best_ll:
                best_ll = ll
                best_spec = spec
    return ExpertResponse(query.query_id, best_spec,
                          f"mle fit on {len(local)} points")


class MLEExpert:
    """Likelihood-fitting expert that never contradicts its own history.

    Fits via :func:`mle_expert_respond`, then clamps the fitted variance
    into the feasible band implied by its earlier answers on overlapping
    regions, recorded in an internal ledger with the same tolerance the
    run enforces.  Every response therefore passes the run's consistency
    validation by construction.  One expert instance serves one run; the
    kernel family and mean come from the default spec and never move.
    """

    def __init__(self, default: PriorSpec, tolerance: float = DEFAULT_TOLERANCE):
        self.default = default
        self._ledger = ConsistencyLedger(tolerance)

    def respond(self, query: ExpertQuery,
                observations: Sequence[tuple[int, float]]) -> ExpertResponse:
        response = mle_expert_respond(query, observations, self.default)
        band = self._ledger.feasible_variance_band(query.lo, query.hi)
        spec = response.prior
        if band is not None:
            clamped = min(max(spec.variance, band[0]), band[1])
            if clamped != spec.variance:
                spec = PriorSpec(spec.kernel, clamped, spec.lengthscale,
                                 spec.mean, spec.jitter)
                response = ExpertResponse(
                    query.query_id, spec,
                    response.annotation + "; variance clamped for consistency")
        self._ledger.record(query.lo, query.hi, spec)
        return response


class ExpertBridge:
    """Thread-safe query queue between search drivers and a remote console.

    Pairing is exactly-once: a query is answered at most once, a response
    is delivered at most once, and responses are validated against the
    run's ledger before release (contradictions leave the query pending).
    """

    def __init__(self):
        self._cond = threading.Condition()
        self._pending: dict[str, ExpertQuery] = {}
        self._order: list[str] = []
        self._delivered: dict[str, ExpertResponse] = {}
        self._answered: set[str] = set()
        self._ledgers: dict[str, ConsistencyLedger] = {}

    def register_run(self, run_id: str, ledger: ConsistencyLedger) -> None:
        with self._cond:
            self._ledgers[run_id] = ledger

    def enqueue(self, query: ExpertQuery) -> str:
        with self._cond:
            if query.query_id in self._delivered:
                # answered while the run was suspended; response awaits pickup
                return query.query_id
            if query.query_id in self._pending or query.query_id in self._answered:
                raise ValueError(f"duplicate query id {query.query_id!r}")
            self._pending[query.query_id] = query
            self._order.append(query.query_id)
            self._cond.notify_all()
        return query.query_id

    def pending(self, run_id: str | None = None) -> list[ExpertQuery]:
        with self._cond:
            out = [self._pending[qid] for qid in self._order if qid in self._pending]
        if run_id is not None:
            out = [q for q in out if q.run_id == run_id]
        return out

    def respond(self, response: ExpertResponse) -> None:
        with self._cond:
            query = self._pending.get(response.query_id)
            if query is None:
                raise KeyError(f"unknown or already answered query {response.query_id!r}")
            ledger = self._ledgers.get(query.run_id)
            if ledger is not None:
                ledger.check(query.lo, query.hi, response.prior)
            del self._pending[response.query_id]
            self._order.remove(response.query_id)
            self._answered.add(response.query_id)
            self._delivered[response.query_id] = response
            self._cond.notify_all()

    def await_response(self, query_id: str, timeout: float | None) -> ExpertResponse:
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._cond:
            while True:
                if query_id in self._delivered:
                    return self._delivered.pop(query_id)
                if query_id in self._answered:
                    raise KeyError(f"response for {query_id!r} was already consumed")
                if query_id not in self._pending:
                    raise KeyError(f"unknown query {query_id!r}")
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    raise ExpertTimeout(f"no response for {query_id!r} in {timeout}s")
                self._cond.wait(timeout=remaining)

    def forget(self, query_id: str) -> None:
        """Drop a pending query (used when a suspended run retires it)."""
        with self._cond:
            self._pending.pop(query_id, None)
            if query_id in self._order:
                self._order.remove(query_id)


class RemoteExpert:
    """Expert backed by the bridge; blocks until a human answers or the
    timeout elapses (timeout raises :class:`ExpertTimeout` so the run can
    suspend and be resumed later)."""

    def __init__(self, bridge: ExpertBridge, timeout: float | None = None):
        self.bridge = bridge
        self.timeout = timeout

    def respond(self, query: ExpertQuery,
                observations: Sequence[tuple[int, float]]) -> ExpertResponse:
        if self.timeout is not None:
            deadline = datetime.now(timezone.utc) + timedelta(seconds=self.timeout)
            query = replace(query, deadline=deadline.isoformat())
        self.bridge.enqueue(query)
        try:
            return self.bridge.await_response(query.query_id, self.timeout)
        except ExpertTimeout:
            self.bridge.forget(query.query_id)
            raise
