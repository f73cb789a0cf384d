"""Cell-tree search: prior-queried branch and bound over a reduced domain.

The engine keeps a partition of the root domain ``[1, 2^n]`` into cells.
Each expansion splits the cell with the highest upper bound into two equal
halves; the halves correspond to fixing the next variable of the instance's
declared order to 0 (first half) or 1 (second half).  A fresh cell is
assessed by re-sampling its objective S times (new variable permutation of
the unassigned suffix, cell prefix as partial assignment, cell bounds as
the domain), querying the expert for a prior before each re-sample, and
running the budgeted BO loop; the mean of the S maxima, inflated by the
size-vs-budget ratio, is the cell's upper bound.

Cells with fewer than four points are enumerated exhaustively once and can
never be expanded; cells whose budget covers every point are likewise
marked exhausted after assessment, since nothing about them remains
unknown.  The run stops when the expansion budget is spent, no expandable
cell remains, or every remaining cell is dominated: its upper bound falls
below ``(incumbent - epsilon) / dominance_factor``.

A remote expert that fails to answer suspends the run: the engine raises
:class:`SearchSuspended` carrying a JSON-serializable state from which a
new driver can resume without repeating completed work.
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass, field
from threading import Lock
from typing import Sequence

import numpy as np

from .bo import BOConfig, cell_ub, dominance_factor, run_bo
from .expert import (CellStats, ConsistencyLedger, Expert, ExpertQuery,
                     ExpertTimeout, LedgerContradiction)
from .problems import ProblemInstance
from .reduction import build_reduction, decode_assignment, eval_point

EXHAUSTIVE_CELL_SIZE = 4
MAX_SEARCH_VARIABLES = 40

STATE_FORMAT = "hitlbo-search-state-v1"


class CellStatus(str, enum.Enum):
    ACTIVE = "active"
    EXPANDED = "expanded"
    EXHAUSTED = "exhausted"


class SearchSuspended(Exception):
    """Raised when the expert stalls; carries a resumable state document."""

    def __init__(self, token: str, state: dict, reason: str):
        self.token = token
        self.state = state
        self.reason = reason
        super().__init__(f"run suspended ({reason}); resume token {token}")


@dataclass
class Cell:
    lo: int
    hi: int
    prefix: tuple[tuple[int, int], ...]
    seq: int
    status: CellStatus = CellStatus.ACTIVE
    samples: list[float] = field(default_factory=list)
    val: float | None = None
    ub: float | None = None

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    @property
    def depth(self) -> int:
        return len(self.prefix)

    def to_dict(self, variables: Sequence[str] | None = None) -> dict:
        prefix = {str(v): b for v, b in self.prefix} if variables is None \
            else {variables[v]: b for v, b in self.prefix}
        return {"lo": self.lo, "hi": self.hi, "size": self.size, "seq": self.seq,
                "status": self.status.value, "prefix": prefix,
                "samples": list(self.samples), "val": self.val, "ub": self.ub}


@dataclass(frozen=True)
class SearchConfig:
    """Re-samples per cell (s), BO budget per re-sample (x), expansion
    budget, dominance slack, acquisition settings, scale, and master seed."""

    s: int = 4
    x: int = 32
    max_expansions: int = 16
    epsilon: float = 0.0
    acquisition: str = "ucb"
    beta: float = 2.0
    xi: float = 0.0
    scale: float = 1.0
    seed: int = 0
    ledger_tolerance: float = 0.25

    def __post_init__(self):
        if self.s < 1 or self.x < 1 or self.max_expansions < 1:
            raise ValueError("s, x and max_expansions must all be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def to_dict(self) -> dict:
        return {"s": self.s, "x": self.x, "max_expansions": self.max_expansions,
                "epsilon": self.epsilon, "acquisition": self.acquisition,
                "beta": self.beta, "xi": self.xi, "scale": self.scale,
                "seed": self.seed, "ledger_tolerance": self.ledger_tolerance}

    @classmethod
    def from_dict(cls, doc: dict) -> "SearchConfig":
        return cls(**{k: doc[k] for k in cls.__dataclass_fields__ if k in doc})


@dataclass(frozen=True)
class SearchResult:
    run_id: str
    best_value: float
    best_point: int | None
    best_assignment: tuple[int, ...] | None
    expansions: int
    total_evaluations: int
    expert_queries: int
    stop_reason: str
    epsilon_certificate: dict
    expansion_trace: tuple[dict, ...]
    cells: tuple[dict, ...]
    eval_trace: tuple[tuple[int, int, int, int, int, float], ...]

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "best_value": self.best_value,
            "best_point": self.best_point,
            "best_assignment": list(self.best_assignment)
            if self.best_assignment is not None else None,
            "expansions": self.expansions,
            "total_evaluations": self.total_evaluations,
            "expert_queries": self.expert_queries,
            "stop_reason": self.stop_reason,
            "epsilon_certificate": self.epsilon_certificate,
            "expansion_trace": list(self.expansion_trace),
            "cells": list(self.cells),
        }


def expand(cell: Cell, order: Sequence[int]) -> tuple[Cell, Cell]:
    """Split a cell into halves, extending the prefix along the fixed order.

    The caller owns sequence numbering; children come back with seq -1.
    """
    if cell.status is not CellStatus.ACTIVE:
        raise ValueError(f"cannot expand a {cell.status.value} cell")
    if cell.size < 2:
        raise ValueError("cannot expand a single-point cell")
    mid = cell.lo + (cell.hi - cell.lo) // 2
    var = order[cell.depth]
    a = Cell(lo=cell.lo, hi=mid, prefix=cell.prefix + ((var, 0),), seq=-1)
    b = Cell(lo=mid + 1, hi=cell.hi, prefix=cell.prefix + ((var, 1),), seq=-1)
    cell.status = CellStatus.EXPANDED
    return a, b


def select_cell(cells: Sequence[Cell]) -> Cell | None:
    """Highest assessed upper bound among expandable cells; ties prefer the
    larger cell, then the smaller left edge.  None signals termination."""
    candidates = [c for c in cells
                  if c.status is CellStatus.ACTIVE and c.size >= 2 and c.ub is not None]
    if not candidates:
        return None
    return max(candidates, key=lambda c: (c.ub, c.size, -c.lo))


class SearchDriver:
    """Single-owner state machine for one run; see the module docstring."""

    def __init__(self, instance: ProblemInstance, expert: Expert, cfg: SearchConfig,
                 run_id: str = "run-local"):
        if instance.n > MAX_SEARCH_VARIABLES:
            raise ValueError(f"n={instance.n} exceeds the {MAX_SEARCH_VARIABLES}-variable limit")
        self.instance = instance
        self.expert = expert
        self.cfg = cfg
        self.run_id = run_id
        self.ledger = ConsistencyLedger(cfg.ledger_tolerance)
        self.cells: list[Cell] = []
        self.eval_trace: list[tuple[int, int, int, int, int, float]] = []
        self.expansion_trace: list[dict] = []
        self.incumbent: tuple[float, int, tuple[int, ...]] | None = None
        self.expansions = 0
        self.total_evaluations = 0
        self.expert_queries = 0
        self.stop_reason: str | None = None
        self._started = False
        self._current_seq: int | None = None
        self._pending_children: list[int] | None = None
        self._progress: dict[int, dict] = {}
        self._next_seq = 0
        self._query_counter = 0
        self._lock = Lock()

    # -- plumbing -----------------------------------------------------------

    def _new_cell(self, cell: Cell) -> Cell:
        cell.seq = self._next_seq
        self._next_seq += 1
        self.cells.append(cell)
        return cell

    def _cell(self, seq: int) -> Cell:
        for c in self.cells:
            if c.seq == seq:
                return c
        raise KeyError(f"no cell with seq {seq}")

    def _derive_seed(self, cell_seq: int, sample: int, purpose: int) -> int:
        ss = np.random.SeedSequence((self.cfg.seed, cell_seq, sample, purpose))
        return int(ss.generate_state(1, np.uint64)[0])

    def _history_in(self, lo: int, hi: int) -> list[tuple[int, float]]:
        return [(row[4], row[5]) for row in self.eval_trace if lo <= row[4] <= hi]

    @staticmethod
    def _distinct_history(raw: list[tuple[int, float]]) -> list[tuple[int, float]]:
        """Latest value per point; re-samples revisit points under different
        permutations and the expert's observation set wants distinct points."""
        dedup: dict[int, float] = {}
        for p, v in raw:
            dedup[p] = v
        return sorted(dedup.items())

    def _offer_incumbent(self, value: float, point: int, assignment: tuple[int, ...]) -> None:
        with self._lock:
            if self.incumbent is None or value > self.incumbent[0]:
                self.incumbent = (value, point, assignment)

    # -- assessment ---------------------------------------------------------

    def _assess_exhaustive(self, cell: Cell) -> None:
        rf = build_reduction(self.instance, self._derive_seed(cell.seq, 0, 0),
                             scale=self.cfg.scale, partial=dict(cell.prefix),
                             d0=cell.lo, d1=cell.hi)
        best_v, best_x = None, None
        for i, x in enumerate(range(cell.lo, cell.hi + 1)):
            v = eval_point(rf, x)
            self.eval_trace.append((cell.lo, cell.hi, 0, i, x, v))
            if best_v is None or v > best_v:
                best_v, best_x = v, x
        self.total_evaluations += cell.size
        self._offer_incumbent(best_v, best_x, decode_assignment(rf, best_x))
        with self._lock:
            cell.samples = [best_v]
            cell.val = best_v
            cell.ub = best_v
            cell.status = CellStatus.EXHAUSTED

    def _assess(self, cell: Cell, sibling: Cell | None) -> None:
        if cell.size < EXHAUSTIVE_CELL_SIZE:
            self._assess_exhaustive(cell)
            return
        progress = self._progress.setdefault(cell.seq, {"samples": [], "next": 0})
        x_eff = min(self.cfg.x, cell.size)
        for s in range(progress["next"], self.cfg.s):
            rf = build_reduction(self.instance, self._derive_seed(cell.seq, s, 0),
                                 scale=self.cfg.scale, partial=dict(cell.prefix),
                                 d0=cell.lo, d1=cell.hi)
            raw_history = self._history_in(cell.lo, cell.hi)
            history = self._distinct_history(raw_history)
            query = ExpertQuery(
                query_id=f"{self.run_id}:q{self._query_counter}",
                run_id=self.run_id,
                lo=cell.lo, hi=cell.hi,
                prefix=tuple((self.instance.variables[v], b) for v, b in cell.prefix),
                stats=CellStats.from_values([v for _, v in raw_history]),
                sibling=(sibling.lo, sibling.hi) if sibling is not None else None,
            )
            response = self.expert.respond(query, history)
            self._query_counter += 1
            self.expert_queries += 1
            self.ledger.record(cell.lo, cell.hi, response.prior)
            bo_cfg = BOConfig(budget=self.cfg.x, acquisition=self.cfg.acquisition,
                              beta=self.cfg.beta, xi=self.cfg.xi,
                              seed=self._derive_seed(cell.seq, s, 1))
            result = run_bo(rf, (cell.lo, cell.hi), response.prior, bo_cfg)
            for i, (x, v) in enumerate(result.trace):
                self.eval_trace.append((cell.lo, cell.hi, s, i, x, v))
            self.total_evaluations += result.evaluations_used
            self._offer_incumbent(result.best_value, result.best_point,
                                  decode_assignment(rf, result.best_point))
            progress["samples"].append(result.best_value)
            progress["next"] = s + 1
        samples = progress.pop("samples")
        self._progress.pop(cell.seq, None)
        with self._lock:
            cell.samples = samples
            cell.val = statistics.fmean(samples)
            cell.ub = cell_ub(cell.val, x_eff, cell.size)
            cell.status = CellStatus.EXHAUSTED if x_eff >= cell.size else CellStatus.ACTIVE

    # -- stopping -----------------------------------------------------------

    def _dominance(self) -> tuple[float | None, float | None]:
        """(factor, threshold) of the dominance stop; Nones when undefined."""
        try:
            factor = dominance_factor(self.cfg.x)
        except ValueError:
            return None, None
        if self.incumbent is None:
            return factor, None
        return factor, (self.incumbent[0] - self.cfg.epsilon) / factor

    def _active_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.status is CellStatus.ACTIVE]

    def _all_dominated(self) -> bool:
        factor, threshold = self._dominance()
        if threshold is None:
            return False
        active = [c for c in self._active_cells() if c.ub is not None]
        return bool(active) and all(c.ub < threshold for c in active)

    # -- main loop ----------------------------------------------------------

    def run(self) -> SearchResult:
        try:
            self._loop()
        except (ExpertTimeout, LedgerContradiction) as exc:
            reason = "expert timeout" if isinstance(exc, ExpertTimeout) \
                else f"ledger contradiction: {exc}"
            state = self.to_state()
            raise SearchSuspended(token=f"{self.run_id}:resume@q{self._query_counter}",
                                  state=state, reason=reason) from exc
        return self.result()

    def _loop(self) -> None:
        if not self._started:
            self._started = True
            root = self._new_cell(Cell(lo=1, hi=1 << self.instance.n, prefix=(), seq=-1))
            if root.size < EXHAUSTIVE_CELL_SIZE:
                self._assess_exhaustive(root)
                self.stop_reason = "exhausted"
                return
            self._current_seq = root.seq
        order = list(range(self.instance.n))
        while self.stop_reason is None:
            if self._pending_children is None:
                current = self._cell(self._current_seq)
                with self._lock:
                    a, b = expand(current, order)
                    self._new_cell(a)
                    self._new_cell(b)
                self.expansion_trace.append({
                    "index": self.expansions, "lo": current.lo, "hi": current.hi,
                    "size": current.size, "ub_at_selection": current.ub,
                    "child_size": a.size,
                })
                self._pending_children = [a.seq, b.seq]
            seq_a, seq_b = self._pending_children
            a, b = self._cell(seq_a), self._cell(seq_b)
            if a.val is None or a.seq in self._progress:
                self._assess(a, b)
            if b.val is None or b.seq in self._progress:
                self._assess(b, a)
            self._pending_children = None
            self.expansions += 1
            if self.expansions >= self.cfg.max_expansions:
                self.stop_reason = "max_expansions"
                break
            nxt = select_cell(self.cells)
            if nxt is None:
                self.stop_reason = "exhausted"
                break
            if self._all_dominated():
                self.stop_reason = "dominance"
                break
            self._current_seq = nxt.seq

    # -- results and state --------------------------------------------------

    def result(self) -> SearchResult:
        factor, threshold = self._dominance()
        active_ubs = [c.ub for c in self._active_cells() if c.ub is not None]
        certificate = {
            "epsilon": self.cfg.epsilon,
            "dominance_factor": factor,
            "threshold": threshold,
            "max_active_ub": max(active_ubs) if active_ubs else None,
            "all_dominated": self._all_dominated(),
        }
        value, point, assignment = self.incumbent if self.incumbent is not None \
            else (float("-inf"), None, None)
        return SearchResult(
            run_id=self.run_id,
            best_value=value, best_point=point, best_assignment=assignment,
            expansions=self.expansions,
            total_evaluations=self.total_evaluations,
            expert_queries=self.expert_queries,
            stop_reason=self.stop_reason or "running",
            epsilon_certificate=certificate,
            expansion_trace=tuple(self.expansion_trace),
            cells=tuple(c.to_dict(self.instance.variables) for c in self.cells),
            eval_trace=tuple(self.eval_trace),
        )

    def snapshot(self) -> dict:
        """Thread-safe view for dashboards; readable while the run mutates."""
        with self._lock:
            cells = [c.to_dict(self.instance.variables) for c in self.cells]
            incumbent = None if self.incumbent is None else {
                "value": self.incumbent[0], "point": self.incumbent[1],
                "assignment": list(self.incumbent[2])}
        return {
            "run_id": self.run_id,
            "cells": cells,
            "incumbent": incumbent,
            "expansions": self.expansions,
            "total_evaluations": self.total_evaluations,
            "expert_queries": self.expert_queries,
            "stop_reason": self.stop_reason,
        }

    def to_state(self) -> dict:
        return {
            "format": STATE_FORMAT,
            "run_id": self.run_id,
            "config": self.cfg.to_dict(),
            "started": self._started,
            "cells": [{"lo": c.lo, "hi": c.hi, "prefix": [list(p) for p in c.prefix],
                       "seq": c.seq, "status": c.status.value,
                       "samples": list(c.samples), "val": c.val, "ub": c.ub}
                      for c in self.cells],
            "current_seq": self._current_seq,
            "pending_children": self._pending_children,
            "progress": {str(k): v for k, v in self._progress.items()},
            "next_seq": self._next_seq,
            "query_counter": self._query_counter,
            "expansions": self.expansions,
            "total_evaluations": self.total_evaluations,
            "expert_queries": self.expert_queries,
            "incumbent": None if self.incumbent is None else
            {"value": self.incumbent[0], "point": self.incumbent[1],
             "assignment": list(self.incumbent[2])},
            "eval_trace": [list(r) for r in self.eval_trace],
            "expansion_trace": self.expansion_trace,
            "ledger": self.ledger.to_state(),
            "stop_reason": self.stop_reason,
        }

    @classmethod
    def from_state(cls, instance: ProblemInstance, expert: Expert,
                   state: dict) -> "SearchDriver":
        if state.get("format") != STATE_FORMAT:
            raise ValueError(f"unsupported state format {state.get('format')!r}")
        cfg = SearchConfig.from_dict(state["config"])
        driver = cls(instance, expert, cfg, run_id=state["run_id"])
        driver.ledger = ConsistencyLedger.from_state(state["ledger"], cfg.ledger_tolerance)
        driver.cells = [Cell(lo=c["lo"], hi=c["hi"],
                             prefix=tuple((int(v), int(b)) for v, b in c["prefix"]),
                             seq=c["seq"], status=CellStatus(c["status"]),
                             samples=list(c["samples"]), val=c["val"], ub=c["ub"])
                        for c in state["cells"]]
        driver.eval_trace = [tuple(r) for r in state["eval_trace"]]
        driver.expansion_trace = list(state["expansion_trace"])
        inc = state["incumbent"]
        driver.incumbent = None if inc is None else (
            inc["value"], inc["point"], tuple(inc["assignment"]))
        driver.expansions = state["expansions"]
        driver.total_evaluations = state["total_evaluations"]
        driver.expert_queries = state["expert_queries"]
        driver.stop_reason = state["stop_reason"]
        driver._started = state["started"]
        driver._current_seq = state["current_seq"]
        driver._pending_children = state["pending_children"]
        driver._progress = {int(k): v for k, v in state["progress"].items()}
        driver._next_seq = state["next_seq"]
        driver._query_counter = state["query_counter"]
        return driver


def run_search(instance: ProblemInstance, expert: Expert, cfg: SearchConfig,
               run_id: str = "run-local") -> SearchResult:
    """Run the full loop; deterministic given seeds and a deterministic expert."""
    return SearchDriver(instance, expert, cfg, run_id=run_id).run()
