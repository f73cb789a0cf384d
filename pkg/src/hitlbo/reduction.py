"""Reduce combinatorial instances to seeded univariate functions.

A reduction maps an inclusive integer domain ``[d0, d1]`` of size ``2^k``
bijectively onto the ``2^k`` extensions of a partial assignment, where k is
the number of unassigned variables.  Decoding a point repeatedly halves the
current interval: landing in the first half assigns 0 to the next variable
of a seeded permutation, landing in the second half assigns 1.  The halves
of ``{lo..hi}`` are ``{lo..mid}`` and ``{mid+1..hi}`` with
``mid = lo + (hi - lo) // 2``.

Permutations come from a Fisher-Yates shuffle driven by numpy's PCG64
generator (``numpy.random.default_rng``), so a 64-bit seed reproduces the
same function bit-for-bit on any platform.  Re-sampling with a fresh seed
permutes the same values into different positions; the value multiset over
the domain is seed-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .problems import ProblemInstance, evaluate_assignment

MAX_SEED = 1 << 64


@dataclass(frozen=True)
class ReducedFunction:
    """A pure univariate view of a problem instance.

    ``partial`` pins some variables; ``permutation`` orders the remaining
    ones and is derived from ``seed``.  Evaluation decodes a domain point to
    a full assignment, scores it, and multiplies by ``scale``.
    """

    instance: ProblemInstance
    seed: int
    scale: float
    partial: tuple[tuple[int, int], ...]
    d0: int
    d1: int
    permutation: tuple[int, ...]

    @property
    def domain_size(self) -> int:
        return self.d1 - self.d0 + 1

    @property
    def partial_map(self) -> dict[int, int]:
        return dict(self.partial)

    def __call__(self, x: int) -> float:
        return eval_point(self, x)


def _normalize_partial(instance: ProblemInstance,
                       partial: Mapping[int, int] | None) -> tuple[tuple[int, int], ...]:
    if not partial:
        return ()
    items = []
    for var, bit in partial.items():
        if not (0 <= var < instance.n):
            raise ValueError(f"partial assignment references undeclared variable {var}")
        if bit not in (0, 1):
            raise ValueError(f"partial assignment bit for variable {var} must be 0 or 1")
        items.append((int(var), int(bit)))
    items.sort()
    return tuple(items)


def build_reduction(instance: ProblemInstance, seed: int, scale: float = 1.0,
                    partial: Mapping[int, int] | None = None,
                    d0: int = 1, d1: int | None = None) -> ReducedFunction:
    """Build the univariate function for ``instance``.

    The domain ``[d0, d1]`` must have exactly ``2^k`` points for k unassigned
    variables; ``d1`` defaults to ``d0 + 2^k - 1``.  ``scale`` must be
    positive and multiplies every value.
    """
    if not (0 <= seed < MAX_SEED):
        raise ValueError("seed must fit in 64 bits")
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    part = _normalize_partial(instance, partial)
    assigned = {v for v, _ in part}
    unassigned = [i for i in range(instance.n) if i not in assigned]
    k = len(unassigned)
    if d1 is None:
        d1 = d0 + (1 << k) - 1
    if d0 < 1 or d1 < d0:
        raise ValueError(f"bad domain bounds [{d0}, {d1}]")
    if d1 - d0 + 1 != (1 << k):
        raise ValueError(
            f"domain size {d1 - d0 + 1} != 2^{k} for {k} unassigned variables")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    perm = tuple(int(v) for v in rng.permutation(np.asarray(unassigned, dtype=np.int64)))
    return ReducedFunction(instance=instance, seed=int(seed), scale=float(scale),
                           partial=part, d0=int(d0), d1=int(d1), permutation=perm)


def decode_assignment(rf: ReducedFunction, x: int) -> tuple[int, ...]:
    """Map a domain point to the full assignment it encodes."""
    if not (rf.d0 <= x <= rf.d1):
        raise ValueError(f"point {x} outside domain [{rf.d0}, {rf.d1}]")
    bits = dict(rf.partial)
    lo, hi = rf.d0, rf.d1
    depth = 0
    while lo < hi:
        mid = lo + (hi - lo) // 2
        if x <= mid:
            hi = mid
            bits[rf.permutation[depth]] = 0
        else:
            lo = mid + 1
            bits[rf.permutation[depth]] = 1
        depth += 1
    return tuple(bits[i] for i in range(rf.instance.n))


def eval_point(rf: ReducedFunction, x: int) -> float:
    """Scaled objective value at a domain point; pure and deterministic."""
    return rf.scale * evaluate_assignment(rf.instance, decode_assignment(rf, x))


def resample(rf: ReducedFunction, new_seed: int,
             new_scale: float | None = None) -> ReducedFunction:
    """Same instance, partial assignment and domain; fresh permutation."""
    return build_reduction(rf.instance, new_seed,
                           scale=rf.scale if new_scale is None else new_scale,
                           partial=dict(rf.partial), d0=rf.d0, d1=rf.d1)


def as_callable(rf: ReducedFunction) -> Callable[[int], float]:
    return rf.__call__


def descriptor(rf: ReducedFunction, instance_ref: dict | None = None) -> dict:
    """Serializable document from which the function can be rebuilt exactly."""
    return {
        "instance": instance_ref,
        "seed": rf.seed,
        "scale": rf.scale,
        "partial": {str(v): b for v, b in rf.partial},
        "d0": rf.d0,
        "d1": rf.d1,
    }


def from_descriptor(doc: Mapping, instance: ProblemInstance) -> ReducedFunction:
    partial = {int(k): int(v) for k, v in (doc.get("partial") or {}).items()}
    return build_reduction(instance, int(doc["seed"]), scale=float(doc["scale"]),
                           partial=partial, d0=int(doc["d0"]), d1=int(doc["d1"]))
