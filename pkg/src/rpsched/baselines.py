"""Greedy baselines (least-flexible job / machine) and exhaustive oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Assignment, Instance, SchedulingError, require_valid


class BudgetExceededError(SchedulingError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_states: int = 5_000_000

    def __post_init__(self):
        if self.max_states < 1:
            raise ValueError("max_states must be positive")


def lfj(inst: Instance) -> Assignment:
    """Least flexible job first, each onto its currently least-loaded eligible processor."""
    require_valid(inst)
    order = sorted(range(inst.n), key=lambda j: (len(inst.tasks[j].eligible), j))
    loads = [0.0] * inst.m
    proc_of = [-1] * inst.n
    for j in order:
        task = inst.tasks[j]
        i = min(sorted(task.eligible), key=lambda i: loads[i])
        proc_of[j] = i
        loads[i] += task.work
    return Assignment(tuple(proc_of))


def lfm(inst: Instance, turns: str = "round_robin") -> Assignment:
    """Least flexible machine first.

    Processors ordered by their number of eligible tasks take round-robin
    turns; on its turn a processor grabs its largest unassigned eligible task.
    With ``turns="sequential"`` each processor instead takes all of its
    remaining eligible tasks before the next one moves (the other reading of
    the rule, kept for sensitivity runs).
    """
    if turns not in ("round_robin", "sequential"):
        raise ValueError(f"unknown turn rule {turns!r}")
    require_valid(inst)
    candidates = [[] for _ in range(inst.m)]
    for j, task in enumerate(inst.tasks):
        for i in task.eligible:
            candidates[i].append(j)
    order = sorted(range(inst.m), key=lambda i: (len(candidates[i]), i))
    for i in order:
        candidates[i].sort(key=lambda j: (-inst.tasks[j].work, j))

    proc_of = [-1] * inst.n
    left = inst.n
    cursor = [0] * inst.m
    while left:
        for i in order:
            cand = candidates[i]
            k = cursor[i]
            while k < len(cand) and proc_of[cand[k]] >= 0:
                k += 1
            cursor[i] = k
            if k < len(cand):
                proc_of[cand[k]] = i
                left -= 1
                if turns == "sequential":
                    for j in cand[k + 1:]:
                        if proc_of[j] < 0:
                            proc_of[j] = i
                            left -= 1
                    cursor[i] = len(cand)
    return Assignment(tuple(proc_of))


def _state_count(inst: Instance) -> int:
    count = 1
    for task in inst.tasks:
        count *= len(task.eligible)
    return count


def _enumerate_loads(inst: Instance, budget: OracleBudget, works, chunk=1 << 16):
    """Yield (first linear index, digits, loads) over all eligible assignments.

    The linear index is a mixed-radix counter with the last task varying
    fastest, so ascending index is lexicographic order of ``proc_of``.
    """
    total = _state_count(inst)
    if total > budget.max_states:
        raise BudgetExceededError(
            f"{total} assignments exceed the oracle budget of {budget.max_states}; use fdr instead")
    elig = [np.array(sorted(t.eligible)) for t in inst.tasks]
    radix = [len(e) for e in elig]
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = np.empty((inst.n, idx.size), dtype=np.int64)
        rest = idx
        for j in range(inst.n - 1, -1, -1):
            rest, digits[j] = np.divmod(rest, radix[j])
        loads = np.zeros((idx.size, inst.m))
        rows = np.arange(idx.size)
        for j in range(inst.n):
            loads[rows, elig[j][digits[j]]] += works[j]
        yield start, digits, loads


def _decode(inst: Instance, digits_col) -> Assignment:
    elig = inst.eligible_lists()
    return Assignment(tuple(elig[j][d] for j, d in enumerate(digits_col)))


def brute_force_opt(inst: Instance, budget: OracleBudget = OracleBudget()) -> Assignment:
    """Energy-minimal assignment by exhaustive enumeration (first in lexicographic order on ties)."""
    require_valid(inst)
    best_val, best = np.inf, None
    for _, digits, loads in _enumerate_loads(inst, budget, inst.works):
        # argmin of sum(L**alpha) is invariant to the C**(alpha-1) divisor
        vals = np.sum(loads**inst.alpha, axis=1)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best = vals[k], digits[:, k].copy()
    return _decode(inst, best)


def brute_force_minmax(inst: Instance, budget: OracleBudget = OracleBudget()) -> int:
    """Exact min over assignments of the largest per-processor task count."""
    require_valid(inst)
    best = inst.n
    for _, _, counts in _enumerate_loads(inst, budget, np.ones(inst.n)):
        best = min(best, int(counts.max(axis=1).min()))
    return best
