"""Optimal fractional assignment (integrality relaxed to ``0 <= x_ij <= 1``).

The objective is a sum of a strictly convex function of each processor's
load, so at an optimum every task keeps its mass on its least-loaded
eligible processors.  Those optimal loads do not depend on ``alpha`` and
are computed exactly by a densest-subset decomposition: the processor set
``S`` maximising ``W(S) / |S|`` (``W(S)`` = work of tasks confined to
``S``) is filled to that level, removed with its tasks, and the rest is
solved recursively.  Each densest set is found with Dinkelbach iterations,
one max-flow/min-cut per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CAPACITY_TOL, InfeasibleError, Instance, SchedulingError, energy_of_loads, require_valid
from .flow import Dinic


class ConvergenceError(SchedulingError):
    pass


@dataclass(frozen=True)
class FractionalAssignment:
    x: np.ndarray  # shape (m, n); zero outside eligible pairs
    tol: float = 1e-7

    def loads(self, inst: Instance) -> np.ndarray:
        return self.x @ inst.works

    def objective(self, inst: Instance) -> float:
        return energy_of_loads(self.loads(inst), inst.C, inst.alpha)

    def entries(self, threshold: float = 0.0):
        """Yield ``(processor, task, x_ij)`` for every entry above ``threshold``."""
        for i, j in zip(*np.nonzero(self.x > threshold)):
            yield int(i), int(j), float(self.x[i, j])


@dataclass(frozen=True)
class RelaxReport:
    objective: float
    iterations: int
    max_stationarity_residual: float
    levels: list = field(default_factory=list, repr=False)  # (processors, load) per density level


def _densest_level(procs, tasks, elig, works, max_iter):
    """Densest processor subset of the active subproblem, its load level and flow calls used."""
    def confined(S):
        return [j for j in tasks if elig[j] <= S]

    S = set(procs)
    lam = sum(works[j] for j in tasks) / len(S)
    total = sum(works[j] for j in tasks)
    eps = 1e-12 * total
    calls = 0
    while True:
        if calls >= max_iter:
            raise ConvergenceError(f"densest-subset search did not settle in {max_iter} flow calls")
        pidx = {i: 2 + k for k, i in enumerate(procs)}
        tidx = {j: 2 + len(pidx) + k for k, j in enumerate(tasks)}
        g = Dinic(2 + len(pidx) + len(tidx), eps=eps)
        for j in tasks:
            g.add_edge(0, tidx[j], works[j])
            for i in elig[j]:
                g.add_edge(tidx[j], pidx[i], 2 * total)
        for i in procs:
            g.add_edge(pidx[i], 1, lam)
        flow = g.max_flow(0, 1)
        calls += 1
        if total - flow <= 1e-10 * total:
            return S, lam, calls
        side = g.source_side(0)
        S_new = {i for i in procs if pidx[i] in side}
        if not S_new:
            return S, lam, calls
        lam_new = sum(works[j] for j in confined(S_new)) / len(S_new)
        if lam_new <= lam * (1 + 1e-13):
            return S, lam, calls
        S, lam = S_new, lam_new


def _fill_level(S, tasks, elig, works, lam, x):
    """Route the tasks confined to ``S`` so every processor of ``S`` carries ``lam``."""
    S = sorted(S)
    total = sum(works[j] for j in tasks)
    pidx = {i: 2 + k for k, i in enumerate(S)}
    tidx = {j: 2 + len(pidx) + k for k, j in enumerate(tasks)}
    g = Dinic(2 + len(pidx) + len(tidx), eps=1e-14 * total)
    pair = []
    for j in tasks:
        g.add_edge(0, tidx[j], works[j])
        for i in sorted(elig[j]):
            pair.append((g.add_edge(tidx[j], pidx[i], 2 * total), i, j))
    for i in S:
        # tiny headroom so floating error cannot strand a sliver of work
        g.add_edge(pidx[i], 1, lam * (1 + 1e-12))
    g.max_flow(0, 1)
    for e, i, j in pair:
        f = g.flow_on(e)
        if f > 0:
            x[i, j] = f / works[j]


def solve_relaxation(inst: Instance, tol: float = 1e-7, max_iter: int = 1_000_000):
    """Optimal fractional assignment and a diagnostics report.

    Raises :class:`InfeasibleError` if even the fractional optimum (which
    minimises the largest load) exceeds ``s_max * C``.
    """
    require_valid(inst)
    if not tol > 0:
        raise ValueError("tol must be positive")
    works = inst.works
    x = np.zeros((inst.m, inst.n))
    procs = list(range(inst.m))
    tasks = list(range(inst.n))
    elig = {j: set(t.eligible) for j, t in enumerate(inst.tasks)}
    levels = []
    iterations = 0
    while tasks:
        S, lam, calls = _densest_level(procs, tasks, elig, works, max_iter - iterations)
        iterations += calls
        if not levels and lam > inst.capacity + CAPACITY_TOL:
            raise InfeasibleError(
                f"fractional min-max load {lam:g} exceeds s_max*C = {inst.capacity:g}", S)
        inside = [j for j in tasks if elig[j] <= S]
        _fill_level(S, inside, elig, works, lam, x)
        iterations += 1
        levels.append((sorted(S), lam))
        procs = [i for i in procs if i not in S]
        tasks = [j for j in tasks if j not in set(inside)]
        for j in tasks:
            elig[j] -= S

    x[x < 1e-15] = 0.0
    x /= x.sum(axis=0, keepdims=True)
    frac = FractionalAssignment(x, tol)
    report = RelaxReport(frac.objective(inst), iterations, stationarity_residual(inst, frac), levels)
    return frac, report


def stationarity_residual(inst: Instance, x: FractionalAssignment) -> float:
    """Largest load gap between a processor carrying a task's mass and another eligible one.

    Zero exactly at a fractional optimum.
    """
    loads = x.loads(inst)
    worst = 0.0
    for j, task in enumerate(inst.tasks):
        elig = sorted(task.eligible)
        floor = min(loads[i] for i in elig)
        for i in elig:
            if x.x[i, j] > x.tol:
                worst = max(worst, loads[i] - floor)
    return float(worst)
