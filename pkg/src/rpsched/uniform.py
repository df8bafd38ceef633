"""Exact solver for equal-work tasks.

Min-max task count is found by binary search over a uniform source capacity
on the bipartite network ``s -> processors -> tasks -> t``.  The optimal
schedule is then built by repeatedly peeling off a most-loaded processor
together with its tasks and re-solving the residual network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import Assignment, InfeasibleError, Instance, InvalidInstanceError, require_valid
from .flow import Dinic

SOURCE = "s"
SINK = "t"


@dataclass(frozen=True)
class FlowNetwork:
    """Bipartite assignment network over a subset of processors and tasks."""

    processors: tuple[int, ...]
    tasks: tuple[int, ...]
    eligible: dict  # task -> tuple of processors (restricted to ``processors``)
    c: int

    @property
    def edges(self) -> list[tuple[object, object, int]]:
        out = [(SOURCE, ("P", i), self.c) for i in self.processors]
        out += [(("P", i), ("J", j), 1) for j in self.tasks for i in self.eligible[j]]
        out += [(("J", j), SINK, 1) for j in self.tasks]
        return out

    def with_capacity(self, c: int) -> "FlowNetwork":
        return FlowNetwork(self.processors, self.tasks, self.eligible, int(c))

    def without(self, processor: int, tasks) -> "FlowNetwork":
        """Delete a processor, the given tasks and every edge touching them."""
        tasks = set(tasks)
        procs = tuple(i for i in self.processors if i != processor)
        keep = tuple(j for j in self.tasks if j not in tasks)
        elig = {j: tuple(i for i in self.eligible[j] if i != processor) for j in keep}
        return FlowNetwork(procs, keep, elig, self.c)


@dataclass(frozen=True)
class MinMaxResult:
    l_star: int
    peel_processor: int
    peel_tasks: frozenset[int]
    matching: dict = field(repr=False)  # task -> processor for every task in the network
    flow_calls: int = 0

    @property
    def assignment(self) -> Assignment:
        n = len(self.matching)
        if sorted(self.matching) != list(range(n)):
            raise ValueError("matching does not cover a full instance")
        return Assignment(tuple(self.matching[j] for j in range(n)))


def is_uniform(inst: Instance, rel_tol: float = 1e-12) -> bool:
    w0 = inst.tasks[0].work
    return all(math.isclose(t.work, w0, rel_tol=rel_tol) for t in inst.tasks)


def _require_uniform(inst: Instance) -> None:
    require_valid(inst)
    if not is_uniform(inst):
        raise InvalidInstanceError(["uniform module requires equal works"])


def build_network(inst: Instance, c: int) -> FlowNetwork:
    _require_uniform(inst)
    elig = {j: tuple(sorted(t.eligible)) for j, t in enumerate(inst.tasks)}
    return FlowNetwork(tuple(range(inst.m)), tuple(range(inst.n)), elig, int(c))


def max_flow(net: FlowNetwork) -> tuple[int, dict]:
    """Integral max flow; returns its value and the task -> processor matching it encodes."""
    pidx = {i: 2 + k for k, i in enumerate(net.processors)}
    tidx = {j: 2 + len(pidx) + k for k, j in enumerate(net.tasks)}
    g = Dinic(2 + len(pidx) + len(tidx))
    for i in net.processors:
        g.add_edge(0, pidx[i], net.c)
    pair_edges = []
    for j in net.tasks:
        for i in net.eligible[j]:
            pair_edges.append((g.add_edge(pidx[i], tidx[j], 1), i, j))
        g.add_edge(tidx[j], 1, 1)
    value = g.max_flow(0, 1)
    matching = {j: i for e, i, j in pair_edges if g.flow_on(e) > 0}
    return value, matching


def _loads(net: FlowNetwork, matching: dict) -> dict:
    counts = {i: 0 for i in net.processors}
    for i in matching.values():
        counts[i] += 1
    return counts


def _peel_choice(net: FlowNetwork, matching: dict):
    counts = _loads(net, matching)
    top = max(counts.values())
    proc = min(i for i, k in counts.items() if k == top)
    return proc, frozenset(j for j, i in matching.items() if i == proc)


def bs_search(net: FlowNetwork) -> MinMaxResult:
    """Binary search on the source capacity for the min-max per-processor task count."""
    n0 = len(net.tasks)
    lo, hi = 1, n0
    kept = None
    calls = 0
    while lo < hi:
        c = (lo + hi) // 2
        value, matching = max_flow(net.with_capacity(c))
        calls += 1
        if value == n0:
            hi = c
            kept = matching
        else:
            lo = c + 1
    if kept is None or max(_loads(net, kept).values()) != lo:
        value, kept = max_flow(net.with_capacity(lo))
        calls += 1
        assert value == n0, "every task has an eligible processor"
    proc, tasks = _peel_choice(net, kept)
    return MinMaxResult(lo, proc, tasks, kept, calls)


def bs_algo(inst: Instance) -> MinMaxResult:
    return bs_search(build_network(inst, inst.n))


def balance(net: FlowNetwork, matching: dict) -> dict:
    """Shift tasks along alternating paths until no path joins loads differing by 2 or more.

    For unit tasks this local condition characterises the assignment whose
    sorted load vector has every prefix sum minimal.
    """
    matching = dict(matching)
    counts = _loads(net, matching)
    on = {i: set() for i in net.processors}
    for j, i in matching.items():
        on[i].add(j)

    def improving_path(h):
        # BFS over processors; parent[q] = (previous processor, moved task)
        parent = {h: None}
        frontier = [h]
        while frontier:
            nxt = []
            for p in frontier:
                for j in sorted(on[p]):
                    for q in net.eligible[j]:
                        if q in parent:
                            continue
                        parent[q] = (p, j)
                        if counts[q] <= counts[h] - 2:
                            return q, parent
                        nxt.append(q)
            frontier = nxt
        return None

    improved = True
    while improved:
        improved = False
        for h in sorted(net.processors, key=lambda i: (-counts[i], i)):
            found = improving_path(h)
            if found is None:
                continue
            q, parent = found
            counts[h] -= 1
            counts[q] += 1
            while parent[q] is not None:
                p, j = parent[q]
                on[p].discard(j)
                on[q].add(j)
                matching[j] = q
                q = p
            improved = True
            break
    return matching


def peeling(inst: Instance) -> list[MinMaxResult]:
    """Run the peel loop; one result per removed processor, in removal order."""
    net = build_network(inst, inst.n)
    peels = []
    while net.tasks:
        res = bs_search(net)
        matching = balance(net, res.matching)
        proc, tasks = _peel_choice(net, matching)
        peels.append(MinMaxResult(res.l_star, proc, tasks, matching, res.flow_calls))
        net = net.without(proc, tasks)
    return peels


def ecsemrpp(inst: Instance) -> Assignment:
    """Energy-optimal assignment for equal-work tasks.

    Raises :class:`InfeasibleError` when the optimal (min-max) load already
    exceeds ``s_max * C``.
    """
    _require_uniform(inst)
    proc_of = [-1] * inst.n
    for peel in peeling(inst):
        for j in peel.peel_tasks:
            proc_of[j] = peel.peel_processor
    a = Assignment(tuple(proc_of))
    w = inst.tasks[0].work
    counts = [0] * inst.m
    for p in proc_of:
        counts[p] += 1
    over = [i for i, k in enumerate(counts) if k * w > inst.capacity + 1e-9]
    if over:
        raise InfeasibleError(
            f"min-max load {max(counts) * w:g} exceeds s_max*C = {inst.capacity:g}", over)
    return a
