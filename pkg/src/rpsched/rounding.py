"""Dependent rounding of a fractional assignment.

Two phases on the support graph (processor/task bipartite graph weighted by
``x_ij * w_j``):

1. cancel cycles by shifting weight alternately around each cycle, which
   leaves every vertex total unchanged and turns the support into a forest;
2. fix the tasks that became integral, then in each remaining tree match
   every task to one of its child processors (least integral load first).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Assignment, Instance, SchedulingError, Violation, check_feasibility
from .relax import FractionalAssignment, RelaxReport, solve_relaxation

log = logging.getLogger(__name__)

ZERO = 1e-12


@dataclass
class SupportGraph:
    m: int
    works: np.ndarray
    weight: dict = field(default_factory=dict)  # (processor, task) -> cycles, strictly positive

    @property
    def n(self) -> int:
        return len(self.works)

    def copy(self) -> "SupportGraph":
        return SupportGraph(self.m, self.works, dict(self.weight))

    def processor_totals(self) -> np.ndarray:
        out = np.zeros(self.m)
        for (i, _), wt in self.weight.items():
            out[i] += wt
        return out

    def task_totals(self) -> np.ndarray:
        out = np.zeros(self.n)
        for (_, j), wt in self.weight.items():
            out[j] += wt
        return out

    def adjacency(self) -> list[list[int]]:
        """Neighbour lists over node ids: processors ``0..m-1``, tasks ``m..m+n-1``."""
        adj = [[] for _ in range(self.m + self.n)]
        for i, j in self.weight:
            adj[i].append(self.m + j)
            adj[self.m + j].append(i)
        for nbrs in adj:
            nbrs.sort()
        return adj

    def find_cycle(self):
        """First cycle met by depth-first search from the lowest node id, as a node list."""
        adj = self.adjacency()
        state = [0] * len(adj)  # 0 new, 1 on stack, 2 done
        parent = [-1] * len(adj)
        for root in range(len(adj)):
            if state[root]:
                continue
            state[root] = 1
            stack = [(root, iter(adj[root]))]
            while stack:
                u, it = stack[-1]
                for v in it:
                    if state[v] == 0:
                        state[v] = 1
                        parent[v] = u
                        stack.append((v, iter(adj[v])))
                        break
                    if state[v] == 1 and v != parent[u]:
                        path = [u]
                        while path[-1] != v:
                            path.append(parent[path[-1]])
                        return path[::-1]
                else:
                    state[u] = 2
                    stack.pop()
        return None

    def is_forest(self) -> bool:
        return self.find_cycle() is None


@dataclass
class RoundingTrace:
    cycles_broken: int = 0
    epsilon_sequence: list = field(default_factory=list)
    phase1_fixed: int = 0
    matched: list = field(default_factory=list)  # (task, processor)
    max_fractional_w: float = 0.0
    phase2_start_loads: list = field(default_factory=list)
    capacity_violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "cycles_broken": self.cycles_broken,
            "epsilon_sequence": [float(e) for e in self.epsilon_sequence],
            "phase1_fixed": self.phase1_fixed,
            # 1-based, matching the instance file format
            "matched": [{"task": j + 1, "processor": i + 1} for j, i in self.matched],
            "max_fractional_w": float(self.max_fractional_w),
            "phase2_start_loads": [float(v) for v in self.phase2_start_loads],
            "capacity_violations": [v.message for v in self.capacity_violations],
        }


def build_support_graph(inst: Instance, x: FractionalAssignment) -> SupportGraph:
    works = inst.works
    g = SupportGraph(inst.m, works)
    for i, j, xij in x.entries(ZERO):
        g.weight[(i, j)] = xij * works[j]
    return g


def _edge_key(a: int, b: int, m: int):
    return (a, b - m) if a < m else (b, a - m)


def break_cycles(g: SupportGraph, steps: list | None = None) -> SupportGraph:
    """Cancel cycles until the support is a forest.

    Vertex totals are preserved.  When ``steps`` is given, one
    ``(epsilon, edges_before, edges_after)`` tuple is appended per cycle.
    """
    g = g.copy()
    while True:
        cyc = g.find_cycle()
        if cyc is None:
            return g
        ring = cyc + [cyc[0]]
        edges = [_edge_key(ring[k], ring[k + 1], g.m) for k in range(len(cyc))]
        wts = [g.weight[e] for e in edges]
        k_min = int(np.argmin(wts))
        eps = wts[k_min]
        # class of e_1, e_3, ... is even positions here
        sign = -1.0 if k_min % 2 == 0 else 1.0
        before = len(g.weight)
        for k, e in enumerate(edges):
            new = wts[k] + (sign if k % 2 == 0 else -sign) * eps
            if k == k_min or new <= ZERO:
                del g.weight[e]
            else:
                g.weight[e] = new
        if steps is not None:
            steps.append((eps, before, len(g.weight)))


def round_forest(inst: Instance, g: SupportGraph, x: FractionalAssignment | None = None):
    """Round a forest support graph to an integral assignment.

    ``x``, when given, is the fractional assignment the forest came from; its
    per-processor loads are checked against the forest's.
    """
    m, works = g.m, g.works
    short = np.nonzero(~np.isclose(g.task_totals(), works, rtol=1e-9, atol=1e-9))[0]
    if short.size:
        raise SchedulingError(f"support weights of tasks {short.tolist()} do not sum to their work")
    if x is not None and not np.allclose(g.processor_totals(), x.loads(inst), rtol=1e-9, atol=1e-9):
        raise SchedulingError("support graph loads differ from the fractional assignment")

    trace = RoundingTrace(phase2_start_loads=list(g.processor_totals()))
    proc_of = [-1] * g.n
    load = np.zeros(m)
    incident = [[] for _ in range(g.n)]
    for (i, j), wt in g.weight.items():
        incident[j].append((wt, i))

    fractional = []
    for j, inc in enumerate(incident):
        if not inc:
            raise SchedulingError(f"task {j} has no edge in the support graph")
        wt, i = max(inc, key=lambda t: (t[0], -t[1]))
        if wt >= works[j] * (1 - ZERO):
            proc_of[j] = i
            load[i] += works[j]
            trace.phase1_fixed += 1
        else:
            fractional.append(j)
    trace.max_fractional_w = float(max((works[j] for j in fractional), default=0.0))

    adj = {}
    for j in fractional:
        for _, i in incident[j]:
            adj.setdefault(("J", j), []).append(("P", i))
            adj.setdefault(("P", i), []).append(("J", j))
    for nbrs in adj.values():
        nbrs.sort(key=lambda v: v[1])

    seen = set()
    for root_j in fractional:
        root = ("J", root_j)
        if root in seen:
            continue
        seen.add(root)
        stack = [(root, None)]
        while stack:
            node, par = stack.pop()
            children = [v for v in adj[node] if v != par]
            for v in children:
                if v in seen:
                    raise SchedulingError("support graph is not a forest; break cycles first")
                seen.add(v)
                stack.append((v, node))
            if node[0] == "J":
                if not children:
                    raise SchedulingError(f"fractional task {node[1]} has no child processor")
                j = node[1]
                i = min((c[1] for c in children), key=lambda i: (load[i], i))
                proc_of[j] = i
                trace.matched.append((j, i))
    # a processor is the child of at most one task, so phase-1 loads decide every argmin
    for j, i in trace.matched:
        load[i] += works[j]
    trace.matched.sort()
    return Assignment(tuple(proc_of)), trace


def fdr(inst: Instance, tol: float = 1e-7):
    """Relaxation followed by dependent rounding.

    Returns ``(assignment, trace, relax_report)``.  Speed-cap violations are
    not fatal; they are listed in ``trace.capacity_violations`` and logged.
    """
    x, report = solve_relaxation(inst, tol)
    g = build_support_graph(inst, x)
    steps = []
    forest = break_cycles(g, steps)
    a, trace = round_forest(inst, forest, x)
    trace = replace(trace, cycles_broken=len(steps), epsilon_sequence=[s[0] for s in steps])
    trace.capacity_violations = [v for v in check_feasibility(inst, a) if v.kind == "capacity"]
    if trace.capacity_violations:
        log.warning("rounded schedule exceeds s_max*C on processors %s",
                    [v.index for v in trace.capacity_violations])
    return a, trace, report


def smax_guarantee(inst: Instance) -> float:
    """Cycle budget ``s_max * C`` above which rounding can never exceed the speed cap."""
    share = np.zeros(inst.m)
    for task in inst.tasks:
        for i in task.eligible:
            share[i] += task.work / len(task.eligible)
    return float(share.max() + inst.works.max())
