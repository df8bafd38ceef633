"""Dinic max-flow on a small adjacency-list graph.

Capacities may be ints or floats.  With floats, residual capacities at or
below ``eps`` are treated as saturated.
"""

from __future__ import annotations

from collections import deque


class Dinic:
    def __init__(self, n_nodes: int, eps: float = 0.0):
        self.n = n_nodes
        self.eps = eps
        self.adj: list[list[int]] = [[] for _ in range(n_nodes)]
        # parallel arrays indexed by edge id; edge e ^ 1 is its reverse
        self.to: list[int] = []
        self.cap: list[float] = []
        self.orig: list[float] = []

    def add_edge(self, u: int, v: int, cap) -> int:
        eid = len(self.to)
        self.to += [v, u]
        self.cap += [cap, 0]
        self.orig += [cap, 0]
        self.adj[u].append(eid)
        self.adj[v].append(eid + 1)
        return eid

    def flow_on(self, eid: int):
        return self.orig[eid] - self.cap[eid]

    def _bfs(self, s, t):
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.adj[u]:
                v = self.to[e]
                if level[v] < 0 and self.cap[e] > self.eps:
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def _dfs(self, s, t, level, it):
        # iterative blocking-flow augmentation along level graph
        total = 0
        while True:
            path = []
            u = s
            while u != t:
                adj = self.adj[u]
                while it[u] < len(adj):
                    e = adj[it[u]]
                    v = self.to[e]
                    if self.cap[e] > self.eps and level[v] == level[u] + 1:
                        break
                    it[u] += 1
                else:
                    # dead end: retreat
                    if not path:
                        return total
                    level[u] = -1
                    e = path.pop()
                    u = self.to[e ^ 1]
                    it[u] += 1
                    continue
                path.append(e)
                u = v
            push = min(self.cap[e] for e in path)
            for e in path:
                self.cap[e] -= push
                self.cap[e ^ 1] += push
            total += push

    def max_flow(self, s: int, t: int):
        total = 0
        while True:
            level = self._bfs(s, t)
            if level is None:
                return total
            total += self._dfs(s, t, level, [0] * self.n)

    def source_side(self, s: int) -> set[int]:
        """Nodes reachable from ``s`` in the residual graph (source side of a min cut)."""
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.adj[u]:
                v = self.to[e]
                if v not in seen and self.cap[e] > self.eps:
                    seen.add(v)
                    q.append(v)
        return seen
