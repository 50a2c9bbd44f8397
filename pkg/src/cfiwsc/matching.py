"""Hopcroft–Karp maximum bipartite matching."""

from __future__ import annotations

from collections import deque
from typing import Sequence

import numpy as np


def hopcroft_karp(adj: Sequence[Sequence[int]], n_right: int) -> int:
    """Size of a maximum matching; ``adj[u]`` lists right neighbors of left vertex ``u``."""
    n_left = len(adj)
    inf = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left
    size = 0

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if match_l[u] < 0:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = inf
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w < 0:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w < 0 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = inf
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] < 0 and dfs(u):
                size += 1
    return size


def has_perfect_matching(m: np.ndarray) -> bool:
    """Whether the boolean square matrix ``m`` admits a perfect matching."""
    n = m.shape[0]
    if n != m.shape[1]:
        return False
    if n == 0:
        return True
    if not m.any(axis=1).all() or not m.any(axis=0).all():
        return False
    adj = [np.flatnonzero(row).tolist() for row in m]
    return hopcroft_karp(adj, n) == n
