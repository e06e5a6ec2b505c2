"""Slow reference computations, independent of the package internals.

Everything here works from an adjacency dict and plain BFS.
"""
from __future__ import annotations

import itertools
from collections import deque

import networkx as nx


def adjacency(edges, n=None):
    adj = {v: set() for v in range(n)} if n is not None else {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return adj


def bfs(adj, s, banned=None):
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w != banned and w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def all_dist(adj):
    return {v: bfs(adj, v) for v in adj}


def interval(D, x, y):
    return {a for a in D if D[x][a] + D[a][y] == D[x][y]}


def delta_brute(adj):
    D = all_dist(adj)
    best = 0
    for x, y, z in itertools.product(D, repeat=3):
        other = interval(D, x, z) | interval(D, y, z)
        for m in interval(D, x, y):
            best = max(best, min(D[m][o] for o in other))
    return best


def all_paths(adj, x, y, length):
    """Every walk x..y of the given length without repeated vertices."""
    out = []

    def go(path):
        if len(path) == length + 1:
            if path[-1] == y:
                out.append(tuple(path))
            return
        for w in sorted(adj[path[-1]]):
            if w not in path:
                go(path + [w])

    go([x])
    return out


def geodesics(adj, x, y):
    return all_paths(adj, x, y, bfs(adj, x)[y])


def angle(adj, v, w1, w2):
    """Distance from w1 to w2 avoiding v (None for infinite)."""
    if w1 == w2:
        return 0
    return bfs(adj, w1, banned=v).get(w2)


def angle_gt(adj, v, a, b, theta):
    D = all_dist(adj)
    for w1 in adj[v]:
        if D[w1][a] != D[v][a] - 1:
            continue
        for w2 in adj[v]:
            if D[w2][b] != D[v][b] - 1:
                continue
            ang = angle(adj, v, w1, w2)
            if ang is None or ang > theta:
                return True
    return False


def cone_edges(adj, e, theta):
    """Edges reached by some chain of at most theta steps, by depth-first
    enumeration of the chains themselves."""
    e = tuple(sorted(e))
    found = {e}

    def step(cur, depth):
        if depth == theta:
            return
        for v in cur:
            w = cur[1] if cur[0] == v else cur[0]
            for x in adj[v]:
                nxt = tuple(sorted((v, x)))
                ang = angle(adj, v, w, x)
                if ang is not None and ang <= theta:
                    found.add(nxt)
                    step(nxt, depth + 1)

    step(e, 0)
    return found


def cycles_through(adj, e, L):
    g = nx.Graph()
    for u in adj:
        for w in adj[u]:
            g.add_edge(u, w)
    u, v = e
    count = 0
    for cyc in nx.simple_cycles(g, length_bound=L):
        if len(cyc) < 3:
            continue
        pairs = {frozenset((cyc[i], cyc[(i + 1) % len(cyc)])) for i in range(len(cyc))}
        if frozenset((u, v)) in pairs:
            count += 1
    return count


def tree_classes(adj, x, n, k):
    """Sphere classes on a tree: a and a' share a class iff their paths from
    x agree for the first k steps."""
    D = all_dist(adj)
    groups = {}
    for a in adj:
        if D[x][a] != n:
            continue
        z = next(v for v in adj if D[x][v] == k and D[x][v] + D[v][a] == n)
        groups.setdefault(z, set()).add(a)
    return sorted((frozenset(s) for s in groups.values()), key=sorted)


def profile_classes(adj, x, n, k):
    D = all_dist(adj)
    ball = sorted(v for v in adj if D[x][v] <= k)
    groups = {}
    for a in adj:
        if D[x][a] == n:
            groups.setdefault(tuple(D[a][b] for b in ball), set()).add(a)
    return sorted((frozenset(s) for s in groups.values()), key=sorted)


def h_norm_sq(adj, x, f):
    """Sum over every (n, k) and every class of |(n+1) sum of f|^2."""
    D = all_dist(adj)
    top = max(D[x][a] for a in f) if f else 0
    total = 0
    for n in range(top + 1):
        for k in range(n + 1):
            for c in profile_classes(adj, x, n, k):
                s = sum(f.get(a, 0) for a in c)
                total += abs((n + 1) * s) ** 2
    return total


def tree_classes_upto(adj, x, max_n):
    """Every tree class around x with n <= max_n, keyed by (n, k): spheres
    grouped by the ancestor at depth k in the BFS tree from x."""
    parent = {x: None}
    depth = {x: 0}
    q = deque([x])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w not in depth:
                parent[w], depth[w] = u, depth[u] + 1
                q.append(w)
    out = {}
    for a, n in depth.items():
        if n > max_n:
            continue
        chain = [a]
        while parent[chain[-1]] is not None:
            chain.append(parent[chain[-1]])
        chain.reverse()  # chain[k] is the vertex at depth k on [x, a]
        for k in range(n + 1):
            out.setdefault((n, k), {}).setdefault(chain[k], set()).add(a)
    return {key: sorted((frozenset(s) for s in g.values()), key=sorted) for key, g in out.items()}


def all_profile_classes(adj, x):
    """List of (n, members) for every distance-profile class around x."""
    D = all_dist(adj)
    top = max(D[x].values())
    out = []
    for n in range(top + 1):
        for k in range(n + 1):
            for c in profile_classes_with(D, adj, x, n, k):
                out.append((n, c))
    return out


def profile_classes_with(D, adj, x, n, k):
    ball = sorted(v for v in adj if D[x][v] <= k)
    groups = {}
    for a in adj:
        if D[x][a] == n:
            groups.setdefault(tuple(D[a][b] for b in ball), set()).add(a)
    return sorted((frozenset(s) for s in groups.values()), key=sorted)


def norm_from_classes(classes, f):
    return sum(abs((n + 1) * sum(f.get(a, 0) for a in c)) ** 2 for n, c in classes)
