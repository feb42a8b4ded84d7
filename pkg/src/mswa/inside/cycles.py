"""Elementary circuits of small digraphs (Johnson, 1975) and related tests.

A digraph is a mapping ``node -> iterable of successors`` over integer
nodes.  Cycles are reported as node lists starting at their smallest node.
"""

from __future__ import annotations

from ..errors import ResourceError

NODE_CAP = 64
CYCLE_CAP = 1_000_000


def normalize(graph):
    """Copy ``graph`` into ``{node: sorted successor list}`` with every node present."""
    nodes = set(graph)
    for succ in graph.values():
        nodes.update(succ)
    return {v: sorted(set(graph.get(v, ()))) for v in sorted(nodes)}


def support_graph(matrix):
    """Digraph with an edge i -> j wherever ``matrix[i, j]`` is nonzero."""
    is_zero = matrix.semiring.is_zero
    n = matrix.rows
    return {i: [j for j in range(n) if not is_zero(matrix[i, j])] for i in range(n)}


def _strong_component(adj, start, allowed):
    fwd = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for w in adj[v]:
            if w in allowed and w not in fwd:
                fwd.add(w)
                todo.append(w)
    rev = {v: [] for v in fwd}
    for v in fwd:
        for w in adj[v]:
            if w in fwd:
                rev[w].append(v)
    comp = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for u in rev[v]:
            if u not in comp:
                comp.add(u)
                todo.append(u)
    return comp


def iter_simple_cycles(graph, node_cap=NODE_CAP):
    """Yield every elementary cycle once."""
    adj = normalize(graph)
    if len(adj) > node_cap:
        raise ResourceError(f"graph has {len(adj)} nodes, above the cap of {node_cap}")
    order = list(adj)
    for idx, s in enumerate(order):
        allowed = set(order[idx:])
        comp = _strong_component(adj, s, allowed)
        sub = {v: [w for w in adj[v] if w in comp] for v in comp}
        if not sub[s]:
            continue
        blocked = set()
        blockers = {v: set() for v in comp}
        path = []

        def unblock(u):
            stack = [u]
            while stack:
                x = stack.pop()
                if x in blocked:
                    blocked.discard(x)
                    stack.extend(blockers[x])
                    blockers[x].clear()

        # explicit stack in place of recursion: (node, successor iterator, found flag)
        blocked.add(s)
        path.append(s)
        stack = [[s, iter(sub[s]), False]]
        while stack:
            frame = stack[-1]
            v, it = frame[0], frame[1]
            advanced = False
            for w in it:
                if w == s:
                    yield list(path)
                    frame[2] = True
                elif w not in blocked:
                    blocked.add(w)
                    path.append(w)
                    stack.append([w, iter(sub[w]), False])
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            path.pop()
            if frame[2]:
                unblock(v)
            else:
                for w in sub[v]:
                    blockers[w].add(v)
            if stack:
                stack[-1][2] = stack[-1][2] or frame[2]


def simple_cycles(graph, node_cap=NODE_CAP, cycle_cap=CYCLE_CAP):
    """All elementary cycles, each once, rotated to start at its minimum node."""
    out = []
    for cycle in iter_simple_cycles(graph, node_cap):
        out.append(cycle)
        if len(out) > cycle_cap:
            raise ResourceError(f"more than {cycle_cap} simple cycles")
    return out


def make_thomassen_graph(k):
    """Hub digraph whose cycles all pass through node 0, with 2**(k-1) cycles.

    Node 0 has a self-loop and edges to and from every other node; among
    nodes ``1..k-1`` every edge points from a higher to a lower index, so the
    hub-free remainder is acyclic and each nonempty subset of it closes
    exactly one cycle through the hub.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    graph = {0: list(range(k))}
    for j in range(1, k):
        graph[j] = [0] + list(range(1, j))
    return graph


def _is_acyclic(adj, removed):
    indeg = {v: 0 for v in adj if v not in removed}
    for v in indeg:
        for w in adj[v]:
            if w in indeg:
                indeg[w] += 1
    ready = [v for v, n in indeg.items() if n == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in adj[v]:
            if w in indeg:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
    return seen == len(indeg)


def has_two_node_disjoint_cycles(graph, node_cap=NODE_CAP, cycle_cap=CYCLE_CAP):
    """True iff some two simple cycles share no node.

    Walks the enumerated cycles and stops at the first one whose removal
    leaves a cycle behind.
    """
    adj = normalize(graph)
    for count, cycle in enumerate(iter_simple_cycles(adj, node_cap), 1):
        if count > cycle_cap:
            raise ResourceError(f"more than {cycle_cap} simple cycles")
        if not _is_acyclic(adj, set(cycle)):
            return True
    return False
