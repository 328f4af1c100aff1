"""Core graph types: simple graphs, multigraphs, oriented graphs, labelled
partitions and path systems.

Vertices are dense integer ids 0..n-1 everywhere; partitions refer to ids.
All types are immutable values after construction, so they can be shared
freely between threads and hashed into reports.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from typing import Iterable, Sequence

from .errors import BadParams, NotBipartite, PartitionMismatch

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    """Normalize an undirected edge to (min, max) order; loops are invalid."""
    if u == v:
        raise BadParams(f"loop edge ({u},{v}) not allowed")
    return (u, v) if u < v else (v, u)


def norm_edges(pairs: Iterable[Sequence[int]]) -> frozenset[Edge]:
    return frozenset(norm_edge(u, v) for u, v in pairs)


class Graph:
    """A simple undirected graph on vertices 0..n-1."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        self.n = int(n)
        es = norm_edges(edges)
        for u, v in es:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise BadParams(f"edge ({u},{v}) out of range for n={self.n}")
        self.edges = es
        self._adj = None

    # -- basic accessors -------------------------------------------------
    @property
    def adj(self) -> tuple[frozenset[int], ...]:
        if self._adj is None:
            nbrs = [set() for _ in range(self.n)]
            for u, v in self.edges:
                nbrs[u].add(v)
                nbrs[v].add(u)
            self._adj = tuple(frozenset(s) for s in nbrs)
        return self._adj

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0) if self.n else 0

    def min_degree(self) -> int:
        return min(self.degrees(), default=0) if self.n else 0

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self.edges

    # -- set-style counting (E(S), E(S,T), d(v,S)) -----------------------
    def d(self, v: int, S: Iterable[int]) -> int:
        S = S if isinstance(S, (set, frozenset)) else set(S)
        return sum(1 for w in self.adj[v] if w in S)

    def edges_within(self, S: Iterable[int]) -> frozenset[Edge]:
        S = S if isinstance(S, (set, frozenset)) else set(S)
        return frozenset(e for e in self.edges if e[0] in S and e[1] in S)

    def edges_between(self, S: Iterable[int], T: Iterable[int]) -> frozenset[Edge]:
        S = S if isinstance(S, (set, frozenset)) else set(S)
        T = T if isinstance(T, (set, frozenset)) else set(T)
        if S & T:
            raise BadParams("edges_between requires disjoint sets")
        return frozenset(
            e
            for e in self.edges
            if (e[0] in S and e[1] in T) or (e[0] in T and e[1] in S)
        )

    def e_within(self, S: Iterable[int]) -> int:
        return len(self.edges_within(S))

    def e_between(self, S: Iterable[int], T: Iterable[int]) -> int:
        return len(self.edges_between(S, T))

    # -- algebra ----------------------------------------------------------
    def minus_edges(self, edges: Iterable[Sequence[int]]) -> "Graph":
        return Graph(self.n, self.edges - norm_edges(edges))

    def minus(self, other: "Graph") -> "Graph":
        return Graph(self.n, self.edges - other.edges)

    def union(self, other: "Graph") -> "Graph":
        return Graph(max(self.n, other.n), self.edges | other.edges)

    def with_edges(self, edges: Iterable[Sequence[int]]) -> "Graph":
        return Graph(self.n, self.edges | norm_edges(edges))

    def spanning(self, edges: Iterable[Sequence[int]]) -> "Graph":
        """Spanning subgraph on the same vertex set with the given edges."""
        es = norm_edges(edges)
        missing = es - self.edges
        if missing:
            raise BadParams(f"edges {sorted(missing)[:3]} not present in graph")
        return Graph(self.n, es)

    def is_regular(self) -> bool:
        degs = self.degrees()
        return len(set(degs)) <= 1

    def components(self) -> list[list[int]]:
        """Connected components restricted to non-isolated structure being
        irrelevant: every vertex 0..n-1 appears in exactly one component."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp = [s]
            seen[s] = True
            dq = deque([s])
            while dq:
                v = dq.popleft()
                for w in self.adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        dq.append(w)
            comps.append(sorted(comp))
        return comps

    def __eq__(self, other):
        return (
            isinstance(other, Graph) and self.n == other.n and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"


class MultiGraph:
    """An undirected multigraph: unordered pairs with multiplicities."""

    __slots__ = ("n", "mult")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        self.n = int(n)
        c: Counter = Counter()
        for u, v in edges:
            c[norm_edge(u, v)] += 1
        self.mult = dict(c)

    def num_edges(self) -> int:
        return sum(self.mult.values())

    def multiplicity(self, u: int, v: int) -> int:
        return self.mult.get(norm_edge(u, v), 0)

    def plus(self, other) -> "MultiGraph":
        m = MultiGraph(max(self.n, other_n(other)))
        c = Counter(self.mult)
        c.update(multi_edges(other))
        m.mult = dict(c)
        return m

    def is_simple(self) -> bool:
        return all(k == 1 for k in self.mult.values())

    def __repr__(self):
        return f"MultiGraph(n={self.n}, m={self.num_edges()})"


def other_n(g) -> int:
    return g.n


def multi_edges(g) -> Counter:
    """Edge multiset of a Graph or MultiGraph as a Counter."""
    if isinstance(g, Graph):
        return Counter(g.edges)
    if isinstance(g, MultiGraph):
        return Counter(g.mult)
    raise BadParams(f"not a graph: {g!r}")


def graph_sum(n: int, graphs: Iterable) -> MultiGraph:
    """Multigraph sum G_1 + ... + G_k (multiplicities add)."""
    c: Counter = Counter()
    for g in graphs:
        c.update(multi_edges(g))
    m = MultiGraph(n)
    m.mult = dict(c)
    return m


class Digraph:
    """A simple digraph: up to one arc per ordered pair, no loops."""

    __slots__ = ("n", "arcs", "_out", "_in")

    def __init__(self, n: int, arcs: Iterable[Sequence[int]] = ()):
        self.n = int(n)
        a = frozenset((int(x), int(y)) for x, y in arcs)
        for x, y in a:
            if x == y:
                raise BadParams(f"loop arc ({x},{y})")
            if not (0 <= x < self.n and 0 <= y < self.n):
                raise BadParams(f"arc ({x},{y}) out of range")
        self._check(a)
        self.arcs = a
        self._out = None
        self._in = None

    def _check(self, arcs):
        pass

    @property
    def out(self) -> tuple[frozenset[int], ...]:
        if self._out is None:
            o = [set() for _ in range(self.n)]
            for x, y in self.arcs:
                o[x].add(y)
            self._out = tuple(frozenset(s) for s in o)
        return self._out

    @property
    def inn(self) -> tuple[frozenset[int], ...]:
        if self._in is None:
            i = [set() for _ in range(self.n)]
            for x, y in self.arcs:
                i[y].add(x)
            self._in = tuple(frozenset(s) for s in i)
        return self._in

    def out_neighbors(self, v: int) -> frozenset[int]:
        return self.out[v]

    def in_neighbors(self, v: int) -> frozenset[int]:
        return self.inn[v]

    def underlying(self) -> Graph:
        return Graph(self.n, self.arcs)

    def minus_arcs(self, arcs: Iterable[Sequence[int]]):
        return type(self)(self.n, self.arcs - {(int(x), int(y)) for x, y in arcs})

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, m={len(self.arcs)})"


class OrientedGraph(Digraph):
    """A digraph with no pair of opposite arcs (an oriented graph)."""

    __slots__ = ()

    def _check(self, arcs):
        for x, y in arcs:
            if (y, x) in arcs:
                raise BadParams(f"both orientations of ({x},{y}) present")


class LabelledPartition:
    """The (A0, A, B0, B) split of 0..n-1, optionally with clusters.

    ``clusters_A``/``clusters_B`` split A and B into K parts of equal size m;
    ``refined_A``/``refined_B`` further split each cluster into L parts of
    size m/L.
    """

    __slots__ = (
        "n",
        "A0",
        "A",
        "B0",
        "B",
        "clusters_A",
        "clusters_B",
        "refined_A",
        "refined_B",
        "_sides",
    )

    def __init__(
        self,
        n: int,
        A0: Iterable[int],
        A: Iterable[int],
        B0: Iterable[int],
        B: Iterable[int],
        clusters_A: Sequence[Iterable[int]] | None = None,
        clusters_B: Sequence[Iterable[int]] | None = None,
        refined_A: Sequence[Sequence[Iterable[int]]] | None = None,
        refined_B: Sequence[Sequence[Iterable[int]]] | None = None,
    ):
        self.n = int(n)
        self.A0 = tuple(sorted(A0))
        self.A = tuple(sorted(A))
        self.B0 = tuple(sorted(B0))
        self.B = tuple(sorted(B))
        parts = [self.A0, self.A, self.B0, self.B]
        all_ids = [v for p in parts for v in p]
        if len(set(all_ids)) != len(all_ids):
            raise PartitionMismatch("partition classes overlap")
        if set(all_ids) != set(range(self.n)):
            raise PartitionMismatch("partition does not cover 0..n-1")
        self.clusters_A = _check_clusters(clusters_A, self.A, "A")
        self.clusters_B = _check_clusters(clusters_B, self.B, "B")
        if (self.clusters_A is None) != (self.clusters_B is None):
            raise PartitionMismatch("clusters must be given for both sides")
        if self.clusters_A is not None:
            if len(self.clusters_A) != len(self.clusters_B):
                raise PartitionMismatch("cluster counts differ between sides")
            sizes = {len(c) for c in self.clusters_A} | {
                len(c) for c in self.clusters_B
            }
            if len(sizes) > 1:
                raise PartitionMismatch(f"cluster sizes differ: {sorted(sizes)}")
        self.refined_A = _check_refinement(refined_A, self.clusters_A, "A")
        self.refined_B = _check_refinement(refined_B, self.clusters_B, "B")
        self._sides = None

    # -- derived quantities ----------------------------------------------
    @property
    def a(self) -> int:
        return len(self.A0)

    @property
    def b(self) -> int:
        return len(self.B0)

    @property
    def K(self) -> int | None:
        return None if self.clusters_A is None else len(self.clusters_A)

    @property
    def m(self) -> int | None:
        if self.clusters_A is None or not self.clusters_A:
            return None
        return len(self.clusters_A[0])

    @property
    def L(self) -> int | None:
        if self.refined_A is None or not self.refined_A:
            return None
        return len(self.refined_A[0])

    def A_prime(self) -> frozenset[int]:
        return frozenset(self.A0) | frozenset(self.A)

    def B_prime(self) -> frozenset[int]:
        return frozenset(self.B0) | frozenset(self.B)

    def V0(self) -> frozenset[int]:
        return frozenset(self.A0) | frozenset(self.B0)

    def side(self, v: int) -> str:
        """One of 'A0', 'A', 'B0', 'B'."""
        if self._sides is None:
            s = {}
            for name in ("A0", "A", "B0", "B"):
                for v2 in getattr(self, name):
                    s[v2] = name
            self._sides = s
        return self._sides[v]

    def on_a_side(self, v: int) -> bool:
        return self.side(v) in ("A0", "A")

    def swapped(self) -> "LabelledPartition":
        """The partition with the roles of the two sides exchanged."""
        return LabelledPartition(
            self.n,
            self.B0,
            self.B,
            self.A0,
            self.A,
            self.clusters_B,
            self.clusters_A,
            self.refined_B,
            self.refined_A,
        )

    def with_clusters(self, clusters_A, clusters_B) -> "LabelledPartition":
        return LabelledPartition(
            self.n, self.A0, self.A, self.B0, self.B, clusters_A, clusters_B
        )

    def with_refinement(self, refined_A, refined_B) -> "LabelledPartition":
        return LabelledPartition(
            self.n,
            self.A0,
            self.A,
            self.B0,
            self.B,
            self.clusters_A,
            self.clusters_B,
            refined_A,
            refined_B,
        )

    def subcluster_A(self, i: int, h: int) -> tuple[int, ...]:
        """Part h (1-based) of cluster A_i (1-based)."""
        if self.refined_A is not None:
            return self.refined_A[i - 1][h - 1]
        if h != 1:
            raise BadParams("no refinement present")
        return self.clusters_A[i - 1]

    def subcluster_B(self, i: int, h: int) -> tuple[int, ...]:
        if self.refined_B is not None:
            return self.refined_B[i - 1][h - 1]
        if h != 1:
            raise BadParams("no refinement present")
        return self.clusters_B[i - 1]

    def __repr__(self):
        k = f", K={self.K}" if self.K else ""
        return (
            f"LabelledPartition(n={self.n}, |A0|={self.a}, |A|={len(self.A)}, "
            f"|B0|={self.b}, |B|={len(self.B)}{k})"
        )


def _check_clusters(clusters, side, name):
    if clusters is None:
        return None
    cl = tuple(tuple(sorted(c)) for c in clusters)
    flat = [v for c in cl for v in c]
    if sorted(flat) != list(side):
        raise PartitionMismatch(f"clusters of {name} do not partition {name}")
    return cl

def _check_refinement(refined, clusters, name):
    if refined is None:
        return None
    if clusters is None:
        raise PartitionMismatch("refinement requires clusters")
    rf = tuple(tuple(tuple(sorted(p)) for p in parts) for parts in refined)
    if len(rf) != len(clusters):
        raise PartitionMismatch(f"refinement of {name} has wrong cluster count")
    sizes = set()
    for parts, cluster in zip(rf, clusters):
        flat = sorted(v for p in parts for v in p)
        if flat != list(cluster):
            raise PartitionMismatch(f"refinement does not partition a {name}-cluster")
        sizes |= {len(p) for p in parts}
        sizes.add(len(parts))
    return rf


class PathSystem:
    """A graph whose components are vertex-disjoint paths.

    Trivial (single-vertex) paths are implicit: any vertex not touched by an
    edge counts as a trivial path.  Only the edge set is stored.
    """

    __slots__ = ("n", "edges", "_paths")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        self.n = int(n)
        self.edges = norm_edges(edges)
        deg = Counter()
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        bad = [v for v, d in deg.items() if d > 2]
        if bad:
            raise BadParams(f"vertex {min(bad)} has degree > 2, not a path system")
        self._paths = None
        if self._find_cycle(deg):
            raise BadParams("path system contains a cycle")

    def _find_cycle(self, deg) -> bool:
        # union-find over edge additions detects any cycle
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                return True
            parent[ru] = rv
        return False

    @property
    def paths(self) -> tuple[tuple[int, ...], ...]:
        """Nontrivial paths as vertex sequences, each starting from its
        smaller endpoint, ordered by first vertex."""
        if self._paths is None:
            adj: dict[int, list[int]] = {}
            for u, v in self.edges:
                adj.setdefault(u, []).append(v)
                adj.setdefault(v, []).append(u)
            ends = sorted(v for v, ns in adj.items() if len(ns) == 1)
            seen = set()
            out = []
            for s in ends:
                if s in seen:
                    continue
                seq = [s]
                seen.add(s)
                prev, cur = None, s
                while True:
                    nxt = [w for w in adj[cur] if w != prev]
                    if not nxt:
                        break
                    prev, cur = cur, nxt[0]
                    seq.append(cur)
                    seen.add(cur)
                out.append(tuple(seq))
            self._paths = tuple(out)
        return self._paths

    def covered(self) -> frozenset[int]:
        """Vertices incident to at least one edge."""
        return frozenset(v for e in self.edges for v in e)

    def endpoints(self) -> frozenset[int]:
        return frozenset(p[0] for p in self.paths) | frozenset(
            p[-1] for p in self.paths
        )

    def internal(self) -> frozenset[int]:
        out = set()
        for p in self.paths:
            out.update(p[1:-1])
        return frozenset(out)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def num_edges(self) -> int:
        return len(self.edges)

    def num_nontrivial(self) -> int:
        return len(self.paths)

    def union(self, other: "PathSystem") -> "PathSystem":
        return PathSystem(max(self.n, other.n), self.edges | other.edges)

    def with_edges(self, edges: Iterable[Sequence[int]]) -> "PathSystem":
        return PathSystem(self.n, self.edges | norm_edges(edges))

    def as_graph(self) -> Graph:
        return Graph(self.n, self.edges)

    def __eq__(self, other):
        return (
            isinstance(other, PathSystem)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"PathSystem(n={self.n}, m={len(self.edges)}, paths={len(self.paths)})"


# -- serialization ---------------------------------------------------------

def sorted_edge_list(edges: Iterable[Edge]) -> list[list[int]]:
    return [list(e) for e in sorted(edges)]


def graph_to_json(g: Graph, partition: LabelledPartition | None = None) -> dict:
    doc = {"n": g.n, "edges": sorted_edge_list(g.edges)}
    if partition is not None:
        p = {
            "A0": list(partition.A0),
            "A": list(partition.A),
            "B0": list(partition.B0),
            "B": list(partition.B),
        }
        if partition.clusters_A is not None:
            p["clusters_A"] = [list(c) for c in partition.clusters_A]
            p["clusters_B"] = [list(c) for c in partition.clusters_B]
        doc["partition"] = p
    return doc


def graph_from_json(doc: dict) -> tuple[Graph, LabelledPartition | None]:
    g = Graph(doc["n"], doc["edges"])
    part = None
    if "partition" in doc and doc["partition"] is not None:
        p = doc["partition"]
        part = LabelledPartition(
            g.n,
            p.get("A0", []),
            p.get("A", []),
            p.get("B0", []),
            p.get("B", []),
            p.get("clusters_A"),
            p.get("clusters_B"),
        )
    return g, part


def dump_graph(path: str, g: Graph, partition: LabelledPartition | None = None):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(graph_to_json(g, partition), f, indent=1, sort_keys=True)
        f.write("\n")


def load_graph(path: str) -> tuple[Graph, LabelledPartition | None]:
    with open(path, encoding="utf-8") as f:
        return graph_from_json(json.load(f))


def parse_edge_list(text: str) -> Graph:
    """Text format: one 'u v' pair per line, '#' starts a comment."""
    edges = []
    max_v = -1
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BadParams(f"bad edge line: {line!r}")
        u, v = int(parts[0]), int(parts[1])
        edges.append((u, v))
        max_v = max(max_v, u, v)
    return Graph(max_v + 1, edges)


def format_edge_list(g: Graph) -> str:
    lines = [f"# n={g.n} m={len(g.edges)}"]
    lines += [f"{u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def require_bipartition(g: Graph, left: Iterable[int], right: Iterable[int]):
    """Check left/right are disjoint and contain every edge endpoint pair
    across the cut; raises NotBipartite otherwise."""
    L, R = set(left), set(right)
    if L & R:
        raise NotBipartite("classes overlap")
    for u, v in g.edges:
        if not ((u in L and v in R) or (u in R and v in L)):
            raise NotBipartite(f"edge ({u},{v}) not across the bipartition")


def complete_bipartite(sizes: tuple[int, int]) -> Graph:
    p, q = sizes
    return Graph(p + q, [(i, p + j) for i in range(p) for j in range(q)])
