"""Edge decompositions into balanced matchings and path systems.

Three tools used throughout the pipeline:

* ``vizing_balanced``: decompose any graph into max-degree+1 matchings whose
  sizes differ by at most one (proper edge coloring followed by repeated
  alternating-path exchanges between the largest and smallest classes; the
  sum of squared class sizes strictly drops each exchange, so the loop
  terminates).
* ``split_trick``: decompose a graph on A0 u A with bounded degrees into
  D/2 edge-disjoint path systems of near-equal size whose internal vertices
  all lie in A0 (duplicate A0, decompose the auxiliary graph into balanced
  matchings, re-identify the copies).
* ``sparsify_split``: randomly split off a (1-gamma) fraction of the edges
  so that the leftover has small maximum degree, retrying until both
  postconditions verify.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .balance import frac
from .errors import BadParams, PreconditionViolated, RetryBudgetExceeded
from .graphs import Edge, Graph, PathSystem, norm_edge


# -- proper edge coloring (max-degree + 1 colors) ---------------------------

def edge_coloring(g: Graph) -> dict[Edge, int]:
    """Proper edge coloring with at most max_degree+1 colors (fan/Kempe
    construction).  Deterministic: edges processed in sorted order and the
    smallest usable color is preferred."""
    ncolors = g.max_degree() + 1
    color: dict[Edge, int] = {}
    at: list[dict[int, int]] = [dict() for _ in range(g.n)]  # vertex -> color -> nbr

    def first_free(v: int) -> int:
        for c in range(ncolors):
            if c not in at[v]:
                return c
        raise AssertionError("no free color")

    def uncolor(u: int, v: int):
        old = color.pop(norm_edge(u, v))
        del at[u][old]
        del at[v][old]

    def put(u: int, v: int, c: int):
        color[norm_edge(u, v)] = c
        at[u][c] = v
        at[v][c] = u

    def is_free(v: int, c: int) -> bool:
        return c not in at[v]

    for u, v in sorted(g.edges):
        # maximal fan of u starting at v
        fan = [v]
        infan = {v}
        while True:
            ext = None
            for c in range(ncolors):
                if is_free(fan[-1], c):
                    w = at[u].get(c)
                    if w is not None and w not in infan:
                        ext = w
                        break
            if ext is None:
                break
            fan.append(ext)
            infan.add(ext)
        c = first_free(u)
        d = first_free(fan[-1])
        if c != d:
            # invert the maximal path from u alternating d, c; the cd-sub-
            # graph has max degree 2 and u misses c, so the walk is simple
            path = [u]
            cur, col = u, d
            while col in at[cur]:
                nxt = at[cur][col]
                path.append(nxt)
                cur = nxt
                col = c if col == d else d
            updates = []
            for i in range(len(path) - 1):
                old = color[norm_edge(path[i], path[i + 1])]
                updates.append((path[i], path[i + 1], c if old == d else d))
            for x, y, _ in updates:
                uncolor(x, y)
            for x, y, new in updates:
                put(x, y, new)
        # longest fan prefix that is still a fan, then the last vertex in it
        # on which d is free
        w_idx = None
        for i, fv in enumerate(fan):
            if i > 0:
                ce = color.get(norm_edge(u, fv))
                if ce is None or not is_free(fan[i - 1], ce):
                    break
            if is_free(fv, d) and is_free(u, d):
                w_idx = i
        if w_idx is None:
            raise AssertionError("fan rotation failed")
        shifted = [color[norm_edge(u, fan[i + 1])] for i in range(w_idx)]
        for i in range(w_idx):
            uncolor(u, fan[i + 1])
        for i in range(w_idx):
            put(u, fan[i], shifted[i])
        put(u, fan[w_idx], d)
    return color


# -- balanced matching decompositions ---------------------------------------

@dataclass(frozen=True)
class MatchingDecomposition:
    matchings: tuple[frozenset[Edge], ...]
    source: Graph

    def sizes(self) -> list[int]:
        return [len(m) for m in self.matchings]


def _components_alternating(m1: frozenset[Edge], m2: frozenset[Edge]):
    """Components of the symmetric difference m1 ^ m2, each as a list of
    edges; every component is a path or an even cycle alternating between
    the two matchings."""
    sym = m1 ^ m2
    adj: dict[int, list[Edge]] = {}
    for e in sym:
        for v in e:
            adj.setdefault(v, []).append(e)
    seen: set[Edge] = set()
    comps = []
    for start in sorted(adj):
        for e0 in adj[start]:
            if e0 in seen:
                continue
            comp = [e0]
            seen.add(e0)
            frontier = [e0]
            while frontier:
                e = frontier.pop()
                for v in e:
                    for e2 in adj[v]:
                        if e2 not in seen:
                            seen.add(e2)
                            comp.append(e2)
                            frontier.append(e2)
            comps.append(comp)
    return comps


def rebalance_matchings(classes: list[set[Edge]]) -> None:
    """Equalize class sizes to within one by swapping alternating paths
    between the currently largest and smallest classes (in place)."""
    while True:
        sizes = [len(c) for c in classes]
        hi = sizes.index(max(sizes))
        lo = sizes.index(min(sizes))
        if sizes[hi] - sizes[lo] <= 1:
            return
        big, small = classes[hi], classes[lo]
        swapped = False
        for comp in _components_alternating(frozenset(big), frozenset(small)):
            surplus = sum(1 if e in big else -1 for e in comp)
            if surplus > 0:
                for e in comp:
                    if e in big:
                        big.discard(e)
                        small.add(e)
                    else:
                        small.discard(e)
                        big.add(e)
                swapped = True
                break
        if not swapped:  # cannot happen: a size gap >= 2 forces a surplus path
            raise AssertionError("no surplus component despite size gap")


def balanced_matchings(g: Graph, num_classes: int) -> list[frozenset[Edge]]:
    """Decompose E(g) into ``num_classes`` matchings with sizes within one.
    Requires num_classes >= max_degree + 1."""
    if num_classes < g.max_degree() + 1:
        raise BadParams(
            f"{num_classes} classes < max degree {g.max_degree()} + 1"
        )
    coloring = edge_coloring(g)
    classes: list[set[Edge]] = [set() for _ in range(num_classes)]
    for e, c in coloring.items():
        classes[c].add(e)
    rebalance_matchings(classes)
    ordered = sorted(classes, key=lambda m: (-len(m), sorted(m)))
    return [frozenset(m) for m in ordered]


def vizing_balanced(g: Graph) -> MatchingDecomposition:
    """Decompose E(g) into exactly max_degree+1 pairwise disjoint matchings
    (some possibly empty) with sizes within one, largest first."""
    return MatchingDecomposition(
        tuple(balanced_matchings(g, g.max_degree() + 1)), g
    )


# -- the split trick ---------------------------------------------------------

def split_trick(g: Graph, A0, A, D: int) -> list[PathSystem]:
    """Decompose E(g) into D/2 edge-disjoint path systems with sizes within
    one, all internal path vertices in A0, largest systems first."""
    A0 = sorted(A0)
    A = sorted(A)
    if D % 2 != 0 or D < 2:
        raise PreconditionViolated(f"D = {D} must be a positive even integer")
    if set(A0) & set(A) or set(A0) | set(A) != set(range(g.n)):
        raise PreconditionViolated("A0, A must partition the vertex set")
    if g.max_degree() > D - 2:
        v = max(range(g.n), key=g.degree)
        raise PreconditionViolated(f"max degree {g.degree(v)} > D-2 at {v}", witness=v)
    half = D // 2
    for x in A:
        if g.degree(x) > half - 1:
            raise PreconditionViolated(
                f"degree {g.degree(x)} of {x} in A exceeds D/2-1", witness=x
            )
    gA0 = g.edges_within(A0)
    degA0 = {v: 0 for v in A0}
    for u, v in gA0:
        degA0[u] += 1
        degA0[v] += 1
    if degA0 and max(degA0.values()) > half - 1:
        v = max(degA0, key=lambda x: (degA0[x], -x))
        raise PreconditionViolated(
            f"degree {degA0[v]} of {v} inside A0 exceeds D/2-1", witness=v
        )

    # G1: all edges inside A0 and inside A, plus greedily added A0A-edges
    # while degrees stay <= D/2 - 1.  G2 gets the rest (A0A-edges only).
    in_g1 = set(gA0) | set(g.edges_within(A))
    deg1 = {v: 0 for v in range(g.n)}
    for u, v in in_g1:
        deg1[u] += 1
        deg1[v] += 1
    g2_edges = []
    A0_set = set(A0)
    for u, v in sorted(g.edges - in_g1):
        if deg1[u] <= half - 2 and deg1[v] <= half - 2:
            in_g1.add((u, v))
            deg1[u] += 1
            deg1[v] += 1
        else:
            g2_edges.append((u, v))

    # auxiliary graph: duplicate A0, route G2 edges through the copies
    copy = {a: g.n + i for i, a in enumerate(A0)}
    aux_edges = list(in_g1)
    for u, v in g2_edges:
        a, x = (u, v) if u in A0_set else (v, u)
        aux_edges.append((copy[a], x))
    aux = Graph(g.n + len(A0), aux_edges)
    classes = balanced_matchings(aux, half)

    back = {c: a for a, c in copy.items()}
    systems = []
    for m in classes:
        edges = [(back.get(u, u), back.get(v, v)) for u, v in m]
        systems.append(PathSystem(g.n, edges))
    return systems


def path_system_split(
    g: Graph, A0, A, t: int, sizes: list[int] | None = None
) -> list[PathSystem]:
    """Decompose E(g) into t path systems with internal vertices in A0 and
    sizes within one (largest first).

    Uses the duplication construction when its degree preconditions hold;
    for the tiny instances where t is too small for that route (the
    construction needs 2t-2 degree headroom), a direct backtracking
    assignment over the same constraints takes over.
    """
    if sizes is None:
        base, extra = divmod(g.num_edges(), t)
        sizes = [base + 1] * extra + [base] * (t - extra)
    if len(sizes) != t or sum(sizes) != g.num_edges():
        raise BadParams(f"sizes {sizes} do not fit {g.num_edges()} edges in {t} parts")
    try:
        systems = split_trick(g, A0, A, 2 * t)
        if [s.num_edges() for s in systems] == sizes:
            return systems
    except PreconditionViolated:
        pass
    return _backtrack_path_split(g, set(A0), t, sizes)


def _backtrack_path_split(g: Graph, A0: set, t: int, sizes: list[int]):
    """Exact-size assignment of edges to classes; each class stays a path
    system whose internal vertices lie in A0 (inner vertices keep degree at
    most one per class, exceptional ones at most two, no cycles)."""
    edges = sorted(g.edges)
    deg = [dict() for _ in range(t)]
    parent = [dict() for _ in range(t)]
    count = [0] * t
    out: list[list] = [[] for _ in range(t)]

    def find(c, x):
        while parent[c].get(x, x) != x:
            parent[c][x] = parent[c].get(parent[c][x], parent[c][x])
            x = parent[c][x]
        return x

    def ok(c, u, v):
        if count[c] >= sizes[c]:
            return False
        if deg[c].get(u, 0) >= (2 if u in A0 else 1):
            return False
        if deg[c].get(v, 0) >= (2 if v in A0 else 1):
            return False
        return find(c, u) != find(c, v)

    def place(idx):
        if idx == len(edges):
            return all(count[c] == sizes[c] for c in range(t))
        u, v = edges[idx]
        tried_fresh_sizes = set()
        for c in range(t):
            if count[c] == 0:
                if sizes[c] in tried_fresh_sizes:
                    continue  # empty classes of equal target size are interchangeable
                tried_fresh_sizes.add(sizes[c])
            if not ok(c, u, v):
                continue
            count[c] += 1
            deg[c][u] = deg[c].get(u, 0) + 1
            deg[c][v] = deg[c].get(v, 0) + 1
            saved = parent[c].copy()
            parent[c][find(c, u)] = find(c, v)
            out[c].append((u, v))
            if place(idx + 1):
                return True
            out[c].pop()
            parent[c] = saved
            count[c] -= 1
            deg[c][u] -= 1
            deg[c][v] -= 1
        return False

    if not place(0):
        raise PreconditionViolated(
            f"no decomposition into {t} path systems of sizes {sizes}"
        )
    systems = [PathSystem(g.n, es) for es in out]
    systems.sort(key=lambda s: (-s.num_edges(), sorted(s.edges)))
    return systems


# -- random sparsifying split ------------------------------------------------

@dataclass(frozen=True)
class SparsifyResult:
    kept: Graph
    leftover: Graph
    attempts: int
    degree_bound: Fraction


def sparsify_split(
    g: Graph,
    gamma,
    alpha,
    seed: int = 0,
    max_attempts: int = 64,
    target_edges: int | None = None,
) -> SparsifyResult:
    """Split g into (kept, leftover) with e(kept) = ceil((1-gamma) e(g)) and
    max degree of the leftover at most 6*gamma*alpha*n/5.

    Each attempt keeps every edge out of ``kept`` independently with
    probability 11*gamma/10 and then tops up or trims (lowest-index first)
    to hit the exact edge count; both postconditions are verified and the
    construction retries with fresh randomness until they hold.
    """
    gamma, alpha = frac(gamma), frac(alpha)
    if not 0 <= gamma < Fraction(1, 2):
        raise PreconditionViolated(f"gamma = {gamma} outside [0, 1/2)")
    e_total = g.num_edges()
    target = (
        target_edges
        if target_edges is not None
        else math.ceil((1 - gamma) * e_total)
    )
    if not 0 <= target <= e_total:
        raise PreconditionViolated(f"target edge count {target} out of range")
    bound = Fraction(6, 5) * gamma * alpha * g.n
    p = float(Fraction(11, 10) * gamma)
    sorted_edges = sorted(g.edges)
    last = []
    for attempt in range(max_attempts):
        rng = random.Random((seed, attempt).__hash__())
        removed = {e for e in sorted_edges if rng.random() < p}
        kept_edges = set(g.edges) - removed
        if len(kept_edges) < target:
            for e in sorted_edges:
                if len(kept_edges) >= target:
                    break
                kept_edges.add(e)
        elif len(kept_edges) > target:
            for e in sorted_edges:
                if len(kept_edges) <= target:
                    break
                kept_edges.discard(e)
        kept = Graph(g.n, kept_edges)
        leftover = g.minus(kept)
        if leftover.max_degree() <= bound and kept.num_edges() == target:
            return SparsifyResult(kept, leftover, attempt + 1, bound)
        last = [
            f"attempt {attempt}: leftover max degree "
            f"{leftover.max_degree()} vs bound {bound}"
        ]
    raise RetryBudgetExceeded(
        f"sparsify_split failed after {max_attempts} attempts "
        f"(degree bound {bound})",
        attempts=max_attempts,
        last_failures=last,
    )
