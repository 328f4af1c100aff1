"""Hamilton-cycle search with prescribed path systems.

A target cycle must contain every edge of a set of vertex-disjoint
prescribed paths and may otherwise only use edges of an ``allowed`` graph.
Each prescribed path is contracted to a single search vertex with two ports
(the allowed neighborhoods of its two ends); a port-constrained kernel then
enumerates candidate cycles.  Because a single port mask per end cannot
express which end of the *other* contracted path an edge attaches to, the
kernel over-approximates: every true cycle is enumerated, and each candidate
is re-checked here by a two-state chain DP before it is reported.

Prescribed paths may be directed (must be traversed in the given vertex
order) and carry ranks forcing a cyclic visit order, which is how
"traverse these edges in this sequence" constraints are expressed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .graphs import Graph
from .hamkernel import cycle_enumerator


@dataclass(frozen=True)
class Prescribed:
    """A path that the cycle must contain, as a vertex sequence."""

    vertices: tuple[int, ...]
    directed: bool = False
    rank: int = -1


@dataclass
class SearchStats:
    nodes: int = 0
    candidates: int = 0
    rejected: int = 0
    budget_exceeded: bool = False
    extra: dict = field(default_factory=dict)


class CycleSearch:
    """Enumerates Hamilton cycles of ``allowed`` + prescribed paths covering
    all of 0..n-1.  Yields cycles as vertex lists (closing edge implicit)."""

    def __init__(
        self,
        allowed: Graph,
        prescribed: Sequence[Prescribed] = (),
        max_nodes: int | None = None,
        seed: int = 0,
        force_pure: bool = False,
    ):
        self.allowed = allowed
        self.n = allowed.n
        self.prescribed = list(prescribed)
        self.max_nodes = max_nodes
        self.seed = seed
        self.force_pure = force_pure
        self.stats = SearchStats()
        self._validate()

    def _validate(self):
        seen = set()
        for p in self.prescribed:
            if len(p.vertices) < 2:
                raise ValueError("prescribed paths need at least one edge")
            for v in p.vertices:
                if v in seen:
                    raise ValueError(f"vertex {v} on two prescribed paths")
                seen.add(v)

    # -- item construction -------------------------------------------------
    def _items(self):
        on_path = {v for p in self.prescribed for v in p.vertices}
        items = []
        for p in self.prescribed:
            items.append(("path", p.vertices, p.directed, p.rank))
        for v in range(self.n):
            if v not in on_path:
                items.append(("free", (v,), False, -1))
        if self.seed:
            rng = random.Random(self.seed)
            rng.shuffle(items)
        return items

    def cycles(self) -> Iterator[list[int]]:
        items = self._items()
        k = len(items)
        if k == 0:
            return
        if k <= 2:
            yield from self._tiny(items)
            return

        adj = self.allowed.adj
        where = {}
        for idx, it in enumerate(items):
            for v in it[1]:
                where[v] = idx

        def mask_of(cp: int, self_idx: int) -> int:
            m = 0
            for w in adj[cp]:
                j = where[w]
                if j != self_idx:
                    m |= 1 << j
            return m

        port_a, port_b, directed, ranks = [], [], [], []
        has_ranks = any(it[3] >= 0 for it in items)
        for idx, (kind, verts, dirflag, rank) in enumerate(items):
            pa = mask_of(verts[0], idx)
            pb = mask_of(verts[-1], idx) if len(verts) > 1 else pa
            port_a.append(pa)
            port_b.append(pb)
            directed.append(dirflag)
            ranks.append(rank)

        if has_ranks:
            start = ranks.index(0)
        else:
            start = 0
        mirror = not has_ranks and not any(directed)
        enum = cycle_enumerator(
            port_a,
            port_b,
            directed,
            start=start,
            waypoint_ranks=ranks if has_ranks else None,
            max_nodes=self.max_nodes,
            break_mirror=mirror,
            force_pure=self.force_pure,
        )
        for item_cycle in enum:
            self.stats.candidates += 1
            decoded = self._decode(items, item_cycle)
            if decoded is None:
                self.stats.rejected += 1
                continue
            self.stats.nodes = enum.nodes
            yield decoded
        self.stats.nodes = enum.nodes
        self.stats.budget_exceeded = bool(enum.budget_exceeded)

    def first(self) -> list[int] | None:
        for c in self.cycles():
            return c
        return None

    # -- candidate verification / decoding ---------------------------------
    def _decode(self, items, item_cycle) -> list[int] | None:
        k = len(item_cycle)
        has = self.allowed.has_edge

        def states(idx):
            kind, verts, dirflag, _ = items[idx]
            if kind == "free" or len(verts) == 1:
                return ((verts[0], verts[0]),)
            if dirflag:
                return ((verts[0], verts[-1]),)
            return ((verts[0], verts[-1]), (verts[-1], verts[0]))

        # chain DP over orientations; fix the first item's state
        for first_state in states(item_cycle[0]):
            choice = [None] * k
            choice[0] = first_state
            reachable = [first_state]
            parents = [None] * k
            layers = [[first_state]]
            ok = True
            for pos in range(1, k):
                prev_layer = layers[-1]
                cur = []
                par = {}
                for st in states(item_cycle[pos]):
                    for pst in prev_layer:
                        if has(pst[1], st[0]):
                            cur.append(st)
                            par[st] = pst
                            break
                if not cur:
                    ok = False
                    break
                layers.append(cur)
                parents[pos] = par
            if not ok:
                continue
            # close the cycle back to the fixed first state
            final = None
            for st in layers[-1]:
                if has(st[1], first_state[0]):
                    final = st
                    break
            if final is None:
                continue
            # reconstruct orientations
            orient = [None] * k
            orient[-1] = final
            for pos in range(k - 1, 0, -1):
                orient[pos - 1] = (
                    parents[pos][orient[pos]] if pos > 1 else choice[0]
                )
            out = []
            for pos in range(k):
                kind, verts, dirflag, _ = items[item_cycle[pos]]
                entry, _ = orient[pos]
                seq = verts if verts[0] == entry else tuple(reversed(verts))
                out.extend(seq)
            return out
        return None

    def _tiny(self, items):
        """Handle 1- or 2-item instances, where the kernel's minimum cycle
        length of three items does not apply."""
        has = self.allowed.has_edge
        if len(items) == 1:
            kind, verts, dirflag, _ = items[0]
            if kind == "path" and len(verts) >= 3 and has(verts[0], verts[-1]):
                yield list(verts)
            return
        (k1, v1, d1, _), (k2, v2, d2, _) = items
        # need two distinct allowed edges joining opposite ends
        ends1 = (v1[0], v1[-1])
        ends2 = (v2[0], v2[-1])
        for o2 in ((v2, False), (tuple(reversed(v2)), True)):
            seq2, flipped = o2
            if d2 and flipped:
                continue
            e_close_a = (ends1[-1], seq2[0])
            e_close_b = (seq2[-1], ends1[0])
            if (
                has(*e_close_a)
                and has(*e_close_b)
                and frozenset(e_close_a) != frozenset(e_close_b)
            ):
                cyc = list(v1) + list(seq2)
                if len(cyc) == len(set(cyc)) and len(cyc) >= 3:
                    yield cyc
                    return


def find_hamilton_cycle(
    g: Graph,
    prescribed: Sequence[Prescribed] = (),
    max_nodes: int | None = None,
    seed: int = 0,
    force_pure: bool = False,
) -> list[int] | None:
    """First Hamilton cycle of ``g`` containing the prescribed paths, or
    None (inspect ``CycleSearch`` directly for budget information)."""
    return CycleSearch(
        g, prescribed, max_nodes=max_nodes, seed=seed, force_pure=force_pure
    ).first()
