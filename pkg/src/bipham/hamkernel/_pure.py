"""Pure-Python Hamilton cycle enumerator over port-constrained vertices.

The search instance is a graph whose vertices each expose two "ports": a
cycle must use one edge through each port.  Ordinary vertices have both port
masks equal to their adjacency mask.  A vertex produced by contracting a
prescribed path has port masks equal to the allowed neighborhoods of the two
path ends.  A "directed" vertex must be entered through port A and left
through port B (used to force a traversal direction through contracted
edges).  Optional waypoint ranks force a set of vertices to appear in a
fixed cyclic order.

Masks are Python ints, so any vertex count is supported; the compiled twin
in ``_fast`` handles up to 64 vertices with machine words.
"""

from __future__ import annotations


class CycleEnum:
    """Resumable enumerator of Hamilton cycles.

    Yields each cycle as a list of vertex ids starting at ``start``.  The
    enumeration order is deterministic: candidates are tried in ascending
    vertex order.
    """

    def __init__(
        self,
        port_a: list[int],
        port_b: list[int],
        directed: list[bool],
        start: int = 0,
        waypoint_ranks: list[int] | None = None,
        max_nodes: int | None = None,
        break_mirror: bool = False,
    ):
        self.n = len(port_a)
        self.pa = list(port_a)
        self.pb = list(port_b)
        self.dirv = list(directed)
        self.start = start
        self.ranks = list(waypoint_ranks) if waypoint_ranks is not None else None
        self.max_nodes = max_nodes
        self.break_mirror = break_mirror
        self.nodes = 0
        self.budget_exceeded = False

        n = self.n
        self.union_mask = [self.pa[v] | self.pb[v] for v in range(n)]
        if self.ranks is not None and self.ranks[start] not in (0, -1):
            raise ValueError("start vertex must be the rank-0 waypoint")
        self.num_waypoints = (
            0 if self.ranks is None else sum(1 for r in self.ranks if r >= 0)
        )

        # search state (explicit stacks so iteration can be resumed)
        self.path = [start]
        self.visited = 1 << start
        if self.dirv[start]:
            first_cands = self.pb[start]
            self.close_mask = self.pa[start]
        else:
            first_cands = self.union_mask[start]
            self.close_mask = 0  # determined once the first step is chosen
        self.cands = [first_cands & ~self.visited]
        self.need = 1 if (self.ranks is not None and self.ranks[start] == 0) else 0
        self.need_stack = [self.need]
        self._done = n < 3

    def _exits(self, v: int, came_from: int) -> int:
        fb = 1 << came_from
        if self.dirv[v]:
            return self.pb[v] if (self.pa[v] & fb) else 0
        out = 0
        if self.pa[v] & fb:
            out |= self.pb[v]
        if self.pb[v] & fb:
            out |= self.pa[v]
        return out

    def _prune(self, cur: int) -> bool:
        """True if some unvisited vertex can no longer get two cycle edges."""
        avail_base = ~self.visited | (1 << cur) | (1 << self.start)
        rem = ~self.visited & ((1 << self.n) - 1)
        while rem:
            b = rem & -rem
            w = b.bit_length() - 1
            rem ^= b
            m = self.union_mask[w] & avail_base
            # need two distinct neighbors available
            if m == 0 or (m & (m - 1)) == 0:
                return True
        return False

    def __iter__(self):
        return self

    def __next__(self) -> list[int]:
        n = self.n
        full = (1 << n) - 1
        while not self._done:
            depth = len(self.path) - 1
            cand = self.cands[depth]
            if cand == 0:
                # backtrack
                if depth == 0:
                    self._done = True
                    break
                v = self.path.pop()
                self.visited ^= 1 << v
                self.cands.pop()
                self.need_stack.pop()
                self.need = self.need_stack[-1]
                continue
            b = cand & -cand
            self.cands[depth] = cand ^ b
            v = b.bit_length() - 1

            if self.max_nodes is not None and self.nodes >= self.max_nodes:
                self.budget_exceeded = True
                self._done = True
                break
            self.nodes += 1

            new_need = self.need
            if self.ranks is not None:
                r = self.ranks[v]
                if r >= 0:
                    if r != self.need:
                        continue
                    new_need = self.need + 1

            prev = self.path[-1]
            if depth == 0 and not self.dirv[self.start]:
                self.close_mask = self._exits(self.start, v)

            self.path.append(v)
            self.visited |= b
            self.need = new_need
            self.need_stack.append(new_need)

            if self.visited == full:
                exits = self._exits(v, prev)
                ok = bool(exits & (1 << self.start)) and bool(
                    self.close_mask & (1 << v)
                )
                if ok and self.break_mirror and self.path[1] > self.path[-1]:
                    ok = False
                if ok:
                    result = list(self.path)
                    # pop so the next __next__ call resumes correctly
                    self.path.pop()
                    self.visited ^= b
                    self.need_stack.pop()
                    self.need = self.need_stack[-1]
                    return result
                self.path.pop()
                self.visited ^= b
                self.need_stack.pop()
                self.need = self.need_stack[-1]
                continue

            exits = self._exits(v, prev) & ~self.visited
            if exits == 0 or self._prune(v):
                self.path.pop()
                self.visited ^= b
                self.need_stack.pop()
                self.need = self.need_stack[-1]
                continue
            self.cands.append(exits)
        raise StopIteration
