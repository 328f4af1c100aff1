# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Hamilton cycle enumerator (machine-word twin of ``_pure``).

Supports up to 64 vertices; semantics and enumeration order are identical to
``bipham.hamkernel._pure.CycleEnum``.
"""

from libc.stdlib cimport free, malloc
from libc.stdint cimport int8_t, int32_t, uint64_t


cdef inline int _ctz(uint64_t x):
    cdef int i = 0
    while not (x & 1):
        x >>= 1
        i += 1
    return i


cdef class CycleEnum:
    cdef int n, start, num_waypoints
    cdef uint64_t *pa
    cdef uint64_t *pb
    cdef uint64_t *umask
    cdef int8_t *dirv
    cdef int32_t *ranks
    cdef int32_t *path
    cdef uint64_t *cands
    cdef int32_t *need_stack
    cdef uint64_t visited, close_mask, full
    cdef int depth, need
    cdef bint done, has_ranks, break_mirror, has_budget
    cdef public unsigned long long nodes
    cdef unsigned long long max_nodes
    cdef public bint budget_exceeded

    def __cinit__(
        self,
        port_a,
        port_b,
        directed,
        int start=0,
        waypoint_ranks=None,
        max_nodes=None,
        bint break_mirror=False,
    ):
        cdef int n = len(port_a)
        if n > 64:
            raise ValueError("compiled kernel supports at most 64 vertices")
        self.n = n
        self.start = start
        self.break_mirror = break_mirror
        self.nodes = 0
        self.budget_exceeded = False
        self.has_budget = max_nodes is not None
        self.max_nodes = 0 if max_nodes is None else <unsigned long long> max_nodes

        self.pa = <uint64_t *> malloc(n * sizeof(uint64_t))
        self.pb = <uint64_t *> malloc(n * sizeof(uint64_t))
        self.umask = <uint64_t *> malloc(n * sizeof(uint64_t))
        self.dirv = <int8_t *> malloc(n * sizeof(int8_t))
        self.ranks = <int32_t *> malloc(n * sizeof(int32_t))
        self.path = <int32_t *> malloc((n + 1) * sizeof(int32_t))
        self.cands = <uint64_t *> malloc((n + 1) * sizeof(uint64_t))
        self.need_stack = <int32_t *> malloc((n + 1) * sizeof(int32_t))

        cdef int v
        self.has_ranks = waypoint_ranks is not None
        self.num_waypoints = 0
        for v in range(n):
            self.pa[v] = <uint64_t> port_a[v]
            self.pb[v] = <uint64_t> port_b[v]
            self.umask[v] = self.pa[v] | self.pb[v]
            self.dirv[v] = 1 if directed[v] else 0
            if self.has_ranks:
                self.ranks[v] = <int32_t> waypoint_ranks[v]
                if self.ranks[v] >= 0:
                    self.num_waypoints += 1
            else:
                self.ranks[v] = -1
        if self.has_ranks and self.ranks[start] != 0 and self.ranks[start] != -1:
            raise ValueError("start vertex must be the rank-0 waypoint")

        self.full = (<uint64_t> 1 << n) - 1 if n < 64 else <uint64_t> 0xFFFFFFFFFFFFFFFFULL
        self.visited = <uint64_t> 1 << start
        self.path[0] = start
        if self.dirv[start]:
            self.cands[0] = self.pb[start] & ~self.visited
            self.close_mask = self.pa[start]
        else:
            self.cands[0] = self.umask[start] & ~self.visited
            self.close_mask = 0
        self.need = 1 if (self.has_ranks and self.ranks[start] == 0) else 0
        self.need_stack[0] = self.need
        self.depth = 0
        self.done = n < 3

    def __dealloc__(self):
        free(self.pa)
        free(self.pb)
        free(self.umask)
        free(self.dirv)
        free(self.ranks)
        free(self.path)
        free(self.cands)
        free(self.need_stack)

    cdef inline uint64_t _exits(self, int v, int came_from):
        cdef uint64_t fb = <uint64_t> 1 << came_from
        cdef uint64_t out = 0
        if self.dirv[v]:
            return self.pb[v] if (self.pa[v] & fb) else 0
        if self.pa[v] & fb:
            out |= self.pb[v]
        if self.pb[v] & fb:
            out |= self.pa[v]
        return out

    cdef inline bint _prune(self, int cur):
        cdef uint64_t avail_base = (~self.visited) | (<uint64_t> 1 << cur) | (<uint64_t> 1 << self.start)
        cdef uint64_t rem = (~self.visited) & self.full
        cdef uint64_t b, m
        cdef int w
        while rem:
            b = rem & (~rem + 1)
            w = _ctz(b)
            rem ^= b
            m = self.umask[w] & avail_base
            if m == 0 or (m & (m - 1)) == 0:
                return True
        return False

    def __iter__(self):
        return self

    def __next__(self):
        cdef uint64_t cand, b, exits
        cdef int v, prev, r, new_need, i
        while not self.done:
            cand = self.cands[self.depth]
            if cand == 0:
                if self.depth == 0:
                    self.done = True
                    break
                v = self.path[self.depth]
                self.visited ^= <uint64_t> 1 << v
                self.depth -= 1
                self.need = self.need_stack[self.depth]
                continue
            b = cand & (~cand + 1)
            self.cands[self.depth] = cand ^ b
            v = _ctz(b)

            if self.has_budget and self.nodes >= self.max_nodes:
                self.budget_exceeded = True
                self.done = True
                break
            self.nodes += 1

            new_need = self.need
            if self.has_ranks:
                r = self.ranks[v]
                if r >= 0:
                    if r != self.need:
                        continue
                    new_need = self.need + 1

            prev = self.path[self.depth]
            if self.depth == 0 and not self.dirv[self.start]:
                self.close_mask = self._exits(self.start, v)

            self.depth += 1
            self.path[self.depth] = v
            self.visited |= b
            self.need = new_need
            self.need_stack[self.depth] = new_need

            if self.visited == self.full:
                exits = self._exits(v, prev)
                if (
                    (exits & (<uint64_t> 1 << self.start)) != 0
                    and (self.close_mask & b) != 0
                    and not (
                        self.break_mirror and self.path[1] > self.path[self.depth]
                    )
                ):
                    result = [self.path[i] for i in range(self.depth + 1)]
                    self.visited ^= b
                    self.depth -= 1
                    self.need = self.need_stack[self.depth]
                    return result
                self.visited ^= b
                self.depth -= 1
                self.need = self.need_stack[self.depth]
                continue

            exits = self._exits(v, prev) & ~self.visited
            if exits == 0 or self._prune(v):
                self.visited ^= b
                self.depth -= 1
                self.need = self.need_stack[self.depth]
                continue
            self.cands[self.depth] = exits
        raise StopIteration
