"""Scheme validation: the cluster-structured bipartite graphs (undirected
and oriented) in which path-system factors are built.

An undirected scheme demands that the graph live between A and B and that
every vertex see almost all of every opposite subcluster.  The oriented
variant strengthens this to superregularity of all directed cluster pairs
and large common in/out-neighborhoods in every subcluster.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .balance import frac
from .graphs import Graph, LabelledPartition, OrientedGraph
from .regularity import check_regular_pair


def rational_ceil(x: float, granularity: int = 10**6) -> Fraction:
    """Smallest Fraction with the given denominator that is >= x; used to
    turn irrational thresholds (like 2*sqrt(eps)) into exact ones."""
    return Fraction(math.ceil(x * granularity), granularity)


def partition_structure_violations(
    part: LabelledPartition, eps0, require_refinement: bool
) -> list[str]:
    eps0 = frac(eps0)
    problems = []
    if part.clusters_A is None:
        return ["no clusters present"]
    if part.m is None or part.m == 0:
        problems.append("empty clusters")
    if len(part.V0()) > eps0 * part.n:
        problems.append(
            f"|A0 u B0| = {len(part.V0())} > eps0*n = {eps0 * part.n}"
        )
    if require_refinement and part.refined_A is None:
        problems.append("no refinement present")
    return problems


def scheme_violations(
    g: Graph, part: LabelledPartition, eps0, eps
) -> list[str]:
    """Undirected scheme conditions: partition structure, bipartiteness
    between A and B, and near-complete degrees into every subcluster."""
    eps0, eps = frac(eps0), frac(eps)
    problems = partition_structure_violations(part, eps0, require_refinement=False)
    if problems and problems[0] == "no clusters present":
        return problems
    A, B = frozenset(part.A), frozenset(part.B)
    for u, v in sorted(g.edges):
        if not ((u in A and v in B) or (u in B and v in A)):
            problems.append(f"edge ({u},{v}) is not an AB-edge")
            break
    L = part.L or 1
    m = part.m
    threshold = (1 - eps) * Fraction(m, L)
    K = part.K
    for i in range(1, K + 1):
        for h in range(1, L + 1):
            sub_a = part.subcluster_A(i, h)
            sub_b = part.subcluster_B(i, h)
            for v in part.B:
                if g.d(v, sub_a) < threshold:
                    problems.append(
                        f"d({v}, A_({i},{h})) = {g.d(v, sub_a)} < (1-eps)m/L = {threshold}"
                    )
            for w in part.A:
                if g.d(w, sub_b) < threshold:
                    problems.append(
                        f"d({w}, B_({i},{h})) = {g.d(w, sub_b)} < (1-eps)m/L = {threshold}"
                    )
    return problems


def oriented_scheme_violations(
    gdir: OrientedGraph,
    part: LabelledPartition,
    eps0,
    eps,
    exhaustive_limit: int = 12,
    check_pairs: bool = True,
) -> list[str]:
    """Oriented scheme conditions: AB-orientation, superregular directed
    subcluster pairs at density one half, and large common in/out
    neighborhoods inside every subcluster."""
    eps0, eps = frac(eps0), frac(eps)
    problems = partition_structure_violations(part, eps0, require_refinement=False)
    A, B = frozenset(part.A), frozenset(part.B)
    for x, y in sorted(gdir.arcs):
        if not ((x in A and y in B) or (x in B and y in A)):
            problems.append(f"arc ({x},{y}) is not an AB-arc")
            break
    K = part.K
    L = part.L or 1
    m = part.m

    def directed_pair(xs, ys):
        """Arcs from xs to ys as an undirected bipartite graph."""
        return Graph(
            gdir.n, [(x, y) for x, y in gdir.arcs if x in xs and y in ys]
        )

    if check_pairs:
        half = Fraction(1, 2)
        for i in range(1, K + 1):
            for j in range(1, K + 1):
                for h in range(1, L + 1):
                    for h2 in range(1, L + 1):
                        sa = set(part.subcluster_A(i, h))
                        sb = set(part.subcluster_B(j, h2))
                        for left, right, name in (
                            (sa, sb, f"A_({i},{h})->B_({j},{h2})"),
                            (sb, sa, f"B_({j},{h2})->A_({i},{h})"),
                        ):
                            rep = check_regular_pair(
                                directed_pair(left, right),
                                sorted(left),
                                sorted(right),
                                eps,
                                d=half,
                                exhaustive_limit=exhaustive_limit,
                            )
                            if not rep.is_superregular:
                                problems.append(
                                    f"pair {name} not [{eps},1/2]-superregular"
                                )
    floor_cn = (1 - eps) * Fraction(m, 5 * L)
    for side, other_sub in (
        (sorted(part.A), part.subcluster_B),
        (sorted(part.B), part.subcluster_A),
    ):
        for xi, x in enumerate(side):
            for y in side[xi + 1 :]:
                for i in range(1, K + 1):
                    for h in range(1, L + 1):
                        sub = set(other_sub(i, h))
                        both = len(gdir.out[x] & gdir.inn[y] & sub)
                        rev = len(gdir.out[y] & gdir.inn[x] & sub)
                        if both < floor_cn or rev < floor_cn:
                            problems.append(
                                f"common neighborhood of ({x},{y}) in "
                                f"subcluster ({i},{h}) too small: "
                                f"{min(both, rev)} < {floor_cn}"
                            )
    return problems
