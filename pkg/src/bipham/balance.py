"""Balancedness and framework validation.

A graph is D-balanced with respect to a split (A, A0, B, B0) when the edge
surplus of the A-side equals (|A'|-|B'|)*D/2 and every exceptional vertex
has degree exactly D.  Frameworks layer degree and sparsity conditions on
top of a balanced split; they come in three strengths (pre < weak < full)
and are the precondition currency of the whole pipeline.

All verdicts use exact integer/rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from .errors import PartitionMismatch
from .graphs import Graph, LabelledPartition


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats arrive from CLI/json only; convert via repr to keep the
        # user-visible decimal value rather than the binary expansion
        return Fraction(repr(x))
    return Fraction(x)


def internal_degree(g: Graph, part: LabelledPartition, v: int) -> int:
    """Degree of v into its own side A' or B'."""
    side = part.A_prime() if part.on_a_side(v) else part.B_prime()
    return g.d(v, side)


def is_D_balanced(g: Graph, part: LabelledPartition, D: int) -> bool:
    """Exact test of the two balance conditions."""
    eA = g.e_within(part.A_prime())
    eB = g.e_within(part.B_prime())
    size_diff = (part.a + len(part.A)) - (part.b + len(part.B))
    if 2 * (eA - eB) != size_diff * D:
        return False
    return all(g.degree(v) == D for v in part.A0 + part.B0)


def balance_defect(g: Graph, part: LabelledPartition, D: int) -> dict:
    """Diagnostic version of is_D_balanced."""
    eA = g.e_within(part.A_prime())
    eB = g.e_within(part.B_prime())
    size_diff = (part.a + len(part.A)) - (part.b + len(part.B))
    bad_deg = {v: g.degree(v) for v in part.A0 + part.B0 if g.degree(v) != D}
    return {
        "edge_identity": 2 * (eA - eB) == size_diff * D,
        "lhs_times_2": 2 * (eA - eB),
        "rhs_times_2": size_diff * D,
        "bad_degrees": bad_deg,
    }


@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str
    witness: tuple = ()

    def as_json(self):
        return {
            "condition": self.condition,
            "detail": self.detail,
            "witness": list(self.witness),
        }


@dataclass(frozen=True)
class Framework:
    """A graph bound to a partition with validated framework conditions.

    ``kind`` is the strongest level that holds: 'full' (all seven framework
    conditions), 'weak' (the six weak conditions), or 'pre' (the first five).
    ``host`` is the supergraph used for the weak-level degree condition; it
    equals ``graph`` when no separate host was supplied.
    """

    graph: Graph
    partition: LabelledPartition
    D: int
    eps: Fraction
    eps_prime: Fraction
    K: int
    kind: str
    host: Graph | None = None

    @property
    def n(self) -> int:
        return self.graph.n

    def host_graph(self) -> Graph:
        return self.host if self.host is not None else self.graph

    def replace_graphs(self, graph: Graph, host: Graph | None) -> "Framework":
        return Framework(
            graph, self.partition, self.D, self.eps, self.eps_prime, self.K,
            self.kind, host,
        )


def _check_wf(g, f, part, D, eps, eps_prime, K) -> dict[str, list[Violation]]:
    """All conditions of all levels at once, keyed by condition id."""
    n = g.n
    out: dict[str, list[Violation]] = {}

    def add(cond, detail, witness=()):
        out.setdefault(cond, []).append(Violation(cond, detail, tuple(witness)))

    # partition coverage is enforced by LabelledPartition itself (WF1/FR1)
    if part.n != n:
        raise PartitionMismatch(f"partition over {part.n} vertices, graph has {n}")

    dd = balance_defect(g, part, D)
    if not dd["edge_identity"]:
        add(
            "WF2",
            f"2(e(A')-e(B')) = {dd['lhs_times_2']} != {dd['rhs_times_2']}",
        )
    for v in sorted(dd["bad_degrees"]):
        add("WF2", f"exceptional vertex {v} has degree {dd['bad_degrees'][v]} != {D}", (v,))

    eA = g.e_within(part.A_prime())
    eB = g.e_within(part.B_prime())
    if eA > eps * n * n:
        add("WF3", f"e(A') = {eA} > eps*n^2 = {eps * n * n}")
    if eB > eps * n * n:
        add("WF3", f"e(B') = {eB} > eps*n^2 = {eps * n * n}")

    if len(part.A) != len(part.B):
        add("WF4", f"|A| = {len(part.A)} != |B| = {len(part.B)}")
    if K <= 0 or len(part.A) % K != 0:
        add("WF4", f"|A| = {len(part.A)} not divisible by K = {K}")
    if part.a + part.b > eps * n:
        add("WF4", f"a+b = {part.a + part.b} > eps*n = {eps * n}")

    for v in part.A + part.B:
        dint = internal_degree(f, part, v)
        if dint > eps_prime * n:
            add("WF5", f"internal degree {dint} of {v} in host > eps'*n", (v,))
        dint_self = internal_degree(g, part, v)
        if dint_self > eps_prime * n:
            add("FR5", f"internal degree {dint_self} of {v} > eps'*n", (v,))

    for v in range(n):
        dint = internal_degree(g, part, v)
        if 2 * dint > g.degree(v):
            add("WF6", f"internal degree {dint} of {v} > d(v)/2 = {g.degree(v)}/2", (v,))

    if part.b > part.a:
        add("FR4", f"|B0| = {part.b} > |A0| = {part.a}")
    e_cross = g.e_between(part.A0, part.B0) if part.A0 and part.B0 else 0
    if e_cross != 0:
        add("FR6", f"e(A0,B0) = {e_cross} != 0")
    for v in range(n):
        dint = internal_degree(g, part, v)
        if dint > Fraction(g.degree(v), 2) + eps * n:
            add("FR7", f"internal degree {dint} of {v} > d(v)/2 + eps*n", (v,))
    return out


PRE_CONDITIONS = ("WF2", "WF3", "WF4", "WF5")
WEAK_CONDITIONS = PRE_CONDITIONS + ("WF6",)
FULL_CONDITIONS = ("WF2", "WF3", "WF4", "FR4", "FR5", "FR6", "FR7")


def validate_framework(
    g: Graph,
    part: LabelledPartition,
    D: int,
    eps,
    eps_prime,
    K: int,
    host: Graph | None = None,
):
    """Returns a Framework at the strongest level whose conditions all pass,
    or the list of violations of the weakest level otherwise.

    The full level checks the intrinsic conditions of ``g`` alone; the weak
    and pre levels additionally use ``host`` (the supergraph F) for the
    internal-degree condition on non-exceptional vertices.
    """
    eps, eps_prime = frac(eps), frac(eps_prime)
    f = host if host is not None else g
    found = _check_wf(g, f, part, D, eps, eps_prime, K)

    def fails(conds):
        return [v for c in conds for v in found.get(c, [])]

    if not fails(FULL_CONDITIONS):
        return Framework(g, part, D, eps, eps_prime, K, "full", host)
    if not fails(WEAK_CONDITIONS):
        return Framework(g, part, D, eps, eps_prime, K, "weak", host)
    if not fails(PRE_CONDITIONS):
        return Framework(g, part, D, eps, eps_prime, K, "pre", host)
    return fails(PRE_CONDITIONS)


def framework_violations(
    g: Graph,
    part: LabelledPartition,
    D: int,
    eps,
    eps_prime,
    K: int,
    level: str = "full",
    host: Graph | None = None,
) -> list[Violation]:
    """Violations of one specific level ('pre', 'weak' or 'full')."""
    eps, eps_prime = frac(eps), frac(eps_prime)
    f = host if host is not None else g
    found = _check_wf(g, f, part, D, eps, eps_prime, K)
    conds = {
        "pre": PRE_CONDITIONS,
        "weak": WEAK_CONDITIONS,
        "full": FULL_CONDITIONS,
    }[level]
    return [v for c in conds for v in found.get(c, [])]


def require_kind(fw: Framework, minimum: str):
    order = {"pre": 0, "weak": 1, "full": 2}
    if order[fw.kind] < order[minimum]:
        raise PartitionMismatch(
            f"framework of kind {fw.kind!r} where at least {minimum!r} is needed"
        )
