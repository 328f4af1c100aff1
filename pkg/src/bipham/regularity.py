"""Density-regularity checking for bipartite pairs, plus the tail bound used
by the randomized constructions.

The regularity test asks whether every sufficiently large sub-rectangle has
density within eps of the pair density.  The exhaustive mode enumerates all
admissible subsets of one class; for a fixed subset and a fixed size on the
other side, the extreme densities are attained by the vertices of largest
(resp. smallest) degree into the subset, so sorted prefix sums replace the
inner subset enumeration.  This is exact and is cross-checked in the tests
against a doubly-exponential brute force.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .balance import frac
from .errors import NotBipartite, OutOfRange
from .graphs import Graph

EXHAUSTIVE_LIMIT = 12


def concentration_bound(distribution: str, mean, a) -> float:
    """Upper bound 2*exp(-a^2 * mean / 3) on P(|X - EX| >= a*EX) for a
    binomial or hypergeometric X with EX = mean."""
    if distribution not in ("binomial", "hypergeometric"):
        raise OutOfRange(f"unknown distribution {distribution!r}")
    a = float(a)
    if not 0 < a < 1.5:
        raise OutOfRange(f"a = {a} outside (0, 3/2)")
    mean = float(mean)
    if mean < 0:
        raise OutOfRange(f"mean = {mean} negative")
    return 2.0 * math.exp(-(a * a) * mean / 3.0)


@dataclass(frozen=True)
class RegularityReport:
    density: Fraction
    eps: Fraction
    d: Fraction | None
    is_eps_regular: bool
    witness: tuple | None  # (A_sub, B_sub, density) on failure
    is_superregular: bool
    degree_witness: tuple | None  # (vertex, degree, low, high) on failure
    mode: str  # 'exhaustive' or 'sampled'
    samples: int
    seed: int | None

    def as_json(self):
        return {
            "density": [self.density.numerator, self.density.denominator],
            "eps": str(self.eps),
            "d": None if self.d is None else str(self.d),
            "is_eps_regular": self.is_eps_regular,
            "witness": None
            if self.witness is None
            else [list(self.witness[0]), list(self.witness[1]), str(self.witness[2])],
            "is_superregular": self.is_superregular,
            "degree_witness": None
            if self.degree_witness is None
            else list(map(str, self.degree_witness)),
            "mode": self.mode,
            "samples": self.samples,
            "seed": self.seed,
        }


def _min_size(eps: Fraction, size: int) -> int:
    """Smallest integer k with k >= eps*size (and k >= 1)."""
    k = math.ceil(eps * size)
    return max(int(k), 1)


def check_regular_pair(
    g: Graph,
    left: Sequence[int],
    right: Sequence[int],
    eps,
    d=None,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    samples: int = 2000,
    seed: int = 0,
) -> RegularityReport:
    """Test eps-regularity (and [eps, d]-superregularity when d is given) of
    the bipartite pair (left, right) in g.

    Edges inside either class are rejected.  Exhaustive when both classes
    have at most ``exhaustive_limit`` vertices, sampled otherwise.
    """
    eps = frac(eps)
    d = None if d is None else frac(d)
    A = sorted(left)
    B = sorted(right)
    if set(A) & set(B):
        raise NotBipartite("classes overlap")
    if g.e_within(A) or g.e_within(B):
        raise NotBipartite("class contains internal edges")
    p, q = len(A), len(B)
    if p == 0 or q == 0:
        raise NotBipartite("empty class")
    e_total = g.e_between(A, B)
    density = Fraction(e_total, p * q)

    exhaustive = p <= exhaustive_limit and q <= exhaustive_limit
    if exhaustive:
        ok, witness = _exhaustive_check(g, A, B, eps, density)
        mode, used = "exhaustive", 0
    else:
        ok, witness = _sampled_check(g, A, B, eps, density, samples, seed)
        mode, used = "sampled", samples

    super_ok, deg_witness = True, None
    if d is not None:
        for a in A:
            da = g.d(a, B)
            lo, hi = (d - eps) * q, (d + eps) * q
            if not lo <= da <= hi:
                super_ok, deg_witness = False, (a, da, lo, hi)
                break
        if super_ok:
            for b in B:
                db = g.d(b, A)
                lo, hi = (d - eps) * p, (d + eps) * p
                if not lo <= db <= hi:
                    super_ok, deg_witness = False, (b, db, lo, hi)
                    break
    return RegularityReport(
        density=density,
        eps=eps,
        d=d,
        is_eps_regular=ok,
        witness=witness,
        is_superregular=ok and super_ok if d is not None else False,
        degree_witness=deg_witness,
        mode=mode,
        samples=used,
        seed=seed if mode == "sampled" else None,
    )


def _deviates(s: int, k: int, ell: int, density: Fraction, eps: Fraction) -> bool:
    """|s/(k*ell) - density| >= eps, exactly."""
    return abs(Fraction(s, k * ell) - density) >= eps


def _exhaustive_check(g, A, B, eps, density):
    p, q = len(A), len(B)
    ka, kb = _min_size(eps, p), _min_size(eps, q)
    adj = g.adj
    bmask_index = {b: i for i, b in enumerate(B)}
    nbr = []
    for a in A:
        m = 0
        for w in adj[a]:
            i = bmask_index.get(w)
            if i is not None:
                m |= 1 << i
        nbr.append(m)

    for bits in range(1 << p):
        k = bits.bit_count()
        if k < ka:
            continue
        cnt = [0] * q
        rem = bits
        while rem:
            lb = rem & -rem
            i = lb.bit_length() - 1
            rem ^= lb
            m = nbr[i]
            while m:
                b = m & -m
                cnt[b.bit_length() - 1] += 1
                m ^= b
        order = sorted(range(q), key=lambda j: (cnt[j], j))
        pref = [0]
        for j in order:
            pref.append(pref[-1] + cnt[j])
        total = pref[-1]
        for ell in range(kb, q + 1):
            lo = pref[ell]
            hi = total - pref[q - ell]
            for s, pick in ((lo, order[:ell]), (hi, order[q - ell :])):
                if _deviates(s, k, ell, density, eps):
                    A_sub = [A[i] for i in range(p) if bits >> i & 1]
                    B_sub = sorted(B[j] for j in pick)
                    return False, (tuple(A_sub), tuple(B_sub), Fraction(s, k * ell))
    return True, None


def _sampled_check(g, A, B, eps, density, samples, seed):
    rng = random.Random(seed)
    p, q = len(A), len(B)
    ka, kb = _min_size(eps, p), _min_size(eps, q)
    for _ in range(samples):
        k = rng.randint(ka, p)
        ell = rng.randint(kb, q)
        A_sub = rng.sample(A, k)
        B_sub = rng.sample(B, ell)
        s = g.e_between(A_sub, B_sub)
        if _deviates(s, k, ell, density, eps):
            return False, (tuple(sorted(A_sub)), tuple(sorted(B_sub)), Fraction(s, k * ell))
    return True, None


def naive_regular_pair(g: Graph, left, right, eps) -> tuple[bool, tuple | None]:
    """Independent brute force over every admissible rectangle; test oracle
    for the exhaustive mode (exponential in both class sizes)."""
    eps = frac(eps)
    A, B = sorted(left), sorted(right)
    p, q = len(A), len(B)
    density = Fraction(g.e_between(A, B), p * q)
    ka, kb = _min_size(eps, p), _min_size(eps, q)
    for k in range(ka, p + 1):
        for A_sub in combinations(A, k):
            for ell in range(kb, q + 1):
                for B_sub in combinations(B, ell):
                    s = g.e_between(A_sub, B_sub)
                    if _deviates(s, k, ell, density, eps):
                        return False, (A_sub, B_sub, Fraction(s, k * ell))
    return True, None
