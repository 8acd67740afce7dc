"""Random-permutation heuristics for solution abundance.

The model: pick n-1 independent uniform permutations from a chosen subgroup
family acting on V_N, hold the last coordinate fixed, and ask how often the
per-row sums all vanish. The closed-form prediction treats the q^N row sums
as independent uniform values in V_{N+d}, giving success probability
q^(-(N+d)*q^N) per trial and

    p_N = (1 - q^(-(N+d)*q^N)) ** |G|^(n-1)

for the probability that no trial among |G|^(n-1) succeeds. Exponents grow
doubly exponentially, so p_N is computed in log space at a working precision
wide enough that log1p(-q^(-E)) keeps its leading bits.

monte_carlo measures the empirical rate. When the family is small enough it
switches to exhaustive enumeration of all permutation combinations, making
the counts exact and independent of the seed.
"""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import mpmath

from .core import CoeffTuple, vn_elements

FAMILY_KINDS = ("symmetric", "alternating", "cyclic", "dihedral")

MAX_SAMPLING_DEGREE = 16


@dataclass(frozen=True)
class GroupFamily:
    """A standard permutation subgroup of S_m, m = q^N."""

    kind: str
    degree: int

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family {self.kind!r}; pick one of {FAMILY_KINDS}")
        if self.degree < 1:
            raise ValueError("degree must be positive")

    @property
    def size(self) -> int:
        m = self.degree
        if self.kind == "symmetric":
            return math.factorial(m)
        if self.kind == "alternating":
            return max(math.factorial(m) // 2, 1)
        if self.kind == "cyclic":
            return m
        return 1 if m == 1 else (2 if m == 2 else 2 * m)

    def elements(self) -> list[tuple[int, ...]]:
        """All members, deterministically ordered. Only call for small sizes."""
        m = self.degree
        if self.kind == "symmetric":
            return list(itertools.permutations(range(m)))
        if self.kind == "alternating":
            return [p for p in itertools.permutations(range(m)) if _parity_even(p)]
        rotations = [tuple((i + k) % m for i in range(m)) for k in range(m)]
        if self.kind == "cyclic":
            return rotations
        reflections = [tuple((k - i) % m for i in range(m)) for k in range(m)]
        return list(dict.fromkeys(rotations + reflections))

    def sample(self, rng: random.Random) -> tuple[int, ...]:
        m = self.degree
        if self.kind in ("symmetric", "alternating"):
            perm = list(range(m))
            rng.shuffle(perm)
            if self.kind == "alternating" and not _parity_even(perm) and m >= 2:
                perm[0], perm[1] = perm[1], perm[0]
            return tuple(perm)
        k = rng.randrange(m)
        if self.kind == "dihedral" and rng.randrange(2):
            return tuple((k - i) % m for i in range(m))
        return tuple((i + k) % m for i in range(m))


def _parity_even(perm: Sequence[int]) -> bool:
    seen = [False] * len(perm)
    even = True
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            even = not even
    return even


def p_n_closed_form(q: int, d: int, n: int, N: int,
                    log_group_size: Optional[float] = None,
                    group_size: Optional[int] = None) -> float:
    """Natural log of the modelled no-solution probability p_N.

    Exactly one of log_group_size (natural log of |G|) and group_size must be
    given; the log form exists because interesting group sizes overflow any
    float long before the model becomes boring.
    """
    if (log_group_size is None) == (group_size is None):
        raise ValueError("give exactly one of log_group_size and group_size")
    if q < 2 or n < 3 or N < 1 or d < 0:
        raise ValueError("need q >= 2, n >= 3, N >= 1, d >= 0")
    if group_size is not None and group_size < 1:
        raise ValueError("group_size must be positive")
    exponent = (N + d) * q ** N
    bits = max(64, int(exponent * math.log2(q)) + 80)
    with mpmath.workprec(bits):
        per_trial = mpmath.mpf(q) ** (-exponent)
        log_term = mpmath.log1p(-per_trial)
        if group_size is not None:
            count = mpmath.mpf(group_size) ** (n - 1)
        else:
            count = mpmath.exp(mpmath.mpf(log_group_size) * (n - 1))
        return float(count * log_term)


def model_rate(q: int, d: int, n: int, N: int) -> float:
    """Modelled per-trial success probability q^(-(N+d)*q^N) as a float."""
    del n
    return math.exp(-(N + d) * q ** N * math.log(q))


@dataclass(frozen=True)
class HeuristicReport:
    family: GroupFamily
    exact: bool
    trials: int
    hits: int
    empirical_rate: float
    model_rate: float
    tv_distance: float
    sum_counts: dict

    def summary(self) -> str:
        mode = "exhaustive" if self.exact else "sampled"
        return (f"{mode} {self.family.kind} deg {self.family.degree}: "
                f"{self.hits}/{self.trials} hits, rate {self.empirical_rate:.6g} "
                f"(model {self.model_rate:.6g}), tv {self.tv_distance:.4f}")


def monte_carlo(a: CoeffTuple, N: int, family: GroupFamily,
                trials: int = 10000, seed: int = 0) -> HeuristicReport:
    """Estimate the solution rate for permutation combinations from a family.

    Exhaustive when |G|^(n-1) <= trials, which makes the counts exact and
    seed-independent. Per-row sums are tallied into a total-variation
    distance against the uniform distribution on V_{N+d}.
    """
    field = a.field
    if N < 1:
        raise ValueError("N must be positive")
    m = field.q ** N
    if m > MAX_SAMPLING_DEGREE:
        raise ValueError(
            f"degree too large: q^N = {m} exceeds the sampling limit {MAX_SAMPLING_DEGREE}")
    if family.degree != m:
        raise ValueError(f"family degree {family.degree} must equal q^N = {m}")
    if trials < 1:
        raise ValueError("trials must be positive")
    d = max(a.height, 0)
    n = a.n
    v = vn_elements(field, N)
    prods = [[c * x for x in v] for c in a.coeffs]
    last = prods[-1]
    counter: Counter = Counter()
    hits = 0
    total = 0
    exhaustive = family.size ** (n - 1) <= trials
    if exhaustive:
        combos = itertools.product(family.elements(), repeat=n - 1)
    else:
        rng = random.Random(f"mc:{field.q}:{N}:{family.kind}:{seed}")
        combos = (tuple(family.sample(rng) for _ in range(n - 1))
                  for _ in range(trials))
    for combo in combos:
        total += 1
        all_zero = True
        for j in range(m):
            s = last[j]
            for i, perm in enumerate(combo):
                s = s + prods[i][perm[j]]
            counter[s] += 1
            if s:
                all_zero = False
        if all_zero:
            hits += 1
    row_count = total * m
    space = field.q ** (N + d)
    uniform = 1.0 / space
    tv = 0.0
    for value in vn_elements(field, N + d):
        tv += abs(counter.get(value, 0) / row_count - uniform)
    tv *= 0.5
    return HeuristicReport(
        family=family,
        exact=exhaustive,
        trials=total,
        hits=hits,
        empirical_rate=hits / total,
        model_rate=model_rate(field.q, d, n, N),
        tv_distance=tv,
        sum_counts=dict(counter),
    )


@dataclass(frozen=True)
class ScanRow:
    N: int
    growth_constant: float
    log_group_size: float
    log_p: float


def limit_scan(q: int, d: int, n: int, growth: Sequence[float],
               start: int = 1) -> list[ScanRow]:
    """Model p_N along a growth schedule |G_N| = c_N * q^((N+d)*q^N/(n-1)).

    growth[i] is c_N for N = start + i. At this critical scale the exponent
    in p_N collapses to -c_N^(n-1) * (1 + o(1)), so increasing c_N drives
    log p_N down; the scan makes that visible row by row.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    rows = []
    for i, c in enumerate(growth):
        c = float(c)
        if c <= 0:
            raise ValueError("growth constants must be positive")
        N = start + i
        log_group = math.log(c) + (N + d) * (q ** N) * math.log(q) / (n - 1)
        log_p = p_n_closed_form(q, d, n, N, log_group_size=log_group)
        rows.append(ScanRow(N=N, growth_constant=c, log_group_size=log_group, log_p=log_p))
    return rows


def strictly_decreasing(rows: Sequence[ScanRow]) -> bool:
    return all(b.log_p < a.log_p for a, b in zip(rows, rows[1:]))
