"""Subset-sum statistics for abelian groups.

For an abelian group G and k copies, the averaged state is diagonal in the
character basis up to the bit registers: for each frequency tuple x in G^k
and target w in G, the number of bit vectors b in {0,1}^k whose selected
subset of x sums to w determines one eigenvalue. This module counts those
solutions exactly and derives ranks, moments and discrimination success
probabilities in rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import CapacityError, ConsistencyError, DomainError
from .groups import Group

TABLE_OP_LIMIT = 100_000_000
_TABLE_FAST_LIMIT = 2_000_000
_CONV_OP_LIMIT = 20_000_000


def _require_abelian(group: Group) -> None:
    if not group.is_abelian:
        raise DomainError("subset-sum analysis requires an abelian group")


# ---------------------------------------------------------------------------
# exact solution-count table


@dataclass
class SubsetSumTable:
    """counts[row(x), w] = number of b in {0,1}^k with sum(b . x) = w.

    Rows enumerate x in G^k in row-major order (x_1 most significant), with
    each coordinate an element index of G.
    """

    group: Group
    copies: int
    counts: np.ndarray

    def row_index(self, x: tuple[int, ...]) -> int:
        if len(x) != self.copies:
            raise DomainError(f"expected {self.copies} coordinates")
        idx = 0
        for xi in x:
            self.group.check_index(xi)
            idx = idx * self.group.order + xi
        return idx

    def count(self, x: tuple[int, ...], w: int) -> int:
        self.group.check_index(w)
        return int(self.counts[self.row_index(x), w])

    def row(self, x: tuple[int, ...]) -> np.ndarray:
        return self.counts[self.row_index(x)].copy()

    def rank(self) -> int:
        """Number of (x, w) pairs with at least one solution."""
        return int(np.count_nonzero(self.counts))


def _add_index_arrays(group: Group, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized group addition on element-index arrays."""
    digits = group._digits_matrix()
    moduli = np.array(group.moduli, dtype=np.int64)
    summed = (digits[a] + digits[b]) % moduli
    return group._indices_of_digit_rows(summed)


def subset_sum_table(group: Group, copies: int) -> SubsetSumTable:
    _require_abelian(group)
    if copies < 1:
        raise DomainError("copies must be a positive integer")
    N = group.order
    work = (N ** copies) * (2 ** copies)
    if work > TABLE_OP_LIMIT:
        raise CapacityError(
            f"subset-sum table needs {work} counting steps, beyond {TABLE_OP_LIMIT}"
        )
    M = N ** copies
    coords = np.stack(
        np.unravel_index(np.arange(M), (N,) * copies), axis=1
    ).astype(np.int64)
    counts = np.zeros((M, N), dtype=np.int32)
    rows = np.arange(M)
    for bits in product((0, 1), repeat=copies):
        sums = np.zeros(M, dtype=np.int64)
        for i, bit in enumerate(bits):
            if bit:
                sums = _add_index_arrays(group, sums, coords[:, i])
        np.add.at(counts, (rows, sums), 1)
    table = SubsetSumTable(group, copies, counts)
    if not np.all(counts.sum(axis=1) == 2 ** copies):
        raise ConsistencyError("subset-sum rows must each hold 2^k solutions")
    return table


def subset_sum_rank(group: Group, copies: int) -> int:
    """Rank of the averaged k-copy state, counted combinatorially."""
    return subset_sum_table(group, copies).rank()


# ---------------------------------------------------------------------------
# moments of the solution counts


@dataclass
class MomentReport:
    """First and second moments of the solution count under uniform (x, w).

    Formula values and enumerated values are kept side by side, all exact.
    method records how the enumerated side was obtained: "table" walks the
    full count table, "convolution" runs an exact integer recursion over
    copies on the joint law of two subset sums (full enumeration
    reorganized coordinate by coordinate).
    """

    group: Group
    copies: int
    mean_formula: Fraction
    second_formula: Fraction
    mean_counted: Fraction
    second_counted: Fraction
    method: str

    @property
    def variance(self) -> Fraction:
        return self.second_formula - self.mean_formula ** 2

    def agree(self) -> bool:
        return (
            self.mean_formula == self.mean_counted
            and self.second_formula == self.second_counted
        )


def moments(group: Group, copies: int, method: str = "auto") -> MomentReport:
    _require_abelian(group)
    if copies < 1:
        raise DomainError("copies must be a positive integer")
    N = group.order
    k = copies
    mean_formula = Fraction(2 ** k, N)
    second_formula = mean_formula + Fraction(2 ** k * (2 ** k - 1), N * N)

    if method == "auto":
        method = "table" if (N ** k) * (2 ** k) <= _TABLE_FAST_LIMIT else "convolution"
    if method == "table":
        table = subset_sum_table(group, k)
        s1 = int(table.counts.astype(np.int64).sum())
        s2 = int((table.counts.astype(np.int64) ** 2).sum())
    elif method == "convolution":
        s1, s2 = _convolution_totals(group, k)
    else:
        raise DomainError(f"unknown moments method {method!r}")

    denom = N ** (k + 1)
    return MomentReport(
        group=group,
        copies=k,
        mean_formula=mean_formula,
        second_formula=second_formula,
        mean_counted=Fraction(s1, denom),
        second_counted=Fraction(s2, denom),
        method=method,
    )


def _convolution_totals(group: Group, copies: int) -> tuple[int, int]:
    """Exact totals sum_(x,w) count and sum_(x,w) count^2 by recursion.

    Tracks, coordinate by coordinate, how many (x-prefix, b-prefix,
    c-prefix) triples reach each pair of partial sums (u, v); when the
    final diagonal is summed this equals the full enumeration of the
    squared counts. Integer arithmetic throughout, so the result is exact.
    """
    N = group.order
    if copies * 4 * N ** 3 > _CONV_OP_LIMIT:
        raise CapacityError("moment recursion too large for this group order")
    add = [[group.compose(a, b) for b in range(N)] for a in range(N)]

    single = [1] + [0] * (N - 1)
    for _ in range(copies):
        nxt = [0] * N
        for u, cnt in enumerate(single):
            if cnt:
                for x in range(N):
                    nxt[u] += cnt  # b = 0
                    nxt[add[u][x]] += cnt  # b = 1
        single = nxt
    s1 = sum(single)

    joint = [[0] * N for _ in range(N)]
    joint[0][0] = 1
    for _ in range(copies):
        nxt = [[0] * N for _ in range(N)]
        for u in range(N):
            row = joint[u]
            for v in range(N):
                cnt = row[v]
                if cnt:
                    for x in range(N):
                        ux = add[u][x]
                        vx = add[v][x]
                        nxt[u][v] += cnt  # b = 0, c = 0
                        nxt[ux][v] += cnt  # b = 1, c = 0
                        nxt[u][vx] += cnt  # b = 0, c = 1
                        nxt[ux][vx] += cnt  # b = 1, c = 1
        joint = nxt
    s2 = sum(joint[u][u] for u in range(N))
    return s1, s2


# ---------------------------------------------------------------------------
# discrimination success


@dataclass
class SuccessReport:
    """Optimal discrimination success between the averaged and mixed states."""

    group: Group
    copies: int
    rank: int
    probability: Fraction
    bound: Fraction


def success_from_rank(rank: int, order: int, copies: int) -> Fraction:
    """Success probability 1 - rank / (2 * (2|G|)^k) of the optimal test."""
    return 1 - Fraction(rank, 2 * (2 * order) ** copies)


def success_probability(group: Group, copies: int) -> SuccessReport:
    """Exact success probability for an abelian group, via subset-sum rank.

    In the abelian case the averaged state has eigenvalues that are integer
    multiples of the flat level, so projecting onto its support is an
    optimal measurement and the success probability depends only on the
    rank. The reported bound is (1 + |G|/2^k)/2.
    """
    _require_abelian(group)
    rank = subset_sum_rank(group, copies)
    prob = success_from_rank(rank, group.order, copies)
    if not Fraction(1, 2) <= prob <= 1:
        raise ConsistencyError("success probability escaped [1/2, 1]")
    bound = Fraction(1, 2) * (1 + Fraction(group.order, 2 ** copies))
    return SuccessReport(group, copies, rank, prob, bound)
