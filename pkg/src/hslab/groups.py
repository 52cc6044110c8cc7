"""Finite groups with dense 0-based element indexing.

Two families are supported: symmetric groups S_n (elements are one-line
permutations addressed by Lehmer-code rank) and finite abelian groups
Z_N1 x ... x Z_Nm (elements are digit tuples addressed in mixed radix,
leftmost digit most significant). Index 0 is the identity in both families.

Composition convention everywhere: (g * h)(i) = g(h(i)).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import factorial, prod

import numpy as np

from .errors import CapacityError, ConsistencyError, DomainError

MAX_SYMMETRIC_N = 8
MAX_ABELIAN_ORDER = 4096

# compose tables are materialized lazily and only below this order
_TABLE_LIMIT = 2048


# ---------------------------------------------------------------------------
# permutation helpers (0-based one-line notation as tuples)


def check_perm(images: tuple[int, ...]) -> None:
    n = len(images)
    if sorted(images) != list(range(n)):
        raise DomainError(f"not a permutation of 0..{n - 1}: {images!r}")


def compose_perms(g: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, ...]:
    """Composite permutation mapping i to g(h(i))."""
    return tuple(g[h[i]] for i in range(len(g)))


def invert_perm(g: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(g)
    for i, v in enumerate(g):
        inv[v] = i
    return tuple(inv)


def perm_rank(images: tuple[int, ...]) -> int:
    """Lehmer-code rank of a permutation; the identity ranks 0.

    The rank counts permutations of the same size that precede `images`
    in lexicographic one-line order.
    """
    n = len(images)
    r = 0
    for i in range(n):
        smaller_after = sum(1 for j in range(i + 1, n) if images[j] < images[i])
        r += smaller_after * factorial(n - 1 - i)
    return r


def perm_unrank(rank: int, n: int) -> tuple[int, ...]:
    """Inverse of perm_rank for permutations of 0..n-1."""
    if not 0 <= rank < factorial(n):
        raise DomainError(f"rank {rank} out of range for n={n}")
    avail = list(range(n))
    out = []
    for i in range(n):
        q, rank = divmod(rank, factorial(n - 1 - i))
        out.append(avail.pop(q))
    return tuple(out)


def adjacent_transposition_word(images: tuple[int, ...]) -> list[int]:
    """Decompose a permutation into adjacent transpositions.

    Returns positions p (0-based, swapping p and p+1) such that composing
    the transpositions left to right in the returned order yields `images`.
    """
    w = list(images)
    applied: list[int] = []
    # bubble sort w to the identity by right-multiplication with s_p,
    # which swaps the one-line entries at positions p and p+1
    changed = True
    while changed:
        changed = False
        for p in range(len(w) - 1):
            if w[p] > w[p + 1]:
                w[p], w[p + 1] = w[p + 1], w[p]
                applied.append(p)
                changed = True
    # w * s_{a1} * ... * s_{am} = id, hence images = s_{am} * ... * s_{a1}
    return applied[::-1]


# ---------------------------------------------------------------------------


class Group:
    """A finite group whose elements are the indices 0..order-1.

    Construct through symmetric_group / abelian_group / parse_group rather
    than directly.
    """

    def __init__(self, kind: str, degree_or_moduli):
        if kind == "symmetric":
            n = degree_or_moduli
            if n < 1:
                raise DomainError(f"symmetric degree must be positive, got {n}")
            if n > MAX_SYMMETRIC_N:
                raise CapacityError(
                    f"symmetric degree {n} exceeds the supported bound {MAX_SYMMETRIC_N}"
                )
            self.kind = "symmetric"
            self.degree = n
            self.moduli: tuple[int, ...] | None = None
            self.order = factorial(n)
            self.descriptor = f"S{n}"
        elif kind == "abelian":
            moduli = tuple(int(m) for m in degree_or_moduli)
            if not moduli or any(m < 1 for m in moduli):
                raise DomainError(f"abelian moduli must be positive integers, got {moduli}")
            if prod(moduli) > MAX_ABELIAN_ORDER:
                raise CapacityError(
                    f"abelian order {prod(moduli)} exceeds the supported bound {MAX_ABELIAN_ORDER}"
                )
            self.kind = "abelian"
            self.degree = None
            self.moduli = moduli
            self.order = prod(moduli)
            self.descriptor = "x".join(f"Z{m}" for m in moduli)
        else:
            raise DomainError(f"unknown group kind {kind!r}")
        self._perms: list[tuple[int, ...]] | None = None
        self._perm_index: dict[tuple[int, ...], int] | None = None
        self._digit_matrix: np.ndarray | None = None
        self._table: np.ndarray | None = None
        self._inverse_vec: np.ndarray | None = None

    # -- identity / iteration ------------------------------------------------

    @property
    def identity(self) -> int:
        return 0

    @property
    def is_abelian(self) -> bool:
        return self.kind == "abelian"

    def elements(self) -> range:
        return range(self.order)

    def check_index(self, a: int) -> None:
        if not 0 <= a < self.order:
            raise DomainError(f"element index {a} out of range for {self.descriptor}")

    # -- element views -------------------------------------------------------

    def perm(self, a: int) -> tuple[int, ...]:
        """One-line permutation for an S_n element index (0-based images)."""
        if self.kind != "symmetric":
            raise DomainError("perm() only applies to symmetric groups")
        self.check_index(a)
        return self._perm_list()[a]

    def index_of_perm(self, images: tuple[int, ...]) -> int:
        if self.kind != "symmetric":
            raise DomainError("index_of_perm() only applies to symmetric groups")
        if len(images) != self.degree:
            raise DomainError(f"expected a permutation of {self.degree} points")
        check_perm(images)
        return self._perm_dict()[tuple(images)]

    def digits(self, a: int) -> tuple[int, ...]:
        """Digit tuple of an abelian element (mixed radix, leftmost major)."""
        if self.kind != "abelian":
            raise DomainError("digits() only applies to abelian groups")
        self.check_index(a)
        out = []
        for m in reversed(self.moduli):
            a, d = divmod(a, m)
            out.append(d)
        return tuple(reversed(out))

    def index_of_digits(self, digits: tuple[int, ...]) -> int:
        if self.kind != "abelian":
            raise DomainError("index_of_digits() only applies to abelian groups")
        if len(digits) != len(self.moduli):
            raise DomainError(f"expected {len(self.moduli)} digits")
        a = 0
        for d, m in zip(digits, self.moduli):
            if not 0 <= d < m:
                raise DomainError(f"digit {d} out of range mod {m}")
            a = a * m + d
        return a

    def element_name(self, a: int) -> str:
        if self.kind == "symmetric":
            return "(" + ",".join(str(v + 1) for v in self.perm(a)) + ")"
        return "(" + ",".join(str(d) for d in self.digits(a)) + ")"

    # -- arithmetic ----------------------------------------------------------

    def compose(self, a: int, b: int) -> int:
        """Index of the product a*b under (a*b)(i) = a(b(i))."""
        if self._table is not None:
            self.check_index(a)
            self.check_index(b)
            return int(self._table[a, b])
        if self.kind == "symmetric":
            return self._perm_dict()[compose_perms(self.perm(a), self.perm(b))]
        da, db = self.digits(a), self.digits(b)
        return self.index_of_digits(
            tuple((x + y) % m for x, y, m in zip(da, db, self.moduli))
        )

    def inverse(self, a: int) -> int:
        if self.kind == "symmetric":
            return self._perm_dict()[invert_perm(self.perm(a))]
        return self.index_of_digits(
            tuple((-d) % m for d, m in zip(self.digits(a), self.moduli))
        )

    def translate(self, s: int) -> np.ndarray:
        """Vector t with t[g] = index of g*s, for all g at once."""
        self.check_index(s)
        if self._table is not None:
            return self._table[:, s].copy()
        if self.kind == "symmetric":
            ps = self.perm(s)
            idx = self._perm_dict()
            return np.array(
                [idx[compose_perms(p, ps)] for p in self._perm_list()], dtype=np.int64
            )
        dm = self._digits_matrix()
        moduli = np.array(self.moduli, dtype=np.int64)
        summed = (dm + np.array(self.digits(s), dtype=np.int64)) % moduli
        return self._indices_of_digit_rows(summed)

    def inverse_vector(self) -> np.ndarray:
        """Vector v with v[g] = index of g^-1."""
        if self._inverse_vec is None:
            self._inverse_vec = np.array(
                [self.inverse(a) for a in self.elements()], dtype=np.int64
            )
        return self._inverse_vec

    def compose_table(self) -> np.ndarray:
        """Dense multiplication table; guarded to order <= 2048."""
        if self._table is None:
            if self.order > _TABLE_LIMIT:
                raise CapacityError(
                    f"compose table for |G|={self.order} exceeds the {_TABLE_LIMIT} limit"
                )
            if self.kind == "symmetric":
                idx = self._perm_dict()
                perms = self._perm_list()
                table = np.empty((self.order, self.order), dtype=np.int32)
                for a, pa in enumerate(perms):
                    row = [idx[compose_perms(pa, pb)] for pb in perms]
                    table[a] = row
            else:
                dm = self._digits_matrix()
                moduli = np.array(self.moduli, dtype=np.int64)
                summed = (dm[:, None, :] + dm[None, :, :]) % moduli
                flat = self._indices_of_digit_rows(summed.reshape(-1, len(self.moduli)))
                table = flat.reshape(self.order, self.order).astype(np.int32)
            self._table = table
        return self._table

    # -- internals -----------------------------------------------------------

    def _perm_list(self) -> list[tuple[int, ...]]:
        if self._perms is None:
            self._perms = [perm_unrank(r, self.degree) for r in range(self.order)]
        return self._perms

    def _perm_dict(self) -> dict[tuple[int, ...], int]:
        if self._perm_index is None:
            self._perm_index = {p: i for i, p in enumerate(self._perm_list())}
        return self._perm_index

    def _digits_matrix(self) -> np.ndarray:
        if self._digit_matrix is None:
            self._digit_matrix = np.array(
                [self.digits(a) for a in self.elements()], dtype=np.int64
            )
        return self._digit_matrix

    def _indices_of_digit_rows(self, rows: np.ndarray) -> np.ndarray:
        place = np.ones(len(self.moduli), dtype=np.int64)
        for i in range(len(self.moduli) - 2, -1, -1):
            place[i] = place[i + 1] * self.moduli[i + 1]
        return rows @ place

    # -- comparison ----------------------------------------------------------

    def __repr__(self) -> str:
        return f"Group({self.descriptor})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Group) and other.descriptor == self.descriptor

    def __hash__(self) -> int:
        return hash(self.descriptor)


def symmetric_group(n: int) -> Group:
    return Group("symmetric", n)


def abelian_group(*moduli: int) -> Group:
    if len(moduli) == 1 and isinstance(moduli[0], (tuple, list)):
        moduli = tuple(moduli[0])
    return Group("abelian", moduli)


_GROUP_RE = re.compile(r"^(s(\d+)|z\d+(?:xz\d+)*)$")


def parse_group(text: str) -> Group:
    """Parse descriptors like "S5", "Z4" or "Z2xZ2xZ3" (case-insensitive)."""
    cleaned = text.strip().lower().replace(" ", "")
    m = _GROUP_RE.match(cleaned)
    if m is None:
        raise DomainError(
            f"cannot parse group descriptor {text!r}; expected forms: S5, Z4, Z2xZ2xZ3"
        )
    if cleaned.startswith("s"):
        return symmetric_group(int(m.group(2)))
    moduli = tuple(int(part[1:]) for part in cleaned.split("x"))
    return abelian_group(moduli)


# ---------------------------------------------------------------------------
# subgroup embeddings


@dataclass
class SubgroupEmbedding:
    """Injective homomorphism of `subgroup` into `parent` plus coset data.

    injection[h] is the parent index of the image of subgroup element h.
    transversal lists left-coset representatives; every parent element
    factors uniquely as transversal[t] * injection[h].
    """

    parent: Group
    subgroup: Group
    injection: tuple[int, ...]
    transversal: tuple[int, ...] = field(default=())
    _factor: dict[int, tuple[int, int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        G, H = self.parent, self.subgroup
        if len(self.injection) != H.order or len(set(self.injection)) != H.order:
            raise DomainError("injection must list one distinct parent index per subgroup element")
        if G.order % H.order != 0:
            raise ConsistencyError("subgroup order does not divide parent order")
        for a in H.elements():
            for b in H.elements():
                lhs = self.injection[H.compose(a, b)]
                rhs = G.compose(self.injection[a], self.injection[b])
                if lhs != rhs:
                    raise ConsistencyError(
                        f"injection is not a homomorphism at ({a},{b})"
                    )
        if not self.transversal:
            self.transversal = self._greedy_transversal()
        if len(self.transversal) != G.order // H.order:
            raise DomainError("transversal size must be the subgroup index")
        self._factor = {}
        for t_pos, t in enumerate(self.transversal):
            for h in H.elements():
                g = G.compose(t, self.injection[h])
                if g in self._factor:
                    raise ConsistencyError("transversal does not give unique factorization")
                self._factor[g] = (t_pos, h)
        if len(self._factor) != G.order:
            raise ConsistencyError("cosets do not cover the parent group")

    def _greedy_transversal(self) -> tuple[int, ...]:
        G, H = self.parent, self.subgroup
        seen = [False] * G.order
        reps = []
        for g in G.elements():
            if not seen[g]:
                reps.append(g)
                for h in H.elements():
                    seen[G.compose(g, self.injection[h])] = True
        return tuple(reps)

    def factor(self, g: int) -> tuple[int, int]:
        """(transversal position, subgroup index) with g = t * iota(h)."""
        self.parent.check_index(g)
        return self._factor[g]


def abelian_subgroup_of_symmetric(n: int, cycle_type: tuple[int, ...]) -> SubgroupEmbedding:
    """Embed a product of cyclic groups into S_n via disjoint cycles.

    cycle_type must be a partition of n (parts >= 1, any order accepted).
    Part i becomes a cycle on a block of consecutive points, so the image
    is the abelian group Z_part1 x Z_part2 x ... of order prod(parts).
    """
    parts = tuple(int(p) for p in cycle_type)
    if any(p < 1 for p in parts) or sum(parts) != n:
        raise DomainError(f"cycle type {cycle_type!r} is not a partition of {n}")
    G = symmetric_group(n)
    H = abelian_group(parts)
    offsets = []
    off = 0
    for p in parts:
        offsets.append(off)
        off += p
    injection = []
    for h in H.elements():
        digits = H.digits(h)
        images = list(range(n))
        for off, p, d in zip(offsets, parts, digits):
            for j in range(p):
                images[off + j] = off + (j + d) % p
        injection.append(G.index_of_perm(tuple(images)))
    return SubgroupEmbedding(G, H, tuple(injection))


def abelian_subgroup_of_abelian(parent: Group, orders: tuple[int, ...]) -> SubgroupEmbedding:
    """Embed prod Z_orders[i] into an abelian parent, componentwise.

    orders[i] must divide the parent modulus N_i; digit d maps to
    d * (N_i // orders[i]) in component i.
    """
    if not parent.is_abelian:
        raise DomainError("parent must be abelian")
    orders = tuple(int(m) for m in orders)
    if len(orders) != len(parent.moduli):
        raise DomainError("one order per parent component is required")
    for m, n in zip(orders, parent.moduli):
        if m < 1 or n % m != 0:
            raise DomainError(f"subgroup order {m} does not divide modulus {n}")
    H = abelian_group(orders)
    injection = []
    for h in H.elements():
        digits = H.digits(h)
        image = tuple(d * (n // m) for d, m, n in zip(digits, orders, parent.moduli))
        injection.append(parent.index_of_digits(image))
    return SubgroupEmbedding(parent, H, tuple(injection))


# ---------------------------------------------------------------------------
# partitions and the largest abelian subgroup order


def partitions(n: int) -> list[tuple[int, ...]]:
    """All partitions of n in descending lexicographic order."""
    if n < 0:
        raise DomainError("partitions of a negative integer requested")
    if n == 0:
        return [()]
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, cap: int, prefix: tuple[int, ...]):
        if remaining == 0:
            out.append(prefix)
            return
        for first in range(min(cap, remaining), 0, -1):
            rec(remaining - first, first, prefix + (first,))

    rec(n, n, ())
    return out


def largest_abelian_order(n: int) -> int:
    """Largest order of an abelian subgroup of S_n.

    Equals the maximum over partitions of n of the product of the parts,
    attained by a product of disjoint cycles.
    """
    if n < 1:
        raise DomainError("n must be positive")
    return max(prod(p) for p in partitions(n))
