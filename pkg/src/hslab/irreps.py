"""Unitary irreducible representations of the supported groups.

Symmetric groups get Young's orthogonal form: the basis of an irrep for
partition shape lambda is the set of standard Young tableaux, sorted by
their row words, and the adjacent transposition (a, a+1) acts through the
signed axial distance between the cells holding a and a+1. All matrices
are real orthogonal, so rho(g^-1) = rho(g)^T.

Abelian groups get their characters chi_w(g) = exp(2*pi*i * sum w_i g_i / N_i)
as 1x1 matrices, labelled by the frequency tuple w.

Canonical irrep order: descending lexicographic partitions for S_n (the
trivial representation first), ascending lexicographic frequency tuples
for abelian groups (again trivial first).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import CapacityError, ConsistencyError, DomainError
from .groups import Group, adjacent_transposition_word, partitions

_EAGER_STACK_ORDER = 1024
_STACK_ELEMENT_LIMIT = 8_000_000
_FOURIER_ORDER_LIMIT = 2048
_EXHAUSTIVE_CHECK_ORDER = 120

_MEMO: dict[str, tuple["Irrep", ...]] = {}


# ---------------------------------------------------------------------------
# standard Young tableaux


def standard_tableaux(shape: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
    """All standard Young tableaux of the given partition shape.

    Entries are 1..n filled so that rows and columns increase. The list is
    sorted by row word (the sequence of row indices of 1, 2, ..., n), which
    fixes the basis order of the irrep.
    """
    n = sum(shape)

    def rec(sub: tuple[int, ...], value: int):
        if value == 0:
            return [tuple(() for _ in sub)]
        out = []
        for r in range(len(sub)):
            if sub[r] > 0 and (r + 1 == len(sub) or sub[r] > sub[r + 1]):
                reduced = sub[:r] + (sub[r] - 1,) + sub[r + 1 :]
                for t in rec(reduced, value - 1):
                    rows = [list(row) for row in t]
                    rows[r].append(value)
                    out.append(tuple(tuple(row) for row in rows))
        return out

    tabs = rec(tuple(shape), n)
    return sorted(tabs, key=lambda t: _row_word(t, n))


def _row_word(tab: tuple[tuple[int, ...], ...], n: int) -> tuple[int, ...]:
    row_of = {}
    for r, row in enumerate(tab):
        for v in row:
            row_of[v] = r
    return tuple(row_of[v] for v in range(1, n + 1))


def _positions(tab: tuple[tuple[int, ...], ...]) -> dict[int, tuple[int, int]]:
    return {v: (r, c) for r, row in enumerate(tab) for c, v in enumerate(row)}


def young_generator_matrices(shape: tuple[int, ...]) -> list[np.ndarray]:
    """Orthogonal matrices for the adjacent transpositions (a, a+1), a=1..n-1.

    The diagonal entry for a tableau T is 1/ax where ax is the axial
    distance from a to a+1 in T (column minus row difference). When a and
    a+1 lie in different rows and columns, swapping them gives another
    standard tableau coupled with weight sqrt(1 - 1/ax^2).
    """
    n = sum(shape)
    tabs = standard_tableaux(shape)
    index = {t: i for i, t in enumerate(tabs)}
    pos = [_positions(t) for t in tabs]
    d = len(tabs)
    gens = []
    for a in range(1, n):
        M = np.zeros((d, d))
        for ti in range(d):
            r1, c1 = pos[ti][a]
            r2, c2 = pos[ti][a + 1]
            ax = (c2 - r2) - (c1 - r1)
            M[ti, ti] = 1.0 / ax
            if abs(ax) >= 2:
                swapped = _swap_values(tabs[ti], a)
                M[index[swapped], ti] = np.sqrt(1.0 - 1.0 / (ax * ax))
        gens.append(M)
    return gens


def _swap_values(tab: tuple[tuple[int, ...], ...], a: int) -> tuple[tuple[int, ...], ...]:
    swap = {a: a + 1, a + 1: a}
    return tuple(tuple(swap.get(v, v) for v in row) for row in tab)


# ---------------------------------------------------------------------------


class Irrep:
    """One unitary irreducible representation of a group.

    matrix(a) returns the d x d matrix for element index a; stack() returns
    all matrices as an (order, d, d) array (cached, capacity-guarded).
    """

    def __init__(self, group: Group, label: tuple, dim: int):
        self.group = group
        self.label = tuple(label)
        self.dim = dim
        self._stack: np.ndarray | None = None
        self._gens: list[np.ndarray] | None = None
        self._gen_indices: list[int] | None = None

    @property
    def name(self) -> str:
        if self.group.kind == "symmetric":
            return "+".join(str(p) for p in self.label)
        return ".".join(str(w) for w in self.label)

    @property
    def is_trivial(self) -> bool:
        if self.group.kind == "symmetric":
            return self.label == (self.group.degree,)
        return all(w == 0 for w in self.label)

    def matrix(self, a: int) -> np.ndarray:
        if self._stack is not None:
            self.group.check_index(a)
            return self._stack[a]
        if self.group.order <= _EAGER_STACK_ORDER:
            return self.stack()[a]
        return self._single_matrix(a)

    def stack(self) -> np.ndarray:
        if self._stack is None:
            if self.group.order * self.dim * self.dim > _STACK_ELEMENT_LIMIT:
                raise CapacityError(
                    f"matrix stack for irrep {self.name} of {self.group.descriptor} "
                    "exceeds the dense capacity guard"
                )
            self._stack = self._build_stack()
            self._stack.setflags(write=False)
        return self._stack

    # -- construction --------------------------------------------------------

    def _generators(self) -> tuple[list[np.ndarray], list[int]]:
        if self._gens is None:
            self._gens = young_generator_matrices(self.label)
            n = self.group.degree
            idx = []
            for p in range(n - 1):
                images = list(range(n))
                images[p], images[p + 1] = images[p + 1], images[p]
                idx.append(self.group.index_of_perm(tuple(images)))
            self._gen_indices = idx
        return self._gens, self._gen_indices

    def _single_matrix(self, a: int) -> np.ndarray:
        self.group.check_index(a)
        if self.group.kind == "abelian":
            digits = self.group.digits(a)
            phase = sum(w * d / m for w, d, m in zip(self.label, digits, self.group.moduli))
            return np.array([[np.exp(2j * np.pi * phase)]])
        gens, _ = self._generators()
        word = adjacent_transposition_word(self.group.perm(a))
        if not word:
            return np.eye(self.dim)
        return reduce(np.matmul, (gens[p] for p in word))

    def _build_stack(self) -> np.ndarray:
        G = self.group
        if G.kind == "abelian":
            digit_rows = np.array([G.digits(a) for a in G.elements()], dtype=np.float64)
            weights = np.array(
                [w / m for w, m in zip(self.label, G.moduli)], dtype=np.float64
            )
            phases = np.exp(2j * np.pi * (digit_rows @ weights))
            return phases.reshape(G.order, 1, 1)
        gens, gen_idx = self._generators()
        stack = np.zeros((G.order, self.dim, self.dim))
        stack[0] = np.eye(self.dim)
        done = np.zeros(G.order, dtype=bool)
        done[0] = True
        queue = [0]
        while queue:
            nxt = []
            for g in queue:
                for M, si in zip(gens, gen_idx):
                    h = G.compose(g, si)
                    if not done[h]:
                        done[h] = True
                        stack[h] = stack[g] @ M
                        nxt.append(h)
            queue = nxt
        if not done.all():
            raise ConsistencyError("generators failed to reach every group element")
        return stack

    def __repr__(self) -> str:
        return f"Irrep({self.group.descriptor}, {self.name}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Irrep)
            and other.group == self.group
            and other.label == self.label
        )

    def __hash__(self) -> int:
        return hash((self.group.descriptor, self.label))


def irreps(group: Group, cache_dir: str | os.PathLike | None = None) -> tuple[Irrep, ...]:
    """The complete list of irreps of `group` in canonical order.

    Results are memoized per descriptor. If cache_dir is given, symmetric
    group matrix stacks are loaded from / saved to a binary cache file there
    (corrupt or mismatched files are silently rebuilt).
    """
    memo = _MEMO.get(group.descriptor)
    if memo is not None:
        return memo

    if group.kind == "abelian":
        labels = [()]
        for m in group.moduli:
            labels = [lab + (w,) for lab in labels for w in range(m)]
        reps = tuple(Irrep(group, lab, 1) for lab in labels)
    else:
        reps = tuple(
            Irrep(group, shape, len(standard_tableaux(shape)))
            for shape in partitions(group.degree)
        )
        if cache_dir is not None and group.order <= _EAGER_STACK_ORDER:
            from . import irrep_cache

            path = irrep_cache.cache_path(cache_dir, group)
            records = irrep_cache.read_cache(path, group)
            if records is not None and [(r.name, r.dim) for r in reps] == [
                (name, stack.shape[1]) for name, stack in records
            ]:
                for rep, (_, stack) in zip(reps, records):
                    rep._stack = stack
                    rep._stack.setflags(write=False)
            else:
                for rep in reps:
                    rep.stack()
                irrep_cache.write_cache(path, group, [(r.name, r.stack()) for r in reps])

    total = sum(r.dim * r.dim for r in reps)
    if total != group.order:
        raise ConsistencyError(
            f"irrep dimensions of {group.descriptor} violate sum d^2 = |G|"
        )
    _MEMO[group.descriptor] = reps
    return reps


def trivial_irrep(group: Group) -> Irrep:
    return irreps(group)[0]


def plancherel(group: Group) -> dict[tuple, Fraction]:
    """Exact distribution assigning each irrep label probability d^2/|G|."""
    dist = {r.label: Fraction(r.dim * r.dim, group.order) for r in irreps(group)}
    if sum(dist.values()) != 1:
        raise ConsistencyError("Plancherel weights do not sum to one")
    return dist


# ---------------------------------------------------------------------------
# regular representation and the group Fourier transform


def regular_rep(group: Group, s: int) -> np.ndarray:
    """Permutation matrix of right translation, R(s)|g> = |g s^-1>."""
    group.check_index(s)
    rows = group.translate(group.inverse(s))
    M = np.zeros((group.order, group.order))
    M[rows, np.arange(group.order)] = 1.0
    return M


@dataclass
class FourierTransform:
    """Unitary change of basis that block-diagonalizes right translation.

    Row (rho, i, j) has entries sqrt(d_rho/|G|) * conj(rho(g)[i, j]) over
    the column index g; rows are grouped by irrep in canonical order with i
    major. Conjugating R(s) by the matrix gives, per irrep, d_rho copies of
    rho(s): F R(s) F^dagger = direct_sum_rho I_{d_rho} (x) rho(s).
    """

    group: Group
    matrix: np.ndarray
    rows: tuple[tuple[tuple, int, int], ...]
    offsets: dict[tuple, int]

    def block_slice(self, label: tuple) -> slice:
        off = self.offsets[label]
        d = next(r.dim for r in irreps(self.group) if r.label == label)
        return slice(off, off + d * d)


def fourier(group: Group, validate: bool = True) -> FourierTransform:
    """Build the group Fourier matrix and verify its defining properties.

    Unitarity is always checked. The translation intertwining identity is
    checked for every group element when |G| <= 120, otherwise on a fixed
    sample including the generators.
    """
    if group.order > _FOURIER_ORDER_LIMIT:
        raise CapacityError(
            f"Fourier matrix for |G|={group.order} exceeds the supported size"
        )
    reps = irreps(group)
    N = group.order
    blocks = []
    rows: list[tuple[tuple, int, int]] = []
    offsets: dict[tuple, int] = {}
    off = 0
    for rep in reps:
        d = rep.dim
        stack = rep.stack()
        blk = np.sqrt(d / N) * np.conj(stack.reshape(N, d * d).T)
        blocks.append(blk)
        offsets[rep.label] = off
        rows.extend((rep.label, i, j) for i in range(d) for j in range(d))
        off += d * d
    F = np.vstack(blocks).astype(np.complex128)
    ft = FourierTransform(group, F, tuple(rows), offsets)
    if validate:
        _validate_fourier(ft, reps)
    return ft


def _validate_fourier(ft: FourierTransform, reps: tuple[Irrep, ...]) -> None:
    F = ft.matrix
    N = ft.group.order
    unit = np.max(np.abs(F @ F.conj().T - np.eye(N)))
    if unit > 1e-12:
        raise ConsistencyError(f"Fourier matrix is not unitary (residual {unit:.3e})")
    if N <= _EXHAUSTIVE_CHECK_ORDER:
        sample = list(range(N))
    else:
        sample = sorted(set([0, 1, N // 3, N // 2, N - 1]))
    for s in sample:
        lhs = F @ regular_rep(ft.group, s)
        blocks = [np.kron(np.eye(r.dim), r.matrix(s)) for r in reps]
        rhs = _block_diag(blocks) @ F
        resid = np.max(np.abs(lhs - rhs))
        if resid > 1e-9:
            raise ConsistencyError(
                f"Fourier intertwining failed at element {s} (residual {resid:.3e})"
            )


def _block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    total = sum(b.shape[0] for b in blocks)
    out = np.zeros((total, total), dtype=np.complex128)
    off = 0
    for b in blocks:
        n = b.shape[0]
        out[off : off + n, off : off + n] = b
        off += n
    return out


# ---------------------------------------------------------------------------
# group averages


def average_rep(stack: np.ndarray) -> np.ndarray:
    """Group average (1/|G|) sum_g pi(g) of a matrix representation stack.

    For a homomorphism stack this is the orthogonal projector onto the
    invariant subspace; its rank is the multiplicity of the trivial irrep.
    """
    return np.asarray(stack).mean(axis=0)


def average_rep_antirep(rep1: Irrep, rep2: Irrep) -> np.ndarray:
    """Group average of rho(g) (x) sigma(g^-1) for two irreps of one group."""
    if rep1.group != rep2.group:
        raise DomainError("irreps must belong to the same group")
    inv = rep1.group.inverse_vector()
    s1 = rep1.stack()
    s2 = rep2.stack()[inv]
    return kron_stack(s1, s2).mean(axis=0)


def kron_stack(s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """Elementwise Kronecker product of two stacks of matrices."""
    n, d1, e1 = s1.shape
    _, d2, e2 = s2.shape
    out = np.einsum("gij,gkl->gikjl", s1, s2)
    return out.reshape(n, d1 * d2, e1 * e2)


def trivial_multiplicity(stack: np.ndarray, tol: float = 1e-8) -> int:
    """Multiplicity of the trivial irrep in a unitary representation stack."""
    avg = average_rep(stack)
    if np.max(np.abs(avg @ avg - avg)) > tol:
        raise ConsistencyError("group average is not idempotent; stack is not a homomorphism")
    mult = float(np.trace(avg).real)
    if abs(mult - round(mult)) > tol:
        raise ConsistencyError("projector trace is not close to an integer")
    return int(round(mult))
