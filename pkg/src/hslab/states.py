"""Hidden-shift states over a finite group, dense and block-diagonal.

The two-function superposition procedure produces, per run, either the
shifted state (uniform mixture over g of pair superpositions of |0,g> and
|1,g*s>) or the maximally mixed state on the same 2|G|-dimensional space.
This module builds both, for k independent runs, in two representations:

* dense: the full (2|G|)^k matrix, basis ordered (bit_1, g_1, ..., bit_k, g_k);
* block: after the per-copy change of basis (I_2 (x) Fourier) and a
  reshuffle that groups the k bit indices together, the state is
  block-diagonal over k-tuples of irrep labels. The tuple (rho_1..rho_k)
  contributes d_rho1*...*d_rhok identical copies of a block B of dimension
  2^k * prod d_rhoj, scaled by (2|G|)^-k.

The reshuffle sends the dense-side index (x_1, (rho_1,i_1,j_1), ...,
x_k, (rho_k,i_k,j_k)) to (rho-tuple; i-tuple; x-tuple; j-tuple), with the
x-tuple major over the j-tuple inside each block.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

from .errors import CapacityError, ConsistencyError, DomainError
from .groups import Group, SubgroupEmbedding
from .irreps import Irrep, fourier, irreps, kron_stack, regular_rep

DENSE_DIM_LIMIT = 10_000
BLOCK_DIM_LIMIT = 4096
BLOCK_WORK_LIMIT = 2 ** 28
AVERAGE_STACK_LIMIT = 2 ** 26
RANK_RTOL = 1e-8


def _pmap(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------------------
# types


@dataclass
class Block:
    """One diagonal block of a k-copy state, tagged by its irrep labels."""

    labels: tuple[tuple, ...]
    matrix: np.ndarray
    multiplicity: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def name(self, group: Group) -> str:
        return "|".join(_label_name(group, lab) for lab in self.labels)


def _label_name(group: Group, label: tuple) -> str:
    if group.kind == "symmetric":
        return "+".join(str(p) for p in label)
    return ".".join(str(w) for w in label)


@dataclass
class ShiftState:
    """A k-copy state in dense or block form.

    variant is one of "fixed" (known shift), "averaged" (uniform mixture
    over shifts), "no-shift" (maximally mixed), or "from-oracles" (built
    from an oracle pair without knowing which case holds).
    """

    group: Group
    copies: int
    variant: str
    form: str
    shift: int | None = None
    dense: np.ndarray | None = None
    blocks: dict[tuple, Block] | None = None

    @property
    def dimension(self) -> int:
        return (2 * self.group.order) ** self.copies

    def scale(self) -> float:
        """Factor mapping block eigenvalues to state eigenvalues."""
        return 1.0 / self.dimension

    def validate(self) -> None:
        """Check hermiticity, positivity and unit trace; raise on failure."""
        if self.form == "dense":
            M = self.dense
            if np.max(np.abs(M - M.conj().T)) > 1e-12:
                raise ConsistencyError("dense state is not Hermitian")
            if abs(np.trace(M).real - 1.0) > 1e-10:
                raise ConsistencyError("dense state trace differs from one")
            if np.linalg.eigvalsh(M).min() < -1e-10:
                raise ConsistencyError("dense state has a negative eigenvalue")
            return
        total = 0.0
        for blk in self.blocks.values():
            B = blk.matrix
            if np.max(np.abs(B - B.conj().T)) > 1e-12:
                raise ConsistencyError(f"block {blk.labels} is not Hermitian")
            if np.linalg.eigvalsh(B).min() < -1e-10:
                raise ConsistencyError(f"block {blk.labels} has a negative eigenvalue")
            total += blk.multiplicity * np.trace(B).real
        if abs(total * self.scale() - 1.0) > 1e-10:
            raise ConsistencyError("block traces do not sum to one")


# ---------------------------------------------------------------------------
# dense constructions


def shift_pair_vector(group: Group, s: int, g: int) -> np.ndarray:
    """Unit vector (|0,g> + |1,g*s>)/sqrt(2) in the 2|G| dense basis."""
    group.check_index(s)
    group.check_index(g)
    N = group.order
    v = np.zeros(2 * N)
    v[g] = 1.0 / np.sqrt(2.0)
    v[N + group.compose(g, s)] = 1.0 / np.sqrt(2.0)
    return v

def _guard_dense(group: Group, copies: int) -> None:
    if copies < 1:
        raise DomainError("copies must be a positive integer")
    if (2 * group.order) ** copies > DENSE_DIM_LIMIT:
        raise CapacityError(
            f"dense dimension (2*{group.order})^{copies} exceeds {DENSE_DIM_LIMIT}"
        )


def _single_copy_dense(group: Group, s: int) -> np.ndarray:
    N = group.order
    R = regular_rep(group, s)
    Rinv = regular_rep(group, group.inverse(s))
    top = np.hstack([np.eye(N), R])
    bot = np.hstack([Rinv, np.eye(N)])
    return np.vstack([top, bot]) / (2.0 * N)


def shift_state_dense(group: Group, s: int, copies: int = 1) -> ShiftState:
    """Dense k-copy state for a known shift s."""
    _guard_dense(group, copies)
    group.check_index(s)
    single = _single_copy_dense(group, s)
    dense = reduce(np.kron, [single] * copies)
    return ShiftState(group, copies, "fixed", "dense", shift=s, dense=dense)


def averaged_shift_state_dense(group: Group, copies: int = 1) -> ShiftState:
    """Dense k-copy state averaged over a uniformly random shift."""
    _guard_dense(group, copies)
    dim = (2 * group.order) ** copies
    acc = np.zeros((dim, dim))
    for s in group.elements():
        single = _single_copy_dense(group, s)
        acc += reduce(np.kron, [single] * copies)
    return ShiftState(group, copies, "averaged", "dense", dense=acc / group.order)


def maximally_mixed_state(group: Group, copies: int = 1, form: str = "dense") -> ShiftState:
    """The no-shift k-copy state, identity over (2|G|)^k."""
    if form == "dense":
        _guard_dense(group, copies)
        dim = (2 * group.order) ** copies
        return ShiftState(
            group, copies, "no-shift", "dense", dense=np.eye(dim) / dim
        )
    if copies < 1:
        raise DomainError("copies must be a positive integer")
    blocks: dict[tuple, Block] = {}
    for reps in product(irreps(group), repeat=copies):
        labels = tuple(r.label for r in reps)
        D = 1
        mult = 1
        for r in reps:
            D *= r.dim
            mult *= r.dim
        blocks[labels] = Block(labels, np.eye((2 ** copies) * D), mult)
    return ShiftState(group, copies, "no-shift", "block", blocks=blocks)


# ---------------------------------------------------------------------------
# block constructions


def power_block(reps: tuple[Irrep, ...], exponents: tuple[int, ...], shift: int | None = None) -> np.ndarray:
    """Tensor product over copies of rho_j evaluated at shift^exponents[j].

    exponents entries must be -1, 0 or 1. With shift=None the product is
    averaged over the whole group (single joint average, not a product of
    averages). The averaged matrix A_z satisfies A_z^dagger = A_{-z} and,
    because s -> s^-1 is a bijection, also A_z = A_{-z}.
    """
    if len(reps) != len(exponents):
        raise DomainError("one exponent per irrep is required")
    if any(e not in (-1, 0, 1) for e in exponents):
        raise DomainError("exponents must be -1, 0 or 1")
    group = reps[0].group
    if any(r.group != group for r in reps):
        raise DomainError("irreps must all belong to the same group")
    if shift is not None:
        group.check_index(shift)
        mats = []
        for r, e in zip(reps, exponents):
            if e == 0:
                mats.append(np.eye(r.dim))
            elif e == 1:
                mats.append(r.matrix(shift))
            else:
                mats.append(r.matrix(group.inverse(shift)))
        return reduce(np.kron, mats)
    out_dim = 1
    for r in reps:
        out_dim *= r.dim
    if group.order * out_dim * out_dim > AVERAGE_STACK_LIMIT:
        raise CapacityError(
            f"averaging a {out_dim}-dimensional product over {group.order} elements "
            "exceeds the memory budget"
        )
    inv = group.inverse_vector()
    cur = None
    for r, e in zip(reps, exponents):
        if e == 0:
            part = np.broadcast_to(np.eye(r.dim), (group.order, r.dim, r.dim))
        elif e == 1:
            part = r.stack()
        else:
            part = r.stack()[inv]
        cur = part if cur is None else kron_stack(cur, part)
    return cur.mean(axis=0)


def state_block(reps: tuple[Irrep, ...], shift: int | None = None) -> Block:
    """Diagonal block for one k-tuple of irreps, assembled from power blocks.

    Rows and columns are indexed by (bit tuple, inner tensor index) with the
    bit tuple major; the (x, y) cell holds the power block with exponents
    y - x componentwise.
    """
    k = len(reps)
    if k < 1:
        raise DomainError("at least one irrep is required")
    D = 1
    mult = 1
    for r in reps:
        D *= r.dim
        mult *= r.dim
    dim = (2 ** k) * D
    if dim > BLOCK_DIM_LIMIT:
        raise CapacityError(f"block dimension {dim} exceeds {BLOCK_DIM_LIMIT}")
    parts: dict[tuple[int, ...], np.ndarray] = {}
    for z in product((-1, 0, 1), repeat=k):
        parts[z] = power_block(reps, z, shift)
    dtype = np.result_type(np.float64, *(p.dtype for p in parts.values()))
    B = np.zeros((dim, dim), dtype=dtype)
    bits = list(product((0, 1), repeat=k))
    for xi, x in enumerate(bits):
        for yi, y in enumerate(bits):
            z = tuple(b - a for a, b in zip(x, y))
            B[xi * D : (xi + 1) * D, yi * D : (yi + 1) * D] = parts[z]
    labels = tuple(r.label for r in reps)
    return Block(labels, B, mult)


def _guard_block_scan(group: Group, copies: int) -> None:
    """Reject whole-state block scans whose total work is clearly infeasible.

    Bounds both the elements held while averaging representation products
    (3^k patterns, each |G| stacked matrices totalling |G|^k entries) and
    the cubic eigensolver cost summed over every block.
    """
    if copies < 1:
        raise DomainError("copies must be a positive integer")
    stack_work = (3 ** copies) * group.order ** (copies + 1)
    cubes = sum(r.dim ** 3 for r in irreps(group))
    eigh_work = (8 ** copies) * cubes ** copies
    if max(stack_work, eigh_work) > BLOCK_WORK_LIMIT:
        raise CapacityError(
            f"scanning all blocks of {group.descriptor} with k={copies} "
            "exceeds the work budget"
        )


def block_shift_state(
    group: Group, copies: int, shift: int | None = None, threads: int = 1
) -> ShiftState:
    """Block form of the k-copy state; averaged over shifts when shift is None."""
    _guard_block_scan(group, copies)
    tuples = list(product(irreps(group), repeat=copies))
    blocks_list = _pmap(lambda reps: state_block(reps, shift), tuples, threads)
    blocks = {blk.labels: blk for blk in blocks_list}
    variant = "averaged" if shift is None else "fixed"
    return ShiftState(group, copies, variant, "block", shift=shift, blocks=blocks)


# ---------------------------------------------------------------------------
# spectra


@dataclass
class SpectrumReport:
    """Eigenvalues of a Hermitian matrix, clustered and rank-summarized."""

    dim: int
    eigenvalues: np.ndarray
    clusters: tuple[tuple[float, int], ...]
    rank: int
    max_eigenvalue: float
    min_nonzero: float | None


def spectrum(M: np.ndarray, cluster_tol: float = 1e-8) -> SpectrumReport:
    """Eigenvalues of a Hermitian matrix in descending order.

    Raises DomainError for non-Hermitian input. The eigendecomposition is
    verified by reconstruction; eigenvalues within cluster_tol of each other
    merge into one multiplicity cluster, and rank counts eigenvalues above
    1e-8 times the largest magnitude.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("spectrum expects a square matrix")
    if np.max(np.abs(M - M.conj().T)) > 1e-10:
        raise DomainError("spectrum expects a Hermitian matrix")
    w, V = np.linalg.eigh(M)
    recon = (V * w) @ V.conj().T
    if np.max(np.abs(M - recon)) > 1e-9:
        raise ConsistencyError("eigendecomposition failed to reconstruct the input")
    w = w[::-1]
    return SpectrumReport(
        dim=M.shape[0],
        eigenvalues=w,
        clusters=tuple(_cluster(w, cluster_tol)),
        rank=_numeric_rank(w),
        max_eigenvalue=float(w[0]),
        min_nonzero=_min_nonzero(w),
    )


def _cluster(desc: np.ndarray, tol: float) -> list[tuple[float, int]]:
    out: list[tuple[float, int]] = []
    start = 0
    for i in range(1, len(desc) + 1):
        if i == len(desc) or desc[i - 1] - desc[i] > tol:
            chunk = desc[start:i]
            out.append((float(chunk.mean()), len(chunk)))
            start = i
    return out


def _numeric_rank(values: np.ndarray) -> int:
    top = np.max(np.abs(values)) if len(values) else 0.0
    if top == 0.0:
        return 0
    return int(np.sum(values > RANK_RTOL * top))


def _min_nonzero(desc: np.ndarray) -> float | None:
    top = np.max(np.abs(desc)) if len(desc) else 0.0
    keep = desc[desc > RANK_RTOL * top] if top > 0 else desc[:0]
    return float(keep[-1]) if len(keep) else None


def state_spectrum(state: ShiftState, cluster_tol: float = 1e-8) -> SpectrumReport:
    """Spectrum of a state on the state scale, from either representation."""
    if state.form == "dense":
        return spectrum(state.dense, cluster_tol)
    scale = state.scale()
    pieces = []
    for blk in state.blocks.values():
        w = np.linalg.eigvalsh(blk.matrix) * scale
        pieces.append(np.tile(w, blk.multiplicity))
    allw = np.sort(np.concatenate(pieces))[::-1]
    return SpectrumReport(
        dim=state.dimension,
        eigenvalues=allw,
        clusters=tuple(_cluster(allw, cluster_tol)),
        rank=_numeric_rank(allw),
        max_eigenvalue=float(allw[0]),
        min_nonzero=_min_nonzero(allw),
    )


def state_rank(group: Group, copies: int, shift: int | None = None, threads: int = 1) -> int:
    """Numeric rank of the k-copy state via its block spectra."""
    _guard_block_scan(group, copies)
    tuples = list(product(irreps(group), repeat=copies))
    spectra = _pmap(
        lambda reps: np.linalg.eigvalsh(state_block(reps, shift).matrix), tuples, threads
    )
    top = max(float(np.max(np.abs(w))) for w in spectra)
    if top == 0.0:
        return 0
    rank = 0
    for reps, w in zip(tuples, spectra):
        mult = 1
        for r in reps:
            mult *= r.dim
        rank += mult * int(np.sum(w > RANK_RTOL * top))
    return rank


def rank_closed_form(group: Group, copies: int) -> int:
    """Exact rank of the averaged state for one or two copies.

    One copy: 2|G| - 1. Two copies: 4|G|^2 - 5|G| + 3 - (number of
    one-dimensional irreps).
    """
    N = group.order
    if copies == 1:
        return 2 * N - 1
    if copies == 2:
        ones = sum(1 for r in irreps(group) if r.dim == 1)
        return 4 * N * N - 5 * N + 3 - ones
    raise DomainError("closed-form rank is available for one or two copies only")


@dataclass
class InteriorEigenvalueReport:
    """Witness for a state eigenvalue strictly inside (0, dimension^-1)."""

    found: bool
    witness: float | None = None
    labels: tuple[tuple, ...] | None = None
    block_eigenvalue: float | None = None


def interior_eigenvalue_check(
    group: Group, copies: int, threads: int = 1, margin: float = 1e-8
) -> InteriorEigenvalueReport:
    """Search the averaged state for an eigenvalue strictly between 0 and
    the inverse dense dimension (equivalently a block eigenvalue in (0, 1)).

    Such an eigenvalue shows the support projector differs from the optimal
    two-outcome discrimination measurement. The first matching block in
    canonical tuple order supplies the witness.
    """
    _guard_block_scan(group, copies)
    tuples = list(product(irreps(group), repeat=copies))
    spectra = _pmap(
        lambda reps: np.linalg.eigvalsh(state_block(reps, None).matrix), tuples, threads
    )
    scale = 1.0 / (2 * group.order) ** copies
    for reps, w in zip(tuples, spectra):
        inside = w[(w > margin) & (w < 1.0 - margin)]
        if len(inside):
            return InteriorEigenvalueReport(
                found=True,
                witness=float(inside.min()) * scale,
                labels=tuple(r.label for r in reps),
                block_eigenvalue=float(inside.min()),
            )
    return InteriorEigenvalueReport(found=False)


# ---------------------------------------------------------------------------
# dense <-> block agreement


def block_basis_permutation(group: Group, copies: int) -> np.ndarray:
    """Index map P with P[new] = old for the bit-grouping reshuffle.

    Old order: per copy, (bit, fourier row) where the fourier rows are
    (rho, i, j) blocks in canonical irrep order. New order: irrep tuples in
    canonical product order, then the multiplicity tuple i, then the bit
    tuple x, then the inner tuple j.
    """
    reps = irreps(group)
    N = group.order
    offsets = {}
    off = 0
    for r in reps:
        offsets[r.label] = off
        off += r.dim * r.dim
    P = np.empty((2 * N) ** copies, dtype=np.int64)
    pos = 0
    for combo in product(reps, repeat=copies):
        dims = [r.dim for r in combo]
        for i_tuple in product(*(range(d) for d in dims)):
            for x_tuple in product((0, 1), repeat=copies):
                for j_tuple in product(*(range(d) for d in dims)):
                    old = 0
                    for r, i, x, j in zip(combo, i_tuple, x_tuple, j_tuple):
                        per_copy = x * N + offsets[r.label] + i * r.dim + j
                        old = old * (2 * N) + per_copy
                    P[pos] = old
                    pos += 1
    return P


def to_block_basis(M: np.ndarray, group: Group, copies: int) -> np.ndarray:
    """Conjugate a dense k-copy matrix into the reshuffled Fourier basis."""
    F = fourier(group).matrix
    U_copy = np.kron(np.eye(2), F)
    U = reduce(np.kron, [U_copy] * copies)
    C = U @ M @ U.conj().T
    P = block_basis_permutation(group, copies)
    return C[np.ix_(P, P)]


def dense_from_blocks(state: ShiftState) -> np.ndarray:
    """Assemble the full matrix (in the reshuffled Fourier basis) from blocks."""
    if state.form != "block":
        raise DomainError("dense_from_blocks expects a block-form state")
    group, copies = state.group, state.copies
    dim = state.dimension
    out = np.zeros((dim, dim), dtype=np.complex128)
    scale = state.scale()
    off = 0
    for combo in product(irreps(group), repeat=copies):
        labels = tuple(r.label for r in combo)
        blk = state.blocks[labels]
        piece = np.kron(np.eye(blk.multiplicity), blk.matrix) * scale
        n = piece.shape[0]
        out[off : off + n, off : off + n] = piece
        off += n
    if off != dim:
        raise ConsistencyError("blocks do not fill the full dimension")
    return out


# ---------------------------------------------------------------------------
# subgroup restriction


def subgroup_restriction_check(
    emb: SubgroupEmbedding, tol: float = 1e-9, each_shift: bool = True
) -> bool:
    """Verify the tensor factorization of states with shifts from a subgroup.

    When the hidden shift ranges over an embedded subgroup H of G, the
    single-copy G-state reordered by the coset factorization g = t * iota(h)
    equals (H-state) (x) (maximally mixed on the |G|/|H| transversal slots).
    Checked per fixed shift (optional) and for the H-averaged mixture.
    """
    G, H = emb.parent, emb.subgroup
    m = G.order // H.order
    perm = np.empty(2 * G.order, dtype=np.int64)
    for x in (0, 1):
        for h in H.elements():
            for t_pos, t in enumerate(emb.transversal):
                new = (x * H.order + h) * m + t_pos
                perm[new] = x * G.order + G.compose(t, emb.injection[h])
    mix = np.eye(m) / m
    avg_G = np.zeros((2 * G.order, 2 * G.order))
    avg_H = np.zeros((2 * H.order, 2 * H.order))
    for h in H.elements():
        dense_G = shift_state_dense(G, emb.injection[h], 1).dense
        dense_H = shift_state_dense(H, h, 1).dense
        avg_G += dense_G
        avg_H += dense_H
        if each_shift:
            lhs = dense_G[np.ix_(perm, perm)]
            if np.max(np.abs(lhs - np.kron(dense_H, mix))) > tol:
                return False
    lhs = (avg_G / H.order)[np.ix_(perm, perm)]
    rhs = np.kron(avg_H / H.order, mix)
    return bool(np.max(np.abs(lhs - rhs)) <= tol)


# ---------------------------------------------------------------------------
# tabular reports


def spectrum_rows(
    group: Group, copies: int, shift: int | None = None, threads: int = 1
) -> list[dict]:
    """Clustered block spectra as rows keyed (group, k, tuple_label, ...).

    Eigenvalues are on the block scale; multiply by (2|G|)^-k for state
    eigenvalues. Multiplicity counts the cluster size times the block
    multiplicity.
    """
    _guard_block_scan(group, copies)
    tuples = list(product(irreps(group), repeat=copies))
    blocks = _pmap(lambda reps: state_block(reps, shift), tuples, threads)
    rows = []
    for blk in blocks:
        rep = spectrum(blk.matrix)
        for value, mult in rep.clusters:
            rows.append(
                {
                    "group": group.descriptor,
                    "k": copies,
                    "tuple_label": blk.name(group),
                    "eigenvalue": value,
                    "multiplicity": mult * blk.multiplicity,
                }
            )
    return rows
