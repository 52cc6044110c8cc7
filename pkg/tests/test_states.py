"""State constructions: dense vs block forms, spectra, ranks, factorizations."""

import numpy as np
import pytest

from hslab.errors import CapacityError, DomainError
from hslab.groups import (
    abelian_group,
    abelian_subgroup_of_abelian,
    abelian_subgroup_of_symmetric,
    symmetric_group,
)
from hslab.irreps import irreps
from hslab.states import (
    averaged_shift_state_dense,
    block_basis_permutation,
    block_shift_state,
    dense_from_blocks,
    interior_eigenvalue_check,
    maximally_mixed_state,
    power_block,
    rank_closed_form,
    shift_pair_vector,
    shift_state_dense,
    spectrum,
    spectrum_rows,
    state_block,
    state_rank,
    state_spectrum,
    subgroup_restriction_check,
    to_block_basis,
)


def test_shift_pair_vector_entries():
    G = abelian_group(4)
    v = shift_pair_vector(G, s=1, g=2)
    expect = np.zeros(8)
    expect[2] = expect[4 + 3] = 1 / np.sqrt(2)
    assert np.allclose(v, expect)


def test_single_copy_dense_is_pair_mixture():
    for G in (symmetric_group(3), abelian_group(2, 2)):
        for s in G.elements():
            direct = np.zeros((2 * G.order, 2 * G.order))
            for g in G.elements():
                v = shift_pair_vector(G, s, g)
                direct += np.outer(v, v) / G.order
            state = shift_state_dense(G, s)
            assert np.allclose(state.dense, direct, atol=1e-12)
            state.validate()
            # the pair vectors are orthonormal, so purity is 1/|G|
            assert abs(np.trace(state.dense @ state.dense) - 1 / G.order) < 1e-12


def test_z2_single_copy_exact_matrix():
    G = abelian_group(2)
    state = shift_state_dense(G, 1)
    expect = np.array(
        [
            [1, 0, 0, 1],
            [0, 1, 1, 0],
            [0, 1, 1, 0],
            [1, 0, 0, 1],
        ]
    ) / 4.0
    assert np.array_equal(state.dense, expect)


def test_averaged_state_is_shift_mixture():
    G = abelian_group(3)
    acc = np.zeros((6, 6))
    for s in G.elements():
        acc += shift_state_dense(G, s).dense
    avg = averaged_shift_state_dense(G)
    assert np.allclose(avg.dense, acc / 3, atol=1e-14)
    avg.validate()


def test_multi_copy_dense_is_tensor_power():
    G = abelian_group(3)
    one = shift_state_dense(G, 2).dense
    two = shift_state_dense(G, 2, copies=2).dense
    assert np.allclose(two, np.kron(one, one), atol=1e-14)
    # averaging happens after the tensor power, not before
    avg2 = averaged_shift_state_dense(G, 2).dense
    per_shift = [shift_state_dense(G, s).dense for s in G.elements()]
    expect = sum(np.kron(m, m) for m in per_shift) / 3
    assert np.allclose(avg2, expect, atol=1e-14)
    product_of_averages = np.kron(
        averaged_shift_state_dense(G).dense, averaged_shift_state_dense(G).dense
    )
    assert np.max(np.abs(avg2 - product_of_averages)) > 1e-3


DENSE_BLOCK_CASES = [
    (symmetric_group(3), 1),
    (symmetric_group(3), 2),
    (symmetric_group(4), 1),
    (abelian_group(4), 2),
    (abelian_group(2, 4), 1),
    (abelian_group(2, 2), 2),
]


@pytest.mark.parametrize("G,k", DENSE_BLOCK_CASES, ids=lambda v: str(v))
def test_dense_and_block_agree(G, k):
    for shift in (None, 1 % G.order):
        dense = (
            averaged_shift_state_dense(G, k)
            if shift is None
            else shift_state_dense(G, shift, k)
        )
        rotated = to_block_basis(dense.dense, G, k)
        blocks = block_shift_state(G, k, shift)
        blocks.validate()
        assembled = dense_from_blocks(blocks)
        assert np.max(np.abs(rotated - assembled)) < 1e-10


def test_block_basis_permutation_is_permutation():
    for G, k in ((symmetric_group(3), 2), (abelian_group(2, 2), 2)):
        P = block_basis_permutation(G, k)
        assert np.array_equal(np.sort(P), np.arange((2 * G.order) ** k))


def test_fixed_shift_blocks_are_projector_like():
    G = symmetric_group(4)
    for rep in irreps(G):
        for s in (0, 5, 17):
            blk = state_block((rep,), s).matrix
            # half the block is a rank-d projector
            assert np.allclose(blk @ blk, 2 * blk, atol=1e-10)
            w = np.linalg.eigvalsh(blk)
            assert np.allclose(np.sort(w)[::-1][: rep.dim], 2.0, atol=1e-10)
            assert np.allclose(np.sort(w)[: rep.dim], 0.0, atol=1e-10)


def test_averaged_single_copy_blocks():
    for G in (symmetric_group(3), symmetric_group(4), abelian_group(2, 4)):
        for rep in irreps(G):
            blk = state_block((rep,), None).matrix
            if rep.is_trivial:
                assert np.allclose(blk, [[1, 1], [1, 1]], atol=1e-12)
            else:
                assert np.max(np.abs(blk - np.eye(2 * rep.dim))) < 1e-10


def _clustered(values, tol=1e-8):
    out = []
    for v in np.sort(values):
        if out and abs(v - out[-1][0]) <= tol:
            out[-1][1] += 1
        else:
            out.append([float(v), 1])
    return [(round(v, 9), c) for v, c in out]


def expected_two_copy_pattern(d, coupled):
    """Eigenvalue multiset of the averaged same-irrep two-copy block.

    coupled means the group average of rho (x) rho has rank one; the block
    then picks up an extra {2, 0} pair at the expense of two eigenvalues 1.
    """
    values = [1 + 1 / d] * (d * d) + [1 - 1 / d] * (d * d)
    if coupled:
        values += [2.0, 0.0] + [1.0] * (2 * d * d - 2)
    else:
        values += [1.0] * (2 * d * d)
    return _clustered(values)


def test_two_copy_same_irrep_patterns_symmetric():
    # all nontrivial irreps of S3 and S4 are real, so rho (x) rho always
    # contains the trivial once and the coupled pattern applies
    for G in (symmetric_group(3), symmetric_group(4)):
        for rep in irreps(G):
            if rep.is_trivial:
                continue
            avg_kron = power_block((rep, rep), (1, 1), None)
            coupled = np.linalg.matrix_rank(avg_kron, tol=1e-10)
            assert coupled == 1
            w = np.linalg.eigvalsh(state_block((rep, rep), None).matrix)
            assert _clustered(w) == expected_two_copy_pattern(rep.dim, True)


def test_two_copy_same_irrep_pattern_abelian_uncoupled():
    # order-4 character of Z4: chi^2 is nontrivial, so no coupling
    G = abelian_group(4)
    rep = irreps(G)[1]
    avg_kron = power_block((rep, rep), (1, 1), None)
    assert np.max(np.abs(avg_kron)) < 1e-12
    w = np.linalg.eigvalsh(state_block((rep, rep), None).matrix)
    assert _clustered(w) == expected_two_copy_pattern(1, False)


def test_two_copy_conjugate_pair_block_abelian():
    G = abelian_group(4)
    chi = irreps(G)[1]
    chibar = irreps(G)[3]
    w = np.linalg.eigvalsh(state_block((chi, chibar), None).matrix)
    assert _clustered(w) == [(0.0, 1), (1.0, 2), (2.0, 1)]


def test_two_copy_cross_blocks_identity():
    G = symmetric_group(4)
    reps = irreps(G)
    pairs = [(reps[1], reps[2]), (reps[2], reps[3]), (reps[1], reps[3])]
    for a, b in pairs:
        blk = state_block((a, b), None).matrix
        assert np.max(np.abs(blk - np.eye(4 * a.dim * b.dim))) < 1e-10


def test_all_trivial_tuple_block_is_all_ones():
    G = symmetric_group(3)
    triv = irreps(G)[0]
    blk = state_block((triv, triv, triv), None).matrix
    assert np.allclose(blk, np.ones((8, 8)), atol=1e-12)


def test_trivial_with_nontrivial_block():
    G = symmetric_group(3)
    triv, std = irreps(G)[0], irreps(G)[1]
    blk = state_block((triv, std), None).matrix
    w = np.linalg.eigvalsh(blk)
    assert _clustered(w) == [(0.0, 2 * std.dim), (2.0, 2 * std.dim)]


RANK_CASES = [
    (abelian_group(2), 1, 3),
    (abelian_group(2), 2, 7),
    (abelian_group(3), 2, 21),
    (abelian_group(4), 2, 43),
    (abelian_group(2, 2), 2, 43),
    (symmetric_group(3), 2, 115),
    (symmetric_group(4), 1, 47),
    (symmetric_group(4), 2, 2185),
]


@pytest.mark.parametrize("G,k,expected", RANK_CASES, ids=lambda v: str(v))
def test_state_ranks_frozen_values(G, k, expected):
    assert state_rank(G, k) == expected
    assert rank_closed_form(G, k) == expected


def test_rank_closed_form_inputs():
    with pytest.raises(DomainError):
        rank_closed_form(symmetric_group(3), 3)
    assert rank_closed_form(abelian_group(5), 1) == 9


def test_fixed_shift_rank_is_group_order_power():
    for G in (symmetric_group(3), abelian_group(4)):
        for k in (1, 2):
            assert state_rank(G, k, shift=1) == G.order ** k


def test_threads_do_not_change_results():
    G = symmetric_group(4)
    assert state_rank(G, 2, threads=3) == state_rank(G, 2, threads=1)
    rows1 = spectrum_rows(G, 2, threads=1)
    rows3 = spectrum_rows(G, 2, threads=3)
    assert rows1 == rows3


def test_spectrum_report_fields():
    M = np.diag([3.0, 1.0, 1.0, 0.0])
    rep = spectrum(M)
    assert rep.dim == 4
    assert rep.clusters == ((3.0, 1), (1.0, 2), (0.0, 1))
    assert rep.rank == 3
    assert rep.max_eigenvalue == 3.0
    assert rep.min_nonzero == 1.0
    with pytest.raises(DomainError):
        spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DomainError):
        spectrum(np.zeros((2, 3)))


def test_state_spectrum_dense_vs_block():
    G = symmetric_group(3)
    k = 2
    dense_eigs = state_spectrum(averaged_shift_state_dense(G, k)).eigenvalues
    block_eigs = state_spectrum(block_shift_state(G, k)).eigenvalues
    assert np.max(np.abs(dense_eigs - block_eigs)) < 1e-12
    assert abs(dense_eigs.sum() - 1.0) < 1e-10


def test_maximally_mixed_state_forms():
    G = abelian_group(2, 2)
    dense = maximally_mixed_state(G, 2, form="dense")
    assert np.array_equal(dense.dense, np.eye(64) / 64)
    block = maximally_mixed_state(G, 2, form="block")
    block.validate()
    assembled = dense_from_blocks(block)
    assert np.allclose(assembled, np.eye(64) / 64, atol=1e-14)


def test_interior_eigenvalue_witnesses():
    assert not interior_eigenvalue_check(abelian_group(2), 1).found
    assert not interior_eigenvalue_check(symmetric_group(3), 1).found
    rep2 = interior_eigenvalue_check(symmetric_group(3), 2)
    assert rep2.found and 0 < rep2.block_eigenvalue < 1
    rep3 = interior_eigenvalue_check(symmetric_group(4), 3)
    assert rep3.found
    scale = (2 * 24) ** 3
    assert 1e-8 < rep3.witness * scale < 1 - 1e-8


@pytest.mark.parametrize(
    "emb",
    [
        abelian_subgroup_of_symmetric(3, (3,)),
        abelian_subgroup_of_abelian(abelian_group(4), (2,)),
        abelian_subgroup_of_symmetric(4, (2, 2)),
        abelian_subgroup_of_symmetric(4, (4,)),
    ],
    ids=lambda e: f"{e.parent.descriptor}>{e.subgroup.descriptor}",
)
def test_subgroup_restriction_factorization(emb):
    assert subgroup_restriction_check(emb, tol=1e-9)


def test_capacity_guards():
    with pytest.raises(CapacityError):
        shift_state_dense(symmetric_group(5), 0, 2)
    with pytest.raises(CapacityError):
        block_shift_state(symmetric_group(6), 2)
    with pytest.raises(CapacityError):
        state_rank(symmetric_group(6), 3)
    big = [r for r in irreps(symmetric_group(6)) if r.dim == 16]
    with pytest.raises(CapacityError):
        power_block((big[0], big[0], big[0]), (1, 1, 1), None)


def test_spectrum_rows_contents():
    rows = spectrum_rows(abelian_group(2), 1)
    by_label = {(r["tuple_label"], r["eigenvalue"]): r["multiplicity"] for r in rows}
    assert by_label[("0", 2.0)] == 1
    assert by_label[("0", 0.0)] == 1
    assert by_label[("1", 1.0)] == 2
    total = sum(r["eigenvalue"] * r["multiplicity"] for r in rows)
    # unit trace at state scale means the block-scale total is (2|G|)^k
    assert abs(total - 4.0) < 1e-12
