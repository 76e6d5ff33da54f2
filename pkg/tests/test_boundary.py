"""Tests for the boundary toolkit: group-like sequences, the transition
operator, exponential classification, and block recovery."""

import numpy as np
import pytest

from definetti import (
    Functional,
    GroupLike,
    LeggedOperator,
    Partition,
    SymSequence,
    block_compression,
    determinant_twist,
    e_rho_value,
    exponential_test,
    grouplike_sequence,
    is_psd,
    p_map,
    recover_block,
    separable_image_check,
    subharmonic_check,
    validate_k_prefix,
)

from conftest import rand_psd

RHO = Functional.normalized_trace(2)


def random_grouplike(rng, n=2):
    """Random full-rank PSD matrix scaled so rho(t) <= 1."""
    t = rand_psd(n, rng, floor=0.05)
    t = t / max(1.0, np.trace(t).real / n)
    return GroupLike(t)


def mixed_sign_matrix(rng, n=2):
    """Hermitian with eigenvalues of both signs, bounded away from zero."""
    w = np.concatenate([rng.uniform(0.2, 2.0, size=n - 1), [-rng.uniform(0.2, 2.0)]])
    u, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return (u * w) @ u.conj().T


# -- group-like sequences and the transition operator ------------------------


def test_grouplike_rejects_singular():
    with pytest.raises(ValueError):
        GroupLike(np.diag([1.0, 0.0]))


def test_grouplike_sequence_shape(rng):
    g = random_grouplike(rng)
    a = LeggedOperator(rand_psd(2, rng), (2,))
    seq = grouplike_sequence(a, g, 4, RHO)
    assert seq.L == 4
    assert seq.entries[3].legs == (2, 2, 2, 2)
    expect = np.kron(a.entries, np.kron(g.t, g.t))
    assert np.abs(seq.entries[2].entries - expect).max() < 1e-13


def test_p_map_eigen_relation(rng):
    # the transition operator scales a group-like sequence by rho(t)
    for _ in range(5):
        g = random_grouplike(rng)
        a = LeggedOperator(rand_psd(2, rng), (2,))
        seq = grouplike_sequence(a, g, 4, RHO)
        shifted = p_map(seq, RHO)
        val = e_rho_value(g, RHO)
        for l in range(4):
            dev = np.abs(shifted.entries[l].entries - val * seq.entries[l].entries).max()
            assert dev < 1e-10


def test_p_map_is_positivity_preserving(rng):
    g = random_grouplike(rng)
    a = LeggedOperator(rand_psd(2, rng), (2,))
    seq = grouplike_sequence(a, g, 3, RHO)
    out = p_map(seq, RHO)
    assert out.L == 2
    assert all(is_psd(x) for x in out.entries)


def test_p_map_needs_positive_length():
    seq = SymSequence(2, 2, RHO, [LeggedOperator(np.eye(2), (2,))])
    with pytest.raises(ValueError):
        p_map(seq, RHO)


def test_e_rho_value_rejects_complex(rng):
    g = GroupLike(np.diag([1.0j, 1.0]))
    with pytest.raises(ValueError):
        e_rho_value(g, RHO)


# -- subharmonicity and the bridge to the hierarchy cone ---------------------


def test_subharmonic_iff_rho_value_at_most_one(rng):
    a = LeggedOperator(rand_psd(2, rng), (2,))
    small = GroupLike(np.diag([0.5, 0.8]))
    big = GroupLike(np.diag([1.5, 1.2]))
    assert subharmonic_check(grouplike_sequence(a, small, 3, RHO), RHO)
    assert not subharmonic_check(grouplike_sequence(a, big, 3, RHO), RHO)


def test_bridge_identity_on_random_mixtures(rng):
    # subharmonic_check must agree with the K-cone prefix validation
    for _ in range(20):
        seqs = []
        for _ in range(3):
            g = random_grouplike(rng)
            a = LeggedOperator(rand_psd(2, rng), (2,))
            seqs.append(grouplike_sequence(a, g, 4, RHO))
        w = rng.dirichlet(np.ones(3))
        entries = [
            sum((w[i] * s.entries[l] for i, s in enumerate(seqs[1:], 1)), w[0] * seqs[0].entries[l])
            for l in range(5)
        ]
        seq = SymSequence(2, 2, RHO, entries)
        assert subharmonic_check(seq, RHO) == validate_k_prefix(seq).ok


# -- exponential classification ----------------------------------------------


def test_psd_grouplike_is_exponential(rng):
    for _ in range(10):
        g = random_grouplike(rng)
        report = exponential_test(g, 4)
        assert report.is_exponential
        assert report.failing_block is None


def test_mixed_sign_fails_with_block(rng):
    for _ in range(10):
        g = GroupLike(mixed_sign_matrix(rng))
        report = exponential_test(g, 4)
        assert not report.is_exponential
        assert report.failing_block is not None


def test_diag_1_minus1_fails_at_both_levels():
    g = GroupLike(np.diag([1.0, -1.0]))
    # fundamental block has eigenvalues {1, -1}
    fund = block_compression(g, Partition((1,)))
    assert sorted(np.linalg.eigvalsh(fund).round(12)) == [-1.0, 1.0]
    # Sym^2 block of diag(x, y) has eigenvalues {x^2, xy, y^2} = {1, -1, 1}
    sym2 = block_compression(g, Partition((2,)))
    assert sorted(np.linalg.eigvalsh(sym2).round(12)) == [-1.0, 1.0, 1.0]
    report = exponential_test(g, 2)
    assert not report.is_exponential


def test_non_normal_grouplike_detected(rng):
    # an invertible matrix with non-real spectrum is not an exponential
    g = GroupLike(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    report = exponential_test(g, 2)
    assert not report.is_exponential


# -- block recovery ----------------------------------------------------------


def test_recover_block_spectrum(rng):
    x, y = 1.3, 0.4
    g = GroupLike(np.diag([x, y]))
    a = LeggedOperator(np.eye(2), (2,))
    seq = grouplike_sequence(a, g, 3, RHO)
    block = recover_block(seq, Partition((2,)))
    # I_2 (x) Sym^2(t): eigenvalues {x^2, xy, y^2}, each doubled by the m-leg
    got = sorted(np.linalg.eigvalsh((block.entries + block.entries.conj().T) / 2).round(10))
    expect = sorted([x * x, x * y, y * y] * 2)
    assert np.allclose(got, expect)
    assert block.legs == (2, 3)


def test_recover_block_injectivity(rng):
    # two group-like matrices agreeing on all l <= 2 blocks must coincide
    g1 = random_grouplike(rng)
    a = LeggedOperator(np.eye(2), (2,))
    seq1 = grouplike_sequence(a, g1, 2, RHO)
    fund = recover_block(seq1, Partition((1,)))
    # the fundamental block determines t directly (up to the fixed basis)
    t_rec = fund.entries[:2, :2]
    assert np.abs(t_rec - g1.t).max() < 1e-12


def test_recover_block_needs_long_enough_prefix(rng):
    g = random_grouplike(rng)
    seq = grouplike_sequence(LeggedOperator(np.eye(2), (2,)), g, 1, RHO)
    with pytest.raises(ValueError):
        recover_block(seq, Partition((2,)))


def test_determinant_twist():
    g = GroupLike(np.diag([2.0, 3.0]))
    block = LeggedOperator(np.eye(2), (2,))
    out = determinant_twist(block, g, 1)
    assert np.allclose(out.entries, np.eye(2) / 6.0)
    back = determinant_twist(out, g, -1)
    assert np.allclose(back.entries, np.eye(2))


# -- consistency of the boundary with the hierarchy --------------------------


def test_separable_image_check_consistent(rng):
    g = random_grouplike(rng)
    a = LeggedOperator(rand_psd(2, rng), (2,))
    seq = grouplike_sequence(a, g, 4, RHO)
    report = separable_image_check(seq, RHO)
    assert report.subharmonic
    assert report.consistent
    assert report.separability.verdict != "entangled_evidence"


def test_separable_image_check_requires_subharmonic(rng):
    g = GroupLike(np.diag([2.0, 2.0]))
    seq = grouplike_sequence(LeggedOperator(np.eye(2), (2,)), g, 3, RHO)
    with pytest.raises(ValueError):
        separable_image_check(seq, RHO)
