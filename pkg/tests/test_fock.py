import itertools
from math import comb, prod

import pytest
from hypothesis import given, strategies as st

from sunchain import fock
from sunchain.fock import ANNIHILATE, CREATE, FockState, encode_state
from sunchain.oracle import FullSpace


def flavor_major_parity(positions, flavor, site):
    """Count occupied modes before (flavor, site) by listing the mode order."""
    order = [(a, x) for a in range(1, len(positions) + 1) for x in range(1, 100)]
    before = order[: order.index((flavor, site))]
    return sum(1 for a, x in before if x in positions[a - 1]) % 2


def test_encode_examples():
    assert encode_state([[1, 2], [1]], L=3).masks == (0b011, 0b001)
    assert encode_state([[]], L=2).masks == (0,)
    psi = encode_state([[1, 2, 3], [1, 2], [1]], L=4)
    assert psi == fock.trial_state((3, 2, 1))


@pytest.mark.parametrize("positions", [[[0]], [[3]], [[2, 1]], [[1, 1]]])
def test_encode_rejects_bad_input(positions):
    with pytest.raises(ValueError):
        encode_state(positions, L=2)


def test_decode_roundtrip():
    pos = [[1, 4], [], [2, 3, 5]]
    assert fock.decode_state(encode_state(pos, L=5)) == pos


def test_mode_op_examples():
    vac = FockState((0,))
    assert fock.apply_mode_op(vac, 1, 1, CREATE) == (FockState((1,)), 1)

    s = encode_state([[1, 2]], L=2)
    assert flavor_major_parity([[1, 2]], 1, 2) == 1
    assert fock.apply_mode_op(s, 1, 2, ANNIHILATE) == (encode_state([[1]], L=2), -1)

    s = encode_state([[1], []], L=1)
    assert flavor_major_parity([[1], []], 2, 1) == 1
    assert fock.apply_mode_op(s, 2, 1, CREATE) == (encode_state([[1], [1]], L=1), -1)


def test_mode_op_pauli_blocking():
    s = encode_state([[1]], L=2)
    assert fock.apply_mode_op(s, 1, 1, CREATE) is None
    assert fock.apply_mode_op(s, 1, 2, ANNIHILATE) is None


def test_mode_op_sign_matches_parity_everywhere():
    L, N = 3, 2
    for sector in itertools.product(range(L + 1), repeat=N):
        for s in fock.enumerate_sector(L, N, sector):
            pos = s.positions()
            for a in range(1, N + 1):
                for x in range(1, L + 1):
                    kind = ANNIHILATE if x in pos[a - 1] else CREATE
                    _, sign = fock.apply_mode_op(s, a, x, kind)
                    assert sign == (-1) ** flavor_major_parity(pos, a, x)


def test_mode_signs_match_oracle_kets():
    # c^+ acting on a basis ket, computed with site-major Jordan-Wigner matrices
    L, N = 2, 3
    full = FullSpace(L, N)
    for sector in itertools.product(range(L + 1), repeat=N):
        for s in fock.enumerate_sector(L, N, sector):
            for a in range(1, N + 1):
                for x in range(1, L + 1):
                    res = fock.apply_mode_op(s, a, x, CREATE)
                    image = full.cdag(x, a) @ full.ket(s)
                    if res is None:
                        assert not image.any()
                    else:
                        new, sign = res
                        assert (image == sign * full.ket(new)).all()


def test_create_then_annihilate_is_identity():
    for s in fock.enumerate_sector(3, 2, (1, 2)):
        for a, x in itertools.product((1, 2), (1, 2, 3)):
            up = fock.apply_mode_op(s, a, x, CREATE)
            if up is None:
                continue
            back, sign = fock.apply_mode_op(up[0], a, x, ANNIHILATE)
            assert back == s and sign * up[1] == 1


def test_hop_examples():
    s = encode_state([[2]], L=3)
    assert fock.apply_hop(s, 1, 2, 3) == (encode_state([[3]], L=3), 1)
    assert fock.apply_hop(encode_state([[2, 3]], L=3), 1, 2, 3) is None
    s = encode_state([[1, 3], [2]], L=4)
    assert fock.apply_hop(s, 1, 3, 2) == (encode_state([[1, 2], [2]], L=4), 1)
    with pytest.raises(ValueError):
        fock.apply_hop(s, 1, 1, 3)


def test_pair_hop_examples():
    s = encode_state([[1], [1]], L=2)
    assert fock.apply_pair_hop(s, 2, 1, 1, 2) == (encode_state([[2], [2]], L=2), 1)
    assert fock.apply_pair_hop(encode_state([[1], []], L=2), 2, 1, 1, 2) is None
    s = encode_state([[1], [1], [2]], L=3)
    assert fock.apply_pair_hop(s, 2, 1, 1, 2) == (encode_state([[2], [2], [2]], L=3), 1)
    with pytest.raises(ValueError):
        fock.apply_pair_hop(s, 1, 2, 1, 2)


def test_exchange_examples():
    s = encode_state([[1], [2]], L=2)
    assert fock.apply_exchange(s, 2, 1, 1) == (encode_state([[2], [1]], L=2), 1)
    assert fock.apply_exchange(s, 1, 2, 1) is None
    same = encode_state([[1], []], L=2)
    assert fock.apply_exchange(same, 1, 1, 1) == (same, 1)
    empty = encode_state([[2], [2]], L=2)
    assert all(fock.apply_exchange(empty, a, b, 1) is None for a in (1, 2) for b in (1, 2) if a != b)


def test_enumerate_examples():
    assert len(fock.enumerate_sector(4, 2, (2, 1))) == 24
    assert fock.enumerate_sector(2, 1, (2,)) == [FockState((0b11,))]
    assert fock.enumerate_sector(1, 2, (1, 1)) == [FockState((1, 1))]
    with pytest.raises(fock.SectorError, match="L >= max"):
        fock.enumerate_sector(2, 1, (3,))


def test_enumerate_lengths_exhaustive():
    for L in range(1, 7):
        for N in range(1, 4):
            for sector in itertools.product(range(L + 1), repeat=N):
                states = fock.enumerate_sector(L, N, sector)
                assert len(states) == fock.sector_dimension(L, sector)
                assert len(states) == prod(comb(L, m) for m in sector)
                assert states == sorted(states)


def test_caps():
    with pytest.raises(fock.ChainSizeError):
        fock.enumerate_sector(22, 1, (1,))
    with pytest.raises(fock.ChainSizeError):
        fock.enumerate_sector(2, 7, (0,) * 7)


@pytest.mark.parametrize("seq, sign", [((1, 2, 3), 1), ((2, 1), -1), ((3, 1, 2), 1), ((3, 2, 1), -1)])
def test_inversion_sign(seq, sign):
    assert fock.inversion_sign(seq) == sign


def test_ising_consistency_against_oracle():
    # |grouped> = (-1)^p |alpha_1 .. alpha_L>, with both kets built by matrices
    for L, N in [(3, 2), (3, 3), (4, 3)]:
        full = FullSpace(L, N)
        for seq in itertools.product(range(1, N + 1), repeat=L):
            ising = full.vacuum()
            for x, a in reversed(list(enumerate(seq, start=1))):
                ising = full.cdag(x, a) @ ising
            grouped = encode_state([[x for x, a in enumerate(seq, 1) if a == f] for f in range(1, N + 1)], L)
            assert (full.ket(grouped) == fock.inversion_sign(seq) * ising).all()


def test_trial_state_examples():
    assert fock.trial_state((3, 2, 1)).positions() == [[1, 2, 3], [1, 2], [1]]
    assert fock.trial_state((0, 0, 0)) == FockState((0, 0, 0))
    assert fock.trial_state((2, 0, 4), L=4).positions() == [[1, 2], [], [1, 2, 3, 4]]
    with pytest.raises(fock.SectorError):
        fock.trial_state((2, 0, 4), L=3)


@given(st.integers(1, 5), st.integers(1, 3), st.data())
def test_sign_absorption_random_states(L, N, data):
    masks = tuple(data.draw(st.integers(0, 2**L - 1)) for _ in range(N))
    s = FockState(masks)
    for x in range(1, L):
        for a in range(1, N + 1):
            for move in (fock.apply_hop(s, a, x, x + 1), fock.apply_hop(s, a, x + 1, x)):
                assert move is None or move[1] == 1
            for b in range(1, N + 1):
                move = fock.apply_exchange(s, a, b, x)
                assert move is None or move[1] == 1
            for b in range(1, a):
                move = fock.apply_pair_hop(s, a, b, x, x + 1)
                assert move is None or move[1] == 1
