"""Lattice-level tests with independent combinatorial oracles."""

import json

import numpy as np
import pytest
from oracles import all_set_partitions, has_crossing, zeta_inverse_mobius

from bifree.bnc import (
    BncPartition,
    ChiWord,
    catalan,
    chi_less,
    enumerate_bnc,
    is_bnc,
    lattice_join,
    lattice_leq,
    lattice_meet,
    mobius_bnc,
    one_partition,
    s_chi,
    s_chi_inverse,
    zero_partition,
)

# --- s_chi and the chi-order ---------------------------------------------------

def test_s_chi_paper_example():
    chi = ChiWord("lllrrl")
    assert s_chi(chi) == (1, 2, 3, 6, 5, 4)


def test_s_chi_pure_sides():
    assert s_chi(ChiWord("lll")) == (1, 2, 3)
    assert s_chi(ChiWord("rrr")) == (3, 2, 1)


def test_s_chi_inverse_consistent():
    chi = ChiWord("lrrllr")
    s = s_chi(chi)
    inv = s_chi_inverse(chi)
    for rank, pos in enumerate(s, start=1):
        assert inv[pos - 1] == rank


def test_chi_less():
    assert chi_less(1, 2, ChiWord("lr"))
    assert chi_less(2, 1, ChiWord("rr"))
    assert chi_less(6, 5, ChiWord("lllrrl"))
    with pytest.raises(ValueError):
        chi_less(1, 1, ChiWord("lr"))


# --- membership ----------------------------------------------------------------

def test_is_bnc_paper_example():
    chi = ChiWord("lllrrl")
    assert is_bnc([[1, 4], [2, 5], [3, 6]], chi)
    assert not is_bnc([[1, 4], [2, 5], [3, 6]], ChiWord("llllll"))


def test_singletons_always_bnc():
    for labels in ("l", "lr", "rllr", "rrrlll"):
        chi = ChiWord(labels)
        assert is_bnc([[k] for k in range(1, chi.n + 1)], chi)


def test_is_bnc_against_quartic_scan():
    rng = np.random.default_rng(42)
    for n in range(2, 7):
        for _ in range(3):
            labels = "".join("l" if rng.integers(2) else "r" for _ in range(n))
            chi = ChiWord(labels)
            inv = s_chi_inverse(chi)
            for blocks in all_set_partitions(n):
                relabeled = tuple(tuple(inv[x - 1] for x in b) for b in blocks)
                expected = not has_crossing(relabeled)
                assert is_bnc(blocks, chi) == expected


def test_is_bnc_rejects_non_partition():
    with pytest.raises(ValueError):
        is_bnc([[1, 2], [2, 3]], ChiWord("lll"))
    with pytest.raises(ValueError):
        is_bnc([[1]], ChiWord("ll"))


# --- enumeration ----------------------------------------------------------------

def test_counts_are_catalan():
    assert len(enumerate_bnc(ChiWord("l"))) == 1
    for labels in ("llr", "rlr", "lll"):
        assert len(enumerate_bnc(ChiWord(labels))) == 5
    for labels in ("lrlrl", "rrrrr", "llrrl"):
        assert len(enumerate_bnc(ChiWord(labels))) == 42


def test_enumeration_matches_filtered_set_partitions():
    chi = ChiWord("lrrl")
    expected = {
        tuple(sorted(tuple(sorted(b)) for b in p))
        for p in all_set_partitions(4)
        if is_bnc(p, chi)
    }
    got = {p.blocks for p in enumerate_bnc(chi)}
    assert got == expected


def test_enumeration_deterministic_and_bounded():
    a = [p.blocks for p in enumerate_bnc(ChiWord("lrlr"))]
    b = [p.blocks for p in enumerate_bnc(ChiWord("lrlr"))]
    assert a == b
    with pytest.raises(ValueError):
        enumerate_bnc(ChiWord("lr" * 7))


def test_enumeration_golden_order():
    # the canonical order is frozen: changing it silently would break
    # downstream golden files
    got = [list(map(list, p.blocks)) for p in enumerate_bnc(ChiWord("lll"))]
    assert got == [
        [[1], [2], [3]],
        [[1], [2, 3]],
        [[1, 2], [3]],
        [[1, 3], [2]],
        [[1, 2, 3]],
    ]
    got = [list(map(list, p.blocks)) for p in enumerate_bnc(ChiWord("lr"))]
    assert got == [[[1], [2]], [[1, 2]]]


# --- lattice operations ----------------------------------------------------------

def test_join_meet_identities():
    rng = np.random.default_rng(7)
    for labels in ("lrl", "rllr", "lrlrr"):
        chi = ChiWord(labels)
        parts = enumerate_bnc(chi)
        zero, one = zero_partition(chi), one_partition(chi)
        for _ in range(10):
            sigma = parts[rng.integers(len(parts))]
            assert lattice_join(sigma, zero) == sigma
            assert lattice_meet(sigma, one) == sigma
            assert lattice_leq(zero, sigma) and lattice_leq(sigma, one)


def test_join_example_and_brute_force():
    chi = ChiWord("lrl")
    a = BncPartition([[1], [2], [3]], chi)
    b = BncPartition([[1, 3], [2]], chi)
    assert lattice_join(a, b) == b
    # join is the minimal common coarsening inside the lattice
    parts = enumerate_bnc(ChiWord("lrlr"))
    rng = np.random.default_rng(11)
    for _ in range(25):
        x = parts[rng.integers(len(parts))]
        y = parts[rng.integers(len(parts))]
        j = lattice_join(x, y)
        uppers = [p for p in parts if lattice_leq(x, p) and lattice_leq(y, p)]
        assert all(lattice_leq(j, u) for u in uppers)
        assert j in uppers


def test_meet_is_common_refinement():
    chi = ChiWord("llrr")
    x = BncPartition([[1, 2], [3, 4]], chi)
    y = BncPartition([[1, 2, 3, 4]], chi)
    assert lattice_meet(x, y) == x
    z = BncPartition([[1], [2, 3], [4]], chi)
    assert lattice_meet(x, z).blocks == ((1,), (2,), (3,), (4,))


def test_mismatched_chi_rejected():
    a = zero_partition(ChiWord("lr"))
    b = zero_partition(ChiWord("rl"))
    with pytest.raises(ValueError):
        lattice_join(a, b)
    with pytest.raises(ValueError):
        mobius_bnc(a, b)


# --- Moebius function -------------------------------------------------------------

def test_mobius_basic_values():
    chi2 = ChiWord("lr")
    assert mobius_bnc(one_partition(chi2), one_partition(chi2)) == 1
    assert mobius_bnc(zero_partition(chi2), one_partition(chi2)) == -1
    chi3 = ChiWord("rlr")
    assert mobius_bnc(zero_partition(chi3), one_partition(chi3)) == 2


def test_mobius_zero_when_not_leq():
    chi = ChiWord("llr")
    a = BncPartition([[1, 2], [3]], chi)
    b = BncPartition([[1], [2, 3]], chi)
    assert mobius_bnc(a, b) == 0


def test_mobius_extreme_values():
    for n in range(1, 8):
        chi = ChiWord("lr" * (n // 2) + "l" * (n % 2))
        assert mobius_bnc(zero_partition(chi), one_partition(chi)) == (-1) ** (
            n - 1
        ) * catalan(n - 1)


def test_mobius_against_zeta_inverse():
    rng = np.random.default_rng(3)
    for n in range(2, 7):
        parts_nc, idx, mu = zeta_inverse_mobius(n)
        labels = "".join("l" if rng.integers(2) else "r" for _ in range(n))
        chi = ChiWord(labels)
        bparts = enumerate_bnc(chi)
        for _ in range(40):
            a = bparts[rng.integers(len(bparts))]
            b = bparts[rng.integers(len(bparts))]
            got = mobius_bnc(a, b)
            want = mu[idx[a.relabel_nc()], idx[b.relabel_nc()]]
            assert abs(got - round(want)) == 0 and abs(want - round(want)) < 1e-6


def test_mobius_defining_recursion_small():
    chi = ChiWord("lrlr")
    parts = enumerate_bnc(chi)
    for pi in parts:
        for sigma in parts:
            if not lattice_leq(sigma, pi):
                continue
            total = sum(
                mobius_bnc(tau, pi)
                for tau in parts
                if lattice_leq(sigma, tau) and lattice_leq(tau, pi)
            )
            assert total == (1 if sigma == pi else 0)


# --- serialization ---------------------------------------------------------------

def test_json_round_trip():
    chi = ChiWord("lllrrl")
    p = BncPartition([[1, 4], [2, 5], [3, 6]], chi)
    obj = p.to_json()
    assert obj == {"n": 6, "chi": "lllrrl", "blocks": [[1, 4], [2, 5], [3, 6]]}
    assert BncPartition.from_json(json.dumps(obj)) == p
