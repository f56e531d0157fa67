"""Moment/cumulant transforms: reduction, convolution, grouping, detection."""

import numpy as np
import pytest
from oracles import free_cumulant_from_moments, nc_pair_partition_count

from bifree.balgebra import CPMap, matrix_unit, maxabs, random_belement, random_cpmap
from bifree.bnc import (
    BncPartition,
    ChiWord,
    enumerate_bnc,
    one_partition,
    zero_partition,
)
from bifree.fock import FockModel, make_bisemicircular, make_circular_pair
from bifree.moments import (
    bifree_test,
    chi_of_groups,
    cumulant_chi,
    cumulant_pi,
    cumulants_from_moments,
    eval_moment_full,
    eval_moment_pi,
    hat_embed,
    moments_from_cumulants,
    product_cumulant_expand,
)
from bifree.words import GeneratorSymbol, Lb, Monomial, MomentFunctional, Rb


@pytest.fixture(scope="module")
def scalar_model():
    return make_bisemicircular([CPMap.identity(1)], [CPMap.identity(1)])


@pytest.fixture(scope="module")
def flip_model():
    flip = CPMap([matrix_unit(2, 1, 2), matrix_unit(2, 2, 1)])
    return make_bisemicircular([flip], [flip])


# --- full moments ----------------------------------------------------------------

def test_empty_word_is_unit(scalar_model, flip_model):
    assert eval_moment_full(scalar_model.functional, Monomial.unit())[0, 0] == 1
    assert np.allclose(eval_moment_full(flip_model.functional, Monomial.unit()), np.eye(2))


def test_scalar_semicircular_square(scalar_model):
    s = scalar_model.symbol("S1")
    assert abs(eval_moment_full(scalar_model.functional, Monomial([s, s]))[0, 0] - 1) < 1e-12


def test_coefficients_multiply_out(flip_model):
    rng = np.random.default_rng(0)
    b1, b2 = random_belement(2, rng), random_belement(2, rng)
    got = eval_moment_full(flip_model.functional, Monomial([Lb(b1), Rb(b2)]))
    assert maxabs(got - b1 @ b2) < 1e-12


# --- partition-indexed moments -----------------------------------------------------

def test_one_block_is_plain_product(flip_model):
    s, d = flip_model.symbol("S1"), flip_model.symbol("D1")
    chi = ChiWord("lrlr")
    ops = [Monomial([s]), Monomial([d]), Monomial([s]), Monomial([d])]
    got = eval_moment_pi(flip_model.functional, one_partition(chi), ops)
    want = eval_moment_full(flip_model.functional, Monomial([s, d, s, d]))
    assert maxabs(got - want) < 1e-12


def test_scalar_interval_factorization(scalar_model):
    s = scalar_model.symbol("S1")
    chi = ChiWord("lll")
    pi = BncPartition([[1, 2], [3]], chi)
    got = eval_moment_pi(scalar_model.functional, pi, [Monomial([s])] * 3)
    # E(ss) E(s) = 1 * 0
    assert abs(got[0, 0]) < 1e-14
    pi2 = BncPartition([[1, 2], [3, 4]], ChiWord("llll"))
    got = eval_moment_pi(scalar_model.functional, pi2, [Monomial([s])] * 4)
    assert abs(got[0, 0] - 1) < 1e-14


def test_twelve_point_worked_reduction():
    # chi has left positions {1,5,8,9,11,12}; the nested-coefficient shape of
    # the reduced expression is pinned by evaluating it by hand.
    rng = np.random.default_rng(7)
    eta = random_cpmap(2, rng)
    eta_r = random_cpmap(2, rng)
    m = make_bisemicircular([eta], [eta_r])
    S, D = m.symbol("S1"), m.symbol("D1")
    labels = ["r"] * 12
    for i in (1, 5, 8, 9, 11, 12):
        labels[i - 1] = "l"
    chi = ChiWord(labels)
    ops = []
    for k in range(1, 13):
        if labels[k - 1] == "l":
            ops.append(Monomial([S]) * Lb(random_belement(2, rng)))
        else:
            ops.append(Monomial([D]) * Rb(random_belement(2, rng)))
    pi = BncPartition([[1, 3], [2], [4, 5, 11, 12], [6, 10], [7], [8, 9]], chi)
    got = eval_moment_pi(m.functional, pi, ops)
    E = m.functional.expect
    Z = {k: ops[k - 1] for k in range(1, 13)}
    inner_right = E(Z[6] * Rb(E(Z[7])) * Z[10])
    mid = E(Z[4] * Rb(inner_right) * Z[5] * Lb(E(Z[8] * Z[9])) * Z[11] * Z[12])
    outer = E(Z[1] * Z[3] * Lb(mid))
    want = outer @ E(Z[2])
    assert maxabs(got - want) < 1e-10


def test_reduction_order_independence(flip_model):
    rng = np.random.default_rng(5)
    s, d = flip_model.symbol("S1"), flip_model.symbol("D1")
    for _ in range(60):
        n = int(rng.integers(2, 9))
        labels = ["l" if rng.integers(2) else "r" for _ in range(n)]
        chi = ChiWord(labels)
        parts = enumerate_bnc(chi)
        pi = parts[rng.integers(len(parts))]
        ops = [Monomial([s if lab == "l" else d]) for lab in labels]
        base = eval_moment_pi(flip_model.functional, pi, ops)
        alt = eval_moment_pi(flip_model.functional, pi, ops, rng=rng)
        assert maxabs(base - alt) < 1e-10


def test_scalar_shortcut_matches_full_recursion():
    cp = make_circular_pair()
    rng = np.random.default_rng(6)
    syms = cp.symbols
    for _ in range(30):
        n = int(rng.integers(2, 7))
        word = [syms[rng.integers(4)] for _ in range(n)]
        chi = ChiWord([w.side for w in word])
        parts = enumerate_bnc(chi)
        pi = parts[rng.integers(len(parts))]
        ops = [Monomial([w]) for w in word]
        a = eval_moment_pi(cp.functional, pi, ops)
        b = eval_moment_pi(cp.functional, pi, ops, force_full=True)
        assert maxabs(a - b) < 1e-12


def test_side_mismatch_rejected(scalar_model):
    s = scalar_model.symbol("S1")
    chi = ChiWord("rl")
    with pytest.raises(ValueError):
        eval_moment_pi(
            scalar_model.functional, one_partition(chi), [Monomial([s]), Monomial([s])]
        )


# --- cumulants ----------------------------------------------------------------------

def test_order_one_cumulant_is_expectation(flip_model):
    rng = np.random.default_rng(1)
    b = random_belement(2, rng)
    s = flip_model.symbol("S1")
    word = Monomial([s]) * Lb(b)
    got = cumulant_chi(flip_model.functional, ChiWord("l"), [word])
    assert maxabs(got - flip_model.functional.expect(word)) < 1e-12


def test_semicircular_cumulants_against_free_oracle(scalar_model):
    s = scalar_model.symbol("S1")
    F = scalar_model.functional
    moments = [None] + [
        complex(F.expect(Monomial([s] * k))[0, 0]).real for k in range(1, 7)
    ]
    for n, chi in ((2, "ll"), (4, "llll"), (6, "llllll")):
        got = cumulant_chi(F, ChiWord(chi), [Monomial([s])] * n)[0, 0].real
        want = free_cumulant_from_moments(moments, n)
        assert abs(got - want) < 1e-10
        assert abs(want - (1.0 if n == 2 else 0.0)) < 1e-10


def test_operator_valued_order_two(flip_model):
    rng = np.random.default_rng(2)
    flip = CPMap([matrix_unit(2, 1, 2), matrix_unit(2, 2, 1)])
    S, D = flip_model.symbol("S1"), flip_model.symbol("D1")
    F = flip_model.functional
    for _ in range(5):
        b = random_belement(2, rng)
        k = cumulant_chi(F, ChiWord("ll"), [Monomial([S, Lb(b)]), Monomial([S])])
        assert maxabs(k - flip(b)) < 1e-12
        k = cumulant_chi(F, ChiWord("lr"), [Monomial([S, Lb(b)]), Monomial([D])])
        assert maxabs(k) < 1e-12
        k = cumulant_chi(F, ChiWord("rl"), [Monomial([D, Rb(b)]), Monomial([S])])
        assert maxabs(k) < 1e-12


def test_coefficient_absorption(flip_model):
    # A pure coefficient operand in a non-final slot kills the cumulant.
    rng = np.random.default_rng(3)
    S, D = flip_model.symbol("S1"), flip_model.symbol("D1")
    F = flip_model.functional
    for n in (2, 3, 4, 5):
        for slot in range(n - 1):
            word = []
            labels = []
            for k in range(n):
                if k == slot:
                    side = "l" if rng.integers(2) else "r"
                    b = random_belement(2, rng)
                    word.append(Monomial([Lb(b) if side == "l" else Rb(b)]))
                    labels.append(side)
                else:
                    pick = rng.integers(2)
                    word.append(Monomial([S if pick else D]))
                    labels.append("l" if pick else "r")
            k_val = cumulant_chi(F, ChiWord(labels), word)
            assert maxabs(k_val) < 1e-10


# --- table transforms ----------------------------------------------------------------

def test_moments_from_semicircular_cumulant_table():
    # A variance-1 pair-partition cumulant table reproduces the moment
    # sequence counted by non-crossing pairings.
    for n in (4, 6):
        chi = ChiWord("l" * n)
        table = {}
        for p in enumerate_bnc(chi):
            is_pair = all(len(b) == 2 for b in p.blocks)
            table[p] = np.array([[1.0 if is_pair else 0.0]], dtype=complex)
        got = moments_from_cumulants(table, one_partition(chi))[0, 0].real
        assert got == nc_pair_partition_count(n)


def test_only_first_order_cumulants():
    c = 0.7
    for n in (1, 2, 3, 4):
        chi = ChiWord("l" * n)
        table = {}
        for p in enumerate_bnc(chi):
            all_single = all(len(b) == 1 for b in p.blocks)
            table[p] = np.array([[c ** n if all_single else 0.0]], dtype=complex)
        got = moments_from_cumulants(table, one_partition(chi))[0, 0].real
        assert abs(got - c ** n) < 1e-12


def test_table_round_trip_random():
    rng = np.random.default_rng(4)
    for d in (1, 2):
        for labels in ("lr", "lrl", "rllr", "lrlrr"):
            chi = ChiWord(labels)
            parts = enumerate_bnc(chi)
            ktab = {p: random_belement(d, rng) for p in parts}
            mtab = {p: moments_from_cumulants(ktab, p) for p in parts}
            back = {p: cumulants_from_moments(mtab, p) for p in parts}
            assert max(maxabs(ktab[p] - back[p]) for p in parts) < 1e-10


def test_incomplete_table_rejected():
    chi = ChiWord("ll")
    table = {zero_partition(chi): np.eye(1)}
    with pytest.raises(ValueError):
        moments_from_cumulants(table, one_partition(chi))


# --- hat embedding and product expansion ----------------------------------------------

def test_hat_embed_examples():
    chi_m = ChiWord("lr")
    chi_hat = ChiWord("llrr")
    assert hat_embed(zero_partition(chi_m), [2, 2], chi_hat).blocks == ((1, 2), (3, 4))
    assert hat_embed(one_partition(chi_m), [2, 2], chi_hat) == one_partition(chi_hat)
    p = BncPartition([[1], [2]], chi_m)
    assert hat_embed(p, [1, 1], chi_m) == p


def test_hat_embed_preserves_order_and_mobius():
    from bifree.bnc import lattice_leq, mobius_bnc

    chi_m = ChiWord("lrl")
    chi_hat = ChiWord("llrrl")
    sizes = [2, 2, 1]
    parts = enumerate_bnc(chi_m)
    for a in parts:
        for b in parts:
            ha, hb = hat_embed(a, sizes, chi_hat), hat_embed(b, sizes, chi_hat)
            assert lattice_leq(a, b) == lattice_leq(ha, hb)
            if lattice_leq(a, b):
                assert mobius_bnc(a, b) == mobius_bnc(ha, hb)


def test_hat_embed_side_constancy_violated():
    chi_m = ChiWord("lr")
    chi_hat = ChiWord("lrrr")  # first (non-final) group mixes sides
    with pytest.raises(ValueError):
        hat_embed(zero_partition(chi_m), [2, 2], chi_hat)


def test_chi_of_groups_final_group_may_mix():
    chi_hat = ChiWord("lllr")
    grouped = chi_of_groups(chi_hat, [2, 2])
    assert str(grouped) == "lr"


def test_product_expansion_trivial_grouping(scalar_model):
    s = scalar_model.symbol("S1")
    rep = product_cumulant_expand(
        scalar_model.functional, ChiWord("ll"), [1, 1], [Monomial([s])] * 2
    )
    assert rep["residual"] < 1e-12
    assert abs(rep["lhs"][0, 0] - 1.0) < 1e-12


def test_product_expansion_squared_semicircular(scalar_model):
    # grouped kappa_2(s^2, s^2) equals the number of pairings connecting the
    # two groups: brute-force over the embedded lattice gives 1.
    s = scalar_model.symbol("S1")
    rep = product_cumulant_expand(
        scalar_model.functional, ChiWord("llll"), [2, 2], [Monomial([s])] * 4
    )
    assert rep["residual"] < 1e-12
    assert abs(rep["lhs"][0, 0] - 1.0) < 1e-12


def test_product_expansion_operator_valued_random():
    rng = np.random.default_rng(9)
    model = make_bisemicircular([random_cpmap(2, rng)], [random_cpmap(2, rng)])
    S, D = model.symbol("S1"), model.symbol("D1")
    rep = product_cumulant_expand(
        model.functional,
        ChiWord("llr"),
        [2, 1],
        [Monomial([S]), Monomial([S, Lb(random_belement(2, rng))]), Monomial([D])],
    )
    assert rep["residual"] < 1e-9


# --- bi-freeness scan ---------------------------------------------------------------

def test_bifree_scan_passes_for_fock_families(scalar_model):
    rep = bifree_test(scalar_model.functional, scalar_model.symbols, max_order=4)
    assert rep["pass"] and rep["max_residual"] < 1e-9


def test_bifree_scan_vacuous_single_family(scalar_model):
    s = scalar_model.symbol("S1")
    rep = bifree_test(scalar_model.functional, [s], max_order=4)
    assert rep["pass"] and rep["vacuous"]


def test_bifree_scan_detects_planted_covariance():
    one = CPMap.identity(1)
    fm = FockModel(1, ("k",), ("j",), {("k", "k"): one, ("j", "j"): one})
    A = fm.register_symbol(
        GeneratorSymbol("A", "l", family="a"), [(1.0, ("l", "k")), (1.0, ("l*", "k"))]
    )
    B = fm.register_symbol(
        GeneratorSymbol("B", "l", family="b"),
        [(0.5, ("l", "k")), (0.5, ("l*", "k")), (1.0, ("l*", "j"))],
    )
    rep = bifree_test(fm.functional(), [A, B], max_order=3)
    assert not rep["pass"]
    k2 = [v for v in rep["violations"] if v["order"] == 2]
    assert any(abs(v["residual"] - 0.5) < 1e-9 for v in k2)


def test_bifree_scan_matrix_path_agrees_with_scalar():
    # the dim-1 fast path and the generic cumulant agree on mixed words
    one = CPMap.identity(1)
    model = make_bisemicircular([one], [one])
    F = model.functional
    s, d = model.symbol("S1"), model.symbol("D1")
    for word in ((s, d), (s, d, s), (d, s, d, s)):
        chi = ChiWord([w.side for w in word])
        via_matrix = cumulant_pi(F, one_partition(chi), [Monomial([w]) for w in word])
        from bifree.moments import _scalar_top_cumulant

        via_scalar = _scalar_top_cumulant(F, word, chi)
        assert abs(via_matrix[0, 0] - via_scalar) < 1e-12
