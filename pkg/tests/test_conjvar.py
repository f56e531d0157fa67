"""Conjugate variables, Fisher information, lifts, entropy."""

import math

import numpy as np
import pytest

from bifree.balgebra import CPMap, matrix_unit, maxabs, random_belement
from bifree.bnc import ChiWord, s_chi
from bifree.conjvar import (
    MatrixLift,
    PresenceContext,
    VectorCandidate,
    WordCandidate,
    aaf_check,
    conj_residual,
    entropy_chi_star,
    eta_flip,
    fisher_info,
    fisher_minimization_experiment,
    h_closed_form,
    matrix_lift,
    semicircular_entropy_experiment,
    solve_conjugate,
)
from bifree.fock import FockVector, make_bisemicircular, make_circular_pair
from bifree.words import GeneratorSymbol, Monomial, MomentFunctional

ONE = CPMap.identity(1)


# --- residual checks ---------------------------------------------------------------

def test_semicircular_conjugate_is_itself():
    m = make_bisemicircular([ONE], [])
    s = m.symbol("S1")
    cand = VectorCandidate(s, m.model.vector_of(Monomial([s])), m.model)
    assert conj_residual(cand, ONE, PresenceContext(), m.functional, 6) <= 1e-12


def test_zero_candidate_fails_at_first_relation():
    m = make_bisemicircular([ONE], [])
    s = m.symbol("S1")
    cand = VectorCandidate(s, FockVector(1), m.model)
    r = conj_residual(cand, ONE, PresenceContext(), m.functional, 2)
    assert abs(r - 1.0) < 1e-12  # tau(S S) = 1 is the first broken relation


def test_scaling_law():
    for lam in (0.5, 2.0):
        m = make_bisemicircular([ONE], [])
        s = m.symbol("S1")
        scaled = m.model.scaled_symbol(s, lam, name="scaled")
        cand = VectorCandidate(
            scaled, m.model.vector_of(Monomial([s])).scaled(1 / lam), m.model
        )
        assert conj_residual(cand, ONE, PresenceContext(), m.functional, 6) <= 1e-12
        assert abs(fisher_info([cand]) - 1 / lam**2) < 1e-12


def test_presence_context_validation():
    m = make_bisemicircular([ONE], [ONE])
    s, d = m.symbol("S1"), m.symbol("D1")
    with pytest.raises(ValueError):
        PresenceContext((d,), ())
    PresenceContext((s,), (d,))


def test_uniqueness_up_to_orthogonal_part():
    # Two candidates passing the same relations differ by a state orthogonal
    # to every test word.
    m = make_bisemicircular([ONE, ONE], [])
    s1, s2 = m.symbol("S1"), m.symbol("S2")
    model = m.model
    base = model.vector_of(Monomial([s1]))
    other = base + model.vector_of(Monomial([s2])).scaled(0.3)
    c1 = VectorCandidate(s1, base, model)
    c2 = VectorCandidate(s1, other, model)
    ctx = PresenceContext()
    assert conj_residual(c1, ONE, ctx, m.functional, 5) <= 1e-12
    assert conj_residual(c2, ONE, ctx, m.functional, 5) <= 1e-12
    diff = other - base
    for k in range(0, 5):
        word = Monomial([s1] * k)
        # <diff, word vacuum> computed through the adjoint word action
        paired = model.apply_word(word.adjoint(), diff)
        assert abs(np.trace(paired.depth0())) < 1e-12


def test_projection_monotonicity():
    # Fisher information in a reduced presence context can only shrink.
    m = make_bisemicircular([ONE, ONE], [])
    s1, s2 = m.symbol("S1"), m.symbol("S2")
    u = m.model.combination_symbol("u", "l", [(1.0, s1), (1.0, s2)], family="u")
    # full context: the extra generator s1 is present; conjugate is s2
    full = VectorCandidate(u, m.model.vector_of(Monomial([s2])), m.model)
    assert conj_residual(full, ONE, PresenceContext((s1,), ()), m.functional, 5) <= 1e-10
    # reduced context: scalar coefficients only; conjugate is u/2
    reduced = VectorCandidate(u, m.model.vector_of(Monomial([u])).scaled(0.5), m.model)
    assert conj_residual(reduced, ONE, PresenceContext(), m.functional, 5) <= 1e-10
    assert fisher_info([reduced]) <= fisher_info([full]) + 1e-12
    assert abs(fisher_info([reduced]) - 0.5) < 1e-12
    assert abs(fisher_info([full]) - 1.0) < 1e-12
    # Cramer-Rao: equality at the bi-semicircular minimum, strict above it.
    tau_u2 = m.functional.tau(Monomial([u, u])).real
    assert fisher_info([reduced]) * tau_u2 >= 1.0 - 1e-9
    assert fisher_info([full]) * tau_u2 >= 1.0 + 0.5  # strictly above K^2 = 1


def test_two_sided_fisher_additivity():
    m = make_bisemicircular([ONE], [ONE])
    s, d = m.symbol("S1"), m.symbol("D1")
    cs = VectorCandidate(s, m.model.vector_of(Monomial([s])), m.model)
    cd = VectorCandidate(d, m.model.vector_of(Monomial([d])), m.model)
    assert conj_residual(cs, ONE, PresenceContext((), (d,)), m.functional, 5) <= 1e-10
    assert conj_residual(cd, ONE, PresenceContext((s,), ()), m.functional, 5) <= 1e-10
    assert abs(fisher_info([cs, cd]) - 2.0) < 1e-12
    assert fisher_info([cs, None]) == math.inf


def test_matrix_coefficient_insertions_in_relations():
    # d = 2 with flip covariance: the conjugate of S is S with eta = flip,
    # checked against words containing coefficient-basis insertions.
    flip = eta_flip()
    m = make_bisemicircular([flip], [flip])
    S, D = m.symbol("S1"), m.symbol("D1")
    cand = VectorCandidate(S, m.model.vector_of(Monomial([S])), m.model)
    r = conj_residual(cand, flip, PresenceContext((), (D,)), m.functional, 3)
    assert r <= 1e-10


def test_solver_recovers_semicircular_conjugate():
    m = make_bisemicircular([ONE], [])
    s = m.symbol("S1")
    cand, resid = solve_conjugate(m.model, s, ONE, PresenceContext(), max_n=4)
    assert resid <= 1e-9
    assert abs(fisher_info([cand]) - 1.0) < 1e-6


# --- matrix lift ----------------------------------------------------------------------

class TensorOracle:
    """Direct realization of lifted words on a d x d matrix of Fock states."""

    def __init__(self, base_model, d):
        self.model = base_model
        self.d = d

    def tau(self, factors, tables):
        d = self.d
        state = {
            (i, j): (
                FockVector.vacuum(self.model.dim)
                if i == j
                else FockVector(self.model.dim)
            )
            for i in range(1, d + 1)
            for j in range(1, d + 1)
        }
        for f in reversed(factors):
            table, side = tables[f]
            new = {}
            for i in range(1, d + 1):
                for j in range(1, d + 1):
                    acc = FockVector(self.model.dim)
                    for a in range(1, d + 1):
                        key = (i, a) if side == "l" else (a, j)
                        src = state[(a, j)] if side == "l" else state[(i, a)]
                        for coeff, word in table.get(key, ()):
                            acc = acc + self.model.apply_word(
                                Monomial(word), src
                            ).scaled(coeff)
                    new[(i, j)] = acc
            state = new
        total = sum(
            complex(np.trace(state[(i, i)].depth0())) for i in range(1, d + 1)
        )
        return total / d


def test_lift_parity_and_half_sum_formula():
    cp = make_circular_pair()
    pair = matrix_lift(cp.functional, cp.c_l, cp.c_r, cp.c_l_star, cp.c_r_star)
    tau2 = pair.scalar_functional
    phi = cp.functional.tau
    rng = np.random.default_rng(11)
    for n in range(1, 7):
        for _ in range(6):
            labels = ["l" if rng.integers(2) else "r" for _ in range(n)]
            word = [pair.X if lab == "l" else pair.Y for lab in labels]
            got = tau2.tau(Monomial(word))
            if n % 2:
                assert abs(got) < 1e-12
                continue
            chi = ChiWord(labels)
            order = s_chi(chi)
            pflags = [False] * n
            for rank, pos in enumerate(order, start=1):
                pflags[pos - 1] = rank % 2 == 0
            zp, zq = [], []
            for k in range(n):
                z = cp.c_l if labels[k] == "l" else cp.c_r
                zp.append(z.star() if pflags[k] else z)
                zq.append(z if pflags[k] else z.star())
            want = 0.5 * (phi(Monomial(zp)) + phi(Monomial(zq)))
            assert abs(got - want) < 1e-10


def test_lift_matches_tensor_oracle_d2():
    cp = make_circular_pair()
    pair = matrix_lift(cp.functional, cp.c_l, cp.c_r, cp.c_l_star, cp.c_r_star)
    tables = {
        pair.X: (pair.lift.tables[pair.X], "l"),
        pair.Y: (pair.lift.tables[pair.Y], "r"),
    }
    oracle = TensorOracle(cp.model, 2)
    rng = np.random.default_rng(12)
    for n in range(1, 7):
        for _ in range(4):
            word = [pair.X if rng.integers(2) else pair.Y for _ in range(n)]
            got = pair.scalar_functional.tau(Monomial(word))
            want = oracle.tau(word, tables)
            assert abs(got - want) < 1e-10


def test_lift_general_d_matches_tensor_oracle():
    cp = make_circular_pair()
    rng = np.random.default_rng(13)
    d = 3
    lift = MatrixLift(cp.functional, d=d)
    base_left = (cp.c_l, cp.c_l_star)
    base_right = (cp.c_r, cp.c_r_star)
    tables = {}
    for name, side, pool in (("A", "l", base_left), ("B", "r", base_right)):
        table = {}
        for i in range(1, d + 1):
            for j in range(1, d + 1):
                if rng.integers(2):
                    c = complex(rng.standard_normal(), rng.standard_normal())
                    table[(i, j)] = [(c, (pool[int(rng.integers(2))],))]
        sym = lift.add_symbol(
            GeneratorSymbol(name, side, family=name), table, register_adjoint=False
        )
        tables[sym] = (lift.tables[sym], side)
    A = next(s for s in tables if s.name == "A")
    B = next(s for s in tables if s.name == "B")
    oracle = TensorOracle(cp.model, d)
    for n in range(1, 5):
        for _ in range(4):
            word = [A if rng.integers(2) else B for _ in range(n)]
            got = lift.scalar_functional().tau(Monomial(word))
            want = oracle.tau(word, tables)
            assert abs(got - want) < 1e-9


def test_eta_flip_properties():
    fl = eta_flip()
    assert np.allclose(fl(np.eye(2)), np.eye(2))
    assert np.allclose(fl(matrix_unit(2, 1, 1)), matrix_unit(2, 2, 2))
    assert fl.is_positive()


# --- alternating adjoint flipping ------------------------------------------------------

def test_aaf_circular_pair_passes():
    cp = make_circular_pair()
    rep = aaf_check(cp.functional, cp.c_l, cp.c_r, 6)
    assert rep["pass"] and rep["max_discrepancy"] <= 1e-12


def test_aaf_bihaar_table_passes():
    # balanced moments 1, unbalanced 0
    def oracle(word):
        bal = {}
        for f in word.factors:
            bal[f.name] = bal.get(f.name, 0) + (-1 if f.adjoint else 1)
        return np.array([[1.0 if not any(bal.values()) else 0.0]], dtype=complex)

    F = MomentFunctional(oracle, 1)
    x = GeneratorSymbol("x", "l")
    y = GeneratorSymbol("y", "r")
    rep = aaf_check(F, x, y, 6)
    assert rep["pass"]


def test_aaf_violation_detected():
    def oracle(word):
        key = tuple((f.name, f.adjoint) for f in word.factors)
        if key == (("x", False), ("x", True)):
            return np.array([[1.0]], dtype=complex)
        if key == (("x", True), ("x", False)):
            return np.array([[2.0]], dtype=complex)
        return np.array([[0.0]], dtype=complex)

    F = MomentFunctional(oracle, 1)
    rep = aaf_check(F, GeneratorSymbol("x", "l"), GeneratorSymbol("y", "r"), 2)
    assert not rep["pass"]
    assert abs(rep["max_discrepancy"] - 1.0) < 1e-12


# --- closed forms and entropy -----------------------------------------------------------

def test_h_closed_form_values():
    assert h_closed_form(0.0, 1.0, 1.0) == 1.0
    assert h_closed_form(1.0, 1.0, 1.0) == 0.5
    assert h_closed_form(0.0, 2.0, 2.0) == 2.0
    with pytest.raises(ZeroDivisionError):
        h_closed_form(0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        h_closed_form(-1.0, 1.0, 1.0)


def test_entropy_quadrature_closed_form():
    rep = entropy_chi_star(lambda t: 1.0 / (1.0 + t), K=1.0, K1=1.0, K3=1.0, t_max=1e5)
    want = 0.5 * math.log(2 * math.pi * math.e)
    assert rep["max_integrand_abs"] <= 1e-12
    assert abs(rep["value"] - want) <= rep["bracket_width"] + 1e-9
    assert rep["bracket"][0] - 1e-12 <= want <= rep["bracket"][1] + 1e-12


def test_entropy_rejects_nonfinite_fisher():
    with pytest.raises(ValueError):
        entropy_chi_star(lambda t: math.inf, K=1.0, K1=1.0, steps=5)


def test_entropy_max_bound_equality_case():
    # Variance-matched semicircular family of total covariance K: the value
    # meets the maximum-entropy bound (K/2) log(2 pi e K1 / K).
    K = 2.0
    rep = entropy_chi_star(
        lambda t: K * K / (K + K * t), K=K, K1=K, K3=K, t_max=1e5
    )
    want = 0.5 * K * math.log(2 * math.pi * math.e)
    assert abs(rep["value"] - want) <= rep["bracket_width"] + 1e-9


# --- experiments ------------------------------------------------------------------------

def test_fisher_minimization_quick():
    rep = fisher_minimization_experiment(max_n=4)
    assert rep["pass"]
    assert abs(rep["lhs"] - 4.0) < 1e-9
    assert abs(rep["rhs"] - 2.0) < 1e-9
    assert abs(rep["ratio"] - 2.0) < 1e-9
    assert abs(rep["cramer_rao_product"] - 4.0) < 1e-9


def test_semicircular_entropy_quick():
    rep = semicircular_entropy_experiment(t_max=1e4, steps=65, resid_spots=(0.0, 1.0))
    assert rep["pass"]
    assert rep["max_integrand_abs"] <= 1e-9
    assert abs(rep["value"] - 0.5 * math.log(2 * math.pi * math.e)) <= 1e-3
