"""Conjugate variables, Fisher information, matrix lifts and entropy laws.

A conjugate candidate pairs a target generator with a state (or an operator
word) that is supposed to satisfy the moment relations of the conjugate
variable: the trace of any test word against the candidate must equal the
sum, over occurrences of the target, of the trace of the word with the
occurrence removed, the same-side tail averaged out through the covariance
map, and spliced back in as a coefficient.  ``conj_residual`` scans all test
words up to a length and reports the worst violation; everything downstream
(Fisher information, the perturbation law, entropy integrals, the
minimization experiments) consumes verified candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .balgebra import CPMap, matrix_unit, matrix_units, trace_d
from .bnc import LEFT, RIGHT, ChiWord, s_chi
from .fock import CircularPairModel, FockModel, FockVector, make_bisemicircular
from .words import (
    BCoeff,
    GeneratorSymbol,
    Lb,
    Monomial,
    MomentFunctional,
    Rb,
    as_monomial,
)


@dataclass(frozen=True)
class PresenceContext:
    """Generators adjoined to the two faces beyond the coefficient algebra."""

    left_gens: tuple = ()
    right_gens: tuple = ()

    def __post_init__(self):
        for g in self.left_gens:
            if g.side != LEFT:
                raise ValueError(f"{g!r} is not a left generator")
        for g in self.right_gens:
            if g.side != RIGHT:
                raise ValueError(f"{g!r} is not a right generator")

    def generators(self) -> tuple:
        return tuple(self.left_gens) + tuple(self.right_gens)


class VectorCandidate:
    """Conjugate candidate given as a state of a Fock-backed model."""

    def __init__(self, target: GeneratorSymbol, vector: FockVector, model: FockModel):
        if vector.dim != model.dim:
            raise ValueError("vector dimension does not match the model")
        self.target = target
        self.side = target.side
        self.vector = vector
        self.model = model

    def initial_state(self):
        return self.vector

    def extend(self, factor, state):
        return self.model.apply_symbol(factor, state)

    def tau(self, state) -> complex:
        return complex(np.trace(state.depth0())) / self.model.dim

    def norm_sq(self) -> float:
        return self.model.norm_sq(self.vector)


class WordCandidate:
    """Conjugate candidate given as a scaled operator word (its GNS vector)."""

    def __init__(
        self,
        target: GeneratorSymbol,
        word,
        functional: MomentFunctional,
        scale: complex = 1.0,
    ):
        self.target = target
        self.side = target.side
        self.word = as_monomial(word)
        self.functional = functional
        self.scale = complex(scale)

    def initial_state(self):
        return self.word

    def extend(self, factor, state):
        return factor * state

    def tau(self, state) -> complex:
        return self.scale * self.functional.tau(state)

    def norm_sq(self) -> float:
        raw = self.functional.tau(self.word.adjoint() * self.word).real
        return float(abs(self.scale) ** 2 * raw)


def _factor_side(f) -> str:
    return f.side


def conj_residual(
    xi,
    eta: CPMap,
    ctx: PresenceContext,
    F: MomentFunctional,
    max_n: int,
    include_coefficient_basis: bool = True,
) -> float:
    """Worst violation of the conjugate-variable moment relations.

    Test words run over the target, the presence generators and, when the
    coefficient algebra is nontrivial, left/right insertions of its matrix
    unit basis.  Words are grown from the right so each candidate state is
    reused across all extensions.
    """
    if max_n > 8:
        raise ValueError("max_n capped at 8")
    target = xi.target
    alphabet: list = [target] + list(ctx.generators())
    if F.dim > 1 and include_coefficient_basis:
        for e in matrix_units(F.dim):
            alphabet.append(Lb(e))
            alphabet.append(Rb(e))
    coeff = Lb if xi.side == LEFT else Rb
    tail_side = xi.side
    worst = 0.0

    def rhs(word: tuple) -> complex:
        total = 0.0 + 0.0j
        n = len(word)
        for k in range(n):
            if word[k] is not target:
                continue
            tail = [m for m in range(k + 1, n) if _factor_side(word[m]) == tail_side]
            tail_set = set(tail)
            inner = eta(F.expect(Monomial([word[m] for m in tail])))
            rest = [word[m] for m in range(n) if m != k and m not in tail_set]
            total += F.tau(Monomial(rest) * coeff(inner))
        return total

    def walk(word: tuple, state, depth: int):
        nonlocal worst
        lhs = xi.tau(state)
        worst = max(worst, abs(lhs - rhs(word)))
        if depth == max_n:
            return
        for f in alphabet:
            walk((f,) + word, xi.extend(f, state), depth + 1)

    walk((), xi.initial_state(), 0)
    return worst


def fisher_info(candidates: Sequence) -> float:
    """Sum of squared state norms; infinite if any candidate is missing."""
    total = 0.0
    for c in candidates:
        if c is None:
            return math.inf
        total += c.norm_sq()
    return total


def solve_conjugate(
    model: FockModel,
    target: GeneratorSymbol,
    eta: CPMap,
    ctx: PresenceContext,
    max_n: int = 4,
    basis_len: int = 3,
):
    """Least-squares conjugate candidate over a truncated word basis.

    Returns the candidate together with its verified residual; the residual
    is reported, never trusted silently.
    """
    F = model.functional()
    alphabet = [target] + list(ctx.generators())
    basis_words = [()]
    frontier = [()]
    for _ in range(basis_len):
        frontier = [w + (f,) for w in frontier for f in alphabet]
        basis_words.extend(frontier)
    basis = [model.vector_of(Monomial(w)) for w in basis_words]

    test_words = [()]
    frontier = [()]
    for _ in range(max_n):
        frontier = [(f,) + w for w in frontier for f in alphabet]
        test_words.extend(frontier)

    coeff = Lb if target.side == LEFT else Rb
    rows, rhs_vec = [], []
    for w in test_words:
        rows.append(
            [
                complex(np.trace(model.apply_word(Monomial(w), v).depth0()))
                / model.dim
                for v in basis
            ]
        )
        total = 0.0 + 0.0j
        n = len(w)
        for k in range(n):
            if w[k] is not target:
                continue
            tail = [m for m in range(k + 1, n) if _factor_side(w[m]) == target.side]
            inner = eta(F.expect(Monomial([w[m] for m in tail])))
            rest = [w[m] for m in range(n) if m != k and m not in set(tail)]
            total += F.tau(Monomial(rest) * coeff(inner))
        rhs_vec.append(total)
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs_vec), rcond=None)
    vec = FockVector(model.dim)
    for c, v in zip(sol, basis):
        vec = vec + v.scaled(c)
    cand = VectorCandidate(target, vec.prune(1e-14), model)
    residual = conj_residual(cand, eta, ctx, F, max_n)
    return cand, residual


# --- matrix lift --------------------------------------------------------------

class MatrixLift:
    """Moment oracle for matrix-coefficient words over a scalar base state.

    Each lifted generator carries a table mapping a matrix position to a
    linear combination of base words; the expectation of a product expands
    as a sum over index chains read in chi-order, evaluating the base state
    on the concatenation in numeric order.  Coefficient insertions from
    either side are one-entry tables, so the same expansion covers them.
    """

    def __init__(self, base: MomentFunctional, d: int = 2):
        if base.dim != 1:
            raise ValueError("base functional must be scalar")
        self.base = base
        self.d = d
        self.tables: dict[GeneratorSymbol, dict] = {}

    def add_symbol(
        self, sym: GeneratorSymbol, table: dict, register_adjoint: bool = True
    ) -> GeneratorSymbol:
        """Register a lifted generator.

        ``table`` maps 1-based ``(i, j)`` to a list of ``(coeff, base_word)``
        with ``base_word`` a tuple of base generators.  The adjoint symbol is
        registered alongside with the conjugate-transposed table.
        """
        clean: dict = {}
        for (i, j), terms in table.items():
            if not (1 <= i <= self.d and 1 <= j <= self.d):
                raise ValueError(f"entry ({i},{j}) outside 1..{self.d}")
            clean[(i, j)] = tuple((complex(c), tuple(w)) for c, w in terms)
        self.tables[sym] = clean
        if register_adjoint:
            adj: dict = {}
            for (i, j), terms in clean.items():
                adj[(j, i)] = tuple(
                    (c.conjugate(), tuple(g.star() for g in reversed(w)))
                    for c, w in terms
                )
            self.tables[sym.star()] = adj
        return sym

    def _entry_options(self, factor, i: int, j: int):
        if isinstance(factor, BCoeff):
            if factor.matrix.shape[0] == 1 and self.d != 1:
                # Scalar coefficient: acts as a multiple of the identity.
                v = complex(factor.matrix[0, 0])
                return ((v, ()),) if (i == j and v != 0) else ()
            v = complex(factor.matrix[i - 1, j - 1])
            return ((v, ()),) if v != 0 else ()
        table = self.tables.get(factor)
        if table is None:
            raise KeyError(f"symbol {factor!r} not registered with this lift")
        return table.get((i, j), ())

    def expect(self, word) -> np.ndarray:
        word = as_monomial(word)
        n = len(word)
        out = np.zeros((self.d, self.d), dtype=complex)
        if n == 0:
            return np.eye(self.d, dtype=complex)
        chi = ChiWord([_factor_side(f) for f in word.factors])
        order = s_chi(chi)  # order[t-1] = position with chi-rank t
        factors = word.factors

        def descend(t: int, chain: list[int]):
            # chain[t] = shared index between chi-rank t and t+1
            if t == n:
                self._accumulate(out, factors, order, chain)
                return
            pos = order[t]
            for a in range(1, self.d + 1):
                if self._entry_options(factors[pos - 1], chain[t], a):
                    descend(t + 1, chain + [a])

        for a0 in range(1, self.d + 1):
            descend(0, [a0])
        return out

    def _accumulate(self, out, factors, order, chain):
        n = len(factors)
        rank_of = {pos: t for t, pos in enumerate(order, start=1)}
        options = []
        for k in range(1, n + 1):
            t = rank_of[k]
            opts = self._entry_options(factors[k - 1], chain[t - 1], chain[t])
            if not opts:
                return
            options.append(opts)
        total = 0.0 + 0.0j

        def expand(k: int, coeff: complex, word_acc: tuple):
            nonlocal total
            if k == n:
                total += coeff * self.base.tau(Monomial(word_acc))
                return
            for c, w in options[k]:
                expand(k + 1, coeff * c, word_acc + w)

        expand(0, 1.0 + 0.0j, ())
        out[chain[0] - 1, chain[-1] - 1] += total

    def functional(self) -> MomentFunctional:
        return MomentFunctional(self.expect, self.d, backing="matrix-lift")

    def scalar_functional(self) -> MomentFunctional:
        def oracle(word):
            return np.array([[trace_d(self.expect(word))]], dtype=complex)

        return MomentFunctional(oracle, 1, backing="matrix-lift")


@dataclass
class LiftedPair:
    """The self-adjoint matrix carriers of a non-self-adjoint pair."""

    lift: MatrixLift
    X: GeneratorSymbol
    Y: GeneratorSymbol

    @property
    def functional(self) -> MomentFunctional:
        return self.lift.functional()

    @property
    def scalar_functional(self) -> MomentFunctional:
        return self.lift.scalar_functional()


def matrix_lift(
    base: MomentFunctional,
    x: GeneratorSymbol,
    y: GeneratorSymbol,
    x_star: GeneratorSymbol | None = None,
    y_star: GeneratorSymbol | None = None,
) -> LiftedPair:
    """Standard off-diagonal 2x2 lift of a left/right pair and its adjoints."""
    if x.side != LEFT or y.side != RIGHT:
        raise ValueError("expected a left generator and a right generator")
    xs = x_star if x_star is not None else x.star()
    ys = y_star if y_star is not None else y.star()
    lift = MatrixLift(base, d=2)
    X = lift.add_symbol(
        GeneratorSymbol("X", LEFT, family="X"),
        {(1, 2): [(1.0, (x,))], (2, 1): [(1.0, (xs,))]},
    )
    Y = lift.add_symbol(
        GeneratorSymbol("Y", RIGHT, family="Y"),
        {(1, 2): [(1.0, (y,))], (2, 1): [(1.0, (ys,))]},
    )
    return LiftedPair(lift, X, Y)


def eta_flip() -> CPMap:
    """CP map on 2x2 matrices swapping the diagonal, in Kraus form."""
    return CPMap([matrix_unit(2, 1, 2), matrix_unit(2, 2, 1)])


# --- alternating adjoint flipping ---------------------------------------------

def _alternating_words(x: GeneratorSymbol, y: GeneratorSymbol, n: int):
    """Pairs of power-flipped alternating words for every side word of length n."""
    for bits in range(1 << n):
        labels = [LEFT if (bits >> k) & 1 else RIGHT for k in range(n)]
        chi = ChiWord(labels)
        order = s_chi(chi)
        p = [False] * n  # adjoint flags, p-pattern
        for rank, pos in enumerate(order, start=1):
            p[pos - 1] = rank % 2 == 0
        word_p, word_q = [], []
        for k in range(n):
            z = x if labels[k] == LEFT else y
            word_p.append(z.star() if p[k] else z)
            word_q.append(z if p[k] else z.star())
        yield chi, Monomial(word_p), Monomial(word_q)


def aaf_check(
    F: MomentFunctional,
    x: GeneratorSymbol,
    y: GeneratorSymbol,
    max_n: int,
    tol: float = 1e-9,
) -> dict:
    """Compare moments under the global 1 <-> * swap along the alternating pattern."""
    if max_n > 8:
        raise ValueError("max_n capped at 8")
    worst = 0.0
    worst_case = None
    tested = 0
    for n in range(2, max_n + 1, 2):
        for chi, wp, wq in _alternating_words(x, y, n):
            diff = abs(F.tau(wp) - F.tau(wq))
            tested += 1
            if diff > worst:
                worst = diff
                worst_case = {"n": n, "chi": str(chi), "discrepancy": diff}
    return {
        "pass": worst <= tol,
        "max_discrepancy": worst,
        "worst_case": worst_case,
        "tested": tested,
        "tolerance": tol,
    }


# --- closed-form laws and entropy ---------------------------------------------

def h_closed_form(t: float, K1: float, K2: float) -> float:
    """Fisher information along the semicircular perturbation, equality case."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if K1 < 0 or K2 <= 0:
        raise ValueError("need K1 >= 0 and K2 > 0")
    denom = K1 + K2 * t
    if denom == 0:
        raise ZeroDivisionError("K1 + K2*t must be positive")
    return K2 * K2 / denom


def entropy_chi_star(
    fisher_of_t: Callable[[float], float],
    K: float,
    K1: float,
    K3: float | None = None,
    t_max: float = 1000.0,
    steps: int = 257,
) -> dict:
    """Entropy integral with a bracketed tail.

    Composite Simpson on a log-spaced grid over [0, t_max] (an even number
    of panels in u = log(1+t)); the tail beyond t_max is bracketed between
    the integrals of the two closed-form Fisher bounds and its midpoint is
    added to the value.  The lower tail bound is finite only when K3 == K,
    which holds in every equality-case experiment.
    """
    if steps % 2 == 0:
        steps += 1
    U = math.log1p(t_max)
    us = np.linspace(0.0, U, steps)
    ts = np.expm1(us)
    integrand = np.empty(steps)
    for i, t in enumerate(ts):
        phi = fisher_of_t(float(t))
        if not math.isfinite(phi):
            raise ValueError(f"Fisher information not finite at t={t!r}: {phi!r}")
        integrand[i] = K / (1.0 + t) - phi
    transformed = integrand * np.exp(us)
    h = us[1] - us[0]
    quad = (h / 3.0) * (
        transformed[0]
        + transformed[-1]
        + 4.0 * transformed[1:-1:2].sum()
        + 2.0 * transformed[2:-2:2].sum()
    )
    tail_hi = K * math.log((K1 / K + t_max) / (1.0 + t_max))
    if K3 is not None and abs(K3 - K) < 1e-12:
        tail_lo = K * math.log(t_max / (1.0 + t_max))
    else:
        tail_lo = -math.inf
    const = 0.5 * K * math.log(2.0 * math.pi * math.e)
    mid_tail = 0.5 * (tail_lo + tail_hi) if math.isfinite(tail_lo) else tail_hi
    value = const + 0.5 * (quad + mid_tail)
    return {
        "value": value,
        "bracket": [const + 0.5 * (quad + tail_lo), const + 0.5 * (quad + tail_hi)],
        "bracket_width": 0.5 * (tail_hi - tail_lo) if math.isfinite(tail_lo) else math.inf,
        "quad": quad,
        "tail": [tail_lo, tail_hi],
        "max_integrand_abs": float(np.max(np.abs(integrand))),
        "nodes": int(steps),
        "t_max": t_max,
        "K": K,
    }


# --- experiments ---------------------------------------------------------------

def circular_fisher_candidates(cp: CircularPairModel):
    """Verified-by-construction conjugate candidates of the circular pair.

    The candidate for each element is the state of its adjoint: the real and
    imaginary parts are variance-1/2 semicircular, whose conjugate variables
    are twice themselves, and the non-self-adjoint recombination lands on
    the adjoint state.
    """
    model = cp.model
    return [
        VectorCandidate(cp.c_l, model.vector_of(Monomial([cp.c_l_star])), model),
        VectorCandidate(cp.c_l_star, model.vector_of(Monomial([cp.c_l])), model),
        VectorCandidate(cp.c_r, model.vector_of(Monomial([cp.c_r_star])), model),
        VectorCandidate(cp.c_r_star, model.vector_of(Monomial([cp.c_r])), model),
    ]


def _circular_contexts(cp: CircularPairModel):
    return [
        PresenceContext((cp.c_l_star,), (cp.c_r, cp.c_r_star)),
        PresenceContext((cp.c_l,), (cp.c_r, cp.c_r_star)),
        PresenceContext((cp.c_l, cp.c_l_star), (cp.c_r_star,)),
        PresenceContext((cp.c_l, cp.c_l_star), (cp.c_r,)),
    ]


def fisher_minimization_experiment(
    max_n: int = 6, tol_resid: float = 1e-9, ratio_tol: float = 1e-6
) -> dict:
    """Equality case of the Fisher minimization law for the circular pair.

    Computes the Fisher information of the circular pair and of its lifted
    self-adjoint carriers, both through explicitly verified conjugate
    candidates, and reports their ratio (expected: exactly 2), plus the
    Cramer-Rao product on the lifted side (expected: exactly K^2 = 4).
    """
    cp = CircularPairModel()
    F = cp.functional
    eta1 = CPMap.identity(1)
    max_resid = 0.0
    cands = circular_fisher_candidates(cp)
    for cand, ctx in zip(cands, _circular_contexts(cp)):
        max_resid = max(max_resid, conj_residual(cand, eta1, ctx, F, max_n))
    lhs = fisher_info(cands)

    pair = matrix_lift(F, cp.c_l, cp.c_r, cp.c_l_star, cp.c_r_star)
    tau2 = pair.scalar_functional
    cx = WordCandidate(pair.X, Monomial([pair.X]), tau2)
    cy = WordCandidate(pair.Y, Monomial([pair.Y]), tau2)
    rx = conj_residual(cx, eta1, PresenceContext((), (pair.Y,)), tau2, max_n)
    ry = conj_residual(cy, eta1, PresenceContext((pair.X,), ()), tau2, max_n)
    max_resid = max(max_resid, rx, ry)
    rhs = fisher_info([cx, cy])

    ratio = lhs / rhs
    tau_sq = (tau2.tau(Monomial([pair.X, pair.X])) + tau2.tau(Monomial([pair.Y, pair.Y]))).real
    cramer_rao = rhs * tau_sq
    ok = abs(ratio - 2.0) <= ratio_tol and max_resid <= tol_resid
    return {
        "lhs": lhs,
        "rhs": rhs,
        "ratio": ratio,
        "pass": bool(ok and abs(cramer_rao - 4.0) <= 1e-6),
        "max_residual": max_resid,
        "cramer_rao_product": cramer_rao,
        "cramer_rao_expected": 4.0,
    }


def semicircular_entropy_experiment(
    t_max: float = 1e5, steps: int = 257, resid_spots: Sequence[float] = (0.0, 1.0, 10.0),
    max_n: int = 6,
) -> dict:
    """Entropy of a standard semicircular element, computed not assumed.

    The Fisher information of the perturbed element is evaluated from a
    verified conjugate candidate at every quadrature node; the integrand
    then vanishes identically and the entropy is (1/2) log(2 pi e), which is
    also the maximum-entropy bound at unit variance.
    """
    model = make_bisemicircular([CPMap.identity(1)] * 2, [])
    s, s2 = model.symbol("S1"), model.symbol("S2")
    eta1 = CPMap.identity(1)

    def perturbed(t: float) -> GeneratorSymbol:
        return model.model.combination_symbol(
            f"u[{t!r}]", LEFT, [(1.0, s), (math.sqrt(t), s2)], family="u"
        )

    def candidate(t: float):
        u = perturbed(t)
        vec = model.model.vector_of(Monomial([u])).scaled(1.0 / (1.0 + t))
        return u, VectorCandidate(u, vec, model.model)

    max_resid = 0.0
    for t in resid_spots:
        u, cand = candidate(t)
        max_resid = max(
            max_resid, conj_residual(cand, eta1, PresenceContext(), model.functional, max_n)
        )

    def fisher_of_t(t: float) -> float:
        _, cand = candidate(t)
        return fisher_info([cand])

    report = entropy_chi_star(fisher_of_t, K=1.0, K1=1.0, K3=1.0, t_max=t_max, steps=steps)
    expected = 0.5 * math.log(2.0 * math.pi * math.e)
    report.update(
        {
            "lhs": report["value"],
            "rhs": expected,
            "ratio": report["value"] / expected,
            "max_residual": max_resid,
            "pass": bool(
                abs(report["value"] - expected) <= max(report["bracket_width"], 1e-10) + 1e-9
                and report["max_integrand_abs"] <= 1e-9
                and max_resid <= 1e-9
            ),
        }
    )
    return report


def circular_entropy_experiment(
    t_max: float = 1e5, steps: int = 257, resid_spots: Sequence[float] = (0.0, 1.0),
    max_n: int = 4,
) -> dict:
    """Equality case of the entropy maximization law for the circular pair.

    Computes the entropy of the pair and of its lifted carriers through
    quadrature of computed Fisher values along circular (respectively
    semicircular) perturbations, and checks the factor-2 relation within the
    quadrature bracket.
    """
    cp = CircularPairModel(n_pairs=2)
    model = cp.model
    (cl, cls, cr, crs), (c2l, c2ls, c2r, c2rs) = cp.pairs
    eta1 = CPMap.identity(1)

    def perturbed_symbols(t: float):
        rt = math.sqrt(t)
        mk = model.combination_symbol
        # Adjoint partners share the bare name so that star() resolves.
        z = mk(f"z[{t!r}]", LEFT, [(1.0, cl), (rt, c2l)], family="z")
        zs = mk(f"z[{t!r}]", LEFT, [(1.0, cls), (rt, c2ls)], family="z", adjoint=True)
        w = mk(f"w[{t!r}]", RIGHT, [(1.0, cr), (rt, c2r)], family="z")
        ws = mk(f"w[{t!r}]", RIGHT, [(1.0, crs), (rt, c2rs)], family="z", adjoint=True)
        return z, zs, w, ws

    def pair_candidates(t: float):
        z, zs, w, ws = perturbed_symbols(t)
        c = 1.0 / (1.0 + t)
        mk = lambda tgt, src: VectorCandidate(
            tgt, model.vector_of(Monomial([src])).scaled(c), model
        )
        cands = [mk(z, zs), mk(zs, z), mk(w, ws), mk(ws, w)]
        ctxs = [
            PresenceContext((zs,), (w, ws)),
            PresenceContext((z,), (w, ws)),
            PresenceContext((z, zs), (ws,)),
            PresenceContext((z, zs), (w,)),
        ]
        return cands, ctxs

    max_resid = 0.0
    F = model.functional()
    for t in resid_spots:
        cands, ctxs = pair_candidates(t)
        for cand, ctx in zip(cands, ctxs):
            max_resid = max(max_resid, conj_residual(cand, eta1, ctx, F, max_n))

    def fisher_pair(t: float) -> float:
        cands, _ = pair_candidates(t)
        return fisher_info(cands)

    pair_report = entropy_chi_star(
        fisher_pair, K=4.0, K1=4.0, K3=4.0, t_max=t_max, steps=steps
    )

    # Lifted side: the perturbed carriers are the lift of the perturbed pair.
    def lifted_candidates(t: float):
        z, zs, w, ws = perturbed_symbols(t)
        pair = matrix_lift(F, z, w, zs, ws)
        tau2 = pair.scalar_functional
        c = 1.0 / (1.0 + t)
        cx = WordCandidate(pair.X, Monomial([pair.X]), tau2, scale=c)
        cy = WordCandidate(pair.Y, Monomial([pair.Y]), tau2, scale=c)
        return pair, tau2, cx, cy

    for t in resid_spots:
        pair, tau2, cx, cy = lifted_candidates(t)
        rx = conj_residual(cx, eta1, PresenceContext((), (pair.Y,)), tau2, max_n)
        ry = conj_residual(cy, eta1, PresenceContext((pair.X,), ()), tau2, max_n)
        max_resid = max(max_resid, rx, ry)

    def fisher_lift(t: float) -> float:
        _, _, cx, cy = lifted_candidates(t)
        return fisher_info([cx, cy])

    lift_report = entropy_chi_star(
        fisher_lift, K=2.0, K1=2.0, K3=2.0, t_max=t_max, steps=steps
    )

    lhs = pair_report["value"]
    rhs_each = lift_report["value"]
    bracket = pair_report["bracket_width"] + 2.0 * lift_report["bracket_width"]
    expected = 2.0 * math.log(2.0 * math.pi * math.e)
    ok = (
        abs(lhs - 2.0 * rhs_each) <= bracket + 1e-9
        and abs(lhs - expected) <= pair_report["bracket_width"] + 1e-9
        and max_resid <= 1e-9
        and pair_report["max_integrand_abs"] <= 1e-9
        and lift_report["max_integrand_abs"] <= 1e-9
    )
    return {
        "lhs": lhs,
        "rhs": 2.0 * rhs_each,
        "ratio": lhs / rhs_each,
        "pass": bool(ok),
        "max_residual": max_resid,
        "bracket_width": bracket,
        "expected": expected,
        "pair_report": pair_report,
        "lift_report": lift_report,
    }
