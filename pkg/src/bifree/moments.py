"""Partition-indexed moments and cumulants of two-faced families.

The value of the moment function at a bi-non-crossing partition is computed
by the recursive interval-stripping reduction: repeatedly locate a run of
positions that is contiguous in the chi-order and a union of blocks, reduce
it to a single coefficient, and splice that coefficient into a neighbouring
operand through the left or right copy of the coefficient algebra.  The
result does not depend on the order in which admissible runs are stripped;
``eval_moment_pi`` accepts an optional random generator that exercises the
alternative orders, which the test-suite uses as a consistency check.

Cumulants are Moebius convolutions of the moment function over the lattice,
and the product-entry expansion relates a cumulant of grouped products to a
sum of ungrouped cumulants over partitions joining with the group interval
partition to the maximum.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .balgebra import maxabs
from .bnc import (
    LEFT,
    BncPartition,
    ChiWord,
    enumerate_bnc,
    lattice_join,
    lattice_leq,
    mobius_bnc,
    one_partition,
    s_chi,
    zero_partition,
)
from .words import Lb, Monomial, MomentFunctional, Rb, as_monomial


def eval_moment_full(F: MomentFunctional, word) -> np.ndarray:
    """Expectation of a plain product (the value at the one-block partition)."""
    return F.expect(word)


def _product(ops: Sequence[Monomial]) -> Monomial:
    out = Monomial.unit()
    for w in ops:
        out = out * w
    return out


def _restrict(labels, blocks, ops, keep: Sequence[int]):
    keep = sorted(keep)
    pos_map = {old: new for new, old in enumerate(keep, start=1)}
    new_labels = tuple(labels[k - 1] for k in keep)
    new_blocks = tuple(
        tuple(pos_map[x] for x in b if x in pos_map)
        for b in blocks
        if any(x in pos_map for x in b)
    )
    new_ops = [ops[k - 1] for k in keep]
    return new_labels, new_blocks, new_ops


def _chi_ranks(labels) -> tuple[list[int], dict[int, int]]:
    """Positions in chi-order, and the rank (1-based) of each position."""
    chi = ChiWord(labels)
    order = list(s_chi(chi))
    rank = {pos: i + 1 for i, pos in enumerate(order)}
    return order, rank


def _is_union_of_blocks(blocks, subset: set[int]) -> bool:
    return all(set(b) <= subset or not (set(b) & subset) for b in blocks)


def _eval_pi(F: MomentFunctional, labels, blocks, ops, shortcut: bool = True) -> np.ndarray:
    """Deterministic reduction (innermost chi-interval first)."""
    n = len(labels)
    if len(blocks) == 1:
        return F.expect(_product(ops))
    if shortcut and F.dim == 1:
        # Over scalar coefficients the value factors completely over blocks.
        out = np.eye(1, dtype=complex)
        for b in blocks:
            out = out * F.expect(_product([ops[k - 1] for k in b]))
        return out
    order, rank = _chi_ranks(labels)
    V = next(b for b in blocks if n in b)
    ranks_V = sorted(rank[x] for x in V)
    if ranks_V[0] == 1 and ranks_V[-1] == n:
        # The block of the last entry spans the whole chi-range: strip the
        # first run of foreign positions between two of its elements.
        rp = min(rank[x] for x in range(1, n + 1) if x not in V)
        rq = min(r for r in ranks_V if r > rp)
        rm = max(r for r in ranks_V if r < rp)
        W = [order[r - 1] for r in range(rp, rq)]
        sub = _eval_pi(F, *_restrict(labels, blocks, ops, W), shortcut=shortcut)
        ops2 = list(ops)
        p = order[rp - 1]
        if labels[p - 1] == LEFT:
            tgt = order[rm - 1]
            ops2[tgt - 1] = ops2[tgt - 1] * Lb(sub)
        else:
            tgt = order[rq - 1]
            ops2[tgt - 1] = ops2[tgt - 1] * Rb(sub)
        comp = [x for x in range(1, n + 1) if x not in set(W)]
        return _eval_pi(F, *_restrict(labels, blocks, ops2, comp), shortcut=shortcut)
    # Otherwise reduce the chi-interval hull of that block first and feed the
    # value to the last surviving operand.
    hull = [order[r - 1] for r in range(ranks_V[0], ranks_V[-1] + 1)]
    sub = _eval_pi(F, *_restrict(labels, blocks, ops, hull), shortcut=shortcut)
    comp = [x for x in range(1, n + 1) if x not in set(hull)]
    q = max(comp)
    ops2 = list(ops)
    ops2[q - 1] = ops2[q - 1] * (Lb(sub) if labels[q - 1] == LEFT else Rb(sub))
    return _eval_pi(F, *_restrict(labels, blocks, ops2, comp), shortcut=shortcut)


def _components(labels, blocks) -> list[list[int]]:
    """Finest splitting into chi-interval unions of blocks, in chi-order."""
    n = len(labels)
    order, rank = _chi_ranks(labels)
    comps, cur, open_blocks = [], [], set()
    last = {id(b): max(rank[x] for x in b) for b in blocks}
    for r, pos in enumerate(order, start=1):
        cur.append(pos)
        b = next(bb for bb in blocks if pos in bb)
        open_blocks.add(id(b))
        if r == last[id(b)]:
            open_blocks.discard(id(b))
        if not open_blocks:
            comps.append(cur)
            cur = []
    return comps


def _eval_pi_random(F, labels, blocks, ops, rng: np.random.Generator) -> np.ndarray:
    """Reduction taking admissible strips in random order (for consistency tests)."""
    n = len(labels)
    if len(blocks) == 1:
        return F.expect(_product(ops))
    order, rank = _chi_ranks(labels)
    moves: list[tuple] = []
    comps = _components(labels, blocks)
    if len(comps) > 1:
        moves.append(("split",))
    for a in range(2, n + 1):
        for b in range(a, n):
            V = [order[r - 1] for r in range(a, b + 1)]
            sV = set(V)
            if n in sV or not _is_union_of_blocks(blocks, sV):
                continue
            moves.append(("strip", a, b, "p"))
            moves.append(("strip", a, b, "q"))
    Vn = next(bb for bb in blocks if n in bb)
    ranks_V = sorted(rank[x] for x in Vn)
    if ranks_V[-1] - ranks_V[0] + 1 < n:
        moves.append(("hull",))
    move = moves[rng.integers(len(moves))]
    if move[0] == "split":
        out = np.eye(F.dim, dtype=complex)
        for comp in comps:
            out = out @ _eval_pi_random(F, *_restrict(labels, blocks, ops, comp), rng)
        return out
    if move[0] == "strip":
        _, a, b, side = move
        V = [order[r - 1] for r in range(a, b + 1)]
        sub = _eval_pi_random(F, *_restrict(labels, blocks, ops, V), rng)
        ops2 = list(ops)
        if side == "p":
            p = order[a - 2]
            if labels[p - 1] == LEFT:
                ops2[p - 1] = ops2[p - 1] * Lb(sub)
            else:
                ops2[p - 1] = Rb(sub) * ops2[p - 1]
        else:
            q = order[b]
            if labels[q - 1] == LEFT:
                ops2[q - 1] = Lb(sub) * ops2[q - 1]
            else:
                ops2[q - 1] = ops2[q - 1] * Rb(sub)
        comp = [x for x in range(1, n + 1) if x not in set(V)]
        return _eval_pi_random(F, *_restrict(labels, blocks, ops2, comp), rng)
    # hull
    hull = [order[r - 1] for r in range(ranks_V[0], ranks_V[-1] + 1)]
    sub = _eval_pi_random(F, *_restrict(labels, blocks, ops, hull), rng)
    comp = [x for x in range(1, n + 1) if x not in set(hull)]
    q = max(comp)
    ops2 = list(ops)
    ops2[q - 1] = ops2[q - 1] * (Lb(sub) if labels[q - 1] == LEFT else Rb(sub))
    return _eval_pi_random(F, *_restrict(labels, blocks, ops2, comp), rng)


def _check_sides(chi: ChiWord, ops: Sequence[Monomial]) -> None:
    # The final slot is exempt: it plays the role of the mixed last entry.
    for k in range(1, chi.n):
        s = ops[k - 1].pure_side()
        if s is not None and s != chi.side(k):
            raise ValueError(
                f"operand {k} has side {s!r} but chi assigns {chi.side(k)!r}"
            )


def eval_moment_pi(
    F: MomentFunctional,
    pi: BncPartition,
    operands: Sequence,
    rng: np.random.Generator | None = None,
    force_full: bool = False,
) -> np.ndarray:
    """Moment function at a bi-non-crossing partition.

    With ``rng`` given, admissible reductions are taken in random order; the
    value must agree with the deterministic one.  ``force_full`` disables the
    scalar product shortcut (used to test it).
    """
    ops = [as_monomial(z) for z in operands]
    if len(ops) != pi.n:
        raise ValueError(f"expected {pi.n} operands, got {len(ops)}")
    _check_sides(pi.chi, ops)
    labels = pi.chi.labels
    if rng is not None:
        return _eval_pi_random(F, labels, pi.blocks, ops, rng)
    return _eval_pi(F, labels, pi.blocks, ops, shortcut=not force_full)


def cumulant_pi(F: MomentFunctional, pi: BncPartition, operands: Sequence) -> np.ndarray:
    """Cumulant at a partition: Moebius convolution of the moment function."""
    ops = [as_monomial(z) for z in operands]
    total = np.zeros((F.dim, F.dim), dtype=complex)
    for sigma in enumerate_bnc(pi.chi):
        if lattice_leq(sigma, pi):
            mu = mobius_bnc(sigma, pi)
            if mu:
                total += mu * eval_moment_pi(F, sigma, ops)
    return total


def cumulant_chi(F: MomentFunctional, chi: ChiWord, operands: Sequence) -> np.ndarray:
    """Top cumulant over the full word."""
    return cumulant_pi(F, one_partition(chi), operands)


def moments_from_cumulants(
    kappa_table: Mapping[BncPartition, np.ndarray], pi: BncPartition
) -> np.ndarray:
    """Moment value from a complete cumulant table on the interval below pi."""
    total = None
    for sigma in enumerate_bnc(pi.chi):
        if lattice_leq(sigma, pi):
            try:
                v = kappa_table[sigma]
            except KeyError:
                raise ValueError(f"cumulant table missing entry for {sigma!r}")
            total = np.asarray(v, dtype=complex) if total is None else total + v
    return total


def cumulants_from_moments(
    moment_table: Mapping[BncPartition, np.ndarray], pi: BncPartition
) -> np.ndarray:
    """Cumulant value from a complete moment table on the interval below pi."""
    total = None
    for sigma in enumerate_bnc(pi.chi):
        if lattice_leq(sigma, pi):
            try:
                v = moment_table[sigma]
            except KeyError:
                raise ValueError(f"moment table missing entry for {sigma!r}")
            term = mobius_bnc(sigma, pi) * np.asarray(v, dtype=complex)
            total = term if total is None else total + term
    return total


# --- product-entry expansion -------------------------------------------------

def group_offsets(group_sizes: Sequence[int]) -> list[tuple[int, int]]:
    """Half-open 1-based position ranges of each group."""
    out, start = [], 1
    for size in group_sizes:
        if size < 1:
            raise ValueError("group sizes must be >= 1")
        out.append((start, start + size))
        start += size
    return out


def chi_of_groups(chi_hat: ChiWord, group_sizes: Sequence[int]) -> ChiWord:
    """Side word of the grouped tuple; the final group may mix sides."""
    ranges = group_offsets(group_sizes)
    if ranges[-1][1] - 1 != chi_hat.n:
        raise ValueError("group sizes do not sum to the word length")
    m = len(group_sizes)
    labels = []
    for p, (a, b) in enumerate(ranges, start=1):
        sides = {chi_hat.side(k) for k in range(a, b)}
        if p < m and len(sides) > 1:
            raise ValueError(f"non-final group {p} mixes sides {sides}")
        labels.append(chi_hat.side(b - 1))
    return ChiWord(labels)


def hat_embed(pi: BncPartition, group_sizes: Sequence[int], chi_hat: ChiWord) -> BncPartition:
    """Embed a partition of the grouped tuple by blowing each point up to its group.

    Order- and Moebius-preserving; requires the expanded word to be constant
    on every non-final group and to match the group word there.
    """
    if pi.n != len(group_sizes):
        raise ValueError("group count does not match the partition size")
    ranges = group_offsets(group_sizes)
    if ranges[-1][1] - 1 != chi_hat.n:
        raise ValueError("group sizes do not sum to the expanded word length")
    grouped_chi = chi_of_groups(chi_hat, group_sizes)  # validates constancy
    for p in range(1, pi.n):
        if grouped_chi.side(p) != pi.chi.side(p):
            raise ValueError(
                f"group {p} has side {grouped_chi.side(p)!r} but the base word says "
                f"{pi.chi.side(p)!r}"
            )
    blocks = []
    for blk in pi.blocks:
        big = []
        for p in blk:
            a, b = ranges[p - 1]
            big.extend(range(a, b))
        blocks.append(tuple(big))
    return BncPartition(blocks, chi_hat)


def product_cumulant_expand(
    F: MomentFunctional,
    chi_hat: ChiWord,
    group_sizes: Sequence[int],
    operands: Sequence,
) -> dict:
    """Both sides of the product-entry cumulant expansion.

    The grouped top cumulant must equal the sum of ungrouped cumulants over
    partitions whose join with the embedded minimum is the maximum.
    """
    ops = [as_monomial(z) for z in operands]
    if len(ops) != chi_hat.n:
        raise ValueError("operand count does not match the expanded word")
    _check_sides(chi_hat, ops)
    chi_m = chi_of_groups(chi_hat, group_sizes)
    grouped = [
        _product([ops[k - 1] for k in range(a, b)])
        for a, b in group_offsets(group_sizes)
    ]
    lhs = cumulant_pi(F, one_partition(chi_m), grouped)
    zero_hat = hat_embed(zero_partition(chi_m), group_sizes, chi_hat)
    top = one_partition(chi_hat)
    rhs = np.zeros_like(lhs)
    for sigma in enumerate_bnc(chi_hat):
        if lattice_join(sigma, zero_hat) == top:
            rhs += cumulant_pi(F, sigma, ops)
    return {"lhs": lhs, "rhs": rhs, "residual": maxabs(lhs - rhs)}


# --- vanishing of mixed cumulants --------------------------------------------

def bifree_test(
    F: MomentFunctional,
    symbols: Sequence,
    max_order: int,
    tol: float = 1e-9,
    families: Mapping | None = None,
) -> dict:
    """Scan all mixed cumulants up to an order and report the largest one.

    Words run over all sequences of the given generators whose family map is
    non-constant; the side word is forced by the generators.  The report
    carries the worst offenders, which for a genuinely correlated family
    exhibit the planted covariance at order two.
    """
    if max_order > 8:
        raise ValueError("max_order capped at 8")
    syms = list(symbols)
    fam = dict(families) if families is not None else {s: s.family for s in syms}
    for s in syms:
        if s not in fam:
            raise ValueError(f"symbol {s!r} has no family assignment")
    if len({fam[s] for s in syms}) < 2:
        return {
            "pass": True,
            "vacuous": True,
            "max_residual": 0.0,
            "tested": 0,
            "tolerance": tol,
            "max_order": max_order,
            "violations": [],
        }
    tested = 0
    worst = 0.0
    worst_word = None
    violations = []
    for n in range(2, max_order + 1):
        for word in _words_of_length(syms, n):
            if len({fam[s] for s in word}) < 2:
                continue
            chi = ChiWord(s.side for s in word)
            if F.dim == 1:
                r = abs(_scalar_top_cumulant(F, word, chi))
            else:
                val = cumulant_pi(F, one_partition(chi), [Monomial([s]) for s in word])
                r = maxabs(val)
            tested += 1
            if r > worst:
                worst = r
                worst_word = [s.display for s in word]
            if r > tol:
                violations.append(
                    {
                        "order": n,
                        "word": [s.display for s in word],
                        "families": [fam[s] for s in word],
                        "residual": r,
                    }
                )
    violations.sort(key=lambda v: -v["residual"])
    return {
        "pass": not violations,
        "vacuous": False,
        "max_residual": worst,
        "worst_word": worst_word,
        "tested": tested,
        "tolerance": tol,
        "max_order": max_order,
        "violations": violations[:10],
        "violation_count": len(violations),
    }


def _words_of_length(syms, n):
    if n == 0:
        yield ()
        return
    for rest in _words_of_length(syms, n - 1):
        for s in syms:
            yield rest + (s,)


_MU_TOP_CACHE: dict[ChiWord, tuple] = {}


def _mu_top_table(chi: ChiWord):
    tab = _MU_TOP_CACHE.get(chi)
    if tab is None:
        top = one_partition(chi)
        tab = tuple(
            (sigma.blocks, mobius_bnc(sigma, top)) for sigma in enumerate_bnc(chi)
        )
        _MU_TOP_CACHE[chi] = tab
    return tab


def _scalar_top_cumulant(F: MomentFunctional, word, chi: ChiWord) -> complex:
    """Top cumulant of a word of generators over scalar coefficients.

    Uses the complete block factorization of scalar moment functions, with
    the subword expectations cached per position subset.
    """
    phi_cache: dict[tuple, complex] = {}

    def phi(block: tuple) -> complex:
        v = phi_cache.get(block)
        if v is None:
            v = complex(F.expect(Monomial([word[k - 1] for k in block]))[0, 0])
            phi_cache[block] = v
        return v

    total = 0.0 + 0.0j
    for blocks, mu in _mu_top_table(chi):
        term = mu
        for b in blocks:
            term *= phi(b)
            if term == 0:
                break
        total += term
    return total
