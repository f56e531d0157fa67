"""Lattice of bi-non-crossing set partitions.

A word ``chi`` over the side tags ``l``/``r`` assigns each of the positions
``1..n`` to the left or the right line of a two-line diagram.  Reading the
left positions top-down and then the right positions bottom-up gives a
permutation of ``1..n``; a partition is bi-non-crossing when it becomes an
ordinary non-crossing partition after that relabelling.  This module holds
the word type, the partition type, enumeration, the refinement lattice and
its integer Moebius function.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

LEFT = "l"
RIGHT = "r"

#: Largest word length accepted by the enumerative routines.  Catalan(12)
#: is ~2e5 partitions; anything beyond that is a usage error at desk scale.
MAX_ENUM_N = 12

Block = tuple[int, ...]
Blocks = tuple[Block, ...]


class LatticeConsistencyError(RuntimeError):
    """A lattice operation produced a result outside the expected sublattice."""


class ChiWord:
    """Immutable word of side tags, positions 1-based."""

    __slots__ = ("labels",)

    def __init__(self, labels: Iterable[str]):
        labels = tuple(str(x).lower() for x in labels)
        if not labels:
            raise ValueError("chi word must have length >= 1")
        for x in labels:
            if x not in (LEFT, RIGHT):
                raise ValueError(f"side tag must be {LEFT!r} or {RIGHT!r}, got {x!r}")
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("ChiWord is immutable")

    @classmethod
    def from_string(cls, s: str) -> "ChiWord":
        return cls(s)

    @property
    def n(self) -> int:
        return len(self.labels)

    def side(self, k: int) -> str:
        """Side tag at 1-based position ``k``."""
        if not 1 <= k <= self.n:
            raise IndexError(f"position {k} out of range 1..{self.n}")
        return self.labels[k - 1]

    def left_positions(self) -> tuple[int, ...]:
        return tuple(k for k in range(1, self.n + 1) if self.labels[k - 1] == LEFT)

    def right_positions(self) -> tuple[int, ...]:
        return tuple(k for k in range(1, self.n + 1) if self.labels[k - 1] == RIGHT)

    def restrict(self, positions: Sequence[int]) -> "ChiWord":
        """Induced word on a subset of positions (kept in numeric order)."""
        return ChiWord(self.labels[k - 1] for k in sorted(positions))

    def __eq__(self, other):
        return isinstance(other, ChiWord) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"ChiWord({''.join(self.labels)!r})"

    def __str__(self):
        return "".join(self.labels)


def s_chi(chi: ChiWord) -> tuple[int, ...]:
    """Permutation induced by ``chi``: lefts increasing, then rights decreasing.

    Entry ``k-1`` of the result is the position visited k-th.
    """
    lefts = chi.left_positions()
    rights = chi.right_positions()
    return lefts + rights[::-1]


def s_chi_inverse(chi: ChiWord) -> tuple[int, ...]:
    """Inverse permutation: entry ``i-1`` is the visiting rank of position ``i``."""
    s = s_chi(chi)
    inv = [0] * chi.n
    for rank, pos in enumerate(s, start=1):
        inv[pos - 1] = rank
    return tuple(inv)


def chi_less(i: int, j: int, chi: ChiWord) -> bool:
    """Total order induced by ``chi``: i precedes j iff its visiting rank is lower."""
    if i == j:
        raise ValueError("chi-order comparison requires distinct positions")
    inv = s_chi_inverse(chi)
    return inv[i - 1] < inv[j - 1]


def _canonical_blocks(blocks: Iterable[Iterable[int]]) -> Blocks:
    canon = tuple(sorted((tuple(sorted(set(b))) for b in blocks), key=lambda b: b[0]))
    return canon


def _check_partition(blocks: Blocks, n: int) -> None:
    seen: set[int] = set()
    for b in blocks:
        if not b:
            raise ValueError("empty block")
        for x in b:
            if not 1 <= x <= n:
                raise ValueError(f"element {x} outside 1..{n}")
            if x in seen:
                raise ValueError(f"element {x} appears in two blocks")
            seen.add(x)
    if len(seen) != n:
        raise ValueError(f"blocks cover {len(seen)} of {n} elements")


def _is_noncrossing(blocks: Blocks, n: int) -> bool:
    # Linear scan with a stack of open blocks; a block may only be continued
    # while it sits on top of the stack.
    block_of = {}
    last = {}
    for bi, b in enumerate(blocks):
        for x in b:
            block_of[x] = bi
            last[bi] = max(b)
    stack: list[int] = []
    on_stack: set[int] = set()
    for x in range(1, n + 1):
        bi = block_of[x]
        if bi in on_stack:
            if stack[-1] != bi:
                return False
        else:
            stack.append(bi)
            on_stack.add(bi)
        if x == last[bi]:
            stack.pop()
            on_stack.discard(bi)
    return True


def is_bnc(blocks: Iterable[Iterable[int]], chi: ChiWord) -> bool:
    """True iff the raw partition is bi-non-crossing with respect to ``chi``."""
    canon = _canonical_blocks(blocks)
    _check_partition(canon, chi.n)
    inv = s_chi_inverse(chi)
    relabeled = _canonical_blocks(tuple(inv[x - 1] for x in b) for b in canon)
    return _is_noncrossing(relabeled, chi.n)


class BncPartition:
    """A partition of ``{1..n}`` that is bi-non-crossing for its chi word."""

    __slots__ = ("chi", "blocks")

    def __init__(self, blocks: Iterable[Iterable[int]], chi: ChiWord):
        canon = _canonical_blocks(blocks)
        _check_partition(canon, chi.n)
        if not is_bnc(canon, chi):
            raise ValueError(f"partition {canon} is not bi-non-crossing for chi={chi}")
        object.__setattr__(self, "blocks", canon)
        object.__setattr__(self, "chi", chi)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("BncPartition is immutable")

    @property
    def n(self) -> int:
        return self.chi.n

    def block_of(self, k: int) -> Block:
        for b in self.blocks:
            if k in b:
                return b
        raise KeyError(k)

    def relabel_nc(self) -> Blocks:
        """The partition in the chi-ordered picture (an NC partition of 1..n)."""
        inv = s_chi_inverse(self.chi)
        return _canonical_blocks(tuple(inv[x - 1] for x in b) for b in self.blocks)

    def __eq__(self, other):
        return (
            isinstance(other, BncPartition)
            and self.chi == other.chi
            and self.blocks == other.blocks
        )

    def __hash__(self):
        return hash((self.chi, self.blocks))

    def __repr__(self):
        return f"BncPartition({list(map(list, self.blocks))}, chi={self.chi})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "chi": str(self.chi),
            "blocks": [list(b) for b in self.blocks],
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> "BncPartition":
        if isinstance(obj, str):
            obj = json.loads(obj)
        chi = ChiWord.from_string(obj["chi"])
        return cls(obj["blocks"], chi)


def zero_partition(chi: ChiWord) -> BncPartition:
    return BncPartition([(k,) for k in range(1, chi.n + 1)], chi)


def one_partition(chi: ChiWord) -> BncPartition:
    return BncPartition([tuple(range(1, chi.n + 1))], chi)


def _nc_blocks(elems: tuple[int, ...]) -> Iterator[Blocks]:
    """All non-crossing partitions of a sorted tuple, in a fixed canonical order.

    The block of the smallest element is chosen as an arbitrary subset; the
    remaining elements split into the gaps between its entries, and each gap
    is partitioned independently.  Every choice is valid and each partition
    arises exactly once, so the count is a Catalan number.
    """
    if not elems:
        yield ()
        return
    first, rest = elems[0], elems[1:]
    m = len(rest)
    for mask in range(1 << m):
        chosen = []
        left_out = []
        for i in range(m):
            (chosen if (mask >> i) & 1 else left_out).append(rest[i])
        block = (first, *chosen)
        # Gap t collects the left-out elements between block[t] and block[t+1]
        # (the last gap is unbounded above).
        gaps: list[list[int]] = [[] for _ in range(len(block))]
        for e in left_out:
            gaps[bisect_right(block, e) - 1].append(e)
        yield from _cross_gaps(block, gaps, 0, ())


def _cross_gaps(block: Block, gaps: list[list[int]], gi: int, acc: Blocks) -> Iterator[Blocks]:
    if gi == len(gaps):
        yield (block,) + acc
        return
    for sub in _nc_blocks(tuple(gaps[gi])):
        yield from _cross_gaps(block, gaps, gi + 1, acc + sub)


@lru_cache(maxsize=16)
def _nc_all(n: int) -> tuple[Blocks, ...]:
    return tuple(_canonical_blocks(p) for p in _nc_blocks(tuple(range(1, n + 1))))


def enumerate_nc(n: int) -> tuple[Blocks, ...]:
    """All non-crossing partitions of ``{1..n}`` in canonical order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_ENUM_N:
        raise ValueError(f"n={n} exceeds enumeration bound {MAX_ENUM_N}")
    return _nc_all(n)


@lru_cache(maxsize=256)
def _bnc_all(chi: ChiWord) -> tuple[BncPartition, ...]:
    s = s_chi(chi)
    out = []
    for sigma in _nc_all(chi.n):
        blocks = tuple(tuple(s[x - 1] for x in b) for b in sigma)
        out.append(BncPartition(blocks, chi))
    return tuple(out)


def enumerate_bnc(chi: ChiWord) -> tuple[BncPartition, ...]:
    """All bi-non-crossing partitions for ``chi``; count is Catalan(n)."""
    if chi.n > MAX_ENUM_N:
        raise ValueError(f"n={chi.n} exceeds enumeration bound {MAX_ENUM_N}")
    return _bnc_all(chi)


def _require_same_chi(sigma: BncPartition, pi: BncPartition) -> None:
    if sigma.chi != pi.chi:
        raise ValueError("partitions live over different chi words")


def lattice_leq(sigma: BncPartition, pi: BncPartition) -> bool:
    """Refinement order: every block of sigma is contained in a block of pi."""
    _require_same_chi(sigma, pi)
    return _blocks_leq(sigma.blocks, pi.blocks)


def _blocks_leq(fine: Blocks, coarse: Blocks) -> bool:
    owner = {}
    for bi, b in enumerate(coarse):
        for x in b:
            owner[x] = bi
    for b in fine:
        it = iter(b)
        first = owner[next(it)]
        if any(owner[x] != first for x in it):
            return False
    return True


def lattice_meet(sigma: BncPartition, pi: BncPartition) -> BncPartition:
    """Common refinement (pairwise block intersections)."""
    _require_same_chi(sigma, pi)
    blocks = []
    for a in sigma.blocks:
        sa = set(a)
        for b in pi.blocks:
            inter = sa.intersection(b)
            if inter:
                blocks.append(tuple(sorted(inter)))
    return BncPartition(blocks, sigma.chi)


def lattice_join(sigma: BncPartition, pi: BncPartition) -> BncPartition:
    """Join computed in the full partition lattice, then verified to be BNC.

    BNC(chi) is a lattice, so joining two of its members in P(n) cannot leave
    it; if that verification ever fails we raise instead of coarsening.
    """
    _require_same_chi(sigma, pi)
    parent = list(range(sigma.n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for b in list(sigma.blocks) + list(pi.blocks):
        for x in b[1:]:
            union(b[0], x)
    groups: dict[int, list[int]] = {}
    for x in range(1, sigma.n + 1):
        groups.setdefault(find(x), []).append(x)
    blocks = [tuple(sorted(g)) for g in groups.values()]
    try:
        return BncPartition(blocks, sigma.chi)
    except ValueError as exc:  # pragma: no cover - would indicate a real bug
        raise LatticeConsistencyError(
            f"join of BNC partitions left BNC(chi): {blocks}"
        ) from exc


# --- Moebius function -------------------------------------------------------

_NC_INDEX_CACHE: dict[int, dict[Blocks, int]] = {}


def _nc_index(n: int) -> dict[Blocks, int]:
    idx = _NC_INDEX_CACHE.get(n)
    if idx is None:
        idx = {p: i for i, p in enumerate(_nc_all(n))}
        _NC_INDEX_CACHE[n] = idx
    return idx


@lru_cache(maxsize=None)
def _nc_leq_matrix(n: int) -> tuple[tuple[bool, ...], ...]:
    ps = _nc_all(n)
    return tuple(
        tuple(_blocks_leq(a, b) for b in ps) for a in ps
    )


@lru_cache(maxsize=None)
def _mobius_nc_idx(i: int, j: int, n: int) -> int:
    # mu(sigma_i, pi_j) on NC(n) via the defining recursion
    # sum_{sigma <= tau <= pi} mu(tau, pi) = [sigma == pi].
    if i == j:
        return 1
    leq = _nc_leq_matrix(n)
    if not leq[i][j]:
        return 0
    total = 0
    for t in range(len(leq)):
        if t != i and leq[i][t] and leq[t][j]:
            total += _mobius_nc_idx(t, j, n)
    return -total


def mobius_nc(sigma: Blocks, pi: Blocks, n: int) -> int:
    """Moebius function of the non-crossing partition lattice (exact integer)."""
    idx = _nc_index(n)
    a = _canonical_blocks(sigma)
    b = _canonical_blocks(pi)
    if a not in idx or b not in idx:
        raise ValueError("argument is not a non-crossing partition")
    return _mobius_nc_idx(idx[a], idx[b], n)


def mobius_bnc(sigma: BncPartition, pi: BncPartition) -> int:
    """Moebius function of BNC(chi).

    Values are shared across chi words of equal length through the relabelled
    non-crossing picture, and are exact integers.  The memo behind it is an
    interpreter-lock-guarded cache: concurrent reads are safe, misses are
    serialized.
    """
    _require_same_chi(sigma, pi)
    if not lattice_leq(sigma, pi):
        return 0
    return mobius_nc(sigma.relabel_nc(), pi.relabel_nc(), sigma.n)


def catalan(n: int) -> int:
    """The n-th Catalan number (Catalan(0) = 1)."""
    c = 1
    for i in range(n):
        c = c * 2 * (2 * i + 1) // (i + 2)
    return c
