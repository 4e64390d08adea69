"""Intersection of two ascending integer lists via the notional 2D array.

The notional array has entry(x, y) = L[x] - M[m-1-y] (0-based), which is
ascending along rows and columns; a zero entry is a common value of the two
lists.  Runs of duplicates turn single zeros into a contiguous rectangle of
zeros, so the split-step divider is made block-aware: a binary search that
hits a zero refines to a block corner before splitting, guaranteeing the
block is never divided across children.  Every candidate match is classically
verified in both lists before being returned, so false positives cannot
occur.

The multi-block driver reduces many blocks to (probably) one by chunked
subsampling: round k samples one element per chunk of size 2^k from each
list.  The whole round schedule is repeated a small constant number of times
to lift the paper-level constant success probability over the 2/3 gate.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .concrete_search import (
    Sorted2DDivider,
    _binary_search,
    _boundary_search,
    _rect_dims,
    quantum_2d_search,
)
from .errors import ConditionViolation, PromiseViolation, UnsortedInput
from .oracles import QueryLedger

SCHEDULE_REPETITIONS = 3


def _require_ascending(name: str, values) -> tuple[int, ...]:
    values = tuple(values)
    for i in range(len(values) - 1):
        if values[i] > values[i + 1]:
            raise UnsortedInput(f"list {name} is not ascending at position {i}")
    return values


def merge_intersect_baseline(L, M):
    """Two-pointer scan; the ground-truth oracle.  Smallest common value or None."""
    L = _require_ascending("L", L)
    M = _require_ascending("M", M)
    i = j = 0
    while i < len(L) and j < len(M):
        if L[i] == M[j]:
            return L[i]
        if L[i] < M[j]:
            i += 1
        else:
            j += 1
    return None


@dataclass(frozen=True)
class NotionalArray:
    """The never-materialized difference array of two ascending lists."""

    L: tuple[int, ...]
    M: tuple[int, ...]

    @property
    def rows(self) -> int:
        return len(self.L)

    @property
    def cols(self) -> int:
        return len(self.M)

    def entry(self, i: int, j: int) -> int:
        return self.L[i] - self.M[len(self.M) - 1 - j]

    def materialize(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]


def _runs(values: tuple[int, ...]) -> dict[int, tuple[int, int]]:
    """value -> (first index, last index) of its run in an ascending list."""
    runs: dict[int, tuple[int, int]] = {}
    for idx, v in enumerate(values):
        if v in runs:
            runs[v] = (runs[v][0], idx)
        else:
            runs[v] = (idx, idx)
    return runs


def zero_blocks(L, M) -> list[tuple[int, int, int, int]]:
    """Zero rectangles of the notional array as (r0, r1, c0, c1), half-open."""
    L = tuple(L)
    M = tuple(M)
    m = len(M)
    l_runs = _runs(L)
    m_runs = _runs(M)
    blocks = []
    for value, (li, lj) in l_runs.items():
        if value in m_runs:
            mi, mj = m_runs[value]
            blocks.append((li, lj + 1, m - 1 - mj, m - 1 - mi + 1))
    blocks.sort()
    return blocks


class ZeroBlockDivider(Sorted2DDivider):
    """Split-step divider over the notional array, aware of zero blocks.

    Probing one entry costs one query to each list, hence probe_cost=2.  A
    hit during a central-line search is refined to a block corner (first zero
    for row searches, last zero for column searches) with O(log) extra
    probes, and the divider checks that no child beyond the retained corner
    cell still holds zeros.
    """

    def __init__(self, notional: NotionalArray, eps=Fraction(1, 4)):
        self._blocks = zero_blocks(notional.L, notional.M)
        super().__init__(notional, target=0, eps=eps, probe_cost=2)

    def _locate(self):
        self._target_cell = None
        if self._blocks:
            r0, _r1, c0, _c1 = self._blocks[0]
            self._target_cell = (r0, c0)

    def _rect_contains(self, rect) -> bool:
        return any(self._intersects(rect, b) for b in self._blocks)

    @staticmethod
    def _intersects(rect, block) -> bool:
        r0, r1, c0, c1 = rect
        b0, b1, bc0, bc1 = block
        return max(r0, b0) < min(r1, b1) and max(c0, bc0) < min(c1, bc1)

    def _hit_children(self, rect, cell, axis, line):
        r0, r1, c0, c1 = rect
        extra = 0
        i, j = cell
        if axis == "col":
            # last zero down the column, then last zero along that row:
            # refine to the block's bottom-right corner
            pos, probes = _boundary_search(
                lambda p: self._peek(r0 + p, line), i - r0, r1 - r0,
                lambda v: v <= 0,
            )
            extra += probes
            i = r0 + pos - 1
            pos, probes = _boundary_search(
                lambda p: self._peek(i, c0 + p), j - c0, c1 - c0,
                lambda v: v <= 0,
            )
            extra += probes
            j = c0 + pos - 1
        else:
            # first zero along the row, then first zero up the column:
            # refine to the block's top-left corner
            pos, probes = _boundary_search(
                lambda p: self._peek(line, c0 + p), 0, j - c0 + 1,
                lambda v: v < 0,
            )
            extra += probes
            j = c0 + pos
            pos, probes = _boundary_search(
                lambda p: self._peek(r0 + p, j), 0, i - r0 + 1,
                lambda v: v < 0,
            )
            extra += probes
            i = r0 + pos
        upper = (r0, i, j + 1, c1)
        lower = (i + 1, r1, c0, j)
        ua = _rect_dims(upper)
        la = _rect_dims(lower)
        other = upper if ua[0] * ua[1] >= la[0] * la[1] else lower
        return ((i, i + 1, j, j + 1), other), extra

    def _check_parts(self, parts):
        holding = sum(1 for part in parts if self.contains_target(part))
        if holding > 1:
            raise PromiseViolation("zero block split across children")


@dataclass(frozen=True)
class IntersectMatch:
    value: int
    index_L: int
    index_M: int


@dataclass
class IntersectResult:
    match: IntersectMatch | None
    round: int
    queries_L: int
    queries_M: int


def _verified_match(L, M, value, ledger: QueryLedger) -> IntersectMatch | None:
    """Classically confirm a candidate value in both lists via binary search."""
    hit_l, _, probes_l = _binary_search(lambda p: L[p], len(L), value)
    hit_m, _, probes_m = _binary_search(lambda p: M[p], len(M), value)
    ledger.add_classical(probes_l, "intersect-verify-L")
    ledger.add_classical(probes_m, "intersect-verify-M")
    if hit_l is None or hit_m is None:
        return None
    return IntersectMatch(value=value, index_L=hit_l, index_M=hit_m)


def single_block_search(
    L,
    M,
    *,
    seed: int | None = None,
    rng: random.Random | None = None,
    ledger: QueryLedger | None = None,
    force_success: bool = False,
) -> IntersectMatch | None:
    """Find the match of two ascending lists holding at most one zero block.

    Runs the quantum 2D search over the notional array with the block-aware
    splitter.  Raises PromiseViolation when a split detects a divided block
    (which implies more than one block existed).
    """
    L = _require_ascending("L", L)
    M = _require_ascending("M", M)
    if not L or not M:
        return None
    if rng is None:
        rng = random.Random(seed)
    if ledger is None:
        ledger = QueryLedger()
    notional = NotionalArray(L=L, M=M)
    divider = ZeroBlockDivider(notional)
    cell, _report = quantum_2d_search(
        notional, 0,
        rng=rng, ledger=ledger, force_success=force_success,
        divider=divider, label="intersect-single",
    )
    if cell is None:
        return None
    ledger.add_classical(1, "intersect-read")
    value = L[cell[0]]
    return _verified_match(L, M, value, ledger)


def subsample_lists(values: tuple[int, ...], chunk_log: int, rng: random.Random):
    """One uniformly random element per chunk of size 2^chunk_log.

    Returns (subsampled values, original indices); a final short chunk still
    contributes one element.
    """
    size = 1 << chunk_log
    picks = []
    for start in range(0, len(values), size):
        end = min(start + size, len(values))
        picks.append(rng.randrange(start, end))
    return tuple(values[i] for i in picks), tuple(picks)


def multi_block_intersect(
    L,
    M,
    *,
    seed: int = 0,
    ledger: QueryLedger | None = None,
) -> IntersectResult:
    """Find a common value of two ascending lists, any number of matches.

    Round 0 runs the single-block search on the full lists; round k >= 1
    subsamples one element per chunk of size 2^k from each list and retries.
    A round that trips the single-block promise counts as a failure.  The
    schedule is repeated SCHEDULE_REPETITIONS times; candidates are verified
    in both original lists before being returned.
    """
    L = _require_ascending("L", L)
    M = _require_ascending("M", M)
    if ledger is None:
        ledger = QueryLedger()
    rng = random.Random(seed)
    longest = max(len(L), len(M), 1)
    max_round = max(1, math.ceil(math.log2(longest)))

    def list_queries() -> int:
        quantum = sum(
            count for key, count in ledger.breakdown.items()
            if key.startswith("quantum:intersect")
        )
        classical = sum(
            count for key, count in ledger.breakdown.items()
            if key.startswith("classical:intersect")
        )
        return quantum + classical

    for _ in range(SCHEDULE_REPETITIONS):
        for round_k in range(0, max_round + 1):
            if round_k == 0:
                sub_l, idx_l = L, tuple(range(len(L)))
                sub_m, idx_m = M, tuple(range(len(M)))
            else:
                sub_l, idx_l = subsample_lists(L, round_k, rng)
                sub_m, idx_m = subsample_lists(M, round_k, rng)
            sub_rng = random.Random(rng.getrandbits(64))
            try:
                match = single_block_search(
                    sub_l, sub_m, rng=sub_rng, ledger=ledger
                )
            except (PromiseViolation, ConditionViolation):
                continue
            if match is None:
                continue
            confirmed = _verified_match(L, M, match.value, ledger)
            if confirmed is not None:
                total = list_queries()
                return IntersectResult(
                    match=confirmed,
                    round=round_k,
                    queries_L=total // 2,
                    queries_M=total // 2,
                )
    total = list_queries()
    return IntersectResult(
        match=None, round=max_round, queries_L=total // 2, queries_M=total // 2
    )
