"""Concrete-model search algorithms.

Covers the Dilworth-decomposition nested searches, the recursive classical
search of a row/column-sorted 2D array, its quantum counterpart driven by the
recursive amplified-search engine, and the d-dimensional nesting.

2D split conventions: the central row/column index is ceil(dim/2) (1-based);
a binary search of the central line returns the straddle pair, with the lower
endpoint possibly virtual at the boundary.  When the binary search hits the
target during a split, the non-returning variant retains the hit cell as a
one-cell child and keeps the larger leftover corner as its sibling, so the
target sits in exactly one child.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .arrays import Array2DOracle, NdSortedArray, SortedArray2D
from .errors import RangeError, SizeError
from .oracles import ConcreteSession, QueryLedger
from .poset import dilworth_decomposition
from .qsim import (
    OraclePredicate,
    _amplified_descend,
    bbht_search,
    exact_grover,
    grover_iterations,
    recursion_alpha,
    recursion_delta,
)


def _binary_search(probe, length: int, target: int):
    """Binary search over probe(0..length-1) ascending.

    Returns (hit_position | None, first_geq_position, probe_count); the
    straddle is (first_geq - 1, first_geq), with -1 virtual at the boundary.
    """
    lo, hi = 0, length
    probes = 0
    while lo < hi:
        mid = (lo + hi) // 2
        value = probe(mid)
        probes += 1
        if value == target:
            return mid, mid, probes
        if value < target:
            lo = mid + 1
        else:
            hi = mid
    return None, lo, probes


def _boundary_search(probe, lo: int, hi: int, below) -> int:
    """First position in [lo, hi) where ``below(probe(pos))`` is False.

    Assumes the predicate is monotone (True prefix).  Used to locate the
    first/last zero of a line that is known to contain one.
    """
    probes = 0
    while lo < hi:
        mid = (lo + hi) // 2
        probes += 1
        if below(probe(mid)):
            lo = mid + 1
        else:
            hi = mid
    return lo, probes


# ---------------------------------------------------------------------------
# Dilworth nested search
# ---------------------------------------------------------------------------


def dilworth_search_classical(session: ConcreteSession) -> int | None:
    """Search each chain of a Dilworth cover in turn with binary search."""
    decomposition = dilworth_decomposition(session.poset)
    target = session.target
    for chain in decomposition.chains:
        hit, _, _ = _binary_search(
            lambda pos: session.query(chain[pos], label="dilworth-binary"),
            len(chain),
            target,
        )
        if hit is not None:
            return chain[hit]
    return None


def dilworth_search_quantum(session: ConcreteSession, seed: int = 0) -> int | None:
    """Nest exact binary search inside exact Grover search over the chains.

    One superposed predicate evaluation costs one binary search over the
    longest chain; the Grover step finds the chain holding the target, and
    the verification binary search localizes the element.  With duplicate
    values the Grover step switches to the unknown-marked-count search.
    """
    decomposition = dilworth_decomposition(session.poset)
    chains = decomposition.chains
    target = session.target
    eval_cost = max(1, math.ceil(math.log2(decomposition.max_chain_length() + 1)))
    located: dict[int, int] = {}

    def truth(ci: int) -> bool:
        return any(session._peek(x) == target for x in chains[ci])

    def verify(ci: int) -> bool:
        hit, _, _ = _binary_search(
            lambda pos: session.query(chains[ci][pos], label="dilworth-q-binary"),
            len(chains[ci]),
            target,
        )
        if hit is None:
            return False
        located[ci] = chains[ci][hit]
        return True

    predicate = OraclePredicate(truth=truth, verify=verify, eval_cost=eval_cost)
    rng = random.Random(seed)
    search = exact_grover if session.distinct else bbht_search
    chain_index = search(
        range(len(chains)), predicate,
        rng=rng, ledger=session.ledger, label="dilworth-grover",
    )
    if chain_index is None:
        return None
    return located[chain_index]


# ---------------------------------------------------------------------------
# Classical recursive 2D search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitStep:
    """One central-line binary search and the split it induced."""

    rect: tuple[int, int, int, int]
    axis: str
    line: int
    probes: int
    hit: tuple[int, int] | None
    first_geq: int | None
    children: tuple[tuple[int, int, int, int], tuple[int, int, int, int]]
    depth: int
    halved: bool


@dataclass
class Search2DTrace:
    steps: list[SplitStep] = field(default_factory=list)
    found: tuple[int, int] | None = None
    found_depth: int | None = None
    max_depth: int = 0


def _rect_dims(rect):
    r0, r1, c0, c1 = rect
    return max(0, r1 - r0), max(0, c1 - c0)


def _rect_size(rect) -> int:
    r, c = _rect_dims(rect)
    return 0 if r == 0 or c == 0 else max(r, c)


_EMPTY = (0, 0, 0, 0)


def _straddle_children(rect, axis, line, first_geq_abs):
    """Child rectangles left over after discarding the two straddle corners."""
    r0, r1, c0, c1 = rect
    if axis == "col":
        ix = first_geq_abs - 1  # last row with value < target; r0-1 when virtual
        upper = (r0, ix + 1, line + 1, c1)
        lower = (ix + 1, r1, c0, line)
    else:
        jx = first_geq_abs - 1
        upper = (r0, line, jx + 1, c1)
        lower = (line + 1, r1, c0, jx + 1)
    return _normalize(upper), _normalize(lower)


def _normalize(rect):
    r0, r1, c0, c1 = rect
    if r1 <= r0 or c1 <= c0:
        return _EMPTY
    return rect


def classical_2d_search(
    array, target: int, ledger: QueryLedger | None = None
) -> tuple[tuple[int, int] | None, Search2DTrace]:
    """Recursive central-line search of a sorted 2D array, with split trace.

    Binary-searches the central column when rows <= cols (central row
    otherwise), discards the two certified corners, and recurses on the two
    leftover rectangles.  found_depth counts recursion levels from 1.
    """
    oracle = Array2DOracle(array, ledger, "array2d")
    trace = Search2DTrace()

    def recurse(rect, depth):
        r, c = _rect_dims(rect)
        if r == 0 or c == 0:
            return None
        trace.max_depth = max(trace.max_depth, depth)
        r0, r1, c0, c1 = rect
        size = max(r, c)
        if r <= c:
            axis = "col"
            line = c0 + (c + 1) // 2 - 1
            hit_pos, fgeq, probes = _binary_search(
                lambda pos: oracle.query(r0 + pos, line), r, target
            )
            hit = (r0 + hit_pos, line) if hit_pos is not None else None
            fgeq_abs = r0 + fgeq
        else:
            axis = "row"
            line = r0 + (r + 1) // 2 - 1
            hit_pos, fgeq, probes = _binary_search(
                lambda pos: oracle.query(line, c0 + pos), c, target
            )
            hit = (line, c0 + hit_pos) if hit_pos is not None else None
            fgeq_abs = c0 + fgeq
        if hit is not None:
            trace.steps.append(
                SplitStep(rect, axis, line, probes, hit, None, (_EMPTY, _EMPTY), depth, True)
            )
            trace.found = hit
            trace.found_depth = depth
            return hit
        children = _straddle_children(rect, axis, line, fgeq_abs)
        bound = (size + 1) // 2
        halved = all(_rect_size(ch) <= bound for ch in children)
        trace.steps.append(
            SplitStep(rect, axis, line, probes, None, fgeq_abs, children, depth, halved)
        )
        result = recurse(children[0], depth + 1)
        if result is None:
            result = recurse(children[1], depth + 1)
        return result

    found = recurse((0, array.rows, 0, array.cols), 1)
    return found, trace


# ---------------------------------------------------------------------------
# Quantum 2D search
# ---------------------------------------------------------------------------


class Sorted2DDivider:
    """k=2 split-step divider over a sorted 2D array.

    A sub-database is a tuple of disjoint rectangles; its problem size is the
    largest rectangle dimension.  One division keeps binary-searching central
    lines (each search halves the longer dimension of one rectangle; at most
    two searches per rectangle) until every remaining rectangle fits within
    ceil(size/2), then deals the rectangles into two parts.  This realizes
    the size-halving division condition exactly, at O(log) split cost.

    Searches run on uncharged peeks; the runner charges the returned costs
    with the amplified-execution multiplicity.
    """

    k = 2
    n0 = 4

    def __init__(self, array, target: int, eps=Fraction(1, 4), probe_cost: int = 1):
        self.array = array
        self.target = target
        self.eps = eps
        self.probe_cost = probe_cost
        self.steps: list[SplitStep] = []
        self.accesses = 0
        self._locate()

    def _locate(self):
        self._target_cell = self.array.find_value(self.target)

    def _peek(self, i: int, j: int) -> int:
        self.accesses += 1
        return self.array.entry(i, j)

    def size(self, db) -> int:
        return max((_rect_size(rect) for rect in db), default=0)

    def contains_target(self, db) -> bool:
        return any(self._rect_contains(rect) for rect in db)

    def _rect_contains(self, rect) -> bool:
        if self._target_cell is None:
            return False
        i, j = self._target_cell
        r0, r1, c0, c1 = rect
        return r0 <= i < r1 and c0 <= j < c1

    def divide(self, db):
        bound = (self.size(db) + 1) // 2
        work = [rect for rect in db if _rect_size(rect) > 0]
        done: list = []
        probes_total = 0
        while work:
            rect = work.pop()
            if _rect_size(rect) <= bound:
                done.append(rect)
                continue
            children, probes = self._split_once(rect)
            probes_total += probes
            work.extend(ch for ch in children if _rect_size(ch) > 0)
        done.sort()
        parts = [tuple(done[0::2]), tuple(done[1::2])]
        self._check_parts(parts)
        return parts, probes_total * self.probe_cost

    def _split_once(self, rect):
        """One central-line binary search along the longer dimension."""
        r, c = _rect_dims(rect)
        r0, r1, c0, c1 = rect
        size = max(r, c)
        if r <= c:
            axis = "col"
            line = c0 + (c + 1) // 2 - 1
            hit_pos, fgeq, probes = _binary_search(
                lambda pos: self._peek(r0 + pos, line), r, self.target
            )
            hit = (r0 + hit_pos, line) if hit_pos is not None else None
            fgeq_abs = r0 + fgeq
        else:
            axis = "row"
            line = r0 + (r + 1) // 2 - 1
            hit_pos, fgeq, probes = _binary_search(
                lambda pos: self._peek(line, c0 + pos), c, self.target
            )
            hit = (line, c0 + hit_pos) if hit_pos is not None else None
            fgeq_abs = c0 + fgeq
        if hit is not None:
            children, extra = self._hit_children(rect, hit, axis, line)
            probes += extra
        else:
            children = _straddle_children(rect, axis, line, fgeq_abs)
        halved = all(_rect_size(ch) <= (size + 1) // 2 for ch in children)
        self.steps.append(
            SplitStep(
                rect, axis, line, probes, hit,
                None if hit else fgeq_abs, tuple(children), 0, halved,
            )
        )
        return children, probes

    def _hit_children(self, rect, cell, axis, line):
        i, j = cell
        r0, r1, c0, c1 = rect
        upper = _normalize((r0, i, j + 1, c1))
        lower = _normalize((i + 1, r1, c0, j))
        ua = _rect_dims(upper)
        la = _rect_dims(lower)
        other = upper if ua[0] * ua[1] >= la[0] * la[1] else lower
        return ((i, i + 1, j, j + 1), other), 0

    def _check_parts(self, parts):
        pass

    def base_search(self, db):
        found = None
        count = 0
        for rect in db:
            r0, r1, c0, c1 = rect
            for i in range(r0, r1):
                for j in range(c0, c1):
                    count += 1
                    if self._peek(i, j) == self.target:
                        found = (i, j)
        return found, count * self.probe_cost

    def verify(self, cell):
        i, j = cell
        return self._peek(i, j) == self.target, self.probe_cost


@dataclass
class Quantum2DResult:
    cell: tuple[int, int] | None
    inner_success: float
    outer_success: float
    outer_iterations: int
    cost: int
    sampled_success: bool
    steps: list[SplitStep]


def _outer_amplification(p: float) -> tuple[int, float]:
    """Odd repetition count driving success p to a constant, and the result."""
    p = min(max(p, 1e-12), 1.0)
    theta = math.asin(math.sqrt(p))
    m_mid = max(0, round(math.pi / (4 * theta) - 0.5))
    best_t, best_s = 1, p
    for m in {max(0, m_mid - 1), m_mid, m_mid + 1}:
        t = 2 * m + 1
        s = math.sin(t * theta) ** 2
        if s > best_s + 1e-12:
            best_t, best_s = t, s
    return best_t, best_s


def quantum_2d_search(
    array,
    target: int,
    *,
    seed: int | None = None,
    rng: random.Random | None = None,
    ledger: QueryLedger | None = None,
    force_success: bool = False,
    divider: Sorted2DDivider | None = None,
    label: str = "array2d-q",
) -> tuple[tuple[int, int] | None, Quantum2DResult]:
    """Bounded-error O(sqrt(m))-query search of a sorted 2D array.

    Wraps the split-step divider in the recursive amplified descent, then
    applies one outer amplification round to lift the descent's analytic
    success probability to a constant.  The outcome is sampled from the
    amplified probability; candidates are classically verified, so a missing
    target is never falsely reported found.
    """
    if rng is None:
        rng = random.Random(seed)
    if ledger is None:
        ledger = QueryLedger()
    if divider is None:
        divider = Sorted2DDivider(array, target)
    falpha = float(recursion_alpha(divider.eps))
    fdelta = float(recursion_delta(divider.eps))
    levels: list[dict] = []
    element, inner_p, cost = _amplified_descend(
        divider,
        ((0, array.rows, 0, array.cols),),
        falpha=falpha,
        fdelta=fdelta,
        strict_sizes=True,
        levels=levels,
    )
    t_out, outer_p = _outer_amplification(inner_p)
    total = int(round(t_out * cost))
    ledger.add_quantum(total, label)
    result = Quantum2DResult(
        cell=None,
        inner_success=inner_p,
        outer_success=outer_p,
        outer_iterations=t_out,
        cost=total,
        sampled_success=False,
        steps=divider.steps,
    )
    if element is None:
        return None, result
    if force_success or rng.random() < outer_p:
        ok, verify_cost = divider.verify(element)
        ledger.add_classical(verify_cost, label + "-verify")
        result.sampled_success = True
        if ok:
            result.cell = element
            return element, result
    return None, result


# ---------------------------------------------------------------------------
# d-dimensional nesting
# ---------------------------------------------------------------------------


@dataclass
class DdimResult:
    cell: tuple[int, ...] | None
    measured_queries: dict
    asymptotic_budget: int
    robust_repetitions: int


def ddim_search(
    nd: NdSortedArray,
    target: int,
    *,
    seed: int = 0,
    ledger: QueryLedger | None = None,
    cell_budget: int = 1 << 22,
) -> DdimResult:
    """Search a d-dimensional sorted array for a known value.

    d=1 is plain binary search; d=2 delegates to the quantum 2D search with
    the same seed and ledger; d>=3 runs Grover search over the m^(d-2)
    two-dimensional slices, with the bounded-error slice search modeled by
    3-fold majority repetition whose substitution factor is charged
    explicitly.  Reports measured queries alongside the asymptotic budget
    m^((d-1)/2) * d * log2(m).
    """
    if ledger is None:
        ledger = QueryLedger()
    m, d = nd.m, nd.d
    if m**d > cell_budget:
        raise SizeError(f"{m}^{d} cells exceed the configured budget {cell_budget}")
    budget = math.ceil(m ** ((d - 1) / 2) * d * max(1.0, math.log2(max(2, m))))

    if d == 1:
        hit, _, _ = _binary_search(
            lambda pos: _charged_flat(nd, pos, ledger), m, target
        )
        cell = (hit,) if hit is not None else None
        return DdimResult(cell, ledger.snapshot(), budget, robust_repetitions=1)

    if d == 2:
        view = _Nd2DView(nd)
        cell2, _ = quantum_2d_search(view, target, seed=seed, ledger=ledger, label="ddim-2d")
        return DdimResult(cell2, ledger.snapshot(), budget, robust_repetitions=1)

    rng = random.Random(seed)
    location = nd.find_value(target)
    marked_slice = None
    if location is not None:
        suffix = location[2:]
        idx = 0
        for c in suffix:
            idx = idx * m + c
        marked_slice = idx
    slice_count = nd.slice_count()
    iterations = grover_iterations(slice_count)
    probe_index = marked_slice if marked_slice is not None else 0
    probe_slice = nd.slice2d(nd.suffix_of(probe_index))
    repetitions = 3
    for _ in range(iterations):
        for _ in range(repetitions):
            scratch = QueryLedger()
            quantum_2d_search(
                probe_slice, target,
                rng=random.Random(rng.getrandbits(32)), ledger=scratch,
                label="ddim-slice",
            )
            ledger.add_quantum(scratch.total, "ddim-robust-x3")
    candidate = marked_slice if marked_slice is not None else rng.randrange(slice_count)
    final_slice = nd.slice2d(nd.suffix_of(candidate))
    cell2, _ = quantum_2d_search(
        final_slice, target,
        rng=random.Random(rng.getrandbits(32)), ledger=ledger, label="ddim-final",
    )
    if cell2 is None:
        return DdimResult(None, ledger.snapshot(), budget, repetitions)
    full_cell = (cell2[0], cell2[1]) + nd.suffix_of(candidate)
    ledger.add_classical(1, "ddim-verify")
    if nd.entry(full_cell) != target:
        return DdimResult(None, ledger.snapshot(), budget, repetitions)
    return DdimResult(full_cell, ledger.snapshot(), budget, repetitions)


def _charged_flat(nd: NdSortedArray, pos: int, ledger: QueryLedger) -> int:
    ledger.add_classical(1, "ddim-binary")
    return nd.flat[pos]


@dataclass(frozen=True)
class _Nd2DView:
    nd: NdSortedArray

    @property
    def rows(self) -> int:
        return self.nd.m

    @property
    def cols(self) -> int:
        return self.nd.m

    def entry(self, i: int, j: int) -> int:
        return self.nd.entry((i, j))

    def find_value(self, value: int):
        loc = self.nd.find_value(value)
        return None if loc is None else (loc[0], loc[1])
