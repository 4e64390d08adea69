"""Search algorithms in the abstract (hidden marked element) model.

The forest search repeatedly picks the weight-capped central element of the
residual candidate set T, runs exact Grover search over the sibling set (or
the maximal elements), and keeps either the cone below the hit or the residue
after discarding every cone below the candidate set.  T stays down-closed
throughout, shrinks every iteration, and the exactness of the Grover
subroutine makes the whole search exact.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .errors import InconsistentOracle, NotForestError
from .oracles import AbstractSession
from .poset import (
    Poset,
    central_element,
    mask_elements,
    maximal_elements,
    siblings,
)
from .qsim import OraclePredicate, exact_grover


@dataclass(frozen=True)
class ForestIteration:
    t_size: int
    x: int
    x_maximal: bool
    candidates: tuple[int, ...]
    candidates_weight: int
    grover_result: int | None
    t_size_after: int


@dataclass
class ForestSearchTrace:
    iterations: list[ForestIteration] = field(default_factory=list)
    result: int | None = None
    verification_queries: int = 0


def _weights(p: Poset, t_mask: int, elements) -> int:
    return sum(bin(p.down[y] & t_mask).count("1") for y in elements)


def forest_search(p: Poset, session: AbstractSession) -> tuple[int | None, ForestSearchTrace]:
    """Exact search of a forest-like poset for at most one marked element.

    Returns (element | None, trace).  Deterministic: the exact Grover
    subroutine never errs, tie-breaks are by lowest id, and the one final
    verification query resolves the last surviving candidate.
    """
    if not p.is_forest():
        raise NotForestError("forest_search requires a forest-like poset")
    trace = ForestSearchTrace()
    # the rng only picks a measurement outcome on the empty-marked branch,
    # where verification rejects it regardless; outcomes stay deterministic
    rng = random.Random(0)
    predicate = OraclePredicate(
        truth=lambda y: session._peek(y, 0) == 1,
        verify=lambda y: session.query(y, 0, label="forest-verify") == 1,
    )
    t_mask = (1 << p.n) - 1
    while bin(t_mask).count("1") > 1:
        t_size = bin(t_mask).count("1")
        x = central_element(p, t_mask)
        x_maximal = not (p.up[x] & t_mask & ~(1 << x))
        if x_maximal:
            # the proof's claim: a maximal element of T is maximal in S
            assert not (p.up[x] & ~(1 << x)), "T-maximal element not maximal in S"
            candidates = maximal_elements(p, t_mask)
        else:
            candidates = siblings(p, t_mask, x)
        weight_total = _weights(p, t_mask, candidates)
        assert 2 * weight_total >= t_size, "halving invariant violated"
        y = exact_grover(
            candidates, predicate, rng=rng, ledger=session.ledger, label="forest-grover"
        )
        if y is None:
            removed = 0
            for c in candidates:
                removed |= p.down[c]
            t_mask &= ~removed
        else:
            t_mask &= p.down[y]
        t_after = bin(t_mask).count("1")
        assert t_after < t_size, "residual set failed to shrink"
        trace.iterations.append(
            ForestIteration(
                t_size=t_size,
                x=x,
                x_maximal=x_maximal,
                candidates=tuple(candidates),
                candidates_weight=weight_total,
                grover_result=y,
                t_size_after=t_after,
            )
        )
    if t_mask == 0:
        trace.result = None
        return None, trace
    survivor = mask_elements(t_mask)[0]
    trace.verification_queries = 1
    if session.query(survivor, 1, label="forest-final") == 1:
        trace.result = survivor
        return survivor, trace
    trace.result = None
    return None, trace


def forest_search_multi(
    p: Poset,
    session: AbstractSession,
    mode: str = "classical-repetition",
    seed: int = 0,
) -> tuple[int | None, ForestSearchTrace]:
    """Bounded-error forest search for any number of marked elements.

    Replaces the exact Grover step with r = ceil(|G| ln(3 log2 n)) uniform
    samples from the candidate set, each followed by one verification query,
    so each round fails with probability at most 1/(3 log2 n).  In
    "quantum-cost" mode the amplified per-round charge
    ceil(sqrt(|G| log log n)) is additionally reported in the ledger.
    """
    if mode not in ("classical-repetition", "quantum-cost"):
        raise ValueError(f"unknown mode {mode!r}")
    if not p.is_forest():
        raise NotForestError("forest_search_multi requires a forest-like poset")
    rng = random.Random(seed)
    trace = ForestSearchTrace()
    n = p.n
    log2n = max(1.0, math.log2(max(2, n)))
    loglog = max(1.0, math.log2(log2n + 1))
    t_mask = (1 << p.n) - 1
    while bin(t_mask).count("1") > 1:
        t_size = bin(t_mask).count("1")
        x = central_element(p, t_mask)
        x_maximal = not (p.up[x] & t_mask & ~(1 << x))
        candidates = (
            maximal_elements(p, t_mask) if x_maximal else siblings(p, t_mask, x)
        )
        if mode == "quantum-cost":
            session.ledger.add_quantum(
                math.ceil(math.sqrt(len(candidates) * loglog)),
                "forest-multi-amplified",
            )
        repetitions = max(1, math.ceil(len(candidates) * math.log(3 * log2n)))
        hit = None
        for _ in range(repetitions):
            y = candidates[rng.randrange(len(candidates))]
            if session.query(y, 0, label="forest-multi") == 1:
                hit = y
                break
        if hit is None:
            removed = 0
            for c in candidates:
                removed |= p.down[c]
            t_mask &= ~removed
        else:
            t_mask &= p.down[hit]
        trace.iterations.append(
            ForestIteration(
                t_size=t_size,
                x=x,
                x_maximal=x_maximal,
                candidates=tuple(candidates),
                candidates_weight=_weights(p, t_mask, candidates),
                grover_result=hit,
                t_size_after=bin(t_mask).count("1"),
            )
        )
    if t_mask == 0:
        return None, trace
    survivor = mask_elements(t_mask)[0]
    trace.verification_queries = 1
    if session.query(survivor, 1, label="forest-multi-final") == 1:
        trace.result = survivor
        return survivor, trace
    return None, trace


def halving_learner(p: Poset, session: AbstractSession) -> int:
    """Version-space search of an arbitrary poset for exactly one marked element.

    Each step queries the (x, z) pair whose adversarial answer still
    eliminates the most candidates; ties break toward lexicographically
    lowest (x, z).  One final query verifies the surviving candidate.
    """
    n = p.n
    version = (1 << n) - 1
    if version == 0:
        raise InconsistentOracle("empty poset has no marked element")
    query_masks = [((x, 0), p.down[x]) for x in range(n)]
    query_masks += [((x, 1), 1 << x) for x in range(n)]
    query_masks.sort(key=lambda item: item[0])
    while bin(version).count("1") > 1:
        best = None
        best_gain = -1
        for (q, qmask) in query_masks:
            ones = bin(version & qmask).count("1")
            gain = min(ones, bin(version).count("1") - ones)
            if gain > best_gain:
                best_gain = gain
                best = (q, qmask)
        assert best is not None and best_gain > 0
        (x, z), qmask = best
        answer = session.query(x, z, label="halving")
        version &= qmask if answer else ~qmask
        if version == 0:
            raise InconsistentOracle("oracle answers eliminated every candidate")
    candidate = mask_elements(version)[0]
    if session.query(candidate, 1, label="halving-verify") == 1:
        return candidate
    raise InconsistentOracle("final candidate failed verification")
