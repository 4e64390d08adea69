"""Amplitude-level simulation of the quantum search subroutines.

Everything here runs in the 2-dimensional invariant subspace spanned by the
uniform superpositions over marked and unmarked elements, so one Grover
iteration is a constant-size complex rotation.  The exact search variant uses
the phase-matched final-iteration construction: every iteration applies the
generalized reflection with phase

    phi = 2 * arcsin( sin(pi / (4t + 2)) / sin(theta) )

which drives a uniquely marked element to success probability 1 after
t = ceil(pi / (4 theta) - 1/2) iterations, theta = arcsin(sqrt(1/N)).

Accounting convention: each Grover/amplification iteration charges the
per-iteration oracle cost (1 for a plain element predicate) as quantum
queries; verification measurements charge classical queries.  The simulator's
classical peek at the marked set is bookkeeping and is never charged.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .errors import ConditionViolation, PromiseViolation, RangeError
from .oracles import QueryLedger

_EPS = 1e-9


def _iceil(x: float) -> int:
    return math.ceil(x - _EPS)


def _ifloor(x: float) -> int:
    return math.floor(x + _EPS)


def _odd_at_most(t: int) -> int:
    return t if t % 2 == 1 else t - 1


# ---------------------------------------------------------------------------
# Closed-form Grover dynamics
# ---------------------------------------------------------------------------


def grover_success_prob(n_items: int, marked: int, iterations: int) -> float:
    """Success probability of plain Grover search: sin^2((2t+1) theta)."""
    if n_items < 1:
        raise RangeError("set size must be >= 1")
    if not (0 <= marked <= n_items):
        raise RangeError("marked count must lie in [0, N]")
    if iterations < 0:
        raise RangeError("iteration count must be >= 0")
    if marked == 0:
        return 0.0
    theta = math.asin(math.sqrt(marked / n_items))
    return math.sin((2 * iterations + 1) * theta) ** 2


def grover_iterations(n_items: int) -> int:
    """Iteration count of the exact variant for a single marked element."""
    if n_items < 1:
        raise RangeError("set size must be >= 1")
    theta = math.asin(math.sqrt(1.0 / n_items))
    return max(0, _iceil(math.pi / (4 * theta) - 0.5))


def _matched_phase(n_items: int, iterations: int) -> float:
    theta = math.asin(math.sqrt(1.0 / n_items))
    arg = min(1.0, math.sin(math.pi / (4 * iterations + 2)) / math.sin(theta))
    return 2 * math.asin(arg)


def _phase_matched_success(n_items: int, marked: int, iterations: int, phi: float) -> float:
    """Simulate the phase-phi iteration against the actual marked count."""
    if marked == 0:
        return 0.0
    theta = math.asin(math.sqrt(marked / n_items))
    s0_a = math.sin(theta)
    s0_b = math.cos(theta)
    a: complex = complex(s0_a)
    b: complex = complex(s0_b)
    rot = cmath.exp(1j * phi)
    for _ in range(iterations):
        a = a * rot
        overlap = s0_a * a + s0_b * b
        scale = (1 - rot) * overlap
        a = -(a - scale * s0_a)
        b = -(b - scale * s0_b)
    return abs(a) ** 2


def exact_grover_success(n_items: int, marked: int = 1) -> float:
    """Amplitude-simulated success of the exact variant's full schedule."""
    t = grover_iterations(n_items)
    if t == 0:
        return marked / n_items
    return _phase_matched_success(n_items, marked, t, _matched_phase(n_items, t))


# ---------------------------------------------------------------------------
# Session-backed predicates and the searches that consume them
# ---------------------------------------------------------------------------


@dataclass
class OraclePredicate:
    """A marked-element test with separated accounting duties.

    ``truth`` is the simulator's uncharged bookkeeping peek; ``verify`` is a
    charged classical evaluation (it must spend its own queries through the
    session it closes over); ``eval_cost`` is the number of underlying oracle
    queries one superposed application costs.
    """

    truth: Callable[[Any], bool]
    verify: Callable[[Any], bool]
    eval_cost: int = 1


def exact_grover(
    items: Sequence[Any],
    predicate: OraclePredicate,
    *,
    rng: random.Random,
    ledger: QueryLedger,
    label: str = "exact-grover",
):
    """Exact search over an explicit set holding 0 or 1 marked elements.

    Returns the marked element or None.  Charges
    ceil(pi/(4 asin(1/sqrt N)) - 1/2) quantum iterations plus one classical
    verification.  Raises PromiseViolation when the verification contradicts
    the 0-or-1 promise (only probabilistically detectable).
    """
    items = list(items)
    n_items = len(items)
    if n_items == 0:
        return None
    if n_items == 1:
        return items[0] if predicate.verify(items[0]) else None
    marked = [y for y in items if predicate.truth(y)]
    m = len(marked)
    t = grover_iterations(n_items)
    ledger.add_quantum(t * predicate.eval_cost, label)
    if m == 0:
        candidate = items[rng.randrange(n_items)]
    else:
        success = (
            exact_grover_success(n_items, 1)
            if m == 1
            else _phase_matched_success(n_items, m, t, _matched_phase(n_items, t))
        )
        if rng.random() < success:
            candidate = marked[rng.randrange(m)]
        else:
            unmarked = [y for y in items if y not in marked]
            candidate = unmarked[rng.randrange(len(unmarked))] if unmarked else marked[0]
    if predicate.verify(candidate):
        return candidate
    if m >= 2:
        raise PromiseViolation(
            f"exact Grover verification failed with {m} marked elements in a 0-or-1 promise"
        )
    return None


def bbht_search(
    items: Sequence[Any],
    predicate: OraclePredicate,
    *,
    rng: random.Random,
    ledger: QueryLedger,
    label: str = "bbht",
):
    """Bounded-error search with an unknown number of marked elements.

    Exponentially growing iteration-count cap with a uniformly random
    iteration count per round; O(sqrt(N/m)) expected queries, success
    probability >= 2/3 when anything is marked, None after the cutoff
    schedule otherwise.
    """
    items = list(items)
    n_items = len(items)
    if n_items == 0:
        return None
    if n_items == 1:
        return items[0] if predicate.verify(items[0]) else None
    marked = [y for y in items if predicate.truth(y)]
    m = len(marked)
    theta = math.asin(math.sqrt(m / n_items)) if m else 0.0
    unmarked = [y for y in items if y not in marked]
    cap = 1.0
    growth = 6.0 / 5.0
    ceiling = math.sqrt(n_items)
    max_rounds = _iceil(math.log(4 * ceiling) / math.log(growth)) + 16
    for _ in range(max_rounds):
        t = rng.randrange(max(1, _iceil(cap)))
        ledger.add_quantum(t * predicate.eval_cost, label)
        candidate = None
        if m and rng.random() < math.sin((2 * t + 1) * theta) ** 2:
            candidate = marked[rng.randrange(m)]
        elif unmarked:
            candidate = unmarked[rng.randrange(len(unmarked))]
        else:
            candidate = marked[rng.randrange(m)]
        if predicate.verify(candidate):
            return candidate
        cap = min(cap * growth, ceiling)
    return None


# ---------------------------------------------------------------------------
# Amplitude amplification in closed form
# ---------------------------------------------------------------------------


def amplify_exact(eps: float, rounds: float) -> float:
    """Exact amplified success: sin^2((2m+1) arcsin(sqrt(eps))).

    The round count may be fractional; the closed form stays exact, and a
    fractional count never overstates what integer rounding would achieve.
    """
    if not (0.0 <= eps <= 1.0):
        raise RangeError("base success must be in [0, 1]")
    if rounds < 0:
        raise RangeError("round count must be >= 0")
    if eps == 0.0:
        return 0.0
    return math.sin((2 * rounds + 1) * math.asin(math.sqrt(eps))) ** 2


def amplify_max_rounds(eps: float) -> int:
    """Largest m within the amplification lemma's validity range."""
    if not (0.0 < eps <= 1.0):
        raise RangeError("base success must be in (0, 1]")
    return _ifloor(math.pi / math.asin(math.sqrt(eps)) - 0.5)


def amplify_bound(eps: float, rounds: int) -> float:
    """Lower-bound form (1 - t^2 eps / 3) t^2 eps with t = 2m+1.

    Valid for m <= pi/arcsin(sqrt(eps)) - 1/2; out-of-range rounds raise.
    """
    if not (0.0 < eps <= 1.0):
        raise RangeError("base success must be in (0, 1]")
    if rounds < 0 or rounds > amplify_max_rounds(eps):
        raise RangeError(
            f"round count {rounds} outside the lemma range for eps={eps}"
        )
    t = 2 * rounds + 1
    return (1.0 - t * t * eps / 3.0) * t * t * eps


def recursion_delta(eps):
    """Subdivision exponent delta = eps/2 (Fraction in, Fraction out)."""
    return eps / 2


def recursion_alpha(eps):
    """Per-level amplification exponent alpha = eps(4-3eps) / (8(2-eps))."""
    return eps * (4 - 3 * eps) / (8 * (2 - eps))


# ---------------------------------------------------------------------------
# Appendix-style cost/probability model for recursive amplified search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecursionLevel:
    size: int
    split_levels: int
    parts: int
    child_size: int
    executions: float
    split_cost: float
    base_success: float
    amplified_success: float


@dataclass(frozen=True)
class RecursionCostModel:
    """Evaluated time/probability recurrences of the recursive amplification scheme.

    ``total_time`` follows T(n) = t * (sum_i k^i f(n_i) + T(child));
    ``success_probability`` propagates the exact amplified value of the
    pick-one-part-at-random descent; ``wrapped_cost`` is the cost of the final
    amplification wrapper, T(n) / sqrt(P(n)), with unit constant.
    """

    n: int
    k: int
    eps: Any
    delta: Any
    alpha: Any
    n0: int
    t0: float
    levels: tuple[RecursionLevel, ...]
    total_time: float
    success_probability: float
    wrapped_cost: float


def recursion_cost_model(
    n: int,
    k: int,
    f: Callable[[int], float],
    eps,
    n0: int = 16,
    t0: float = 16.0,
) -> RecursionCostModel:
    """Evaluate the descent with n^alpha executions per level and
    ceil(delta log_k n) split levels per recursion step.

    Execution counts are kept real-valued: rounding them down to an odd
    integer is 1 for every n below ~3^(1/alpha) (astronomical for small
    alpha), which would disable amplification entirely at bench scale and
    flatten P(n) far below its intended floor.  The exact closed-form
    amplification is well defined for fractional counts.
    """
    if k < 2 or int(k) != k:
        raise RangeError("branching factor k must be an integer >= 2")
    if not (0 < eps < Fraction(1, 2)):
        raise RangeError("declared split-cost exponent eps must be in (0, 1/2)")
    if n < 1 or n0 < 1:
        raise RangeError("sizes must be >= 1")
    delta = recursion_delta(eps)
    alpha = recursion_alpha(eps)
    fdelta = float(delta)
    falpha = float(alpha)

    descent = []
    size = n
    while size > n0:
        l = max(1, _iceil(fdelta * math.log(size) / math.log(k)))
        parts = k**l
        split_cost = 0.0
        cur = size
        for i in range(l):
            split_cost += (k**i) * f(cur)
            cur = -(-cur // k)
        executions = max(1.0, size**falpha)
        descent.append((size, l, parts, cur, executions, split_cost))
        size = cur

    total = float(t0)
    prob = 1.0
    levels: list[RecursionLevel] = []
    for (sz, l, parts, child, t, split_cost) in reversed(descent):
        base = prob / parts
        prob = amplify_exact(base, (t - 1) / 2)
        total = t * (split_cost + total)
        levels.append(
            RecursionLevel(
                size=sz,
                split_levels=l,
                parts=parts,
                child_size=child,
                executions=t,
                split_cost=split_cost,
                base_success=base,
                amplified_success=prob,
            )
        )
    levels.reverse()
    return RecursionCostModel(
        n=n,
        k=k,
        eps=eps,
        delta=delta,
        alpha=alpha,
        n0=n0,
        t0=t0,
        levels=tuple(levels),
        total_time=total,
        success_probability=prob,
        wrapped_cost=total / math.sqrt(prob),
    )


# ---------------------------------------------------------------------------
# Monte-Carlo executor for recursive dividers
# ---------------------------------------------------------------------------


@dataclass
class AmplifiedRunReport:
    """Outcome of one simulated recursive amplified execution."""

    element: Any
    success_prob: float
    cost: float
    levels: list[dict] = field(default_factory=list)


def _amplified_descend(divider, db, *, falpha, fdelta, strict_sizes, levels) -> tuple[Any, float, int]:
    size = divider.size(db)
    if size <= divider.n0:
        element, cost = divider.base_search(db)
        return element, 1.0, cost
    k = divider.k
    l = max(1, _iceil(fdelta * math.log(size) / math.log(k)))
    parts = [db]
    split_cost = 0
    for _ in range(l):
        grown = []
        for part in parts:
            part_size = divider.size(part)
            subs, cost = divider.divide(part)
            split_cost += cost
            if len(subs) != k:
                raise ConditionViolation(
                    "branching",
                    f"divider produced {len(subs)} sub-databases, declared k={k}",
                )
            bound = -(-part_size // k) if strict_sizes else part_size
            for sub in subs:
                sub_size = divider.size(sub)
                if sub_size > bound:
                    raise ConditionViolation(
                        "size",
                        f"sub-database size {sub_size} exceeds bound {bound} "
                        f"(parent size {part_size}, k={k})",
                    )
            grown.extend(subs)
        parts = grown
    containing = [part for part in parts if divider.contains_target(part)]
    if len(containing) > 1:
        raise ConditionViolation(
            "unique", f"{len(containing)} sub-databases contain the target"
        )
    executions = max(1.0, size**falpha)
    child = containing[0] if containing else max(parts, key=divider.size)
    element, child_prob, child_cost = _amplified_descend(
        divider, child, falpha=falpha, fdelta=fdelta, strict_sizes=strict_sizes, levels=levels
    )
    if not containing:
        element = None
    base = child_prob / len(parts)
    prob = amplify_exact(base, (executions - 1) / 2)
    cost = executions * (split_cost + child_cost)
    levels.append(
        {
            "size": size,
            "split_levels": l,
            "parts": len(parts),
            "executions": executions,
            "split_cost": split_cost,
            "amplified_success": prob,
        }
    )
    return element, prob, cost


def recursive_amplified_run(
    divider,
    db,
    *,
    rng: random.Random,
    ledger: QueryLedger | None = None,
    strict_sizes: bool = True,
    force_success: bool = False,
    label: str = "recursive-amplified",
) -> tuple[Any, AmplifiedRunReport]:
    """One execution of the probabilistic recursive descent, amplified per level.

    The divider must expose k, n0, eps, size(), divide(), base_search(),
    contains_target() and verify(); structural conditions (part count, size
    bounds, unique containing part) are checked at every division.  Split
    costs and amplification iterations are charged to the ledger; the final
    outcome is sampled from the analytically propagated success probability,
    and any candidate is classically verified before being returned.
    """
    fdelta = float(recursion_delta(divider.eps))
    falpha = float(recursion_alpha(divider.eps))
    level_records: list[dict] = []
    element, prob, cost = _amplified_descend(
        divider, db, falpha=falpha, fdelta=fdelta,
        strict_sizes=strict_sizes, levels=level_records,
    )
    level_records.reverse()
    if ledger is not None:
        ledger.add_quantum(int(round(cost)), label)
    report = AmplifiedRunReport(
        element=element, success_prob=prob, cost=cost, levels=level_records
    )
    if element is None:
        return None, report
    if force_success or rng.random() < prob:
        ok, verify_cost = divider.verify(element)
        if ledger is not None:
            ledger.add_classical(verify_cost, label + "-verify")
        return (element if ok else None), report
    return None, report
