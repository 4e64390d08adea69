"""Query-counted oracle sessions for the abstract and concrete search models.

All search algorithms reach hidden data (the marked set, the stored values)
exclusively through a session.  Each session owns a QueryLedger; the charged
entry points are ``query``/``query_ternary``, while the underscore-prefixed
peeks exist only so the amplitude simulator can do its bookkeeping without
spending queries.  Sessions are single-owner during a run; the underlying
posets and value maps are immutable and shareable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import BudgetExceeded, RangeError, UnsortedInput
from .poset import Poset, mask_elements, ordinal_sum, parse_poset_text

LESS = "<"
EQUAL = "="
NOT_LEQ = "nleq"


@dataclass
class QueryLedger:
    """Audited oracle-query counts, split by kind and subroutine label.

    Quantum queries are charged one per Grover/amplification iteration (scaled
    by the per-iteration oracle cost for nested predicates); verification
    measurements are charged as classical queries.
    """

    classical_queries: int = 0
    quantum_queries: int = 0
    breakdown: dict[str, int] = field(default_factory=dict)
    budget: int | None = None

    def add_classical(self, count: int = 1, label: str = "query") -> None:
        self._add("classical", label, count)
        self.classical_queries += count

    def add_quantum(self, count: int = 1, label: str = "grover") -> None:
        self._add("quantum", label, count)
        self.quantum_queries += count

    def _add(self, kind: str, label: str, count: int) -> None:
        if count < 0:
            raise RangeError("ledger counts are monotone; negative charge refused")
        if self.budget is not None and self.total + count > self.budget:
            raise BudgetExceeded(
                f"query budget {self.budget} exhausted (at {self.total}, +{count})"
            )
        key = f"{kind}:{label}"
        self.breakdown[key] = self.breakdown.get(key, 0) + count

    @property
    def total(self) -> int:
        return self.classical_queries + self.quantum_queries

    def snapshot(self) -> dict:
        return {
            "classical": self.classical_queries,
            "quantum": self.quantum_queries,
            "total": self.total,
            "breakdown": dict(sorted(self.breakdown.items())),
        }


class AbstractSession:
    """Oracle for the hidden-marked-element model.

    ``query(x, 0)`` answers whether some marked element lies at or below x;
    ``query(x, 1)`` answers whether x itself is marked.  The marked set may be
    empty or hold several elements (the multi-marked extension).
    """

    def __init__(self, poset: Poset, marked, ledger: QueryLedger | None = None):
        self.poset = poset
        self.marked = frozenset(marked)
        for a in self.marked:
            if not (0 <= a < poset.n):
                raise RangeError(f"marked element {a} out of range")
        self.ledger = ledger if ledger is not None else QueryLedger()
        self._marked_mask = 0
        for a in self.marked:
            self._marked_mask |= 1 << a

    @property
    def n(self) -> int:
        return self.poset.n

    def query(self, x: int, z: int, label: str = "abstract") -> int:
        self.ledger.add_classical(1, label)
        return self._peek(x, z)

    def query_ternary(self, x: int, label: str = "abstract-ternary") -> str:
        """One three-valued query: '<' when marked < x, '=' on hit, else 'nleq'."""
        self.ledger.add_classical(1, label)
        if self._peek(x, 1):
            return EQUAL
        if self._peek(x, 0):
            return LESS
        return NOT_LEQ

    def _peek(self, x: int, z: int) -> int:
        if not (0 <= x < self.poset.n):
            raise RangeError(f"queried element {x} out of range")
        if z == 0:
            return 1 if self.poset.down[x] & self._marked_mask else 0
        if z == 1:
            return 1 if self._marked_mask >> x & 1 else 0
        raise RangeError(f"query bit z must be 0 or 1, got {z}")


class BooleanFromTernaryAdapter:
    """Answer (x, z) Boolean queries using only the three-valued oracle.

    One ternary query suffices per Boolean query, so complexities under the
    two interfaces differ by a factor of at most 2 in either direction.
    """

    def __init__(self, session: AbstractSession):
        self.session = session

    def query(self, x: int, z: int) -> int:
        answer = self.session.query_ternary(x)
        if z == 1:
            return 1 if answer == EQUAL else 0
        return 1 if answer in (LESS, EQUAL) else 0


class ConcreteSession:
    """Oracle for the stored-integer model: a query to x reveals val(x).

    Construction validates monotone consistency (x <= y implies
    val(x) <= val(y)); with ``distinct`` the value map must be injective.
    """

    def __init__(
        self,
        poset: Poset,
        values,
        target: int,
        ledger: QueryLedger | None = None,
        distinct: bool = True,
    ):
        values = tuple(values)
        if len(values) != poset.n:
            raise RangeError("value map must assign every element")
        for (u, v) in poset.covers:
            if values[u] > values[v]:
                raise UnsortedInput(
                    f"values violate the order: val({u})={values[u]} > val({v})={values[v]}"
                )
        if distinct and len(set(values)) != len(values):
            raise UnsortedInput("distinct flag set but values contain duplicates")
        self.poset = poset
        self.values = values
        self.target = target
        self.distinct = distinct
        self.ledger = ledger if ledger is not None else QueryLedger()

    @property
    def n(self) -> int:
        return self.poset.n

    def query(self, x: int, label: str = "concrete") -> int:
        self.ledger.add_classical(1, label)
        return self._peek(x)

    def _peek(self, x: int) -> int:
        if not (0 <= x < self.poset.n):
            raise RangeError(f"queried element {x} out of range")
        return self.values[x]

    def target_location(self) -> int | None:
        """Bookkeeping peek: where the target is stored, if anywhere."""
        for x, v in enumerate(self.values):
            if v == self.target:
                return x
        return None


def assign_random_linear_extension(p: Poset, seed) -> tuple[int, ...]:
    """Bijection onto 1..n that is a linear extension of p, seeded.

    Implemented as a randomized topological order: repeatedly pick a uniform
    random minimal element among the unplaced ones.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    n = p.n
    values = [0] * n
    placed = 0
    indeg = [0] * n
    succ: list[list[int]] = [[] for _ in range(n)]
    for (u, v) in p.covers:
        succ[u].append(v)
        indeg[v] += 1
    frontier = [v for v in range(n) if indeg[v] == 0]
    rank = 1
    while frontier:
        pick = rng.randrange(len(frontier))
        frontier[pick], frontier[-1] = frontier[-1], frontier[pick]
        v = frontier.pop()
        values[v] = rank
        rank += 1
        placed += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                frontier.append(w)
    assert placed == n
    return tuple(values)


@dataclass(frozen=True)
class LayeredInstance:
    """A stacked lower/section/upper instance for section-hardness scenarios.

    The lower layer stores 1..|V|, the section the next |T| integers, the
    upper layer the rest; any correct search for a target in the section's
    range must localize inside the section.
    """

    poset: Poset
    values: tuple[int, ...]
    section_elements: tuple[int, ...]
    section_value_range: tuple[int, int]

    def session(self, target: int, ledger: QueryLedger | None = None) -> ConcreteSession:
        lo, hi = self.section_value_range
        if not (lo <= target <= hi):
            raise RangeError(f"target {target} outside section range [{lo}, {hi}]")
        return ConcreteSession(self.poset, self.values, target, ledger=ledger)


def layered_instance(v_layer: Poset, t_layer: Poset, u_layer: Poset, seed) -> LayeredInstance:
    """Stack V below T below U and store a seeded linear extension per layer."""
    rng = random.Random(seed)
    stacked, offsets = ordinal_sum(v_layer, t_layer, u_layer)
    values = [0] * stacked.n
    base = 0
    for layer, off in zip((v_layer, t_layer, u_layer), offsets):
        ext = assign_random_linear_extension(layer, rng)
        for local, val in enumerate(ext):
            values[off + local] = base + val
        base += layer.n
    t_off = offsets[1]
    section = tuple(range(t_off, t_off + t_layer.n))
    lo = v_layer.n + 1
    hi = v_layer.n + t_layer.n
    return LayeredInstance(
        poset=stacked,
        values=tuple(values),
        section_elements=section,
        section_value_range=(lo, hi),
    )


# ---------------------------------------------------------------------------
# Instance text format
# ---------------------------------------------------------------------------


def format_instance_text(poset: Poset, values) -> str:
    from .poset import format_poset_text

    lines = [format_poset_text(poset).rstrip("\n")]
    values = tuple(values)
    lines.append(f"values {len(values)}")
    lines.extend(f"{x} {v}" for x, v in enumerate(values))
    return "\n".join(lines) + "\n"


def parse_instance_text(text: str) -> tuple[Poset, tuple[int, ...]]:
    head, sep, tail = text.partition("values ")
    if not sep:
        raise RangeError("instance text missing 'values <n>' section")
    poset = parse_poset_text(head)
    tail_lines = [
        ln.split("#", 1)[0].strip() for ln in tail.splitlines() if ln.strip()
    ]
    count = int(tail_lines[0])
    values = [None] * count
    for ln in tail_lines[1:]:
        x_str, v_str = ln.split()
        values[int(x_str)] = int(v_str)
    if any(v is None for v in values) or count != poset.n:
        raise RangeError("instance value lines incomplete")
    return poset, tuple(values)  # type: ignore[arg-type]
