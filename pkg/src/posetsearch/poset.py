"""Partial-order data structures and combinatorial analyses.

Elements of a poset are the integers 0..n-1.  The order is given by its cover
relation (the Hasse diagram): a pair (u, v) means "v covers u", i.e. u < v
with nothing strictly between.  The reflexive-transitive closure is cached as
one bitmask per element, which keeps every structural query (weights, down
sets, antichain checks) a couple of integer operations.

Posets are immutable after construction and safe to share between threads;
all module functions are pure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    CycleError,
    EmptySetError,
    NotForestError,
    RangeError,
    RedundantCoverError,
    SizeError,
    UndefinedError,
)

GAMMA_MAX_N = 16
DECISION_DEPTH_MAX_N = 12
IDEAL_COUNT_MAX_N = 24


@dataclass(frozen=True)
class Poset:
    """An immutable finite poset on elements 0..n-1.

    ``down[v]`` / ``up[v]`` are bitmasks of {x : x <= v} and {x : v <= x}
    (reflexive).  ``covers`` is the transitive reduction that generated them.
    """

    n: int
    covers: frozenset[tuple[int, int]]
    down: tuple[int, ...] = field(compare=False)
    up: tuple[int, ...] = field(compare=False)

    def leq(self, u: int, v: int) -> bool:
        return bool(self.down[v] >> u & 1)

    def lt(self, u: int, v: int) -> bool:
        return u != v and self.leq(u, v)

    def comparable(self, u: int, v: int) -> bool:
        return self.leq(u, v) or self.leq(v, u)

    @property
    def elements(self) -> range:
        return range(self.n)

    def parents(self, x: int) -> list[int]:
        """Elements covering x."""
        return sorted(v for (u, v) in self.covers if u == x)

    def children(self, x: int) -> list[int]:
        """Elements covered by x."""
        return sorted(u for (u, v) in self.covers if v == x)

    def down_set(self, v: int) -> int:
        """Bitmask of {x : x <= v}."""
        return self.down[v]

    def up_set(self, v: int) -> int:
        return self.up[v]

    def is_forest(self) -> bool:
        """True when every element has at most one cover parent."""
        seen = set()
        for (u, _v) in self.covers:
            if u in seen:
                return False
            seen.add(u)
        return True

    def topological_order(self) -> list[int]:
        """Elements sorted so that u < v implies u comes first."""
        return sorted(self.elements, key=lambda v: bin(self.down[v]).count("1"))


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def mask_elements(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _closure_masks(n: int, covers: Iterable[tuple[int, int]]):
    """Topologically sort the cover DAG and return (down, up) closure masks.

    Raises CycleError when the cover graph is cyclic.
    """
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for (u, v) in covers:
        succ[u].append(v)
        indeg[v] += 1
    order = [v for v in range(n) if indeg[v] == 0]
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
    if len(order) != n:
        raise CycleError("cover graph contains a cycle")
    down = [1 << v for v in range(n)]
    for v in order:
        for w in succ[v]:
            down[w] |= down[v]
    up = [1 << v for v in range(n)]
    for v in reversed(order):
        for w in succ[v]:
            up[v] |= up[w]
    return tuple(down), tuple(up)


def build_poset(n: int, covers: Iterable[tuple[int, int]]) -> Poset:
    """Validate a Hasse diagram and build the poset it generates.

    Cover pairs that are transitively implied are rejected rather than
    silently dropped, so callers must supply a true transitive reduction.
    """
    if n < 0:
        raise RangeError(f"element count must be >= 0, got {n}")
    pairs = set()
    for (u, v) in covers:
        if not (0 <= u < n and 0 <= v < n):
            raise RangeError(f"cover pair ({u}, {v}) out of range for n={n}")
        if u == v:
            raise CycleError(f"self-pair ({u}, {u})")
        pairs.add((u, v))
    down, up = _closure_masks(n, pairs)
    for (u, v) in pairs:
        between = down[v] & up[u] & ~(1 << u) & ~(1 << v)
        if between:
            w = mask_elements(between)[0]
            raise RedundantCoverError(
                f"cover ({u}, {v}) is implied via intermediate element {w}"
            )
    return Poset(n=n, covers=frozenset(pairs), down=down, up=up)


def poset_from_leq_pairs(n: int, pairs: Iterable[tuple[int, int]]) -> Poset:
    """Build a poset from arbitrary strict relations by transitive reduction."""
    rel = set(p for p in pairs if p[0] != p[1])
    down, up = _closure_masks(n, rel)
    covers = []
    for (u, v) in {(u, v) for v in range(n) for u in mask_elements(down[v] & ~(1 << v))}:
        if not (down[v] & up[u] & ~(1 << u) & ~(1 << v)):
            covers.append((u, v))
    return build_poset(n, covers)


# ---------------------------------------------------------------------------
# Width, height, Dilworth decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainDecomposition:
    """A partition of a poset into disjoint chains (a Dilworth witness)."""

    chains: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.chains)

    def max_chain_length(self) -> int:
        return max((len(c) for c in self.chains), default=0)

    def chain_of(self, x: int) -> int:
        for i, c in enumerate(self.chains):
            if x in c:
                return i
        raise RangeError(f"element {x} not covered by decomposition")


def _hopcroft_karp(n: int, adj: Sequence[Sequence[int]]) -> list[int | None]:
    """Maximum bipartite matching; returns match_left[u] = v or None."""
    INF = float("inf")
    match_l: list[int | None] = [None] * n
    match_r: list[int | None] = [None] * n
    dist = [0.0] * n

    def bfs() -> bool:
        queue = []
        for u in range(n):
            if match_l[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                w = match_r[v]
                if w is None:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in range(n):
            if match_l[u] is None:
                dfs(u)
    return match_l


def dilworth_decomposition(p: Poset) -> ChainDecomposition:
    """Partition the poset into w(p) disjoint chains.

    Computed as a minimum path cover of the strict comparability DAG via
    maximum bipartite matching, which meets Dilworth's bound.
    """
    n = p.n
    adj = [mask_elements(p.up[u] & ~(1 << u)) for u in range(n)]
    match_l = _hopcroft_karp(n, adj)
    has_pred = [False] * n
    for u in range(n):
        v = match_l[u]
        if v is not None:
            has_pred[v] = True
    chains = []
    for start in range(n):
        if not has_pred[start]:
            chain = [start]
            cur = match_l[start]
            while cur is not None:
                chain.append(cur)
                cur = match_l[cur]
            chains.append(tuple(chain))
    return ChainDecomposition(chains=tuple(chains))


def width(p: Poset) -> int:
    """Maximum antichain size, via the chain count of the Dilworth cover."""
    if p.n == 0:
        return 0
    return len(dilworth_decomposition(p))


def height(p: Poset) -> int:
    """Maximum chain size, via longest path in the cover DAG."""
    if p.n == 0:
        return 0
    order = p.topological_order()
    best = [1] * p.n
    children = [p.children(v) for v in range(p.n)]
    for v in order:
        for u in children[v]:
            best[v] = max(best[v], best[u] + 1)
    return max(best)


def max_antichain_bruteforce(p: Poset) -> int:
    """Exhaustive maximum-antichain size; the independent oracle for width."""
    if p.n > 16:
        raise SizeError(f"brute-force antichain limited to n <= 16, got {p.n}")
    comparable = [
        (p.down[v] | p.up[v]) & ~(1 << v) for v in range(p.n)
    ]
    best = 0
    for mask in range(1 << p.n):
        size = bin(mask).count("1")
        if size <= best:
            continue
        ok = True
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            if comparable[v] & mask:
                ok = False
                break
            m &= m - 1
        if ok:
            best = size
    return best


# ---------------------------------------------------------------------------
# Gamma (version-space elimination rate)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaResult:
    """Exact value of the elimination-rate parameter with recomputable witnesses."""

    value: Fraction
    witness_subset: frozenset[int]
    witness_query: tuple[int, int]


def gamma_bruteforce(p: Poset) -> GammaResult:
    """Exact min-over-subsets / max-over-queries elimination fraction.

    The function family contains one two-argument Boolean oracle per candidate
    marked element; queries range over (x, z) with z in {0, 1}.  z=0 asks
    "is the marked element below x", z=1 asks "is it equal to x".
    """
    n = p.n
    if n < 2:
        raise UndefinedError("gamma requires at least 2 elements")
    if n > GAMMA_MAX_N:
        raise SizeError(f"gamma brute force limited to n <= {GAMMA_MAX_N}, got {n}")
    query_masks = []
    for x in range(n):
        query_masks.append(((x, 0), p.down[x]))
        query_masks.append(((x, 1), 1 << x))
    best_value: Fraction | None = None
    best_subset = 0
    best_query = (0, 0)
    for subset in range(1, 1 << n):
        s = bin(subset).count("1")
        if s < 2:
            continue
        cap = s // 2
        sub_best = 0
        sub_query = (0, 0)
        for q, qmask in query_masks:
            ones = bin(subset & qmask).count("1")
            side = min(ones, s - ones)
            if side > sub_best:
                sub_best = side
                sub_query = q
                if side == cap:
                    break
        val = Fraction(sub_best, s)
        if best_value is None or val < best_value:
            best_value = val
            best_subset = subset
            best_query = sub_query
    assert best_value is not None
    return GammaResult(
        value=best_value,
        witness_subset=frozenset(mask_elements(best_subset)),
        witness_query=best_query,
    )


# ---------------------------------------------------------------------------
# Residual-set helpers used by the forest search
# ---------------------------------------------------------------------------


def weight(p: Poset, t_mask: int, v: int) -> int:
    """Number of elements of T lying at or below v."""
    return bin(p.down[v] & t_mask).count("1")


def central_element(p: Poset, t: Iterable[int] | int) -> int:
    """Element of T with the largest weight not exceeding ceil(|T|/2).

    Ties break toward the lowest element id so traces are deterministic.
    """
    t_mask = t if isinstance(t, int) else mask_of(t)
    size = bin(t_mask).count("1")
    if size == 0:
        raise EmptySetError("central_element of empty set")
    cap = (size + 1) // 2
    best_w = -1
    best_v = -1
    for v in mask_elements(t_mask):
        w = bin(p.down[v] & t_mask).count("1")
        if w <= cap and w > best_w:
            best_w = w
            best_v = v
    return best_v


def maximal_elements(p: Poset, t: Iterable[int] | int) -> list[int]:
    """Elements of T with no strict upper bound inside T."""
    t_mask = t if isinstance(t, int) else mask_of(t)
    out = []
    for v in mask_elements(t_mask):
        if not (p.up[v] & t_mask & ~(1 << v)):
            out.append(v)
    return out


def siblings(p: Poset, t: Iterable[int] | int, x: int) -> list[int]:
    """Elements of T covered by the unique element that covers x.

    The set includes x itself.  Raises NotForestError when x does not have
    exactly one cover parent.
    """
    t_mask = t if isinstance(t, int) else mask_of(t)
    parents = p.parents(x)
    if len(parents) != 1:
        raise NotForestError(
            f"element {x} has {len(parents)} cover parents; siblings needs exactly 1"
        )
    parent = parents[0]
    return [y for y in p.children(parent) if t_mask >> y & 1]


# ---------------------------------------------------------------------------
# Exact decision-tree depth of the marking game
# ---------------------------------------------------------------------------


def exact_decision_depth(p: Poset) -> int:
    """Minimax query count needed to classify every element against the target.

    Game model: a query to an unmarked element s lets the adversary commit the
    whole down-set of s as "below the target" or the whole up-set as "above";
    the game ends when all elements are classified, which certifies both the
    found and the not-found outcome.
    """
    if p.n > DECISION_DEPTH_MAX_N:
        raise SizeError(
            f"decision depth limited to n <= {DECISION_DEPTH_MAX_N}, got {p.n}"
        )
    down = p.down
    up = p.up
    memo: dict[int, int] = {0: 0}

    def value(remaining: int) -> int:
        cached = memo.get(remaining)
        if cached is not None:
            return cached
        best = p.n + 1
        m = remaining
        while m:
            s = (m & -m).bit_length() - 1
            m &= m - 1
            worst = max(
                value(remaining & ~down[s]),
                value(remaining & ~up[s]),
            )
            if worst + 1 < best:
                best = worst + 1
                if best == 1:
                    break
        memo[remaining] = best
        return best

    return value((1 << p.n) - 1)


# ---------------------------------------------------------------------------
# Ideal counting
# ---------------------------------------------------------------------------


def count_ideals(p: Poset) -> int:
    """Number of down-closed subsets, by divide and conquer on one element."""
    if p.n > IDEAL_COUNT_MAX_N:
        raise SizeError(f"ideal count limited to n <= {IDEAL_COUNT_MAX_N}, got {p.n}")
    down = p.down
    up = p.up
    memo: dict[int, int] = {0: 1}

    def count(mask: int) -> int:
        cached = memo.get(mask)
        if cached is not None:
            return cached
        x = (mask & -mask).bit_length() - 1
        result = count(mask & ~up[x]) + count(mask & ~down[x])
        memo[mask] = result
        return result

    return count((1 << p.n) - 1)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def chain(n: int) -> Poset:
    if n < 0:
        raise RangeError("chain size must be >= 0")
    return build_poset(n, [(i, i + 1) for i in range(n - 1)])


def antichain(n: int) -> Poset:
    if n < 0:
        raise RangeError("antichain size must be >= 0")
    return build_poset(n, [])


def grid_poset(d: int, m: int) -> Poset:
    """The poset of a d-dimensional m x ... x m array sorted along every axis.

    Cell ids are row-major; covers join cells differing by +1 in one axis.
    """
    if d < 1 or m < 1:
        raise RangeError("grid dimensions must be positive")
    n = m**d
    strides = [m ** (d - 1 - k) for k in range(d)]

    covers = []
    for cell in range(n):
        rest = cell
        coords = []
        for s in strides:
            coords.append(rest // s)
            rest %= s
        for k in range(d):
            if coords[k] + 1 < m:
                covers.append((cell, cell + strides[k]))
    return build_poset(n, covers)


def rect_grid_poset(r: int, c: int) -> Poset:
    """Rectangular 2-dimensional grid poset with row-major ids."""
    if r < 1 or c < 1:
        raise RangeError("grid dimensions must be positive")
    covers = []
    for i in range(r):
        for j in range(c):
            if j + 1 < c:
                covers.append((i * c + j, i * c + j + 1))
            if i + 1 < r:
                covers.append((i * c + j, (i + 1) * c + j))
    return build_poset(r * c, covers)


def forest_poset(arity: int, levels: int) -> Poset:
    """Complete arity-ary tree with the given number of levels, rooted at the top.

    Ids are assigned breadth-first from the root (id 0).
    """
    if arity < 1 or levels < 1:
        raise RangeError("arity and levels must be positive")
    if arity == 1:
        n = levels
    else:
        n = (arity**levels - 1) // (arity - 1)
    covers = []
    for child in range(1, n):
        parent = (child - 1) // arity
        covers.append((child, parent))
    return build_poset(n, covers)


def random_poset(n: int, edge_density: float, seed: int) -> Poset:
    """Random DAG on 0..n-1 (edges only upward in id), reduced to covers."""
    if n < 0:
        raise RangeError("size must be >= 0")
    if not (0.0 <= edge_density <= 1.0):
        raise RangeError("edge density must be in [0, 1]")
    rng = random.Random(seed)
    pairs = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < edge_density
    ]
    return poset_from_leq_pairs(n, pairs)


def random_forest(n: int, seed: int, root_prob: float = 0.2) -> Poset:
    """Random forest: each element may pick one cover parent of lower id."""
    if n < 0:
        raise RangeError("size must be >= 0")
    rng = random.Random(seed)
    covers = []
    for child in range(1, n):
        if rng.random() >= root_prob:
            covers.append((child, rng.randrange(child)))
    return build_poset(n, covers)


def ordinal_sum(*layers: Poset) -> tuple[Poset, list[int]]:
    """Stack posets so every element of a layer lies below every later layer.

    Returns the stacked poset and the id offset of each layer.  Hasse edges
    between consecutive layers connect lower-layer maximal elements to
    upper-layer minimal elements.
    """
    offsets = []
    total = 0
    for layer in layers:
        offsets.append(total)
        total += layer.n
    covers: list[tuple[int, int]] = []
    for off, layer in zip(offsets, layers):
        covers.extend((u + off, v + off) for (u, v) in layer.covers)
    prev: tuple[int, Poset] | None = None
    for off, layer in zip(offsets, layers):
        if layer.n == 0:
            continue
        if prev is not None:
            lower_off, lower = prev
            tops = maximal_elements(lower, range(lower.n))
            bottoms = minimal_elements(layer, range(layer.n))
            covers.extend((t + lower_off, b + off) for t in tops for b in bottoms)
        prev = (off, layer)
    return build_poset(total, covers), offsets


def minimal_elements(p: Poset, t: Iterable[int] | int) -> list[int]:
    """Elements of T with no strict lower bound inside T."""
    t_mask = t if isinstance(t, int) else mask_of(t)
    return [
        v for v in mask_elements(t_mask) if not (p.down[v] & t_mask & ~(1 << v))
    ]


# Named poset from the worked section-hardness example: a 5-element poset
# whose 4-element extension (complete bipartite 2+2) is strictly harder.
def example_poset_s() -> Poset:
    return build_poset(5, [(0, 2), (1, 2), (2, 3), (2, 4)])


def example_poset_t() -> Poset:
    return build_poset(4, [(0, 2), (0, 3), (1, 2), (1, 3)])


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def format_poset_text(p: Poset) -> str:
    """Serialize to the line format ``poset <n>`` + one ``u v`` line per cover."""
    lines = [f"poset {p.n}"]
    lines.extend(f"{u} {v}" for (u, v) in sorted(p.covers))
    return "\n".join(lines) + "\n"


def parse_poset_text(text: str) -> Poset:
    """Parse the poset text format; '#' comments and blank lines are ignored."""
    n = None
    covers = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            head = line.split()
            if len(head) != 2 or head[0] != "poset":
                raise RangeError(f"expected 'poset <n>' header, got {raw!r}")
            n = int(head[1])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise RangeError(f"expected '<u> <v>' cover line, got {raw!r}")
        covers.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise RangeError("missing 'poset <n>' header")
    return build_poset(n, covers)
