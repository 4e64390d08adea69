"""Row/column-sorted integer arrays and their generators.

A SortedArray2D is ascending along every row and every column, so viewed as a
poset the cells form a 2-dimensional grid order.  Generators produce either
fully random instances (random linear extension of the grid order; rich but
quadratic to build) or structured random instances via the x_i + y_j sum
construction, which is linear-time and keeps all rows and columns strictly
ascending with distinct entries.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import RangeError, SizeError, UnsortedInput
from .oracles import QueryLedger


@dataclass(frozen=True)
class SortedArray2D:
    rows: int
    cols: int
    cells: tuple[tuple[int, ...], ...]
    distinct: bool = True

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise RangeError("array dimensions must be positive")
        if len(self.cells) != self.rows or any(len(r) != self.cols for r in self.cells):
            raise RangeError("cell grid does not match declared dimensions")
        for i in range(self.rows):
            for j in range(self.cols):
                v = self.cells[i][j]
                if j + 1 < self.cols and self._bad(v, self.cells[i][j + 1]):
                    raise UnsortedInput(f"row {i} not ascending at column {j}")
                if i + 1 < self.rows and self._bad(v, self.cells[i + 1][j]):
                    raise UnsortedInput(f"column {j} not ascending at row {i}")

    def _bad(self, a: int, b: int) -> bool:
        return a >= b if self.distinct else a > b

    def entry(self, i: int, j: int) -> int:
        return self.cells[i][j]

    @property
    def size(self) -> int:
        return max(self.rows, self.cols)

    def find_value(self, value: int) -> tuple[int, int] | None:
        """Uncharged saddleback scan; bookkeeping only."""
        i, j = 0, self.cols - 1
        while i < self.rows and j >= 0:
            v = self.cells[i][j]
            if v == value:
                return (i, j)
            if v < value:
                i += 1
            else:
                j -= 1
        return None


class Array2DOracle:
    """Charged access to a 2D array-like object (rows, cols, entry)."""

    def __init__(self, array, ledger: QueryLedger | None = None, label: str = "array"):
        self.array = array
        self.ledger = ledger if ledger is not None else QueryLedger()
        self.label = label

    @property
    def rows(self) -> int:
        return self.array.rows

    @property
    def cols(self) -> int:
        return self.array.cols

    def query(self, i: int, j: int) -> int:
        self.ledger.add_classical(1, self.label)
        return self.array.entry(i, j)

    def peek(self, i: int, j: int) -> int:
        return self.array.entry(i, j)


def parse_array_csv(text: str) -> SortedArray2D:
    """Row-major CSV of integers."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(tuple(int(tok) for tok in line.split(",")))
    if not rows:
        raise RangeError("empty array CSV")
    values = [v for row in rows for v in row]
    distinct = len(set(values)) == len(values)
    return SortedArray2D(
        rows=len(rows), cols=len(rows[0]), cells=tuple(rows), distinct=distinct
    )


def format_array_csv(array: SortedArray2D) -> str:
    return "\n".join(",".join(str(v) for v in row) for row in array.cells) + "\n"


# The 3x3 array used throughout the worked examples and its 5x5 companion.
FIGURE_GRID_3X3 = SortedArray2D(
    rows=3, cols=3, cells=((1, 3, 6), (2, 4, 8), (5, 7, 9))
)

FIGURE_GRID_5X5 = SortedArray2D(
    rows=5,
    cols=5,
    cells=(
        (1, 3, 5, 10, 13),
        (2, 4, 7, 11, 14),
        (6, 8, 9, 15, 21),
        (12, 16, 17, 20, 24),
        (18, 19, 22, 23, 25),
    ),
)


def random_sorted_array(
    rows: int,
    cols: int,
    seed,
    method: str = "sum",
    value_step: int = 3,
) -> SortedArray2D:
    """Random distinct array ascending along rows and columns.

    method="sum": cell(i,j) = (x_i + y_j) * rows + i with strictly increasing
    random x, y; linear-time, suitable for large instances.
    method="extension": values 1..r*c placed along a random linear extension
    of the grid order; richer but O((r*c)^2)-ish, for small instances.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    if rows < 1 or cols < 1:
        raise RangeError("array dimensions must be positive")
    if method == "sum":
        # even values only, so v+1 of any cell is a guaranteed absent target
        x = _strictly_increasing(rows, rng, value_step)
        y = _strictly_increasing(cols, rng, value_step)
        cells = tuple(
            tuple(2 * ((x[i] + y[j]) * rows + i) for j in range(cols))
            for i in range(rows)
        )
        return SortedArray2D(rows=rows, cols=cols, cells=cells)
    if method == "extension":
        if rows * cols > 4096:
            raise SizeError("extension method limited to 4096 cells")
        order = _random_grid_extension(rows, cols, rng)
        values = [[0] * cols for _ in range(rows)]
        for rank, (i, j) in enumerate(order, start=1):
            values[i][j] = rank
        return SortedArray2D(
            rows=rows, cols=cols, cells=tuple(tuple(r) for r in values)
        )
    raise RangeError(f"unknown generation method {method!r}")


def _strictly_increasing(count: int, rng: random.Random, step: int) -> list[int]:
    out = []
    cur = 0
    for _ in range(count):
        cur += rng.randrange(1, step + 1)
        out.append(cur)
    return out


def _random_grid_extension(rows: int, cols: int, rng: random.Random):
    """Random linear extension of the grid order via frontier sampling."""
    filled = [[False] * cols for _ in range(rows)]

    def ready(i: int, j: int) -> bool:
        return (i == 0 or filled[i - 1][j]) and (j == 0 or filled[i][j - 1])

    frontier = [(0, 0)]
    queued = {(0, 0)}
    order = []
    while frontier:
        pick = rng.randrange(len(frontier))
        frontier[pick], frontier[-1] = frontier[-1], frontier[pick]
        (i, j) = frontier.pop()
        filled[i][j] = True
        order.append((i, j))
        for (ni, nj) in ((i + 1, j), (i, j + 1)):
            if (
                ni < rows
                and nj < cols
                and not filled[ni][nj]
                and (ni, nj) not in queued
                and ready(ni, nj)
            ):
                frontier.append((ni, nj))
                queued.add((ni, nj))
    return order


def absent_value(array: SortedArray2D, rng: random.Random) -> int:
    """An absent value adjacent to a uniformly random cell's value.

    Using rank-uniform rather than value-uniform absent targets keeps the
    search contour representative of the whole array.
    """
    for _ in range(64):
        i = rng.randrange(array.rows)
        j = rng.randrange(array.cols)
        v = array.cells[i][j] + 1
        if array.find_value(v) is None:
            return v
    return array.cells[-1][-1] + 1


@dataclass(frozen=True)
class NdSortedArray:
    """A d-dimensional m x ... x m array ascending along every axis."""

    d: int
    m: int
    flat: tuple[int, ...]

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise RangeError("dimensions must be positive")
        if len(self.flat) != self.m**self.d:
            raise RangeError("flat value count does not match dimensions")

    def index(self, coords) -> int:
        idx = 0
        for c in coords:
            idx = idx * self.m + c
        return idx

    def entry(self, coords) -> int:
        return self.flat[self.index(coords)]

    def slice2d(self, suffix: tuple[int, ...]) -> "NdSlice2D":
        """The m x m slice with trailing coordinates fixed to ``suffix``."""
        if len(suffix) != self.d - 2:
            raise RangeError("slice suffix must fix all but the first two axes")
        return NdSlice2D(self, suffix)

    def slice_count(self) -> int:
        return self.m ** (self.d - 2)

    def suffix_of(self, slice_index: int) -> tuple[int, ...]:
        coords = []
        for _ in range(self.d - 2):
            coords.append(slice_index % self.m)
            slice_index //= self.m
        return tuple(reversed(coords))

    def find_value(self, value: int):
        for idx, v in enumerate(self.flat):
            if v == value:
                coords = []
                rest = idx
                for _ in range(self.d):
                    coords.append(rest % self.m)
                    rest //= self.m
                return tuple(reversed(coords))
        return None


@dataclass(frozen=True)
class NdSlice2D:
    parent: NdSortedArray
    suffix: tuple[int, ...]

    @property
    def rows(self) -> int:
        return self.parent.m

    @property
    def cols(self) -> int:
        return self.parent.m

    def entry(self, i: int, j: int) -> int:
        return self.parent.entry((i, j) + self.suffix)

    def find_value(self, value: int) -> tuple[int, int] | None:
        i, j = 0, self.cols - 1
        while i < self.rows and j >= 0:
            v = self.entry(i, j)
            if v == value:
                return (i, j)
            if v < value:
                i += 1
            else:
                j -= 1
        return None


def random_nd_sorted_array(d: int, m: int, seed, cell_budget: int = 1 << 22) -> NdSortedArray:
    """Random distinct d-dimensional sorted array via the sum construction."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    n = m**d
    if n > cell_budget:
        raise SizeError(f"{m}^{d} cells exceed the configured budget {cell_budget}")
    axes = [_strictly_increasing(m, rng, 3) for _ in range(d)]
    flat = [0] * n
    for idx in range(n):
        rest = idx
        total = 0
        for k in range(d - 1, -1, -1):
            total += axes[k][rest % m]
            rest //= m
        flat[idx] = total * n + idx
    return NdSortedArray(d=d, m=m, flat=tuple(flat))
