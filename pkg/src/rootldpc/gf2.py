"""Sparse binary matrices over GF(2) and the small linear algebra they need.

The parity-check matrices handled here are sparse bipartite adjacency
structures: every consumer (edge-placement, decoding, peeling) iterates
row and column neighborhoods, so the canonical storage is a pair of
adjacency lists.  Dense uint8 arrays are materialized only inside
rank / inversion, which use vectorized XOR elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INFINITE_GIRTH = math.inf


class SingularMatrixError(ValueError):
    """Square GF(2) matrix has no inverse (rank below dimension)."""


class DimensionMismatchError(ValueError):
    """Operands or file contents disagree on matrix dimensions."""


class AlistParseError(ValueError):
    """Malformed alist text; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BitMatrix:
    """Immutable sparse binary matrix with row-wise and column-wise views.

    Edges are (row, col) pairs holding a 1.  Both adjacency directions are
    kept sorted and consistent; duplicates and out-of-range indices are
    rejected at construction.
    """

    __slots__ = ("rows", "cols", "_row_adj", "_col_adj", "n_edges")

    def __init__(self, rows: int, cols: int, edges):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = int(rows)
        self.cols = int(cols)
        row_adj = [[] for _ in range(self.rows)]
        col_adj = [[] for _ in range(self.cols)]
        seen = set()
        for r, c in edges:
            r = int(r)
            c = int(c)
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"edge ({r}, {c}) outside {self.rows}x{self.cols}")
            if (r, c) in seen:
                raise ValueError(f"duplicate edge ({r}, {c})")
            seen.add((r, c))
            row_adj[r].append(c)
            col_adj[c].append(r)
        self._row_adj = tuple(tuple(sorted(a)) for a in row_adj)
        self._col_adj = tuple(tuple(sorted(a)) for a in col_adj)
        self.n_edges = len(seen)

    @classmethod
    def from_dense(cls, arr) -> "BitMatrix":
        a = np.asarray(arr)
        rs, cs = np.nonzero(a)
        return cls(a.shape[0], a.shape[1], zip(rs.tolist(), cs.tolist()))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r, cs in enumerate(self._row_adj):
            if cs:
                out[r, list(cs)] = 1
        return out

    def row(self, r: int) -> tuple:
        return self._row_adj[r]

    def col(self, c: int) -> tuple:
        return self._col_adj[c]

    @property
    def row_adjacency(self) -> tuple:
        return self._row_adj

    @property
    def col_adjacency(self) -> tuple:
        return self._col_adj

    def edge_set(self) -> frozenset:
        return frozenset(
            (r, c) for r, cs in enumerate(self._row_adj) for c in cs
        )

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges as (rows, cols) int arrays sorted by row then column."""
        rs = np.empty(self.n_edges, dtype=np.int64)
        cs = np.empty(self.n_edges, dtype=np.int64)
        i = 0
        for r, adj in enumerate(self._row_adj):
            for c in adj:
                rs[i] = r
                cs[i] = c
                i += 1
        return rs, cs

    def row_weights(self) -> np.ndarray:
        return np.array([len(a) for a in self._row_adj], dtype=np.int64)

    def col_weights(self) -> np.ndarray:
        return np.array([len(a) for a in self._col_adj], dtype=np.int64)

    def has_edge(self, r: int, c: int) -> bool:
        return c in self._row_adj[r]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self._row_adj == other._row_adj
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self._row_adj))

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols}, {self.n_edges} edges)"


# ---------------------------------------------------------------------------
# Block-grid assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Null:
    """All-zeros cell."""


@dataclass(frozen=True)
class Identity:
    """Circulant permutation: ones at (i, (i + shift) mod n)."""

    shift: int = 0


@dataclass(frozen=True)
class Circulant:
    """Circulant with one diagonal per shift offset."""

    shifts: tuple


@dataclass(frozen=True)
class DualDiagonal:
    """Lower bidiagonal accumulator cell: ones at (i, i) and (i, i-1)."""


@dataclass(frozen=True)
class PermutationRandom:
    """Uniformly random permutation drawn from the given seed."""

    seed: int


@dataclass(frozen=True)
class DenseCell:
    """Arbitrary pre-built n x n block."""

    matrix: BitMatrix


@dataclass(frozen=True)
class BlockGrid:
    """Rectangular grid of n x n cell descriptors."""

    block_size: int
    cells: tuple  # tuple of tuples of cell descriptors

    def __post_init__(self):
        if self.block_size < 1:
            raise ValueError("block size must be >= 1")
        if not self.cells or any(len(row) != len(self.cells[0]) for row in self.cells):
            raise ValueError("grid must be rectangular and non-empty")

    @property
    def grid_rows(self) -> int:
        return len(self.cells)

    @property
    def grid_cols(self) -> int:
        return len(self.cells[0])


def make_circulant(n: int, shifts) -> BitMatrix:
    """n x n circulant with ones at (i, (i + s) mod n) for each shift s.

    Row and column weights both equal the number of shifts.
    """
    if n < 1:
        raise ValueError("block size must be >= 1")
    shift_list = list(shifts)
    if not shift_list:
        raise ValueError("shift set must be non-empty")
    if len(set(shift_list)) != len(shift_list):
        raise ValueError("duplicate shifts")
    for s in shift_list:
        if not (0 <= s < n):
            raise ValueError(f"shift {s} outside [0, {n})")
    edges = [(i, (i + s) % n) for s in shift_list for i in range(n)]
    return BitMatrix(n, n, edges)


def dual_diagonal(n: int) -> BitMatrix:
    """Lower bidiagonal n x n accumulator matrix."""
    edges = [(i, i) for i in range(n)] + [(i, i - 1) for i in range(1, n)]
    return BitMatrix(n, n, edges)


def _cell_edges(cell, n: int):
    if isinstance(cell, Null):
        return []
    if isinstance(cell, Identity):
        s = cell.shift % n
        return [(i, (i + s) % n) for i in range(n)]
    if isinstance(cell, Circulant):
        return [(i, (i + s) % n) for s in cell.shifts for i in range(n)]
    if isinstance(cell, DualDiagonal):
        return [(i, i) for i in range(n)] + [(i, i - 1) for i in range(1, n)]
    if isinstance(cell, PermutationRandom):
        perm = np.random.default_rng(cell.seed).permutation(n)
        return [(i, int(perm[i])) for i in range(n)]
    if isinstance(cell, DenseCell):
        m = cell.matrix
        if m.rows != n or m.cols != n:
            raise ValueError("dense cell has wrong block size")
        return list(m.edge_set())
    raise TypeError(f"unknown cell type {type(cell)!r}")


def assemble(grid: BlockGrid) -> BitMatrix:
    """Expand a block grid into one sparse matrix.

    Output dimensions are (grid_rows * n) x (grid_cols * n); block (i, j)
    of the output is the expansion of cell (i, j).
    """
    n = grid.block_size
    edges = []
    for bi, row in enumerate(grid.cells):
        for bj, cell in enumerate(row):
            base_r = bi * n
            base_c = bj * n
            for r, c in _cell_edges(cell, n):
                edges.append((base_r + r, base_c + c))
    return BitMatrix(grid.grid_rows * n, grid.grid_cols * n, edges)


# ---------------------------------------------------------------------------
# Dense elimination: rank and inverse
# ---------------------------------------------------------------------------

def _forward_eliminate(a: np.ndarray, pivot_cols_limit: int) -> list:
    """In-place forward elimination over GF(2); returns pivot column list."""
    m = a.shape[0]
    pivots = []
    row = 0
    for col in range(pivot_cols_limit):
        if row >= m:
            break
        hits = np.nonzero(a[row:, col])[0]
        if hits.size == 0:
            continue
        p = row + int(hits[0])
        if p != row:
            a[[row, p]] = a[[p, row]]
        below = row + 1 + np.nonzero(a[row + 1:, col])[0]
        if below.size:
            a[below] ^= a[row]
        pivots.append(col)
        row += 1
    return pivots


def rank_gf2(m: BitMatrix) -> int:
    """Rank over GF(2) by Gaussian elimination."""
    if m.rows == 0 or m.cols == 0:
        return 0
    a = m.to_dense()
    return len(_forward_eliminate(a, m.cols))


def pivot_columns(m: BitMatrix, prefer_tail: bool = False) -> list:
    """Column indices of one maximal linearly independent set.

    With prefer_tail, pivots are searched from the last column backwards,
    biasing the independent set toward trailing columns.
    """
    a = m.to_dense()
    if prefer_tail:
        a = a[:, ::-1]
    pivots = _forward_eliminate(a, m.cols)
    if prefer_tail:
        return sorted(m.cols - 1 - p for p in pivots)
    return pivots


def invert_gf2(m: BitMatrix) -> BitMatrix:
    """Inverse over GF(2); raises SingularMatrixError when rank < dimension."""
    if m.rows != m.cols:
        raise DimensionMismatchError("inverse requires a square matrix")
    n = m.rows
    a = np.concatenate([m.to_dense(), np.eye(n, dtype=np.uint8)], axis=1)
    pivots = _forward_eliminate(a, n)
    if len(pivots) < n:
        raise SingularMatrixError(f"rank {len(pivots)} < {n}")
    # back substitution; pivots are exactly columns 0..n-1
    for col in range(n - 1, 0, -1):
        above = np.nonzero(a[:col, col])[0]
        if above.size:
            a[above] ^= a[col]
    return BitMatrix.from_dense(a[:, n:])


def solve_gf2(b: BitMatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve b @ x = rhs over GF(2) for dense rhs (n x k); raises if singular."""
    if b.rows != b.cols:
        raise DimensionMismatchError("solve requires a square matrix")
    n = b.rows
    rhs = np.asarray(rhs, dtype=np.uint8)
    if rhs.ndim == 1:
        rhs = rhs[:, None]
    if rhs.shape[0] != n:
        raise DimensionMismatchError("rhs height mismatch")
    a = np.concatenate([b.to_dense(), rhs], axis=1)
    pivots = _forward_eliminate(a, n)
    if len(pivots) < n:
        raise SingularMatrixError(f"rank {len(pivots)} < {n}")
    for col in range(n - 1, 0, -1):
        above = np.nonzero(a[:col, col])[0]
        if above.size:
            a[above] ^= a[col]
    return a[:, n:]


# ---------------------------------------------------------------------------
# Girth
# ---------------------------------------------------------------------------

@dataclass
class GirthReport:
    """Shortest-cycle lengths in the Tanner graph.

    global_girth is the minimum over per_variable entries; acyclic graphs
    report math.inf.  All finite values are even (the graph is bipartite).
    """

    global_girth: float
    per_variable: list = field(repr=False)


def _shortest_cycle_through_edge(m: BitMatrix, v: int, c0: int, best: float) -> float:
    """Length of the shortest cycle using edge (c0, v), via BFS with the
    edge removed; `best` bounds the search depth."""
    col_adj = m.col_adjacency
    row_adj = m.row_adjacency
    dist_v = {v: 0}
    frontier = [v]
    seen_c = {}
    depth = 0
    while frontier:
        # one var->check->var double step
        if best != INFINITE_GIRTH and depth + 2 > best - 1:
            break
        next_checks = []
        for u in frontier:
            du = dist_v[u]
            for c in col_adj[u]:
                if u == v and c == c0:
                    continue  # removed edge
                if c not in seen_c:
                    seen_c[c] = du + 1
                    if c == c0:
                        return du + 2  # path length + closing edge
                    next_checks.append(c)
        next_vars = []
        for c in next_checks:
            dc = seen_c[c]
            for u in row_adj[c]:
                if u not in dist_v:
                    dist_v[u] = dc + 1
                    next_vars.append(u)
        frontier = next_vars
        depth += 2
    return INFINITE_GIRTH


def girth(m: BitMatrix) -> GirthReport:
    """Per-variable local girth and global girth of the Tanner graph.

    Local girth of variable v is the length of the shortest cycle through
    v, found exactly by removing each incident edge in turn and measuring
    the shortest alternative path back to it.
    """
    per_var = []
    for v in range(m.cols):
        best = INFINITE_GIRTH
        for c in m.col(v):
            cyc = _shortest_cycle_through_edge(m, v, c, best)
            if cyc < best:
                best = cyc
        per_var.append(best)
    global_girth = min(per_var) if per_var else INFINITE_GIRTH
    return GirthReport(global_girth=global_girth, per_variable=per_var)


# ---------------------------------------------------------------------------
# alist interchange format
# ---------------------------------------------------------------------------

def alist_write(m: BitMatrix) -> str:
    """Serialize to alist text.

    Layout: "N M" header, max column/row weights, per-column weights,
    per-row weights, then 1-based index lists padded with zeros to the
    maximum weight.
    """
    col_w = [len(m.col(c)) for c in range(m.cols)]
    row_w = [len(m.row(r)) for r in range(m.rows)]
    max_col = max(col_w, default=0)
    max_row = max(row_w, default=0)
    lines = [
        f"{m.cols} {m.rows}",
        f"{max_col} {max_row}",
        " ".join(str(w) for w in col_w),
        " ".join(str(w) for w in row_w),
    ]
    for c in range(m.cols):
        entries = [r + 1 for r in m.col(c)] + [0] * (max_col - col_w[c])
        lines.append(" ".join(str(e) for e in entries))
    for r in range(m.rows):
        entries = [c + 1 for c in m.row(r)] + [0] * (max_row - row_w[r])
        lines.append(" ".join(str(e) for e in entries))
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int) -> list:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise AlistParseError(f"non-integer token ({exc})", lineno) from None


def alist_read(text: str) -> BitMatrix:
    """Parse alist text back into a BitMatrix.

    Zero padding entries are ignored.  The redundant row lists are checked
    against the column lists; disagreement raises DimensionMismatchError.
    """
    lines = text.splitlines()
    # skip trailing blank lines but keep positions for error reporting
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) < 4:
        raise AlistParseError("truncated header", len(lines) + 1)
    head = _ints(lines[0], 1)
    if len(head) != 2:
        raise AlistParseError("expected 'N M'", 1)
    n, m_rows = head
    if n < 0 or m_rows < 0:
        raise AlistParseError("negative dimension", 1)
    maxw = _ints(lines[1], 2)
    if len(maxw) != 2:
        raise AlistParseError("expected max column/row weights", 2)
    col_w = _ints(lines[2], 3)
    if len(col_w) != n:
        raise AlistParseError(f"expected {n} column weights", 3)
    row_w = _ints(lines[3], 4)
    if len(row_w) != m_rows:
        raise AlistParseError(f"expected {m_rows} row weights", 4)
    if len(lines) < 4 + n + m_rows:
        raise AlistParseError("truncated index lists", len(lines) + 1)

    edges = []
    for c in range(n):
        lineno = 5 + c
        entries = [e for e in _ints(lines[4 + c], lineno) if e != 0]
        if len(entries) != col_w[c]:
            raise AlistParseError(
                f"column {c} lists {len(entries)} entries, weight says {col_w[c]}",
                lineno,
            )
        for e in entries:
            if not (1 <= e <= m_rows):
                raise AlistParseError(f"row index {e} outside [1, {m_rows}]", lineno)
            edges.append((e - 1, c))

    by_row = [[] for _ in range(m_rows)]
    for r, c in edges:
        by_row[r].append(c)
    for r in range(m_rows):
        lineno = 5 + n + r
        entries = [e for e in _ints(lines[4 + n + r], lineno) if e != 0]
        if len(entries) != row_w[r]:
            raise AlistParseError(
                f"row {r} lists {len(entries)} entries, weight says {row_w[r]}",
                lineno,
            )
        for e in entries:
            if not (1 <= e <= n):
                raise AlistParseError(f"column index {e} outside [1, {n}]", lineno)
        if sorted(e - 1 for e in entries) != sorted(by_row[r]):
            raise DimensionMismatchError(
                f"row {r} index list disagrees with column lists"
            )
    return BitMatrix(m_rows, n, edges)
