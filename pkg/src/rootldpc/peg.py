"""Constrained progressive edge growth.

Edges are placed column by column: a bipartite subtree is grown from the
target variable node, restricted to the check nodes its indicator mask
allows, and the new edge goes to a uniformly random minimum-weight check
among those the tree has not absorbed.  A quasi-cyclic variant places one
edge per column group and replicates it diagonally across the sub-block,
then retires that sub-block from the group's mask.
"""

from __future__ import annotations

import numpy as np

from .gf2 import BitMatrix

# Safety bound on subtree depth; the two natural stopping rules terminate
# far earlier on any sane graph.
_DEPTH_CAP_FACTOR = 2


class NoCandidateError(RuntimeError):
    """Every allowed check already neighbors the column (over-constrained)."""

    def __init__(self, column: int):
        super().__init__(f"no candidate check for column {column}")
        self.column = column


class NonDivisibleDimensionsError(ValueError):
    """Matrix dimensions are not multiples of the sub-block size."""


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


class PlacementState:
    """Mutable Tanner graph under construction plus the random stream.

    check_weights mirrors the current row weights; it is updated on every
    edge insertion so min-weight selection never rescans the graph.
    """

    def __init__(self, m: int, n: int, init: BitMatrix | None, rng):
        self.m = m
        self.n = n
        self.rng = _as_rng(rng)
        self.var_adj = [[] for _ in range(n)]
        self.check_adj = [[] for _ in range(m)]
        self.check_weights = np.zeros(m, dtype=np.int64)
        if init is not None:
            if init.rows != m or init.cols != n:
                raise ValueError("init matrix has wrong dimensions")
            for c in range(n):
                for r in init.col(c):
                    self.add_edge(r, c)

    def add_edge(self, r: int, c: int) -> None:
        if r in self.var_adj[c]:
            raise ValueError(f"duplicate edge ({r}, {c})")
        self.var_adj[c].append(r)
        self.check_adj[r].append(c)
        self.check_weights[r] += 1

    def freeze(self) -> BitMatrix:
        edges = [(r, c) for c in range(self.n) for r in self.var_adj[c]]
        return BitMatrix(self.m, self.n, edges)


def expand_subtree(state: PlacementState, v: int, mask) -> tuple[set, int]:
    """Grow the bipartite subtree of v over mask-allowed checks.

    Expansion stops when the tree holds every allowed check it can still
    absorb without covering them all, or when a level adds nothing.  The
    direct neighbors of v always belong to the tree, so the complement of
    the returned set never readmits an existing edge.

    Returns (checks inside the tree, depth in check levels).
    """
    reached, depth, _ = _expand(state, v, np.asarray(mask, dtype=bool))
    return reached, depth


def _expand(state: PlacementState, v: int, mask: np.ndarray):
    var_adj = state.var_adj
    check_adj = state.check_adj
    n_allowed = int(mask.sum())

    in_tree = np.zeros(state.m, dtype=bool)
    seen_var = np.zeros(state.n, dtype=bool)
    seen_var[v] = True

    tree: list[int] = []
    for c in var_adj[v]:
        if mask[c] and not in_tree[c]:
            in_tree[c] = True
            tree.append(c)
    depth = 1 if tree else 0
    if len(tree) == n_allowed:
        # every allowed check is already adjacent to v
        return set(tree), depth, []

    frontier_checks = tree
    depth_cap = _DEPTH_CAP_FACTOR * state.n
    while frontier_checks and depth < depth_cap:
        new_vars = []
        for c in frontier_checks:
            for u in check_adj[c]:
                if not seen_var[u]:
                    seen_var[u] = True
                    new_vars.append(u)
        new_checks = []
        for u in new_vars:
            for c in var_adj[u]:
                if mask[c] and not in_tree[c]:
                    in_tree[c] = True
                    new_checks.append(c)
        if not new_checks:
            break
        if len(tree) + len(new_checks) == n_allowed:
            # the next level would swallow every allowed check; stop at the
            # current tree so its complement is exactly that last level
            in_tree[new_checks] = False
            return set(tree), depth, new_checks
        tree = tree + new_checks
        frontier_checks = new_checks
        depth += 1
    return set(tree), depth, []


def candidate_checks(state: PlacementState, v: int, mask) -> list:
    """Allowed checks outside the subtree of v, cheapest route for callers."""
    mask = np.asarray(mask, dtype=bool)
    reached, _, last_level = _expand(state, v, mask)
    if last_level:
        return last_level
    allowed = np.nonzero(mask)[0]
    return [int(c) for c in allowed if c not in reached]


def select_check(state: PlacementState, candidates, mask=None) -> int:
    """Uniformly random minimum-weight check among the candidates."""
    cand = list(candidates)
    if not cand:
        raise NoCandidateError(-1)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        assert all(mask[c] for c in cand), "candidate outside indicator mask"
    weights = state.check_weights[cand]
    best = weights.min()
    pool = [c for c, w in zip(cand, weights) if w == best]
    if len(pool) == 1:
        return int(pool[0])
    return int(pool[state.rng.integers(len(pool))])


def peg_construct(
    m: int,
    n: int,
    degrees,
    masks,
    init: BitMatrix | None = None,
    rng=0,
) -> BitMatrix:
    """Place degrees[j] new edges on each column j under its indicator mask.

    Columns are processed in index order; callers arrange their target
    weights in non-decreasing order.  The output contains init as a
    subset, and every new edge lands on a mask-allowed row.
    """
    state = PlacementState(m, n, init, rng)
    degrees = list(degrees)
    if len(degrees) != n:
        raise ValueError("degree sequence length must equal column count")
    for v in range(n):
        d = degrees[v]
        if d == 0:
            continue
        mask = np.asarray(masks[v], dtype=bool)
        if mask.shape != (m,):
            raise ValueError(f"mask for column {v} has wrong length")
        for _ in range(d):
            if not state.var_adj[v]:
                # fresh column: the subtree is empty, every allowed check
                # is a candidate
                cand = np.nonzero(mask)[0].tolist()
            else:
                cand = candidate_checks(state, v, mask)
            if not cand:
                raise NoCandidateError(v)
            c = select_check(state, cand, mask)
            state.add_edge(c, v)
    return state.freeze()


def _block_mask(mask: np.ndarray, n_block: int, m_blocks: int) -> np.ndarray:
    """Collapse a check-level mask to block-row level; segments must be uniform."""
    seg = mask.reshape(m_blocks, n_block)
    uniform = (seg == seg[:, :1]).all(axis=1)
    if not uniform.all():
        raise ValueError("indicator mask is not uniform within sub-blocks")
    return seg[:, 0].copy()


def qc_peg_construct(
    m: int,
    n: int,
    block_size: int,
    group_degrees,
    group_masks,
    init: BitMatrix | None = None,
    rng=0,
    parity_start: int | None = None,
) -> BitMatrix:
    """Quasi-cyclic placement: each column-group placement fills one sub-block.

    The first edge of a placement is chosen for the group's leading column;
    the remaining block_size - 1 edges replicate it along the diagonal,
    (row + k mod n, col + k), so every touched sub-block becomes a circulant
    permutation.  The sub-block is then retired from the group's mask.
    Sub-blocks already occupied by init are retired up front.

    Groups whose leading column lies at or beyond parity_start take their
    first placement directly on a random minimum-total-weight allowed
    sub-block (with a random row inside) instead of growing a subtree.
    """
    if m % block_size or n % block_size:
        raise NonDivisibleDimensionsError(
            f"{m}x{n} not divisible by block size {block_size}"
        )
    nb = block_size
    m_blocks = m // nb
    n_groups = n // nb
    group_degrees = list(group_degrees)
    if len(group_degrees) != n_groups:
        raise ValueError("need one degree per column group")

    state = PlacementState(m, n, init, rng)
    rng = state.rng

    # block-level masks, with init-occupied sub-blocks nulled: they count as
    # already placed
    block_masks = []
    for g in range(n_groups):
        mask = np.asarray(group_masks[g], dtype=bool)
        if mask.shape != (m,):
            raise ValueError(f"mask for group {g} has wrong length")
        bm = _block_mask(mask, nb, m_blocks)
        for col in range(g * nb, (g + 1) * nb):
            for r in state.var_adj[col]:
                bm[r // nb] = False
        block_masks.append(bm)

    for g in range(n_groups):
        v0 = g * nb
        bm = block_masks[g]
        for k in range(group_degrees[g]):
            allowed_blocks = np.nonzero(bm)[0]
            if allowed_blocks.size == 0:
                raise NoCandidateError(v0)
            random_first = (
                parity_start is not None and v0 >= parity_start and k == 0
            )
            if random_first:
                # random placement among minimum-total-weight sub-blocks
                totals = np.array(
                    [
                        state.check_weights[b * nb : (b + 1) * nb].sum()
                        for b in allowed_blocks
                    ]
                )
                pool = allowed_blocks[totals == totals.min()]
                b = int(pool[rng.integers(len(pool))]) if len(pool) > 1 else int(pool[0])
                r = b * nb + int(rng.integers(nb))
            else:
                check_mask = np.repeat(bm, nb)
                cand = candidate_checks(state, v0, check_mask)
                if not cand:
                    raise NoCandidateError(v0)
                r = select_check(state, cand, check_mask)
                b = r // nb
            # replicate the placement along the diagonal of the sub-block
            r_local = r - b * nb
            for k2 in range(nb):
                state.add_edge(b * nb + (r_local + k2) % nb, v0 + k2)
            bm[b] = False
    return state.freeze()
