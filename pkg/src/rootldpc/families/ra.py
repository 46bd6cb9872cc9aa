"""Repeat-accumulate root constructions, single and double accumulator.

The parity region is pinned to dual-diagonal accumulator chains laid out
so that every information group keeps a root check toward each foreign
fading block.  The double-accumulator variant appends a second stage fed
through a random weight-one interleaver block; its first-stage parity
columns are the ones withheld when puncturing back to the nominal rate.

Three-block designs use the longer accumulator response 1/(1 + D + D^b):
an identity band next to a shifted dual diagonal in the parity blocks.
"""

from __future__ import annotations

import numpy as np

from ..gf2 import BitMatrix
from ..peg import peg_construct
from .common import (
    CodeDesign,
    NonDivisibleError,
    block_row_mask,
    build_with_retries,
    dual_diagonal_edges,
    finalize,
    identity_edges,
)


def build_ira_root(n: int, f: int, seed: int) -> CodeDesign:
    if f == 2:
        if n % 4:
            raise NonDivisibleError("F=2 layout needs length divisible by 4")
        build_once = lambda s: _ira_f2(n, s)
    elif f == 3:
        if n % 9:
            raise NonDivisibleError("F=3 layout needs length divisible by 9")
        build_once = lambda s: _ira_f3(n, s)
    else:
        raise ValueError("f must be 2 or 3")
    return build_with_retries(build_once, seed)


def build_iraa_root(n: int, f: int, seed: int, puncture: bool = True) -> CodeDesign:
    if f == 2:
        if n % 6:
            raise NonDivisibleError("two-stage F=2 layout needs length divisible by 6")
        build_once = lambda s: _iraa_f2(n, s, puncture)
    elif f == 3:
        if n % 15:
            raise NonDivisibleError("two-stage F=3 layout needs length divisible by 15")
        build_once = lambda s: _iraa_f3(n, s, puncture)
    else:
        raise ValueError("f must be 2 or 3")
    return build_with_retries(build_once, seed)


# ---------------------------------------------------------------------------
# single accumulator
# ---------------------------------------------------------------------------

def _ira_f2(n: int, seed: int) -> CodeDesign:
    # [ I   H2  0   Hp ]      Hp = dual diagonal
    # [ H2  I   Hp  0  ]
    q = n // 4
    m = n // 2
    rng = np.random.default_rng(seed)

    init_edges = identity_edges(0, 0, q) + identity_edges(q, q, q)
    init_edges += dual_diagonal_edges(0, 3 * q, q)   # (1c, 2p)
    init_edges += dual_diagonal_edges(q, 2 * q, q)   # (2c, 1p)
    init = BitMatrix(m, n, init_edges)

    masks = [block_row_mask(m, q, (1,))] * q + [block_row_mask(m, q, (0,))] * q
    masks += [np.zeros(m, dtype=bool)] * (2 * q)
    degrees = [2] * (2 * q) + [0] * (2 * q)
    h = peg_construct(m, n, degrees, masks, init, rng)

    col_block = np.repeat([1, 2, 1, 2], q)
    is_info = np.zeros(n, dtype=bool)
    is_info[: 2 * q] = True
    return finalize(
        h, col_block, is_info, np.array([], dtype=np.int64),
        f=2, family="ira-root", seed=seed, meta={},
    )


def _f3_parity_edges(chi: int, row_blocks_of, col0: int):
    """Accumulator bands of a three-block design over one parity group.

    The group's 2*chi columns split into a leading half driven by a plain
    dual diagonal (band [DD | 0] on one check block) and a trailing half
    coupled through [I | DD] on another, realizing 1/(1 + D + D^chi).
    """
    row_dd, row_idd = row_blocks_of
    edges = dual_diagonal_edges(row_dd * chi, col0, chi)            # [DD | 0]
    edges += identity_edges(row_idd * chi, col0, chi)               # [I | DD]
    edges += dual_diagonal_edges(row_idd * chi, col0 + chi, chi)
    return edges


# identity block rows per information group, and the H1 block rows the
# edge-growth pass fills (one weight-1 block per phase)
_F3_ID_ROWS = ((0, 1), (2, 3), (4, 5))
_F3_H1_ROWS = ((2, 4), (0, 5), (1, 3))
# (plain-dual-diagonal row, identity+dual-diagonal row) per parity group
_F3_PARITY_ROWS = ((2, 4), (5, 0), (1, 3))


def _ira_f3_structure(chi: int):
    """First-stage edges shared by the one- and two-stage three-block
    layouts; columns [0, 3chi) carry information."""
    init_edges = []
    for g, rows in enumerate(_F3_ID_ROWS):
        for r in rows:
            init_edges += identity_edges(r * chi, g * chi, chi)
    for g, rows in enumerate(_F3_PARITY_ROWS):
        init_edges += _f3_parity_edges(chi, rows, 3 * chi + 2 * g * chi)
    return init_edges


def _ira_f3_peg(h_init: BitMatrix, m: int, chi: int, rng) -> BitMatrix:
    # two passes place one weight-1 block per information group each
    n_cols = h_init.cols
    none = np.zeros(m, dtype=bool)
    h = h_init
    for phase in range(2):
        group_masks = [
            block_row_mask(m, chi, (_F3_H1_ROWS[g][phase],)) for g in range(3)
        ]
        degrees = [1 if c < 3 * chi else 0 for c in range(n_cols)]
        masks = [group_masks[c // chi] if c < 3 * chi else none
                 for c in range(n_cols)]
        h = peg_construct(m, n_cols, degrees, masks, h, rng)
    return h


def _ira_f3(n: int, seed: int) -> CodeDesign:
    chi = n // 9
    m = 6 * chi
    rng = np.random.default_rng(seed)
    init = BitMatrix(m, n, _ira_f3_structure(chi))
    h = _ira_f3_peg(init, m, chi, rng)

    col_block = np.repeat([1, 2, 3, 1, 1, 2, 2, 3, 3], chi)
    is_info = np.zeros(n, dtype=bool)
    is_info[: 3 * chi] = True
    return finalize(
        h, col_block, is_info, np.array([], dtype=np.int64),
        f=3, family="ira-root", seed=seed, meta={},
    )


# ---------------------------------------------------------------------------
# double accumulator
# ---------------------------------------------------------------------------

def _permutation_edges(rng, row0: int, col0: int, size: int):
    perm = rng.permutation(size)
    return [(row0 + i, col0 + int(perm[i])) for i in range(size)]


def _iraa_f2(n: int, seed: int, puncture: bool) -> CodeDesign:
    # [ I   H2  0   Hp  0   0  ]   first stage (root IRA layout)
    # [ H2  I   Hp  0   0   0  ]
    # [ 0   0   --Pi--  0   Hp ]   second stage through the interleaver
    # [ 0   0   --Pi--  Hp  0  ]
    q = n // 6
    m = 4 * q
    rng = np.random.default_rng(seed)

    init_edges = identity_edges(0, 0, q) + identity_edges(q, q, q)
    init_edges += dual_diagonal_edges(0, 3 * q, q)
    init_edges += dual_diagonal_edges(q, 2 * q, q)
    init_edges += _permutation_edges(rng, 2 * q, 2 * q, 2 * q)
    init_edges += dual_diagonal_edges(2 * q, 5 * q, q)
    init_edges += dual_diagonal_edges(3 * q, 4 * q, q)
    init = BitMatrix(m, n, init_edges)

    masks = [block_row_mask(m, q, (1,))] * q + [block_row_mask(m, q, (0,))] * q
    masks += [np.zeros(m, dtype=bool)] * (4 * q)
    degrees = [2] * (2 * q) + [0] * (4 * q)
    h = peg_construct(m, n, degrees, masks, init, rng)

    col_block = np.repeat([1, 2, 1, 2, 1, 2], q)
    is_info = np.zeros(n, dtype=bool)
    is_info[: 2 * q] = True
    punct = np.arange(2 * q, 4 * q) if puncture else np.array([], dtype=np.int64)
    return finalize(
        h, col_block, is_info, punct,
        f=2, family="iraa-root", seed=seed, meta={"punctured": puncture},
    )


def _iraa_f3(n: int, seed: int, puncture: bool) -> CodeDesign:
    chi = n // 15
    m = 12 * chi
    rng = np.random.default_rng(seed)

    init_edges = _ira_f3_structure(chi)
    init_edges += _permutation_edges(rng, 6 * chi, 3 * chi, 6 * chi)
    init_edges += dual_diagonal_edges(6 * chi, 9 * chi, 6 * chi)
    init = BitMatrix(m, n, init_edges)
    h = _ira_f3_peg(init, m, chi, rng)

    col_block = np.repeat([1, 2, 3, 1, 1, 2, 2, 3, 3, 1, 1, 2, 2, 3, 3], chi)
    is_info = np.zeros(n, dtype=bool)
    is_info[: 3 * chi] = True
    punct = (
        np.arange(3 * chi, 9 * chi) if puncture else np.array([], dtype=np.int64)
    )
    return finalize(
        h, col_block, is_info, punct,
        f=3, family="iraa-root", seed=seed, meta={"punctured": puncture},
    )
