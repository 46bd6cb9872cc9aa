"""Quasi-cyclic root constructions for two, three and four fading blocks.

All structure lives on a grid of circulant sub-blocks.  Root identity
blocks are pinned first; the remaining sub-blocks are filled by the
quasi-cyclic edge-growth pass under per-group indicator masks, which also
enforce the triangular shape of the parity region for F = 3, 4.
"""

from __future__ import annotations

import numpy as np

from ..gf2 import BitMatrix
from ..peg import qc_peg_construct
from .common import (
    CodeDesign,
    NonDivisibleError,
    block_row_mask,
    build_with_retries,
    finalize,
    identity_edges,
)

# per-group allowed block rows, block-level degrees, identity placements,
# and fading block of each column group
_F3_IDENTITIES = ((0, 0), (1, 0), (2, 1), (3, 1), (4, 2), (5, 2))
_F3_MASK_ROWS = (
    (2, 4), (0, 5), (1, 3),            # information groups
    (3, 4, 5), (4, 5), (5,),           # lower-triangular parity
    (0,), (0, 1), (0, 1, 2),           # upper-triangular parity
)
_F3_GROUP_BLOCK = (1, 2, 3, 1, 1, 2, 2, 3, 3)

_F4_IDENTITIES = tuple((3 * c + i, c) for c in range(4) for i in range(3))
_F4_MASK_ROWS = (
    (3, 5, 6, 9, 11), (0, 2, 7, 10, 11), (1, 3, 4, 9, 10), (0, 2, 3, 5, 8),
    (6, 8, 10), (7, 9, 11), (8, 10), (9, 11), (10,), (11,),
    (0,), (1,), (0, 2), (1, 3), (0, 2, 4), (1, 3, 5),
)
_F4_GROUP_BLOCK = (1, 2, 3, 4, 1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4)
_F4_INFO_DEGREE = 2


def build_qc_root(n: int, f: int, seed: int) -> CodeDesign:
    if f == 2:
        if n % 16:
            raise NonDivisibleError("F=2 tiling needs length divisible by 16")
        builder = _build_f2
    elif f in (3, 4):
        if n % (f * f):
            raise NonDivisibleError(f"F={f} tiling needs length divisible by {f * f}")
        builder = _build_f3 if f == 3 else _build_f4
    else:
        raise ValueError("f must be 2, 3 or 4")

    return build_with_retries(lambda s: builder(n, s), seed)


def _build_f2(n: int, seed: int) -> CodeDesign:
    nb = n // 16
    m = n // 2
    rng = np.random.default_rng(seed)

    # diagonal root identities in the (1c, 1i) and (2c, 2i) quadrants
    init_edges = []
    for g in range(4):
        init_edges += identity_edges(g * nb, g * nb, nb)
        init_edges += identity_edges((4 + g) * nb, (4 + g) * nb, nb)
    init = BitMatrix(m, n, init_edges)

    lower = tuple(range(4, 8))
    upper = tuple(range(0, 4))
    masks, degrees = [], []
    for g in range(16):
        if g < 4:  # 1i: weight 2 below
            rows, d = lower, 2
        elif g < 8:  # 2i: weight 2 above
            rows, d = upper, 2
        elif g < 12:  # 1p: weight 3, null diagonal block
            rows, d = tuple(r for r in lower if r != 4 + (g - 8)), 3
        else:  # 2p
            rows, d = tuple(r for r in upper if r != g - 12), 3
        masks.append(block_row_mask(m, nb, rows))
        degrees.append(d)

    h = qc_peg_construct(m, n, nb, degrees, masks, init, rng, parity_start=n // 2)

    col_block = np.repeat([1, 2, 1, 2], 4 * nb)
    is_info = np.zeros(n, dtype=bool)
    is_info[: n // 2] = True
    return finalize(
        h, col_block, is_info, np.array([], dtype=np.int64),
        f=2, family="qc-root", seed=seed, meta={"qc_block_size": nb},
    )


def _build_grid_family(n, seed, f, nb, identities, mask_rows, group_block,
                       info_degree):
    m = n - n // f
    rng = np.random.default_rng(seed)
    n_groups = n // nb

    init_edges = []
    for r, c in identities:
        init_edges += identity_edges(r * nb, c * nb, nb)
    init = BitMatrix(m, n, init_edges)

    masks = [block_row_mask(m, nb, rows) for rows in mask_rows]
    degrees = [
        info_degree if g < f else len(mask_rows[g]) for g in range(n_groups)
    ]

    h = qc_peg_construct(m, n, nb, degrees, masks, init, rng, parity_start=n // f)

    col_block = np.repeat(group_block, nb)
    is_info = np.zeros(n, dtype=bool)
    is_info[: n // f] = True
    return finalize(
        h, col_block, is_info, np.array([], dtype=np.int64),
        f=f, family="qc-root", seed=seed, meta={"qc_block_size": nb},
    )


def _build_f3(n: int, seed: int) -> CodeDesign:
    return _build_grid_family(
        n, seed, 3, n // 9, _F3_IDENTITIES, _F3_MASK_ROWS, _F3_GROUP_BLOCK,
        info_degree=2,
    )


def _build_f4(n: int, seed: int) -> CodeDesign:
    return _build_grid_family(
        n, seed, 4, n // 16, _F4_IDENTITIES, _F4_MASK_ROWS, _F4_GROUP_BLOCK,
        info_degree=_F4_INFO_DEGREE,
    )
