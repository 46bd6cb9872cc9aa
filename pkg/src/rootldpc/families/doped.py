"""Root constructions with doped (full-diversity) parity bits.

Each fading block's parity pairs a directly-protected part, pinned by an
identity block on a foreign check region, with an accumulator part chained
through a cyclic-shift permutation and a dual diagonal:

    F=2 parity quadrant       F=4 parity group
    [ I   0  ]                [ I  0  0  ]
    [ P   DD ]                [ P  I  0  ]
                              [ P  P  DD ]

The parity part stays lower-triangular per group, so encoding reduces to
back-substitution.  Once its own information group is solved, every parity
bit of an erased block follows: first the identity-protected columns, then
the accumulator chain, which is what pushes the recoverable fraction of
variable nodes to 100% instead of the few percent incidental doping gives.
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

# block-level structure per fading count: identity rows per information
# group, the rows its edge-growth phases fill, parity group rows, and the
# fading block of every column group
_F2 = {
    "id_rows": ((0,), (1,)),
    "peg_phases": (((1,),), ((0,),)),
    "col_block": (1, 2, 1, 2),
}
_F3 = {
    "id_rows": ((0, 1), (2, 3), (4, 5)),
    "peg_phases": (((2,), (4,)), ((0,), (5,)), ((1,), (3,))),
    "parity_rows": ((2, 4), (0, 5), (1, 3)),
    "col_block": (1, 2, 3, 1, 1, 2, 2, 3, 3),
}
_F4 = {
    "id_rows": ((3, 6, 9), (0, 7, 10), (1, 4, 11), (2, 5, 8)),
    "peg_phases": (
        ((0, 1, 2, 8, 10),),
        ((3, 4, 5, 8, 9),),
        ((0, 2, 5, 6, 7),),
        ((0, 3, 9, 10, 11),),
    ),
    "parity_rows": ((0, 1, 2), (3, 4, 5), (6, 7, 8), (9, 10, 11)),
    "col_block": (1, 2, 3, 4, 1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4),
    "peg_degree": 4,
}


def build_doped_root(n: int, f: int, seed: int) -> CodeDesign:
    if f == 2:
        if n % 8:
            raise NonDivisibleError("F=2 doped layout needs length divisible by 8")
        build_once = lambda s: _build_f2(n, s)
    elif f == 3:
        if n % 9:
            raise NonDivisibleError("F=3 doped layout needs length divisible by 9")
        build_once = lambda s: _build_f3(n, s)
    elif f == 4:
        if n % 16:
            raise NonDivisibleError("F=4 doped layout needs length divisible by 16")
        build_once = lambda s: _build_f4(n, s)
    else:
        raise ValueError("f must be 2, 3 or 4")
    return build_with_retries(build_once, seed)


def _distinct_shifts(rng, count: int, size: int) -> list:
    return [int(s) for s in rng.choice(size, size=count, replace=False)]


def _build_f2(n: int, seed: int) -> CodeDesign:
    q = n // 4
    half = n // 8
    m = n // 2
    rng = np.random.default_rng(seed)
    s1, s2 = _distinct_shifts(rng, 2, half)

    init_edges = identity_edges(0, 0, q) + identity_edges(q, q, q)
    # doped quadrant on (2c, 1p)
    init_edges += identity_edges(q, 2 * q, half)
    init_edges += identity_edges(q + half, 2 * q, half, shift=s1)
    init_edges += dual_diagonal_edges(q + half, 2 * q + half, half)
    # doped quadrant on (1c, 2p)
    init_edges += identity_edges(0, 3 * q, half)
    init_edges += identity_edges(half, 3 * q, half, shift=s2)
    init_edges += dual_diagonal_edges(half, 3 * q + half, half)
    init = BitMatrix(m, n, init_edges)

    masks = [block_row_mask(m, q, (1,))] * q + [block_row_mask(m, q, (0,))] * q
    masks += [np.zeros(m, dtype=bool)] * (2 * q)
    degrees = [2] * (2 * q) + [0] * (2 * q)
    h = peg_construct(m, n, degrees, masks, init, rng)

    col_block = np.repeat(_F2["col_block"], q)
    is_info = np.zeros(n, dtype=bool)
    is_info[: 2 * q] = True
    return finalize(
        h, col_block, is_info, np.array([], dtype=np.int64),
        f=2, family="doped-root", seed=seed, meta={"shifts": (s1, s2)},
    )


def _grid_build(n, seed, f, blk, spec, peg_degree):
    m = n - n // f
    rng = np.random.default_rng(seed)
    n_groups = n // blk
    shifts = iter(_distinct_shifts(rng, f * (f - 1) * (f - 2) // 2, blk))

    init_edges = []
    for g, rows in enumerate(spec["id_rows"]):
        for r in rows:
            init_edges += identity_edges(r * blk, g * blk, blk)
    # parity groups: [I], [P, I], ... last row [P.., DD]; the two-block
    # variant uses [I; P, DD]
    for gp, rows in enumerate(spec["parity_rows"]):
        width = len(rows)
        col0 = (f + width * gp) * blk
        for j, r in enumerate(rows):
            for c in range(j):  # permutation blocks below the diagonal
                init_edges += identity_edges(
                    r * blk, col0 + c * blk, blk, shift=next(shifts)
                )
            if j < width - 1:
                init_edges += identity_edges(r * blk, col0 + j * blk, blk)
            else:
                init_edges += dual_diagonal_edges(r * blk, col0 + j * blk, blk)
    init = BitMatrix(m, n, init_edges)

    none = np.zeros(m, dtype=bool)
    h = init
    n_phases = max(len(p) for p in spec["peg_phases"])
    for phase in range(n_phases):
        degrees = []
        masks = []
        for c in range(n):
            g = c // blk
            if g < f and phase < len(spec["peg_phases"][g]):
                degrees.append(peg_degree)
                masks.append(
                    block_row_mask(m, blk, spec["peg_phases"][g][phase])
                )
            else:
                degrees.append(0)
                masks.append(none)
        h = peg_construct(m, n, degrees, masks, h, rng)

    col_block = np.repeat(spec["col_block"], blk)
    is_info = np.zeros(n, dtype=bool)
    is_info[: n // f] = True
    return finalize(
        h, col_block, is_info, np.array([], dtype=np.int64),
        f=f, family="doped-root", seed=seed, meta={},
    )


def _build_f3(n: int, seed: int) -> CodeDesign:
    return _grid_build(n, seed, 3, n // 9, _F3, peg_degree=2)


def _build_f4(n: int, seed: int) -> CodeDesign:
    return _grid_build(n, seed, 4, n // 16, _F4, peg_degree=_F4["peg_degree"])
