"""Random full-diversity root construction for two fading blocks.

Half-rate layout over quarter-length blocks, with identity root checks
guarding each information group and edge-grown sub-matrices elsewhere:

    [ I    H2i  0    H2p ]
    [ H1i  I    H1p  0   ]

Information sub-matrices carry column weight 2, parity sub-matrices
weight 3, giving the usual (3, 6)-regular profile.
"""

from __future__ import annotations

import numpy as np

from ..gf2 import BitMatrix
from ..peg import peg_construct
from .common import (
    CodeDesign,
    NonDivisibleError,
    build_with_retries,
    finalize,
    identity_edges,
)


def build_random_root(
    n: int,
    seed: int,
    info_weight: int = 2,
    parity_weight: int = 3,
) -> CodeDesign:
    if n % 4:
        raise NonDivisibleError("length must be divisible by 4")

    def build_once(s: int) -> CodeDesign:
        return _build(n, s, info_weight, parity_weight)

    return build_with_retries(build_once, seed)


def _build(n, seed, info_weight, parity_weight) -> CodeDesign:
    q = n // 4
    m = n // 2
    rng = np.random.default_rng(seed)

    init_edges = identity_edges(0, 0, q) + identity_edges(q, q, q)
    init = BitMatrix(m, n, init_edges)

    upper = np.zeros(m, dtype=bool)
    upper[:q] = True  # checks of the first block row
    lower = ~upper

    degrees = [info_weight] * (2 * q) + [parity_weight] * (2 * q)
    masks = [lower] * q + [upper] * q + [lower] * q + [upper] * q
    h = peg_construct(m, n, degrees, masks, init, rng)

    col_block = np.repeat([1, 2, 1, 2], q)
    is_info = np.zeros(n, dtype=bool)
    is_info[: 2 * q] = True
    return finalize(
        h,
        col_block,
        is_info,
        np.array([], dtype=np.int64),
        f=2,
        family="random-root",
        seed=seed,
        meta={"info_weight": info_weight, "parity_weight": parity_weight},
    )
