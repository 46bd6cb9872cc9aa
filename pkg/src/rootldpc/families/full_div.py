"""Unstructured full-diversity constructions.

No root checks here: diversity comes from a small rate sacrifice.  All
information bits live in the first fading block, whose columns carry
weight 2 and, thanks to edge growth with more checks than weight-2
columns, form a cycle-free subgraph, hence join no stopping set.  For
three and four blocks the two-block recipe is nested: one sub-code per
foreign block shares the first block's columns and owns a private strip
of check rows and the foreign block's columns.
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
)


def build_full_diversity(
    n: int,
    f: int,
    seed: int,
    surplus: int | None = None,
    tail_weight: int = 3,
) -> CodeDesign:
    """surplus = extra checks per sub-code beyond half its length; the
    default max(1, sub_len // 64) keeps the rate just under 1/f."""
    if f not in (2, 3, 4):
        raise ValueError("f must be 2, 3 or 4")
    if n % f:
        raise NonDivisibleError(f"length must be divisible by {f}")
    part = n // f
    sub_len = 2 * part
    e = max(1, sub_len // 64) if surplus is None else surplus
    k = part - (f - 1) * e
    if k < 1:
        raise ValueError("surplus leaves no information columns")

    def build_once(s: int) -> CodeDesign:
        return _build(n, f, s, part, e, k, tail_weight)

    return build_with_retries(build_once, seed)


def _build(n, f, seed, part, e, k, tail_weight) -> CodeDesign:
    m_sub = part + e
    m = (f - 1) * m_sub
    rng = np.random.default_rng(seed)

    h = BitMatrix(m, n, [])
    none = np.zeros(m, dtype=bool)
    for sub in range(f - 1):
        rows = np.zeros(m, dtype=bool)
        rows[sub * m_sub : (sub + 1) * m_sub] = True
        # first-block columns, weight 2, then the foreign block, weight 3
        degrees = [2 if c < part else 0 for c in range(n)]
        masks = [rows if c < part else none for c in range(n)]
        h = peg_construct(m, n, degrees, masks, h, rng)

        lo, hi = (sub + 1) * part, (sub + 2) * part
        degrees = [tail_weight if lo <= c < hi else 0 for c in range(n)]
        masks = [rows if lo <= c < hi else none for c in range(n)]
        h = peg_construct(m, n, degrees, masks, h, rng)

    col_block = np.repeat(np.arange(1, f + 1), part)
    is_info = np.zeros(n, dtype=bool)
    is_info[:k] = True
    return finalize(
        h, col_block, is_info, np.array([], dtype=np.int64),
        f=f, family="full-div", seed=seed,
        meta={"surplus": e, "tail_weight": tail_weight},
    )
