"""Comparison codes without diversity structure: plain and quasi-cyclic
edge-growth LDPC with a regular column-weight-3 profile.

Quasi-cyclic matrices built this way are frequently rank deficient and a
fixed trailing-column parity block is often singular, so the parity set is
chosen by pivoting: any maximal independent column set (biased toward the
tail) serves as the parity part; seeds without full row rank are retried.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..gf2 import pivot_columns
from ..peg import peg_construct, qc_peg_construct
from .common import (
    CodeDesign,
    MAX_BUILD_ATTEMPTS,
    NonDivisibleError,
    SingularParityPartError,
    finalize,
)

_RATES = {Fraction(1, 2): 2, Fraction(1, 3): 3, Fraction(1, 4): 4}


def build_baseline(
    n: int,
    rate,
    qc: bool,
    seed: int,
    col_weight: int = 3,
) -> CodeDesign:
    rate = Fraction(rate).limit_denominator(16)
    if rate not in _RATES:
        raise ValueError("rate must be 1/2, 1/3 or 1/4")
    f = _RATES[rate]
    if n % f:
        raise NonDivisibleError(f"length incompatible with rate {rate}")
    k = n // f
    m = n - k
    if qc and n % (f * f):
        raise NonDivisibleError(f"qc variant needs length divisible by {f * f}")

    for attempt in range(MAX_BUILD_ATTEMPTS):
        s = seed + attempt
        rng = np.random.default_rng(s)
        if qc:
            nb = n // (f * f)
            groups = n // nb
            masks = [np.ones(m, dtype=bool)] * groups
            h = qc_peg_construct(m, n, nb, [col_weight] * groups, masks, None, rng)
            meta = {"qc_block_size": nb, "col_weight": col_weight}
        else:
            masks = [np.ones(m, dtype=bool)] * n
            h = peg_construct(m, n, [col_weight] * n, masks, None, rng)
            meta = {"col_weight": col_weight}

        parity = pivot_columns(h, prefer_tail=True)
        if len(parity) < m:
            continue  # rank-deficient matrix, try the next seed
        is_info = np.ones(n, dtype=bool)
        is_info[parity] = False

        col_block = np.repeat(np.arange(1, f + 1), n // f)
        design = finalize(
            h, col_block, is_info, np.array([], dtype=np.int64),
            f=f, family="qc-peg" if qc else "peg", seed=s, meta=meta,
        )
        design.seed = seed
        design.meta["effective_seed"] = s
        design.meta["attempts"] = attempt + 1
        return design
    raise SingularParityPartError(
        f"no full-rank matrix within {MAX_BUILD_ATTEMPTS} attempts"
    )
