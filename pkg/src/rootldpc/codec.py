"""Encoding and decoding.

Systematic encoding multiplies by a derived generator held in packed-bit
form.  Accumulator encoding exploits the triangular parity part of the
repeat-accumulate style families and solves parity bits by forward
substitution.  Decoding is flooding-schedule log-domain sum-product with
the exact tanh rule, a zero-syndrome early stop, and check-to-variable
magnitudes clamped at +-30; a batched path drives the Monte Carlo engine.
Peeling over the binary erasure channel doubles as the structural
diversity test.

LLR sign convention: positive means bit 0 is more likely.  Erasures enter
as exactly 0; known bits may be +-inf.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .families.common import CodeDesign, RA_FAMILIES
from .gf2 import BitMatrix, SingularMatrixError, solve_gf2

CHECK_LLR_CLAMP = 30.0


class FamilyMismatchError(ValueError):
    """Operation requires a family with a different parity structure."""


class NonTriangularParityError(RuntimeError):
    """Forward substitution stalled: parity part is not triangulable."""


@dataclass
class GeneratorMatrix:
    """Systematic generator: identity on the information positions."""

    n: int
    info_columns: np.ndarray
    parity_columns: np.ndarray
    rows_packed: np.ndarray = field(repr=False)  # (k, ceil(n/8)) uint8

    @property
    def k(self) -> int:
        return len(self.info_columns)

    def row_bits(self, i: int) -> np.ndarray:
        return np.unpackbits(self.rows_packed[i], count=self.n)

    def to_dense(self) -> np.ndarray:
        return np.unpackbits(self.rows_packed, axis=1, count=self.n)


@dataclass
class DecodeOutcome:
    hard: np.ndarray
    iterations: int
    converged: bool
    posterior: np.ndarray | None = None
    resolved: np.ndarray | None = None
    resolved_round: np.ndarray | None = None


def derive_generator(design: CodeDesign) -> GeneratorMatrix:
    """Solve the parity part against the information part over GF(2).

    Codeword layout: information bits sit verbatim on info_columns and
    each parity column carries the matching combination, so H @ c = 0.
    Raises SingularMatrixError when the parity sub-matrix cannot invert.
    """
    dense_h = design.h.to_dense()
    b = BitMatrix.from_dense(dense_h[:, design.parity_columns])
    a = dense_h[:, design.info_columns]
    x = solve_gf2(b, a)  # (m, k): parity pattern per information bit
    k = design.k
    g = np.zeros((k, design.n), dtype=np.uint8)
    g[np.arange(k), design.info_columns] = 1
    g[:, design.parity_columns] = x.T
    return GeneratorMatrix(
        n=design.n,
        info_columns=design.info_columns.copy(),
        parity_columns=design.parity_columns.copy(),
        rows_packed=np.packbits(g, axis=1),
    )


def encode_systematic(gen: GeneratorMatrix, u) -> np.ndarray:
    """Codeword for message u: XOR of the generator rows u selects."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape != (gen.k,):
        raise ValueError(f"message length {u.shape} != ({gen.k},)")
    packed = np.bitwise_xor.reduce(gen.rows_packed[u == 1], axis=0)
    if np.ndim(packed) == 0:  # empty selection
        packed = np.zeros(gen.rows_packed.shape[1], dtype=np.uint8)
    return np.unpackbits(packed, count=gen.n)


def accumulate(s) -> np.ndarray:
    """Running XOR: response 1/(1+D), p_j = s_j ^ p_{j-1}."""
    s = np.asarray(s, dtype=np.uint8)
    out = np.cumsum(s) & 1
    return out.astype(np.uint8)


def accumulate_delayed(s, lag: int) -> np.ndarray:
    """Response 1/(1 + D + D^lag): p_j = s_j ^ p_{j-1} ^ p_{j-lag},
    with out-of-range taps read as 0."""
    s = np.asarray(s, dtype=np.uint8)
    out = np.zeros(len(s), dtype=np.uint8)
    for j in range(len(s)):
        prev = out[j - 1] if j >= 1 else 0
        lagged = out[j - lag] if j >= lag else 0
        out[j] = s[j] ^ prev ^ lagged
    return out


def encode_accumulator(design: CodeDesign, u) -> np.ndarray:
    """Accumulator-style encoding by forward substitution.

    Valid for families whose parity part is triangular after peeling:
    repeatedly solve any check with exactly one unknown parity neighbor.
    Matches encode_systematic bit for bit.
    """
    if design.family not in RA_FAMILIES:
        raise FamilyMismatchError(
            f"family {design.family!r} has no accumulator structure"
        )
    u = np.asarray(u, dtype=np.uint8)
    if u.shape != (design.k,):
        raise ValueError("message length mismatch")

    h = design.h
    bits = np.zeros(design.n, dtype=np.uint8)
    bits[design.info_columns] = u
    unknown = np.zeros(design.n, dtype=bool)
    unknown[design.parity_columns] = True

    # partial syndrome over known bits, and unknown counts per check
    parities = np.zeros(h.rows, dtype=np.uint8)
    counts = np.zeros(h.rows, dtype=np.int64)
    for r in range(h.rows):
        acc = 0
        cnt = 0
        for c in h.row(r):
            if unknown[c]:
                cnt += 1
            else:
                acc ^= bits[c]
        parities[r] = acc
        counts[r] = cnt

    queue = [r for r in range(h.rows) if counts[r] == 1]
    remaining = int(unknown.sum())
    while queue:
        r = queue.pop()
        if counts[r] != 1:
            continue
        col = next(c for c in h.row(r) if unknown[c])
        bits[col] = parities[r]
        unknown[col] = False
        remaining -= 1
        for r2 in h.col(col):
            counts[r2] -= 1
            parities[r2] ^= bits[col]
            if counts[r2] == 1:
                queue.append(r2)
    if remaining:
        raise NonTriangularParityError(
            f"{remaining} parity bits not reachable by substitution"
        )
    return bits


def puncture_bits(design: CodeDesign, codeword) -> np.ndarray:
    """Drop punctured positions before transmission."""
    codeword = np.asarray(codeword)
    return codeword[design.transmitted_columns()]


def depuncture_llr(design: CodeDesign, llr_tx) -> np.ndarray:
    """Reinsert punctured positions as erasures (LLR exactly 0)."""
    llr_tx = np.asarray(llr_tx, dtype=np.float64)
    out = np.zeros(design.n, dtype=np.float64)
    out[design.transmitted_columns()] = llr_tx
    return out


def syndrome(h: BitMatrix, bits: np.ndarray) -> np.ndarray:
    rows, cols = h.edge_arrays()
    s = np.zeros(h.rows, dtype=np.int64)
    np.add.at(s, rows, bits[cols].astype(np.int64))
    return (s & 1).astype(np.uint8)


class SpaDecoder:
    """Vectorized sum-product decoder over a fixed Tanner graph.

    Precomputes edge orderings once; decode() handles one frame,
    decode_batch() many frames with per-frame early stopping.
    """

    def __init__(self, h: BitMatrix, clamp: float = CHECK_LLR_CLAMP,
                 min_sum: bool = False):
        self.h = h
        self.clamp = clamp
        self.min_sum = min_sum
        rows, cols = h.edge_arrays()  # sorted by row (check)
        self.edge_check = rows
        self.edge_var = cols
        self.n_edges = len(rows)
        row_w = h.row_weights()
        if (row_w == 0).any():
            raise ValueError("degree-0 check rows are not decodable")
        self.check_ptr = np.concatenate([[0], np.cumsum(row_w)[:-1]])
        # permutation grouping edges by variable
        self.var_order = np.argsort(cols, kind="stable")
        col_w = h.col_weights()
        nz = col_w > 0
        self.var_ptr = np.concatenate([[0], np.cumsum(col_w)[:-1]])
        self.vars_with_edges = nz

    def decode(self, llr, max_iter: int) -> DecodeOutcome:
        llr = np.asarray(llr, dtype=np.float64)
        hard, iters, conv, post = self.decode_batch(llr[None, :], max_iter)
        return DecodeOutcome(
            hard=hard[0],
            iterations=int(iters[0]),
            converged=bool(conv[0]),
            posterior=post[0],
        )

    def _check_to_var(self, v2c: np.ndarray) -> np.ndarray:
        """Tanh-rule check update with sign/log-magnitude bookkeeping."""
        a = np.clip(v2c, -self.clamp, self.clamp)
        t = np.tanh(0.5 * a)
        zero = t == 0.0
        neg = t < 0.0
        logmag = np.zeros_like(t)
        np.log(np.abs(t), out=logmag, where=~zero)

        cptr = self.check_ptr
        sum_log = np.add.reduceat(np.where(zero, 0.0, logmag), cptr, axis=-1)
        n_zero = np.add.reduceat(zero.astype(np.int64), cptr, axis=-1)
        n_neg = np.add.reduceat(neg.astype(np.int64), cptr, axis=-1)

        e = self.edge_check
        others_zero = n_zero[..., e] - zero
        others_log = sum_log[..., e] - np.where(zero, 0.0, logmag)
        others_neg = n_neg[..., e] - neg

        mag = 2.0 * np.arctanh(np.minimum(np.exp(others_log), 1.0 - 1e-16))
        np.minimum(mag, self.clamp, out=mag)
        sign = 1.0 - 2.0 * (others_neg & 1)
        return np.where(others_zero > 0, 0.0, sign * mag)

    def _check_to_var_minsum(self, v2c: np.ndarray) -> np.ndarray:
        a = np.clip(v2c, -self.clamp, self.clamp)
        mag = np.abs(a)
        neg = a < 0.0
        cptr = self.check_ptr
        n_neg = np.add.reduceat(neg.astype(np.int64), cptr, axis=-1)
        # two smallest magnitudes per check via masked double reduction
        first = np.minimum.reduceat(mag, cptr, axis=-1)
        e = self.edge_check
        is_min = mag == first[..., e]
        # break ties so exactly one edge per check is "the" minimum
        idx = np.arange(self.n_edges)
        seg_first = np.minimum.reduceat(
            np.where(is_min, idx, self.n_edges), cptr, axis=-1
        )
        is_the_min = idx == seg_first[..., e]
        masked = np.where(is_the_min, np.inf, mag)
        second = np.minimum.reduceat(masked, cptr, axis=-1)
        out_mag = np.where(is_the_min, second[..., e], first[..., e])
        sign = 1.0 - 2.0 * ((n_neg[..., e] - neg) & 1)
        return sign * np.minimum(out_mag, self.clamp)

    def decode_batch(self, llrs: np.ndarray, max_iter: int):
        """Decode many frames; returns (hard, iterations, converged,
        posterior).  Converged frames stop iterating."""
        llrs = np.asarray(llrs, dtype=np.float64)
        n_frames, n = llrs.shape
        if n != self.h.cols:
            raise ValueError("llr length mismatch")
        update = self._check_to_var_minsum if self.min_sum else self._check_to_var

        hard = np.zeros((n_frames, n), dtype=np.uint8)
        posterior = np.tile(llrs, 1)
        iterations = np.full(n_frames, max_iter, dtype=np.int64)
        converged = np.zeros(n_frames, dtype=bool)

        active = np.arange(n_frames)
        v2c = llrs[:, self.edge_var].copy()
        act_llr = llrs
        for it in range(1, max_iter + 1):
            c2v = update(v2c)
            # totals per variable
            totals = act_llr.copy()
            c2v_by_var = c2v[:, self.var_order]
            sums = np.add.reduceat(c2v_by_var, self.var_ptr, axis=-1)
            totals[:, self.vars_with_edges] += sums[:, self.vars_with_edges]
            bits = (totals < 0).astype(np.uint8)
            # zero-syndrome early stop
            par = np.add.reduceat(
                bits[:, self.edge_var].astype(np.int64), self.check_ptr, axis=-1
            )
            ok = ~np.any(par & 1, axis=-1)

            hard[active] = bits
            posterior[active] = totals
            if ok.any():
                done = active[ok]
                iterations[done] = it
                converged[done] = True
                keep = ~ok
                if not keep.any():
                    break
                active = active[keep]
                v2c = v2c[keep]
                c2v = c2v[keep]
                totals = totals[keep]
                act_llr = act_llr[keep]
            if it < max_iter:
                v2c = totals[:, self.edge_var] - c2v
        return hard, iterations, converged, posterior


def spa_decode(design: CodeDesign, llr, max_iter: int,
               min_sum: bool = False) -> DecodeOutcome:
    """One-shot sum-product decode of a single frame."""
    return SpaDecoder(design.h, min_sum=min_sum).decode(llr, max_iter)


def bec_peel(design: CodeDesign, erased) -> DecodeOutcome:
    """Round-synchronous peeling over the binary erasure channel.

    Each round simultaneously resolves every erased bit that some check
    sees as its only erased neighbor; rounds repeat to a fixed point.  A
    non-empty residual is a stopping set.  Values are tracked for the
    all-zero codeword, so hard stays all zeros on success.
    """
    h = design.h
    erased_mask = np.zeros(design.n, dtype=bool)
    erased_idx = np.asarray(list(erased), dtype=np.int64)
    if len(erased_idx):
        erased_mask[erased_idx] = True

    resolved_round = np.zeros(design.n, dtype=np.int64)
    unknown = erased_mask.copy()
    counts = np.zeros(h.rows, dtype=np.int64)
    for r in range(h.rows):
        counts[r] = sum(unknown[c] for c in h.row(r))

    rounds = 0
    while True:
        ready = np.nonzero(counts == 1)[0]
        solve = set()
        for r in ready:
            for c in h.row(r):
                if unknown[c]:
                    solve.add(c)
                    break
        if not solve:
            break
        rounds += 1
        for c in solve:
            unknown[c] = False
            resolved_round[c] = rounds
            for r in h.col(c):
                counts[r] -= 1

    resolved = ~unknown
    return DecodeOutcome(
        hard=np.zeros(design.n, dtype=np.uint8),
        iterations=rounds,
        converged=bool(resolved.all()),
        resolved=resolved,
        resolved_round=resolved_round,
    )
