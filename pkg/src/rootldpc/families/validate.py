"""Structural validation of built designs.

Every family has a declarative template: a tiling of the structurally
ordered matrix into regions of known kind (pinned identity, cyclic
permutation, dual diagonal, zero, or edge-grown with a fixed per-column
weight).  The validator re-derives that tiling from the family tables,
undoes the transmission permutation, and reports every departure, along
with root-check recoverability, the parity-part rank, and the circulant
sub-block property for quasi-cyclic families.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..gf2 import BitMatrix, rank_gf2
from .common import CodeDesign, QC_FAMILIES, ROOT_FAMILIES
from . import doped as _doped
from . import qc_root as _qc
from . import ra as _ra


@dataclass
class Region:
    rows: np.ndarray
    cols: np.ndarray
    kind: str           # zero | id | circ1 | perm1 | dd | peg
    weight: int = 0     # expected per-column weight inside peg regions


@dataclass
class StructureReport:
    family: str
    root_check_ok: np.ndarray = field(repr=False)
    parity_part_rank: int = 0
    qc_blocks_ok: bool | None = None
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _rng(lo, hi):
    return np.arange(lo, hi, dtype=np.int64)


def _blk(rows, cols, nb, kind, weight=0):
    """Region covering the given block rows x block cols at block size nb."""
    r = np.concatenate([_rng(b * nb, (b + 1) * nb) for b in rows])
    c = np.concatenate([_rng(b * nb, (b + 1) * nb) for b in cols])
    return Region(r, c, kind, weight)


def _grid_regions(nb, identities, mask_rows, degrees, n_row_blocks):
    """Tiling for quasi-cyclic grids: identity placements, one edge-growth
    strip per column group over its allowed rows, zeros elsewhere."""
    regions = []
    for g, rows in enumerate(mask_rows):
        id_rows = [r for r, c in identities if c == g]
        for r in id_rows:
            regions.append(_blk([r], [g], nb, "id"))
        if degrees[g]:
            regions.append(_blk(list(rows), [g], nb, "peg", degrees[g]))
        rest = [
            r for r in range(n_row_blocks) if r not in rows and r not in id_rows
        ]
        if rest:
            regions.append(_blk(rest, [g], nb, "zero"))
    return regions


def _qc_f2_regions(n):
    nb = n // 16
    regions = []
    for quad in (0, 4):
        for i in range(4):
            for j in range(4):
                kind = "id" if i == j else "zero"
                regions.append(_blk([quad + i], [quad + j], nb, kind))
    for g in range(4):  # 1i below, 2i above
        regions.append(_blk(range(4, 8), [g], nb, "peg", 2))
        regions.append(_blk(range(0, 4), [4 + g], nb, "peg", 2))
    for g in range(4):  # 1p: null diagonal block, weight 3 elsewhere below
        regions.append(_blk([4 + g], [8 + g], nb, "zero"))
        regions.append(_blk([r for r in range(4, 8) if r != 4 + g], [8 + g],
                            nb, "peg", 3))
        regions.append(_blk(range(0, 4), [8 + g], nb, "zero"))
    for g in range(4):  # 2p mirrors 1p in the upper half
        regions.append(_blk([g], [12 + g], nb, "zero"))
        regions.append(_blk([r for r in range(0, 4) if r != g], [12 + g],
                            nb, "peg", 3))
        regions.append(_blk(range(4, 8), [12 + g], nb, "zero"))
    return regions


def _ira_f3_regions(chi, n_row_blocks, n_col_blocks):
    """First-stage tiling shared by the one- and two-stage three-block RA
    layouts (block unit chi); trailing rows/columns handled by callers."""
    regions = []
    for g in range(3):
        id_rows = list(_ra._F3_ID_ROWS[g])
        peg_rows = list(_ra._F3_H1_ROWS[g])
        for r in id_rows:
            regions.append(_blk([r], [g], chi, "id"))
        for r in peg_rows:
            regions.append(_blk([r], [g], chi, "peg", 1))
        rest = [r for r in range(n_row_blocks) if r not in id_rows + peg_rows]
        regions.append(_blk(rest, [g], chi, "zero"))
    for gp, (row_dd, row_idd) in enumerate(_ra._F3_PARITY_ROWS):
        ca, cb = 3 + 2 * gp, 4 + 2 * gp
        regions.append(_blk([row_dd], [ca], chi, "dd"))
        regions.append(_blk([row_dd], [cb], chi, "zero"))
        regions.append(_blk([row_idd], [ca], chi, "id"))
        regions.append(_blk([row_idd], [cb], chi, "dd"))
        rest = [r for r in range(n_row_blocks) if r not in (row_dd, row_idd)]
        regions.append(_blk(rest, [ca, cb], chi, "zero"))
    return regions


def _template(design: CodeDesign) -> list:
    n, f, fam, meta = design.n, design.f, design.family, design.meta

    if fam == "random-root":
        q = n // 4
        iw = meta.get("info_weight", 2)
        pw = meta.get("parity_weight", 3)
        spec = [
            (0, 0, "id", 0), (0, 1, "peg", iw), (0, 2, "zero", 0), (0, 3, "peg", pw),
            (1, 0, "peg", iw), (1, 1, "id", 0), (1, 2, "peg", pw), (1, 3, "zero", 0),
        ]
        return [_blk([r], [c], q, k, w) for r, c, k, w in spec]

    if fam == "qc-root":
        if f == 2:
            return _qc_f2_regions(n)
        nb = n // (f * f)
        if f == 3:
            masks = _qc._F3_MASK_ROWS
            degrees = [2, 2, 2] + [len(m) for m in masks[3:]]
            return _grid_regions(nb, _qc._F3_IDENTITIES, masks, degrees, 6)
        masks = _qc._F4_MASK_ROWS
        degrees = [_qc._F4_INFO_DEGREE] * 4 + [len(m) for m in masks[4:]]
        return _grid_regions(nb, _qc._F4_IDENTITIES, masks, degrees, 12)

    if fam == "ira-root":
        if f == 2:
            q = n // 4
            spec = [
                (0, 0, "id", 0), (0, 1, "peg", 2), (0, 2, "zero", 0), (0, 3, "dd", 0),
                (1, 0, "peg", 2), (1, 1, "id", 0), (1, 2, "dd", 0), (1, 3, "zero", 0),
            ]
            return [_blk([r], [c], q, k, w) for r, c, k, w in spec]
        return _ira_f3_regions(n // 9, 6, 9)

    if fam == "iraa-root":
        if f == 2:
            q = n // 6
            regions = []
            spec = [
                (0, 0, "id", 0), (0, 1, "peg", 2), (0, 2, "zero", 0), (0, 3, "dd", 0),
                (1, 0, "peg", 2), (1, 1, "id", 0), (1, 2, "dd", 0), (1, 3, "zero", 0),
            ]
            regions += [_blk([r], [c], q, k, w) for r, c, k, w in spec]
            regions.append(_blk([0, 1], [4, 5], q, "zero"))
            regions.append(_blk([2, 3], [0, 1], q, "zero"))
            regions.append(_blk([2, 3], [2, 3], q, "perm1"))
            regions.append(_blk([2], [4], q, "zero"))
            regions.append(_blk([2], [5], q, "dd"))
            regions.append(_blk([3], [4], q, "dd"))
            regions.append(_blk([3], [5], q, "zero"))
            return regions
        chi = n // 15
        regions = _ira_f3_regions(chi, 6, 15)
        regions.append(_blk(range(0, 6), range(9, 15), chi, "zero"))
        regions.append(_blk(range(6, 12), range(0, 3), chi, "zero"))
        regions.append(_blk(range(6, 12), range(3, 9), chi, "perm1"))
        regions.append(_blk(range(6, 12), range(9, 15), chi, "dd"))
        return regions

    if fam == "doped-root":
        if f == 2:
            h = n // 8
            regions = []
            for quad in (0, 2):  # identity quadrants at half-block unit
                base_c = quad
                for i in range(2):
                    for j in range(2):
                        kind = "id" if i == j else "zero"
                        regions.append(_blk([quad + i], [base_c + j], h, kind))
            regions.append(_blk([2, 3], [0, 1], h, "peg", 2))
            regions.append(_blk([0, 1], [2, 3], h, "peg", 2))
            # doped parity quadrants [I 0; P DD]
            for rows, cols in (((2, 3), (4, 5)), ((0, 1), (6, 7))):
                r0, r1 = rows
                c0, c1 = cols
                regions.append(_blk([r0], [c0], h, "id"))
                regions.append(_blk([r0], [c1], h, "zero"))
                regions.append(_blk([r1], [c0], h, "circ1"))
                regions.append(_blk([r1], [c1], h, "dd"))
            regions.append(_blk([0, 1], [4, 5], h, "zero"))
            regions.append(_blk([2, 3], [6, 7], h, "zero"))
            return regions
        spec = _doped._F3 if f == 3 else _doped._F4
        blk = n // 9 if f == 3 else n // 16
        n_rows = 2 * f if f == 3 else 12
        peg_w = 2 if f == 3 else _doped._F4["peg_degree"]
        width = f - 1
        regions = []
        for g in range(f):
            id_rows = list(spec["id_rows"][g])
            phase_rows = [list(p) for p in spec["peg_phases"][g]]
            flat_peg = [r for p in phase_rows for r in p]
            for r in id_rows:
                regions.append(_blk([r], [g], blk, "id"))
            for p in phase_rows:
                regions.append(_blk(p, [g], blk, "peg", peg_w))
            rest = [r for r in range(n_rows) if r not in id_rows + flat_peg]
            if rest:
                regions.append(_blk(rest, [g], blk, "zero"))
        for gp, rows in enumerate(spec["parity_rows"]):
            col0 = f + width * gp
            for c in range(width):
                for j, r in enumerate(rows):
                    if c < j:
                        kind = "circ1"
                    elif c == j:
                        kind = "id" if j < width - 1 else "dd"
                    else:
                        kind = "zero"
                    regions.append(_blk([r], [col0 + c], blk, kind))
                rest = [r for r in range(n_rows) if r not in rows]
                regions.append(_blk(rest, [col0 + c], blk, "zero"))
        return regions

    if fam == "full-div":
        part = n // f
        m_sub = design.m // (f - 1)
        tail_w = meta.get("tail_weight", 3)
        regions = []
        for sub in range(f - 1):
            rows = _rng(sub * m_sub, (sub + 1) * m_sub)
            for v in range(f):
                cols = _rng(v * part, (v + 1) * part)
                if v == 0:
                    regions.append(Region(rows, cols, "peg", 2))
                elif v == sub + 1:
                    regions.append(Region(rows, cols, "peg", tail_w))
                else:
                    regions.append(Region(rows, cols, "zero"))
        return regions

    if fam in ("peg", "qc-peg"):
        w = meta.get("col_weight", 3)
        return [Region(_rng(0, design.m), _rng(0, n), "peg", w)]

    raise ValueError(f"no template for family {fam!r}")


def _check_region(sub: np.ndarray, region: Region):
    """Returns None if the dense sub-matrix satisfies the region kind."""
    kind = region.kind
    if kind == "zero":
        return None if not sub.any() else "edges in a null region"
    if kind == "peg":
        weights = sub.sum(axis=0)
        if (weights == region.weight).all():
            return None
        return f"column weights {set(weights.tolist())} != {region.weight}"
    size = sub.shape[0]
    if sub.shape[0] != sub.shape[1]:
        return "pinned region is not square"
    if kind == "id":
        return None if np.array_equal(sub, np.eye(size, dtype=sub.dtype)) \
            else "identity block mismatch"
    if kind == "dd":
        expect = np.eye(size, dtype=sub.dtype)
        expect[np.arange(1, size), np.arange(size - 1)] = 1
        return None if np.array_equal(sub, expect) else "dual-diagonal mismatch"
    if kind == "circ1":
        if not ((sub.sum(axis=0) == 1).all() and (sub.sum(axis=1) == 1).all()):
            return "not a permutation"
        shift = int(np.nonzero(sub[0])[0][0])
        ok = all(
            int(np.nonzero(sub[i])[0][0]) == (i + shift) % size
            for i in range(size)
        )
        return None if ok else "permutation is not a cyclic shift"
    if kind == "perm1":
        ok = (sub.sum(axis=0) == 1).all() and (sub.sum(axis=1) == 1).all()
        return None if ok else "not a permutation"
    raise ValueError(f"unknown region kind {kind!r}")


def _structural_dense(design: CodeDesign) -> np.ndarray:
    dense = design.h.to_dense()
    order = design.meta.get("structural_order")
    if order is None:
        return dense
    out = np.empty_like(dense)
    out[:, np.asarray(order)] = dense
    return out


def root_check_flags(design: CodeDesign) -> np.ndarray:
    """Per information column: does some adjacent check connect it only to
    columns outside its own fading block?"""
    blocks = design.block_of_column
    flags = np.zeros(len(design.info_columns), dtype=bool)
    for i, v in enumerate(design.info_columns):
        own = blocks[v]
        for c in design.h.col(int(v)):
            if all(u == v or blocks[u] != own for u in design.h.row(c)):
                flags[i] = True
                break
    return flags


def qc_blocks_circulant(h: BitMatrix, nb: int) -> bool:
    """Every nb x nb sub-block is all-zero or a circulant."""
    if h.rows % nb or h.cols % nb:
        return False
    d = h.to_dense()
    blocks = d.reshape(h.rows // nb, nb, h.cols // nb, nb).transpose(0, 2, 1, 3)
    for bi in range(blocks.shape[0]):
        for bj in range(blocks.shape[1]):
            blk = blocks[bi, bj]
            if not blk.any():
                continue
            first = blk[0]
            for i in range(1, nb):
                if not np.array_equal(blk[i], np.roll(first, i)):
                    return False
    return True


def _fd_worst_case_ok(design: CodeDesign) -> list:
    """Peel every worst-case pattern; returns violations for unresolved
    information columns."""
    from ..codec import bec_peel  # deferred: codec depends on this package

    violations = []
    info = set(design.info_columns.tolist())
    patterns = []
    if design.f == 2:
        patterns.append(design.block_columns(1))
    else:
        v1 = design.block_columns(1)
        for keep in range(2, design.f + 1):
            erased = [v1] + [
                design.block_columns(b)
                for b in range(2, design.f + 1)
                if b != keep
            ]
            patterns.append(np.concatenate(erased))
    for pattern in patterns:
        outcome = bec_peel(design, pattern)
        unresolved = set(np.nonzero(~outcome.resolved)[0].tolist()) & info
        for v in sorted(unresolved):
            violations.append(("erasure-recovery", f"column {v}"))
    return violations


def validate_structure(design: CodeDesign) -> StructureReport:
    report = StructureReport(
        family=design.family,
        root_check_ok=root_check_flags(design),
    )

    # parity part rank
    b = BitMatrix.from_dense(design.parity_submatrix_dense())
    report.parity_part_rank = rank_gf2(b)
    if report.parity_part_rank != design.m:
        report.violations.append(
            ("parity-rank", f"rank {report.parity_part_rank} < {design.m}")
        )

    # root recoverability is mandatory for root families
    if design.family in ROOT_FAMILIES:
        for i, ok in enumerate(report.root_check_ok):
            if not ok:
                col = int(design.info_columns[i])
                report.violations.append(("root-check", f"column {col}"))

    # template compliance
    struct = _structural_dense(design)
    regions = _template(design)
    coverage = np.zeros(struct.shape, dtype=np.int8)
    for region in regions:
        ix = np.ix_(region.rows, region.cols)
        coverage[ix] += 1
        problem = _check_region(struct[ix], region)
        if problem:
            loc = (
                f"rows {region.rows[0]}..{region.rows[-1]} "
                f"cols {region.cols[0]}..{region.cols[-1]}"
            )
            report.violations.append((f"region-{region.kind}", f"{loc}: {problem}"))
    if not (coverage == 1).all():
        report.violations.append(("template", "regions do not tile the matrix"))

    # circulant sub-blocks for quasi-cyclic families
    if design.family in QC_FAMILIES:
        nb = design.meta.get("qc_block_size")
        if nb is None:
            report.qc_blocks_ok = False
            report.violations.append(("qc-blocks", "missing qc_block_size"))
        else:
            report.qc_blocks_ok = qc_blocks_circulant(design.h, nb)
            if not report.qc_blocks_ok:
                report.violations.append(("qc-blocks", "non-circulant sub-block"))

    # full-diversity families prove themselves by worst-case peeling
    if design.family == "full-div":
        report.violations.extend(_fd_worst_case_ok(design))

    # puncturing must never remove a root-identity column
    if len(design.punctured_columns):
        punct = set(design.punctured_columns.tolist())
        order = design.meta.get("structural_order")
        if order is not None:
            pos = np.empty(design.n, dtype=np.int64)
            pos[np.asarray(order)] = np.arange(design.n)
        info = set(design.info_columns.tolist())
        root_id_cols = set()
        for region in regions:
            if region.kind == "id":
                # map structural columns to transmission positions; only
                # identities guarding information columns are root checks
                cols = region.cols if order is None else pos[region.cols]
                cols = {int(c) for c in cols}
                if cols <= info:
                    root_id_cols |= cols
        bad = punct & root_id_cols
        if bad:
            report.violations.append(
                ("punctured-root", f"columns {sorted(bad)}")
            )
    return report
