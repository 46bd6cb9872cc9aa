"""Design export: alist matrix plus a key = value sidecar descriptor."""

from __future__ import annotations

import numpy as np

from ..gf2 import BitMatrix, DimensionMismatchError, alist_read, alist_write
from .common import CodeDesign, fading_block_of_column


def compress_ranges(indices) -> str:
    """Sorted indices as 'a-b,c,d-e'; empty set gives an empty string."""
    idx = sorted(int(i) for i in indices)
    if not idx:
        return ""
    parts = []
    start = prev = idx[0]
    for i in idx[1:]:
        if i == prev + 1:
            prev = i
            continue
        parts.append(f"{start}-{prev}" if prev > start else str(start))
        start = prev = i
    parts.append(f"{start}-{prev}" if prev > start else str(start))
    return ",".join(parts)


def expand_ranges(text: str) -> list:
    out = []
    text = text.strip()
    if not text:
        return out
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def write_descriptor(design: CodeDesign) -> str:
    lines = [
        f"family = {design.family}",
        f"n = {design.n}",
        f"k = {design.k}",
        f"f = {design.f}",
        f"seed = {design.seed}",
        f"block_size = {design.n // design.f}",
        f"info_columns = {compress_ranges(design.info_columns)}",
        f"punctured_columns = {compress_ranges(design.punctured_columns)}",
    ]
    if "qc_block_size" in design.meta:
        lines.append(f"qc_block_size = {design.meta['qc_block_size']}")
    return "\n".join(lines) + "\n"


def read_descriptor(text: str) -> dict:
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"descriptor line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        fields[key.strip()] = value.strip()
    return fields


def design_from_files(alist_text: str, descriptor_text: str) -> CodeDesign:
    """Rebuild a CodeDesign from its exported pair of files."""
    h = alist_read(alist_text)
    fields = read_descriptor(descriptor_text)
    try:
        family = fields["family"]
        n = int(fields["n"])
        k = int(fields["k"])
        f = int(fields["f"])
        seed = int(fields["seed"])
        info = np.array(expand_ranges(fields["info_columns"]), dtype=np.int64)
        punct = np.array(
            expand_ranges(fields.get("punctured_columns", "")), dtype=np.int64
        )
    except KeyError as exc:
        raise ValueError(f"descriptor missing key {exc}") from None
    if h.cols != n or h.rows != n - k:
        raise DimensionMismatchError(
            f"alist is {h.rows}x{h.cols}, descriptor says {n - k}x{n}"
        )
    mask = np.zeros(n, dtype=bool)
    mask[info] = True
    meta = {}
    if "qc_block_size" in fields:
        meta["qc_block_size"] = int(fields["qc_block_size"])
    return CodeDesign(
        h=h,
        n=n,
        k=k,
        f=f,
        family=family,
        block_of_column=fading_block_of_column(n, f),
        info_columns=info,
        parity_columns=np.nonzero(~mask)[0],
        punctured_columns=punct,
        seed=seed,
        meta=meta,
    )


def export_design(design: CodeDesign) -> tuple[str, str]:
    """(alist text, descriptor text) pair for persistence."""
    return alist_write(design.h), write_descriptor(design)
