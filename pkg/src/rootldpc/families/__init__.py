"""Builders for every supported code family, plus validation and export."""

from __future__ import annotations

from .baseline import build_baseline
from .common import (
    FAMILIES,
    QC_FAMILIES,
    RA_FAMILIES,
    ROOT_FAMILIES,
    CodeDesign,
    NonDivisibleError,
    SingularParityPartError,
    fading_block_of_column,
)
from .doped import build_doped_root
from .full_div import build_full_diversity
from .io import design_from_files, export_design, read_descriptor, write_descriptor
from .qc_root import build_qc_root
from .ra import build_ira_root, build_iraa_root
from .random_root import build_random_root
from .validate import StructureReport, validate_structure

__all__ = [
    "FAMILIES",
    "QC_FAMILIES",
    "RA_FAMILIES",
    "ROOT_FAMILIES",
    "CodeDesign",
    "NonDivisibleError",
    "SingularParityPartError",
    "StructureReport",
    "build_baseline",
    "build_design",
    "build_doped_root",
    "build_full_diversity",
    "build_ira_root",
    "build_iraa_root",
    "build_qc_root",
    "build_random_root",
    "design_from_files",
    "export_design",
    "fading_block_of_column",
    "read_descriptor",
    "validate_structure",
    "write_descriptor",
]


def build_design(
    family: str,
    n: int,
    f: int | None = None,
    seed: int = 0,
    rate=None,
    puncture: bool = True,
    **overrides,
) -> CodeDesign:
    """Build any family by tag; the single entry point used by the
    simulation harness, service, and CLI.

    Root families take f (and infer the rate); baselines take a rate
    (and infer f).  Extra keyword overrides reach the family builder.
    """
    if family == "random-root":
        return build_random_root(n, seed, **overrides)
    if family == "qc-root":
        return build_qc_root(n, f if f else 2, seed)
    if family == "ira-root":
        return build_ira_root(n, f if f else 2, seed)
    if family == "iraa-root":
        return build_iraa_root(n, f if f else 2, seed, puncture=puncture)
    if family == "doped-root":
        return build_doped_root(n, f if f else 2, seed)
    if family == "full-div":
        return build_full_diversity(n, f if f else 2, seed, **overrides)
    if family in ("peg", "qc-peg"):
        if rate is None:
            rate_map = {2: "1/2", 3: "1/3", 4: "1/4"}
            if f not in rate_map:
                raise ValueError("baseline needs a rate or f in {2,3,4}")
            rate = rate_map[f]
        from fractions import Fraction

        return build_baseline(
            n, Fraction(rate), qc=(family == "qc-peg"), seed=seed, **overrides
        )
    raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
