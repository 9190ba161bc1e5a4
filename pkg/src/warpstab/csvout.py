"""Deterministic CSV emission: 17 significant digits, LF line endings."""

from __future__ import annotations

import os
from typing import Iterable, Sequence

__all__ = ["g17", "write_csv"]


def g17(x) -> str:
    """Format a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


def write_csv(target, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows of numbers (or strings) under a comma-joined header.

    target is a path or an open text file.  Numeric cells go through g17 so
    identical inputs always produce identical bytes.
    """
    own = isinstance(target, (str, bytes, os.PathLike))
    f = open(target, "w", newline="") if own else target
    try:
        f.write(",".join(header) + "\n")
        for row in rows:
            cells = [c if isinstance(c, str) else g17(c) for c in row]
            f.write(",".join(cells) + "\n")
    finally:
        if own:
            f.close()
