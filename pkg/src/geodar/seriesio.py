"""Series file formats and survey-histogram ingestion.

One trajectory per UTF-8 text file. Scalar series hold one value per
line. Quantile series start with a header ``m=<int> lo=<real> hi=<real>``
followed by one line of m values per time point. SPD series start with
``p=<int>`` followed by one line per time point holding the p(p+1)/2
Cholesky-factor entries in row-major order, diagonal stored raw and
strictly positive. Lines starting with ``#`` are comments; a comment of
``key=value`` tokens (e.g. ``# space=scalar phi=0.3 T=40 seed=7``) is
parsed into the returned metadata.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SeriesFormatError
from .geometry import Space
from .spaces import (
    LogCholeskySpd,
    QuantileFunction,
    ScalarLine,
    WassersteinGrid,
    density_to_quantile,
    factor_to_point,
    point_to_factor,
)

#: Support interval of the survey belief scale, in percent.
SCE_SUPPORT = (-36.0, 36.0)

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def format_float(x: float) -> str:
    """Lossless decimal rendering (17 significant digits)."""
    return f"{x:.17g}"


def _provenance_line(meta: dict) -> str:
    return (
        f"# space={meta['space']} phi={format_float(meta['phi'])} "
        f"T={meta['T']} seed={meta['seed']}"
    )


def write_series(path, space: Space, points, provenance: dict | None = None) -> None:
    """Write a trajectory in the format of its space."""
    lines: list[str] = []
    if provenance is not None:
        lines.append(_provenance_line(provenance))
    if isinstance(space, ScalarLine):
        lines.extend(format_float(float(p)) for p in points)
    elif isinstance(space, WassersteinGrid):
        lines.append(
            f"m={space.m} lo={format_float(space.support_lo)} "
            f"hi={format_float(space.support_hi)}"
        )
        for p in points:
            space.validate(p)
            lines.append(" ".join(format_float(v) for v in p.values))
    elif isinstance(space, LogCholeskySpd):
        lines.append(f"p={space.dim}")
        idx = np.tril_indices(space.dim)
        for p in points:
            space.validate(p)
            lines.append(" ".join(format_float(v) for v in point_to_factor(p)[idx]))
    else:
        raise ValueError(f"no series format for space {space.name!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_point(path, space: Space, point, provenance: dict | None = None) -> None:
    """Write a single point as a length-one series."""
    write_series(path, space, [point], provenance)


def _parse_comment(line: str, meta: dict) -> None:
    for token in line.lstrip("#").split():
        if "=" in token:
            key, value = token.split("=", 1)
            meta[key] = value


def _parse_floats(text: str, lineno: int, expected: int | None = None) -> np.ndarray:
    try:
        values = np.array([float(tok) for tok in text.split()], dtype=float)
    except ValueError as exc:
        raise SeriesFormatError(str(exc), lineno) from None
    if expected is not None and values.size != expected:
        raise SeriesFormatError(f"expected {expected} values, got {values.size}", lineno)
    return values


def read_series(path) -> tuple[Space, list, dict]:
    """Read a series file, inferring the space from its header.

    Returns ``(space, points, meta)`` where meta carries any parsed
    comment tokens. Raises :class:`SeriesFormatError` with the offending
    line number on malformed input.
    """
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    meta: dict = {}
    content: list[tuple[int, str]] = []
    for lineno, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            _parse_comment(stripped, meta)
            continue
        content.append((lineno, stripped))
    if not content:
        raise SeriesFormatError("file holds no data lines")

    first_no, first = content[0]
    if first.startswith("m="):
        header = dict(tok.split("=", 1) for tok in first.split() if "=" in tok)
        try:
            m = int(header["m"])
            lo, hi = float(header["lo"]), float(header["hi"])
        except (KeyError, ValueError):
            raise SeriesFormatError(f"bad quantile header: {first!r}", first_no) from None
        space = WassersteinGrid(m, (lo, hi))
        points: list = []
        for lineno, line in content[1:]:
            values = _parse_floats(line, lineno, expected=m)
            try:
                points.append(QuantileFunction(values, lo, hi))
            except ValueError as exc:
                raise SeriesFormatError(str(exc), lineno) from None
        return space, points, meta

    if first.startswith("p="):
        try:
            p = int(first.split("=", 1)[1])
        except ValueError:
            raise SeriesFormatError(f"bad SPD header: {first!r}", first_no) from None
        space = LogCholeskySpd(p)
        idx = np.tril_indices(p)
        points = []
        for lineno, line in content[1:]:
            entries = _parse_floats(line, lineno, expected=p * (p + 1) // 2)
            L = np.zeros((p, p))
            L[idx] = entries
            try:
                points.append(factor_to_point(L))
            except ValueError as exc:
                raise SeriesFormatError(str(exc), lineno) from None
        return space, points, meta

    space = ScalarLine()
    points = []
    for lineno, line in content:
        points.append(float(_parse_floats(line, lineno, expected=1)[0]))
    return space, points, meta


@dataclass(frozen=True)
class SceRecord:
    """One survey response summary: a month and its median belief in percent."""

    month: str
    median_belief: float


def read_sce_records(path) -> list[SceRecord]:
    """Parse a ``month,median_belief`` CSV into records.

    Months must be ISO year-month strings; beliefs must be finite and
    within the survey support interval.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SeriesFormatError("empty file")
    header = [h.strip() for h in lines[0].split(",")]
    if header != ["month", "median_belief"]:
        raise SeriesFormatError(f"expected header 'month,median_belief', got {lines[0]!r}", 1)
    records: list[SceRecord] = []
    lo, hi = SCE_SUPPORT
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise SeriesFormatError(f"expected 2 fields, got {len(parts)}", lineno)
        month, raw_belief = parts
        match = _MONTH_RE.match(month)
        if not match or not 1 <= int(match.group(2)) <= 12:
            raise SeriesFormatError(f"month not in YYYY-MM form: {month!r}", lineno)
        try:
            belief = float(raw_belief)
        except ValueError:
            raise SeriesFormatError(f"belief is not numeric: {raw_belief!r}", lineno) from None
        if not np.isfinite(belief) or not lo <= belief <= hi:
            raise SeriesFormatError(f"belief {belief} outside [{lo}, {hi}]", lineno)
        records.append(SceRecord(month, belief))
    return records


def monthly_groups(records) -> dict[str, list[float]]:
    """Beliefs grouped by month, in chronological order."""
    groups: dict[str, list[float]] = {}
    for rec in records:
        groups.setdefault(rec.month, []).append(rec.median_belief)
    return {month: groups[month] for month in sorted(groups)}


def ingest_sce(
    records, m: int = 512, support: tuple[float, float] = SCE_SUPPORT
) -> tuple[WassersteinGrid, list, list[str], list[tuple[str, str]]]:
    """Smooth monthly belief samples into a quantile series.

    Months with fewer than two records or zero variance are skipped.
    Returns ``(space, points, months_used, skipped)`` where skipped pairs
    each month with the reason it was dropped.
    """
    space = WassersteinGrid(m, support)
    points: list = []
    months: list[str] = []
    skipped: list[tuple[str, str]] = []
    for month, beliefs in monthly_groups(records).items():
        if len(beliefs) < 2:
            skipped.append((month, "fewer than 2 records"))
            continue
        if float(np.std(beliefs, ddof=1)) <= 0.0:
            skipped.append((month, "zero variance"))
            continue
        points.append(density_to_quantile(beliefs, support, m))
        months.append(month)
    return space, points, months, skipped
