"""Robot census ingestion and passive/active dust-collector tallies.

Input is CSV with header ``name,mobility,complete,active_dust_collector``.
Lines starting with ``#`` and blank lines are skipped.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable

from dustsim.errors import ParseError

log = logging.getLogger(__name__)

HEADER = ("name", "mobility", "complete", "active_dust_collector")

_TRUE = {"true", "yes", "y", "1", "t"}
_FALSE = {"false", "no", "n", "0", "f"}


class Mobility(str, enum.Enum):
    NONE = "None"
    WHEELED = "Wheeled"
    LEGGED = "Legged"
    WINGED = "Winged"
    TRACKED = "Tracked"
    OTHER = "Other"
    UNKNOWN = "Unknown"


_MOBILITY_BY_KEY = {m.value.lower(): m for m in Mobility}
_MOBILITY_BY_KEY[""] = Mobility.UNKNOWN


@dataclass(frozen=True)
class CensusRecord:
    name: str
    mobility: Mobility
    complete: bool
    active_dust_collector: bool = False


@dataclass(frozen=True)
class CensusSummary:
    total_complete: int
    official_passive: int
    wheeled: int
    active_dust: int
    continuum_note: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "total_complete": self.total_complete,
            "official_passive": self.official_passive,
            "wheeled": self.wheeled,
            "active_dust": self.active_dust,
            "continuum_note": dict(self.continuum_note),
        }


def _parse_bool(text: str, column: str, line: int) -> bool:
    key = text.strip().lower()
    if key in _TRUE:
        return True
    if key in _FALSE:
        return False
    raise ParseError(f"column {column!r}: expected true/false, got {text!r}", line)


class CensusReader:
    """Streaming parser. ``unknown_mobility`` counts values folded into Other."""

    def __init__(self):
        self.unknown_mobility = 0

    def _mobility(self, text: str, line: int) -> Mobility:
        key = text.strip().lower()
        try:
            return _MOBILITY_BY_KEY[key]
        except KeyError:
            self.unknown_mobility += 1
            log.warning("line %d: unknown mobility %r, counted as Other", line, text)
            return Mobility.OTHER

    def read(self, stream: IO[str]) -> list[CensusRecord]:
        records = []
        header_seen = False
        for line_no, row in _numbered_rows(stream):
            if not header_seen:
                got = tuple(c.strip().lower() for c in row)
                if got != HEADER:
                    raise ParseError(f"expected header {','.join(HEADER)!r}, got {','.join(row)!r}", line_no)
                header_seen = True
                continue
            if len(row) != len(HEADER):
                raise ParseError(f"expected {len(HEADER)} columns, got {len(row)}", line_no)
            name, mobility, complete, active = row
            if not name.strip():
                raise ParseError("empty robot name", line_no)
            records.append(CensusRecord(
                name=name.strip(),
                mobility=self._mobility(mobility, line_no),
                complete=_parse_bool(complete, "complete", line_no),
                active_dust_collector=_parse_bool(active, "active_dust_collector", line_no),
            ))
        return records


def _numbered_rows(stream: IO[str]) -> Iterable[tuple[int, list[str]]]:
    for line_no, text in enumerate(stream, start=1):
        if not text.strip() or text.lstrip().startswith("#"):
            continue
        try:
            row = next(csv.reader([text]))
        except csv.Error as exc:
            raise ParseError(str(exc), line_no) from None
        yield line_no, row


def load_census(source: str | os.PathLike | IO[str]) -> list[CensusRecord]:
    """Parse a census CSV from a path or an open text stream."""
    if hasattr(source, "read"):
        return CensusReader().read(source)
    with open(source, encoding="utf-8", newline="") as fh:
        return CensusReader().read(fh)


def emit_census(records: Iterable[CensusRecord], stream: IO[str] | None = None) -> str:
    out = stream if stream is not None else io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HEADER)
    for r in records:
        writer.writerow((r.name, r.mobility.value, str(r.complete).lower(),
                         str(r.active_dust_collector).lower()))
    return out.getvalue() if stream is None else ""


def summarize(records: Iterable[CensusRecord]) -> CensusSummary:
    """Tally complete records only.

    A robot with no mobility is an official passive dust collector; wheeled
    robots are counted separately, and every other mobility class lands in
    ``continuum_note``.
    """
    complete = [r for r in records if r.complete]
    by_mobility = Counter(r.mobility for r in complete)
    others = {
        m.value: by_mobility[m]
        for m in Mobility
        if m not in (Mobility.NONE, Mobility.WHEELED) and by_mobility[m]
    }
    return CensusSummary(
        total_complete=len(complete),
        official_passive=by_mobility[Mobility.NONE],
        wheeled=by_mobility[Mobility.WHEELED],
        active_dust=sum(r.active_dust_collector for r in complete),
        continuum_note=others,
    )


def paper_shaped_fixture():
    """Path-like handle to the bundled synthetic census.

    The rows are invented; only their counts (261 complete, 20 immobile,
    86 wheeled, no active dust collectors) follow the published field study.
    """
    return resources.files("dustsim") / "data" / "census_synthetic.csv"


def load_paper_shaped_fixture() -> list[CensusRecord]:
    with resources.as_file(paper_shaped_fixture()) as path:
        return load_census(path)
