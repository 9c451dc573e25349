"""Trace records and their CSV form.

One row per state transition, columns ``cycle,event,fid,name,fpu,detail``.
``detail`` is a ``;``-separated list of ``key=value`` pairs whose keys depend
on the event (``level`` on enqueue; ``level,lookup,hit,run,end`` on dispatch;
``remaining`` on yield; ``wake`` on sleep; ``commit`` on integrate).
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

HEADER = ("cycle", "event", "fid", "name", "fpu", "detail")
EVENTS = ("decode", "ready", "enqueue", "dispatch", "yield", "sleep", "wake", "complete", "integrate")


class TraceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TraceRecord:
    cycle: int
    event: str
    fid: str
    name: str
    fpu: Optional[int] = None
    detail: str = ""

    def fields(self) -> dict[str, int]:
        out = {}
        if self.detail:
            for part in self.detail.split(";"):
                k, _, v = part.partition("=")
                out[k] = int(v)
        return out


def format_detail(**values) -> str:
    return ";".join(f"{k}={int(v)}" for k, v in values.items())


class Trace:
    def __init__(self, records: Iterable[TraceRecord] = ()):
        self.records: list[TraceRecord] = list(records)

    def emit(self, cycle: int, event: str, fid, name: str, fpu: Optional[int] = None, detail: str = "") -> None:
        self.records.append(TraceRecord(cycle, event, str(fid), name, fpu, detail))

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other) -> bool:
        return isinstance(other, Trace) and self.records == other.records

    def of(self, event: str) -> list[TraceRecord]:
        return [r for r in self.records if r.event == event]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HEADER)
        for r in self.records:
            w.writerow((r.cycle, r.event, r.fid, r.name, "" if r.fpu is None else r.fpu, r.detail))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Trace":
        rows = csv.reader(io.StringIO(text))
        header = next(rows, None)
        if header is None or tuple(header) != HEADER:
            raise TraceFormatError(f"bad trace header: {header!r}")
        records = []
        for n, row in enumerate(rows, start=2):
            if len(row) != len(HEADER):
                raise TraceFormatError(f"row {n}: expected {len(HEADER)} columns")
            cycle, event, fid, name, fpu, detail = row
            if event not in EVENTS:
                raise TraceFormatError(f"row {n}: unknown event {event!r}")
            records.append(TraceRecord(int(cycle), event, fid, name, int(fpu) if fpu else None, detail))
        return cls(records)


def atomic_write(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trace(trace: Trace, path) -> None:
    atomic_write(path, trace.to_csv())


def read_trace(path) -> Trace:
    with open(path, encoding="utf-8", newline="") as fh:
        return Trace.from_csv(fh.read())
