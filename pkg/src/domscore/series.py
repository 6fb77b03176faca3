"""Aligned forecast/realization series and the CSV schema used by the CLI.

The CSV schema: comma-separated, UTF-8, header row. Required column ``y``
(realizations), optional column ``t`` (timestamp label), every other column
is a forecast track. Row order is temporal and preserved.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .exceptions import MalformedInput, UnknownTrack

# 17 significant digits round-trips IEEE doubles exactly.
_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class PairedSeries:
    """Realizations paired with one or more equally long forecast tracks."""

    y: np.ndarray
    tracks: dict[str, np.ndarray]
    timestamps: tuple[str, ...] | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "y", y)
        if y.ndim != 1 or y.size < 1:
            raise MalformedInput("realizations must be a nonempty 1-d array")
        if not np.all(np.isfinite(y)):
            raise MalformedInput("realizations contain non-finite values")
        tracks = {}
        for name, x in self.tracks.items():
            x = np.asarray(x, dtype=float)
            if x.shape != y.shape:
                raise MalformedInput(
                    f"track {name!r} has length {x.size}, expected {y.size}"
                )
            if not np.all(np.isfinite(x)):
                raise MalformedInput(f"track {name!r} contains non-finite values")
            tracks[name] = x
        object.__setattr__(self, "tracks", tracks)
        if self.timestamps is not None:
            ts = tuple(str(t) for t in self.timestamps)
            if len(ts) != y.size:
                raise MalformedInput("timestamp column length mismatch")
            object.__setattr__(self, "timestamps", ts)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def track_names(self) -> list[str]:
        return list(self.tracks)

    def track(self, name: str) -> np.ndarray:
        try:
            return self.tracks[name]
        except KeyError:
            raise UnknownTrack(
                f"unknown track {name!r}; available: {sorted(self.tracks)}"
            ) from None

    def centered(self) -> "PairedSeries":
        """Demean realizations and every forecast track."""
        return PairedSeries(
            y=self.y - self.y.mean(),
            tracks={k: v - v.mean() for k, v in self.tracks.items()},
            timestamps=self.timestamps,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = list(self.tracks)
        header = (["t"] if self.timestamps is not None else []) + ["y"] + names
        writer.writerow(header)
        for i in range(self.n):
            row = []
            if self.timestamps is not None:
                row.append(self.timestamps[i])
            row.append(_FLOAT_FMT % self.y[i])
            row.extend(_FLOAT_FMT % self.tracks[name][i] for name in names)
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PairedSeries":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedInput("empty CSV input") from None
        header = [h.strip() for h in header]
        if "y" not in header:
            raise MalformedInput("CSV must contain a 'y' column")
        cols: dict[str, list] = {h: [] for h in header}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedInput(
                    f"row {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            for h, v in zip(header, row):
                cols[h].append(v)
        timestamps = tuple(cols.pop("t")) if "t" in cols else None

        def parse(name: str, values: list) -> np.ndarray:
            out = np.empty(len(values))
            for i, v in enumerate(values):
                try:
                    out[i] = float(v)
                except ValueError:
                    raise MalformedInput(
                        f"column {name!r}, row {i + 2}: cannot parse {v!r} as a number"
                    ) from None
            if not np.all(np.isfinite(out)):
                raise MalformedInput(f"column {name!r} contains non-finite values")
            return out

        y = parse("y", cols.pop("y"))
        if y.size == 0:
            raise MalformedInput("CSV has a header but no data rows")
        tracks = {name: parse(name, vals) for name, vals in cols.items()}
        return cls(y=y, tracks=tracks, timestamps=timestamps)
