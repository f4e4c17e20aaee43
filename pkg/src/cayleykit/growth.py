"""Sampled growth functions r -> value with exactness annotations.

Tables are the lingua franca between the analysis modules, the CLI and
the rough-equivalence checker.  CSV columns are (r, value, mode,
window_R); interval samples render their value as ``lo..hi``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import List, Optional

KINDS = ("end_depth", "sci", "semistability", "delta", "cp")


@dataclass(frozen=True)
class Sample:
    r: int
    value: Optional[int]
    mode: str  # exact | lower_bound | interval
    window_R: int
    lo: Optional[int] = None
    hi: Optional[int] = None

    def render_value(self) -> str:
        if self.mode == "interval":
            lo = "" if self.lo is None else str(self.lo)
            hi = "" if self.hi is None else str(self.hi)
            return f"{lo}..{hi}"
        return "" if self.value is None else str(self.value)


@dataclass
class GrowthTable:
    kind: str
    samples: List[Sample] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown growth table kind {self.kind!r}")
        self.samples.sort(key=lambda s: s.r)

    def exact_samples(self) -> List[Sample]:
        return [s for s in self.samples if s.mode == "exact"]

    def value_at(self, r: int) -> Optional[int]:
        for s in self.samples:
            if s.r == r:
                return s.value
        return None

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["r", "value", "mode", "window_R"])
        for s in self.samples:
            writer.writerow([s.r, s.render_value(), s.mode, s.window_R])
        return out.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "meta": self.meta,
            "samples": [
                {
                    "r": s.r,
                    "value": s.value,
                    "mode": s.mode,
                    "window_R": s.window_R,
                    "lo": s.lo,
                    "hi": s.hi,
                }
                for s in self.samples
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_csv(cls, text: str, kind: str, meta=None) -> "GrowthTable":
        lines = [l for l in text.splitlines() if not l.startswith("#")]
        rows = list(csv.reader(io.StringIO("\n".join(lines))))
        if not rows or rows[0] != ["r", "value", "mode", "window_R"]:
            raise ValueError("bad growth table header")
        samples = []
        for row in rows[1:]:
            if not row:
                continue
            r, value, mode, window = row
            lo = hi = None
            val: Optional[int] = None
            if mode == "interval":
                lo_s, _, hi_s = value.partition("..")
                lo = int(lo_s) if lo_s else None
                hi = int(hi_s) if hi_s else None
                val = hi
            elif value:
                val = int(value)
            samples.append(
                Sample(r=int(r), value=val, mode=mode, window_R=int(window), lo=lo, hi=hi)
            )
        return cls(kind=kind, samples=samples, meta=meta or {})

    @classmethod
    def from_json(cls, text: str) -> "GrowthTable":
        data = json.loads(text)
        samples = [
            Sample(
                r=s["r"],
                value=s["value"],
                mode=s["mode"],
                window_R=s["window_R"],
                lo=s.get("lo"),
                hi=s.get("hi"),
            )
            for s in data["samples"]
        ]
        return cls(kind=data["kind"], samples=samples, meta=data.get("meta", {}))
