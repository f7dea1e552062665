"""Identity-check reports and their JSON / CSV serialization.

Complex numbers are always written as explicit real/imaginary pairs:
``{"re": ..., "im": ...}`` in JSON and ``<name>_re`` / ``<name>_im`` columns
in CSV.  Non-finite floats are written as ``null`` in JSON and as ``nan`` /
``inf`` in CSV.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

STATUSES = ("pass", "fail", "degenerate-pass", "rejected", "non-convergent")

FIELDS = (
    "identity",
    "params",
    "lhs",
    "rhs",
    "abs_err",
    "rel_err",
    "settings",
    "status",
    "wall_time_ms",
)


@dataclass
class Report:
    identity: str
    params: dict[str, Any]
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    settings: dict[str, Any] = field(default_factory=dict)
    status: str = "pass"
    wall_time_ms: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "degenerate-pass")

    def comparable(self) -> dict[str, Any]:
        """Serialized form without the wall-clock field, for determinism checks."""
        d = self.to_dict()
        del d["wall_time_ms"]
        return d

    def to_dict(self) -> dict[str, Any]:
        return {
            "identity": self.identity,
            "params": {k: _encode(v) for k, v in self.params.items()},
            "lhs": _encode(complex(self.lhs)),
            "rhs": _encode(complex(self.rhs)),
            "abs_err": _encode_float(self.abs_err),
            "rel_err": _encode_float(self.rel_err),
            "settings": {k: _encode(v) for k, v in self.settings.items()},
            "status": self.status,
            "wall_time_ms": _encode_float(self.wall_time_ms),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Report":
        return cls(
            identity=d["identity"],
            params={k: _decode(v) for k, v in d["params"].items()},
            lhs=_decode_complex(d["lhs"]),
            rhs=_decode_complex(d["rhs"]),
            abs_err=_decode_float(d["abs_err"]),
            rel_err=_decode_float(d["rel_err"]),
            settings={k: _decode(v) for k, v in d["settings"].items()},
            status=d["status"],
            wall_time_ms=_decode_float(d["wall_time_ms"]),
        )


def residuals(lhs: complex, rhs: complex) -> tuple[float, float]:
    """Absolute error and error relative to max(|lhs|, |rhs|) (0 when both vanish)."""
    if not all(math.isfinite(v) for v in (lhs.real, lhs.imag, rhs.real, rhs.imag)):
        return math.nan, math.nan
    # quarter scale keeps the difference and moduli finite near the float limit
    diff = abs(0.25 * lhs - 0.25 * rhs)
    scale = max(abs(0.25 * lhs), abs(0.25 * rhs))
    rel_err = diff / scale if scale > 0 else 0.0
    return float(4.0 * diff), float(rel_err)


def make_report(identity, params, lhs, rhs, tol, settings, wall_time_ms=0.0, status=None):
    """Build a report whose status is ``pass`` iff rel_err < tol (unless given)."""
    lhs, rhs = _as_complex(lhs), _as_complex(rhs)
    abs_err, rel_err = residuals(lhs, rhs)
    if status is None:
        ok = math.isfinite(rel_err) and rel_err < tol
        status = "pass" if ok else "fail"
    settings = dict(settings)
    settings.setdefault("tolerance", tol)
    return Report(identity, dict(params), lhs, rhs, abs_err, rel_err, settings, status, wall_time_ms)


# -- scalar encoding ---------------------------------------------------------


def _as_complex(v) -> complex:
    # a missing value is nan in both parts, not nan + 0j
    v = complex(v)
    return complex(math.nan, math.nan) if math.isnan(v.real) or math.isnan(v.imag) else v


def _encode_float(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _decode_float(x):
    return math.nan if x is None else float(x)


def _encode(v):
    if isinstance(v, bool) or isinstance(v, str) or v is None:
        return v
    if isinstance(v, (int,)) or (hasattr(v, "dtype") and v.dtype.kind in "iu"):
        return int(v)
    if isinstance(v, complex) or (hasattr(v, "dtype") and v.dtype.kind == "c"):
        v = complex(v)
        return {"re": _encode_float(v.real), "im": _encode_float(v.imag)}
    return _encode_float(v)


def _decode_complex(d):
    return complex(_decode_float(d["re"]), _decode_float(d["im"]))


def _decode(v):
    if isinstance(v, dict):
        return _decode_complex(v)
    return v


# -- emission ----------------------------------------------------------------


def to_json(reports: Iterable[Report]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, allow_nan=False)


def from_json(text: str) -> list[Report]:
    return [Report.from_dict(d) for d in json.loads(text)]


def _flatten(r: Report) -> dict[str, str]:
    row = {"identity": r.identity}
    for k, v in r.params.items():
        _put(row, f"params.{k}", v)
    _put(row, "lhs", complex(r.lhs))
    _put(row, "rhs", complex(r.rhs))
    _put(row, "abs_err", float(r.abs_err))
    _put(row, "rel_err", float(r.rel_err))
    for k, v in r.settings.items():
        _put(row, f"settings.{k}", v)
    row["status"] = r.status
    _put(row, "wall_time_ms", float(r.wall_time_ms))
    return row


def _put(row, key, v):
    if isinstance(v, complex) or (hasattr(v, "dtype") and v.dtype.kind == "c"):
        v = complex(v)
        row[f"{key}_re"] = repr(v.real)
        row[f"{key}_im"] = repr(v.imag)
    elif isinstance(v, float):
        row[key] = repr(v)
    else:
        row[key] = str(v)


_SECTION_RANK = {"identity": 0, "params": 1, "lhs": 2, "rhs": 2, "abs_err": 2, "rel_err": 2,
                 "settings": 3, "status": 4, "wall_time_ms": 5}


def csv_header(reports: list[Report]) -> list[str]:
    """Union of the flattened columns, grouped by section in first-seen order."""
    header: list[str] = []
    for r in reports:
        for k in _flatten(r):
            if k not in header:
                header.append(k)
    return sorted(header, key=lambda k: _SECTION_RANK[k.split(".")[0].removesuffix("_re").removesuffix("_im")])


def to_csv(reports: Iterable[Report]) -> str:
    reports = list(reports)
    buf = io.StringIO()
    header = csv_header(reports) or ["identity", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                                     "abs_err", "rel_err", "status", "wall_time_ms"]
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(_flatten(r))
    return buf.getvalue()


def _parse_scalar(s: str):
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def from_csv(text: str) -> list[Report]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        groups: dict[str, dict[str, Any]] = {"params": {}, "settings": {}}
        top: dict[str, Any] = {}
        for key, raw in row.items():
            if raw == "" or raw is None:
                continue
            section, _, name = key.partition(".")
            target, name = (groups[section], name) if name else (top, key)
            if name.endswith("_re") or name.endswith("_im"):
                base, part = name[:-3], name[-2:]
                z = target.get(base, 0j)
                z = complex(float(raw), z.imag) if part == "re" else complex(z.real, float(raw))
                target[base] = z
            else:
                target[name] = _parse_scalar(raw)
        out.append(Report(
            identity=top["identity"],
            params=groups["params"],
            lhs=top["lhs"],
            rhs=top["rhs"],
            abs_err=float(top["abs_err"]),
            rel_err=float(top["rel_err"]),
            settings=groups["settings"],
            status=top["status"],
            wall_time_ms=float(top["wall_time_ms"]),
        ))
    return out


def emit_report(reports: Iterable[Report], fmt: str = "json", path: str | Path | None = None) -> None:
    """Write reports as JSON or CSV to ``path`` (standard output when None)."""
    reports = list(reports)
    if fmt == "json":
        text = to_json(reports) + "\n"
    elif fmt == "csv":
        text = to_csv(reports)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
