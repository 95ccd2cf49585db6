"""CSV formats read and written by the command-line tools.

Floats are written with ``repr`` so that parsing a file and writing it
again gives the same bytes. Missing values are empty fields, invalid grid
cells are ``nan``.
"""
import csv
import math
from typing import NamedTuple, Optional

from .calibrate import ReferencePoint
from .errors import UsageError

GRID_HEADER = ("task", "delta_seed", "n", "delta_obs", "prob")
CONTOUR_HEADER = ("n", "delta_at_threshold")
REFERENCE_HEADER = ("n", "delta", "target_prob")
TRACE_HEADER = ("s", "sse")
AUDIT_HEADER = ("task", "mu_a", "mu_b", "n", "spread_or_congruence", "delta_a", "delta_b")
AUDIT_EXTRA = ("p_false_baseline", "p_false_underspec", "verdict")


class CsvFormatError(UsageError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def _writer(stream):
    return csv.writer(stream, lineterminator="\n")


def _rows(stream, header, lenient=False):
    """Yield ``(line_number, record)`` after checking the header.

    A record with the wrong number of fields raises, or with ``lenient`` is
    yielded as the ``CsvFormatError`` itself.
    """
    reader = csv.reader(stream)
    try:
        first = next(reader)
    except StopIteration:
        return
    if tuple(h.strip() for h in first) != header:
        raise CsvFormatError(f"expected header {','.join(header)!r}, got {','.join(first)!r}", 1)
    for record in reader:
        if not record or all(not f.strip() for f in record):
            continue
        if len(record) != len(header):
            exc = CsvFormatError(f"expected {len(header)} fields, got {len(record)}", reader.line_num)
            if not lenient:
                raise exc
            yield reader.line_num, exc
            continue
        yield reader.line_num, [f.strip() for f in record]


def _number(text, name, line, kind=float):
    try:
        value = kind(text)
    except ValueError:
        raise CsvFormatError(f"{name} is not a valid {kind.__name__}: {text!r}", line) from None
    if kind is float and not math.isfinite(value):
        raise CsvFormatError(f"{name} must be finite, got {text!r}", line)
    return value


# grid and contour

class GridRow(NamedTuple):
    task: str
    delta_seed: float
    n: int
    delta_obs: float
    prob: float


def write_grid(stream, rows):
    w = _writer(stream)
    w.writerow(GRID_HEADER)
    for task, seed_sd, n, d, p in rows:
        w.writerow((task, fmt(seed_sd), fmt(int(n)), fmt(d), fmt(p)))


def read_grid(stream):
    out = []
    for line, (task, seed_sd, n, d, p) in _rows(stream, GRID_HEADER):
        prob = float("nan") if p == "nan" else _number(p, "prob", line)
        out.append(GridRow(task, _number(seed_sd, "delta_seed", line),
                           _number(n, "n", line, int), _number(d, "delta_obs", line), prob))
    return out


def write_contour(stream, n_values, contour):
    w = _writer(stream)
    w.writerow(CONTOUR_HEADER)
    for n, d in zip(n_values, contour):
        w.writerow((fmt(int(n)), fmt(d)))


def read_contour(stream):
    out = []
    for line, (n, d) in _rows(stream, CONTOUR_HEADER):
        out.append((_number(n, "n", line, int), None if d == "" else _number(d, "delta", line)))
    return out


# calibration

def read_references(stream):
    refs = []
    for line, (n, d, p) in _rows(stream, REFERENCE_HEADER):
        n = _number(n, "n", line, int)
        p = _number(p, "target_prob", line)
        if n < 2:
            raise CsvFormatError(f"n must be >= 2, got {n}", line)
        if not 0.0 <= p <= 1.0:
            raise CsvFormatError(f"target_prob must lie in [0, 1], got {p!r}", line)
        refs.append(ReferencePoint(n, _number(d, "delta", line), p))
    return refs


def write_references(stream, refs):
    w = _writer(stream)
    w.writerow(REFERENCE_HEADER)
    for r in refs:
        w.writerow((fmt(int(r.n)), fmt(r.delta_obs), fmt(r.target_prob)))


def write_trace(stream, trace):
    w = _writer(stream)
    w.writerow(TRACE_HEADER)
    for s, e in trace:
        w.writerow((fmt(s), fmt(e)))


# audit

class AuditRow(NamedTuple):
    line: int
    raw: tuple              # fields as read, echoed back unchanged
    task: str
    mu_a: float
    mu_b: float
    n: int
    spread_or_congruence: Optional[float]
    delta_a: float
    delta_b: float


def parse_audit_record(line, record):
    task, mu_a, mu_b, n, spread, d_a, d_b = record
    return AuditRow(
        line, tuple(record), task,
        _number(mu_a, "mu_a", line), _number(mu_b, "mu_b", line), _number(n, "n", line, int),
        None if spread == "" else _number(spread, "spread_or_congruence", line),
        0.0 if d_a == "" else _number(d_a, "delta_a", line),
        0.0 if d_b == "" else _number(d_b, "delta_b", line))


def read_audit(stream):
    """Yield ``(line, AuditRow or CsvFormatError)``; bad rows do not stop the scan."""
    for line, record in _rows(stream, AUDIT_HEADER, lenient=True):
        if isinstance(record, CsvFormatError):
            yield line, record
            continue
        try:
            yield line, parse_audit_record(line, record)
        except CsvFormatError as exc:
            yield line, exc


def write_audit(stream, results):
    """``results``: ``(raw_fields, p_baseline, p_underspec, verdict)`` per input row."""
    w = _writer(stream)
    w.writerow(AUDIT_HEADER + AUDIT_EXTRA)
    for raw, p0, p1, verdict in results:
        w.writerow(tuple(raw) + (fmt(p0), fmt(p1), verdict))
