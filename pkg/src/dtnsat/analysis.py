"""Event-log analysis: saturation, time-to-saturation, smoothing, occupancy.

Saturation of a message is the share of all nodes that have held a copy at
least once (the creator counts from creation). Repeat deliveries to the same
node never raise it past 100%; they are surfaced separately as redelivery
counts so protocol misbehavior stays measurable.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

from .engine import EVENT_KINDS


class LogFormatError(ValueError):
    """Event log text that does not match the record format."""


@dataclass(frozen=True)
class LogRecord:
    time: float
    kind: str
    message_id: str
    frm: str
    to: str


_KIND_SET = frozenset(EVENT_KINDS)


def parse_event_log(path) -> list[LogRecord]:
    """Read an event log; validates field count, kinds, and time monotonicity."""
    records: list[LogRecord] = []
    last = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 5:
                raise LogFormatError(f"{path}: line {lineno}: expected 5 fields, got {len(fields)}")
            time_text, kind, mid, frm, to = fields
            try:
                time_s = float(time_text)
            except ValueError:
                raise LogFormatError(f"{path}: line {lineno}: bad time {time_text!r}") from None
            if kind not in _KIND_SET:
                raise LogFormatError(f"{path}: line {lineno}: unknown record kind {kind!r}")
            if last is not None and time_s < last - 1e-9:
                raise LogFormatError(f"{path}: line {lineno}: time went backwards")
            last = time_s
            records.append(LogRecord(time_s, kind, mid, frm, to))
    return records


@dataclass
class SaturationSeries:
    """Unique-holder percentage over time for one message."""

    message_id: str
    creation_time: float
    creator: str
    total_nodes: int
    points: list[tuple[float, float]] = field(default_factory=list)
    unique_receivers: int = 0  # includes the creator
    redeliveries: int = 0

    @property
    def final_pct(self) -> float:
        return self.points[-1][1] if self.points else 0.0

    @property
    def reached_full(self) -> bool:
        return self.unique_receivers == self.total_nodes


def saturation(records, total_nodes: int) -> dict[str, SaturationSeries]:
    """Per-message saturation series, keyed by id in creation order.

    The creator counts as the first receiver, so the series starts at
    100/total_nodes at creation time. The percentage is capped at 100;
    deliveries to nodes that already held the message increment
    `redeliveries` instead.
    """
    if total_nodes < 1:
        raise ValueError("total_nodes must be >= 1")
    series: dict[str, SaturationSeries] = {}
    holders: dict[str, set[str]] = {}
    for rec in records:
        if rec.kind == "CREATE":
            if rec.message_id in series:
                raise LogFormatError(f"duplicate CREATE for {rec.message_id}")
            s = SaturationSeries(rec.message_id, rec.time, rec.frm, total_nodes)
            series[rec.message_id] = s
            holders[rec.message_id] = {rec.frm}
            s.unique_receivers = 1
            s.points.append((rec.time, min(100.0, 100.0 / total_nodes)))
        elif rec.kind == "RECEIVED":
            s = series.get(rec.message_id)
            if s is None:
                raise LogFormatError(f"RECEIVED for unknown message {rec.message_id}")
            seen = holders[rec.message_id]
            if rec.to in seen:
                s.redeliveries += 1
            else:
                seen.add(rec.to)
                s.unique_receivers += 1
                pct = min(100.0, 100.0 * s.unique_receivers / total_nodes)
                s.points.append((rec.time, pct))
    return series


def time_to_full_saturation(series: SaturationSeries) -> float | None:
    """Seconds from creation until every node has held the message; None if
    that never happened. A 1-node network saturates at creation (0.0)."""
    if not series.reached_full:
        return None
    return series.points[-1][0] - series.creation_time


def ema(values, alpha: float = 0.1) -> list[float]:
    """Exponential moving average: s0 = x0, s_i = (1-alpha)*s_{i-1} + alpha*x_i."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    out: list[float] = []
    for x in values:
        out.append(x if not out else (1.0 - alpha) * out[-1] + alpha * x)
    return out


def read_occupancy(path) -> list[tuple[float, float]]:
    """Read an occupancy CSV (time, mean_occupancy_pct)."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty occupancy file")
        for fields in reader:
            if len(fields) != 2:
                raise ValueError(f"{path}: expected 2 columns")
            rows.append((float(fields[0]), float(fields[1])))
    return rows


def max_avg_occupancy(samples) -> float:
    """Peak of the mean-occupancy series; samples = path or (time, pct) rows."""
    if isinstance(samples, (str, os.PathLike)):
        samples = read_occupancy(samples)
    rows = list(samples)
    if not rows:
        raise ValueError("occupancy series is empty")
    return max(pct for _, pct in rows)


# --------------------------------------------------------------------------
# multi-run summaries

@dataclass(frozen=True)
class RunRef:
    """Pointer to one finished run's outputs plus its identifying parameters."""

    name: str
    out_dir: str
    params: dict
    total_nodes: int

    @property
    def events_path(self) -> str:
        return os.path.join(self.out_dir, "events.log")

    @property
    def occupancy_path(self) -> str:
        return os.path.join(self.out_dir, "occupancy.csv")


def read_manifest(path) -> dict[str, str]:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or "=" not in line:
                continue
            k, _, v = line.partition("=")
            values[k.strip()] = v.strip()
    return values


def discover_runs(logs_dir, total_nodes: int | None = None) -> list[RunRef]:
    """Find runs under logs_dir: either a batch root with index.csv or one
    run directory containing manifest.txt. --nodes style overrides win over
    the manifest's recorded node count."""
    index_path = os.path.join(logs_dir, "index.csv")
    runs = []
    if os.path.exists(index_path):
        with open(index_path, "r", encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                if row.get("status") != "ok":
                    continue
                run_dir = row["dir"]
                if not os.path.isabs(run_dir):
                    run_dir = os.path.join(logs_dir, os.path.basename(run_dir))
                runs.append(_run_ref(row["run"], run_dir, total_nodes, extra=row))
        return runs
    if os.path.exists(os.path.join(logs_dir, "manifest.txt")):
        name = os.path.basename(os.path.normpath(logs_dir)) or "run"
        return [_run_ref(name, logs_dir, total_nodes)]
    raise FileNotFoundError(f"{logs_dir}: no index.csv or manifest.txt found")


_PARAM_KEYS = ("seed", "router", "buffer", "traffic", "group1.count", "group2.count")


def _run_ref(name, run_dir, total_nodes, extra=None) -> RunRef:
    manifest = read_manifest(os.path.join(run_dir, "manifest.txt"))
    params = {k: manifest.get(k, "") for k in _PARAM_KEYS}
    if extra:
        params.update({k: v for k, v in extra.items()
                       if k not in ("run", "dir", "status", "error")})
    nodes = total_nodes if total_nodes is not None else int(manifest["nodes_total"])
    return RunRef(name=name, out_dir=run_dir, params=params, total_nodes=nodes)


def summarize(runs, out_dir, alpha: float = 0.1) -> dict[str, str]:
    """Write the summary tables for a list of RunRefs.

    Produces, under out_dir:
      table_saturation_times.csv  one row per (run, message)
      table_occupancy.csv         peak mean occupancy per run
      table_unsaturated.csv       per-run counts of messages below 100%
      ema_series.csv              smoothed time-to-saturation by creation time
      <run>/series_<msg>.csv      per-message saturation curves
    """
    os.makedirs(out_dir, exist_ok=True)
    param_cols = list(_PARAM_KEYS)
    sat_path = os.path.join(out_dir, "table_saturation_times.csv")
    occ_path = os.path.join(out_dir, "table_occupancy.csv")
    unsat_path = os.path.join(out_dir, "table_unsaturated.csv")
    ema_path = os.path.join(out_dir, "ema_series.csv")

    with open(sat_path, "w", encoding="utf-8", newline="") as sat_fh, \
         open(occ_path, "w", encoding="utf-8", newline="") as occ_fh, \
         open(unsat_path, "w", encoding="utf-8", newline="") as unsat_fh, \
         open(ema_path, "w", encoding="utf-8", newline="") as ema_fh:
        sat = csv.writer(sat_fh)
        occ = csv.writer(occ_fh)
        unsat = csv.writer(unsat_fh)
        ema_w = csv.writer(ema_fh)
        sat.writerow(["run", *param_cols, "nodes_total", "message_id", "creation_time",
                      "time_to_saturation", "final_saturation_pct",
                      "unique_receivers", "redeliveries"])
        occ.writerow(["run", *param_cols, "nodes_total", "max_avg_occupancy_pct"])
        unsat.writerow(["run", *param_cols, "nodes_total", "messages_created",
                        "unsaturated_count", "redeliveries_total"])
        ema_w.writerow(["run", "message_id", "creation_time",
                        "time_to_saturation", "ema"])

        for ref in runs:
            pvals = [ref.params.get(k, "") for k in param_cols]
            series = saturation(parse_event_log(ref.events_path), ref.total_nodes)
            ordered = sorted(series.values(), key=lambda s: (s.creation_time, s.message_id))
            run_series_dir = os.path.join(out_dir, ref.name)
            os.makedirs(run_series_dir, exist_ok=True)
            unsaturated = 0
            redeliveries_total = 0
            saturated_rows = []
            for s in ordered:
                tts = time_to_full_saturation(s)
                if tts is None:
                    unsaturated += 1
                else:
                    saturated_rows.append(s)
                redeliveries_total += s.redeliveries
                sat.writerow([
                    ref.name, *pvals, ref.total_nodes, s.message_id,
                    f"{s.creation_time:.4f}",
                    "" if tts is None else f"{tts:.4f}",
                    f"{s.final_pct:.4f}", s.unique_receivers, s.redeliveries,
                ])
                with open(os.path.join(run_series_dir, f"series_{s.message_id}.csv"),
                          "w", encoding="utf-8", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(["time", "saturation_pct"])
                    for t, pct in s.points:
                        w.writerow([f"{t:.4f}", f"{pct:.4f}"])
            occ.writerow([ref.name, *pvals, ref.total_nodes,
                          f"{max_avg_occupancy(ref.occupancy_path):.6f}"])
            unsat.writerow([ref.name, *pvals, ref.total_nodes, len(ordered),
                            unsaturated, redeliveries_total])
            tts_values = [time_to_full_saturation(s) for s in saturated_rows]
            smoothed = ema(tts_values, alpha=alpha)
            for s, tts, sm in zip(saturated_rows, tts_values, smoothed):
                ema_w.writerow([ref.name, s.message_id, f"{s.creation_time:.4f}",
                                f"{tts:.4f}", f"{sm:.4f}"])

    return {
        "table_saturation_times": sat_path,
        "table_occupancy": occ_path,
        "table_unsaturated": unsat_path,
        "ema_series": ema_path,
    }
