import csv
import os

import pytest

from dtnsat import analysis, engine
from dtnsat.analysis import (
    LogFormatError,
    LogRecord,
    discover_runs,
    ema,
    max_avg_occupancy,
    parse_event_log,
    read_occupancy,
    saturation,
    summarize,
    time_to_full_saturation,
)


def rec(time, kind, mid="M1", frm="n0", to="-"):
    return LogRecord(time, kind, mid, frm, to)


# ---------------------------------------------------------------- parsing

def test_parse_event_log_round_trip(tmp_path):
    path = tmp_path / "events.log"
    path.write_text("0.0000 CREATE M1 n0 -\n"
                    "1.5000 SEND_START M1 n0 n1\n"
                    "1.5000 RECEIVED M1 n0 n1\n")
    records = parse_event_log(path)
    assert len(records) == 3
    assert records[0] == LogRecord(0.0, "CREATE", "M1", "n0", "-")
    assert records[2].to == "n1"


def test_parse_event_log_rejects_bad_lines(tmp_path):
    cases = [
        "0.0000 CREATE M1 n0\n",                 # 4 fields
        "0.0000 TELEPORT M1 n0 -\n",             # unknown kind
        "abc CREATE M1 n0 -\n",                  # bad time
        "5.0000 CREATE M1 n0 -\n1.0000 CREATE M2 n0 -\n",  # time reversal
    ]
    for i, text in enumerate(cases):
        path = tmp_path / f"bad{i}.log"
        path.write_text(text)
        with pytest.raises(LogFormatError):
            parse_event_log(path)


# ---------------------------------------------------------------- saturation

def test_saturation_counts_creator_and_caps_at_full():
    records = [
        rec(0.0, "CREATE", "M1", "n0"),
        rec(1.0, "RECEIVED", "M1", "n0", "n1"),
        rec(2.0, "DROP_BUFFER", "M1", "n1"),
        rec(3.0, "RECEIVED", "M1", "n0", "n1"),   # redelivery after the drop
        rec(4.0, "RECEIVED", "M1", "n1", "n2"),
        rec(5.0, "RECEIVED", "M1", "n0", "n2"),   # second redelivery
    ]
    series = saturation(records, 3)["M1"]
    assert series.creator == "n0"
    assert series.points[0] == (0.0, pytest.approx(100.0 / 3))
    assert series.unique_receivers == 3
    assert series.redeliveries == 2
    assert series.final_pct == 100.0
    assert max(p for _, p in series.points) == 100.0
    assert time_to_full_saturation(series) == pytest.approx(4.0)


def test_saturation_unsaturated_message():
    records = [
        rec(10.0, "CREATE", "M2", "n4"),
        rec(12.0, "RECEIVED", "M2", "n4", "n5"),
    ]
    series = saturation(records, 10)["M2"]
    assert series.final_pct == pytest.approx(20.0)
    assert not series.reached_full
    assert time_to_full_saturation(series) is None


def test_saturation_single_node_network():
    series = saturation([rec(7.0, "CREATE", "M1", "n0")], 1)["M1"]
    assert series.final_pct == 100.0
    assert time_to_full_saturation(series) == 0.0


def test_saturation_multiple_messages_keyed_by_id():
    records = [
        rec(0.0, "CREATE", "M1", "n0"),
        rec(0.0, "CREATE", "M2", "n1"),
        rec(1.0, "RECEIVED", "M2", "n1", "n0"),
    ]
    series = saturation(records, 2)
    assert list(series) == ["M1", "M2"]
    assert series["M1"].unique_receivers == 1
    assert series["M2"].unique_receivers == 2


def test_saturation_rejects_inconsistent_logs():
    with pytest.raises(LogFormatError):
        saturation([rec(1.0, "RECEIVED", "M9", "n0", "n1")], 5)
    with pytest.raises(LogFormatError):
        saturation([rec(0.0, "CREATE", "M1", "n0"),
                    rec(1.0, "CREATE", "M1", "n1")], 5)
    with pytest.raises(ValueError):
        saturation([], 0)


# ---------------------------------------------------------------- smoothing

def test_ema_basic_and_identity():
    assert ema([100.0, 200.0], alpha=0.1) == [100.0, pytest.approx(110.0)]
    assert ema([5.0, 7.0, 9.0], alpha=1.0) == [5.0, 7.0, 9.0]
    assert ema([], alpha=0.5) == []
    values = [3.0, 1.0, 4.0, 1.0, 5.0]
    out = ema(values, alpha=0.25)
    expected = values[0]
    for x, got in zip(values, out):
        expected = expected + 0.25 * (x - expected)
        if got is out[0]:
            assert got == values[0]
    assert out[1] == pytest.approx(0.75 * 3.0 + 0.25 * 1.0)


def test_ema_rejects_bad_alpha():
    for alpha in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            ema([1.0], alpha=alpha)


# ---------------------------------------------------------------- occupancy

def test_occupancy_read_and_peak(tmp_path):
    path = tmp_path / "occupancy.csv"
    path.write_text("time,mean_occupancy_pct\n"
                    "0.0000,0.000000\n"
                    "10.0000,0.412800\n"
                    "20.0000,0.206400\n")
    rows = read_occupancy(path)
    assert rows == [(0.0, 0.0), (10.0, 0.4128), (20.0, 0.2064)]
    assert max_avg_occupancy(rows) == pytest.approx(0.4128)
    assert max_avg_occupancy(path) == pytest.approx(0.4128)


def test_max_avg_occupancy_rejects_empty():
    with pytest.raises(ValueError):
        max_avg_occupancy([])


# ---------------------------------------------------------------- summaries

TINY = """
map.grid.rows = 1
map.grid.cols = 2
map.grid.spacing = 2
group1.count = 1
group2.count = 2
end_time = 20
traffic = periodic
traffic.interval_min = 5
traffic.interval_max = 5
traffic.window = 12
seed = 5
"""


@pytest.fixture(scope="module")
def batch_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("batch")
    cfg = root / "sweep.cfg"
    cfg.write_text(TINY + "group2.count = [1; 2]\n")
    engine.batch(str(cfg), str(root / "out"))
    return root / "out"


def test_discover_runs_from_batch_root(batch_dir):
    runs = discover_runs(batch_dir)
    assert [r.name for r in runs] == ["run_000", "run_001"]
    assert runs[0].total_nodes == 2
    assert runs[1].total_nodes == 3
    assert runs[0].params["router"] == "epidemic"
    assert os.path.exists(runs[0].events_path)


def test_discover_runs_single_directory(batch_dir):
    runs = discover_runs(os.path.join(batch_dir, "run_001"))
    assert len(runs) == 1
    assert runs[0].name == "run_001"
    assert runs[0].total_nodes == 3


def test_discover_runs_nodes_override(batch_dir):
    runs = discover_runs(batch_dir, total_nodes=50)
    assert all(r.total_nodes == 50 for r in runs)


def test_discover_runs_missing_inputs(tmp_path):
    with pytest.raises(FileNotFoundError):
        discover_runs(tmp_path / "nothing")


def test_discover_runs_skips_failed_rows(tmp_path):
    (tmp_path / "index.csv").write_text(
        "run,dir,seed,status,error\n"
        "run_000,run_000,1,error,ValueError: boom\n")
    assert discover_runs(tmp_path) == []


def test_summarize_tables(batch_dir, tmp_path):
    runs = discover_runs(batch_dir)
    out = tmp_path / "tables"
    paths = summarize(runs, out, alpha=0.1)
    assert set(paths) == {"table_saturation_times", "table_occupancy",
                          "table_unsaturated", "ema_series"}

    with open(paths["table_saturation_times"], newline="") as fh:
        sat_rows = list(csv.DictReader(fh))
    assert {r["run"] for r in sat_rows} == {"run_000", "run_001"}
    # 3 creations in a 12 s window at 5 s gaps (0, 5, 10), per run
    assert len(sat_rows) == 6
    for row in sat_rows:
        assert row["message_id"].startswith("M")
        pct = float(row["final_saturation_pct"])
        assert 0.0 < pct <= 100.0
        if row["time_to_saturation"]:
            assert float(row["time_to_saturation"]) >= 0.0

    with open(paths["table_occupancy"], newline="") as fh:
        occ_rows = list(csv.DictReader(fh))
    assert len(occ_rows) == 2
    for row in occ_rows:
        assert 0.0 <= float(row["max_avg_occupancy_pct"]) <= 100.0

    with open(paths["table_unsaturated"], newline="") as fh:
        unsat_rows = list(csv.DictReader(fh))
    for row in unsat_rows:
        assert int(row["messages_created"]) == 3
        assert 0 <= int(row["unsaturated_count"]) <= 3

    with open(paths["ema_series"], newline="") as fh:
        ema_rows = list(csv.DictReader(fh))
    for row in ema_rows:
        assert float(row["ema"]) >= 0.0
    # smoothed values recompute from the raw ones per run
    for name in ("run_000", "run_001"):
        mine = [r for r in ema_rows if r["run"] == name]
        raw = [float(r["time_to_saturation"]) for r in mine]
        smoothed = ema(raw, alpha=0.1)
        for row, want in zip(mine, smoothed):
            assert float(row["ema"]) == pytest.approx(want, abs=1e-3)

    series_files = os.listdir(out / "run_000")
    assert series_files and all(f.startswith("series_M") for f in series_files)
    with open(out / "run_000" / sorted(series_files)[0], newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["time", "saturation_pct"]
    pcts = [float(r[1]) for r in rows[1:]]
    assert pcts == sorted(pcts)
