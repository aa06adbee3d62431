#!/usr/bin/env python3
"""Flooding vs damped flooding under buffer pressure.

Same map, same seed, same heavy traffic; only the router changes. The
output shows where the strategies part ways once 500 kB buffers overflow:
the flooding router keeps re-delivering evicted messages while the damped
router refuses anything a node has already accepted.
"""
import sys
import tempfile
from collections import Counter

from dtnsat import analysis, engine

CFG = """
map.grid.rows = 12
map.grid.cols = 12
map.grid.spacing = 60
group1.count = 5
group2.count = 45
router = {router}
traffic = high
buffer = 500000
end_time = 4500
seed = 3
# custody shorter than ttl, so the damped router sheds payloads it delivered
wave.custody_fraction = 0.2
"""


def run(router: str):
    configs, _ = engine.parse_config_text(CFG.format(router=router))
    out_dir = tempfile.mkdtemp(prefix=f"demo-compare-{router}-")
    return engine.run(configs[0], out_dir)


def main() -> int:
    print("running both routers (a minute or two) ...")
    rows = []
    for router in ("epidemic", "wave"):
        result = run(router)
        records = analysis.parse_event_log(result.events_path)
        pair_counts = Counter((r.to, r.message_id) for r in records
                              if r.kind == "RECEIVED")
        redelivered = sum(1 for n in pair_counts.values() if n >= 2)
        rows.append((router, result.counts, redelivered))

    print(f"\n{'':14s}{'received':>10s}{'evicted':>10s}{'custody':>10s}"
          f"{'re-recv pairs':>15s}")
    for router, counts, redelivered in rows:
        print(f"{router:14s}{counts['RECEIVED']:>10d}"
              f"{counts['DROP_BUFFER']:>10d}"
              f"{counts['DROP_CUSTODY']:>10d}"
              f"{redelivered:>15d}")

    print("\nthe flooding router's receive count dwarfs the message "
          "population because\nevicted copies keep coming back; the damped "
          "router accepts each message at\nmost once per node, so its "
          "re-receive pair count stays at zero.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
