"""dtnsat: delay-tolerant network simulation on map-constrained mobility.

A deterministic discrete-event simulator for store-carry-forward message
spread among pedestrians walking a road map, plus analysis tools for the
resulting event logs (saturation curves, delivery times, buffer occupancy).
"""

from .analysis import (
    LogRecord,
    SaturationSeries,
    discover_runs,
    ema,
    max_avg_occupancy,
    parse_event_log,
    read_occupancy,
    saturation,
    summarize,
    time_to_full_saturation,
)
from .contacts import (
    ContactTracker,
    LinkParams,
    TransferJob,
    contact_diff,
    detect,
    progress_transfers,
)
from .engine import (
    ConfigError,
    RunResult,
    ScenarioConfig,
    Simulation,
    batch,
    load_config,
    parse_config_text,
    run,
)
from .mapgraph import (
    MapDataError,
    Polyline,
    Region,
    RoadGraph,
    WktParseError,
    build_graph,
    generate_grid,
    load_region,
    parse_wkt,
    restrict,
)
from .mobility import MobilityParams, MovementState, init_positions
from .routing import (
    Buffer,
    DirectDeliveryRouter,
    EpidemicRouter,
    FirstContactRouter,
    Message,
    WaveRouter,
    make_router,
    select_transfers,
)
from .seeds import derive_seed, node_streams, stream
from .traffic import CreationEvent, TrafficPattern, preset, schedule

__version__ = "0.1.0"

__all__ = [
    "Buffer",
    "ConfigError",
    "ContactTracker",
    "CreationEvent",
    "DirectDeliveryRouter",
    "EpidemicRouter",
    "FirstContactRouter",
    "LinkParams",
    "LogRecord",
    "MapDataError",
    "Message",
    "MobilityParams",
    "MovementState",
    "Polyline",
    "Region",
    "RoadGraph",
    "RunResult",
    "SaturationSeries",
    "ScenarioConfig",
    "Simulation",
    "TrafficPattern",
    "TransferJob",
    "WaveRouter",
    "WktParseError",
    "batch",
    "build_graph",
    "contact_diff",
    "derive_seed",
    "detect",
    "discover_runs",
    "ema",
    "generate_grid",
    "init_positions",
    "load_config",
    "load_region",
    "make_router",
    "max_avg_occupancy",
    "node_streams",
    "parse_config_text",
    "parse_event_log",
    "parse_wkt",
    "preset",
    "progress_transfers",
    "read_occupancy",
    "restrict",
    "run",
    "saturation",
    "schedule",
    "select_transfers",
    "stream",
    "summarize",
    "time_to_full_saturation",
]
