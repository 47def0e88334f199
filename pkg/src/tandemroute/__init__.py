"""Truck and drone tandem routing with en-route interception."""

from tandemroute.datasets import (
    REGISTRY,
    DatasetRecord,
    build_instance,
    dataset_names,
    get_record,
    load_dataset,
    write_dataset_files,
)
from tandemroute.engine import (
    Diversity,
    EAConfig,
    Mode,
    Population,
    RunReport,
    Solution,
    crossover,
    diversity,
    evaluate_population,
    mutate,
    repair,
    run,
    run_many,
    select,
    spawn_seeds,
)
from tandemroute.evaluate import (
    DeliveryType,
    Gene,
    Genotype,
    InfeasibleGenotypeError,
    Leg,
    PairSchedule,
    Schedule,
    Violation,
    check_feasibility,
    decode,
    even_segment_bounds,
    improvement,
    objective,
)
from tandemroute.exhaustive import (
    SearchSpaceError,
    enumerate_objectives,
    enumerate_optimum,
    search_space_size,
)
from tandemroute.geometry import (
    Point,
    Rendezvous,
    RendezvousKind,
    TruckState,
    interception_point,
    interception_time,
    resolve_rendezvous,
)
from tandemroute.model import (
    Instance,
    Node,
    ParseError,
    distance_matrix,
    euclidean_distance,
    fleet_size,
    parse_instance,
)
from tandemroute.stats import (
    ComparisonResult,
    RunSummary,
    TallyRow,
    Verdict,
    mann_whitney_u,
    render_tally_csv,
    render_tally_text,
    summarize_runs,
    tally,
)
from tandemroute.svgplot import render_svg

__all__ = [
    "REGISTRY",
    "ComparisonResult",
    "DatasetRecord",
    "DeliveryType",
    "Diversity",
    "EAConfig",
    "Gene",
    "Genotype",
    "InfeasibleGenotypeError",
    "Instance",
    "Leg",
    "Mode",
    "Node",
    "PairSchedule",
    "ParseError",
    "Point",
    "Population",
    "Rendezvous",
    "RendezvousKind",
    "RunReport",
    "RunSummary",
    "Schedule",
    "SearchSpaceError",
    "Solution",
    "TallyRow",
    "TruckState",
    "Verdict",
    "Violation",
    "build_instance",
    "check_feasibility",
    "crossover",
    "dataset_names",
    "decode",
    "distance_matrix",
    "diversity",
    "enumerate_objectives",
    "enumerate_optimum",
    "euclidean_distance",
    "evaluate_population",
    "even_segment_bounds",
    "fleet_size",
    "get_record",
    "improvement",
    "interception_point",
    "interception_time",
    "load_dataset",
    "mann_whitney_u",
    "mutate",
    "objective",
    "parse_instance",
    "render_svg",
    "render_tally_csv",
    "render_tally_text",
    "repair",
    "resolve_rendezvous",
    "run",
    "run_many",
    "search_space_size",
    "select",
    "spawn_seeds",
    "summarize_runs",
    "tally",
    "write_dataset_files",
]

__version__ = "0.1.0"
