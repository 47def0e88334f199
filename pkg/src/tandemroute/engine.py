"""Evolutionary search over delivery genotypes.

The engine keeps a fixed-size population of customer permutations tagged
with delivery types. Each generation it sorts members best-first, copies
the elite share into a breeding pool, fills the rest by fitness-weighted
roulette, then produces a full replacement population with windowed
order crossover, per-gene swap mutation (plus tag flips when drones are
in play), and constraint repair. The best genotype ever seen is tracked
separately from the generational population, so the reported optimum
never regresses.

Fitness is the reciprocal of the makespan objective. All stochastic
choices come from one numpy Generator per run; draws happen in a fixed
documented order and are handed to compiled kernels as arrays, which
makes runs bit-reproducible for a given seed no matter how the work is
scheduled.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from . import _kernels
from .evaluate import DeliveryType, Gene, Genotype, even_segment_bounds
from .model import Instance, distance_matrix, fleet_size


class Mode(Enum):
    """Which vehicle model the search optimizes."""

    VRP = "vrp"
    VRPDI = "vrpdi"


_CONFIG_FIELDS = {
    "population_size": int,
    "elitism_rate": float,
    "mutation_rate": float,
    "generations": int,
    "seed": int,
    "pair_count": int,
}


@dataclass(frozen=True)
class EAConfig:
    """Search hyperparameters. Defaults match the tuned values used for
    the benchmark suite."""

    population_size: int = 150
    elitism_rate: float = 0.15
    mutation_rate: float = 0.30
    generations: int = 1000
    seed: int = 0
    pair_count: int | None = None

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not 0.0 < self.elitism_rate < 1.0:
            raise ValueError("elitism_rate must lie strictly between 0 and 1")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if self.generations < 0:
            raise ValueError("generations must be nonnegative")
        if self.elite_count < 2:
            raise ValueError(
                "elitism settings must keep at least 2 elites; "
                "raise population_size or elitism_rate"
            )
        if self.pair_count is not None and self.pair_count < 1:
            raise ValueError("pair_count must be positive when given")

    @property
    def elite_count(self) -> int:
        return math.ceil(self.elitism_rate * self.population_size)

    @classmethod
    def from_file(cls, path: str | Path) -> "EAConfig":
        """Load settings from a JSON object or ``key = value`` lines."""
        text = Path(path).read_text(encoding="utf-8")
        raw: dict[str, str]
        if text.lstrip().startswith("{"):
            loaded = json.loads(text)
            if not isinstance(loaded, dict):
                raise ValueError(f"{path}: expected a JSON object")
            raw = {str(k): v for k, v in loaded.items()}
        else:
            raw = {}
            for lineno, line in enumerate(text.splitlines(), start=1):
                stripped = line.split("#", 1)[0].strip()
                if not stripped:
                    continue
                if "=" not in stripped:
                    raise ValueError(f"{path}:{lineno}: expected key = value")
                key, _, value = stripped.partition("=")
                raw[key.strip()] = value.strip()
        kwargs = {}
        for key, value in raw.items():
            if key not in _CONFIG_FIELDS:
                raise ValueError(f"{path}: unknown setting {key!r}")
            kwargs[key] = _CONFIG_FIELDS[key](value)
        return cls(**kwargs)


@dataclass(frozen=True)
class Solution:
    """A decoded population member: the genotype plus its makespan."""

    genotype: Genotype
    objective: float

    @property
    def fitness(self) -> float:
        return 1.0 / self.objective


@dataclass(frozen=True)
class Population:
    members: tuple[Solution, ...]
    generation: int = 0


@dataclass(frozen=True)
class Diversity:
    """Population spread: share of distinct fitness values and their
    sample standard deviation."""

    unique_fraction: float
    fitness_stddev: float


@dataclass(frozen=True)
class RunReport:
    """Everything a run produced: the incumbent, its route totals, the
    per-generation progress and diversity series, and timing.

    Wall and CPU times are measurement artifacts, so ``to_json`` can drop
    them when comparing runs for reproducibility.
    """

    instance_name: str
    mode: str
    seed: int
    generations: int
    pair_count: int
    best: Solution
    truck_distance: float
    drone_distance: float
    best_series: tuple[float, ...]
    unique_fraction_series: tuple[float, ...]
    fitness_stddev_series: tuple[float, ...]
    wall_seconds: float
    cpu_seconds: float

    @property
    def objective(self) -> float:
        return self.best.objective

    def to_json(self, *, include_timing: bool = True) -> str:
        data = {
            "instance": self.instance_name,
            "mode": self.mode,
            "seed": self.seed,
            "generations": self.generations,
            "pair_count": self.pair_count,
            "objective": self.best.objective,
            "truck_distance": self.truck_distance,
            "drone_distance": self.drone_distance,
            "genes": [[g.node, g.delivery.value] for g in self.best.genotype.genes],
            "segment_bounds": list(self.best.genotype.segment_bounds),
            "best_series": list(self.best_series),
            "unique_fraction_series": list(self.unique_fraction_series),
            "fitness_stddev_series": list(self.fitness_stddev_series),
        }
        if include_timing:
            data["wall_seconds"] = self.wall_seconds
            data["cpu_seconds"] = self.cpu_seconds
        return json.dumps(data, indent=2)


def evaluate_population(population: Population) -> Population:
    """Return the population re-ranked best-first (stable on ties)."""
    ranked = tuple(sorted(population.members, key=lambda s: s.objective))
    return Population(members=ranked, generation=population.generation)


def select(population: Population, elite_count: int, rng: np.random.Generator) -> list[Solution]:
    """Breeding pool: the ``elite_count`` best members, then fitness-weighted
    roulette picks (with replacement) until the pool matches the population
    size. A draw R lands on the first member whose cumulative normalized
    fitness reaches R."""
    members = population.members
    if elite_count < 2:
        raise ValueError("elite_count must be at least 2")
    if elite_count > len(members):
        raise ValueError("elite_count cannot exceed the population size")
    ranked = sorted(members, key=lambda s: s.objective)
    fitness = np.array([s.fitness for s in ranked], dtype=np.float64)
    cumulative = np.cumsum(fitness)
    cumulative /= cumulative[-1]
    draws = rng.random(len(ranked) - elite_count)
    picks = np.searchsorted(cumulative, draws, side="left")
    return ranked[:elite_count] + [ranked[int(k)] for k in picks]


def _check_mates(parent_a: Genotype, parent_b: Genotype) -> None:
    if len(parent_a.genes) != len(parent_b.genes):
        raise ValueError("parents must have the same gene count")
    if parent_a.segment_bounds != parent_b.segment_bounds:
        raise ValueError("parents must share segment bounds")
    if {g.node for g in parent_a.genes} != {g.node for g in parent_b.genes}:
        raise ValueError("parents must cover the same customers")


def crossover(parent_a: Genotype, parent_b: Genotype, rng: np.random.Generator) -> Genotype:
    """Windowed order crossover. Two cut indices are drawn over [0, n);
    the child copies parent A's genes on [min, max) and fills the other
    positions with parent B's remaining genes in B's order, tags included."""
    _check_mates(parent_a, parent_b)
    n = len(parent_a.genes)
    values = sorted({g.node for g in parent_a.genes})
    local = {v: k for k, v in enumerate(values)}
    a_nodes = np.array([local[g.node] for g in parent_a.genes], dtype=np.int64)
    b_nodes = np.array([local[g.node] for g in parent_b.genes], dtype=np.int64)
    a_tags = np.array([g.delivery is DeliveryType.DRONE for g in parent_a.genes], dtype=np.uint8)
    b_tags = np.array([g.delivery is DeliveryType.DRONE for g in parent_b.genes], dtype=np.uint8)
    cuts = rng.integers(0, n, size=2)
    lo, hi = (int(cuts[0]), int(cuts[1])) if cuts[0] <= cuts[1] else (int(cuts[1]), int(cuts[0]))
    child_nodes = np.empty(n, dtype=np.int64)
    child_tags = np.empty(n, dtype=np.uint8)
    _kernels._pmx_fill(child_nodes, child_tags, a_nodes, a_tags, b_nodes, b_tags,
                       lo, hi, np.zeros(n, dtype=np.uint8))
    genes = tuple(
        Gene(values[child_nodes[i]], DeliveryType.DRONE if child_tags[i] else DeliveryType.TRUCK)
        for i in range(n)
    )
    return Genotype(genes=genes, segment_bounds=parent_a.segment_bounds)


def mutate(genotype: Genotype, rate: float, rng: np.random.Generator,
           *, flip_tags: bool = True) -> Genotype:
    """Per-gene mutation. Each position swaps with a uniformly chosen other
    position with probability ``rate``; when ``flip_tags`` is set, each
    gene's delivery type then flips independently with the same probability.
    Draw order: swap coins, swap targets, then (only if flipping) flip coins."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must lie in [0, 1]")
    n = len(genotype.genes)
    nodes = np.array([g.node for g in genotype.genes], dtype=np.int64)
    tags = np.array([g.delivery is DeliveryType.DRONE for g in genotype.genes], dtype=np.uint8)
    swap_u = rng.random(n)
    target_u = rng.random(n)
    flip_u = rng.random(n) if flip_tags else swap_u
    _kernels._mutate_inplace(nodes, tags, swap_u, target_u, flip_u, rate, flip_tags)
    genes = tuple(
        Gene(int(nodes[i]), DeliveryType.DRONE if tags[i] else DeliveryType.TRUCK)
        for i in range(n)
    )
    return Genotype(genes=genes, segment_bounds=genotype.segment_bounds)


def repair(genotype: Genotype, instance: Instance | None = None) -> Genotype:
    """Make a genotype feasible in-place semantics: the second of two
    consecutive drone genes in a segment becomes a truck delivery, and when
    the instance carries a drone range cap, drones whose launch or return
    leg would exceed it are grounded too. Scans left to right, so later
    checks see earlier fixes. Idempotent."""
    nodes_raw = [g.node for g in genotype.genes]
    tags = np.array([g.delivery is DeliveryType.DRONE for g in genotype.genes], dtype=np.uint8)
    bounds = np.array(genotype.segment_bounds, dtype=np.int64)
    if instance is not None and instance.max_drone_distance is not None:
        row_of_id = {node.id: r for r, node in enumerate(instance.nodes)}
        try:
            nodes = np.array([row_of_id[v] for v in nodes_raw], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"genotype visits unknown node {exc.args[0]}") from None
        dist = distance_matrix(instance)
        max_dd = instance.max_drone_distance
    else:
        nodes = np.array(nodes_raw, dtype=np.int64)
        dist = np.zeros((1, 1), dtype=np.float64)
        max_dd = 0.0
    _kernels._repair_inplace(nodes, tags, bounds, dist, max_dd)
    genes = tuple(
        Gene(nodes_raw[i], DeliveryType.DRONE if tags[i] else DeliveryType.TRUCK)
        for i in range(len(nodes_raw))
    )
    return Genotype(genes=genes, segment_bounds=genotype.segment_bounds)


def diversity(population: Population) -> Diversity:
    """Count of distinct fitness values over the population size, and the
    sample standard deviation of the fitness values (0 for a single member)."""
    fits = np.array([m.fitness for m in population.members], dtype=np.float64)
    if fits.size == 0:
        raise ValueError("population is empty")
    unique_fraction = np.unique(fits).size / fits.size
    stddev = float(np.std(fits, ddof=1)) if fits.size > 1 else 0.0
    return Diversity(unique_fraction=unique_fraction, fitness_stddev=stddev)


_WARMED = False


def _warm_kernels() -> None:
    """Trigger JIT compilation on a toy problem so timed runs measure the
    search, not the compiler."""
    global _WARMED
    if _WARMED:
        return
    bounds = np.array([2], dtype=np.int64)
    dist = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
    xs = np.array([0.0, 1.0, 2.0])
    ys = np.zeros(3)
    nodes = np.array([[1, 2], [2, 1]], dtype=np.int64)
    tags = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    out = np.empty((2, 3), dtype=np.float64)
    _kernels.repair_members(nodes, tags, bounds, dist, 5.0)
    _kernels.evaluate_members(nodes, tags, bounds, dist, xs, ys,
                              1.0, 2.0, 0.0, 0.0, 5.0, out)
    pool_nodes = nodes.copy()
    pool_tags = tags.copy()
    idx = np.array([0, 1], dtype=np.int64)
    retry = np.zeros((2, 8), dtype=np.int64)
    cuts = np.array([[0, 1], [1, 2]], dtype=np.int64)
    u = np.full((2, 2), 0.5)
    _kernels.breed_generation(pool_nodes, pool_tags, idx, idx[::-1].copy(), retry,
                              cuts, u, u, u, 0.3, True, bounds, dist, xs, ys,
                              1.0, 2.0, 0.0, 0.0, 5.0,
                              nodes.copy(), tags.copy(), out)
    _WARMED = True


def _resolve_pairs(instance: Instance, config: EAConfig) -> int:
    pairs = config.pair_count if config.pair_count is not None else fleet_size(instance)
    n = len(instance.customers)
    if pairs > n:
        raise ValueError(f"cannot split {n} customers across {pairs} vehicle pairs")
    return pairs


def run(instance: Instance, config: EAConfig | None = None,
        mode: Mode | str = Mode.VRPDI) -> RunReport:
    """Run the full search on one instance and return the report.

    The population lives in flat arrays (rows of node indices plus delivery
    tags) and whole generations are bred by one compiled call. Customers are
    split across vehicle pairs in contiguous, as-even-as-possible segments.
    """
    if config is None:
        config = EAConfig()
    mode = Mode(mode)
    n = len(instance.customers)
    pairs = _resolve_pairs(instance, config)
    bounds_t = even_segment_bounds(n, pairs)
    bounds = np.array(bounds_t, dtype=np.int64)

    demands = [c.demand for c in instance.customers]
    start = 0
    for end in bounds_t:
        if sum(demands[start:end]) > instance.capacity:
            raise ValueError(
                "even customer split exceeds vehicle capacity; increase pair_count"
            )
        start = end

    dist = distance_matrix(instance)
    coords = instance.coordinates()
    xs = np.ascontiguousarray(coords[:, 0])
    ys = np.ascontiguousarray(coords[:, 1])
    id_of_row = [node.id for node in instance.nodes]
    v_t, v_d = instance.truck_speed, instance.drone_speed
    omega, sigma = instance.truck_delivery_time, instance.drone_delivery_time
    max_dd = instance.max_drone_distance if instance.max_drone_distance is not None else 0.0
    allow_flip = mode is Mode.VRPDI

    _warm_kernels()
    wall0 = time.perf_counter()
    cpu0 = time.process_time()

    rng = np.random.default_rng(config.seed)
    pop_size = config.population_size
    elite = config.elite_count
    gamma = config.mutation_rate

    # Initial population: random permutations, random tags in drone mode.
    perm_keys = rng.random((pop_size, n))
    pop_nodes = np.argsort(perm_keys, axis=1).astype(np.int64) + 1
    if allow_flip:
        pop_tags = (rng.random((pop_size, n)) < 0.5).astype(np.uint8)
    else:
        pop_tags = np.zeros((pop_size, n), dtype=np.uint8)
    _kernels.repair_members(pop_nodes, pop_tags, bounds, dist, max_dd)
    scores = np.empty((pop_size, 3), dtype=np.float64)
    _kernels.evaluate_members(pop_nodes, pop_tags, bounds, dist, xs, ys,
                              v_t, v_d, omega, sigma, max_dd, scores)
    order = np.argsort(scores[:, 0], kind="stable")
    pop_nodes, pop_tags, scores = pop_nodes[order], pop_tags[order], scores[order]

    inc_nodes = pop_nodes[0].copy()
    inc_tags = pop_tags[0].copy()
    inc_score = scores[0].copy()

    best_series = [float(inc_score[0])]
    unique_series = []
    stddev_series = []

    def record_diversity() -> None:
        fits = 1.0 / scores[:, 0]
        unique_series.append(np.unique(fits).size / pop_size)
        stddev_series.append(float(np.std(fits, ddof=1)))

    record_diversity()

    for _ in range(config.generations):
        fitness = 1.0 / scores[:, 0]
        cumulative = np.cumsum(fitness)
        cumulative /= cumulative[-1]
        roulette = np.searchsorted(cumulative, rng.random(pop_size - elite), side="left")
        pool_idx = np.concatenate([np.arange(elite), roulette])
        pool_nodes = np.ascontiguousarray(pop_nodes[pool_idx])
        pool_tags = np.ascontiguousarray(pop_tags[pool_idx])

        a_idx = rng.integers(0, pop_size, size=pop_size)
        b_idx = rng.integers(0, pop_size, size=pop_size)
        b_retry = rng.integers(0, pop_size, size=(pop_size, 8))
        cuts = rng.integers(0, n, size=(pop_size, 2))
        swap_u = rng.random((pop_size, n))
        target_u = rng.random((pop_size, n))
        flip_u = rng.random((pop_size, n)) if allow_flip else swap_u

        child_nodes = np.empty_like(pop_nodes)
        child_tags = np.empty_like(pop_tags)
        child_scores = np.empty_like(scores)
        _kernels.breed_generation(pool_nodes, pool_tags, a_idx, b_idx, b_retry,
                                  cuts, swap_u, target_u, flip_u, gamma, allow_flip,
                                  bounds, dist, xs, ys, v_t, v_d, omega, sigma,
                                  max_dd, child_nodes, child_tags, child_scores)
        order = np.argsort(child_scores[:, 0], kind="stable")
        pop_nodes, pop_tags, scores = child_nodes[order], child_tags[order], child_scores[order]

        if scores[0, 0] < inc_score[0]:
            inc_nodes = pop_nodes[0].copy()
            inc_tags = pop_tags[0].copy()
            inc_score = scores[0].copy()
        best_series.append(float(inc_score[0]))
        record_diversity()

    wall = time.perf_counter() - wall0
    cpu = time.process_time() - cpu0

    genes = tuple(
        Gene(id_of_row[inc_nodes[i]],
             DeliveryType.DRONE if inc_tags[i] else DeliveryType.TRUCK)
        for i in range(n)
    )
    best = Solution(genotype=Genotype(genes=genes, segment_bounds=bounds_t),
                    objective=float(inc_score[0]))
    return RunReport(
        instance_name=instance.name,
        mode=mode.value,
        seed=config.seed,
        generations=config.generations,
        pair_count=pairs,
        best=best,
        truck_distance=float(inc_score[1]),
        drone_distance=float(inc_score[2]),
        best_series=tuple(best_series),
        unique_fraction_series=tuple(unique_series),
        fitness_stddev_series=tuple(stddev_series),
        wall_seconds=wall,
        cpu_seconds=cpu,
    )


def spawn_seeds(seed: int, count: int) -> list[int]:
    """Per-run seeds derived from one base seed, stable across batch shapes."""
    if count < 1:
        raise ValueError("count must be positive")
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def run_many(instance: Instance, config: EAConfig, mode: Mode | str,
             runs: int) -> list[RunReport]:
    """Independent repeats with per-run seeds derived from the base seed."""
    return [
        run(instance, replace(config, seed=s), mode)
        for s in spawn_seeds(config.seed, runs)
    ]
