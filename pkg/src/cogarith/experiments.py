"""The three experiments: problem size, ablation, and Fast Addition sweep.

Every run writes its CSV output plus a JSON manifest holding every
effective parameter, so a run can be regenerated from its manifest.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__
from .activation import (
    DEFAULT_LEARNING_FACTOR,
    DEFAULT_RT_MAX_MS,
    DEFAULT_RT_MIN_MS,
    DEFAULT_TRIALS,
    PRNG_NAME,
    SIZE,
    ActivationMatrix,
    LearningConfig,
    RTMatrix,
    activation_to_rt,
    heatmap_csv,
    rescale_rt,
    simulate_learning,
)
from .errors import IoFailure
from .facts import FactLibrary, ablate, build_default, default_ablation_mask
from .parser import Operator, Problem
from .solver import (
    CostParams,
    StrategyPolicy,
    direct_plan,
    fast_addition_plan,
    solve,
)

log = logging.getLogger(__name__)

# learning runs per operator; division facts reuse the multiplication matrix
SEED_OFFSETS = {Operator.MUL: 0, Operator.ADD: 1, Operator.SUB: 2}


@dataclass(frozen=True)
class SweepSpec:
    n_start: int = 19950
    n_end: int = 20000
    addend: int = 679

    def __post_init__(self):
        if self.n_start > self.n_end:
            raise ValueError("n_start must not exceed n_end")


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    learning_factor: float = DEFAULT_LEARNING_FACTOR
    rt_min_ms: float = DEFAULT_RT_MIN_MS
    rt_max_ms: float = DEFAULT_RT_MAX_MS
    costs: CostParams = field(default_factory=CostParams)
    policy: StrategyPolicy = field(default_factory=StrategyPolicy)
    output_dir: Path = Path("out")

    def learning(self, op: Operator = Operator.MUL) -> LearningConfig:
        return LearningConfig(self.trials, self.learning_factor,
                              self.seed + SEED_OFFSETS[op])


class LearnedOperator(NamedTuple):
    activation: ActivationMatrix
    normalized: RTMatrix
    ms: RTMatrix


def learn(config: ExperimentConfig) -> dict[Operator, LearnedOperator]:
    out = {}
    for op in SEED_OFFSETS:
        act = simulate_learning(config.learning(op), op)
        norm = activation_to_rt(act)
        if norm.degenerate:
            log.warning("%s activation is degenerate; all RTs equal", op.slug)
        out[op] = LearnedOperator(act, norm, rescale_rt(norm, config.rt_min_ms, config.rt_max_ms))
    return out


def build_library(config: ExperimentConfig, learned=None) -> FactLibrary:
    learned = learned or learn(config)
    return build_default({op: lo.ms for op, lo in learned.items()})


# -- manifest / output helpers ---------------------------------------------

def manifest(config: ExperimentConfig, experiment: str, **extra) -> dict:
    return {
        "experiment": experiment,
        "package_version": __version__,
        "prng": PRNG_NAME,
        "seed": config.seed,
        "seed_offsets": {op.slug: k for op, k in SEED_OFFSETS.items()},
        "trials": config.trials,
        "learning_factor": config.learning_factor,
        "rt_min_ms": config.rt_min_ms,
        "rt_max_ms": config.rt_max_ms,
        "costs": dataclasses.asdict(config.costs),
        "policy": dataclasses.asdict(config.policy),
        **extra,
    }


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def write_manifest(config: ExperimentConfig, experiment: str, outputs, **extra) -> Path:
    data = manifest(config, experiment, outputs=[Path(p).name for p in outputs], **extra)
    path = Path(config.output_dir) / f"{experiment}.manifest.json"
    return _write(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def tie_advantage(rt: np.ndarray) -> float:
    """Mean RT of the diagonal's 4-neighbours minus mean diagonal RT.

    Positive values mean tie problems are faster than their neighbours.
    """
    rt = np.asarray(rt)
    diag, around = [], []
    for i in range(SIZE):
        diag.append(rt[i, i])
        for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            a, b = i + di, i + dj
            if 0 <= a < SIZE and 0 <= b < SIZE:
                around.append(rt[a, b])
    return float(np.mean(around) - np.mean(diag))


# -- experiments -------------------------------------------------------------

def problem_size_grid(config: ExperimentConfig) -> np.ndarray:
    act = simulate_learning(config.learning(Operator.MUL), Operator.MUL)
    return activation_to_rt(act).cells


def run_problem_size(config: ExperimentConfig) -> Path:
    grid = problem_size_grid(config)
    path = _write(Path(config.output_dir) / "problem_size.csv", heatmap_csv(grid))
    write_manifest(config, "problem_size", [path], operator="mul",
                   tie_advantage=round(tie_advantage(grid), 6))
    return path


def ablation_grids(config: ExperimentConfig,
                   library: FactLibrary | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Single-digit addition RTs (ms) with the full and the ablated library."""
    full = library or build_library(config)
    cut = ablate(full, default_ablation_mask(Operator.ADD))
    grids = []
    for lib in (full, cut):
        g = np.empty((SIZE, SIZE))
        for a in range(SIZE):
            for b in range(SIZE):
                g[a, b] = solve(Problem(a, Operator.ADD, b), lib,
                                config.policy, config.costs).total_rt_ms
        grids.append(g)
    return grids[0], grids[1]


def run_ablation(config: ExperimentConfig) -> tuple[Path, Path]:
    without, with_ = ablation_grids(config)
    out = Path(config.output_dir)
    p1 = _write(out / "ablation_without.csv", heatmap_csv(without))
    p2 = _write(out / "ablation_with.csv", heatmap_csv(with_))
    write_manifest(config, "ablation", [p1, p2], ablation_mask="add: a in 5..9 and b in 5..9")
    return p1, p2


class CurvePoint(NamedTuple):
    n: int
    rt_direct_ms: float
    rt_fast_addition_ms: float
    rt_selected_ms: float
    selected_plan: str


def strategy_curve(config: ExperimentConfig, sweep: SweepSpec = SweepSpec(),
                   library: FactLibrary | None = None) -> list[CurvePoint]:
    """RT of ``n + addend`` with Fast Addition off, forced on, and selected.

    Where no rewrite exists at all (the operand is already round), the
    forced column repeats the direct RT.
    """
    lib = library or build_library(config)
    points = []
    for n in range(sweep.n_start, sweep.n_end + 1):
        p = Problem(n, Operator.ADD, sweep.addend)
        direct = direct_plan(p, lib, config.costs)
        forced = fast_addition_plan(p, lib, config.costs, threshold=None) or direct
        chosen = solve(p, lib, config.policy, config.costs)
        points.append(CurvePoint(n, direct.total_rt_ms, forced.total_rt_ms,
                                 chosen.total_rt_ms, chosen.plan))
    return points


def curve_csv(points) -> str:
    lines = ["n,rt_direct_ms,rt_fast_addition_ms,rt_selected_ms"]
    lines += [f"{p.n},{p.rt_direct_ms:.6f},{p.rt_fast_addition_ms:.6f},{p.rt_selected_ms:.6f}"
              for p in points]
    return "\n".join(lines) + "\n"


def run_strategy(config: ExperimentConfig, sweep: SweepSpec = SweepSpec()) -> Path:
    points = strategy_curve(config, sweep)
    path = _write(Path(config.output_dir) / "strategy.csv", curve_csv(points))
    write_manifest(config, "strategy", [path], sweep=dataclasses.asdict(sweep))
    return path
