"""Multiplication-table learning simulation and activation-to-RT mapping.

Each learning trial picks a table (row) and how far into it the learner
gets.  Cells ``(row, 0..extent)`` gain one unit of activation and the
transposed cells ``(0..extent, row)`` gain ``learning_factor`` units.
Retrieval time is modelled as the reciprocal of the accumulated activation.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import BadRange, IoFailure
from .parser import Operator

SIZE = 10
DEFAULT_TRIALS = 10_000
DEFAULT_LEARNING_FACTOR = 0.5
DEFAULT_RT_MIN_MS = 700.0
DEFAULT_RT_MAX_MS = 1400.0

PRNG_NAME = "PCG64"


class TrialDraw(NamedTuple):
    table_index: int
    table_extent: int


@dataclass(frozen=True)
class LearningConfig:
    trials: int = DEFAULT_TRIALS
    learning_factor: float = DEFAULT_LEARNING_FACTOR
    seed: int = 0

    def __post_init__(self):
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        if not 0.0 <= self.learning_factor <= 1.0:
            raise ValueError("learning_factor must lie in [0, 1]")


@dataclass
class ActivationMatrix:
    cells: np.ndarray
    config: LearningConfig = field(default_factory=LearningConfig)
    operator: Operator = Operator.MUL

    @classmethod
    def zeros(cls, config=None, operator=Operator.MUL):
        return cls(np.zeros((SIZE, SIZE)), config or LearningConfig(), operator)

    def total(self) -> float:
        return float(self.cells.sum())


@dataclass
class RTMatrix:
    """10x10 retrieval times, either normalized to [0, 1] or in ms."""

    cells: np.ndarray
    scale: str = "normalized"  # or "ms"
    degenerate: bool = False

    def __getitem__(self, ij):
        return float(self.cells[ij])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def draw_trial(rng: np.random.Generator) -> TrialDraw:
    index, extent = rng.integers(0, SIZE, size=2)
    return TrialDraw(int(index), int(extent))


def apply_trial(matrix: ActivationMatrix, trial: TrialDraw,
                learning_factor: float) -> ActivationMatrix:
    """Return a new matrix with one learning trial applied.

    The diagonal cell ``(i, i)`` is both a primary and a conjugate cell
    when ``extent >= i`` and receives both increments.
    """
    out = ActivationMatrix(matrix.cells.copy(), matrix.config, matrix.operator)
    _apply_inplace(out.cells, trial.table_index, trial.table_extent,
                   learning_factor)
    return out


def _apply_inplace(cells, index, extent, learning_factor):
    cells[index, : extent + 1] += 1.0
    cells[: extent + 1, index] += learning_factor


def simulate_learning(config: LearningConfig,
                      operator: Operator = Operator.MUL) -> ActivationMatrix:
    rng = make_rng(config.seed)
    cells = np.zeros((SIZE, SIZE))
    for _ in range(config.trials):
        index, extent = draw_trial(rng)
        _apply_inplace(cells, index, extent, config.learning_factor)
    return ActivationMatrix(cells, config, operator)


def expected_activation(i: int, j: int, learning_factor: float) -> float:
    """Expected per-trial activation gain of cell ``(i, j)``."""
    return ((SIZE - j) + learning_factor * (SIZE - i)) / 100.0


def activation_variance(i: int, j: int, learning_factor: float) -> float:
    """Per-trial variance of the activation gain of cell ``(i, j)``.

    The gain is ``1*B1 + lf*B2`` with ``P(B1) = (10-j)/100`` and
    ``P(B2) = (10-i)/100``.  Off the diagonal the two events are mutually
    exclusive; on it they are the same event.
    """
    p1, p2 = (SIZE - j) / 100.0, (SIZE - i) / 100.0
    if i == j:
        return (1 + learning_factor) ** 2 * p1 * (1 - p1)
    mean = p1 + learning_factor * p2
    return p1 + learning_factor**2 * p2 - mean**2


def expected_matrix(learning_factor: float, trials: int = 1) -> np.ndarray:
    i, j = np.indices((SIZE, SIZE))
    return trials * ((SIZE - j) + learning_factor * (SIZE - i)) / 100.0


def activation_to_rt(matrix: ActivationMatrix | np.ndarray) -> RTMatrix:
    """Min-max normalized reciprocal activation.

    Cells with zero activation take the largest reciprocal seen elsewhere.
    A matrix whose cells are all equal cannot be normalized; the result is
    then all zeros with ``degenerate`` set.
    """
    cells = np.asarray(getattr(matrix, "cells", matrix), dtype=float)
    positive = cells > 0
    raw = np.zeros_like(cells)
    raw[positive] = 1.0 / cells[positive]
    if not positive.any():
        return RTMatrix(np.zeros_like(cells), "normalized", degenerate=True)
    raw[~positive] = raw[positive].max()
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        return RTMatrix(np.zeros_like(cells), "normalized", degenerate=True)
    return RTMatrix((raw - lo) / (hi - lo), "normalized")


def rescale_rt(normalized: RTMatrix, rt_min_ms: float = DEFAULT_RT_MIN_MS,
               rt_max_ms: float = DEFAULT_RT_MAX_MS) -> RTMatrix:
    if not rt_min_ms < rt_max_ms:
        raise BadRange(f"rt_min_ms ({rt_min_ms}) must be below rt_max_ms ({rt_max_ms})")
    if normalized.scale != "normalized":
        raise ValueError("rescale_rt expects a normalized matrix")
    ms = rt_min_ms + normalized.cells * (rt_max_ms - rt_min_ms)
    return RTMatrix(ms, "ms", normalized.degenerate)


def heatmap_csv(cells: np.ndarray) -> str:
    """Render a 10x10 grid; rows are the first operand, columns the second."""
    buf = io.StringIO()
    buf.write("i\\j," + ",".join(str(j) for j in range(SIZE)) + "\n")
    for i, row in enumerate(np.asarray(cells)):
        buf.write(f"{i}," + ",".join(f"{v:.6f}" for v in row) + "\n")
    return buf.getvalue()


def write_heatmap(cells: np.ndarray, path: str | Path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(heatmap_csv(cells))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def read_heatmap(path: str | Path) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    rows = [line.split(",")[1:] for line in text.splitlines()[1:] if line]
    return np.array(rows, dtype=float)
