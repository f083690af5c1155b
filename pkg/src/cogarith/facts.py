"""The arithmetic fact library: memorized single-digit facts with RTs."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .activation import RTMatrix
from .errors import (
    InconsistentResult,
    IoFailure,
    MalformedRow,
    UnknownKey,
)
from .parser import Operator

FACT_COLUMNS = ("op", "a", "b", "result", "rt_ms")
MASK_COLUMNS = ("op", "a", "b")


class FactKey(NamedTuple):
    op: Operator
    a: int
    b: int

    def __str__(self):
        return f"{self.a} {self.op.symbol} {self.b}"


def true_result(key: FactKey) -> int:
    op, a, b = key
    if op is Operator.ADD:
        return a + b
    if op is Operator.SUB:
        return a - b
    if op is Operator.MUL:
        return a * b
    return a // b


def is_fact_key(key: FactKey) -> bool:
    """Whether ``key`` names a memorizable fact at all."""
    op, a, b = key
    if not (0 <= a <= 9 and 0 <= b <= 9):
        return False
    if op is Operator.SUB:
        return a >= b
    if op is Operator.DIV:
        return b >= 1 and a % b == 0
    return True


def fact_keys(op: Operator) -> list[FactKey]:
    keys = (FactKey(op, a, b) for a in range(10) for b in range(10))
    return [k for k in keys if is_fact_key(k)]


@dataclass(frozen=True)
class FactEntry:
    key: FactKey
    result: int
    rt_ms: float

    def __post_init__(self):
        if self.result != true_result(self.key):
            raise InconsistentResult(
                f"{self.key} = {true_result(self.key)}, not {self.result}", 0, "result")
        if not self.rt_ms > 0:
            raise ValueError(f"rt_ms must be positive, got {self.rt_ms}")


@dataclass(frozen=True)
class FactLibrary:
    """Immutable fact store.

    ``entries`` holds every fact ever learned; ``removed`` is the ablation
    mask.  Only unmasked entries are retrievable.
    """

    entries: Mapping[FactKey, FactEntry]
    removed: frozenset = frozenset()
    _live: dict = field(init=False, repr=False, compare=False)
    # scratch space for per-library memoization by consumers
    memo: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        live = {k: e for k, e in self.entries.items() if k not in self.removed}
        object.__setattr__(self, "_live", live)
        object.__setattr__(self, "memo", {})

    def lookup(self, key: FactKey) -> FactEntry | None:
        return self._live.get(key)

    def keys(self, op: Operator | None = None) -> list[FactKey]:
        return [k for k in self._live if op is None or k.op is op]

    def __contains__(self, key):
        return key in self._live

    def __len__(self):
        return len(self._live)

    def __eq__(self, other):
        if not isinstance(other, FactLibrary):
            return NotImplemented
        return dict(self.entries) == dict(other.entries) and self.removed == other.removed

    __hash__ = None

    def __repr__(self):
        return f"FactLibrary({len(self.entries)} facts, {len(self.removed)} ablated)"


def lookup(library: FactLibrary, key: FactKey) -> FactEntry | None:
    return library.lookup(key)


def build_default(rt_matrices: Mapping[Operator, RTMatrix]) -> FactLibrary:
    """Populate every memorizable fact from per-operator ms RT matrices.

    Division reads the multiplication matrix at ``(quotient, divisor)``
    unless a DIV matrix is given explicitly.  RTs are rounded to 6 decimals
    so that CSV persistence is lossless.
    """
    entries = {}
    for op in Operator:
        if op is Operator.DIV and op not in rt_matrices:
            source = rt_matrices.get(Operator.MUL)
        else:
            source = rt_matrices.get(op)
        if source is None:
            continue
        if source.scale != "ms":
            raise ValueError(f"{op.slug} RT matrix must be in milliseconds")
        for key in fact_keys(op):
            cell = (key.a // key.b, key.b) if op is Operator.DIV else (key.a, key.b)
            entries[key] = FactEntry(key, true_result(key), round(float(source.cells[cell]), 6))
    return FactLibrary(entries)


def ablate(library: FactLibrary, mask: Iterable[FactKey]) -> FactLibrary:
    mask = frozenset(mask)
    unknown = sorted((k for k in mask if k not in library.entries), key=_sort_key)
    if unknown:
        raise UnknownKey(f"ablation mask references missing fact {unknown[0]}")
    return FactLibrary(library.entries, library.removed | mask)


def default_ablation_mask(op: Operator = Operator.ADD) -> frozenset:
    """Facts whose operands are both in 5..9."""
    return frozenset(k for k in fact_keys(op) if k.a >= 5 and k.b >= 5)


def _sort_key(key: FactKey):
    return (list(Operator).index(key.op), key.a, key.b)


# -- persistence -----------------------------------------------------------

def mask_path_for(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".mask.csv")


def save_csv(library: FactLibrary, path: str | Path,
             mask_path: str | Path | None = None) -> Path:
    """Write all entries to ``path`` and the ablation mask beside it.

    The mask file is only written when the mask is non-empty.
    """
    path = Path(path)
    mask_path = Path(mask_path) if mask_path else mask_path_for(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(FACT_COLUMNS)
            for key in sorted(library.entries, key=_sort_key):
                e = library.entries[key]
                w.writerow([key.op.slug, key.a, key.b, e.result, f"{e.rt_ms:.6f}"])
        if library.removed:
            save_mask(library.removed, mask_path)
        elif mask_path.exists():
            mask_path.unlink()
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def save_mask(mask: Iterable[FactKey], path: str | Path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(MASK_COLUMNS)
            for key in sorted(mask, key=_sort_key):
                w.writerow([key.op.slug, key.a, key.b])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def _parse_key(row, lineno):
    try:
        op = Operator.from_slug(row[0])
    except KeyError:
        raise MalformedRow(f"unknown operator {row[0]!r}", lineno, "op") from None
    values = []
    for col, name in ((1, "a"), (2, "b")):
        try:
            values.append(int(row[col]))
        except ValueError:
            raise MalformedRow(f"{name} is not an integer: {row[col]!r}", lineno, name) from None
    key = FactKey(op, *values)
    if not is_fact_key(key):
        raise MalformedRow(f"{key} is not a single-digit fact", lineno, "a")
    return key


def _read_rows(path, width):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != width:
            raise MalformedRow(f"expected {width} fields, got {len(row)}", lineno, len(row) + 1)
        yield lineno, row


def parse_row(row: list[str], lineno: int = 1) -> FactEntry:
    """Parse one ``op,a,b,result,rt_ms`` record."""
    if len(row) != len(FACT_COLUMNS):
        raise MalformedRow(f"expected {len(FACT_COLUMNS)} fields, got {len(row)}",
                           lineno, len(row) + 1)
    key = _parse_key(row, lineno)
    try:
        result = int(row[3])
    except ValueError:
        raise MalformedRow(f"result is not an integer: {row[3]!r}", lineno, "result") from None
    try:
        rt = float(row[4])
    except ValueError:
        raise MalformedRow(f"rt_ms is not a number: {row[4]!r}", lineno, "rt_ms") from None
    if result != true_result(key):
        raise InconsistentResult(
            f"{key} = {true_result(key)}, file says {result}", lineno, "result")
    if not rt > 0:
        raise MalformedRow(f"rt_ms must be positive: {row[4]!r}", lineno, "rt_ms")
    return FactEntry(key, result, rt)


def load_mask(path: str | Path) -> frozenset:
    return frozenset(_parse_key(row, n) for n, row in _read_rows(path, len(MASK_COLUMNS)))


def load_csv(path: str | Path, mask_path: str | Path | None = None) -> FactLibrary:
    entries = {}
    for lineno, row in _read_rows(path, len(FACT_COLUMNS)):
        entry = parse_row(row, lineno)
        entries[entry.key] = entry
    library = FactLibrary(entries)
    mask_path = Path(mask_path) if mask_path else mask_path_for(path)
    if mask_path.exists():
        library = ablate(library, load_mask(mask_path))
    return library
