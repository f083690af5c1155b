"""Solve problems the way a person might, and account for the time it takes.

The direct route tries memory retrieval first, then breaks the problem into
column-wise (or long-division) steps over single-digit facts, and counts
when a needed fact is missing.  Optimization strategies produce alternative
plans; the cheapest plan wins, with ties going to the direct route.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import DivisionByZero, NegativeResult
from .facts import FactKey, FactLibrary, true_result
from .parser import Operator, Problem

ADD, SUB, MUL, DIV = Operator.ADD, Operator.SUB, Operator.MUL, Operator.DIV


@dataclass(frozen=True)
class CostParams:
    """Per-step time costs in milliseconds."""

    count_step_ms: float = 400.0
    carry_ms: float = 150.0
    borrow_ms: float = 150.0
    column_overhead_ms: float = 50.0
    transform_ms: float = 100.0
    shift_ms: float = 50.0

    def __post_init__(self):
        if not self.count_step_ms > 0:
            raise ValueError("count_step_ms must be positive")
        for name in ("carry_ms", "borrow_ms", "column_overhead_ms",
                     "transform_ms", "shift_ms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class StrategyPolicy:
    fast_addition: bool = True
    fast_addition_threshold: int = 9
    divide_by_5: bool = True

    def __post_init__(self):
        if self.fast_addition_threshold < 1:
            raise ValueError("fast_addition_threshold must be at least 1")

    @classmethod
    def none(cls) -> "StrategyPolicy":
        return cls(fast_addition=False, divide_by_5=False)


class StepKind(str, enum.Enum):
    RETRIEVE = "Retrieve"
    CARRY = "Carry"
    BORROW = "Borrow"
    COUNT = "Count"
    TRANSFORM = "Transform"
    SHIFT = "Shift"
    COMPOSE = "Compose"


class Step(NamedTuple):
    kind: StepKind
    description: str
    rt_ms: float
    key: FactKey | None = None


@dataclass
class SolutionTrace:
    value: int
    remainder: int = 0
    steps: list[Step] = field(default_factory=list)
    plan: str = "direct"

    @property
    def total_rt_ms(self) -> float:
        return math.fsum(s.rt_ms for s in self.steps)

    def count(self, kind: StepKind) -> int:
        return sum(1 for s in self.steps if s.kind is kind)

    def retrieved(self) -> list[FactKey]:
        return [s.key for s in self.steps if s.kind is StepKind.RETRIEVE]


class Rewrite(NamedTuple):
    """A strategy's substitute problem and the steps spent producing it."""

    problem: Problem
    distance: int
    steps: list[Step]


def _digits(n: int) -> list[int]:
    """Least significant digit first."""
    return [int(c) for c in reversed(str(n))]


def _power_of_ten(n: int) -> int | None:
    s = str(n)
    if n >= 10 and s[0] == "1" and s.count("0") == len(s) - 1:
        return len(s) - 1
    return None


class _Work:
    """Step accumulator shared by all procedures of one plan."""

    def __init__(self, library: FactLibrary, costs: CostParams):
        self.lib = library
        self.costs = costs
        self.steps: list[Step] = []
        # one immutable Step per retrievable fact, shared across plans
        self._recall = None if library is None else library.memo.setdefault("steps", {})

    def trace(self, value, remainder=0, plan="direct") -> SolutionTrace:
        return SolutionTrace(value, remainder, self.steps, plan)

    # -- primitive steps ------------------------------------------------

    def retrieve(self, op, a, b):
        step = self._recall.get((op, a, b))
        if step is None:
            entry = self.lib.lookup((op, a, b))
            if entry is None:
                return None
            step = Step(StepKind.RETRIEVE, f"{a} {op.value} {b} = {entry.result}",
                        entry.rt_ms, entry.key)
            self._recall[entry.key] = step
        self.steps.append(step)
        return true_result(step.key)

    def overhead(self, what):
        self.steps.append(Step(StepKind.COMPOSE, what, self.costs.column_overhead_ms))

    def count_up(self, start, n):
        ms = self.costs.count_step_ms
        for k in range(1, n + 1):
            self.steps.append(Step(StepKind.COUNT, f"count {start + k}", ms))
        return start + n

    def count_down(self, start, n):
        ms = self.costs.count_step_ms
        for k in range(1, n + 1):
            self.steps.append(Step(StepKind.COUNT, f"count {start - k}", ms))
        return start - n

    def count_min(self, a, b):
        """Start at the larger addend and count up the smaller one."""
        return self.count_up(max(a, b), min(a, b))

    def count_sub(self, m, s):
        # count down s from m, or up from s to m, whichever is shorter
        if s <= m - s:
            return self.count_down(m, s)
        self.count_up(s, m - s)
        return m - s

    # -- single-digit facts with fallback --------------------------------

    def add_digits(self, x, y):
        r = self.retrieve(ADD, x, y)
        return self.count_min(x, y) if r is None else r

    def sub_digits(self, x, y):
        r = self.retrieve(SUB, x, y)
        return self.count_sub(x, y) if r is None else r

    def mul_digits(self, x, y):
        r = self.retrieve(MUL, x, y)
        if r is not None:
            return r
        # repeated addition of the larger factor
        big, n = max(x, y), min(x, y)
        if n == 0:
            self.overhead(f"{x} * {y} = 0")
            return 0
        acc = big
        for _ in range(n - 1):
            acc = self.add(acc, big)
        return acc

    # -- multi-digit procedures -----------------------------------------

    def add(self, a, b):
        if a < 10 and b < 10:
            return self.add_digits(a, b)
        if a == 0 or b == 0:
            if self.retrieve(ADD, a % 10, b % 10) is not None:
                return a + b
        return self.add_columns(a, b)

    def add_columns(self, a, b):
        da, db = _digits(a), _digits(b)
        carry, out = 0, []
        for i in range(max(len(da), len(db))):
            x = da[i] if i < len(da) else 0
            y = db[i] if i < len(db) else 0
            self.overhead(f"column {i}: {x} + {y}" + (" + carry" if carry else ""))
            s = self.add_digits(x, y) if x and y else x + y
            if carry:
                tens, units = divmod(s, 10)
                s = 10 * tens + self.add_digits(units, 1)
            carry, digit = divmod(s, 10)
            out.append(digit)
            if carry:
                self.steps.append(Step(StepKind.CARRY, f"carry 1 from column {i}",
                                       self.costs.carry_ms))
        if carry:
            out.append(1)
        return int("".join(map(str, reversed(out))))

    def sub(self, a, b):
        if a < b:
            raise NegativeResult(f"{a} - {b} is negative")
        if a < 10:
            return self.sub_digits(a, b)
        if b == 0:
            if self.retrieve(SUB, a % 10, 0) is not None:
                return a
        return self.sub_columns(a, b)

    def sub_columns(self, a, b):
        da, db = _digits(a), _digits(b)
        borrow, out = 0, []
        for i, x in enumerate(da):
            y = db[i] if i < len(db) else 0
            self.overhead(f"column {i}: {x} - {y}" + (" - borrow" if borrow else ""))
            if borrow:
                if x == 0:
                    # borrow across a zero: it becomes 9, keep borrowing
                    x = 9
                    self.steps.append(Step(StepKind.BORROW, f"borrow through column {i + 1}",
                                           self.costs.borrow_ms))
                else:
                    x = self.sub_digits(x, 1)
                    borrow = 0
            if x >= y:
                r = self.sub_digits(x, y) if y else x
            else:
                borrow = 1
                self.steps.append(Step(StepKind.BORROW, f"borrow from column {i + 1}",
                                       self.costs.borrow_ms))
                # subtraction by addition: which r gives y + r = 10 + x?
                r = 10 + x - y
                if self.retrieve(ADD, y, r) is None:
                    self.count_sub(10 + x, y)
            out.append(r)
        return int("".join(map(str, reversed(out))))

    def mul(self, a, b):
        if a < 10 and b < 10:
            return self.mul_digits(a, b)
        if a == 0 or b == 0:
            if self.retrieve(MUL, a % 10, b % 10) is not None:
                return 0
        for x, y in ((a, b), (b, a)):
            k = _power_of_ten(y)
            if k is not None:
                self.steps.append(Step(StepKind.SHIFT, f"{x} * {y}: append {k} zero(s)",
                                       self.costs.shift_ms))
                return x * y
        return self.mul_columns(a, b)

    def mul_columns(self, a, b):
        top, bottom = (a, b) if len(str(a)) >= len(str(b)) else (b, a)
        rows = []
        for j, m in enumerate(_digits(bottom)):
            if m == 0:
                continue
            carry, out = 0, []
            for i, t in enumerate(_digits(top)):
                self.overhead(f"partial {j}, digit {i}: {t} * {m}")
                p = self.mul_digits(t, m) if t else 0
                if carry:
                    p = self.add(p, carry)
                carry, digit = divmod(p, 10)
                out.append(digit)
            row = int(str(carry or "") + "".join(map(str, reversed(out))))
            if j:
                self.steps.append(Step(StepKind.SHIFT, f"shift partial {row} by {j}",
                                       self.costs.shift_ms))
                row *= 10**j
            rows.append(row)
        total = rows[0]
        for row in rows[1:]:
            total = self.add(total, row)
        return total

    def div(self, a, b):
        if b == 0:
            raise DivisionByZero(f"{a} / 0")
        if a < 10 and b < 10 and a % b == 0:
            q = self.retrieve(DIV, a, b)
            if q is not None:
                return q, 0
        if b == 1:
            if self.retrieve(DIV, a % 10, 1) is not None:
                return a, 0
        k = _power_of_ten(b)
        if k is not None:
            self.steps.append(Step(StepKind.SHIFT, f"{a} / {b}: drop {k} digit(s)",
                                   self.costs.shift_ms))
            return divmod(a, b)
        return self.div_long(a, b)

    def div_long(self, a, b):
        if a < b:
            self.overhead(f"{a} < {b}")
            return 0, a
        quotient, partial = 0, 0
        for d in reversed(_digits(a)):
            partial = partial * 10 + d
            self.overhead(f"bring down {d}: {partial}")
            q = partial // b
            quotient = quotient * 10 + q
            if q == 0:
                continue
            trial = self.mul_digits(q, b) if b < 10 else self.mul(b, q)
            if trial == partial:
                self.overhead(f"{partial} goes exactly")
                partial = 0
            else:
                partial = self.sub(partial, trial)
        return quotient, partial

    def direct(self, problem):
        a, op, b = problem
        if op is ADD:
            return self.add(a, b), 0
        if op is SUB:
            return self.sub(a, b), 0
        if op is MUL:
            return self.mul(a, b), 0
        return self.div(a, b)


# -- public procedures ------------------------------------------------------

def count_min(a: int, b: int, costs: CostParams = CostParams()) -> SolutionTrace:
    w = _Work(None, costs)
    return w.trace(w.count_min(a, b), plan="count")


def add_multidigit(a, b, library, costs=CostParams()) -> SolutionTrace:
    w = _Work(library, costs)
    return w.trace(w.add(a, b))


def sub_multidigit(a, b, library, costs=CostParams()) -> SolutionTrace:
    w = _Work(library, costs)
    return w.trace(w.sub(a, b))


def mul_multidigit(a, b, library, costs=CostParams()) -> SolutionTrace:
    w = _Work(library, costs)
    return w.trace(w.mul(a, b))


def div_long(a, b, library, costs=CostParams()) -> SolutionTrace:
    w = _Work(library, costs)
    return w.trace(*w.div(a, b))


def _round_target(x: int) -> int:
    """Nearest multiple of the leading power of ten (497 -> 500)."""
    unit = 10 ** (len(str(x)) - 1)
    return (x + unit // 2) // unit * unit


def _trailing_zeros(n: int) -> int:
    s = str(n)
    return len(s) - len(s.rstrip("0"))


def fast_addition_candidates(problem: Problem) -> list[tuple[int, int, int, int]]:
    """All ``(round, other, compensated_other, distance)`` rewrites."""
    a, op, b = problem
    if op is not ADD:
        return []
    out = []
    for x, other in ((a, b), (b, a)):
        if x < 10:
            continue
        r = _round_target(x)
        d = abs(r - x)
        if d == 0:
            continue
        y = other - d if r > x else other + d
        if y >= 0:
            out.append((r, other, y, d))
    return out


def fast_addition_transform(problem: Problem, threshold: int | None,
                            library: FactLibrary,
                            costs: CostParams = CostParams()) -> Rewrite | None:
    """Round one addend to a number ending in zeros, compensate the other.

    497 + 38 becomes 500 + 35.  When both addends qualify, the round number
    with more trailing zeros wins, then the smaller distance.  The returned
    steps cover the rewrite itself and the compensation arithmetic, not the
    final addition.  ``threshold=None`` lifts the distance limit.
    """
    cands = [c for c in fast_addition_candidates(problem)
             if threshold is None or c[3] <= threshold]
    if not cands:
        return None
    r, other, y, d = max(cands, key=lambda c: (_trailing_zeros(c[0]), -c[3]))
    w = _Work(library, costs)
    w.steps.append(Step(StepKind.TRANSFORM, f"round to {r}, compensate {other} by {d}",
                        costs.transform_ms))
    if y < other:
        w.sub(other, d)
    else:
        w.add(other, d)
    return Rewrite(Problem(r, ADD, y), d, w.steps)


def divide_by_5_transform(problem: Problem, library: FactLibrary,
                          costs: CostParams = CostParams()) -> Rewrite | None:
    """Rewrite ``n / 5`` as ``2n / 10`` when 5 divides ``n``."""
    a, op, b = problem
    if op is not DIV or b != 5 or a % 5:
        return None
    w = _Work(library, costs)
    w.steps.append(Step(StepKind.TRANSFORM, f"{a} / 5 = {2 * a} / 10", costs.transform_ms))
    w.mul(a, 2)
    return Rewrite(Problem(2 * a, DIV, 10), 0, w.steps)


# -- plans ------------------------------------------------------------------

def _check_domain(problem: Problem):
    a, op, b = problem
    if a < 0 or b < 0:
        raise ValueError("operands must be non-negative")
    if op is DIV and b == 0:
        raise DivisionByZero(f"cannot divide {a} by zero")
    if op is SUB and a < b:
        raise NegativeResult(f"{a} - {b} would be negative")


def direct_plan(problem: Problem, library: FactLibrary,
                costs: CostParams = CostParams()) -> SolutionTrace:
    _check_domain(problem)
    w = _Work(library, costs)
    value, rem = w.direct(problem)
    return w.trace(value, rem)


def _finish(rewrite: Rewrite, plan: str, library, costs) -> SolutionTrace:
    w = _Work(library, costs)
    w.steps.extend(rewrite.steps)
    value, rem = w.direct(rewrite.problem)
    return w.trace(value, rem, plan)


def fast_addition_plan(problem, library, costs=CostParams(),
                       threshold: int | None = None) -> SolutionTrace | None:
    _check_domain(problem)
    rw = fast_addition_transform(problem, threshold, library, costs)
    return None if rw is None else _finish(rw, "fast-addition", library, costs)


def divide_by_5_plan(problem, library, costs=CostParams()) -> SolutionTrace | None:
    _check_domain(problem)
    rw = divide_by_5_transform(problem, library, costs)
    return None if rw is None else _finish(rw, "divide-by-5", library, costs)


def candidate_plans(problem: Problem, library: FactLibrary,
                    policy: StrategyPolicy = StrategyPolicy(),
                    costs: CostParams = CostParams()) -> list[SolutionTrace]:
    """The direct plan first, then every applicable strategy plan."""
    plans = [direct_plan(problem, library, costs)]
    if policy.fast_addition:
        p = fast_addition_plan(problem, library, costs, policy.fast_addition_threshold)
        if p is not None:
            plans.append(p)
    if policy.divide_by_5:
        p = divide_by_5_plan(problem, library, costs)
        if p is not None:
            plans.append(p)
    return plans


def solve(problem: Problem, library: FactLibrary,
          policy: StrategyPolicy = StrategyPolicy(),
          costs: CostParams = CostParams()) -> SolutionTrace:
    """Solve ``problem`` and return the fastest plan's trace.

    Raises DivisionByZero or NegativeResult for problems without a
    non-negative integer answer.
    """
    plans = candidate_plans(problem, library, policy, costs)
    # min() keeps the first of equal keys, so ties go to the direct plan
    return min(plans, key=lambda t: t.total_rt_ms)


# -- rendering --------------------------------------------------------------

def format_trace(trace: SolutionTrace) -> str:
    lines = [f"{'#':>3}  {'kind':<9}  {'rt_ms':>10}  description"]
    for i, s in enumerate(trace.steps):
        lines.append(f"{i:>3}  {s.kind.value:<9}  {s.rt_ms:>10.3f}  {s.description}")
    return "\n".join(lines)


def trace_csv(trace: SolutionTrace) -> str:
    rows = ["step_index,kind,description,rt_ms"]
    for i, s in enumerate(trace.steps):
        desc = s.description.replace('"', '""')
        if "," in desc or '"' in desc:
            desc = f'"{desc}"'
        rows.append(f"{i},{s.kind.value},{desc},{s.rt_ms:.6f}")
    return "\n".join(rows) + "\n"
