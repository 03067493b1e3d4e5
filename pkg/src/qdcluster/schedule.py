"""Charge-configuration schedules and their exact net Ising couplings.

Each molecule sits in one of three charge states.  Two displaced molecules
interact with +E+ when displaced the same way and -E+ when displaced
opposite ways; a neutral molecule decouples from everything.  Because all
couplings are diagonal and commute, a schedule is fully summarised by the
sign-weighted time each pair spends coupled, which we keep as exact
fractions of t0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .geometry import DEFAULT_KMAX, Lattice, MoleculeGeometry, relative_coupling, residual_sum


class ScheduleError(ValueError):
    pass


class ChargeState(enum.Enum):
    NEUTRAL = "N"  # (1,1)
    UP = "U"  # (0,2)
    DOWN = "D"  # (2,0)

    @property
    def sign(self) -> int:
        return _SIGNS[self]


_SIGNS = {ChargeState.NEUTRAL: 0, ChargeState.UP: 1, ChargeState.DOWN: -1}


def pair_sign(s1: ChargeState, s2: ChargeState) -> int:
    return s1.sign * s2.sign


@dataclass(frozen=True)
class ChargeConfig:
    lattice: Lattice
    states: tuple[ChargeState, ...]

    def __post_init__(self):
        if len(self.states) != self.lattice.size:
            raise ScheduleError(
                f"config has {len(self.states)} sites, lattice has {self.lattice.size}"
            )

    @classmethod
    def from_string(cls, lattice: Lattice, text: str) -> ChargeConfig:
        try:
            states = tuple(ChargeState(ch) for ch in text)
        except ValueError:
            raise ScheduleError(f"charge string may only contain N, U, D: {text!r}") from None
        return cls(lattice, states)

    @classmethod
    def uniform(cls, lattice: Lattice, state: ChargeState = ChargeState.UP) -> ChargeConfig:
        return cls(lattice, (state,) * lattice.size)

    def signs(self) -> np.ndarray:
        return np.array([s.sign for s in self.states], dtype=np.int64)

    def __getitem__(self, site: int) -> ChargeState:
        return self.states[site]

    def __str__(self) -> str:
        return "".join(s.value for s in self.states)


@dataclass(frozen=True)
class Step:
    config: ChargeConfig
    duration: Fraction

    def __post_init__(self):
        object.__setattr__(self, "duration", Fraction(self.duration))
        if self.duration < 0:
            raise ScheduleError(f"step duration must be >= 0, got {self.duration}")


@dataclass(frozen=True)
class Schedule:
    lattice: Lattice
    steps: tuple[Step, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for step in self.steps:
            if step.config.lattice != self.lattice:
                raise ScheduleError("every step must live on the schedule's lattice")

    @property
    def total_time(self) -> Fraction:
        return sum((s.duration for s in self.steps), Fraction(0))

    def permuted(self, order: Sequence[int]) -> Schedule:
        return Schedule(self.lattice, tuple(self.steps[i] for i in order))

    def to_text(self) -> str:
        lines = [self.lattice.describe()]
        for step in self.steps:
            d = step.duration
            lines.append(f"{d.numerator}/{d.denominator} {step.config}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Schedule:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines:
            raise ScheduleError("empty schedule file")
        head = lines[0].split()
        try:
            if head[0] == "chain" and len(head) == 2:
                lattice = Lattice.chain(int(head[1]))
            elif head[0] == "grid" and len(head) == 3:
                lattice = Lattice.grid(int(head[1]), int(head[2]))
            else:
                raise ValueError
        except ValueError:
            raise ScheduleError(f"bad header line {lines[0]!r}; expected 'chain N' or 'grid R C'") from None
        steps = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise ScheduleError(f"bad step line {ln!r}")
            try:
                duration = Fraction(parts[0])
            except (ValueError, ZeroDivisionError):
                raise ScheduleError(f"bad duration {parts[0]!r}") from None
            steps.append(Step(ChargeConfig.from_string(lattice, parts[1]), duration))
        return cls(lattice, tuple(steps))


class CouplingMatrix:
    """Symmetric pair -> exact net coefficient (sign-weighted time in t0)."""

    def __init__(self, lattice: Lattice, numer: np.ndarray, denom: int = 1):
        numer = np.asarray(numer, dtype=np.int64)
        if numer.shape != (lattice.size, lattice.size):
            raise ScheduleError("coefficient matrix does not match lattice size")
        if not np.array_equal(numer, numer.T):
            raise ScheduleError("coupling coefficients must be symmetric")
        numer = numer.copy()
        np.fill_diagonal(numer, 0)
        # keep the representation canonical so equality is exact
        common = math.gcd(int(denom), *map(int, np.unique(np.abs(numer))))
        if common > 1:
            numer //= common
            denom //= common
        self.lattice = lattice
        self._numer = numer
        self._denom = int(denom)

    @classmethod
    def from_pairs(cls, lattice: Lattice, coeffs: dict[tuple[int, int], Fraction]) -> CouplingMatrix:
        denom = math.lcm(1, *(Fraction(c).denominator for c in coeffs.values()))
        numer = np.zeros((lattice.size, lattice.size), dtype=np.int64)
        for (p, q), c in coeffs.items():
            v = int(Fraction(c) * denom)
            numer[p, q] = numer[q, p] = v
        return cls(lattice, numer, denom)

    @classmethod
    def nearest_neighbour(cls, lattice: Lattice) -> CouplingMatrix:
        return cls.from_pairs(lattice, {pq: Fraction(1) for pq in lattice.nearest_pairs()})

    def __getitem__(self, pq: tuple[int, int]) -> Fraction:
        p, q = pq
        return Fraction(int(self._numer[p, q]), self._denom)

    def __eq__(self, other):
        if not isinstance(other, CouplingMatrix):
            return NotImplemented
        return (
            self.lattice == other.lattice
            and self._denom == other._denom
            and np.array_equal(self._numer, other._numer)
        )

    def __neg__(self) -> CouplingMatrix:
        return CouplingMatrix(self.lattice, -self._numer, self._denom)

    def __add__(self, other: CouplingMatrix) -> CouplingMatrix:
        if self.lattice != other.lattice:
            raise ScheduleError("cannot add couplings on different lattices")
        d = math.lcm(self._denom, other._denom)
        return CouplingMatrix(
            self.lattice,
            self._numer * (d // self._denom) + other._numer * (d // other._denom),
            d,
        )

    def __sub__(self, other: CouplingMatrix) -> CouplingMatrix:
        return self + (-other)

    def as_float(self) -> np.ndarray:
        return self._numer / self._denom

    def items(self):
        for p, q in self.lattice.pairs():
            yield (p, q), self[p, q]

    def phases(self, geom: MoleculeGeometry, separations: np.ndarray | None = None) -> np.ndarray:
        """Pair phases pi * c_pq * g(d_pq) in radians (zero diagonal).

        ``separations`` overrides the lattice distances (units of b), which
        is how distance jitter enters.
        """
        if separations is None:
            separations = self.lattice.separation_matrix()
        sep = np.array(separations, dtype=float)
        np.fill_diagonal(sep, 1.0)
        theta = np.pi * self.as_float() * relative_coupling(geom, sep)
        np.fill_diagonal(theta, 0.0)
        return theta

    def __repr__(self):
        return f"CouplingMatrix({self.lattice.describe()}, denom={self._denom})"


def net_coupling(sched: Schedule) -> CouplingMatrix:
    """Exact net coefficient of every pair; independent of step order."""
    if not sched.steps:
        raise ScheduleError("schedule has no steps")
    denom = math.lcm(*(s.duration.denominator for s in sched.steps))
    n = sched.lattice.size
    acc = np.zeros((n, n), dtype=np.int64)
    for step in sched.steps:
        if step.config.lattice != sched.lattice:
            raise ScheduleError("step lattice does not match schedule lattice")
        s = step.config.signs()
        acc += int(step.duration * denom) * np.outer(s, s)
    return CouplingMatrix(sched.lattice, acc, denom)


# ---------------------------------------------------------------- generators


def _config(lattice: Lattice, rule) -> ChargeConfig:
    return ChargeConfig(lattice, tuple(rule(*lattice.coords(p)) for p in range(lattice.size)))


def _require_chain(lattice: Lattice):
    if not lattice.is_chain:
        raise ScheduleError("this protocol is defined on a 1D chain")


U, D, N = ChargeState.UP, ChargeState.DOWN, ChargeState.NEUTRAL


def tiled_config(lattice: Lattice, pattern: str, anchor: int = 0) -> ChargeConfig:
    """Repeat a per-period charge string along a chain, phase-locked to ``anchor``."""
    _require_chain(lattice)
    states = [ChargeState(ch) for ch in pattern]
    period = len(states)
    return _config(lattice, lambda p: states[(p - anchor) % period])


def gen_one_step(lattice: Lattice) -> Schedule:
    return Schedule(lattice, (Step(ChargeConfig.uniform(lattice), Fraction(1)),))


def gen_three_step(lattice: Lattice, anchor: int = 0) -> Schedule:
    """Cancels every (4n+2)-th neighbour coupling in total time 2."""
    _require_chain(lattice)
    half = Fraction(1, 2)
    return Schedule(
        lattice,
        (
            Step(tiled_config(lattice, "UUDD", anchor), half),
            Step(tiled_config(lattice, "UDDU", anchor), half),
            Step(ChargeConfig.uniform(lattice), Fraction(1)),
        ),
    )


def window_pattern(period: int, shift: int) -> str:
    """Two-site Up window of the ``shift``-th (1-based) step; all other sites Down.

    Step 1 lifts offsets {0, 1}; each later step moves the window one site left.
    """
    up = {(1 - shift) % period, (2 - shift) % period}
    return "".join("U" if r in up else "D" for r in range(period))


def gen_m_step(lattice: Lattice, m: int, anchor: int = 0) -> Schedule:
    """m shifted-window steps of t0/4 then an all-Up step of (8-m) t0/4.

    Cancels separations mn+2 .. mn+m-2.  Valid for 4 <= m <= 8 only; beyond
    8 the last step would need a negative duration.
    """
    _require_chain(lattice)
    if not 4 <= m <= 8:
        raise ScheduleError(f"m must satisfy 4 <= m <= 8 (the final step lasts (8-m)/4), got {m}")
    quarter = Fraction(1, 4)
    steps = [Step(tiled_config(lattice, window_pattern(m, s), anchor), quarter) for s in range(1, m + 1)]
    steps.append(Step(ChargeConfig.uniform(lattice), Fraction(8 - m, 4)))
    return Schedule(lattice, tuple(steps))


def gen_2d_three_step(lattice: Lattice, anchor: tuple[int, int] = (0, 0)) -> Schedule:
    """Grid protocol that cancels all diagonal couplings in total time 3."""
    if lattice.is_chain:
        raise ScheduleError("the 2D protocol needs a grid lattice")
    i, j = anchor

    def first(r, c):
        pr, pc = (r - i) % 2, (c - j) % 2
        return U if (pr, pc) == (0, 0) else D if (pr, pc) == (1, 1) else N

    def second(r, c):
        pr, pc = (r - i) % 2, (c - j) % 2
        return U if (pr, pc) == (0, 1) else D if (pr, pc) == (1, 0) else N

    one = Fraction(1)
    return Schedule(
        lattice,
        (
            Step(_config(lattice, first), one),
            Step(_config(lattice, second), one),
            Step(ChargeConfig.uniform(lattice), one),
        ),
    )


# ------------------------------------------------------- bulk (periodic) view


def chain_period(sched: Schedule) -> int:
    """Smallest period shared by every step, seen at least twice along the chain."""
    _require_chain(sched.lattice)
    rows = [str(s.config) for s in sched.steps]
    n = sched.lattice.size
    for period in range(1, n // 2 + 1):
        if all(r[p] == r[p + period] for r in rows for p in range(n - period)):
            return period
    raise ScheduleError("schedule is not periodic along the chain (need two full periods)")


def step_signs(sched: Schedule, j: int, ks: Iterable[int]) -> list[list[int]]:
    """Per-step pair signs between site ``j`` and ``j + k`` on the periodic extension."""
    period = chain_period(sched)
    rows = []
    for step in sched.steps:
        s = step.config.signs()
        rows.append([int(s[j % period] * s[(j + k) % period]) for k in ks])
    return rows


def bulk_coefficients(sched: Schedule, j: int, ks: Iterable[int]) -> list[Fraction]:
    """Net coefficients c(j, j+k) on the infinite periodic extension of a chain schedule."""
    ks = list(ks)
    signs = step_signs(sched, j, ks)
    return [
        sum((row[i] * step.duration for row, step in zip(signs, sched.steps)), Fraction(0))
        for i in range(len(ks))
    ]


def residual_ratio(
    sched: Schedule,
    geom: MoleculeGeometry,
    k_max: int = DEFAULT_KMAX,
    tol: float = 1e-6,
) -> float:
    """Uncancelled long-range coupling relative to the nearest-neighbour bond.

    Uses the bulk coefficients extrapolated periodically; for schedules
    whose coefficients depend on the reference site the worst site wins.
    """
    period = chain_period(sched)
    worst = 0.0
    for j in range(period):
        coeffs = bulk_coefficients(sched, j, range(1, period + 1))
        nearest = abs(coeffs[0])
        if nearest == 0:
            raise ScheduleError(f"nearest-neighbour coefficient vanishes at site {j}")
        cyc = [abs(c) / nearest for c in coeffs]  # cyc[i] is k = i + 1

        def weight(k, cyc=cyc):
            return cyc[(k - 1) % period]

        worst = max(worst, residual_sum(geom, weight, k_max=k_max, tol=tol))
    return worst
