"""Search for charge-pattern schedules that hit a target coupling profile.

A candidate schedule is a set of periodic charge patterns, each held for a
nonnegative time.  The net coefficient of pair (j, j+k) is linear in those
times, so asking for 1 on nearest neighbours and 0 on a set of cancelled
separations, at every site of the period, is an exact linear program.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import DEFAULT_KMAX, Lattice, MoleculeGeometry
from .lp import solve_lp
from .schedule import (
    Schedule,
    Step,
    chain_period,
    net_coupling,
    residual_ratio,
    tiled_config,
    window_pattern,
)

MAX_ENUM_PERIOD = 12


class SynthesisError(ValueError):
    pass


class VerificationError(AssertionError):
    """A schedule's recomputed couplings disagree with its certificate."""

    def __init__(self, mismatches):
        self.mismatches = mismatches
        k, expected, actual, site = mismatches[0]
        super().__init__(
            f"coefficient mismatch at k={k} (site {site}): expected {expected}, got {actual}"
            + (f" (+{len(mismatches) - 1} more)" if len(mismatches) > 1 else "")
        )


@dataclass(frozen=True)
class TargetProfile:
    nearest: Fraction = Fraction(1)
    cancel: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "nearest", Fraction(self.nearest))
        object.__setattr__(self, "cancel", frozenset(int(k) for k in self.cancel))
        if 1 in self.cancel:
            raise SynthesisError("the nearest-neighbour separation cannot be cancelled")
        if any(k < 1 for k in self.cancel):
            raise SynthesisError("separations must be positive")

    def required(self) -> dict[int, Fraction]:
        req = {k: Fraction(0) for k in self.cancel}
        req[1] = self.nearest
        return dict(sorted(req.items()))


@dataclass(frozen=True)
class PatternFamily:
    period: int
    patterns: tuple[str, ...]
    kind: str = "custom"

    def __post_init__(self):
        if self.period < 2:
            raise SynthesisError("pattern period must be at least 2")
        if not self.patterns:
            raise SynthesisError("pattern family is empty")
        for pat in self.patterns:
            if len(pat) != self.period or set(pat) - set("UDN"):
                raise SynthesisError(f"bad pattern {pat!r} for period {self.period}")


def window_family(period: int) -> PatternFamily:
    """The shifted two-site window patterns followed by the all-Up pattern."""
    pats = tuple(window_pattern(period, s) for s in range(1, period + 1)) + ("U" * period,)
    return PatternFamily(period, pats, "window")


def enumerated_family(period: int, allow_neutral: bool = False) -> PatternFamily:
    """Every charge string of the period, one representative per Up/Down swap."""
    if period > MAX_ENUM_PERIOD:
        raise SynthesisError(f"enumeration is capped at period {MAX_ENUM_PERIOD}")
    alphabet = "UDN" if allow_neutral else "UD"
    pats = []
    for chars in itertools.product(alphabet, repeat=period):
        pat = "".join(chars)
        lead = pat.lstrip("N")
        # swapping U and D flips no pair sign, so keep the U-led copy only
        if lead and lead[0] == "U":
            pats.append(pat)
    return PatternFamily(period, tuple(pats), "enum")


_SIGN = {"U": 1, "D": -1, "N": 0}


def pattern_pair_sign(pattern: str, j: int, k: int) -> int:
    p = len(pattern)
    return _SIGN[pattern[j % p]] * _SIGN[pattern[(j + k) % p]]


def _swap_key(pattern: str) -> str:
    swapped = pattern.translate(str.maketrans("UD", "DU"))
    return min(pattern, swapped)


def sign_vector(pattern: str, k: int) -> Fraction:
    """Average pair sign at separation ``k`` over one period of the pattern."""
    p = len(pattern)
    return Fraction(sum(pattern_pair_sign(pattern, j, k) for j in range(p)), p)


@dataclass
class SynthesisResult:
    feasible: bool
    family: PatternFamily
    target: TargetProfile
    durations: tuple[Fraction, ...] = ()
    schedule: Schedule | None = None
    certificate: dict[int, dict[int, Fraction]] = field(default_factory=dict)
    message: str = ""

    @property
    def total_time(self) -> Fraction | None:
        return sum(self.durations, Fraction(0)) if self.feasible else None

    def to_json(self) -> dict:
        out = {
            "feasible": self.feasible,
            "family": {"kind": self.family.kind, "period": self.family.period},
            "target": {
                "nearest": str(self.target.nearest),
                "cancel": sorted(self.target.cancel),
            },
        }
        if not self.feasible:
            out["message"] = self.message
            return out
        out["total_time"] = str(self.total_time)
        out["steps"] = [
            {"pattern": pat, "duration": str(d)}
            for pat, d in zip(self.family.patterns, self.durations)
            if d != 0
        ]
        out["schedule"] = self.schedule.to_text()
        out["certificate"] = {
            str(j): {str(k): str(c) for k, c in row.items()} for j, row in self.certificate.items()
        }
        return out


def _certificate(patterns, durations, period, k_top):
    cert = {}
    for j in range(period):
        cert[j] = {
            k: sum(
                (d * pattern_pair_sign(pat, j, k) for pat, d in zip(patterns, durations) if d),
                Fraction(0),
            )
            for k in range(1, k_top + 1)
        }
    return cert


def _k_top(target: TargetProfile, period: int) -> int:
    return max(max(target.required()), period + 2)


def _assemble(patterns, durations, n_sites, anchor=0) -> Schedule:
    lattice = Lattice.chain(n_sites)
    steps = tuple(
        Step(tiled_config(lattice, pat, anchor), d) for pat, d in zip(patterns, durations) if d != 0
    )
    return Schedule(lattice, steps)


def solve_durations(
    family: PatternFamily,
    target: TargetProfile,
    n_sites: int | None = None,
) -> SynthesisResult:
    """Minimum-total-time nonnegative durations meeting ``target`` at every site.

    Ties between equal-time solutions go to earlier patterns: the duration
    vector is maximised lexicographically in family order.  Patterns that
    are Up/Down swaps of each other produce the same couplings everywhere;
    they share their time equally.  Returns a result with ``feasible=False``
    when no nonnegative durations exist.
    """
    period = family.period
    req = target.required()
    rows, rhs = [], []
    for j in range(period):
        for k, want in req.items():
            rows.append([pattern_pair_sign(pat, j, k) for pat in family.patterns])
            rhs.append(want)

    # identical columns are interchangeable; the lexicographic rule favours the first
    first_of: dict[tuple, int] = {}
    keep = []
    for i in range(len(family.patterns)):
        col = tuple(r[i] for r in rows)
        if col not in first_of:
            first_of[col] = i
            keep.append(i)
    a_eq = [[r[i] for i in keep] for r in rows]
    nvar = len(keep)

    res = solve_lp([Fraction(1)] * nvar, a_eq, rhs)
    if res.status != "optimal":
        return SynthesisResult(
            False, family, target, message=f"no nonnegative durations reach the target ({res.status})"
        )
    best_time = res.value
    x = res.x

    fixed: list[tuple[int, Fraction]] = []
    for i in range(nvar):
        used = sum((v for _, v in fixed), Fraction(0))
        if used == best_time:
            x = [Fraction(0)] * nvar
            for idx, v in fixed:
                x[idx] = v
            break
        extra_rows = [[Fraction(1)] * nvar]
        extra_rhs = [best_time]
        for idx, v in fixed:
            extra_rows.append([Fraction(int(t == idx)) for t in range(nvar)])
            extra_rhs.append(v)
        cost = [Fraction(0)] * nvar
        cost[i] = Fraction(-1)
        stage = solve_lp(cost, a_eq + extra_rows, rhs + extra_rhs)
        fixed.append((i, -stage.value))
        x = stage.x
    durations = [Fraction(0)] * len(family.patterns)
    for i, v in zip(keep, x):
        twins = [t for t, pat in enumerate(family.patterns) if _swap_key(pat) == _swap_key(family.patterns[i])]
        for t in twins:
            durations[t] = v / len(twins)

    n_sites = n_sites or max(4 * period, 2 * _k_top(target, period) + 2)
    sched = _assemble(family.patterns, durations, n_sites)
    return SynthesisResult(
        True,
        family,
        target,
        tuple(durations),
        sched,
        _certificate(family.patterns, durations, period, _k_top(target, period)),
    )


def result_from_schedule(sched: Schedule, target: TargetProfile) -> SynthesisResult:
    """Wrap a hand-built periodic chain schedule so it can be verified like a synthesis."""
    period = chain_period(sched)
    patterns = tuple(str(s.config)[:period] for s in sched.steps)
    durations = tuple(s.duration for s in sched.steps)
    family = PatternFamily(period, patterns)
    cert = _certificate(patterns, durations, period, _k_top(target, period))
    ok = all(cert[j][k] == want for j in cert for k, want in target.required().items())
    return SynthesisResult(
        ok, family, target, durations, sched, cert, "" if ok else "schedule misses the target"
    )


@dataclass
class VerificationReport:
    lattice: Lattice
    pairs_checked: int
    residual_ratio: float


def verify(
    result: SynthesisResult,
    lattice: Lattice,
    geom: MoleculeGeometry,
    k_max: int = DEFAULT_KMAX,
    tol: float = 1e-6,
) -> VerificationReport:
    """Recompute the schedule on ``lattice`` and check every pair against the certificate.

    The step patterns and durations are read back from ``result.schedule``,
    so an edited schedule is caught even if the certificate is untouched.
    """
    if not result.feasible or result.schedule is None:
        raise SynthesisError("cannot verify an infeasible result")
    period = result.family.period
    steps = tuple(
        Step(tiled_config(lattice, str(s.config)[:period]), s.duration) for s in result.schedule.steps
    )
    sched = Schedule(lattice, steps)
    coupling = net_coupling(sched)

    mismatches = []
    for j, row in result.certificate.items():
        for k, want in result.target.required().items():
            if row[k] != want:
                mismatches.append((k, want, row[k], j))
    checked = 0
    for p, q in lattice.pairs():
        k = q - p
        row = result.certificate[p % period]
        if k not in row:
            continue
        checked += 1
        actual = coupling[p, q]
        if actual != row[k]:
            mismatches.append((k, row[k], actual, p))
    if mismatches:
        mismatches.sort(key=lambda m: (m[0], m[3]))
        raise VerificationError(mismatches)
    return VerificationReport(lattice, checked, residual_ratio(sched, geom, k_max, tol))


def family_from_spec(spec: dict) -> PatternFamily:
    kind = spec.get("kind", "window")
    period = int(spec["period"])
    if kind == "window":
        return window_family(period)
    if kind == "enum":
        return enumerated_family(period, bool(spec.get("neutral", False)))
    raise SynthesisError(f"unknown family kind {kind!r}")


def load_target(text: str) -> tuple[TargetProfile, PatternFamily]:
    """Parse ``{"nearest": "1", "cancel": [...], "family": {"kind": ..., "period": P}}``."""
    try:
        doc = json.loads(text)
        target = TargetProfile(Fraction(str(doc.get("nearest", "1"))), doc.get("cancel", []))
        family = family_from_spec(doc["family"])
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise SynthesisError(f"bad target document: {exc}") from None
    return target, family
