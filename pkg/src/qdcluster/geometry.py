"""Coulomb coupling strengths between double-dot molecules.

Energies are dimensionless: the prefactor 2e^2/(4 pi eps) is set to one and
lengths are in the same (arbitrary) unit as the intra-molecule dot
separation ``a``.  Only ratios of couplings ever enter the schedule math.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterator, Mapping, Union

import numpy as np

DEFAULT_KMAX = 10_000


class GeometryError(ValueError):
    """Raised for non-physical distances or separations."""


class TruncationError(GeometryError):
    """Raised when the certified tail of a lattice sum exceeds the tolerance."""


@dataclass(frozen=True)
class MoleculeGeometry:
    a: float = 1.0
    b: float = 10.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise GeometryError(f"dot spacings must be positive, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class Lattice:
    """A chain ``shape=(n,)`` or a grid ``shape=(rows, cols)`` of molecules.

    Sites are numbered row-major; pair separations are in units of ``b``.
    """

    shape: tuple[int, ...]

    def __post_init__(self):
        if len(self.shape) not in (1, 2):
            raise GeometryError(f"lattice must be 1D or 2D, got shape {self.shape}")
        if len(self.shape) == 1 and self.shape[0] < 2:
            raise GeometryError("a chain needs at least 2 sites")
        if len(self.shape) == 2 and min(self.shape) < 2:
            raise GeometryError("a grid needs at least 2 rows and 2 columns")

    @classmethod
    def chain(cls, n: int) -> Lattice:
        return cls((int(n),))

    @classmethod
    def grid(cls, rows: int, cols: int) -> Lattice:
        return cls((int(rows), int(cols)))

    @property
    def is_chain(self) -> bool:
        return len(self.shape) == 1

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def coords(self, p: int) -> tuple[int, ...]:
        if self.is_chain:
            return (p,)
        return divmod(p, self.shape[1])

    def site(self, *coords: int) -> int:
        if self.is_chain:
            return coords[0]
        r, c = coords
        return r * self.shape[1] + c

    def offset(self, p: int, q: int) -> tuple[int, ...]:
        return tuple(y - x for x, y in zip(self.coords(p), self.coords(q)))

    def separation(self, p: int, q: int) -> float:
        """In-plane distance between sites ``p`` and ``q`` in units of b."""
        return math.hypot(*self.offset(p, q))

    def pairs(self) -> Iterator[tuple[int, int]]:
        return combinations(range(self.size), 2)

    def nearest_pairs(self) -> list[tuple[int, int]]:
        return [(p, q) for p, q in self.pairs() if sum(map(abs, self.offset(p, q))) == 1]

    def separation_matrix(self) -> np.ndarray:
        pts = np.array([self.coords(p) for p in range(self.size)], dtype=float)
        diff = pts[:, None, :] - pts[None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))

    def describe(self) -> str:
        if self.is_chain:
            return f"chain {self.shape[0]}"
        return f"grid {self.shape[0]} {self.shape[1]}"


def _check_distance(d):
    if np.any(np.asarray(d) <= 0):
        raise GeometryError(f"distance must be positive, got {d}")


def e_zero(geom: MoleculeGeometry, d):
    """Coupling of two neutral (1,1) molecules a distance ``d`` apart."""
    _check_distance(d)
    d = np.asarray(d, dtype=float)
    out = 2.0 / d + 2.0 / np.sqrt(geom.a**2 + d**2)
    return float(out) if out.ndim == 0 else out


def e_plus(geom: MoleculeGeometry, d):
    """Effective |SS> coupling 2/d - 2/sqrt(a^2+d^2).

    Evaluated in the cancellation-free form 2a^2 / (d s (s + d)) with
    s = sqrt(a^2 + d^2), which keeps full relative precision for d >> a.
    The negative branch (one molecule in (0,2), the other in (2,0)) is
    exactly ``-e_plus``.
    """
    _check_distance(d)
    d = np.asarray(d, dtype=float)
    s = np.sqrt(geom.a**2 + d**2)
    out = 2.0 * geom.a**2 / (d * s * (s + d))
    return float(out) if out.ndim == 0 else out


def e_minus(geom: MoleculeGeometry, d):
    return -e_plus(geom, d)


def relative_coupling(geom: MoleculeGeometry, sep):
    """e_plus at distance ``sep * b`` over e_plus at b; any positive ``sep``."""
    return e_plus(geom, np.asarray(sep, dtype=float) * geom.b) / e_plus(geom, geom.b)


def g(geom: MoleculeGeometry, k):
    """Coupling at separation ``k`` (in units of b) relative to the nearest neighbour."""
    if np.any(np.asarray(k) < 1):
        raise GeometryError(f"separation must be >= 1 lattice spacing, got {k}")
    return relative_coupling(geom, k)


def tail_bound(geom: MoleculeGeometry, k_max: int, weight_bound: float = 1.0) -> float:
    """Upper bound on sum_{k > k_max} weight_bound * g(k).

    Uses e_plus(d) <= a^2/d^3 and sum_{k>K} k^-3 <= 1/(2K^2).
    """
    c = geom.a**2 / (geom.b**3 * e_plus(geom, geom.b))
    return abs(weight_bound) * c / (2.0 * k_max**2)


Weights = Union[Mapping[int, Fraction], Callable[[int], Fraction]]


def residual_sum(
    geom: MoleculeGeometry,
    weights: Weights,
    k_max: int = DEFAULT_KMAX,
    tol: float = 1e-6,
    weight_bound: float | None = None,
) -> float:
    """Sum of ``weights[k] * g(k)`` over k = 2..k_max with a certified tail.

    ``weights`` may be a mapping (missing k count as zero) or a callable.
    ``weight_bound`` bounds |weight| for k > k_max; by default the largest
    weight seen up to k_max is used, which is exact for periodic weights.
    """
    if tol <= 0:
        raise GeometryError("tol must be positive")
    if k_max < 2:
        raise GeometryError("k_max must be at least 2")
    ks = np.arange(2, k_max + 1)
    if callable(weights):
        w = np.array([float(weights(int(k))) for k in ks])
    else:
        w = np.array([float(weights.get(int(k), 0)) for k in ks])
    if weight_bound is None:
        weight_bound = float(np.max(np.abs(w))) if w.size else 0.0
    bound = tail_bound(geom, k_max, weight_bound)
    if bound >= tol:
        raise TruncationError(
            f"tail bound {bound:.3g} at k_max={k_max} exceeds tol={tol:.3g}; increase k_max"
        )
    # smallest terms first
    terms = w * g(geom, ks)
    return float(np.sum(terms[::-1]))
