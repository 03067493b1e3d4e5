"""Exact state-vector evolution under commuting Ising couplings.

Qubit p is bit p of the basis index; bit value 1 is the singlet |S>, 0 the
triplet |T0>.  Every coupling acts only on the |SS> component of its pair, so
an entire schedule is one diagonal phase exp(i sum_{p<q} theta_pq z_p z_q).
The time unit t0 is fixed by E+(a, b) t0 / hbar = pi, which makes a net
coefficient of 1 on a nearest pair exactly a controlled-Z.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import kernels
from .geometry import Lattice, MoleculeGeometry
from .schedule import CouplingMatrix, Schedule, net_coupling

N_MAX = 20
ANALYTIC_DENSE_MAX = 30


class SimulationError(ValueError):
    pass


@dataclass
class QuantumState:
    amplitudes: np.ndarray

    @property
    def n(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> QuantumState:
        return QuantumState(self.amplitudes.copy())

    def dump(self) -> str:
        """Text amplitude table ``index, re, im``."""
        rows = ["index,re,im"]
        rows += [f"{i},{a.real:.17g},{a.imag:.17g}" for i, a in enumerate(self.amplitudes)]
        return "\n".join(rows) + "\n"


def _check_n(n: int):
    if not 1 <= n <= N_MAX:
        raise SimulationError(f"register size must be in 1..{N_MAX}, got {n}")


def initial_state(n: int) -> QuantumState:
    """Every qubit in (|S> + |T>)/sqrt(2)."""
    _check_n(n)
    return QuantumState(np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def phase_matrix(coupling: CouplingMatrix, geom: MoleculeGeometry, separations=None) -> np.ndarray:
    return coupling.phases(geom, separations)


def ideal_phase_matrix(lattice: Lattice) -> np.ndarray:
    """Phase pi on every nearest-neighbour bond and nothing else."""
    theta = np.zeros((lattice.size, lattice.size))
    for p, q in lattice.nearest_pairs():
        theta[p, q] = theta[q, p] = np.pi
    return theta


def evolve_phases(state: QuantumState, theta: np.ndarray) -> QuantumState:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (state.n, state.n):
        raise SimulationError(f"phase matrix {theta.shape} does not match {state.n} qubits")
    out = state.copy()
    kernels.apply_diagonal(out.amplitudes, theta)
    return out


def evolve(state: QuantumState, coupling: CouplingMatrix, geom: MoleculeGeometry) -> QuantumState:
    """Apply the net diagonal evolution of ``coupling``; global phases are dropped."""
    if coupling.lattice.size != state.n:
        raise SimulationError(
            f"coupling is on {coupling.lattice.size} sites, state has {state.n} qubits"
        )
    return evolve_phases(state, coupling.phases(geom))


def cluster_state(lattice: Lattice) -> QuantumState:
    """Graph state of the lattice, built from edge parities rather than phases."""
    n = lattice.size
    _check_n(n)
    z = np.arange(1 << n)
    parity = np.zeros(1 << n, dtype=np.int64)
    for p, q in lattice.nearest_pairs():
        parity ^= (z >> p) & (z >> q) & 1
    amps = np.where(parity == 1, -1.0, 1.0) * 2.0 ** (-n / 2)
    return QuantumState(amps.astype(np.complex128))


def fidelity(psi: QuantumState, phi: QuantumState) -> float:
    if psi.amplitudes.shape != phi.amplitudes.shape:
        raise SimulationError("states have different dimensions")
    return float(abs(np.vdot(phi.amplitudes, psi.amplitudes)) ** 2)


def schedule_fidelity(sched: Schedule, geom: MoleculeGeometry) -> float:
    """Fidelity of the schedule's output with the ideal cluster state."""
    psi = evolve(initial_state(sched.lattice.size), net_coupling(sched), geom)
    return fidelity(psi, cluster_state(sched.lattice))


# ------------------------------------------------------------ analytic oracle


def _bandwidth(delta: np.ndarray) -> int:
    p, q = np.nonzero(delta)
    return int(np.max(np.abs(p - q))) if p.size else 0


def _dense_overlap(delta: np.ndarray) -> complex:
    """sum_z exp(i z.delta.z) via a low/high bit split and one matrix product."""
    n = delta.shape[0]
    lo = n // 2
    hi = n - lo
    up = np.triu(delta, 1)

    def bits(count):
        z = np.arange(1 << count)
        return ((z[:, None] >> np.arange(count)[None, :]) & 1).astype(float)

    bl = bits(lo)
    bh = bits(hi)
    q_lo = np.einsum("zi,ij,zj->z", bl, up[:lo, :lo], bl)
    q_hi = np.einsum("zi,ij,zj->z", bh, up[lo:, lo:], bh)
    cross = bl @ up[:lo, lo:] @ bh.T
    total = 0j
    # one low-half block at a time keeps memory at 2^hi
    for i in range(1 << lo):
        total += np.exp(1j * (q_lo[i] + q_hi + cross[i])).sum()
    return total


def _transfer_overlap(delta: np.ndarray, width: int) -> complex:
    """Same sum for a banded matrix, sweeping a 2^width window along the sites."""
    n = delta.shape[0]
    # vec[s]: partial sum for the last sites in the window; bit t of s is the t-th oldest
    vec = np.ones(1, dtype=complex)
    for site in range(n):
        prev = min(site, width)
        window = np.arange(site - prev, site)
        z = np.arange(1 << prev)
        zb = (z[:, None] >> np.arange(prev)[None, :]) & 1
        field = zb @ delta[window, site] if prev else np.zeros(1)
        grown = np.concatenate([vec, vec * np.exp(1j * field)])  # new bit is the top bit
        if prev == width:
            # marginalise the oldest site (bit 0)
            grown = grown.reshape(-1, 2).sum(axis=1)
        vec = grown
    return complex(vec.sum())


def fidelity_analytic(delta: np.ndarray, band_limit: int = 16) -> float:
    """|2^-N sum_z exp(i sum_{p<q} delta_pq z_p z_q)|^2 without building any state.

    ``delta`` is the symmetric matrix of net minus ideal pair phases.  A
    banded residual (in site order) is summed with a transfer sweep, which
    also covers registers too large for the dense enumeration.
    """
    delta = np.asarray(delta, dtype=float)
    n = delta.shape[0]
    width = _bandwidth(delta)
    if width == 0:
        return 1.0
    if width <= band_limit and (n > ANALYTIC_DENSE_MAX or width < n - 1):
        total = _transfer_overlap(delta, width)
    elif n <= ANALYTIC_DENSE_MAX:
        total = _dense_overlap(delta)
    else:
        raise SimulationError(
            f"{n} qubits with residual bandwidth {width} is too large for exact summation"
        )
    return float(abs(total / 2.0**n) ** 2)


def residual_phases(sched: Schedule, geom: MoleculeGeometry, separations=None) -> np.ndarray:
    theta = net_coupling(sched).phases(geom, separations)
    return theta - ideal_phase_matrix(sched.lattice)


# ------------------------------------------------------------------ jitter


def separation_filter(ks: Iterable[float]) -> Callable[[Lattice, int, int], bool]:
    """Select pairs whose nominal separation (units of b) is in ``ks``."""
    wanted = [float(k) for k in ks]
    return lambda lat, p, q: any(abs(lat.separation(p, q) - k) < 1e-9 for k in wanted)


def jittered_separations(lattice: Lattice, jitter: float, seed, pair_filter=None) -> np.ndarray:
    """Pair distances scaled by (1 + eta), eta ~ U(-jitter, jitter), one draw per pair."""
    if jitter < 0:
        raise SimulationError("jitter must be non-negative")
    sep = lattice.separation_matrix()
    rng = np.random.default_rng(seed)
    pairs = list(lattice.pairs())
    eta = rng.uniform(-jitter, jitter, size=len(pairs))
    for (p, q), e in zip(pairs, eta):
        if pair_filter is None or pair_filter(lattice, p, q):
            sep[p, q] = sep[q, p] = sep[p, q] * (1.0 + e)
    return sep


def perturbed_run(
    sched: Schedule,
    geom: MoleculeGeometry,
    jitter: float,
    seed,
    pair_filter=None,
) -> float:
    """Cluster-state fidelity with randomly perturbed pair distances.

    Pairs with zero net coefficient pick up zero phase whatever their
    distance, so jitter confined to them leaves the result bit-identical.
    """
    sep = jittered_separations(sched.lattice, jitter, seed, pair_filter)
    coupling = net_coupling(sched)
    psi = evolve_phases(initial_state(sched.lattice.size), coupling.phases(geom, sep))
    return fidelity(psi, cluster_state(sched.lattice))
