"""Stroboscopic evolution of the kicked chain.

One period of reduced time theta = w0*t covers [0, 2*pi).  Spin n receives
a single instantaneous kick of strength lambda_n at delay phi_n inside the
period, so the period operator is a sandwich of free-evolution segments and
single-site kick unitaries ordered by delay.  States are propagated period
by period; nothing here depends on how the (lambda, phi) rows were produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bath import TWO_PI, KickSchedule
from .chain import (ChainConfig, SpectralDecomp, apply_single_site,
                    build_kick_projector, build_static_hamiltonian,
                    diagonalize, free_evolution_apply, product_state)


@dataclass(frozen=True)
class PeriodKicks:
    """Kick strengths and delays for every spin during one period.

    ``order`` lists the spins (1-based) sorted by ascending delay, ties
    broken by ascending spin index; kicks on distinct sites commute, so the
    tie-break only pins down a reproducible convention.
    """

    lam: np.ndarray
    phi: np.ndarray
    order: np.ndarray = field(init=False)

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        if lam.shape != phi.shape or lam.ndim != 1:
            raise ValueError("lam and phi must be 1-d arrays of equal length")
        order = np.lexsort((np.arange(1, lam.shape[0] + 1), phi)) + 1
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "order", order)

    @property
    def n_spins(self) -> int:
        return self.lam.shape[0]

    def ordered_events(self) -> list[tuple[float, int, float]]:
        """(delay, spin, strength) triples in application order."""
        return [(float(self.phi[s - 1]), int(s), float(self.lam[s - 1]))
                for s in self.order]


@dataclass(frozen=True)
class Trajectory:
    """Chain states at stroboscopic times 0, 2*pi, ..., K*2*pi.

    ``states[k]`` is the state right after k full periods; states[0] is the
    initial product state.
    """

    config: ChainConfig
    schedule: KickSchedule
    states: np.ndarray

    @property
    def n_periods(self) -> int:
        return self.states.shape[0] - 1


def kick_unitary(lam: float, projector: np.ndarray) -> np.ndarray:
    """exp(-i lam |w><w|) = I + (e^{-i lam} - 1) |w><w| for a projector."""
    return np.eye(2, dtype=complex) + (np.exp(-1j * lam) - 1.0) * projector


def apply_monodromy(state: np.ndarray, kicks: PeriodKicks,
                    decomp: SpectralDecomp, projector: np.ndarray) -> np.ndarray:
    """Advance a state through one full period of the kicked evolution.

    Free evolution runs to the earliest kick delay, then from kick to kick
    in delay order, and finally from the last kick to the end of the
    period.  Zero-length free segments (simultaneous kicks) are skipped.
    """
    n = int(round(np.log2(state.shape[0])))
    if kicks.n_spins != n:
        raise ValueError(
            f"period has {kicks.n_spins} kicks but state holds {n} spins")
    psi = state
    theta = 0.0
    for delay, spin, lam in kicks.ordered_events():
        if delay - theta > 0.0:
            psi = free_evolution_apply(decomp, delay - theta, psi)
            theta = delay
        psi = apply_single_site(kick_unitary(lam, projector), spin, n, psi)
    if TWO_PI - theta > 0.0:
        psi = free_evolution_apply(decomp, TWO_PI - theta, psi)
    return psi


def iter_trajectory(config: ChainConfig, schedule: KickSchedule):
    """Yield (period, state) pairs starting with (0, initial state).

    Memory stays at one 2^N vector regardless of the period count, which
    is what the long observable-only sweeps rely on.
    """
    if schedule.n_spins != config.n_spins:
        raise ValueError(
            f"schedule covers {schedule.n_spins} spins, chain has {config.n_spins}")
    decomp = diagonalize(build_static_hamiltonian(config))
    projector = build_kick_projector(config)
    psi = product_state(config.spin_states())
    yield 0, psi
    for k in range(schedule.n_periods):
        kicks = PeriodKicks(schedule.lam[:, k], schedule.phi[:, k])
        psi = apply_monodromy(psi, kicks, decomp, projector)
        yield k + 1, psi


def evolve(config: ChainConfig, schedule: KickSchedule) -> Trajectory:
    """Propagate the chain through the whole schedule, keeping every state."""
    states = np.empty((schedule.n_periods + 1, config.dim), dtype=complex)
    for k, psi in iter_trajectory(config, schedule):
        states[k] = psi
    states.setflags(write=False)
    return Trajectory(config=config, schedule=schedule, states=states)
