"""Slow, independently structured re-implementation of one period.

Cross-check oracle for the production propagator: the period is described
as a flat timeline of kick events inside [0, 2*pi), and kicks are applied
as fully materialized 2^N x 2^N matrices built with Kronecker products.
This module shares only the chain primitives with propagator.py (no
sequencing code), so a sequencing bug cannot cancel between the two.
Test-time only; never used in production runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import TWO_PI
from .chain import SpectralDecomp, embed_single_site, free_evolution_apply


@dataclass(frozen=True)
class TimelineEvent:
    time: float
    site: int
    strength: float


@dataclass(frozen=True)
class EventTimeline:
    """Kick events of one period, sorted by time, each site exactly once."""

    events: tuple[TimelineEvent, ...]

    def __post_init__(self):
        times = [e.time for e in self.events]
        if any(t2 < t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError("timeline events out of order")
        if any(not 0.0 <= t < TWO_PI for t in times):
            raise ValueError("event times must lie in [0, 2*pi)")
        sites = sorted(e.site for e in self.events)
        if sites != list(range(1, len(self.events) + 1)):
            raise ValueError(f"sites {sites} are not 1..N exactly once")

    @classmethod
    def from_rows(cls, lam, phi) -> "EventTimeline":
        """Build a sorted timeline from one schedule column."""
        lam = np.asarray(lam, dtype=float)
        phi = np.asarray(phi, dtype=float)
        events = [TimelineEvent(time=float(phi[i]), site=i + 1,
                                strength=float(lam[i]))
                  for i in range(lam.shape[0])]
        events.sort(key=lambda e: (e.time, e.site))
        return cls(events=tuple(events))

    @property
    def n_sites(self) -> int:
        return len(self.events)


def kick_matrix(strength: float, site: int, n_spins: int,
                projector: np.ndarray) -> np.ndarray:
    """Full-dimension kick unitary, deliberately built the naive way."""
    small = np.eye(2, dtype=complex) + (np.exp(-1j * strength) - 1.0) * projector
    return embed_single_site(small, site, n_spins)


def oracle_period(state: np.ndarray, timeline: EventTimeline,
                  decomp: SpectralDecomp, projector: np.ndarray) -> np.ndarray:
    """One period of evolution by walking the event timeline."""
    n_spins = int(round(math.log2(state.shape[0])))
    if timeline.n_sites != n_spins:
        raise ValueError(
            f"timeline has {timeline.n_sites} sites, state holds {n_spins} spins")
    psi = np.asarray(state, dtype=complex)
    now = 0.0
    for event in timeline.events:
        if event.time > now:
            psi = free_evolution_apply(decomp, event.time - now, psi)
            now = event.time
        psi = kick_matrix(event.strength, event.site, n_spins,
                          projector) @ psi
    if TWO_PI > now:
        psi = free_evolution_apply(decomp, TWO_PI - now, psi)
    return psi
