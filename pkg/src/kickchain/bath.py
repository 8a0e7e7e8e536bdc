"""Classical kick baths: per-spin, per-period (strength, delay) pairs on the torus.

A kick train is a sequence of points (lam, phi) on T^2 = [0, 2pi)^2, where
``lam`` is the kick strength (periodic for the quantum dynamics) and ``phi``
the angular delay within one kick period.  Four classical processes move the
point between periods: stationary (frozen), drift (irrational rotation),
microcanonical (fresh uniform draw), and markovian (Brownian steps).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# spawn key 0 is reserved for auxiliary draws (e.g. random initial spin
# states); spins use their 1-based index, so schedules extend without
# perturbing existing spins.
AUX_STREAM_KEY = 0


class BathKind(str, enum.Enum):
    STATIONARY = "stationary"
    DRIFT = "drift"
    MICROCANONICAL = "microcanonical"
    MARKOVIAN = "markovian"


def wrap_angle(x):
    """Reduce an angle (scalar or array) into [0, 2pi)."""
    return np.mod(x, TWO_PI)


@dataclass(frozen=True)
class TorusPoint:
    """One kick's parameters: strength ``lam`` and angular delay ``phi``.

    Both coordinates are reduced mod 2pi on construction.
    """

    lam: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "lam", float(np.mod(self.lam, TWO_PI)))
        object.__setattr__(self, "phi", float(np.mod(self.phi, TWO_PI)))


@dataclass(frozen=True)
class BathSpec:
    """Parameters of the classical process generating the kick trains.

    ``d0`` is the side of the uniform box (anchored at ``lambda_star``,
    ``phi_star``) the first kicks are drawn from; ``d0_lambda_only``
    restricts that dispersion to the strength coordinate.  ``drift_a`` and
    ``drift_b`` divide 2pi to give the per-period drift increments of lam
    and phi; ``sigma`` is the per-coordinate variance of one Brownian step.
    """

    kind: BathKind
    lambda_star: float = 2.0
    phi_star: float = 1.0
    d0: float = 0.0
    d0_lambda_only: bool = False
    drift_a: float = math.sqrt(2.0)
    drift_b: float = math.sqrt(3.0)
    sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", BathKind(self.kind))
        if not 0.0 <= self.d0 <= TWO_PI:
            raise ValueError(f"d0 must lie in [0, 2pi], got {self.d0}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.drift_a == 0.0 or self.drift_b == 0.0:
            raise ValueError("drift divisors must be nonzero")

    def spin_rng(self, spin: int) -> np.random.Generator:
        """Independent substream for one spin (1-based index)."""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(spin,))
        return np.random.default_rng(seq)

    def aux_rng(self) -> np.random.Generator:
        """Substream for auxiliary draws, disjoint from every spin's."""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(AUX_STREAM_KEY,))
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class KickSchedule:
    """Kick parameters for every spin and period: arrays of shape (N, K)."""

    lam: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        lam = np.ascontiguousarray(self.lam, dtype=float)
        phi = np.ascontiguousarray(self.phi, dtype=float)
        if lam.shape != phi.shape or lam.ndim != 2:
            raise ValueError("lam and phi must be equal-shape (N, K) arrays")
        lam.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "phi", phi)

    @property
    def n_spins(self) -> int:
        return self.lam.shape[0]

    @property
    def n_periods(self) -> int:
        return self.lam.shape[1]

    def point(self, spin: int, period: int) -> TorusPoint:
        """Entry for a 1-based spin index and 0-based period index."""
        return TorusPoint(self.lam[spin - 1, period], self.phi[spin - 1, period])


def _initial_point(spec: BathSpec, u_lam: float, u_phi: float) -> tuple[float, float]:
    # u * d0 is exactly 0.0 at d0 = 0, so degenerate boxes stay on the anchor
    lam = spec.lambda_star + u_lam * spec.d0
    phi_side = 0.0 if spec.d0_lambda_only else spec.d0
    phi = spec.phi_star + u_phi * phi_side
    return float(wrap_angle(lam)), float(wrap_angle(phi))


def sample_initial(spec: BathSpec, n_spins: int, rng: np.random.Generator) -> list[TorusPoint]:
    """Draw the first kick of each spin uniformly from the dispersion box."""
    points = []
    for _ in range(n_spins):
        u = rng.random(2)
        lam, phi = _initial_point(spec, u[0], u[1])
        points.append(TorusPoint(lam, phi))
    return points


def step(point: TorusPoint, spec: BathSpec, rng: np.random.Generator) -> TorusPoint:
    """Advance one kick train by one period under the bath's classical flow."""
    kind = spec.kind
    if kind is BathKind.STATIONARY:
        return point
    if kind is BathKind.DRIFT:
        return TorusPoint(point.lam + TWO_PI / spec.drift_a,
                          point.phi + TWO_PI / spec.drift_b)
    if kind is BathKind.MICROCANONICAL:
        u = rng.random(2)
        return TorusPoint(TWO_PI * u[0], TWO_PI * u[1])
    if kind is BathKind.MARKOVIAN:
        g = rng.standard_normal(2)
        s = math.sqrt(spec.sigma)
        return TorusPoint(point.lam + s * g[0], point.phi + s * g[1])
    raise ValueError(f"unknown bath kind {kind!r}")


def generate_schedule(spec: BathSpec, n_spins: int, n_periods: int) -> KickSchedule:
    """Generate the full (N, K) kick schedule for a bath.

    Each spin draws from its own seeded substream, so enlarging the chain
    never perturbs the trains of spins already present.
    """
    if n_spins < 1 or n_periods < 1:
        raise ValueError("need n_spins >= 1 and n_periods >= 1")
    lam = np.empty((n_spins, n_periods))
    phi = np.empty((n_spins, n_periods))
    for n in range(1, n_spins + 1):
        rng = spec.spin_rng(n)
        pts = sample_initial(spec, 1, rng)
        point = pts[0]
        lam[n - 1, 0], phi[n - 1, 0] = point.lam, point.phi
        for i in range(1, n_periods):
            point = step(point, spec, rng)
            lam[n - 1, i], phi[n - 1, i] = point.lam, point.phi
    return KickSchedule(lam, phi)


SCHEDULE_HEADER = ["spin", "period", "lambda", "phi"]


def write_schedule_csv(path, schedule: KickSchedule) -> None:
    """Export a schedule as CSV rows ``spin,period,lambda,phi`` (radians)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCHEDULE_HEADER)
        for n in range(schedule.n_spins):
            for i in range(schedule.n_periods):
                writer.writerow([n + 1, i,
                                 format(schedule.lam[n, i], ".17g"),
                                 format(schedule.phi[n, i], ".17g")])


def read_schedule_csv(path) -> KickSchedule:
    """Read a schedule written by :func:`write_schedule_csv`."""
    entries: dict[tuple[int, int], tuple[float, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != SCHEDULE_HEADER:
            raise ValueError(f"bad schedule header {header!r}, expected {SCHEDULE_HEADER}")
        for row in reader:
            if not row:
                continue
            spin, period = int(row[0]), int(row[1])
            entries[(spin, period)] = (float(row[2]), float(row[3]))
    if not entries:
        raise ValueError(f"schedule file {path} contains no entries")
    n_spins = max(s for s, _ in entries)
    n_periods = max(i for _, i in entries) + 1
    lam = np.empty((n_spins, n_periods))
    phi = np.empty((n_spins, n_periods))
    try:
        for n in range(1, n_spins + 1):
            for i in range(n_periods):
                lam[n - 1, i], phi[n - 1, i] = entries[(n, i)]
    except KeyError as exc:
        raise ValueError(f"schedule file {path} is missing entry {exc}") from None
    return KickSchedule(wrap_angle(lam), wrap_angle(phi))
