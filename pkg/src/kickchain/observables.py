"""Single-spin reductions, entropies, Husimi maps, and their CSV forms.

Density matrices are trace-1 throughout.  Entropies are von Neumann in
bits (log base 2).  The Husimi map of a single-spin state rho is its
expectation in the spin coherent state

    |theta, phi> = cos(theta/2) |up> + e^{i phi} sin(theta/2) |down>,

which for a 2x2 rho collapses to the closed form

    H(theta, phi) = 1/2 + cos(theta) (rho_00 - rho_11) / 2
                  + sin(theta) Re(rho_01 e^{i phi}),

so a maximally mixed spin maps to a uniform 1/2 with no quadrature error.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

EIG_CLAMP = 1e-14
EIG_TOL = 1e-10

SPINS_HEADER = ["period", "spin", "pop_up", "coherence", "entropy_spin"]
CHAIN_HEADER = ["period", "S_tot", "pop_avg", "coh_avg"]


def reduce(state: np.ndarray, site: int, n_spins: int | None = None) -> np.ndarray:
    """Reduced 2x2 density matrix of one spin (1-based) of a pure chain state."""
    dim = state.shape[0]
    if n_spins is None:
        n_spins = int(round(math.log2(dim)))
    if 2 ** n_spins != dim:
        raise ValueError(f"state of length {dim} is not a chain of {n_spins} spins")
    if not 1 <= site <= n_spins:
        raise ValueError(f"site {site} out of range 1..{n_spins}")
    cube = state.reshape(2 ** (site - 1), 2, 2 ** (n_spins - site))
    return np.einsum("asb,atb->st", cube, cube.conj())


def average_spin(rhos) -> np.ndarray:
    """Arithmetic mean of single-spin density matrices."""
    rhos = list(rhos)
    if not rhos:
        raise ValueError("cannot average zero density matrices")
    total = np.zeros((2, 2), dtype=complex)
    for rho in rhos:
        total += rho
    return total / len(rhos)


def vn_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy in bits; tiny negative eigenvalues are clamped."""
    p = np.linalg.eigvalsh(rho)
    if np.any(p < -EIG_TOL):
        raise ValueError(f"density matrix has eigenvalue {p.min():.3e} < 0")
    p = np.where(p < EIG_CLAMP, 0.0, p)
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def chain_entropy(state: np.ndarray, n_spins: int | None = None) -> float:
    """Entropy of the averaged single-spin density matrix of a chain state."""
    if n_spins is None:
        n_spins = int(round(math.log2(state.shape[0])))
    rhos = [reduce(state, site, n_spins) for site in range(1, n_spins + 1)]
    return vn_entropy(average_spin(rhos))


def population_up(rho: np.ndarray) -> float:
    return float(rho[0, 0].real)


def coherence(rho: np.ndarray) -> float:
    """Magnitude of the up/down off-diagonal element; at most 1/2."""
    return float(abs(rho[0, 1]))


@dataclass(frozen=True)
class ObservableRecord:
    """Per-period observables of one trajectory.

    Per-spin arrays have shape (K + 1, N); chain arrays have shape (K + 1,).
    Row k belongs to the state after k periods.
    """

    periods: np.ndarray
    pop_up: np.ndarray
    coherence: np.ndarray
    entropy: np.ndarray
    s_tot: np.ndarray
    pop_avg: np.ndarray
    coh_avg: np.ndarray

    @property
    def n_spins(self) -> int:
        return self.pop_up.shape[1]

    @classmethod
    def from_states(cls, pairs, n_spins: int) -> "ObservableRecord":
        """Collect observables from an iterable of (period, state) pairs.

        Works with the streaming trajectory iterator, so full trajectories
        never need to be held in memory.
        """
        periods, pops, cohs, ents = [], [], [], []
        s_tot, pop_avg, coh_avg = [], [], []
        for period, state in pairs:
            periods.append(period)
            rhos = [reduce(state, site, n_spins)
                    for site in range(1, n_spins + 1)]
            row_p = [population_up(rho) for rho in rhos]
            row_c = [coherence(rho) for rho in rhos]
            row_e = [vn_entropy(rho) for rho in rhos]
            rho_tot = average_spin(rhos)
            pops.append(row_p)
            cohs.append(row_c)
            ents.append(row_e)
            s_tot.append(vn_entropy(rho_tot))
            pop_avg.append(population_up(rho_tot))
            coh_avg.append(coherence(rho_tot))
        return cls(periods=np.array(periods, dtype=int),
                   pop_up=np.array(pops), coherence=np.array(cohs),
                   entropy=np.array(ents), s_tot=np.array(s_tot),
                   pop_avg=np.array(pop_avg), coh_avg=np.array(coh_avg))


def write_spins_csv(path, record: ObservableRecord) -> None:
    """One row per (period, spin): populations, coherences, spin entropies."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SPINS_HEADER)
        for i, period in enumerate(record.periods):
            for spin in range(1, record.n_spins + 1):
                writer.writerow([int(period), spin,
                                 f"{record.pop_up[i, spin - 1]:.17g}",
                                 f"{record.coherence[i, spin - 1]:.17g}",
                                 f"{record.entropy[i, spin - 1]:.17g}"])


def write_chain_csv(path, record: ObservableRecord) -> None:
    """One row per period: chain entropy plus averaged-spin observables."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CHAIN_HEADER)
        for i, period in enumerate(record.periods):
            writer.writerow([int(period), f"{record.s_tot[i]:.17g}",
                             f"{record.pop_avg[i]:.17g}",
                             f"{record.coh_avg[i]:.17g}"])


def _read_table(path, header: list[str]) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != header:
        raise ValueError(f"{path}: expected header {header}, got {rows[:1]}")
    cols = {name: [] for name in header}
    for row in rows[1:]:
        if len(row) != len(header):
            raise ValueError(f"{path}: malformed row {row}")
        for name, cell in zip(header, row):
            cols[name].append(float(cell))
    return {name: np.array(vals) for name, vals in cols.items()}


def read_spins_csv(path) -> dict[str, np.ndarray]:
    return _read_table(path, SPINS_HEADER)


def read_chain_csv(path) -> dict[str, np.ndarray]:
    return _read_table(path, CHAIN_HEADER)


@dataclass(frozen=True)
class HusimiGrid:
    """Husimi values on a regular (theta, phi) grid for one spin and period.

    theta runs over [0, pi] inclusive, phi over [0, 2*pi) without the
    duplicate endpoint; values[i, j] = H(theta[i], phi[j]).
    """

    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    spin: int = 0
    period: int = 0

    @property
    def theta_res(self) -> int:
        return self.theta.shape[0]

    @property
    def phi_res(self) -> int:
        return self.phi.shape[0]

    def disk_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Azimuthal projection x = theta cos(phi), y = theta sin(phi).

        The north pole |up> sits at the origin and |down> maps to the rim
        circle of radius pi.
        """
        return (self.theta[:, None] * np.cos(self.phi)[None, :],
                self.theta[:, None] * np.sin(self.phi)[None, :])


def husimi(rho: np.ndarray, theta_res: int = 200, phi_res: int = 200,
           spin: int = 0, period: int = 0) -> HusimiGrid:
    """Husimi map of a single-spin density matrix on a regular grid."""
    if theta_res < 2 or phi_res < 2:
        raise ValueError("need at least 2 grid points per axis")
    theta = np.linspace(0.0, np.pi, theta_res)
    phi = np.linspace(0.0, 2.0 * np.pi, phi_res, endpoint=False)
    pol = (rho[0, 0] - rho[1, 1]).real / 2.0
    values = (0.5 + np.cos(theta)[:, None] * pol
              + np.sin(theta)[:, None]
              * np.real(rho[0, 1] * np.exp(1j * phi))[None, :])
    return HusimiGrid(theta=theta, phi=phi, values=values,
                      spin=spin, period=period)


def husimi_norm(grid: HusimiGrid) -> float:
    """(1 / 2 pi) * integral of H sin(theta) dtheta dphi; 1 for trace-1 rho.

    Simpson in theta; the phi sum is a plain Riemann sum, which is
    spectrally accurate on the periodic axis.
    """
    integrand = grid.values * np.sin(grid.theta)[:, None]
    per_phi = simpson(integrand, x=grid.theta, axis=0)
    dphi = 2.0 * np.pi / grid.phi_res
    return float(per_phi.sum() * dphi / (2.0 * np.pi))


def write_husimi_csv(path, grid: HusimiGrid) -> None:
    """JSON metadata line, then one CSV row of phi values per theta."""
    meta = {"theta_res": grid.theta_res, "phi_res": grid.phi_res,
            "spin": int(grid.spin), "period": int(grid.period)}
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(meta) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in grid.values:
            writer.writerow([f"{v:.17g}" for v in row])


def read_husimi_csv(path) -> HusimiGrid:
    with open(path, newline="") as fh:
        meta = json.loads(fh.readline())
        rows = [[float(c) for c in row] for row in csv.reader(fh)]
    values = np.array(rows)
    expected = (meta["theta_res"], meta["phi_res"])
    if values.shape != expected:
        raise ValueError(f"{path}: value grid {values.shape}, header says {expected}")
    theta = np.linspace(0.0, np.pi, meta["theta_res"])
    phi = np.linspace(0.0, 2.0 * np.pi, meta["phi_res"], endpoint=False)
    return HusimiGrid(theta=theta, phi=phi, values=values,
                      spin=int(meta["spin"]), period=int(meta["period"]))
