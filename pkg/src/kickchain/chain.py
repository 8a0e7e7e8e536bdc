"""Spin-chain Hamiltonians and 2^N Hilbert-space machinery.

Conventions used throughout the package:

* basis states are tensor products of {|up>, |down>} with **spin 1 as the
  most significant factor**, i.e. basis index b has bit (N - n) equal to the
  state of spin n (0 = up, 1 = down); |up...up> is index 0;
* hbar = 1 and every energy is divided by hbar*w0 (w0 = kick frequency of
  the primary train), so evolution phases are functions of the reduced time
  theta = w0*t and the only physical knobs are the ratios w1/w0 and J/w0;
* spin operators are S_i = sigma_i / 2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
ID2 = np.eye(2)

UP = np.array([1.0, 0.0], dtype=complex)
DOWN = np.array([0.0, 1.0], dtype=complex)

CAT_STATE = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))


class Coupling(str, enum.Enum):
    HEISENBERG = "heisenberg"
    ISING_Z = "ising_z"
    ISING_X = "ising_x"
    NONE = "none"


@dataclass(frozen=True)
class ChainConfig:
    """Static description of the chain and its kick direction.

    ``initial_states`` holds one (alpha, beta) amplitude pair per spin in
    the |up>, |down> basis; None means every spin starts in the balanced
    superposition.  With ``kick_offset_pi4`` the kick direction is
    (cos(pi/4 - theta), sin(pi/4 - theta)) instead of (cos theta, sin theta).
    """

    n_spins: int
    coupling: Coupling = Coupling.HEISENBERG
    j_over_w0: float = 1.0
    w1_over_w0: float = 1.0
    kick_theta: float = math.pi / 4.0
    kick_offset_pi4: bool = False
    initial_states: tuple[tuple[complex, complex], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "coupling", Coupling(self.coupling))
        if self.n_spins < 2:
            raise ValueError(f"chain needs at least 2 spins, got {self.n_spins}")
        if self.initial_states is not None:
            states = tuple((complex(a), complex(b)) for a, b in self.initial_states)
            if len(states) != self.n_spins:
                raise ValueError(
                    f"got {len(states)} initial states for {self.n_spins} spins")
            for a, b in states:
                norm2 = abs(a) ** 2 + abs(b) ** 2
                if abs(norm2 - 1.0) > 1e-12:
                    raise ValueError(f"initial state ({a}, {b}) is not normalized")
            object.__setattr__(self, "initial_states", states)

    @property
    def dim(self) -> int:
        return 2 ** self.n_spins

    def spin_states(self) -> tuple[tuple[complex, complex], ...]:
        if self.initial_states is not None:
            return self.initial_states
        return tuple(CAT_STATE for _ in range(self.n_spins))


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigendecomposition H = V diag(eigenvalues) V^dagger, ascending order.

    ``adjoint`` is V^dagger, precomputed once because free-evolution
    segments apply it thousands of times per trajectory.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    adjoint: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "adjoint", np.ascontiguousarray(self.eigenvectors.conj().T))

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def build_static_hamiltonian(config: ChainConfig) -> np.ndarray:
    """Zeeman terms plus nearest-neighbor couplings, in units of hbar*w0.

    The Zeeman term puts w1/(2*w0) on |down> at every site; each of the
    N - 1 bonds contributes -J/w0 times the product of S operators of the
    chosen coupling.
    """
    n = config.n_spins
    dim = 2 ** n
    h = np.zeros((dim, dim))

    zeeman = 0.5 * config.w1_over_w0 * np.array([[0.0, 0.0], [0.0, 1.0]])
    for site in range(1, n + 1):
        h += embed_single_site(zeeman, site, n).real

    if config.coupling is Coupling.HEISENBERG:
        pair_terms = [SIGMA_X, SIGMA_Y, SIGMA_Z]
    elif config.coupling is Coupling.ISING_Z:
        pair_terms = [SIGMA_Z]
    elif config.coupling is Coupling.ISING_X:
        pair_terms = [SIGMA_X]
    elif config.coupling is Coupling.NONE:
        pair_terms = []
    else:
        raise ValueError(f"unknown coupling {config.coupling!r}")

    # S (x) S = (sigma/2) (x) (sigma/2); sigma_y (x) sigma_y is real
    prefactor = -config.j_over_w0 / 4.0
    for bond in range(1, n):
        left = 2 ** (bond - 1)
        right = 2 ** (n - bond - 1)
        for sigma in pair_terms:
            pair = np.kron(sigma, sigma).real
            h += prefactor * np.kron(np.kron(np.eye(left), pair), np.eye(right))
    return h


def build_kick_projector(config: ChainConfig) -> np.ndarray:
    """Rank-one projector |w><w| onto the kick direction (2x2, complex)."""
    angle = (math.pi / 4.0 - config.kick_theta) if config.kick_offset_pi4 \
        else config.kick_theta
    w = np.array([math.cos(angle), math.sin(angle)], dtype=complex)
    return np.outer(w, w.conj())


def embed_single_site(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    """Tensor a 2x2 operator at one site (1-based) with identities elsewhere."""
    if not 1 <= site <= n_spins:
        raise ValueError(f"site {site} out of range 1..{n_spins}")
    left = 2 ** (site - 1)
    right = 2 ** (n_spins - site)
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def apply_single_site(op: np.ndarray, site: int, n_spins: int,
                      state: np.ndarray) -> np.ndarray:
    """Apply a 2x2 operator at one site to a 2^N state by a strided sweep."""
    if not 1 <= site <= n_spins:
        raise ValueError(f"site {site} out of range 1..{n_spins}")
    left = 2 ** (site - 1)
    right = 2 ** (n_spins - site)
    cube = state.reshape(left, 2, right)
    out = np.einsum("st,atb->asb", op, cube)
    return out.reshape(state.shape[0])


def diagonalize(h: np.ndarray) -> SpectralDecomp:
    """Spectral decomposition of a Hermitian operator, eigenvalues ascending."""
    dev = np.max(np.abs(h - h.conj().T))
    if dev > 1e-12:
        raise ValueError(f"operator is not Hermitian (max deviation {dev:.3e})")
    if np.iscomplexobj(h) and np.max(np.abs(h.imag)) == 0.0:
        h = h.real
    eigenvalues, vectors = np.linalg.eigh(h)
    return SpectralDecomp(eigenvalues, vectors.astype(complex))


def free_evolution_apply(decomp: SpectralDecomp, delta_theta: float,
                         state: np.ndarray) -> np.ndarray:
    """Evolve a state for a reduced-time interval under the static chain.

    Returns V exp(-i Lambda delta_theta) V^dagger |state>.
    """
    phases = np.exp(-1j * decomp.eigenvalues * delta_theta)
    return decomp.eigenvectors @ (phases * (decomp.adjoint @ state))


def product_state(spin_states) -> np.ndarray:
    """Tensor product of per-spin (alpha, beta) pairs, spin 1 most significant."""
    psi = np.array([1.0 + 0.0j])
    for a, b in spin_states:
        psi = np.kron(psi, np.array([a, b], dtype=complex))
    return psi
