"""Exact-diagonalization backends for spin-chain benchmarks.

Two models: the spin-1/2 XX chain with open boundaries, solved in the
zero-magnetization sector, and the transverse-field Ising model (TFIM)
with periodic boundaries, solved in the even-parity sector. Both are
projected onto their symmetry sector, densely diagonalized, and used
to evaluate filtering fidelities exactly in the eigenbasis (no
Trotterized time evolution is simulated here).

Basis convention: a computational state is an integer whose bit i
(least significant = site 0, the leftmost site) is 1 when site i is
spin-up. Sector bases list these integers in increasing order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .schedules import TimeSchedule

MAX_LENGTH = 16
# Dense-diagonalization guard; C(16,8) fits, full 2**16 does not.
MAX_SECTOR_DIM = 16384
# Eigenvalues within 1e-10 * max(1, ||H||_2) of the target count as the
# target manifold (degenerate weight must not be split silently).
TARGET_BAND_RTOL = 1e-10

_MODELS = ("xx", "tfim")
_SECTORS = ("zero_magnetization", "even_parity", "full")


@dataclass(frozen=True)
class HamiltonianSpec:
    """Model, size, couplings, and symmetry sector of a benchmark chain.

    The XX chain requires open boundary and supports the
    zero_magnetization (even length) and full sectors; the TFIM
    requires periodic boundary and supports even_parity and full.
    Omitted boundary/sector fall back to the model's native choice.
    """

    model: str
    length: int
    coupling: float = 1.0
    field: float = 0.0
    boundary: str = ""
    sector: str = ""

    def __post_init__(self):
        model = self.model.lower()
        if model not in _MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {_MODELS}")
        object.__setattr__(self, "model", model)
        if not 2 <= self.length <= MAX_LENGTH:
            raise ValueError(f"length must be in [2, {MAX_LENGTH}], got {self.length}")
        if not np.isfinite(self.coupling) or not np.isfinite(self.field):
            raise ValueError("coupling and field must be finite")
        native_boundary = "open" if model == "xx" else "periodic"
        boundary = (self.boundary or native_boundary).lower()
        if boundary != native_boundary:
            raise ValueError(f"{model} requires {native_boundary} boundary, got {boundary!r}")
        object.__setattr__(self, "boundary", boundary)
        native_sector = "zero_magnetization" if model == "xx" else "even_parity"
        sector = (self.sector or native_sector).lower()
        if sector == "auto":
            sector = native_sector
        if sector not in _SECTORS:
            raise ValueError(f"unknown sector {self.sector!r}; expected one of {_SECTORS}")
        if model == "xx" and sector == "even_parity":
            raise ValueError("the XX chain does not conserve parity; use zero_magnetization or full")
        if model == "tfim" and sector == "zero_magnetization":
            raise ValueError("the TFIM does not conserve magnetization; use even_parity or full")
        if sector == "zero_magnetization" and self.length % 2:
            raise ValueError("zero_magnetization sector requires even length")
        object.__setattr__(self, "sector", sector)


def _popcount(values: np.ndarray) -> np.ndarray:
    counts = np.zeros_like(values)
    v = values.copy()
    while np.any(v):
        counts += v & 1
        v >>= 1
    return counts


def sector_basis(spec: HamiltonianSpec) -> np.ndarray:
    """Ordered integer basis of the sector (increasing bitstring value).

    even_parity lists orbit representatives of the global spin flip;
    the representative of {b, flip(b)} is the smaller integer, so the
    representatives are exactly 0 .. 2**(L-1) - 1.
    """
    full = np.arange(1 << spec.length, dtype=np.int64)
    if spec.sector == "full":
        return full
    if spec.sector == "zero_magnetization":
        return full[_popcount(full) == spec.length // 2]
    return np.arange(1 << (spec.length - 1), dtype=np.int64)


def build_sector_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    """Real symmetric Hamiltonian matrix in the ordered sector basis."""
    basis = sector_basis(spec)
    dim = len(basis)
    if dim > MAX_SECTOR_DIM:
        raise ValueError(f"sector dimension {dim} exceeds the dense-solve limit {MAX_SECTOR_DIM}")
    if spec.model == "xx":
        return _xx_matrix(basis, spec.length, spec.coupling)
    return _tfim_matrix(basis, spec)


def _xx_matrix(basis: np.ndarray, length: int, coupling: float) -> np.ndarray:
    # J (s+ s- + s- s+) per open-chain bond: off-diagonal element J
    # between states differing by one anti-aligned neighbor swap.
    dim = len(basis)
    h = np.zeros((dim, dim))
    for k in range(length - 1):
        pair = np.int64(0b11) << k
        swap = basis & pair
        active = (swap != 0) & (swap != pair)
        flipped = basis[active] ^ pair
        cols = np.searchsorted(basis, flipped)
        h[np.nonzero(active)[0], cols] += coupling
    return h


def _flip_all(values: np.ndarray, length: int) -> np.ndarray:
    return ((np.int64(1) << length) - 1) ^ values


def _tfim_matrix(basis: np.ndarray, spec: HamiltonianSpec) -> np.ndarray:
    # -J sum_i sz_i sz_{i+1} - h sum_i sx_i on the periodic ring.
    length, j, hx = spec.length, spec.coupling, spec.field
    dim = len(basis)
    rotated = ((basis >> 1) | (basis << (length - 1))) & ((np.int64(1) << length) - 1)
    walls = _popcount(basis ^ rotated)
    h = np.diag(-j * (length - 2.0 * walls))
    rows = np.arange(dim)
    for site in range(length):
        flipped = basis ^ (np.int64(1) << site)
        if spec.sector == "even_parity":
            flipped = np.minimum(flipped, _flip_all(flipped, length))
        cols = np.searchsorted(basis, flipped)
        h[rows, cols] += -hx
    return h


@dataclass(frozen=True)
class EigenSystem:
    """Full ascending spectrum and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sector_dim: int


def eigendecompose(matrix: np.ndarray) -> EigenSystem:
    """Dense symmetric eigensolve; rejects asymmetric input."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    asym = float(np.abs(m - m.T).max())
    if asym > 1e-12 * scale:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    vals, vecs = np.linalg.eigh(m)
    return EigenSystem(eigenvalues=vals, eigenvectors=vecs, sector_dim=m.shape[0])


def _target_mask(eigenvalues: np.ndarray, e_target: float) -> np.ndarray:
    tol = TARGET_BAND_RTOL * max(1.0, float(np.abs(eigenvalues).max()))
    return np.abs(eigenvalues - e_target) <= tol


def minimum_gap(eig: EigenSystem, e_target: float | None = None) -> float:
    """Distance from the target manifold to the nearest other level."""
    e_t = float(eig.eigenvalues[0]) if e_target is None else float(e_target)
    mask = _target_mask(eig.eigenvalues, e_t)
    if mask.all():
        raise ValueError("every eigenvalue lies in the target manifold; no gap exists")
    return float(np.abs(eig.eigenvalues[~mask] - e_t).min())


def sector_characteristic_time(eig: EigenSystem, e_target: float | None = None) -> float:
    """pi / gap: the single-cycle time that nulls the nearest level."""
    return float(np.pi / minimum_gap(eig, e_target))


@dataclass(frozen=True)
class InitialState:
    """Normalized state vector expressed in the ordered sector basis."""

    kind: str
    vector: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ValueError("state vector must be a finite 1-D array")
        norm = float(np.linalg.norm(v))
        if norm <= 0:
            raise ValueError("state vector must be nonzero")
        object.__setattr__(self, "vector", v / norm)


def _xx_block_ground(length: int, n_up: int, coupling: float):
    """(energy, vector, basis) of the n_up sector ground state of an
    open XX block, with sign fixed by the largest-amplitude component."""
    full = np.arange(1 << length, dtype=np.int64)
    basis = full[_popcount(full) == n_up]
    h = _xx_matrix(basis, length, coupling)
    eig = eigendecompose(h)
    vec = eig.eigenvectors[:, 0]
    anchor = int(np.argmax(np.abs(vec)))
    if vec[anchor] < 0:
        vec = -vec
    return float(eig.eigenvalues[0]), vec, basis


def _fusion_vector(spec: HamiltonianSpec, basis: np.ndarray) -> np.ndarray:
    """Half-chain tensor-product ansatz embedded in the full sector.

    Each half is an open XX block of L/2 sites solved in a fixed
    up-spin sector; the ansatz is the single product state of the two
    block ground states whose counts sum to L/2 with minimal total
    energy. Odd halves leave a zero-energy block mode, so the splits
    (n, L/2 - n) and (L/2 - n, n) tie; the tie is resolved
    deterministically by giving the left block the smaller count (for
    L = 10 this is the (2, 3) split). The two tied products have equal
    fidelity with the full-chain ground state by reflection symmetry.
    """
    if spec.length % 2:
        raise ValueError("fusion splitting requires even length")
    half = spec.length // 2
    spins = half  # total up-spins in the zero-magnetization sector
    blocks = {}
    for n in range(max(0, spins - half), min(half, spins) + 1):
        blocks[n] = _xx_block_ground(half, n, spec.coupling)
    totals = {n: blocks[n][0] + blocks[spins - n][0] for n in blocks}
    best = min(totals.values())
    tol = 1e-10 * max(1.0, abs(best))
    n_left = min(n for n, total in totals.items() if total - best <= tol)
    _, left, left_basis = blocks[n_left]
    _, right, right_basis = blocks[spins - n_left]
    states = left_basis[:, None] | (right_basis[None, :] << half)
    amps = left[:, None] * right[None, :]
    vec = np.zeros(len(basis))
    vec[np.searchsorted(basis, states.ravel())] = amps.ravel()
    return vec


def make_initial_state(spec: HamiltonianSpec, kind: str, *,
                       basis_index: int | None = None,
                       vector=None) -> InitialState:
    """Construct one of the benchmark initial states.

    kinds: "basis_index" (the basis_index-th vector of the ordered
    sector basis), "fusion" (XX zero-magnetization only: embedded
    product of half-chain block ground states), "plus_projected"
    (TFIM: the all-|+> product state, already parity-even), "custom"
    (normalize the supplied vector).
    """
    basis = sector_basis(spec)
    dim = len(basis)
    if kind == "basis_index":
        if basis_index is None or not 0 <= basis_index < dim:
            raise ValueError(f"basis_index must lie in [0, {dim}), got {basis_index}")
        v = np.zeros(dim)
        v[basis_index] = 1.0
        return InitialState(kind=kind, vector=v)
    if kind == "fusion":
        if spec.model != "xx" or spec.sector != "zero_magnetization":
            raise ValueError("fusion ansatz is defined for the XX zero-magnetization sector")
        return InitialState(kind=kind, vector=_fusion_vector(spec, basis))
    if kind == "plus_projected":
        if spec.model != "tfim":
            raise ValueError("plus_projected is a TFIM initial state")
        return InitialState(kind=kind, vector=np.full(dim, 1.0 / np.sqrt(dim)))
    if kind == "custom":
        if vector is None:
            raise ValueError("custom kind requires a vector")
        v = np.asarray(vector, dtype=float)
        if v.shape != (dim,):
            raise ValueError(f"custom vector must have shape ({dim},), got {v.shape}")
        return InitialState(kind=kind, vector=v)
    raise ValueError(f"unknown initial-state kind {kind!r}")


@dataclass(frozen=True)
class RodeoResult:
    """Filtering outcome in the eigenbasis.

    target_weight and zeta are the surviving weights inside and
    outside the target manifold; success_probability is their sum and
    fidelity the post-selected target fraction.
    """

    zeta: float
    success_probability: float
    fidelity: float
    target_weight: float


class RodeoObjective:
    """Reusable filtering evaluator for one (eigensystem, state, target).

    Precomputes eigenbasis overlaps once; value(times) returns the
    post-selected infidelity (zeta / (target + zeta)) and batch(times)
    evaluates a (n_samples, n_schedules) column stack of schedules.
    """

    def __init__(self, eig: EigenSystem, psi: InitialState, e_target: float):
        overlaps = eig.eigenvectors.T @ psi.vector
        weights = overlaps ** 2
        mask = _target_mask(eig.eigenvalues, e_target)
        self.e_target = float(e_target)
        self.target_weight_initial = float(weights[mask].sum())
        self._deltas = eig.eigenvalues[~mask] - e_target
        self._weights = weights[~mask]
        self._target_deltas = eig.eigenvalues[mask] - e_target
        self._target_weights = weights[mask]

    def _survival(self, deltas, weights, times) -> float:
        acc = weights.copy()
        for t in times:
            acc *= np.cos(0.5 * deltas * t) ** 2
        return float(acc.sum())

    def result(self, schedule: TimeSchedule) -> RodeoResult:
        times = schedule.times
        zeta = self._survival(self._deltas, self._weights, times)
        target = self._survival(self._target_deltas, self._target_weights, times)
        success = target + zeta
        fidelity = target / success if success > 0 else 0.0
        return RodeoResult(zeta=zeta, success_probability=success,
                           fidelity=fidelity, target_weight=target)

    def value(self, times: np.ndarray) -> float:
        zeta = self._survival(self._deltas, self._weights, np.asarray(times, dtype=float))
        target = self._survival(self._target_deltas, self._target_weights,
                                np.asarray(times, dtype=float))
        success = target + zeta
        return zeta / success if success > 0 else 1.0

    def batch(self, times_matrix: np.ndarray) -> np.ndarray:
        tm = np.asarray(times_matrix, dtype=float)
        zeta = np.ones((len(self._weights), tm.shape[1])) * self._weights[:, None]
        target = np.ones((len(self._target_weights), tm.shape[1])) \
            * self._target_weights[:, None]
        for row in tm:
            zeta *= np.cos(0.5 * self._deltas[:, None] * row[None, :]) ** 2
            target *= np.cos(0.5 * self._target_deltas[:, None] * row[None, :]) ** 2
        z = zeta.sum(axis=0)
        t = target.sum(axis=0)
        out = np.ones(tm.shape[1])
        ok = (z + t) > 0
        out[ok] = z[ok] / (z[ok] + t[ok])
        return out


def ra_fidelity(eig: EigenSystem, psi: InitialState, e_target: float,
                schedule: TimeSchedule) -> RodeoResult:
    """Exact filtering outcome of a schedule in the eigenbasis."""
    return RodeoObjective(eig, psi, e_target).result(schedule)
