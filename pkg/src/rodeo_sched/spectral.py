"""Spectral functions and the quantities the rodeo filter acts on.

Each measurement cycle of duration t multiplies the weight of an energy
component E by cos((E - E_t) t / 2) ** 2, where E_t is the target
energy. The residual spectral norm (RSN) is the weight surviving on the
non-target part of the spectrum after a whole schedule. Spectra come in
two flavors: discrete (energies, weights) and continuous bands with a
named or tabulated density.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .quadrature import integrate_oscillatory
from .schedules import TimeSchedule

# Eigenvalues within this relative distance of the target energy count
# as the target manifold.
TARGET_DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Point spectrum with nonnegative weights summing to at most 1."""

    energies: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.energies, dtype=float)).copy()
        w = np.atleast_1d(np.asarray(self.weights, dtype=float)).copy()
        if e.shape != w.shape or e.ndim != 1:
            raise ValueError("energies and weights must be matching 1-D arrays")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(w))):
            raise ValueError("energies and weights must be finite")
        if w.size and w.min() < 0:
            raise ValueError("weights must be nonnegative")
        if w.sum() > 1.0 + 1e-9:
            raise ValueError(f"weights sum to {w.sum()}, expected <= 1")
        e.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class ContinuousBand:
    """Band of spectral weight on [delta_min, delta_max].

    ``density`` is "constant", "gaussian" (shape exp(-E**2)), or an
    (M, 2) table of (energy, value) rows interpolated linearly. Named
    densities integrate to one by construction; a tabulated density is
    rescaled to unit weight at construction unless ``normalize`` is
    False, which is how post-filter bands keep their depleted weight.
    """

    delta_min: float
    delta_max: float
    density: Union[str, np.ndarray] = "constant"
    normalize: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.delta_min) and math.isfinite(self.delta_max)):
            raise ValueError("band edges must be finite")
        if not self.delta_max > self.delta_min:
            raise ValueError(
                f"delta_max must exceed delta_min, got [{self.delta_min}, {self.delta_max}]")
        if isinstance(self.density, str):
            if self.density not in ("constant", "gaussian"):
                raise ValueError(f"unknown density name: {self.density!r}")
            return
        table = np.asarray(self.density, dtype=float).copy()
        if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 2:
            raise ValueError("tabulated density must be an (M, 2) array with M >= 2")
        if not np.all(np.isfinite(table)):
            raise ValueError("tabulated density must be finite")
        if np.any(np.diff(table[:, 0]) <= 0):
            raise ValueError("tabulated energies must be strictly increasing")
        if table[:, 1].min() < 0:
            raise ValueError("tabulated density values must be nonnegative")
        if self.normalize:
            norm = self._table_integral(table)
            if norm <= 0:
                raise ValueError("tabulated density integrates to zero")
            table[:, 1] /= norm
        table.flags.writeable = False
        object.__setattr__(self, "density", table)

    def _table_integral(self, table) -> float:
        grid = np.unique(np.concatenate(
            [[self.delta_min], table[:, 0], [self.delta_max]]))
        grid = grid[(grid >= self.delta_min) & (grid <= self.delta_max)]
        vals = np.interp(grid, table[:, 0], table[:, 1])
        return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(grid)))

    def density_values(self, energies) -> np.ndarray:
        e = np.asarray(energies, dtype=float)
        if isinstance(self.density, str):
            if self.density == "constant":
                return np.full_like(e, 1.0 / (self.delta_max - self.delta_min))
            norm = 0.5 * math.sqrt(math.pi) * (
                math.erf(self.delta_max) - math.erf(self.delta_min))
            return np.exp(-e ** 2) / norm
        return np.interp(e, self.density[:, 0], self.density[:, 1])

    def total_weight(self) -> float:
        if isinstance(self.density, str):
            return 1.0
        return self._table_integral(np.asarray(self.density))


SpectralFunction = Union[DiscreteSpectrum, ContinuousBand]


def success_probability(energy, e_target: float, t):
    """Single-cycle survival factor cos((E - E_t) t / 2) ** 2."""
    return np.cos(0.5 * (np.asarray(energy, dtype=float) - e_target) * t) ** 2


def characteristic_time(delta_min: float) -> float:
    """T0 = pi / delta_min, the time scale set by the smallest gap."""
    if not delta_min > 0:
        raise ValueError(f"delta_min must be positive, got {delta_min}")
    return math.pi / delta_min


def survival_product(energies, e_target: float, schedule: TimeSchedule) -> np.ndarray:
    """Product of cycle survival factors, accumulated per time sample."""
    e = np.asarray(energies, dtype=float)
    acc = np.ones_like(e)
    for t in schedule.times:
        acc *= np.cos(0.5 * (e - e_target) * t) ** 2
    return acc


def _target_mask(energies, e_target: float) -> np.ndarray:
    tol = TARGET_DEGENERACY_RTOL * max(1.0, abs(e_target))
    return np.abs(np.asarray(energies) - e_target) <= tol


def apply_schedule(spectrum: SpectralFunction, e_target: float,
                   schedule: TimeSchedule) -> SpectralFunction:
    """Return the spectrum after filtering with one schedule.

    Discrete weights at the target energy are left bit-identical; the
    continuous case returns a tabulated density sampled on a grid dense
    enough for the fastest oscillation in the filter product.
    """
    if isinstance(spectrum, DiscreteSpectrum):
        new_w = spectrum.weights * survival_product(
            spectrum.energies, e_target, schedule)
        target = _target_mask(spectrum.energies, e_target)
        new_w[target] = spectrum.weights[target]
        return DiscreteSpectrum(spectrum.energies, new_w)
    lo, hi = spectrum.delta_min, spectrum.delta_max
    rate = float(np.sum(schedule.times))
    npts = max(513, int(math.ceil((hi - lo) * rate / (math.pi / 8))) + 1)
    grid = np.linspace(lo, hi, npts)
    vals = spectrum.density_values(grid) * survival_product(grid, e_target, schedule)
    return ContinuousBand(lo, hi, np.column_stack([grid, vals]), normalize=False)


def rsn_quadrature(spectrum: SpectralFunction, e_target: float,
                   schedule: TimeSchedule, *, abs_tol: float = 1e-10) -> float:
    """Residual spectral norm by direct integration (or direct summation).

    For a band the integrand density(E) * prod_n cos((E - E_t) t_n / 2)**2
    is integrated with the oscillation-budgeted panel rule; the fastest
    phase rate is the total schedule time. For a discrete spectrum the
    non-target weights are summed after filtering. An empty schedule
    returns the initial non-target weight.
    """
    if isinstance(spectrum, DiscreteSpectrum):
        keep = ~_target_mask(spectrum.energies, e_target)
        surv = survival_product(spectrum.energies[keep], e_target, schedule)
        return float(np.sum(spectrum.weights[keep] * surv))
    lo, hi = spectrum.delta_min, spectrum.delta_max
    if lo < e_target < hi or e_target in (lo, hi):
        raise ValueError(
            f"target energy {e_target} must lie strictly outside the band [{lo}, {hi}]")

    def integrand(e):
        return spectrum.density_values(e) * survival_product(e, e_target, schedule)

    rate = float(np.sum(schedule.times))
    value, _ = integrate_oscillatory(
        integrand, lo, hi, phase_rate=rate, abs_tol=abs_tol)
    return value


def fidelity_from_overlaps(target_weight: float, zeta: float) -> float:
    """Post-selected fidelity target / (target + residual)."""
    if target_weight < 0 or zeta < 0:
        raise ValueError("weights must be nonnegative")
    denom = target_weight + zeta
    if denom <= 0:
        raise ValueError("no surviving weight: fidelity undefined")
    return target_weight / denom


def load_spectrum_csv(path) -> DiscreteSpectrum:
    """Read a discrete spectrum from CSV rows of energy,weight.

    A header row is required; malformed rows raise with the line and
    field that failed.
    """
    energies, weights = [], []
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        try:
            float(header[0])
        except (ValueError, IndexError):
            pass
        else:
            raise ValueError(f"{path}: line 1: header row required")
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
            parsed = []
            for name, cell in zip(("energy", "weight"), row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"{path}: line {lineno}: bad {name} field: {cell!r}")
            energies.append(parsed[0])
            weights.append(parsed[1])
    return DiscreteSpectrum(np.array(energies), np.array(weights))


def save_spectrum_csv(spectrum: DiscreteSpectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["energy", "weight"])
        for e, w in zip(spectrum.energies, spectrum.weights):
            writer.writerow([repr(float(e)), repr(float(w))])


def band_from_json(source) -> ContinuousBand:
    """Build a band from a JSON descriptor (path, file object, or dict).

    Schema: {"delta_min": ..., "delta_max": ...,
             "density": "constant" | "gaussian" | {"tabulated": [[E, w], ...]}}
    """
    if isinstance(source, dict):
        data = source
    elif hasattr(source, "read"):
        data = json.load(source)
    else:
        with open(source) as fh:
            data = json.load(fh)
    for key in ("delta_min", "delta_max"):
        if key not in data:
            raise ValueError(f"band descriptor missing {key!r}")
    density = data.get("density", "constant")
    if isinstance(density, dict):
        if "tabulated" not in density:
            raise ValueError("density object must carry a 'tabulated' key")
        density = np.asarray(density["tabulated"], dtype=float)
    return ContinuousBand(float(data["delta_min"]), float(data["delta_max"]), density)


def load_spectral_function(path) -> SpectralFunction:
    """Load a spectral function, dispatching on the file extension."""
    p = str(path)
    if p.endswith(".json"):
        return band_from_json(path)
    return load_spectrum_csv(path)
