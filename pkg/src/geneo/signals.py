"""Discrete periodic grids, image signals, and probability-weighted signal spaces.

A signal is an image on an n-by-n torus grid: pixel indices wrap mod n.
The inner product is the plain Euclidean dot product of pixel arrays, so
every grid symmetry (a pure pixel permutation) preserves it exactly.
Pixel sums are computed in sorted order, which makes norms and inner
products bit-for-bit invariant under permutation of the entries.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

# Weight vectors whose sum strays from 1 by more than this are flagged
# (still renormalized): external frequency tables carry rounding error.
WEIGHT_TOLERANCE = 1e-9


def _frozen(values, dtype=np.float64) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.flags.writeable = False
    return out


def _sorted_sum(a: np.ndarray) -> float:
    # Sorting first makes the float result independent of input order.
    return float(np.sum(np.sort(a)))


@dataclass(frozen=True)
class TorusGrid:
    """An n-by-n grid of sites with periodic (mod n) index arithmetic."""

    n: int

    def __post_init__(self):
        n = int(self.n)
        if n < 2:
            raise ValueError(f"grid needs n >= 2, got {self.n!r}")
        object.__setattr__(self, "n", n)

    @property
    def size(self) -> int:
        """Number of sites, n**2."""
        return self.n * self.n

    def flat_index(self, i: int, j: int) -> int:
        """Row-major index of site (i, j); indices wrap mod n."""
        return (i % self.n) * self.n + (j % self.n)

    def site(self, index: int) -> tuple[int, int]:
        """Inverse of :meth:`flat_index`."""
        return divmod(index % self.size, self.n)

    def sites(self):
        """Iterate all (i, j) pairs in row-major order."""
        for i in range(self.n):
            for j in range(self.n):
                yield (i, j)


def make_grid(n: int) -> TorusGrid:
    """Build a periodic n-by-n grid. Rejects n < 2."""
    return TorusGrid(n)


@dataclass(frozen=True, eq=False)
class Signal:
    """An image on a torus grid, stored as a flat row-major float64 array.

    Entry ``i*n + j`` is the pixel value at site (i, j). Values must be
    finite; the array is copied and frozen at construction.
    """

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if v.size != self.grid.size:
            raise ValueError(
                f"signal has {v.size} values, grid n={self.grid.n} needs {self.grid.size}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def from_matrix(cls, grid: TorusGrid, matrix) -> "Signal":
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (grid.n, grid.n):
            raise ValueError(f"matrix shape {m.shape} does not match n={grid.n}")
        return cls(grid, m.reshape(-1))

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "Signal":
        return cls(grid, np.zeros(grid.size))

    @classmethod
    def constant(cls, grid: TorusGrid, value: float) -> "Signal":
        return cls(grid, np.full(grid.size, float(value)))

    @classmethod
    def basis(cls, grid: TorusGrid, i: int, j: int) -> "Signal":
        """Pixel indicator: 1 at site (i, j), 0 elsewhere."""
        v = np.zeros(grid.size)
        v[grid.flat_index(i, j)] = 1.0
        return cls(grid, v)

    def as_matrix(self) -> np.ndarray:
        return self.values.reshape(self.grid.n, self.grid.n)

    def value_at(self, i: int, j: int) -> float:
        return float(self.values[self.grid.flat_index(i, j)])

    def _check_same_grid(self, other: "Signal"):
        if self.grid != other.grid:
            raise ValueError(
                f"grid mismatch: n={self.grid.n} vs n={other.grid.n}"
            )

    def __add__(self, other: "Signal") -> "Signal":
        self._check_same_grid(other)
        return Signal(self.grid, self.values + other.values)

    def __sub__(self, other: "Signal") -> "Signal":
        self._check_same_grid(other)
        return Signal(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "Signal":
        return Signal(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Signal":
        return Signal(self.grid, -self.values)


def inner_product(phi1: Signal, phi2: Signal) -> float:
    """Euclidean dot product of two pixel arrays on the same grid.

    Symmetric, bilinear, positive semidefinite, and exactly invariant
    under pixel permutations (sorted summation).
    """
    phi1._check_same_grid(phi2)
    return _sorted_sum(phi1.values * phi2.values)


def euclidean_norm(phi: Signal) -> float:
    """Norm induced by :func:`inner_product`."""
    return float(np.sqrt(_sorted_sum(phi.values * phi.values)))


def sup_norm(phi: Signal) -> float:
    """Largest absolute pixel value."""
    return float(np.max(np.abs(phi.values)))


def equivalence_constants(grid: TorusGrid) -> tuple[float, float]:
    """Constants (a, b) with a*sup_norm <= euclidean_norm <= b*sup_norm.

    For the Euclidean norm on n**2 pixels these are (1, n); a pixel
    indicator attains the lower constant, the all-ones image the upper.
    """
    return (1.0, float(grid.n))


@dataclass(frozen=True, eq=False)
class WeightedSignalSpace:
    """A finite set of signals with probability weights summing to 1."""

    grid: TorusGrid
    signals: tuple[Signal, ...]
    weights: np.ndarray
    raw_weight_sum: float = 1.0

    @property
    def count(self) -> int:
        return len(self.signals)

    @cached_property
    def stacked(self) -> np.ndarray:
        """All signal value arrays as one (count, n**2) matrix."""
        out = np.stack([s.values for s in self.signals])
        out.flags.writeable = False
        return out

    @property
    def was_renormalized(self) -> bool:
        return abs(self.raw_weight_sum - 1.0) > WEIGHT_TOLERANCE


def make_space(signals, weights) -> WeightedSignalSpace:
    """Bundle signals and nonnegative weights; weights renormalize to sum 1.

    Raises on empty input, negative weights, an all-zero weight vector, or
    mixed grids. Weight sums off by more than ``WEIGHT_TOLERANCE`` are
    still renormalized but trigger a warning.
    """
    signals = tuple(signals)
    if not signals:
        raise ValueError("need at least one signal")
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.size != len(signals):
        raise ValueError(f"{len(signals)} signals but {w.size} weights")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = float(w.sum())
    if total <= 0:
        raise ValueError("weights sum to zero")
    grid = signals[0].grid
    for s in signals[1:]:
        if s.grid != grid:
            raise ValueError("all signals must share one grid")
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        warnings.warn(
            f"weights summed to {total!r}; renormalizing", stacklevel=2
        )
    return WeightedSignalSpace(grid, signals, _frozen(w / total), total)


def uniform_space(signals) -> WeightedSignalSpace:
    """Equal-weight space over the given signals."""
    signals = tuple(signals)
    return make_space(signals, np.full(len(signals), 1.0 / max(len(signals), 1)))


# ---------------------------------------------------------------------------
# Serialization: CSV signals and a JSON space manifest.

def write_signal_csv(phi: Signal, path) -> None:
    """Write a signal as n rows of n comma-separated reals."""
    n = phi.grid.n
    mat = phi.as_matrix()
    lines = [",".join(repr(float(x)) for x in row) for row in mat]
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal_csv(path) -> Signal:
    """Read a signal written by :func:`write_signal_csv`; grid size inferred."""
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line:
            rows.append([float(tok) for tok in line.split(",")])
    n = len(rows)
    if n < 2 or any(len(r) != n for r in rows):
        raise ValueError(f"{path}: expected a square table with n >= 2, got {n} rows")
    return Signal.from_matrix(TorusGrid(n), np.array(rows))


def write_space(space: WeightedSignalSpace, directory) -> Path:
    """Write each signal as CSV plus a manifest {n, signals, weights}.

    Returns the manifest path; signal paths in the manifest are relative
    to the manifest's directory.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    for idx, phi in enumerate(space.signals):
        name = f"signal_{idx:03d}.csv"
        write_signal_csv(phi, directory / name)
        names.append(name)
    manifest = {
        "n": space.grid.n,
        "signals": names,
        "weights": [float(w) for w in space.weights],
    }
    path = directory / "space.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def read_space(manifest_path) -> WeightedSignalSpace:
    """Load a space written by :func:`write_space`."""
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text())
    base = manifest_path.parent
    signals = [read_signal_csv(base / name) for name in manifest["signals"]]
    n = int(manifest["n"])
    for s in signals:
        if s.grid.n != n:
            raise ValueError(f"manifest says n={n} but a signal has n={s.grid.n}")
    return make_space(signals, manifest["weights"])
