"""Grid-preserving torus isometries as pixel permutations.

The symmetry group of the periodic n-by-n grid is generated by the two
axis translations, the two axis reflections, and the axis swap: 8*n**2
elements in total. An element acts on a signal from the right, i.e.
``act(phi, g)`` has value ``phi[g(site)]`` at each site, so acting by a
composition equals acting by the factors in order:
``act(phi, compose(g1, g2)) == act(act(phi, g1), g2)``.

Elements carry the full site permutation; elements built from generator
words also carry a compact descriptor (translation, flips, swap) whose
algebra mirrors permutation composition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import Signal, TorusGrid, WeightedSignalSpace, make_space

_SWAP = np.array([[0, 1], [1, 0]])
_EYE = np.eye(2, dtype=int)


@dataclass(frozen=True)
class IsometryDescriptor:
    """Normal form: swap axes first, then flip signs, then translate."""

    dx: int
    dy: int
    flip_x: bool = False
    flip_y: bool = False
    swap: bool = False

    def matrix(self) -> np.ndarray:
        """The signed-permutation part as a 2x2 integer matrix."""
        f = np.diag([-1 if self.flip_x else 1, -1 if self.flip_y else 1])
        return f @ (_SWAP if self.swap else _EYE)

    @classmethod
    def from_matrix(cls, m: np.ndarray, dx: int, dy: int, n: int) -> "IsometryDescriptor":
        swap = m[0, 0] == 0
        f = m @ (_SWAP if swap else _EYE)
        return cls(dx % n, dy % n, f[0, 0] < 0, f[1, 1] < 0, bool(swap))


@dataclass(frozen=True, eq=False)
class GridIsometry:
    """A bijection of grid sites; ``perm[s]`` is the flat index of g(site s)."""

    grid: TorusGrid
    perm: np.ndarray
    descriptor: IsometryDescriptor | None = None

    def __post_init__(self):
        p = np.asarray(self.perm, dtype=np.intp).reshape(-1)
        if p.size != self.grid.size:
            raise ValueError("permutation length does not match grid")
        if not np.array_equal(np.sort(p), np.arange(self.grid.size)):
            raise ValueError("perm is not a bijection of the sites")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "perm", p)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.perm, np.arange(self.grid.size)))

    def same_as(self, other: "GridIsometry") -> bool:
        return self.grid == other.grid and np.array_equal(self.perm, other.perm)


def _descriptor_perm(grid: TorusGrid, d: IsometryDescriptor) -> np.ndarray:
    n = grid.n
    idx = np.arange(grid.size)
    i, j = np.divmod(idx, n)
    p, q = (j, i) if d.swap else (i, j)
    if d.flip_x:
        p = -p
    if d.flip_y:
        q = -q
    return ((p + d.dx) % n) * n + ((q + d.dy) % n)


def from_descriptor(grid: TorusGrid, d: IsometryDescriptor) -> GridIsometry:
    d = IsometryDescriptor(d.dx % grid.n, d.dy % grid.n, d.flip_x, d.flip_y, d.swap)
    return GridIsometry(grid, _descriptor_perm(grid, d), d)


def identity(grid: TorusGrid) -> GridIsometry:
    return from_descriptor(grid, IsometryDescriptor(0, 0))


def translation(grid: TorusGrid, dx: int, dy: int) -> GridIsometry:
    """Site (i, j) -> (i+dx, j+dy) mod n."""
    return from_descriptor(grid, IsometryDescriptor(dx, dy))


def reflection(grid: TorusGrid, axis: str) -> GridIsometry:
    """Negate one index: axis 'x' sends (i, j) -> (-i, j), 'y' sends (i, j) -> (i, -j)."""
    if axis == "x":
        return from_descriptor(grid, IsometryDescriptor(0, 0, flip_x=True))
    if axis == "y":
        return from_descriptor(grid, IsometryDescriptor(0, 0, flip_y=True))
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


def swap_axes(grid: TorusGrid) -> GridIsometry:
    """Site (i, j) -> (j, i)."""
    return from_descriptor(grid, IsometryDescriptor(0, 0, swap=True))


def _check_same_grid(g1: GridIsometry, g2: GridIsometry):
    if g1.grid != g2.grid:
        raise ValueError(f"grid mismatch: n={g1.grid.n} vs n={g2.grid.n}")


def compose(g1: GridIsometry, g2: GridIsometry) -> GridIsometry:
    """Element acting like g1 followed by g2 on signals (site map g1 o g2)."""
    _check_same_grid(g1, g2)
    perm = g1.perm[g2.perm]
    desc = None
    if g1.descriptor is not None and g2.descriptor is not None:
        d1, d2 = g1.descriptor, g2.descriptor
        m1 = d1.matrix()
        m = m1 @ d2.matrix()
        t = m1 @ np.array([d2.dx, d2.dy]) + np.array([d1.dx, d1.dy])
        desc = IsometryDescriptor.from_matrix(m, int(t[0]), int(t[1]), g1.grid.n)
    return GridIsometry(g1.grid, perm, desc)


def inverse(g: GridIsometry) -> GridIsometry:
    inv = np.empty_like(g.perm)
    inv[g.perm] = np.arange(g.grid.size)
    desc = None
    if g.descriptor is not None:
        d = g.descriptor
        mi = d.matrix().T  # signed permutations are orthogonal
        t = -(mi @ np.array([d.dx, d.dy]))
        desc = IsometryDescriptor.from_matrix(mi, int(t[0]), int(t[1]), g.grid.n)
    return GridIsometry(g.grid, inv, desc)


def act(phi: Signal, g: GridIsometry) -> Signal:
    """Right action: the result has value phi[g(site)] at each site."""
    if phi.grid != g.grid:
        raise ValueError(f"grid mismatch: n={phi.grid.n} vs n={g.grid.n}")
    return Signal(phi.grid, phi.values[g.perm])


def point_group(grid: TorusGrid) -> list[GridIsometry]:
    """The 8 flip/swap combinations fixing the origin (fewer when n == 2)."""
    seen: dict[bytes, GridIsometry] = {}
    for swap in (False, True):
        for fx in (False, True):
            for fy in (False, True):
                g = from_descriptor(grid, IsometryDescriptor(0, 0, fx, fy, swap))
                seen.setdefault(g.perm.tobytes(), g)
    return list(seen.values())


def enumerate_group(grid: TorusGrid, max_elements: int = 4096) -> list[GridIsometry]:
    """All products of translations with the point group, deduplicated.

    Raises if the raw product count 8*n**2 exceeds ``max_elements``.
    """
    raw = 8 * grid.size
    if raw > max_elements:
        raise ValueError(
            f"group enumeration needs {raw} candidates, cap is {max_elements}"
        )
    seen: dict[bytes, GridIsometry] = {}
    for dx in range(grid.n):
        for dy in range(grid.n):
            for swap in (False, True):
                for fx in (False, True):
                    for fy in (False, True):
                        g = from_descriptor(
                            grid, IsometryDescriptor(dx, dy, fx, fy, swap)
                        )
                        seen.setdefault(g.perm.tobytes(), g)
    return list(seen.values())


def orbit_closure(space: WeightedSignalSpace, elements) -> WeightedSignalSpace:
    """Close a space under a set of isometries, splitting weights over orbits.

    Each input signal's weight is divided equally among its distinct images,
    so the resulting measure is invariant under the given elements whenever
    they form a group. Duplicate images across inputs merge by weight.
    """
    elements = list(elements)
    acc: dict[bytes, tuple[Signal, float]] = {}
    for phi, w in zip(space.signals, space.weights):
        images: dict[bytes, Signal] = {}
        for g in elements:
            img = act(phi, g)
            images.setdefault(img.values.tobytes(), img)
        share = float(w) / len(images)
        for key, img in images.items():
            if key in acc:
                acc[key] = (acc[key][0], acc[key][1] + share)
            else:
                acc[key] = (img, share)
    signals = [sig for sig, _ in acc.values()]
    weights = [wt for _, wt in acc.values()]
    return make_space(signals, weights)
