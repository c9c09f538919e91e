"""Lattices, truncation radii, point families and their counting diagnostics."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError

PI = math.pi

# points within this relative slack of the circle count as on it
_BOUNDARY_RTOL = 1e-12
HAUSDORFF_BOUNDARY_SAMPLES = 4096


class Mode(str, enum.Enum):
    SAMPLING = "sampling"
    INTERPOLATION = "interpolation"


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice generated by the columns of ``basis``.

    Build the square lattice alpha*Z^2 with ``LatticeSpec.square(alpha)``.
    """

    basis: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.shape != (2, 2) or not np.all(np.isfinite(b)):
            raise DomainError("lattice basis must be a finite 2x2 matrix")
        if abs(np.linalg.det(b)) <= 0.0:
            raise DomainError("lattice basis is singular")

    @classmethod
    def square(cls, alpha: float) -> LatticeSpec:
        if not alpha > 0:
            raise DomainError(f"alpha must be positive, got {alpha}")
        a = float(alpha)
        return cls(((a, 0.0), (0.0, a)))

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.basis, dtype=float)

    @property
    def alpha(self) -> float | None:
        """Spacing when the lattice is alpha*Z^2, else None."""
        (a, b), (c, d) = self.basis
        return a if (a == d and b == 0.0 and c == 0.0 and a > 0) else None

    @property
    def density(self) -> float:
        return 1.0 / abs(float(np.linalg.det(self.matrix)))

    def to_json(self) -> dict:
        if self.alpha is not None:
            return {"alpha": self.alpha}
        return {"basis": [list(row) for row in self.basis]}

    @classmethod
    def from_json(cls, doc: dict) -> LatticeSpec:
        if "basis" in doc:
            rows = doc["basis"]
            return cls(tuple(tuple(float(v) for v in row) for row in rows))
        return cls.square(float(doc["alpha"]))


@dataclass(frozen=True)
class PointSet:
    """Finite point configuration, sorted by (re, im), without duplicates."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if not np.all(np.isfinite(pts)):
            raise DomainError("points must be finite")
        pts = np.unique(pts)  # numpy orders complex lexicographically
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())

    def to_json(self) -> list[list[float]]:
        return [[float(z.real), float(z.imag)] for z in self.points]

    @classmethod
    def from_json(cls, pairs: Iterable[Sequence[float]]) -> PointSet:
        return cls(np.array([complex(re, im) for re, im in pairs], dtype=complex))


def radicand(n: int, tau: float, mode: Mode | str) -> float:
    """pi * rho_n^2 for the given construction."""
    mode = Mode(mode)
    if mode is Mode.SAMPLING:
        return n + math.sqrt(n) * tau
    return n - math.sqrt(n) * (math.sqrt(2.0 * math.log(n)) + tau)


def smallest_admissible_degree(tau: float, mode: Mode | str = Mode.INTERPOLATION) -> int:
    """Least n0 such that every n >= n0 has a positive radicand."""
    n = 3
    while radicand(n, tau, mode) <= 0:
        n *= 2
    lo, hi = max(3, n // 2), n
    while lo < hi:  # radicand/sqrt(n) increases for n >= 3
        mid = (lo + hi) // 2
        if radicand(mid, tau, mode) > 0:
            hi = mid
        else:
            lo = mid + 1
    n0 = lo
    while n0 > 1 and radicand(n0 - 1, tau, mode) > 0:
        n0 -= 1
    return n0


def truncation_radius(n: int, tau: float, mode: Mode | str) -> float:
    """rho_n with pi rho_n^2 = n + sqrt(n) tau (sampling) or
    n - sqrt(n)(sqrt(2 ln n) + tau) (interpolation)."""
    if n < 1:
        raise DomainError(f"degree must be >= 1, got {n}")
    mode = Mode(mode)
    r = radicand(n, tau, mode)
    if r <= 0:
        n0 = smallest_admissible_degree(tau, mode)
        raise DomainError(
            f"radius radicand {r:.6g} is not positive for n={n}, tau={tau} in "
            f"{mode.value} mode; the smallest admissible degree is {n0}")
    return math.sqrt(r / PI)


def lattice_points_in_disk(lattice: LatticeSpec, rho: float) -> PointSet:
    """All lattice points in the closed disk |z| <= rho."""
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    b = lattice.matrix
    binv = np.linalg.inv(b)
    # |m_i| = |(B^-1 x)_i| <= rho * ||row_i(B^-1)||
    bounds = np.ceil(rho * np.linalg.norm(binv, axis=1)).astype(int)
    i = np.arange(-bounds[0], bounds[0] + 1)
    j = np.arange(-bounds[1], bounds[1] + 1)
    ii, jj = np.meshgrid(i, j, indexing="ij")
    x = b[0, 0] * ii + b[0, 1] * jj
    y = b[1, 0] * ii + b[1, 1] * jj
    keep = x * x + y * y <= rho * rho * (1.0 + _BOUNDARY_RTOL)
    return PointSet(x[keep] + 1j * y[keep])


@dataclass(frozen=True)
class FamilySpec:
    lattice: LatticeSpec
    mode: Mode
    tau: float
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "tau", float(self.tau))
        degrees = tuple(sorted(int(n) for n in self.degrees))
        object.__setattr__(self, "degrees", degrees)
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise DomainError(f"tau must be positive, got {self.tau}")
        if any(n < 1 for n in degrees):
            raise DomainError("degrees must be positive integers")
        if len(set(degrees)) != len(degrees):
            raise DomainError("degrees must be distinct")
        d = self.lattice.density
        if self.mode is Mode.SAMPLING and not d > 1:
            raise DomainError(f"sampling mode needs lattice density > 1, got {d}")
        if self.mode is Mode.INTERPOLATION:
            if not d < 1:
                raise DomainError(f"interpolation mode needs lattice density < 1, got {d}")
            for n in degrees:
                truncation_radius(n, self.tau, self.mode)

    def to_json(self) -> dict:
        return {
            "version": 1,
            "lattice": self.lattice.to_json(),
            "mode": self.mode.value,
            "tau": self.tau,
            "degrees": list(self.degrees),
        }

    @classmethod
    def from_json(cls, doc: dict) -> FamilySpec:
        if doc.get("version") != 1:
            raise DomainError(f"unsupported family document version {doc.get('version')!r}")
        return cls(LatticeSpec.from_json(doc["lattice"]), Mode(doc["mode"]),
                   float(doc["tau"]), tuple(int(n) for n in doc["degrees"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, text: str) -> FamilySpec:
        return cls.from_json(json.loads(text))


def build_family(spec: FamilySpec) -> dict[int, PointSet]:
    return {n: lattice_points_in_disk(spec.lattice, truncation_radius(n, spec.tau, spec.mode))
            for n in spec.degrees}


@dataclass(frozen=True)
class CountRow:
    n: int
    count: int
    ratio: float


def cardinality_report(family: dict[int, PointSet]) -> list[CountRow]:
    if not family:
        raise DomainError("cardinality_report needs a non-empty family")
    return [CountRow(n, len(family[n]), len(family[n]) / (n + 1)) for n in sorted(family)]


def min_separation(layer: PointSet) -> float:
    if len(layer) < 2:
        return math.inf
    pts = np.column_stack([layer.points.real, layer.points.imag])
    d, _ = cKDTree(pts).query(pts, k=2)
    return float(d[:, 1].min())


@dataclass(frozen=True)
class LocalCounts:
    max_disk_count: int
    outside_bulk_count: int
    transition_count: int
    min_separation: float


def local_count_diagnostics(layer: PointSet, n: int, epsilon: float, rho: float,
                            tau: float = 1.0) -> LocalCounts:
    """Counting diagnostics of a layer.

    ``max_disk_count`` is the largest number of layer points within distance
    ``rho`` of a center, over the layer points themselves and a grid of step
    rho/4 covering the layer. ``outside_bulk_count`` counts pi|l|^2 > n(1-eps),
    ``transition_count`` counts n - sqrt(n) tau <= pi|l|^2 <= n + sqrt(n) tau.
    """
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    if len(layer) == 0:
        return LocalCounts(0, 0, 0, math.inf)
    z = layer.points
    pts = np.column_stack([z.real, z.imag])
    tree = cKDTree(pts)
    step = rho / 4.0
    lo = pts.min(axis=0) - rho
    hi = pts.max(axis=0) + rho
    gx = np.arange(lo[0], hi[0] + step, step)
    gy = np.arange(lo[1], hi[1] + step, step)
    grid = np.column_stack([g.ravel() for g in np.meshgrid(gx, gy, indexing="ij")])
    centers = np.vstack([pts, grid])
    counts = tree.query_ball_point(centers, rho, return_length=True)
    r2 = PI * np.abs(z) ** 2
    width = math.sqrt(n) * tau
    return LocalCounts(
        max_disk_count=int(np.max(counts)),
        outside_bulk_count=int(np.sum(r2 > n * (1.0 - epsilon))),
        transition_count=int(np.sum((r2 >= n - width) & (r2 <= n + width))),
        min_separation=min_separation(layer),
    )


def hausdorff_distance(s: PointSet, t: PointSet, center: complex, radius: float,
                       samples: int = HAUSDORFF_BOUNDARY_SAMPLES) -> float:
    """Hausdorff distance between (s n B) u dB and (t n B) u dB, B the closed disk.

    The circle is discretized with ``samples`` points, so the result carries an
    error of at most 2 pi radius / samples.
    """
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    center = complex(center)
    circle = center + radius * np.exp(2j * PI * np.arange(samples) / samples)

    def clipped(ps: PointSet) -> np.ndarray:
        z = ps.points
        inside = z[np.abs(z - center) <= radius * (1.0 + _BOUNDARY_RTOL)]
        both = np.concatenate([inside, circle])
        return np.column_stack([both.real, both.imag])

    a, b = clipped(s), clipped(t)
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba))


def nearest_lattice_points(lattice: LatticeSpec, count: int) -> PointSet:
    """The ``count`` lattice points closest to the origin.

    Ties are broken lexicographically on (|l|, re, im); |l|^2 is rounded to
    12 significant digits first so symmetric points tie exactly.
    """
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    rho = math.sqrt(count / (PI * lattice.density)) + 2.0 * math.sqrt(1.0 / lattice.density)
    while True:
        layer = lattice_points_in_disk(lattice, rho)
        if len(layer) >= count:
            break
        rho *= 1.5
    z = layer.points
    r2 = np.array([float(f"{v:.12g}") for v in np.abs(z) ** 2])
    order = np.lexsort((z.imag, z.real, r2))
    return PointSet(z[order[:count]])
