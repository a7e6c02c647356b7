"""Driven dissipative Bose-Hubbard lattice definitions.

A model is a list of per-site physical parameters plus a weighted connection
graph.  Each unordered site pair appears at most once in the connection list;
the stored amplitude is the transfer amplitude ``J_ij`` for hopping i -> j,
with the reverse amplitude ``J_ji = conj(J_ij)`` implied.

Builders are provided for the geometries used throughout: uniform periodic
square lattices, 1d/2d Lieb lattices pumped on their C sites, and arbitrary
drive masks on open or periodic rectangular grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, InvalidModel

__all__ = [
    "SiteParams",
    "PiecewiseDrive",
    "Connection",
    "Geometry",
    "LatticeModel",
    "validate",
    "build_square_periodic",
    "build_lieb",
    "build_from_mask",
    "build_custom",
    "permute_sites",
    "occupation_estimate",
    "lieb_site_indices",
    "lieb_b_nn_pairs",
    "square_row_pairs",
]


@dataclass(frozen=True)
class PiecewiseDrive:
    """Piecewise-constant drive amplitude F(t).

    ``values[i]`` applies for ``times[i] <= t < times[i+1]``; the first switch
    time must be 0 and times must be strictly increasing.
    """

    times: tuple[float, ...]
    values: tuple[complex, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values) or not self.times:
            raise InvalidArgument("piecewise drive needs matching, nonempty times/values")
        if self.times[0] != 0.0:
            raise InvalidArgument("piecewise drive must start at t=0")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise InvalidArgument("piecewise drive times must be strictly increasing")

    def at(self, t: float) -> complex:
        idx = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.values[max(idx, 0)]


@dataclass(frozen=True)
class SiteParams:
    """Local physics of one lattice site (all rates in the same energy units)."""

    detuning: float = 0.0
    interaction: float = 0.0
    drive: complex | PiecewiseDrive = 0.0 + 0.0j
    dissipation: float = 0.0
    bath_occupation: float = 0.0

    def drive_at(self, t: float) -> complex:
        if isinstance(self.drive, PiecewiseDrive):
            return self.drive.at(t)
        return complex(self.drive)

    @property
    def time_dependent(self) -> bool:
        return isinstance(self.drive, PiecewiseDrive)


@dataclass(frozen=True)
class Connection:
    """One tunneling bond.

    ``amplitude`` is J_ij for the stored (i, j) orientation; the conjugate
    applies for j -> i.
    """

    i: int
    j: int
    amplitude: complex


@dataclass(frozen=True)
class Geometry:
    """Optional metadata recorded by the builders.

    ``kind`` is one of "custom", "square_periodic", "lieb_1d", "lieb_2d",
    "mask".  ``extents`` are (rows, cols) style counts in builder-specific
    units (unit cells for Lieb).  ``labels`` carries per-site sublattice tags
    for Lieb lattices.  ``periodic`` records the boundary condition choice.
    """

    kind: str = "custom"
    extents: tuple[int, ...] = ()
    labels: tuple[str, ...] | None = None
    periodic: bool = True


@dataclass(frozen=True)
class LatticeModel:
    """Validated lattice: site parameters plus connection graph.

    Immutable after construction and safe to share across trajectory workers.
    ``stream_labels`` names the per-site noise stream used by the trajectory
    engine; by default it is the site index.  Permuting a model while keeping
    the original labels lets relabeled runs reuse identical noise.
    """

    sites: tuple[SiteParams, ...]
    connections: tuple[Connection, ...] = ()
    geometry: Geometry = field(default_factory=Geometry)
    stream_labels: tuple[int, ...] | None = None

    def __post_init__(self):
        validate(self)

    @property
    def m(self) -> int:
        return len(self.sites)

    @property
    def time_dependent(self) -> bool:
        return any(s.time_dependent for s in self.sites)

    def site_arrays(self) -> dict[str, np.ndarray]:
        """Per-site parameters as dense arrays (static drive evaluated at t=0)."""
        return {
            "detuning": np.array([s.detuning for s in self.sites], dtype=np.float64),
            "interaction": np.array([s.interaction for s in self.sites], dtype=np.float64),
            "drive": np.array([s.drive_at(0.0) for s in self.sites], dtype=np.complex128),
            "dissipation": np.array([s.dissipation for s in self.sites], dtype=np.float64),
            "bath_occupation": np.array(
                [s.bath_occupation for s in self.sites], dtype=np.float64
            ),
        }

    def drive_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Drive as a piecewise-constant table (switch_times, values[k, site])."""
        times = {0.0}
        for s in self.sites:
            if isinstance(s.drive, PiecewiseDrive):
                times.update(s.drive.times)
        t_switch = np.array(sorted(times), dtype=np.float64)
        vals = np.empty((t_switch.size, self.m), dtype=np.complex128)
        for k, t in enumerate(t_switch):
            for j, s in enumerate(self.sites):
                vals[k, j] = s.drive_at(t)
        return t_switch, vals

    def adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Incoming-neighbor lists in CSR form.

        Returns (indptr, neighbor_index, amplitude) such that the tunneling
        drift of site j sums i*amplitude[p]*alpha[neighbor_index[p]] over
        p in [indptr[j], indptr[j+1]).  amplitude[p] is J_kj for k -> j.
        """
        per_site: list[list[tuple[int, complex]]] = [[] for _ in range(self.m)]
        for c in self.connections:
            per_site[c.j].append((c.i, complex(c.amplitude)))
            per_site[c.i].append((c.j, np.conj(complex(c.amplitude))))
        indptr = np.zeros(self.m + 1, dtype=np.int64)
        for j in range(self.m):
            indptr[j + 1] = indptr[j] + len(per_site[j])
        idx = np.zeros(indptr[-1], dtype=np.int64)
        amp = np.zeros(indptr[-1], dtype=np.complex128)
        p = 0
        for j in range(self.m):
            for k, a in per_site[j]:
                idx[p] = k
                amp[p] = a
                p += 1
        return indptr, idx, amp

    def streams(self) -> np.ndarray:
        if self.stream_labels is None:
            return np.arange(self.m, dtype=np.uint64)
        return np.array(self.stream_labels, dtype=np.uint64)


def validate(model: LatticeModel) -> None:
    """Raise InvalidModel on the first violated structural constraint."""
    m = len(model.sites)
    if m < 1:
        raise InvalidModel("model needs at least one site")
    for j, s in enumerate(model.sites):
        if s.interaction < 0:
            raise InvalidModel(f"site {j}: negative interaction {s.interaction}")
        if s.dissipation < 0:
            raise InvalidModel(f"site {j}: negative dissipation {s.dissipation}")
        if s.bath_occupation < 0:
            raise InvalidModel(f"site {j}: negative bath occupation {s.bath_occupation}")
    seen: set[tuple[int, int]] = set()
    for c in model.connections:
        if not (0 <= c.i < m and 0 <= c.j < m):
            raise InvalidModel(f"connection ({c.i},{c.j}) out of range for {m} sites")
        if c.i == c.j:
            raise InvalidModel(f"self connection at site {c.i}")
        key = (min(c.i, c.j), max(c.i, c.j))
        if key in seen:
            raise InvalidModel(f"duplicate connection pair {key}")
        seen.add(key)
    if model.stream_labels is not None and len(model.stream_labels) != m:
        raise InvalidModel("stream_labels length must match site count")
    if model.geometry.labels is not None and len(model.geometry.labels) != m:
        raise InvalidModel("geometry labels length must match site count")


def build_custom(
    sites: Sequence[SiteParams],
    connections: Sequence[Connection] = (),
    geometry: Geometry | None = None,
) -> LatticeModel:
    """Model from explicit site and connection lists."""
    return LatticeModel(
        sites=tuple(sites),
        connections=tuple(connections),
        geometry=geometry or Geometry(),
    )


def build_square_periodic(m: int, site: SiteParams, tunneling: float) -> LatticeModel:
    """Uniform m x m periodic square lattice.

    Per-connection amplitude is J/z with coordination z=4 for m>2 and z=2 for
    m=2, where the doubled wrap-around bond collapses to a single stored
    connection; either way the incoming amplitudes at each site sum to J.
    Sites are indexed row-major, index = row*m + col.
    """
    if m < 2:
        raise InvalidArgument("square lattice needs m >= 2")
    z = 4 if m > 2 else 2
    amp = tunneling / z
    conns = []
    for r in range(m):
        for c in range(m):
            j = r * m + c
            right = r * m + (c + 1) % m
            down = ((r + 1) % m) * m + c
            conns.append(Connection(j, right, amp))
            if m > 2:
                conns.append(Connection(j, down, amp))
            elif r == 0:
                # m=2: the vertical pair would be duplicated by the wrap
                conns.append(Connection(j, down, amp))
    return LatticeModel(
        sites=(site,) * (m * m),
        connections=tuple(conns),
        geometry=Geometry(kind="square_periodic", extents=(m, m), periodic=True),
    )


def lieb_site_indices(base: int) -> tuple[int, int, int]:
    """(A, B, C) site indices for the unit cell starting at flat index base."""
    return base, base + 1, base + 2


def build_lieb(
    n_cells: int | tuple[int, int],
    dim: int,
    tunneling: float,
    pumped: SiteParams,
    dark: SiteParams,
) -> LatticeModel:
    """Periodic Lieb lattice with 3 sites (A, B, C) per unit cell.

    B is the high-coordination hub, A bridges hubs along the chain (the x
    axis in 2d), and C hangs off each hub (bridging hubs along y in 2d).
    Only the C sites carry drive; A and B take the ``dark`` parameters, which
    must have zero drive.  Every connection carries the full amplitude J.
    """
    if dim not in (1, 2):
        raise InvalidArgument(f"unsupported Lieb dimension {dim}")
    if isinstance(pumped.drive, PiecewiseDrive) or isinstance(dark.drive, PiecewiseDrive):
        raise InvalidArgument("Lieb builder takes static drives")
    if complex(dark.drive) != 0:
        raise InvalidArgument("dark (A/B) sites must have zero drive")

    def cell_sites() -> tuple[SiteParams, SiteParams, SiteParams]:
        return dark, dark, pumped  # A, B, C

    conns: list[Connection] = []
    sites: list[SiteParams] = []
    labels: list[str] = []
    if dim == 1:
        n = n_cells if isinstance(n_cells, int) else n_cells[0]
        if n < 1:
            raise InvalidArgument("Lieb lattice needs at least one cell")
        for c in range(n):
            sites.extend(cell_sites())
            labels.extend("ABC")
        for c in range(n):
            a, b, cc = lieb_site_indices(3 * c)
            _, b_next, _ = lieb_site_indices(3 * ((c + 1) % n))
            conns.append(Connection(b, a, tunneling))
            conns.append(Connection(a, b_next, tunneling))
            conns.append(Connection(b, cc, tunneling))
        extents: tuple[int, ...] = (n,)
        kind = "lieb_1d"
    else:
        if isinstance(n_cells, int):
            nx = ny = n_cells
        else:
            nx, ny = n_cells
        if nx < 1 or ny < 1:
            raise InvalidArgument("Lieb lattice needs at least one cell")
        base_of = lambda cx, cy: 3 * (cy * nx + cx)
        for cy in range(ny):
            for cx in range(nx):
                sites.extend(cell_sites())
                labels.extend("ABC")
        for cy in range(ny):
            for cx in range(nx):
                a, b, c = lieb_site_indices(base_of(cx, cy))
                b_right = base_of((cx + 1) % nx, cy) + 1
                b_up = base_of(cx, (cy + 1) % ny) + 1
                conns.append(Connection(b, a, tunneling))
                conns.append(Connection(a, b_right, tunneling))
                conns.append(Connection(b, c, tunneling))
                conns.append(Connection(c, b_up, tunneling))
        extents = (nx, ny)
        kind = "lieb_2d"

    # single-cell wraps produce the same unordered pair twice; keep one copy
    seen: set[tuple[int, int]] = set()
    unique: list[Connection] = []
    for k in conns:
        key = (min(k.i, k.j), max(k.i, k.j))
        if key in seen:
            continue
        seen.add(key)
        unique.append(k)

    return LatticeModel(
        sites=tuple(sites),
        connections=tuple(unique),
        geometry=Geometry(kind=kind, extents=extents, labels=tuple(labels), periodic=True),
    )


def build_from_mask(
    grid: Sequence[Sequence[int]] | np.ndarray,
    drive_on: complex,
    drive_off: complex,
    site: SiteParams,
    tunneling: float,
    periodic: bool = False,
) -> LatticeModel:
    """One site per cell of a rectangular 0/1 mask.

    Mask value 1 drives the site with ``drive_on``, 0 with ``drive_off``.
    Nearest-neighbor connections all carry the full amplitude J.  Boundaries
    are open by default (a bounded physical sample), periodic on request; the
    choice is recorded in the geometry metadata.  Sites are indexed row-major.
    """
    from .errors import InvalidMask

    rows = [list(r) for r in grid]
    if not rows or not rows[0]:
        raise InvalidMask("empty mask")
    ncol = len(rows[0])
    if any(len(r) != ncol for r in rows):
        raise InvalidMask("ragged mask")
    arr = np.array(rows)
    if not np.isin(arr, (0, 1)).all():
        raise InvalidMask("mask entries must be 0 or 1")
    nrow = arr.shape[0]

    sites = tuple(
        replace(site, drive=complex(drive_on) if arr[r, c] else complex(drive_off))
        for r in range(nrow)
        for c in range(ncol)
    )
    conns = []
    for r in range(nrow):
        for c in range(ncol):
            j = r * ncol + c
            if c + 1 < ncol:
                conns.append(Connection(j, j + 1, tunneling))
            elif periodic and ncol > 2:
                conns.append(Connection(j, r * ncol, tunneling))
            if r + 1 < nrow:
                conns.append(Connection(j, j + ncol, tunneling))
            elif periodic and nrow > 2:
                conns.append(Connection(j, c, tunneling))
    return LatticeModel(
        sites=sites,
        connections=tuple(conns),
        geometry=Geometry(kind="mask", extents=(nrow, ncol), periodic=periodic),
    )


def permute_sites(model: LatticeModel, perm: Sequence[int]) -> LatticeModel:
    """Relabel sites by ``perm`` (new index = perm[old index]).

    The noise stream labels keep following the original site identities, so a
    run of the permuted model draws identical noise per physical site and its
    observables are exact permutations of the original run's.
    """
    perm = list(perm)
    if sorted(perm) != list(range(model.m)):
        raise InvalidArgument("perm must be a permutation of range(m)")
    new_sites: list[SiteParams] = [model.sites[0]] * model.m
    new_streams = [0] * model.m
    old_streams = model.streams()
    for old, new in enumerate(perm):
        new_sites[new] = model.sites[old]
        new_streams[new] = int(old_streams[old])
    new_conns = tuple(
        Connection(perm[c.i], perm[c.j], c.amplitude) for c in model.connections
    )
    labels = model.geometry.labels
    if labels is not None:
        new_labels: list[str] = [""] * model.m
        for old, new in enumerate(perm):
            new_labels[new] = labels[old]
        labels = tuple(new_labels)
    return LatticeModel(
        sites=tuple(new_sites),
        connections=new_conns,
        geometry=replace(model.geometry, kind="custom", labels=labels),
        stream_labels=tuple(new_streams),
    )


def occupation_estimate(model: LatticeModel) -> float:
    """Rough steady occupation guess used for timestep and divergence scales.

    Per site: the strongly damped estimate (2|F|/gamma)^2 capped by the strong
    drive estimate (|F|/U)^(2/3), whichever regime applies, plus the bath
    occupation.  The maximum over sites is returned.
    """
    best = 0.0
    for s in model.sites:
        f = abs(s.drive_at(0.0))
        if isinstance(s.drive, PiecewiseDrive):
            f = max(abs(v) for v in s.drive.values)
        cands = []
        if s.dissipation > 0:
            cands.append((2.0 * f / s.dissipation) ** 2)
        if s.interaction > 0:
            cands.append((f / s.interaction) ** (2.0 / 3.0))
        n = min(cands) if cands else 0.0
        best = max(best, n + s.bath_occupation)
    return best


def square_row_pairs(model: LatticeModel) -> np.ndarray:
    """Directed nearest-neighbor pairs (j, right of j) along one lattice axis.

    Defined for square-lattice geometry; used by the g1nn estimator.
    """
    from .errors import GeometryMismatch

    g = model.geometry
    if g.kind != "square_periodic":
        raise GeometryMismatch("g1nn needs a periodic square lattice geometry tag")
    m = g.extents[0]
    pairs = np.empty((model.m, 2), dtype=np.int64)
    for r in range(m):
        for c in range(m):
            j = r * m + c
            pairs[j] = (j, r * m + (c + 1) % m)
    return pairs


def lieb_b_nn_pairs(model: LatticeModel) -> np.ndarray:
    """B-site pairs in nearest-neighbor unit cells of a Lieb lattice."""
    from .errors import GeometryMismatch

    g = model.geometry
    if g.kind == "lieb_1d":
        n = g.extents[0]
        return np.array(
            [(3 * c + 1, 3 * ((c + 1) % n) + 1) for c in range(n)], dtype=np.int64
        )
    if g.kind == "lieb_2d":
        nx, ny = g.extents
        pairs = []
        for cy in range(ny):
            for cx in range(nx):
                b = 3 * (cy * nx + cx) + 1
                pairs.append((b, 3 * (cy * nx + (cx + 1) % nx) + 1))
                pairs.append((b, 3 * (((cy + 1) % ny) * nx + cx) + 1))
        return np.array(pairs, dtype=np.int64)
    raise GeometryMismatch("B-site pairs need a Lieb geometry tag")
