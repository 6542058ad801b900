"""
Exact Diagonalization
=====================

Interacting fermions on small tori: fixed-n Fock basis, the sparse
Hamiltonian (hopping with boundary twists plus g1*m1 + g2*m2), low-lying
spectra with multiplet clustering, the strong-coupling convergence scan,
twist-torus Chern numbers of Slater determinants and CDW structure factors.

Fermionic order is the site index; a hop y -> x carries the sign
(-1)^(occupied sites strictly between x and y).
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from joblib import Parallel, delayed
from scipy import sparse
from scipy.optimize import linear_sum_assignment
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .chern import NonIntegerResidue
from .classical import batch_pair_counts, green_sector
from .composite import build_total_hopping, embedded_size
from .config import Limits, DEFAULT_LIMITS
from .hk import Twists, realspace_hamiltonian
from .lattice import SUBLATTICES, TorusLattice
from .models import (
    ChernResult,
    CouplingConstants,
    HKLatticeSize,
    HKParams,
    ManyBodySpectrum,
    OccupationConfig,
    ScanReport,
    ScanRow,
    SectorSpec,
    TwistGrid,
)

logger = logging.getLogger(__name__)

MAX_SITES = 62
SEED = 20240613
SLATER_MIN_SHAPE = (4, 4)
WINDOW_FACTOR = 3


class EDError(Exception):
    """Base exception for exact diagonalization"""
    pass


class DimensionExceeded(EDError):
    """Fock space too large for the requested path"""
    pass


class NoConvergence(EDError):
    """Iterative eigensolver did not converge"""

    def __init__(self, message: str, residuals: Optional[np.ndarray] = None):
        super().__init__(message)
        self.residuals = residuals


class GapClosedAtTwist(EDError):
    """Fermi-level gap closes somewhere on the twist grid"""
    pass


class ScanPreconditionError(EDError):
    """Strong-coupling scan called outside its regime"""
    pass


def _popcount(values: np.ndarray) -> np.ndarray:
    v = values.astype(np.uint64)
    v = v - ((v >> np.uint64(1)) & np.uint64(0x5555555555555555))
    v = (v & np.uint64(0x3333333333333333)) + ((v >> np.uint64(2)) & np.uint64(0x3333333333333333))
    v = (v + (v >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return ((v * np.uint64(0x0101010101010101)) >> np.uint64(56)).astype(np.int64)


class FockBasis:
    """n-particle configurations as ascending bitmasks"""

    def __init__(self, num_sites: int, n: int):
        if num_sites > MAX_SITES:
            raise DimensionExceeded(f"{num_sites} sites exceed the {MAX_SITES}-bit basis encoding")
        if not 0 <= n <= num_sites:
            raise ValueError(f"particle number {n} outside [0, {num_sites}]")
        self.num_sites = num_sites
        self.n = n
        masks = [sum(1 << site for site in sites) for sites in combinations(range(num_sites), n)]
        self.states = np.array(sorted(masks), dtype=np.int64)
        self._occupancy = None

    def __len__(self) -> int:
        return len(self.states)

    def index(self, masks) -> np.ndarray:
        """Positions of the given masks; every mask must be in the basis"""
        masks = np.asarray(masks, dtype=np.int64)
        positions = np.searchsorted(self.states, masks)
        if np.any(positions >= len(self.states)) or np.any(self.states[np.minimum(positions, len(self.states) - 1)] != masks):
            raise KeyError("mask outside the basis")
        return positions

    def config(self, i: int) -> OccupationConfig:
        return OccupationConfig(int(self.states[i]), self.num_sites)

    @property
    def occupancy(self) -> np.ndarray:
        """(dim, num_sites) 0/1 matrix"""
        if self._occupancy is None:
            shifts = np.arange(self.num_sites, dtype=np.int64)
            self._occupancy = (self.states[:, None] >> shifts[None, :]) & 1
        return self._occupancy


@dataclass
class ManyBodyHamiltonian:
    """Sparse hopping part plus the diagonal pair-count interaction"""

    lattice: TorusLattice
    basis: FockBasis
    kinetic: sparse.csr_matrix
    m1: np.ndarray
    m2: np.ndarray
    onsite: np.ndarray
    couplings: CouplingConstants
    twists: Twists = (0.0, 0.0)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def diagonal(self) -> np.ndarray:
        return self.couplings.g1 * self.m1 + self.couplings.g2 * self.m2 + self.onsite

    @property
    def matrix(self) -> sparse.csr_matrix:
        return (self.kinetic + sparse.diags(self.diagonal)).tocsr()

    def with_couplings(self, couplings: CouplingConstants) -> 'ManyBodyHamiltonian':
        return replace(self, couplings=couplings)


def build_many_body(
    lattice: TorusLattice,
    n: int,
    specs: Sequence[SectorSpec],
    couplings: CouplingConstants = CouplingConstants(),
    twists: Twists = (0.0, 0.0),
    t_nn: float = 0.0,
    limits: Limits = DEFAULT_LIMITS,
    hopping: Optional[np.ndarray] = None,
) -> ManyBodyHamiltonian:
    """
    Assemble H = sum t_xy a_x^dag a_y + g1*m1 + g2*m2 on the n-particle basis.

    Args:
        hopping: Explicit single-particle matrix replacing the one built
            from ``specs``; must be Hermitian on all torus sites

    Raises:
        DimensionExceeded: binomial(W*H, n) above limits.sparse_limit
    """
    num_sites = lattice.num_sites
    dimension = comb(num_sites, n)
    if dimension > limits.sparse_limit:
        raise DimensionExceeded(f"dimension C({num_sites},{n}) = {dimension} exceeds {limits.sparse_limit}")
    if hopping is None:
        hopping = build_total_hopping(lattice, specs, twists, t_nn).matrix
    basis = FockBasis(num_sites, n)
    states = basis.states
    logger.info(f"Building many-body Hamiltonian: {lattice}, n={n}, dimension {dimension}")

    m1, m2 = batch_pair_counts(basis.occupancy, lattice)
    onsite = basis.occupancy @ np.real(np.diag(hopping))

    rows, cols, data = [], [], []
    targets, sources = np.nonzero(hopping)
    for x, y in zip(targets, sources):
        if x == y:
            continue
        bit_x, bit_y = np.int64(1) << np.int64(x), np.int64(1) << np.int64(y)
        movable = np.nonzero(((states & bit_y) != 0) & ((states & bit_x) == 0))[0]
        if not len(movable):
            continue
        old = states[movable]
        new = old ^ bit_x ^ bit_y
        low, high = min(x, y), max(x, y)
        between = np.int64(((1 << high) - 1) ^ ((1 << (low + 1)) - 1))
        signs = 1 - 2 * (_popcount(old & between) & 1)
        rows.append(basis.index(new))
        cols.append(movable)
        data.append(hopping[x, y] * signs)

    if rows:
        kinetic = sparse.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dimension, dimension), dtype=complex,
        )
    else:
        kinetic = sparse.csr_matrix((dimension, dimension), dtype=complex)

    return ManyBodyHamiltonian(lattice, basis, kinetic, m1, m2, onsite, couplings, twists)


def cluster_levels(energies: Sequence[float], factor: float = DEFAULT_LIMITS.cluster_factor,
                   tolerance: float = DEFAULT_LIMITS.cluster_tolerance) -> List[Tuple[int, int, float]]:
    """
    Split ascending levels into multiplets.

    The run is cut at its largest gap; each side stays whole once its spread
    times ``factor`` is below the gap that separated it, and is cut again at
    its own largest gap otherwise. Levels within ``tolerance`` of each other
    are never split.

    Returns:
        (start, size, splitting) per cluster
    """
    energies = [float(e) for e in energies]
    clusters: List[Tuple[int, int, float]] = []

    def split(start: int, stop: int, parent_gap: Optional[float]) -> None:
        spread = energies[stop - 1] - energies[start]
        if stop - start == 1 or spread <= tolerance or (parent_gap is not None and factor * spread < parent_gap):
            clusters.append((start, stop - start, spread))
            return
        gaps = np.diff(energies[start:stop])
        cut = start + 1 + int(np.argmax(gaps))
        largest = float(gaps.max())
        split(start, cut, largest)
        split(cut, stop, largest)

    if energies:
        split(0, len(energies), None)
    return clusters


def _residuals(matrix, energies: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.linalg.norm(matrix @ vectors - vectors * energies[None, :], axis=0)


def low_spectrum(
    hamiltonian: ManyBodyHamiltonian,
    m: int,
    limits: Limits = DEFAULT_LIMITS,
    vectors: bool = False,
    method: str = 'auto',
) -> ManyBodySpectrum:
    """
    Lowest m eigenvalues, ascending.

    A purely diagonal Hamiltonian is sorted directly; otherwise dense eigh up
    to limits.dense_limit, Lanczos (eigsh, fixed start vector) above.
    """
    dimension = hamiltonian.dimension
    if not 1 <= m <= dimension:
        raise ValueError(f"m must lie in [1, {dimension}], got {m}")

    if hamiltonian.kinetic.nnz == 0:
        diagonal = hamiltonian.diagonal
        order = np.argsort(diagonal, kind='stable')[:m]
        energies = diagonal[order].astype(float)
        eigvecs = None
        if vectors:
            eigvecs = np.zeros((dimension, m), dtype=complex)
            eigvecs[order, np.arange(m)] = 1.0
        return ManyBodySpectrum(energies, eigvecs, cluster_levels(energies, limits.cluster_factor,
                                                                  limits.cluster_tolerance), 'diagonal')

    matrix = hamiltonian.matrix
    if method == 'auto':
        method = 'dense' if dimension <= limits.dense_limit else 'sparse'

    if method == 'dense':
        if dimension > limits.dense_build_limit:
            raise DimensionExceeded(f"dimension {dimension} too large for dense diagonalization")
        result = scipy.linalg.eigh(matrix.toarray(), subset_by_index=[0, m - 1],
                                   eigvals_only=not vectors, overwrite_a=True, check_finite=False)
        energies, eigvecs = (result, None) if not vectors else result
        residuals = None
    elif method == 'sparse':
        if m >= dimension - 1:
            raise DimensionExceeded("Lanczos needs m < dimension - 1; use method='dense'")
        v0 = np.random.default_rng(SEED).standard_normal(dimension).astype(complex)
        ncv = min(dimension, max(2 * m + 1, 20))
        try:
            energies, eigvecs = eigsh(matrix, k=m, which='SA', v0=v0, ncv=ncv)
        except ArpackNoConvergence as e:
            residuals = _residuals(matrix, e.eigenvalues, e.eigenvectors) if len(e.eigenvalues) else None
            raise NoConvergence(f"Lanczos converged {len(e.eigenvalues)} of {m} levels", residuals)
        order = np.argsort(energies)
        energies, eigvecs = energies[order], eigvecs[:, order]
        residuals = _residuals(matrix, energies, eigvecs)
        if not vectors:
            eigvecs = None
    else:
        raise ValueError(f"unknown method {method!r}")

    energies = np.asarray(energies, dtype=float)
    clusters = cluster_levels(energies, limits.cluster_factor, limits.cluster_tolerance)
    logger.debug(f"Low spectrum ({method}): multiplets {[size for _, size, _ in clusters]}")
    return ManyBodySpectrum(energies, eigvecs, clusters, method, residuals)


# ===== Strong coupling =====

def effective_levels(lattice: TorusLattice, specs: Sequence[SectorSpec], extra: int, g2: float,
                     twists: Twists = (0.0, 0.0)) -> List[float]:
    """
    Decoupled-limit levels: each sector pattern filled, ``extra`` fermions
    in the green block, 4*g2 per green fermion.
    """
    hopping = build_total_hopping(lattice, specs, twists)
    levels = []
    for spec in specs:
        green = np.linalg.eigvalsh(hopping.block(green_sector(spec.sector)))
        frozen = float(np.trace(hopping.block(spec.sector)).real)
        for chosen in combinations(range(len(green)), extra):
            levels.append(4 * extra * g2 + frozen + float(sum(green[i] for i in chosen)))
    return sorted(levels)


def match_levels(reference: Sequence[float], energies: Sequence[float]) -> Tuple[float, int]:
    """
    Assign every reference level to a distinct computed level.

    Returns:
        (max |deviation| over the assignment, number of the lowest
        len(reference) computed levels left unassigned)
    """
    reference = np.asarray(reference, dtype=float)
    energies = np.asarray(energies, dtype=float)
    cost = np.abs(reference[:, None] - energies[None, :])
    rows, cols = linear_sum_assignment(cost)
    deviation = float(np.max(cost[rows, cols])) if len(rows) else 0.0
    intruders = int(np.sum(~np.isin(np.arange(len(reference)), cols)))
    return deviation, intruders


def strong_coupling_scan(
    lattice: TorusLattice,
    n: int,
    specs: Sequence[SectorSpec],
    g2: float,
    g1_values: Sequence[float],
    t_scale: float = 1.0,
    t_nn: float = 0.0,
    limits: Limits = DEFAULT_LIMITS,
    method: str = 'auto',
) -> ScanReport:
    """
    Max deviation of the full low spectrum from the decoupled-limit levels,
    per g1.

    Levels with m1 = 0 but larger m2 (other checkerboard fillings) can drop
    below the top of the decoupled band once the hopping width exceeds g2,
    so each decoupled level is matched to a distinct level among the lowest
    WINDOW_FACTOR * len(reference) instead of assuming the bottom of the
    spectrum is the decoupled band.

    With method='auto' the levels come from Lanczos once the dimension
    exceeds limits.scan_dense_limit and the window is under a tenth of it.

    Raises:
        ScanPreconditionError: g1 not ascending or below 10*(g2 + max|t|)
    """
    embedded_size(lattice)
    quarter = lattice.num_sites // 4
    extra = n - quarter
    if not 0 <= extra <= quarter:
        raise ScanPreconditionError(f"n={n} is not a sector pattern plus at most {quarter} green fermions")
    if list(g1_values) != sorted(set(g1_values)):
        raise ScanPreconditionError(f"g1 values must be strictly ascending, got {list(g1_values)}")
    scaled = [SectorSpec(spec.sector, spec.params.scaled(t_scale), spec.origin) for spec in specs]
    t_max = max([spec.params.max_abs for spec in scaled] + [abs(t_nn)])
    floor = 10 * (g2 + t_max)
    if any(g1 < floor for g1 in g1_values):
        raise ScanPreconditionError(f"every g1 must be at least 10*(g2 + max|t|) = {floor}")

    reference = effective_levels(lattice, scaled, extra, g2)
    hamiltonian = build_many_body(lattice, n, scaled, CouplingConstants(g1_values[0], g2),
                                  t_nn=t_nn, limits=limits)
    dimension = hamiltonian.dimension
    window = min(dimension, WINDOW_FACTOR * len(reference))
    if method == 'auto':
        sparse_window = dimension > limits.scan_dense_limit and 10 * window < dimension
        method = 'sparse' if sparse_window else 'dense'
    rows = []
    for g1 in g1_values:
        spectrum = low_spectrum(hamiltonian.with_couplings(CouplingConstants(g1, g2)), window, limits,
                                method=method)
        deviation, intruders = match_levels(reference, spectrum.energies)
        logger.info(f"Scan g1={g1}: max deviation {deviation:.3e}, {intruders} intruding levels")
        rows.append(ScanRow(float(g1), deviation, intruders))
    report = ScanReport(rows, reference, g2, t_scale, t_nn, method)
    if not report.decreasing:
        logger.warning("Scan deviations do not decrease with g1")
    return report


# ===== Twist-torus Chern numbers =====

def _occupied_orbitals(params: HKParams, size: HKLatticeSize, twists: Twists, occupied: int,
                       threshold: float) -> np.ndarray:
    energies, orbitals = np.linalg.eigh(realspace_hamiltonian(params, size, twists))
    if 0 < occupied < len(energies) and energies[occupied] - energies[occupied - 1] <= threshold:
        raise GapClosedAtTwist(f"Fermi gap {energies[occupied] - energies[occupied - 1]:.3g} at twists {twists}")
    return orbitals[:, :occupied]


def slater_chern(
    params: Union[HKParams, SectorSpec],
    size: HKLatticeSize,
    grid: TwistGrid = TwistGrid(8),
    filling: Fraction = Fraction(1, 2),
    limits: Limits = DEFAULT_LIMITS,
    jobs: int = 1,
) -> ChernResult:
    """
    Chern number of the ground Slater determinant over the twist torus.

    Links are det(V(theta)^dag V(theta')) of the occupied orbitals at
    neighbouring grid points, wrapping at 2*pi.
    """
    if isinstance(params, SectorSpec):
        params = params.params
    if size.shape[0] < SLATER_MIN_SHAPE[0] or size.shape[1] < SLATER_MIN_SHAPE[1]:
        raise EDError(f"green lattice {size.shape} smaller than {SLATER_MIN_SHAPE}")
    occupied = Fraction(filling) * size.dimension
    if occupied.denominator != 1:
        raise EDError(f"filling {filling} does not give an integer particle number on {size.dimension} sites")
    occupied = int(occupied)
    if occupied == 0:
        return ChernResult(params, 'slater', 0, 0.0, 0.0, grid=grid.size)

    threshold = limits.gap_threshold * max(params.max_abs, 1.0)
    logger.info(f"Slater Chern: {params}, {size.shape}, {occupied} particles, {grid.size}x{grid.size} twists")
    orbitals = Parallel(n_jobs=jobs)(
        delayed(_occupied_orbitals)(params, size, twists, occupied, threshold) for twists in grid.points()
    )
    count = grid.size
    frames = np.empty((count, count) + orbitals[0].shape, dtype=complex)
    for index, block in enumerate(orbitals):
        frames[index // count, index % count] = block

    def link(axis):
        shifted = np.roll(frames, -1, axis=axis)
        overlaps = np.einsum('ijak,ijal->ijkl', frames.conj(), shifted)
        determinant = np.linalg.det(overlaps)
        return determinant / np.abs(determinant)

    u1, u2 = link(0), link(1)
    field = -np.angle(u1 * np.roll(u2, -1, axis=0) * np.conj(np.roll(u1, -1, axis=1)) * np.conj(u2))
    total = float(np.sum(field) / (2 * np.pi))
    chern = int(round(total))
    residue = abs(total - chern)
    if residue >= limits.residue_tolerance:
        raise NonIntegerResidue(f"twist-torus total {total:.9f} on a {count}x{count} grid; refine the grid")
    return ChernResult(params, 'slater', chern, total, residue, grid=grid.size)


def composite_many_body_chern(
    specs: Sequence[SectorSpec],
    size: HKLatticeSize,
    grid: TwistGrid = TwistGrid(8),
    limits: Limits = DEFAULT_LIMITS,
    jobs: int = 1,
) -> Fraction:
    """Average of the four sector Slater Chern numbers as an exact rational"""
    by_sector = {spec.sector: spec for spec in specs}
    if set(by_sector) != set(SUBLATTICES):
        raise EDError(f"need one spec per sector, got {sorted(by_sector)}")
    sigma = [slater_chern(by_sector[sector], size, grid, limits=limits, jobs=jobs).chern for sector in SUBLATTICES]
    return Fraction(sum(sigma), 4)


# ===== Structure factor =====

def _momentum_phases(lattice: TorusLattice, q: Tuple[float, float]) -> np.ndarray:
    coords = np.array([lattice.coords(site) for site in lattice.sites()], dtype=float)
    return np.exp(1j * (coords @ np.asarray(q, dtype=float)))


def structure_factor(
    state: Union[OccupationConfig, np.ndarray],
    lattice: TorusLattice,
    q: Tuple[float, float],
    basis: Optional[FockBasis] = None,
) -> float:
    """
    S(Q) of a classical configuration, (1/N)|sum_x e^{iQx}(n_x - nu)|^2, or
    of a many-body vector on ``basis`` from connected density correlations.
    """
    phases = _momentum_phases(lattice, q)
    num_sites = lattice.num_sites
    if isinstance(state, OccupationConfig):
        nu = state.n / num_sites
        amplitude = np.sum(phases * (state.occupancy() - nu))
        return float(abs(amplitude) ** 2 / num_sites)
    if basis is None:
        raise ValueError("a many-body vector needs its FockBasis")
    vector = np.asarray(state, dtype=complex)
    probabilities = np.abs(vector) ** 2 / np.vdot(vector, vector).real
    occupancy = basis.occupancy.astype(float)
    correlations = occupancy.T @ (probabilities[:, None] * occupancy)
    nu = basis.n / num_sites
    value = phases @ (correlations - nu * nu) @ phases.conj()
    return float(value.real / num_sites)


def mixture_structure_factor(configs: Sequence[OccupationConfig], lattice: TorusLattice,
                             q: Tuple[float, float]) -> float:
    """Equal-weight average of classical structure factors"""
    if not configs:
        raise ValueError("empty mixture")
    return float(np.mean([structure_factor(config, lattice, q) for config in configs]))
