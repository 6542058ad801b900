"""
Composite Phase
===============

Four HK copies, one per classical ground-state sector, each living on the
sector's green sublattice. The sector Chern vector sigma gives the averaged
Chern number sum(sigma)/4 as an exact rational:

- |sum(sigma)| = 2 (three equal, one opposite): FCI, average +-1/2
- all sigma equal: CDW, average +-1
- otherwise: OTHER

The total hopping matrix embeds each copy with spacing 2 on the W x H torus.
HK column l and row n of sector copy sit at original coordinates
(2u + a, 2v + b) with l = (u + origin) mod (W/2), n = v.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .chern import chern_analytic, chern_plaquette
from .classical import green_sector
from .config import Limits, DEFAULT_LIMITS
from .hk import Twists, hk_bonds
from .lattice import SUBLATTICES, SublatticeId, TorusLattice, sublattice_sites, translation_permutation
from .models import CompositeReport, HKLatticeSize, HKParams, SectorSpec

logger = logging.getLogger(__name__)

FCI = 'FCI'
CDW = 'CDW'
OTHER = 'OTHER'

UNIT_SHIFTS: Dict[str, Tuple[int, int]] = {'e1': (1, 0), 'e2': (0, 1)}


class CompositeError(Exception):
    """Base exception for the composite construction"""
    pass


class SizeNotEmbeddable(CompositeError):
    """Torus dimensions are not multiples of 4"""
    pass


@dataclass
class TotalHoppingMatrix:
    """Hermitian hopping matrix on all torus sites"""

    lattice: TorusLattice
    matrix: np.ndarray

    def block(self, sublattice: SublatticeId) -> np.ndarray:
        """Restriction to one sublattice, sites in row-major order"""
        sites = sublattice_sites(self.lattice, sublattice)
        return self.matrix[np.ix_(sites, sites)]

    @property
    def is_hermitian(self) -> bool:
        return bool(np.array_equal(self.matrix, self.matrix.conj().T))


def uniform_specs(params: HKParams, origin: int = 0) -> List[SectorSpec]:
    """Identical specs for all four sectors"""
    return [SectorSpec(sector, params, origin) for sector in SUBLATTICES]


def specs_from_params(params: Sequence[HKParams], origin: int = 0) -> List[SectorSpec]:
    """Specs in sector order (0,0), (1,0), (0,1), (1,1)"""
    if len(params) != 4:
        raise CompositeError(f"need four sector parameter sets, got {len(params)}")
    return [SectorSpec(sector, p, origin) for sector, p in zip(SUBLATTICES, params)]


def _ordered(specs: Sequence[SectorSpec]) -> List[SectorSpec]:
    by_sector = {spec.sector: spec for spec in specs}
    if len(specs) != 4 or set(by_sector) != set(SUBLATTICES):
        raise CompositeError(f"need one spec per sector, got {[spec.sector for spec in specs]}")
    return [by_sector[sector] for sector in SUBLATTICES]


def sector_chern(spec: SectorSpec, method: str = 'plaquette', grid: int = 24,
                 limits: Limits = DEFAULT_LIMITS) -> int:
    """Chern number of the half-filled HK copy on the sector's green sublattice"""
    if method == 'analytic':
        return chern_analytic(spec.params)
    if method == 'plaquette':
        return chern_plaquette(spec.params, grid, limits)
    raise ValueError(f"unknown method {method!r}")


def classify_phase(sigma: Sequence[int]) -> str:
    total = sum(sigma)
    if len(set(sigma)) == 1:
        return CDW
    if abs(total) == 2:
        return FCI
    return OTHER


def embedded_size(lattice: TorusLattice) -> HKLatticeSize:
    """HK size of each sector copy: L1 = W/4, L2 = H/2"""
    if lattice.width % 4 or lattice.height % 4:
        raise SizeNotEmbeddable(f"torus {lattice} needs both dimensions divisible by 4")
    return HKLatticeSize(lattice.width // 4, lattice.height // 2)


def build_total_hopping(
    lattice: TorusLattice,
    specs: Sequence[SectorSpec],
    twists: Twists = (0.0, 0.0),
    t_nn: float = 0.0,
) -> TotalHoppingMatrix:
    """
    Embed the four sector copies and apply the boundary twists.

    A bond picks up exp(i * theta_a * w_a) for every wrap w_a of the
    original torus in direction a. ``t_nn`` adds a real nearest-neighbour
    hop between sublattices; it is zero in the decoupled construction.
    """
    size = embedded_size(lattice)
    half_w = lattice.width // 2
    phases = (np.exp(1j * twists[0]), np.exp(1j * twists[1]))
    matrix = np.zeros((lattice.num_sites, lattice.num_sites), dtype=complex)

    def add(row: int, x1: int, x2: int, amplitude: complex):
        w1, col1 = divmod(x1, lattice.width)
        w2, col2 = divmod(x2, lattice.height)
        value = amplitude * phases[0] ** w1 * phases[1] ** w2
        col = col1 + lattice.width * col2
        matrix[row, col] += value
        matrix[col, row] += np.conj(value)

    for spec in _ordered(specs):
        a, b = green_sector(spec.sector)
        for ell, n, dl, dn, amplitude in hk_bonds(spec.params, size):
            if amplitude == 0:
                continue
            u = (ell - spec.origin) % half_w
            row = lattice.index(2 * u + a, 2 * n + b)
            add(row, 2 * (u + dl) + a, 2 * (n + dn) + b, amplitude)

    if t_nn:
        for site in range(lattice.num_sites):
            x1, x2 = lattice.coords(site)
            for d1, d2 in ((1, 0), (0, 1)):
                add(site, x1 + d1, x2 + d2, complex(t_nn))

    logger.debug(f"Total hopping on {lattice}: {np.count_nonzero(matrix)} nonzero elements")
    return TotalHoppingMatrix(lattice, matrix)


def translation_check(hopping: TotalHoppingMatrix, shift: Tuple[int, int]) -> bool:
    """True iff P^T M P == M exactly for the torus translation by ``shift``"""
    perm = translation_permutation(hopping.lattice, shift)
    moved = hopping.matrix[np.ix_(perm, perm)]
    return bool(np.array_equal(moved, hopping.matrix))


def composite_chern(
    specs: Sequence[SectorSpec],
    method: str = 'plaquette',
    grid: int = 24,
    lattice: TorusLattice = TorusLattice(8, 8),
    limits: Limits = DEFAULT_LIMITS,
) -> CompositeReport:
    """
    Sector Chern vector, exact average and phase label, plus the unit-shift
    invariance flags of the total hopping on ``lattice``.
    """
    ordered = _ordered(specs)
    sigma = tuple(sector_chern(spec, method, grid, limits) for spec in ordered)
    average = Fraction(sum(sigma), 4)
    hopping = build_total_hopping(lattice, ordered)
    flags = {name: translation_check(hopping, shift) for name, shift in UNIT_SHIFTS.items()}
    phase = classify_phase(sigma)
    logger.info(f"Composite sigma={sigma} average={average} phase={phase}")
    return CompositeReport(sigma=sigma, average=average, phase=phase,
                           translation_invariant=flags, specs=ordered)
