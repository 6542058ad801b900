"""
Data Models
===========

Data classes shared by the analysis modules: occupation configurations,
exact pair counts, hopping parameters, sector specifications and the
reports the CLI serializes.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Any, Optional, List, Tuple, Iterable

import numpy as np


SublatticeId = Tuple[int, int]


def popcount(mask: int) -> int:
    return bin(mask).count('1')


@dataclass(frozen=True)
class OccupationConfig:
    """Bit-encoded fermion occupation of the torus sites (bit i = site i)"""

    mask: int
    num_sites: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.num_sites:
            raise ValueError(f"mask {self.mask:#x} does not fit {self.num_sites} sites")

    @classmethod
    def from_sites(cls, sites: Iterable[int], num_sites: int) -> 'OccupationConfig':
        mask = 0
        for site in sites:
            if not 0 <= site < num_sites:
                raise ValueError(f"site {site} outside [0, {num_sites})")
            mask |= 1 << site
        return cls(mask, num_sites)

    @property
    def n(self) -> int:
        return popcount(self.mask)

    def sites(self) -> List[int]:
        return [i for i in range(self.num_sites) if self.mask >> i & 1]

    def occupied(self, site: int) -> bool:
        return bool(self.mask >> site & 1)

    def occupancy(self) -> np.ndarray:
        """0/1 occupation vector"""
        return np.array([self.mask >> i & 1 for i in range(self.num_sites)], dtype=np.int64)

    def with_site(self, site: int) -> 'OccupationConfig':
        return OccupationConfig(self.mask | (1 << site), self.num_sites)

    def union(self, other: 'OccupationConfig') -> 'OccupationConfig':
        return OccupationConfig(self.mask | other.mask, self.num_sites)

    def to_dict(self) -> Dict[str, Any]:
        return {'sites': self.sites(), 'n': self.n}


@dataclass(frozen=True, order=True)
class PairCounts:
    """
    Interacting pair multiplicities; energy = g1 * m1 + g2 * m2.

    Ordering is lexicographic on (m1, m2), i.e. the g1 >> g2 regime.
    """

    m1: int
    m2: int

    def energy(self, couplings: 'CouplingConstants') -> float:
        return couplings.g1 * self.m1 + couplings.g2 * self.m2

    def __add__(self, other: 'PairCounts') -> 'PairCounts':
        return PairCounts(self.m1 + other.m1, self.m2 + other.m2)

    def __sub__(self, other: 'PairCounts') -> 'PairCounts':
        return PairCounts(self.m1 - other.m1, self.m2 - other.m2)

    def to_dict(self) -> Dict[str, int]:
        return {'m1': self.m1, 'm2': self.m2}


@dataclass(frozen=True)
class CouplingConstants:
    """Interaction strengths g1 (U1 and U3 pairs) and g2 (U2 pairs)"""

    g1: float = 100.0
    g2: float = 1.0

    def __post_init__(self):
        if not (self.g1 > 0 and self.g2 > 0):
            raise ValueError(f"couplings must be positive, got g1={self.g1}, g2={self.g2}")

    def to_dict(self) -> Dict[str, float]:
        return {'g1': self.g1, 'g2': self.g2}


@dataclass(frozen=True)
class HKParams:
    """Hatsugai-Kohmoto hopping amplitudes"""

    t1: float
    t2: float
    td: float

    def __post_init__(self):
        for name in ('t1', 't2', 'td'):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def parse(cls, text: str) -> 'HKParams':
        """Parse 't1,t2,td'"""
        parts = text.split(',')
        if len(parts) != 3:
            raise ValueError(f"expected 't1,t2,td', got {text!r}")
        t1, t2, td = (float(part) for part in parts)
        return cls(t1, t2, td)

    @property
    def max_abs(self) -> float:
        return max(abs(self.t1), abs(self.t2), abs(self.td))

    def scaled(self, factor: float) -> 'HKParams':
        return HKParams(self.t1 * factor, self.t2 * factor, self.td * factor)

    def flipped(self) -> 'HKParams':
        """Same model with td -> -td"""
        return HKParams(self.t1, self.t2, -self.td)

    def to_dict(self) -> Dict[str, float]:
        return {'t1': self.t1, 't2': self.t2, 'td': self.td}


@dataclass(frozen=True)
class HKLatticeSize:
    """2*L1 x L2 Hatsugai-Kohmoto lattice (L1 two-site cells, L2 rows)"""

    L1: int
    L2: int

    def __post_init__(self):
        if self.L1 < 1 or self.L2 < 1:
            raise ValueError(f"L1 and L2 must be positive, got {self.L1}, {self.L2}")

    @classmethod
    def from_shape(cls, width: int, height: int) -> 'HKLatticeSize':
        """Size of a width x height site array (width must be even)"""
        if width % 2:
            raise ValueError(f"HK width must be even, got {width}")
        return cls(width // 2, height)

    @property
    def dimension(self) -> int:
        return 2 * self.L1 * self.L2

    @property
    def shape(self) -> Tuple[int, int]:
        return 2 * self.L1, self.L2


@dataclass(frozen=True)
class SectorSpec:
    """
    HK parameters for one sector. The copy lives on the sector's green
    sublattice; ``origin`` shifts which embedded column carries +t2.
    """

    sector: SublatticeId
    params: HKParams
    origin: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {'sector': list(self.sector), 'params': self.params.to_dict(), 'origin': self.origin}


@dataclass
class GroundStateReport:
    """Exhaustive classical ground-state scan result"""

    lattice: Tuple[int, int]
    n: int
    mode: str
    minimum: PairCounts
    min_energy: float
    degeneracy: int
    configurations: List[OccupationConfig] = field(default_factory=list)
    cap: int = 64
    sectors: List[Optional[SublatticeId]] = field(default_factory=list)
    hosts: List[Optional[SublatticeId]] = field(default_factory=list)
    scanned: int = 0

    @property
    def truncated(self) -> bool:
        return self.degeneracy > len(self.configurations)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lattice': {'width': self.lattice[0], 'height': self.lattice[1]},
            'particles': self.n,
            'mode': self.mode,
            'minimum': self.minimum.to_dict(),
            'min_energy': self.min_energy,
            'degeneracy': self.degeneracy,
            'scanned': self.scanned,
            'cap': self.cap,
            'truncated': self.truncated,
            'configurations': [
                {
                    'sites': config.sites(),
                    'sector': list(sector) if sector is not None else None,
                    'host_sector': list(host) if host is not None else None,
                }
                for config, sector, host in zip(self.configurations, self.sectors, self.hosts)
            ],
        }


@dataclass
class ChernResult:
    """One Chern-number computation"""

    params: HKParams
    method: str
    chern: int
    value: float
    residue: float
    grid: Optional[int] = None
    eps: Optional[float] = None
    steps: Optional[int] = None
    gap: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'params': self.params.to_dict(),
            'method': self.method,
            'grid': self.grid,
            'chern': self.chern,
            'value': self.value,
            'residue': self.residue,
        }
        if self.eps is not None:
            data['eps'] = self.eps
            data['steps'] = self.steps
        if self.gap is not None:
            data['gap'] = self.gap
        return data


@dataclass
class PhaseDiagramRow:
    """One td point of a phase-diagram sweep; chern is None unless status is 'ok'"""

    td: float
    gap: float
    chern: Optional[int]
    status: str = 'ok'

    def to_dict(self) -> Dict[str, Any]:
        return {'td': self.td, 'gap': self.gap, 'chern': self.chern, 'status': self.status}


@dataclass
class CurvatureMap:
    """Per-plaquette field strength on a G x G Brillouin-zone mesh"""

    grid: int
    field: np.ndarray
    k1: np.ndarray
    k2: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.field) / (2 * np.pi))

    def rows(self) -> List[Tuple[float, float, float]]:
        """(k1, k2, F) rows in mesh order, k2 fastest"""
        return [(float(self.k1[i]), float(self.k2[j]), float(self.field[i, j]))
                for i in range(self.grid) for j in range(self.grid)]


@dataclass
class CompositeReport:
    """Sector Chern vector, exact average, and phase label"""

    sigma: Tuple[int, ...]
    average: Fraction
    phase: str
    translation_invariant: Dict[str, bool] = field(default_factory=dict)
    specs: List[SectorSpec] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sigma': list(self.sigma),
            'average': str(self.average),
            'phase': self.phase,
            'translation_invariant': dict(self.translation_invariant),
            'sectors': [spec.to_dict() for spec in self.specs],
        }


@dataclass
class ManyBodySpectrum:
    """Lowest eigenvalues (ascending) with multiplet decomposition"""

    energies: np.ndarray
    vectors: Optional[np.ndarray] = None
    clusters: List[Tuple[int, int, float]] = field(default_factory=list)
    method: str = 'dense'
    residuals: Optional[np.ndarray] = None

    @property
    def multiplicities(self) -> List[int]:
        return [size for _, size, _ in self.clusters]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method,
            'energies': [float(e) for e in self.energies],
            'clusters': [
                {'start': start, 'size': size, 'splitting': splitting}
                for start, size, splitting in self.clusters
            ],
        }


@dataclass(frozen=True)
class TwistGrid:
    """size x size uniform grid of boundary phases on [0, 2*pi)^2"""

    size: int

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"twist grid needs at least 2 points per direction, got {self.size}")

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size

    def points(self) -> List[Tuple[float, float]]:
        """(theta1, theta2) in row-major order, theta2 fastest"""
        angles = self.angles
        return [(float(t1), float(t2)) for t1 in angles for t2 in angles]


@dataclass
class ScanRow:
    g1: float
    max_deviation: float
    intruders: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {'g1': self.g1, 'max_deviation': self.max_deviation, 'intruders': self.intruders}


@dataclass
class ScanReport:
    """Strong-coupling convergence of the low spectrum"""

    rows: List[ScanRow]
    reference: List[float]
    g2: float
    t_scale: float = 1.0
    t_nn: float = 0.0
    solver: str = 'dense'

    @property
    def decreasing(self) -> bool:
        deviations = [row.max_deviation for row in self.rows]
        return all(later < earlier or later == earlier == 0
                   for earlier, later in zip(deviations, deviations[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'g2': self.g2,
            't_scale': self.t_scale,
            't_nn': self.t_nn,
            'solver': self.solver,
            'levels': len(self.reference),
            'reference': list(self.reference),
            'rows': [row.to_dict() for row in self.rows],
            'decreasing': self.decreasing,
        }


@dataclass
class RunManifest:
    """Sidecar record of one CLI run"""

    subcommand: str
    parameters: Dict[str, Any]
    version: str
    wall_time: float = 0.0
    outputs: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'subcommand': self.subcommand,
            'parameters': self.parameters,
            'version': self.version,
            'wall_time_s': self.wall_time,
            'outputs': dict(self.outputs),
        }
