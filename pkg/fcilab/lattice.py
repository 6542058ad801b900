"""
Torus Lattice
=============

Periodic square lattice geometry: site indexing, the period-2 sublattices,
and the three interaction displacement sets.

Sites are 0-based. A site (x1, x2) has the linear index ``x1 + W * x2``.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Tuple

import numpy as np


SublatticeId = Tuple[int, int]
Vector = Tuple[int, int]

# Sector order used everywhere a 4-tuple of sublattices appears
SUBLATTICES: Tuple[SublatticeId, ...] = ((0, 0), (1, 0), (0, 1), (1, 1))


class LatticeError(Exception):
    """Invalid torus dimensions or site index"""
    pass


class DisplacementSet(Enum):
    """The interaction displacement sets, each negation-closed and in fixed order"""

    U1 = ((1, 0), (-1, 0), (0, 1), (0, -1))
    U2 = ((1, 1), (1, -1), (-1, 1), (-1, -1))
    U3 = ((1, 2), (1, -2), (-1, 2), (-1, -2),
          (2, 1), (-2, 1), (2, -1), (-2, -1))

    @property
    def vectors(self) -> Tuple[Vector, ...]:
        return self.value


@dataclass(frozen=True)
class TorusLattice:
    """W x H square lattice with periodic boundary conditions"""

    width: int
    height: int

    def __post_init__(self):
        for name, value in (('width', self.width), ('height', self.height)):
            if not isinstance(value, (int, np.integer)) or value < 4 or value % 2:
                raise LatticeError(f"{name} must be an even integer >= 4, got {value!r}")

    @classmethod
    def canonical(cls, L: int) -> 'TorusLattice':
        """The 4L x 4L torus"""
        if L < 1:
            raise LatticeError(f"L must be positive, got {L}")
        return cls(4 * L, 4 * L)

    @classmethod
    def parse(cls, text: str) -> 'TorusLattice':
        """Parse a 'WxH' size string"""
        try:
            width, height = (int(part) for part in text.lower().split('x'))
        except ValueError:
            raise LatticeError(f"size must look like WxH, got {text!r}")
        return cls(width, height)

    @property
    def num_sites(self) -> int:
        return self.width * self.height

    @property
    def is_canonical(self) -> bool:
        return self.width == self.height and self.width % 4 == 0

    def index(self, x1: int, x2: int) -> int:
        """Linear index of the (wrapped) coordinate pair"""
        return (x1 % self.width) + self.width * (x2 % self.height)

    def coords(self, site: int) -> Tuple[int, int]:
        """Coordinate pair of a linear index"""
        if not 0 <= site < self.num_sites:
            raise LatticeError(f"site {site} outside [0, {self.num_sites})")
        return site % self.width, site // self.width

    def sites(self) -> Iterator[int]:
        return iter(range(self.num_sites))

    def to_dict(self):
        return {'width': self.width, 'height': self.height}

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"


def neighbors(lattice: TorusLattice, site: int, dset: DisplacementSet) -> List[int]:
    """
    Wrapped neighbors of a site for one displacement set.

    Duplicates are kept: on a width-4 or height-4 torus two displacements
    can land on the same site, and the interaction sums count both.
    """
    x1, x2 = lattice.coords(site)
    return [lattice.index(x1 + d1, x2 + d2) for d1, d2 in dset.vectors]


def sublattice_sites(lattice: TorusLattice, sublattice: SublatticeId) -> List[int]:
    """Row-major list of the sites with parities (a, b)"""
    a, b = sublattice
    return [lattice.index(x1, x2)
            for x2 in range(b, lattice.height, 2)
            for x1 in range(a, lattice.width, 2)]


def sublattice_of(lattice: TorusLattice, site: int) -> SublatticeId:
    x1, x2 = lattice.coords(site)
    return x1 % 2, x2 % 2


def contact_matrix(lattice: TorusLattice, *dsets: DisplacementSet) -> np.ndarray:
    """
    Integer matrix C[x, y] = number of displacements in the given sets
    taking x to y. Symmetric because every set is negation-closed.
    """
    size = lattice.num_sites
    matrix = np.zeros((size, size), dtype=np.int64)
    for dset in dsets:
        for site in range(size):
            for other in neighbors(lattice, site, dset):
                matrix[site, other] += 1
    return matrix


def translation_permutation(lattice: TorusLattice, shift: Vector) -> np.ndarray:
    """perm[x] = index of x + shift"""
    s1, s2 = shift
    perm = np.empty(lattice.num_sites, dtype=np.int64)
    for site in range(lattice.num_sites):
        x1, x2 = lattice.coords(site)
        perm[site] = lattice.index(x1 + s1, x2 + s2)
    return perm
