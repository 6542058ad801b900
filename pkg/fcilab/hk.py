"""
Hatsugai-Kohmoto Band Model
===========================

Two-band square-lattice model with hops t1 (horizontal), alternating
+t2 / -t2 (vertical, by column parity) and pure-imaginary diagonals +-i*td.

Real-space sites are (l, n) with l in [0, 2*L1) and n in [0, L2); even l
carries +t2, odd l carries -t2. Cell c holds columns 2c and 2c+1, and the
Bloch momentum k1 is conjugate to c, k2 to n.

Bloch form:
    A(k) = 2 t2 cos k2
    B(k) = exp(-i k1/2) [2 t1 cos(k1/2) + 4 i td sin(k1/2) sin k2]
    H(k) = [[A, B], [B*, -A]],  E = +-sqrt(A^2 + |B|^2)

The lower eigenvector is kept in the fixed gauge (B, -A - sqrt(A^2+|B|^2)),
whose norm vanishes at (pi, pi) for t2 > 0.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Tuple

import numpy as np
from scipy.optimize import minimize

from .config import Limits, DEFAULT_LIMITS
from .models import HKLatticeSize, HKParams
from .utils import write_csv

logger = logging.getLogger(__name__)

Momentum = Tuple[float, float]
Twists = Tuple[float, float]


class HKError(Exception):
    """Base exception for the band model"""
    pass


class InvalidLattice(HKError):
    """Lattice size the HK model cannot live on"""
    pass


def reduce_momentum(k: Momentum) -> Momentum:
    """Map both components into [-pi, pi)"""
    return tuple(float((component + np.pi) % (2 * np.pi) - np.pi) for component in k)


def bloch_components(params: HKParams, k1, k2):
    """
    A(k) and B(k); accepts scalars or broadcastable arrays.

    Returns:
        (A, B) with A real and B complex
    """
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    half = k1 / 2
    a = 2 * params.t2 * np.cos(k2)
    b = np.exp(-1j * half) * (2 * params.t1 * np.cos(half) + 4j * params.td * np.sin(half) * np.sin(k2))
    if a.ndim == 0:
        return float(a), complex(b)
    return a, b


def band_energies(params: HKParams, k1, k2):
    """(E-, E+) = (-sqrt(A^2+|B|^2), +sqrt(A^2+|B|^2))"""
    a, b = bloch_components(params, k1, k2)
    e = np.sqrt(a ** 2 + np.abs(b) ** 2)
    if np.ndim(e) == 0:
        return -float(e), float(e)
    return -e, e


def bloch_matrix(params: HKParams, k1: float, k2: float) -> np.ndarray:
    a, b = bloch_components(params, k1, k2)
    return np.array([[a, b], [np.conj(b), -a]], dtype=complex)


@dataclass(frozen=True)
class BlochState:
    """Momentum-resolved band data in the fixed gauge"""

    k: Momentum
    A: float
    B: complex
    energies: Tuple[float, float]
    alpha: complex
    beta: complex
    norm: float
    singular_tolerance: float = DEFAULT_LIMITS.singular_tolerance

    @property
    def singular(self) -> bool:
        """True at the zero of the gauge-fixed eigenvector"""
        return self.norm < self.singular_tolerance

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    @property
    def normalized(self) -> np.ndarray:
        if self.singular:
            raise ValueError(f"eigenvector vanishes at k={self.k}")
        return self.vector / self.norm


def lower_vectors(params: HKParams, k1, k2):
    """
    Vectorized lower-band eigenvectors (alpha, beta) and their norm N.
    """
    a, b = bloch_components(params, k1, k2)
    e = np.sqrt(a ** 2 + np.abs(b) ** 2)
    alpha = b
    beta = -a - e
    norm = np.sqrt(np.abs(alpha) ** 2 + np.abs(beta) ** 2)
    return alpha, beta, norm


def lower_state(params: HKParams, k: Momentum, limits: Limits = DEFAULT_LIMITS) -> BlochState:
    """
    Gauge-fixed lower eigenvector at one momentum.

    N = 0 is a valid result and is flagged through ``BlochState.singular``.
    """
    k1, k2 = k
    a, b = bloch_components(params, k1, k2)
    e = math.sqrt(a * a + abs(b) ** 2)
    alpha = b
    beta = complex(-a - e)
    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    return BlochState(
        k=(float(k1), float(k2)),
        A=a,
        B=b,
        energies=(-e, e),
        alpha=alpha,
        beta=beta,
        norm=norm,
        singular_tolerance=limits.singular_tolerance,
    )


def norm_zero_point(params: HKParams) -> Momentum:
    """
    Where the gauge-fixed eigenvector vanishes: B = 0 forces k1 = pi and
    k2 in {0, pi}; A + |A| = 0 then selects k2 = pi for t2 > 0, 0 for t2 < 0.
    """
    if params.t2 > 0:
        return math.pi, math.pi
    if params.t2 < 0:
        return math.pi, 0.0
    raise HKError("t2 = 0: the eigenvector zero is not isolated")


class BandGap(NamedTuple):
    gap: float
    k: Momentum


def _gap_at(params: HKParams, k: np.ndarray) -> float:
    a, b = bloch_components(params, k[0], k[1])
    return 2 * math.sqrt(a * a + abs(b) ** 2)


def band_gap(params: HKParams, grid: int = 64) -> BandGap:
    """
    Direct gap min_k 2*sqrt(A^2 + |B|^2).

    Scans the grid x grid mesh k = -pi + 2*pi*j/grid, then refines once
    inside the mesh cell around the minimizer.
    """
    if grid < 16:
        raise ValueError(f"grid must be at least 16, got {grid}")
    mesh = -np.pi + 2 * np.pi * np.arange(grid) / grid
    k1, k2 = np.meshgrid(mesh, mesh, indexing='ij')
    _, upper = band_energies(params, k1, k2)
    gaps = 2 * upper
    i, j = np.unravel_index(int(np.argmin(gaps)), gaps.shape)
    best = float(gaps[i, j])
    best_k = (float(mesh[i]), float(mesh[j]))

    step = 2 * np.pi / grid
    start = np.array(best_k)
    bounds = [(start[0] - step, start[0] + step), (start[1] - step, start[1] + step)]
    refined = minimize(lambda k: _gap_at(params, k), start, method='L-BFGS-B', bounds=bounds)
    if refined.success and refined.fun < best:
        best = float(refined.fun)
        best_k = reduce_momentum((float(refined.x[0]), float(refined.x[1])))
    logger.debug(f"Band gap {best:.6g} at k={best_k} for {params}")
    return BandGap(best, best_k)


def band_structure_rows(params: HKParams, grid: int) -> List[Tuple[float, float, float, float]]:
    """(k1, k2, E-, E+) rows on the grid x grid mesh, k2 fastest"""
    mesh = -np.pi + 2 * np.pi * np.arange(grid) / grid
    rows = []
    for k1 in mesh:
        lower, upper = band_energies(params, k1, mesh)
        rows.extend((float(k1), float(k2), float(lo), float(up)) for k2, lo, up in zip(mesh, lower, upper))
    return rows


# ===== Real space =====

def hk_bonds(params: HKParams, size: HKLatticeSize) -> Iterator[Tuple[int, int, int, int, complex]]:
    """
    Bonds (l, n, dl, dn, amplitude): the term amplitude * phi(l+dl, n+dn)
    in the Schroedinger equation of site (l, n). Every bond is listed once;
    its Hermitian partner is implied.

    Even columns carry every A-B bond of their equation plus the upward +t2
    bond; odd columns only add their upward -t2 bond.
    """
    t1, t2, td = params.t1, params.t2, params.td
    for n in range(size.L2):
        for c in range(size.L1):
            ell = 2 * c
            yield ell, n, -1, 0, complex(t1)
            yield ell, n, +1, 0, complex(t1)
            yield ell, n, 0, +1, complex(t2)
            yield ell, n, -1, -1, -1j * td
            yield ell, n, +1, +1, -1j * td
            yield ell, n, +1, -1, 1j * td
            yield ell, n, -1, +1, 1j * td
            yield ell + 1, n, 0, +1, complex(-t2)


def realspace_hamiltonian(
    params: HKParams,
    size: HKLatticeSize,
    twists: Twists = (0.0, 0.0),
) -> np.ndarray:
    """
    Single-particle matrix on the 2*L1 x L2 torus.

    Site (l, n) has index l + 2*L1*n. A bond whose target wraps w times
    around direction a picks up exp(i * theta_a * w), so k1 = (2*pi*j + theta1)/L1
    and k2 = (2*pi*l + theta2)/L2. Each bond is written together with its
    conjugate, which makes the matrix exactly Hermitian.
    """
    width, height = size.shape
    phases = (np.exp(1j * twists[0]), np.exp(1j * twists[1]))
    matrix = np.zeros((size.dimension, size.dimension), dtype=complex)
    for ell, n, dl, dn, amplitude in hk_bonds(params, size):
        w1, col_l = divmod(ell + dl, width)
        w2, col_n = divmod(n + dn, height)
        value = amplitude * phases[0] ** w1 * phases[1] ** w2
        row = ell + width * n
        col = col_l + width * col_n
        matrix[row, col] += value
        matrix[col, row] += np.conj(value)
    return matrix


def allowed_momenta(size: HKLatticeSize, twists: Twists = (0.0, 0.0)) -> List[Momentum]:
    """Bloch momenta compatible with the twisted torus"""
    return [
        ((2 * np.pi * j + twists[0]) / size.L1, (2 * np.pi * l + twists[1]) / size.L2)
        for j in range(size.L1)
        for l in range(size.L2)
    ]


def translation_operator(size: HKLatticeSize, shift: Tuple[int, int]) -> np.ndarray:
    """perm[site] = index of site shifted by (dl, dn)"""
    width, height = size.shape
    perm = np.empty(size.dimension, dtype=np.int64)
    for n in range(height):
        for ell in range(width):
            perm[ell + width * n] = (ell + shift[0]) % width + width * ((n + shift[1]) % height)
    return perm


def hk_size(width: int, height: int) -> HKLatticeSize:
    """HK lattice for a width x height site array"""
    try:
        return HKLatticeSize.from_shape(width, height)
    except ValueError as e:
        raise InvalidLattice(str(e))


def band_structure_csv(params: HKParams, grid: int, path) -> None:
    """Write k1, k2, E-, E+ on the grid x grid mesh"""
    write_csv(path, ('k1', 'k2', 'E_minus', 'E_plus'), band_structure_rows(params, grid))
