"""
Chern Numbers
=============

Three independent computations for the lower HK band:

- plaquette: gauge-invariant link variables on a G x G Brillouin-zone mesh
- loop: the Berry-connection integral around a small ellipse about (pi, pi),
  where the gauge-fixed eigenvector vanishes
- analytic: sgn(td / t1), valid for t2 > 0

Orientation: the plaquette field is the curvature of i<u|grad u>, so all
three methods agree in sign.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from joblib import Parallel, delayed

from .config import Limits, DEFAULT_LIMITS
from .hk import Momentum, band_gap, bloch_components, lower_vectors
from .models import ChernResult, CurvatureMap, HKParams, PhaseDiagramRow

logger = logging.getLogger(__name__)

METHODS = ('plaquette', 'analytic', 'loop')
GAP_GRID = 64


class ChernError(Exception):
    """Base exception for Chern-number computations"""
    pass


class GaplessRefusal(ChernError):
    """The band gap closes; the Chern number is undefined"""
    pass


class NonIntegerResidue(ChernError):
    """Plaquette total is not close to an integer; increase the grid"""
    pass


class OutOfDerivedDomain(ChernError):
    """Closed form only covers t2 > 0"""
    pass


class SingularPoint(ChernError):
    """Gauge-fixed eigenvector vanishes"""
    pass


class AspectUndefined(ChernError):
    """Loop ellipse needs t1 != 0 and td != 0"""
    pass


@dataclass(frozen=True)
class LoopSpec:
    """Ellipse (eps cos theta, eps |t1/(4 td)| sin theta) around (pi, pi)"""

    eps: float = 0.05
    steps: int = 2048

    def __post_init__(self):
        if not 0 < self.eps < 0.5:
            raise ValueError(f"eps must lie in (0, 0.5), got {self.eps}")
        if self.steps < 64:
            raise ValueError(f"steps must be at least 64, got {self.steps}")

    def path(self, params: HKParams):
        """(k, dk/dtheta) arrays of shape (steps, 2)"""
        if params.td == 0 or params.t1 == 0:
            raise AspectUndefined(f"ellipse aspect |t1/(4 td)| undefined for {params}")
        aspect = abs(params.t1 / (4 * params.td))
        theta = 2 * np.pi * np.arange(self.steps) / self.steps
        k = np.stack([np.pi + self.eps * np.cos(theta), np.pi + self.eps * aspect * np.sin(theta)], axis=1)
        tangent = np.stack([-self.eps * np.sin(theta), self.eps * aspect * np.cos(theta)], axis=1)
        return k, tangent


def _require_gap(params: HKParams, limits: Limits) -> float:
    gap = band_gap(params, GAP_GRID).gap
    if params.max_abs == 0 or gap <= limits.gap_threshold * params.max_abs:
        raise GaplessRefusal(f"band gap {gap:.3g} closes for {params}")
    return gap


def plaquette_mesh(grid: int) -> np.ndarray:
    """Mesh offset by half a cell: k_j = -pi + 2*pi*(j + 1/2)/G"""
    return -np.pi + 2 * np.pi * (np.arange(grid) + 0.5) / grid


def lower_band_mesh(params: HKParams, grid: int) -> np.ndarray:
    """Normalized lower eigenvectors, shape (G, G, 2), axis 0 along k1"""
    mesh = plaquette_mesh(grid)
    k1, k2 = np.meshgrid(mesh, mesh, indexing='ij')
    alpha, beta, norm = lower_vectors(params, k1, k2)
    return np.stack([alpha / norm, beta / norm], axis=-1)


def plaquette_field(vectors: np.ndarray) -> np.ndarray:
    """
    Field strength F = -arg(U1(k) U2(k+e1) U1(k+e2)* U2(k)*) per plaquette,
    with periodic wrapping of the mesh.
    """
    def link(axis):
        overlap = np.sum(np.conj(vectors) * np.roll(vectors, -1, axis=axis), axis=-1)
        return overlap / np.abs(overlap)

    u1 = link(0)
    u2 = link(1)
    product = u1 * np.roll(u2, -1, axis=0) * np.conj(np.roll(u1, -1, axis=1)) * np.conj(u2)
    return -np.angle(product)


def _plaquette_total(params: HKParams, grid: int, limits: Limits):
    if grid < 16:
        raise ValueError(f"grid must be at least 16, got {grid}")
    gap = _require_gap(params, limits)
    field = plaquette_field(lower_band_mesh(params, grid))
    total = float(np.sum(field) / (2 * np.pi))
    chern = int(round(total))
    residue = abs(total - chern)
    if residue >= limits.residue_tolerance:
        raise NonIntegerResidue(f"plaquette total {total:.9f} on grid {grid}; increase the grid")
    return chern, total, residue, gap, field


def chern_plaquette(params: HKParams, grid: int = 24, limits: Limits = DEFAULT_LIMITS) -> int:
    """Chern number of the lower band by the plaquette link-variable method"""
    return _plaquette_total(params, grid, limits)[0]


def chern_analytic(params: HKParams) -> int:
    """
    sgn(td / t1) for t2 > 0.

    Raises:
        OutOfDerivedDomain: t2 <= 0, use chern_plaquette instead
        GaplessRefusal: t1 = 0 or td = 0
    """
    if params.t2 <= 0:
        raise OutOfDerivedDomain(f"closed form needs t2 > 0, got t2={params.t2}; use chern_plaquette")
    if params.t1 == 0 or params.td == 0:
        raise GaplessRefusal(f"band gap closes for {params}")
    return 1 if (params.td > 0) == (params.t1 > 0) else -1


def _derivatives(params: HKParams, k1: float, k2: float):
    """A, B and their k-derivatives"""
    t1, t2, td = params.t1, params.t2, params.td
    half = k1 / 2
    phase = np.exp(-1j * half)
    c = 2 * t1 * math.cos(half) + 4j * td * math.sin(half) * math.sin(k2)
    a, b = bloch_components(params, k1, k2)
    da = (0.0, -2 * t2 * math.sin(k2))
    dc1 = -t1 * math.sin(half) + 2j * td * math.cos(half) * math.sin(k2)
    db = (
        phase * (-0.5j * c + dc1),
        phase * 4j * td * math.sin(half) * math.cos(k2),
    )
    return a, b, da, db


def berry_connection(params: HKParams, k: Momentum, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """
    <u|grad u> for the normalized gauge-fixed lower eigenvector, from the
    analytic derivatives of A(k) and B(k). Purely imaginary.
    """
    k1, k2 = k
    a, b, da, db = _derivatives(params, k1, k2)
    e = math.sqrt(a * a + abs(b) ** 2)
    v = np.array([b, -a - e], dtype=complex)
    norm = float(np.linalg.norm(v))
    if norm < limits.singular_tolerance:
        raise SingularPoint(f"eigenvector norm {norm:.3g} at k={k}")
    if e == 0:
        raise SingularPoint(f"bands touch at k={k}")
    u = v / norm
    connection = np.empty(2, dtype=complex)
    for j in range(2):
        de = (a * da[j] + (np.conj(b) * db[j]).real) / e
        dv = np.array([db[j], -da[j] - de], dtype=complex)
        dnorm = float(np.vdot(v, dv).real) / norm
        du = dv / norm - v * dnorm / norm ** 2
        connection[j] = np.vdot(u, du)
    return connection


def berry_connection_asymptotic(params: HKParams, p: Sequence[float]) -> np.ndarray:
    """Leading behaviour at k = (pi, pi) + p: i(-1/2, 0) plus the vortex term"""
    ratio = 4 * params.td / params.t1
    p1, p2 = p
    denom = p1 * p1 + ratio * ratio * p2 * p2
    return np.array([-0.5j, 0.0]) + 1j * ratio * np.array([-p2, p1]) / denom


def chern_loop(params: HKParams, loop: LoopSpec = LoopSpec(), limits: Limits = DEFAULT_LIMITS) -> float:
    """(1/2 pi i) * closed-loop integral of the Berry connection around (pi, pi)"""
    if params.td == 0 or params.t1 == 0:
        raise AspectUndefined(f"ellipse aspect |t1/(4 td)| undefined for {params}")
    if params.t2 <= 0:
        raise OutOfDerivedDomain(f"loop encircles (pi, pi) only for t2 > 0, got t2={params.t2}; use chern_plaquette")
    if loop.eps > 0.2:
        logger.warning(f"Loop scale eps={loop.eps} above 0.2 may enclose other features")
    ks, tangents = loop.path(params)
    total = 0j
    for k, tangent in zip(ks, tangents):
        total += np.dot(berry_connection(params, (k[0], k[1]), limits), tangent)
    integral = total * 2 * np.pi / loop.steps
    return float((integral / (2j * np.pi)).real)


def curvature_map(params: HKParams, grid: int = 32, limits: Limits = DEFAULT_LIMITS) -> CurvatureMap:
    """Per-plaquette field with plaquette-center momenta"""
    _, _, _, _, field = _plaquette_total(params, grid, limits)
    centers = plaquette_mesh(grid) + np.pi / grid
    return CurvatureMap(grid=grid, field=field, k1=centers, k2=centers.copy())


def compute_chern(
    params: HKParams,
    method: str = 'plaquette',
    grid: int = 24,
    loop: LoopSpec = LoopSpec(),
    limits: Limits = DEFAULT_LIMITS,
) -> ChernResult:
    """Run one method and package the result"""
    if method == 'plaquette':
        chern, total, residue, gap, _ = _plaquette_total(params, grid, limits)
        return ChernResult(params, method, chern, total, residue, grid=grid, gap=gap)
    if method == 'analytic':
        chern = chern_analytic(params)
        return ChernResult(params, method, chern, float(chern), 0.0)
    if method == 'loop':
        value = chern_loop(params, loop, limits)
        chern = int(round(value))
        return ChernResult(params, method, chern, value, abs(value - chern), eps=loop.eps, steps=loop.steps)
    raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")


def _phase_point(t1: float, t2: float, td: float, grid: int, limits: Limits) -> PhaseDiagramRow:
    params = HKParams(t1, t2, td)
    gap = band_gap(params, GAP_GRID).gap
    try:
        chern = chern_plaquette(params, grid, limits)
    except GaplessRefusal:
        return PhaseDiagramRow(td, gap, None, 'gapless')
    except NonIntegerResidue as e:
        logger.warning(f"td={td}: {e}")
        return PhaseDiagramRow(td, gap, None, 'error')
    return PhaseDiagramRow(td, gap, chern, 'ok')


def phase_diagram(
    t1: float,
    t2: float,
    tds: Sequence[float],
    grid: int = 24,
    jobs: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> List[PhaseDiagramRow]:
    """
    Gap and plaquette Chern number along a td sweep.

    Rows come back in the order of ``tds`` for any ``jobs``.
    """
    logger.info(f"Phase diagram: {len(tds)} points, t1={t1}, t2={t2}, grid={grid}, jobs={jobs}")
    return Parallel(n_jobs=jobs)(delayed(_phase_point)(t1, t2, td, grid, limits) for td in tds)
