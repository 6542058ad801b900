"""
Classical Ground States
=======================

Hopping-free energetics of the finite-range repulsion: exact pair counts,
exhaustive ground-state enumeration, a transfer-matrix counter for the
zero-energy configurations, and the sector / green-site bookkeeping.

Energies are never compared as floats. Lexicographic mode orders
configurations by PairCounts (m1 first, the g1 >> g2 regime); numeric mode
compares g1*m1 + g2*m2 in exact rational arithmetic.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, islice
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from .config import Limits, DEFAULT_LIMITS
from .lattice import (
    DisplacementSet,
    SUBLATTICES,
    SublatticeId,
    TorusLattice,
    contact_matrix,
    sublattice_sites,
)
from .models import CouplingConstants, GroundStateReport, OccupationConfig, PairCounts, popcount

logger = logging.getLogger(__name__)

MODES = ('numeric', 'lexicographic')
CHUNK_SIZE = 1 << 15


class ClassicalError(Exception):
    """Base exception for classical ground-state analysis"""
    pass


class BudgetExceeded(ClassicalError):
    """Too many configurations for brute force"""
    pass


class WidthExceeded(ClassicalError):
    """Torus too wide for the row transfer matrix"""
    pass


@lru_cache(maxsize=32)
def _contacts(lattice: TorusLattice) -> Tuple[np.ndarray, np.ndarray]:
    """(U1+U3, U2) contact matrices with multiplicity"""
    strong = contact_matrix(lattice, DisplacementSet.U1, DisplacementSet.U3)
    weak = contact_matrix(lattice, DisplacementSet.U2)
    return strong, weak


def batch_pair_counts(occupancy: np.ndarray, lattice: TorusLattice) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pair counts for a stack of 0/1 occupation rows.

    Args:
        occupancy: (num_configs, W*H) integer array
        lattice: Torus the rows live on

    Returns:
        (m1, m2) integer arrays
    """
    strong, weak = _contacts(lattice)
    occupancy = np.asarray(occupancy, dtype=np.int64)
    double_m1 = np.einsum('ij,ij->i', occupancy @ strong, occupancy)
    double_m2 = np.einsum('ij,ij->i', occupancy @ weak, occupancy)
    return double_m1 // 2, double_m2 // 2


def interaction_pair_counts(config: OccupationConfig, lattice: TorusLattice) -> PairCounts:
    """
    Exact (m1, m2) of one configuration.

    m1 = 1/2 sum_x sum_{d in U1+U3} n_x n_{x+d},  m2 likewise over U2,
    with torus wrapping and displacement multiplicity.
    """
    if config.num_sites != lattice.num_sites:
        raise ValueError(f"configuration has {config.num_sites} sites, lattice has {lattice.num_sites}")
    m1, m2 = batch_pair_counts(config.occupancy()[None, :], lattice)
    return PairCounts(int(m1[0]), int(m2[0]))


def pattern_config(lattice: TorusLattice, sector: SublatticeId) -> OccupationConfig:
    """Configuration occupying exactly one period-2 sublattice"""
    return OccupationConfig.from_sites(sublattice_sites(lattice, sector), lattice.num_sites)


def green_sector(sector: SublatticeId) -> SublatticeId:
    a, b = sector
    return 1 - a, 1 - b


def green_sites(sector: SublatticeId, lattice: TorusLattice) -> List[int]:
    """
    Sites where extra fermions cost only U2 contacts: the sublattice offset
    by (1, 1) from the sector pattern.
    """
    return sublattice_sites(lattice, green_sector(sector))


def classify_sector(config: OccupationConfig, lattice: TorusLattice) -> Optional[SublatticeId]:
    """Sector whose sublattice the configuration occupies exactly, else None"""
    for sector in SUBLATTICES:
        if config.mask == pattern_config(lattice, sector).mask:
            return sector
    return None


def decompose_config(
    config: OccupationConfig,
    lattice: TorusLattice,
) -> Optional[Tuple[SublatticeId, List[int]]]:
    """
    Split a configuration into a full sector pattern plus extra green sites.

    Returns:
        (sector, extra sites) or None when no sector pattern hosts it
    """
    for sector in SUBLATTICES:
        pattern = pattern_config(lattice, sector).mask
        if config.mask & pattern != pattern:
            continue
        extra = config.mask & ~pattern
        green = OccupationConfig.from_sites(green_sites(sector, lattice), lattice.num_sites).mask
        if extra & ~green == 0:
            return sector, OccupationConfig(extra, lattice.num_sites).sites()
    return None


def single_addition_costs(lattice: TorusLattice, sector: SublatticeId) -> Dict[int, PairCounts]:
    """PairCounts increase from one extra fermion on each empty site of a sector pattern"""
    base = pattern_config(lattice, sector)
    base_counts = interaction_pair_counts(base, lattice)
    return {
        site: interaction_pair_counts(base.with_site(site), lattice) - base_counts
        for site in range(lattice.num_sites)
        if not base.occupied(site)
    }


def _exact_energy(pairs: PairCounts, couplings: CouplingConstants) -> Fraction:
    return Fraction(couplings.g1) * pairs.m1 + Fraction(couplings.g2) * pairs.m2


def _scan_prefix(
    lattice: TorusLattice,
    n: int,
    first: Optional[int],
    mode: str,
    couplings: CouplingConstants,
    cap: int,
):
    """
    Scan all n-particle configurations whose lowest occupied site is ``first``
    (or the single empty configuration when n == 0).

    Returns:
        (best key, best pairs, count, capped minimizer masks, scanned)
    """
    size = lattice.num_sites
    if first is None:
        combos = iter([()])
    else:
        combos = ((first,) + rest for rest in combinations(range(first + 1, size), n - 1))

    best_key = None
    best_pairs = None
    count = 0
    masks: List[int] = []
    scanned = 0

    while True:
        chunk = list(islice(combos, CHUNK_SIZE))
        if not chunk:
            break
        scanned += len(chunk)
        occupancy = np.zeros((len(chunk), size), dtype=np.int64)
        if n:
            index = np.array(chunk, dtype=np.int64)
            occupancy[np.arange(len(chunk))[:, None], index] = 1
        m1, m2 = batch_pair_counts(occupancy, lattice)

        # Exact comparison happens on the distinct pair counts only
        distinct = sorted({PairCounts(int(a), int(b)) for a, b in zip(m1, m2)})
        if mode == 'lexicographic':
            keyed = [(pairs, pairs) for pairs in distinct]
        else:
            keyed = [(_exact_energy(pairs, couplings), pairs) for pairs in distinct]
        chunk_key = min(key for key, _ in keyed)
        winners = [pairs for key, pairs in keyed if key == chunk_key]

        if best_key is not None and chunk_key > best_key:
            continue
        if best_key is None or chunk_key < best_key:
            best_key, best_pairs, count, masks = chunk_key, winners[0], 0, []
        else:
            best_pairs = min(best_pairs, winners[0])

        hit = np.zeros(len(chunk), dtype=bool)
        for pairs in winners:
            hit |= (m1 == pairs.m1) & (m2 == pairs.m2)
        rows = np.flatnonzero(hit)
        count += len(rows)
        for row in rows[:max(0, cap - len(masks))]:
            masks.append(sum(1 << site for site in chunk[row]))

    return best_key, best_pairs, count, masks, scanned


def enumerate_ground_states(
    lattice: TorusLattice,
    n: int,
    couplings: Optional[CouplingConstants] = None,
    mode: str = 'numeric',
    limits: Limits = DEFAULT_LIMITS,
    jobs: int = 1,
) -> GroundStateReport:
    """
    Exhaustive ground-state scan over every n-particle configuration.

    The scan is partitioned by the lowest occupied site; partitions may run
    in parallel and are reduced in site order, so the report does not depend
    on ``jobs``.

    Args:
        lattice: Torus to scan
        n: Particle number
        couplings: g1, g2 (numeric mode); ignored by lexicographic mode
        mode: 'numeric' or 'lexicographic'
        limits: Enumeration budget and report cap
        jobs: Worker count

    Returns:
        GroundStateReport

    Raises:
        BudgetExceeded: If C(W*H, n) exceeds the enumeration budget
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    size = lattice.num_sites
    if not 0 <= n <= size:
        raise ValueError(f"particle number {n} outside [0, {size}]")
    couplings = couplings or CouplingConstants()

    total = comb(size, n)
    if total > limits.enumeration_budget:
        raise BudgetExceeded(
            f"C({size}, {n}) = {total} configurations exceeds the budget of "
            f"{limits.enumeration_budget}; use count_min_energy_configs_dp for zero-energy counts"
        )
    logger.info(f"Enumerating {total} configurations on {lattice} with n={n} ({mode})")

    prefixes = [None] if n == 0 else list(range(size - n + 1))
    results = Parallel(n_jobs=jobs)(
        delayed(_scan_prefix)(lattice, n, first, mode, couplings, limits.report_cap)
        for first in prefixes
    )

    best_key = None
    best_pairs = None
    degeneracy = 0
    masks: List[int] = []
    scanned = 0
    for key, pairs, count, part_masks, part_scanned in results:
        scanned += part_scanned
        if key is None:
            continue
        if best_key is None or key < best_key:
            best_key, best_pairs, degeneracy, masks = key, pairs, 0, []
        elif key > best_key:
            continue
        else:
            best_pairs = min(best_pairs, pairs)
        degeneracy += count
        masks.extend(part_masks[:max(0, limits.report_cap - len(masks))])

    configs = [OccupationConfig(mask, size) for mask in masks]
    hosts = []
    for config in configs:
        decomposition = decompose_config(config, lattice)
        hosts.append(decomposition[0] if decomposition else None)

    logger.info(f"Minimum {best_pairs} with degeneracy {degeneracy}")
    return GroundStateReport(
        lattice=(lattice.width, lattice.height),
        n=n,
        mode=mode,
        minimum=best_pairs,
        min_energy=best_pairs.energy(couplings),
        degeneracy=degeneracy,
        configurations=configs,
        cap=limits.report_cap,
        sectors=[classify_sector(config, lattice) for config in configs],
        hosts=hosts,
        scanned=scanned,
    )


# ===== Transfer-matrix counter =====

def _rotate(row: int, shift: int, width: int) -> int:
    shift %= width
    full = (1 << width) - 1
    return ((row << shift) | (row >> (width - shift))) & full


def _row_states(width: int):
    """
    Row masks free of in-row contacts, and the two-row states (a, b) with no
    contact between consecutive rows.
    """
    rows = [r for r in range(1 << width) if r & _rotate(r, 1, width) == 0]
    blocked_next = {
        a: a | _rotate(a, 1, width) | _rotate(a, -1, width) | _rotate(a, 2, width) | _rotate(a, -2, width)
        for a in rows
    }
    blocked_second = {a: _rotate(a, 1, width) | _rotate(a, -1, width) for a in rows}
    states = [(a, b) for a in rows for b in rows if b & blocked_next[a] == 0]
    return states, blocked_second


def zero_energy_counts(lattice: TorusLattice, max_n: int, limits: Limits = DEFAULT_LIMITS) -> List[int]:
    """
    Number of zero-energy configurations for every particle number 0..max_n.

    Rows interact with the next row through U1, U2 and the (2, 1) family of
    U3, and with the row after that through the (1, 2) family, so a state is
    a pair of consecutive rows. The periodic count is the trace of the
    H-th power of the pair-state transfer matrix, with the particle number
    carried as a polynomial degree.

    Raises:
        WidthExceeded: If the torus is wider than ``limits.dp_max_width``
    """
    width, height = lattice.width, lattice.height
    if width > limits.dp_max_width:
        raise WidthExceeded(
            f"width {width} exceeds {limits.dp_max_width}: the two-row state space "
            f"grows as 2^(2W); use a narrower torus (transpose if H is smaller)"
        )

    states, blocked_second = _row_states(width)
    index = {state: i for i, state in enumerate(states)}
    by_first: Dict[int, List[int]] = {}
    for i, (a, _) in enumerate(states):
        by_first.setdefault(a, []).append(i)

    # Counts are bounded by the number of subsets, so int64 is exact below 2^62
    safe = max(comb(lattice.num_sites, k) for k in range(max_n + 1)) < 2 ** 62
    dtype = np.int64 if safe else object

    num_states = len(states)
    transfer: Dict[int, np.ndarray] = {}
    for i, (a, b) in enumerate(states):
        for j in by_first.get(b, []):
            c = states[j][1]
            if c & blocked_second[a]:
                continue
            p = popcount(c)
            if p > max_n:
                continue
            if p not in transfer:
                transfer[p] = np.zeros((num_states, num_states), dtype=dtype)
            transfer[p][i, j] += 1
    logger.info(f"Transfer matrix on {lattice}: {num_states} two-row states")

    counts = [0] * (max_n + 1)
    batch = 256
    for start in range(0, num_states, batch):
        starts = list(range(start, min(start + batch, num_states)))
        walk = np.zeros((len(starts), num_states, max_n + 1), dtype=dtype)
        for r, s in enumerate(starts):
            walk[r, s, 0] = 1
        for _ in range(height):
            step = np.zeros_like(walk)
            for k in range(max_n + 1):
                for p, matrix in transfer.items():
                    if k + p <= max_n:
                        step[:, :, k + p] += walk[:, :, k] @ matrix
            walk = step
        for r, s in enumerate(starts):
            for k in range(max_n + 1):
                counts[k] += int(walk[r, s, k])
    return counts


def count_min_energy_configs_dp(lattice: TorusLattice, n: int, limits: Limits = DEFAULT_LIMITS) -> int:
    """
    Exact number of n-particle configurations with PairCounts (0, 0).

    Raises:
        WidthExceeded: If the torus is wider than ``limits.dp_max_width``
    """
    if not 0 <= n <= lattice.num_sites:
        raise ValueError(f"particle number {n} outside [0, {lattice.num_sites}]")
    return zero_energy_counts(lattice, n, limits)[n]
