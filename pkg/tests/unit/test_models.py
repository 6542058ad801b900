#!/usr/bin/env python3
"""
Test Data Models
================

Tests for OccupationConfig, PairCounts, HKParams and the report classes.
"""

import sys
import os
import math
from fractions import Fraction

import numpy as np

# Add repository root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from fcilab.config import Limits, DEFAULT_LIMITS
from fcilab.models import (
    ChernResult,
    CompositeReport,
    CouplingConstants,
    HKLatticeSize,
    HKParams,
    ManyBodySpectrum,
    OccupationConfig,
    PairCounts,
    ScanReport,
    ScanRow,
    TwistGrid,
)


def test_occupation_config():
    """Test bitmask occupation helpers"""
    print("Test: OccupationConfig...", end=" ")

    config = OccupationConfig.from_sites([0, 3, 5], 8)
    assert config.mask == 0b101001
    assert config.n == 3
    assert config.sites() == [0, 3, 5]
    assert config.occupied(3) and not config.occupied(4)
    assert list(config.occupancy()) == [1, 0, 0, 1, 0, 1, 0, 0]
    assert config.with_site(7).sites() == [0, 3, 5, 7]
    assert config.to_dict() == {'sites': [0, 3, 5], 'n': 3}
    try:
        OccupationConfig(1 << 8, 8)
        assert False, "oversized mask accepted"
    except ValueError:
        pass
    print("PASSED")


def test_pair_counts_order():
    """Test lexicographic order and arithmetic"""
    print("Test: PairCounts order...", end=" ")

    assert PairCounts(0, 9) < PairCounts(1, 0)
    assert PairCounts(0, 8) < PairCounts(0, 9)
    assert PairCounts(1, 2) + PairCounts(3, 4) == PairCounts(4, 6)
    assert PairCounts(3, 4) - PairCounts(1, 2) == PairCounts(2, 2)
    assert PairCounts(1, 8).energy(CouplingConstants(100.0, 1.0)) == 108.0
    print("PASSED")


def test_couplings_positive():
    """Test non-positive couplings are refused"""
    print("Test: CouplingConstants...", end=" ")

    assert CouplingConstants().to_dict() == {'g1': 100.0, 'g2': 1.0}
    for g1, g2 in ((0.0, 1.0), (1.0, -1.0)):
        try:
            CouplingConstants(g1, g2)
            assert False, f"g1={g1}, g2={g2} accepted"
        except ValueError:
            pass
    print("PASSED")


def test_hk_params():
    """Test parsing and derived parameter sets"""
    print("Test: HKParams...", end=" ")

    params = HKParams.parse("1,0.5,-2")
    assert params == HKParams(1.0, 0.5, -2.0)
    assert params.max_abs == 2.0
    assert params.flipped() == HKParams(1.0, 0.5, 2.0)
    assert params.scaled(2) == HKParams(2.0, 1.0, -4.0)
    for text in ("1,2", "a,b,c"):
        try:
            HKParams.parse(text)
            assert False, f"{text!r} accepted"
        except ValueError:
            pass
    try:
        HKParams(math.inf, 1.0, 1.0)
        assert False, "infinite hopping accepted"
    except ValueError:
        pass
    print("PASSED")


def test_hk_lattice_size():
    """Test HK lattice shapes"""
    print("Test: HKLatticeSize...", end=" ")

    size = HKLatticeSize.from_shape(4, 6)
    assert (size.L1, size.L2) == (2, 6)
    assert size.shape == (4, 6)
    assert size.dimension == 24
    try:
        HKLatticeSize.from_shape(3, 4)
        assert False, "odd width accepted"
    except ValueError:
        pass
    print("PASSED")


def test_twist_grid():
    """Test twist points are row-major with theta2 fastest"""
    print("Test: TwistGrid...", end=" ")

    points = TwistGrid(2).points()
    assert points == [(0.0, 0.0), (0.0, math.pi), (math.pi, 0.0), (math.pi, math.pi)]
    assert len(TwistGrid(8).points()) == 64
    try:
        TwistGrid(1)
        assert False, "single-point grid accepted"
    except ValueError:
        pass
    print("PASSED")


def test_scan_report_decreasing():
    """Test the monotone-deviation flag"""
    print("Test: ScanReport...", end=" ")

    falling = ScanReport([ScanRow(100.0, 0.1), ScanRow(1000.0, 0.01)], [0.0] * 4, g2=5.0)
    assert falling.decreasing
    flat = ScanReport([ScanRow(100.0, 0.1), ScanRow(1000.0, 0.1)], [0.0] * 4, g2=5.0)
    assert not flat.decreasing
    exact = ScanReport([ScanRow(100.0, 0.0), ScanRow(1000.0, 0.0)], [0.0] * 4, g2=5.0)
    assert exact.decreasing

    data = falling.to_dict()
    assert data['levels'] == 4
    assert data['rows'][0] == {'g1': 100.0, 'max_deviation': 0.1, 'intruders': 0}
    print("PASSED")


def test_result_serialization():
    """Test report dictionaries"""
    print("Test: Result serialization...", end=" ")

    plaquette = ChernResult(HKParams(1, 1, 1), 'plaquette', 1, 1.0, 0.0, grid=24, gap=2.0)
    data = plaquette.to_dict()
    assert data['grid'] == 24 and data['gap'] == 2.0
    assert 'eps' not in data

    loop = ChernResult(HKParams(1, 1, 1), 'loop', 1, 0.999, 0.001, eps=0.05, steps=2048)
    assert loop.to_dict()['steps'] == 2048

    report = CompositeReport(sigma=(1, 1, 1, -1), average=Fraction(1, 2), phase='FCI')
    assert report.to_dict()['average'] == '1/2'

    spectrum = ManyBodySpectrum(np.array([0.0, 0.0, 1.0]), clusters=[(0, 2, 0.0), (2, 1, 0.0)])
    assert spectrum.multiplicities == [2, 1]
    assert spectrum.to_dict()['energies'] == [0.0, 0.0, 1.0]
    print("PASSED")


def test_limits_from_dict():
    """Test Limits ignores unknown keys"""
    print("Test: Limits from dict...", end=" ")

    limits = Limits.from_dict({'dense_limit': 500, 'unknown': 1})
    assert limits.dense_limit == 500
    assert limits.sparse_limit == DEFAULT_LIMITS.sparse_limit
    assert Limits.from_dict(limits.to_dict()) == limits
    print("PASSED")


def run_tests():
    """Run all model tests"""
    print("=" * 80)
    print("Testing Data Models")
    print("=" * 80)
    print()

    tests = [
        test_occupation_config,
        test_pair_counts_order,
        test_couplings_positive,
        test_hk_params,
        test_hk_lattice_size,
        test_twist_grid,
        test_scan_report_decreasing,
        test_result_serialization,
        test_limits_from_dict,
    ]

    passed = 0
    failed = 0

    for test in tests:
        try:
            test()
            passed += 1
        except AssertionError as e:
            print(f"FAILED: {e}")
            failed += 1
        except Exception as e:
            print(f"ERROR: {e}")
            failed += 1

    print()
    print("=" * 80)
    print(f"Results: {passed}/{len(tests)} tests passed")
    print("=" * 80)

    return failed == 0


if __name__ == '__main__':
    success = run_tests()
    sys.exit(0 if success else 1)
