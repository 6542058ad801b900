"""
Unified Test Suite for the FCI Lattice Toolkit
==============================================

Unit tests for the fcilab modules and end-to-end runs of the fci command.
"""

__version__ = "1.0.0"

# Test suite package
__all__ = [
    'test_lattice',
    'test_classical',
    'test_hk',
    'test_chern',
    'test_composite',
    'test_ed',
    'test_models',
    'test_utils',
    'test_cli',
    'test_integration',
    'test_strong_coupling',
]
