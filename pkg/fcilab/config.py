"""
Numeric Limits
==============

Size limits and tolerances shared by the analysis modules.

There is no configuration file; the CLI passes flags through and library
callers can hand a custom ``Limits`` to any function that takes one.
"""

from dataclasses import dataclass, fields, asdict
from typing import Dict, Any


@dataclass(frozen=True)
class Limits:
    """Size limits and numeric tolerances"""

    # Brute-force enumeration refuses above this many configurations
    enumeration_budget: int = 10 ** 8
    # Transfer-matrix counter keeps two rows of W bits per state
    dp_max_width: int = 12

    # Many-body dimensions
    dense_build_limit: int = 5 * 10 ** 4
    sparse_limit: int = 10 ** 6
    dense_limit: int = 10 ** 4
    # Coupling scans use Lanczos above this dimension
    scan_dense_limit: int = 2000

    # Multiplet boundary: gap / intra-cluster splitting ratio
    cluster_factor: float = 10.0
    cluster_tolerance: float = 1e-9

    # Gap below gap_threshold * max|t| counts as closed
    gap_threshold: float = 1e-8
    residue_tolerance: float = 1e-6
    singular_tolerance: float = 1e-12

    # Listed configurations per ground-state report
    report_cap: int = 64

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Limits':
        """Create Limits from a dictionary, ignoring unknown keys"""
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in known})

    def to_dict(self) -> Dict[str, Any]:
        """Convert Limits to dictionary"""
        return asdict(self)


DEFAULT_LIMITS = Limits()
