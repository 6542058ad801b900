"""
FCI Lattice Toolkit CLI Tools
=============================

Command-line front end for the fcilab library.

Tools:
    fci: Classical ground states, Chern numbers, phase diagrams,
         composite Chern numbers and exact diagonalization

Usage examples:

    # Chern number of the HK lower band
    fci chern --t1 1 --t2 1 --td 1

    # Sector-averaged Chern number
    fci composite --sector-params 1,1,1 1,1,1 1,1,1 1,1,-1

"""

__version__ = "1.0.1"
__author__ = "Coela"
