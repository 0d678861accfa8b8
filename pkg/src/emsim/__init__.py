"""Electromigration wear modeling and simulation toolkit.

Analytical RMS-EM / Black's-equation lifetime models plus trace-driven
simulators for the three microprocessor structures where write activity
concentrates: ALU banks, architectural register files, and the cache/TLB
hierarchy. Each structure can be replayed under a conventional allocation
policy and under a wear-leveling one, and the resulting per-entry write
distributions turned into lifetime-improvement reports.
"""

__version__ = "0.1.0"
