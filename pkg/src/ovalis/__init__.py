"""Exact combinatorics of complex schemes for degree-9 M-curves with three nests.

Modules: ``codes`` (nest codes, schemes, types), ``orientation`` (invariants
and the coefficient fit), ``pipeline`` (filters, lambda feasibility, tables),
``ledger`` (certificate checking) and ``corpus`` (table files and diffs).
"""

__version__ = "0.1.0"
