"""Exact diagonalization of the extended SU(N) Hubbard-Heisenberg chain.

Checks the Lieb-Mattis type ordering of the lowest energy per Young diagram,
Perron-Frobenius positivity of relative ground states, and the ground-state
multiplet on small open chains.
"""

__version__ = "0.1.0"
