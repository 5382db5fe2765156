"""vortour: ATSP approximation on planar-with-apices-and-one-vortex digraphs.

Library + CLI: exact-rational Held-Karp LP with cutting planes, an exact
vortex dynamic program, thin tree/forest constructions, circulation rounding,
and a hardness-instance reduction chain — all verified at small scale against
independent brute-force oracles.
"""

__version__ = "0.1.0"
