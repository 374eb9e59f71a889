"""Trace-formula and Selberg zeta machinery for Bianchi orbifolds.

Subpackages cover exact arithmetic in the Gaussian and Eisenstein
integers, the upper half-space geometry, group-element enumeration and
conjugacy classification, unitary characters of congruence quotients,
lattice L-functions via the Kronecker limit formula, the integral
transform pair of the trace formula, Eisenstein series, the geometric
side of the trace formula itself, and the zeta function with its
divisor bookkeeping.
"""

__version__ = "0.1.0"
