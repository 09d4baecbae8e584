"""Census engine for arithmetic parameters of solvable Maass wave forms.

Enumerates tetrahedral (A4) parameters over primes ell = 1 mod 3 via class
groups of real cyclic cubic fields, and octahedral (S4) parameters over
primes ell = 1 mod 4 via 3-ranks of real quadratic fields and ray class
computations in S3-sextic closures.
"""

__version__ = "0.1.0"
