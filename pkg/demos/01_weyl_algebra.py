"""Tour of the qudit Weyl operators and their exact phase bookkeeping.

Run: python3 demos/01_weyl_algebra.py
"""

import numpy as np

from stabdistill.field_phase import phase_value
from stabdistill.weyl import ErrorElement, adjoint, dense_matrix, eigensystem, multiply, symplectic_product

d = 3
x = ErrorElement.from_kl([1], [0], d)  # clock
z = ErrorElement.from_kl([0], [1], d)  # shift

# Products pick up powers of omega that are tracked as integer exponents of tau = exp(i pi / d).
for a, b in ((x, z), (z, x)):
    prod = multiply(a, b)
    print(f"W{a.flat} W{b.flat} = tau^{prod.phase.exponent} W{prod.element.flat}")
    assert np.allclose(prod.dense(), dense_matrix(a) @ dense_matrix(b))

# The commutation phase is the symplectic product.
print("<x, z> =", symplectic_product(x, z), " <z, x> =", symplectic_product(z, x))

# Adjoints are Weyl operators again, up to a phase.
xz = x + z
dag = adjoint(xz)
print(f"W{xz.flat}^dag = tau^{dag.phase.exponent} W{dag.element.flat}")

# Every non-identity W_{a,b} has d eigenvalues; the d = 2 case lives on quarter turns.
for a, b in ((1, 0), (0, 1), (1, 1)):
    es = eigensystem(a, b, 2)
    print(f"d=2 W_({a},{b}) eigenvalues:", [complex(es.value(lam)) for lam in range(2)])
print("tau^1 at d=2 =", phase_value(1, 2))
