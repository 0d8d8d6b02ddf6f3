"""
The toy key: six inputs, five outputs over GF(3)
================================================

Load the bundled toy key, look at the secret map, and check the sample
input/output pair.
"""

import numpy as np

from pesto_lab import central_map, load_fixture, public_eval, render_poly, scheme_names, secret_invert

sk, pk, ipt, opt = load_fixture("toy")
print("params:", sk.params.as_dict())

# The secret map in x1, x2, y1..y4.  The first t = 2 components are
# x - q(y); the rest are the OV polynomials U evaluated at (x - q(y), y).
names = scheme_names(6, 2)
for i, g in enumerate(central_map(sk), 1):
    print(f"G{i} (degree {g.degree}):", render_poly(g, names)[:90], "...")

# The public map hides G between two affine layers.
print("public degrees:", [g.degree for g in pk.gpub])
print("G_pub(ipt) =", public_eval(pk, ipt), "expected", np.asarray(opt))

# With the secret key, inversion needs only linear algebra: fix the
# vinegar variables and solve for the oil ones.
for seed in range(3):
    z = secret_invert(sk, opt, seed=seed)
    print("preimage", z, "->", public_eval(pk, z))
