"""
Quadratic input/output relations from samples
=============================================

Evaluate the public map on random inputs, find every degree-2 relation
between inputs z and outputs w, and plug in the target output.
"""

import numpy as np

from pesto_lab import (
    brute_force_solutions,
    collect_samples,
    find_quadratic_relations,
    isolate_short_relations,
    load_fixture,
    ov_shape_check,
    specialize_at_output,
)
from pesto_lab.oracle import secret_coordinates, x_free_part

sk, pk, ipt, opt = load_fixture("toy")

Z, W = collect_samples(pk, seed=0)
print("samples:", Z.shape[0])
rs = find_quadratic_relations((Z, W), 6, 5, 3)
print("relation space dimension:", rs.dim)

# Relations free of w*w and w*z terms come from the x - q(y) layer.
short = isolate_short_relations(rs)
print("short relations:", len(short))

Zf, Wf = collect_samples(pk, 200, seed=1)
print("all relations vanish on fresh pairs:", bool(rs.vanishes_on(Zf, Wf).all()))

system = specialize_at_output(rs, opt)
truth = brute_force_solutions([g - int(c) for g, c in zip(pk.gpub, opt)], 3, 6)
print("max degree:", max(p.degree for p in system))
print("same solution set:", brute_force_solutions(system, 3, 6) == truth)

# White-box look: in the secret coordinates, the relations that avoid x
# have no oil*oil terms.
u_rows = x_free_part(secret_coordinates(system, sk.A2), 2)
print("U-derived relations:", len(u_rows), "OV shape:", ov_shape_check(u_rows, [3, 4, 5]))
print("ipt satisfies every relation:", all(p.evaluate(np.asarray(ipt)) == 0 for p in system))
