"""
From quartics to quadrics by Macaulay elimination
=================================================

The span of the public polynomials already contains quadrics.  Closing
everything under multiplication up to degree 4 and eliminating collapses
G_pub = c to a purely quadratic system with the same solutions.
"""

from pesto_lab import (
    brute_force_solutions,
    extract_quadratic_subspace,
    load_fixture,
    mutant_elimination,
    reduce_with_known_quadrics,
)

sk, pk, ipt, opt = load_fixture("toy")

# Quadrics visible without any multiplication: the degree <= 2 rows of the
# reduced coefficient matrix.
W = extract_quadratic_subspace(pk)
print("quadratic subspace dimension:", len(W))

red = mutant_elimination(pk, opt)
for stage in red.passes:
    print("pass", stage["pass"], "appended", stage["appended"], "rank", stage["rank"])
print(f"{len(red.system)} quadrics, residual {len(red.residual)}, "
      f"{red.rows} rows over {red.columns} columns")

# Ground truth by exhaustive search over 3^6 points.
truth = brute_force_solutions([g - int(c) for g, c in zip(pk.gpub, opt)], 3, 6)
got = brute_force_solutions(red.system, 3, 6)
print("solutions of G_pub = opt:", list(truth))
print("same solution set:", got == truth)

alt = reduce_with_known_quadrics(pk, opt)
print("two-stage variant agrees:", brute_force_solutions(alt.system, 3, 6) == truth)
