"""
How the two attacks grow
========================

Time both reductions on random keys of increasing size.  Matrix widths
are C(n+m+2, 2) for the relation search and C(n+4, 4) for the Macaulay
matrix.
"""

from pesto_lab import PestoParams
from pesto_lab.cli import bench_row

for n, m, t, s in [(6, 5, 2, 1), (9, 7, 3, 2), (12, 10, 4, 2), (15, 12, 5, 3)]:
    row = bench_row(PestoParams(n, m, t, s), "hole", seed=0)
    print(f"hole     n={n:2d} m={m:2d}  {row['matrix_rows']}x{row['matrix_cols']:<4}"
          f" dim={row['relation_dim']:<3} {row['seconds']}s")

for n, m, t, s in [(6, 5, 2, 1), (9, 7, 3, 2)]:
    row = bench_row(PestoParams(n, m, t, s), "groebner", seed=0)
    print(f"groebner n={n:2d} m={m:2d}  {row['matrix_rows']} rows x {row['matrix_cols']} cols"
          f"  {row['seconds']}s")
