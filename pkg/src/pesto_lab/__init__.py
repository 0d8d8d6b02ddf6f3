"""Cryptanalysis workbench for the Pesto multivariate scheme.

Key generation and trapdoor inversion live in :mod:`pesto_lab.scheme`; the
two reductions of the quartic public key to quadrics are
:mod:`pesto_lab.groebner` (Macaulay elimination with mutants) and
:mod:`pesto_lab.hole` (quadratic input/output relations).
:mod:`pesto_lab.oracle` provides exhaustive-search ground truth.
"""

from .gf import FieldElement, field_arith, nullspace, rank, rref
from .groebner import (
    MacaulayMatrix,
    Reduction,
    build_degree_matrix,
    extract_quadratic_subspace,
    mutant_elimination,
    reduce_with_known_quadrics,
)
from .hole import (
    RelationSpace,
    collect_samples,
    find_quadratic_relations,
    hole_attack,
    isolate_short_relations,
    specialize_at_output,
)
from .mpoly import (
    AffineMap,
    Polynomial,
    compose_affine,
    monomials_up_to,
    parse_poly,
    render_poly,
    scheme_names,
)
from .oracle import (
    SolutionSet,
    brute_force_solutions,
    max_degree,
    ov_shape_check,
    solution_set_equal,
)
from .scheme import (
    PestoParams,
    PreimageNotFound,
    PublicKey,
    SecretKey,
    assemble_public,
    central_map,
    keygen,
    load_fixture,
    public_eval,
    secret_invert,
)

__version__ = "0.1.0"
