"""Equatorial Podles sphere and quantum-disk spectral triples, verified.

Exact symbolic q-algebra, truncated sparse-operator realizations of the
representation families, zeta-residue extraction, and the Chern character
/ Fredholm index pairings, all at desk scale.
"""

from .laurent import LaurentQ, eval_coeff
from .qalgebra import (
    NCMat2,
    NCPoly,
    adjoint,
    check_projector,
    multiply,
    normal_form,
    pprime,
)
from .expr import parse_expr
from .operators import (
    BandedOp,
    BlockOp,
    DiskBasis,
    SpinorBasis,
    WindowEmptyError,
    write_coo,
    write_matrix_market,
)
from .reps import (
    GeneratorMap,
    build_disk_rep,
    build_fock0,
    build_lambda,
    build_nu,
    build_rho,
    build_spin_rep,
    even_part,
    get_representation,
    odd_part,
    q_number,
    relation_residuals,
    represent,
)
from .smooth import SmoothDecomposition, smooth_decompose
from .spectral import (
    ResidueEstimate,
    Triple,
    ZetaSeries,
    absd_spinor_triple,
    commutators,
    get_triple,
    holomorphy_check,
    ideal_Qq_bound,
    mu_triple,
    n_disk_triple,
    pi_triple,
    residues,
    trace_with_power,
    zeta_series,
)
from .index import (
    CocyclePair,
    DecayCheckError,
    IndexResult,
    ProjectorOp,
    TraceUnstableError,
    chern0,
    fredholm_index,
    fundamental_projector,
    pairing,
    phi0,
    phi2,
    projector_p,
    projector_pprime,
    series_f,
)
from .projmod import ProjectiveModule, build_module, verify_equivalence
from .reports import Report, make_report, render_json, render_series_csv

__version__ = "0.1.0"
