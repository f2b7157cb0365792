"""epipencil: two-view epipolar geometry from 4-6 correspondences.

Knowing one epipole (or just a line carrying it) cuts the number of
point matches needed to recover the epipolar geometry well below the
classic seven, by exploiting the equal cross-ratios of corresponding
epipolar-line pencils.
"""

from .conic import Conic, conic_sample, transform_conic
from .constraints import (
    all_quads,
    canonical_quad,
    conic_from_4corr,
    constraint_residual,
    quad_orderings,
    residual_rms,
)
from .correspondences import Correspondence, CorrSet
from .errors import (
    CoincidentSolutionError,
    DegenerateDataError,
    DegenerateInputError,
    DegeneratePencilError,
    GenerationFailureError,
    GeometryError,
    IllConditionedConfigurationError,
    NoSolutionError,
    RedundantConfigurationError,
    UnderdeterminedError,
)
from .fundamental import (
    FundMatrix,
    epipolar_transfer,
    epipoles_from_f,
    f_from_epipoles_and_corr,
    sym_epipolar_distance,
)
from .projective import (
    cross_ratio_lines,
    det2,
    det3,
    display_hom,
    hom,
    homography_to_standard_triangle,
    join,
    meet,
    normalize_hom,
    proj_equal,
    reciprocal,
)
from .scenes import (
    NoiseSpec,
    Scene,
    add_noise,
    bench_csv,
    bench_noise,
    eight_point,
    generate_scene,
    scene_s1,
)
from .solvers import (
    ConicLocus,
    EpipoleEstimate,
    LineParam,
    SixSolution,
    rank_candidates,
    solve_five,
    solve_four,
    solve_six,
)

__version__ = "0.1.0"
