"""Linearizing charts for matrices with simple real spectrum and the
isospectral flows they straighten out."""

from .charts import (
    ChartPoint,
    MoserData,
    Profile,
    chart_decompose,
    chart_frames,
    chart_reconstruct,
    charts_containing,
    jacobi_detect,
    jacobi_from_moser,
    moser_data,
    profile_generate,
    profile_member,
    profile_of,
    profile_violation,
    schur_frame,
    solve_conjugator,
    split_tangent,
)
from .errors import (
    ComplexSpectrum,
    DegenerateSingularValues,
    DegenerateSpectrum,
    FlowOverflow,
    IsoflowError,
    NonmonotonicFunction,
    NonpositiveSpectrum,
    NonUnitConjugator,
    NotInChart,
    NotInSvdChart,
    OrderMismatch,
    SingularInput,
    ZeroAnchor,
    ZeroMinor,
)
from .extended import (
    calc,
    flow19_exact,
    flow19_oracle,
    flow20_exact,
    flow20_oracle,
    qr_step,
    sts_flow,
    toda_log_time1,
)
from .functions import ScalarFunction, parse_function
from .integrate import Trajectory, rk4
from .linalg_core import (
    Permutation,
    Spectrum,
    commutator,
    leading_minors,
    lq_pos,
    lu_unit,
    mat_exp,
    plu,
    polar,
    project,
    qr_pos,
    real_eigen,
    sign_normalize_rows,
)
from .svd import (
    SvdChartPoint,
    gram_coordinates,
    polar_split,
    svd_chart_decompose,
    svd_chart_reconstruct,
    svd_charts_containing,
    svd_exact,
    svd_first_chart,
    svd_frames,
    svd_lax_integrate,
    svd_rhs,
)
from .toda import (
    StraightlinePoint,
    asymptotic_limit,
    conserved_quantities,
    from_straightline,
    l_evolve,
    lax_integrate,
    lax_rhs,
    p_of_matrix,
    straightline_evolve,
    to_straightline,
    toda_exact,
)

__version__ = "0.1.0"
