"""2D TM scattering from objects embedded in layered media.

A recursive single-source boundary formulation compresses each nested layer
stack into one surface admittance operator on its outermost (optionally
fictitious) boundary; an analytic series for concentric circles and a dense
two-trace boundary-element solver serve as independent references.
"""

from .admittance import (
    AdmittanceOperator,
    assemble_multi,
    build_dsao,
    dsao_single,
    extend_same_medium,
    layer_step,
    pec_coated,
    sao_single,
)
from .diagnostics import (
    DiagnosticsReport,
    LayerSolveRecord,
    flop_estimate,
    flops_lu,
    flops_mm,
    flops_solve,
)
from .errors import (
    GeometryError,
    LayerscatError,
    SceneParseError,
    SceneValidationError,
    SeriesConvergenceError,
    SingularMatrixError,
)
from .exterior import (
    Excitation,
    RcsCurve,
    SolutionFields,
    angle_grid,
    extinction_width,
    far_field,
    incident_vector,
    rcs_curve,
    relative_error,
    solve_exterior,
    solve_pec_direct,
    total_scattering_width,
)
from .geometry import (
    Circle,
    DiscretizedBoundary,
    Layer,
    Medium,
    ObjectGroup,
    PolygonBoundary,
    Scene,
    SceneMesh,
    Sector,
    VACUUM,
    build_scene_mesh,
    concatenate_boundaries,
    discretize,
    medium_wavelength,
    wavenumber,
)
from .operators import (
    Kernel,
    OperatorSet,
    assemble_G,
    assemble_L,
    assemble_P,
    assemble_U,
    build_operator_set,
    green,
)
from .reference import (
    RadialLayerStack,
    mie_coefficients,
    mie_far_field,
    mie_rcs,
    pmchwt_solve,
    pmchwt_unknown_count,
    stack_from_scene,
)
from .sceneio import (
    RunConfig,
    parse_scene,
    parse_scene_text,
    read_rcs_csv,
    write_diagnostics,
    write_rcs_csv,
)
from .workflow import RunResult, compute_rcs, solve_scene_dsao, solve_scene_pmchwt

__version__ = "0.1.0"
