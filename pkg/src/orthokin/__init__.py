"""Kinematics, singularity, performance and workspace analysis of the Orthoglide 3-axis translational machine."""

from .errors import (
    AtParallelSingularity,
    AtSerialSingularity,
    AtSingularity,
    DegenerateSpec,
    InconsistentConfiguration,
    InfiniteCondition,
    InvalidDesign,
    NoAssembly,
    OffsetOutOfBounds,
    OrthokinError,
    Unreachable,
)
from .jacobian import (
    KinematicMatrices,
    SingularityKind,
    SingularityReport,
    assemble,
    classify_singularity,
    velocity_forward,
    velocity_inverse,
)
from .kinematics import FkSolution, IkSolution, LegState, forward_kinematics, inverse_kinematics, loop_closure_residual
from .model import (
    DesignParameters,
    ToleranceConfig,
    canonical_design,
    isotropic_configuration,
    load_design,
    save_design,
    validate,
)
from .performance import (
    PerformancePoint,
    condition_number,
    ellipsoid_membership,
    isotropy_residual,
    manipulability,
    singular_values_3x3,
)
from .workspace.feasibility import FeasibilitySpec, Reason, classify_point, classify_points
from .workspace.octree import CellLabel, WorkspaceModel, build_octree
from .workspace.regions import largest_inscribed_cube, t_connected_regions
from .workspace.sections import cross_section, synthesize_joint_limits

__version__ = "0.1.0"
