"""capweave: a traceability workbench over function-decomposition graphs.

Needs decompose into directive leaves; candidate capability sets are
formulated from the graph, scored, optimized under schedule/technology
constraints, and transformed into requirements with full trace links. Trace
and change-impact queries run over the resulting project aggregate.
"""

from .errors import (
    CapweaveError,
    ParseError,
    UnknownEntityError,
    ValidationError,
    Violation,
)
from .formulation import (
    CapabilitySet,
    EnumerationLimits,
    Strategy,
    enumerate_candidates,
    is_valid_candidate,
    make_candidate,
    rank_candidates,
)
from .graph import (
    Directive,
    Edge,
    EdgeKind,
    FDGraph,
    FDNode,
    Need,
    NeedStatus,
    NodeKind,
    RiskCategory,
    SpaceTag,
    build_graph,
    validate_graph,
)
from .metrics import (
    ScoreWeights,
    SetScore,
    abstraction_imbalance,
    cohesion,
    coupling,
    relevance_from_category,
    score_set,
)
from .optimization import (
    Constraints,
    Increment,
    MemberFeasibility,
    OptimizedSelection,
    feasibility,
    optimize,
)
from .project import AuditEntry, Project, ProjectMeta
from .store import (
    apply_mutation,
    export_matrix,
    load_project,
    load_project_file,
    save_project,
    save_project_file,
)
from .trace import (
    ImpactReport,
    TraceLink,
    TracePath,
    critical_traces,
    impact_of_capability_change,
    impact_of_directive_change,
    impact_of_node_change,
    impact_of_requirement_change,
    need_neighborhood,
    trace_backward,
    trace_forward,
    trace_matrix,
)
from .transformation import (
    Requirement,
    RequirementStatus,
    TransformationReport,
    transform_capability,
    transform_directive,
    validate_transformation,
)

__version__ = "0.1.0"
