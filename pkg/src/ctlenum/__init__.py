"""Enumeration of CTL-satisfying submodels of rooted Kripke models."""

from .formula import (
    AF,
    AG,
    AR,
    AU,
    EF,
    EG,
    ER,
    EU,
    EX,
    AX,
    And,
    Atom,
    Bottom,
    Formula,
    FragmentProfile,
    Not,
    Or,
    Top,
    TrimmedForm,
    afag_trim,
    classify_fragment,
    dualize_step,
    parse_formula,
    render_formula,
    substitute_atoms,
)
from .kripke import (
    EdgeElement,
    Element,
    KripkeModel,
    PartialDecision,
    Submodel,
    World,
    WorldElement,
    canonical_serialize,
    closure,
    ground_set,
    is_valid_submodel,
    load_model,
    parse_model,
    reachable_set,
    restrict,
    save_model,
    submodel_equal,
    validate_model,
)
from .modelcheck import LabelingResult, check, check_equiv, label
from .enumeration import (
    EnumerationSession,
    EnumerationStats,
    ExtensionQuery,
    Lasso,
    OracleKind,
    brute_force_enumerate,
    enumerate_submodels,
    exists_afag,
    exists_submodel,
    extend_afag,
    extend_exhaustive,
    extend_monotone,
    extract_lasso_witness,
)
from .reductions import (
    HampathInstance,
    ReductionInstance,
    assignment_to_submodel,
    brute_hampath,
    brute_sat,
    hampath_to_af,
    hampath_to_ar,
    hampath_to_au,
    hampath_to_ax,
    sat_to_ag,
)

__all__ = [name for name in dir() if not name.startswith("_")]
