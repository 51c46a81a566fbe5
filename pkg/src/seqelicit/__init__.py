"""Sequential information elicitation for multi-party computation games.

Exact-rational tooling to decide whether an anonymous boolean function can be
computed in equilibrium by approaching costly-to-inform agents one at a time,
to run the highest-cost-first mechanism online, and to audit the resulting
incentives, with brute-force oracles for cross-checking.
"""

from .errors import (
    BadFunctionTable,
    CapExceeded,
    CostOutOfRange,
    ElicitError,
    MalformedDocument,
    PolicyFailed,
    QOutOfRange,
    StateExhausted,
    TargetNotInGraph,
)
from .graph import StateGraph, build, export_dot, max_count_path
from .mechanism import (
    ALL_ACTIONS,
    Approach,
    AuditRecord,
    AuditReport,
    Fail,
    FixedOrderPolicy,
    Halt,
    HcfPolicy,
    RunResult,
    audit_full_tree,
    deviation_profile,
    deviation_utility,
    hcf_next,
    run,
    sample_run,
)
from .model import (
    ACTION_NAMES,
    Action,
    AnonymousFunctionSpec,
    COMPUTE_NEGATED,
    COMPUTE_REPORT_ONE,
    COMPUTE_REPORT_ZERO,
    GUESS_ONE,
    GUESS_ZERO,
    InfoState,
    ProblemInstance,
    Rational,
    Report,
    TRUTHFUL_COMPUTE,
    Transcript,
    consensus,
    emit,
    from_ones_counts,
    ingest,
    majority,
    normalize_low_q,
    parity,
    unanimity,
)
from .oracle import (
    DecisionTree,
    OracleVerdict,
    TreePolicy,
    brute_pivotal,
    exhaustive_existence,
    hcf_tree_existence,
)
from .pivotal import NodeLabel, c_of, determine, node_label, pivotal_prob, threshold
from .verify import Verdict, Witness, exists_appropriate

__version__ = "0.1.0"

__all__ = [
    "ACTION_NAMES",
    "ALL_ACTIONS",
    "Action",
    "AnonymousFunctionSpec",
    "Approach",
    "AuditRecord",
    "AuditReport",
    "BadFunctionTable",
    "COMPUTE_NEGATED",
    "COMPUTE_REPORT_ONE",
    "COMPUTE_REPORT_ZERO",
    "CapExceeded",
    "CostOutOfRange",
    "DecisionTree",
    "ElicitError",
    "Fail",
    "FixedOrderPolicy",
    "GUESS_ONE",
    "GUESS_ZERO",
    "Halt",
    "HcfPolicy",
    "InfoState",
    "MalformedDocument",
    "NodeLabel",
    "OracleVerdict",
    "PolicyFailed",
    "ProblemInstance",
    "QOutOfRange",
    "Rational",
    "Report",
    "RunResult",
    "StateExhausted",
    "StateGraph",
    "TRUTHFUL_COMPUTE",
    "TargetNotInGraph",
    "Transcript",
    "TreePolicy",
    "Verdict",
    "Witness",
    "audit_full_tree",
    "brute_pivotal",
    "build",
    "c_of",
    "consensus",
    "determine",
    "deviation_profile",
    "deviation_utility",
    "emit",
    "exhaustive_existence",
    "exists_appropriate",
    "export_dot",
    "from_ones_counts",
    "hcf_next",
    "hcf_tree_existence",
    "ingest",
    "majority",
    "max_count_path",
    "node_label",
    "normalize_low_q",
    "parity",
    "pivotal_prob",
    "run",
    "sample_run",
    "threshold",
    "unanimity",
]
