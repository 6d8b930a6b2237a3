"""Quantum amplitude-estimation forecasting for random-forest regression,
validated step by step against exact classical evaluation on a dense
state-vector simulator."""

from .compiler import (
    BranchOutcomeTable,
    CompiledCircuit,
    LeafAngleTable,
    build_D,
    build_V,
    compile_forest_op,
    compile_inverse,
    compile_plus1,
    compile_times2,
    compile_tree_op,
    dump_circuit,
    grover_iterate,
)
from .exceptions import (
    DegenerateRangeError,
    ForestFormatError,
    MetricError,
    QrfError,
    ResourceLimitError,
    SchemaMismatchError,
    UnsupportedForestError,
)
from .forest_io import load_forest, save_forest
from .gates import Gate, gate_matrix, swap_as_cnots
from .model import (
    Attribute,
    DecisionTree,
    InputObject,
    METRIC_NAMES,
    Predicate,
    PredictionPair,
    RandomForest,
    beta_classical,
    beta_to_R,
    error_metric,
    forecast_classical,
    generate_random_forest,
    generate_random_input,
    walk_tree,
)
from .qae import (
    EstimationResult,
    PhaseEstimation,
    QaeConfig,
    error_bound,
    error_bound_relaxed,
    estimate_amplitude_once,
    estimate_with_boosting,
    query_count,
    reconstruct_R,
    repetitions_for_delta,
    run_forecast,
)
from .statevector import (
    Register,
    StateVector,
    apply_gate,
    apply_ucr,
    dump_amplitudes,
    measure_probability,
    sample,
)

__version__ = "0.1.0"
