"""Phase analysis and small-phase feedback stability certification.

The package computes phase sectors of LTI and nonlinear input-output
systems from analytic-signal inner products and matrix numerical ranges,
certifies feedback stability by gain, phase, circle and cone criteria,
and simulates the standard negative-feedback interconnection.
"""

from .corpus import (
    CorpusSpec,
    NoiseFamily,
    PulseFamily,
    ToneFamily,
    default_corpus_spec,
    gen_corpus,
    quick_corpus_spec,
)
from .errors import (
    IndefiniteError,
    InputError,
    PhasekitError,
    SimulationError,
    UnstableSystemError,
)
from .estimate import (
    EmpiricalPassivity,
    EmpiricalPhase,
    PhaseSample,
    empirical_nrange,
    empirical_passivity,
    empirical_phase,
    write_samples_csv,
)
from .lti import (
    DEFAULT_GRID,
    FrequencyGrid,
    Rational,
    StateSpace,
    TransferMatrix,
    benchmark_plant,
    freq_response,
    hinf_norm,
    is_hurwitz,
    nyquist_curve,
    read_system,
    realize,
    write_system,
)
from .nrange import (
    MatrixSectorCertificate,
    PhaseInterval,
    matrix_phase_interval,
    matrix_sector_certify,
    nrange_boundary,
)
from .phase import (
    FrequencywisePhase,
    MultiplierSpec,
    PassivityIndices,
    QuantizerParams,
    SectorBound,
    SectorPhase,
    SystemPhaseReport,
    identity_multiplier,
    lti_passivity_index,
    lti_phase,
    lti_phase_frequencywise,
    quantizer_sector,
    reactive_ratio,
    sector_phase,
    supply_rate_check,
    vsp_phase,
)
from .signals import (
    ComplexSignal,
    RealSignal,
    analytic,
    hilbert,
    inner,
    read_signal_csv,
    truncate,
    write_signal_csv,
)
from .sim import (
    FeedbackResult,
    FeedbackSpec,
    NLSystem,
    SystemOperator,
    benchmark_controller,
    benchmark_experiment,
    convergence_metric,
    quantizer_map,
    sector_static,
    simulate,
    simulate_feedback,
)
from .stability import (
    ForbiddenRegion,
    StabilityVerdict,
    circle_criterion_check,
    closed_loop_phase_bound,
    cone_contains_disk,
    freqwise_small_phase_check,
    generalized_small_phase_check,
    index_passivity_check,
    parallel_phase,
    phase_cone_check,
    small_gain_check,
    small_phase_check,
)

__version__ = "0.1.0"
