"""Protograph LDPC code design for ASK constellations.

Pipeline: bit-channel statistics of Gray-labeled ASK under bit-metric
decoding (uniform or Maxwell-Boltzmann shaped inputs), biAWGN surrogate
channels, protograph threshold analysis and differential-evolution search,
quasi-cyclic lifting, and Monte Carlo verification with a belief-propagation
decoder.
"""

from .codec import (
    CodecContext,
    PointResult,
    SimulationReport,
    build_encoder,
    operating_point,
    simulate,
)
from .errors import (
    BracketError,
    ConstructionError,
    DegenerateLevelError,
    NumericError,
    ParameterError,
    ParseError,
    ProtoLdpcError,
    RankDeficiencyError,
    SearchError,
)
from .infotheory import (
    BitChannelProfile,
    awgn_capacity,
    bit_channel_entropies,
    bmd_rate,
    j_fun,
    j_inv,
    lvalues,
    snr_for_capacity,
    snr_for_rate,
    symbol_mi,
    transmission_rate,
)
from .modulation import (
    ChannelSpec,
    Constellation,
    brgc_labels,
    maxwell_boltzmann,
    optimize_shaping,
    shaped_constellation,
    shaping_for_entropy,
    uniform_constellation,
    with_snr,
)
from .optimizer import OptimizeResult, SearchSpec, default_bit_map, optimize
from .pexit import PexitResult, pexit_converges, pexit_run, threshold
from .protograph import (
    Basematrix,
    Diagnostics,
    Lineage,
    ParityCheckMatrix,
    choose_stage_sizes,
    deg2_cycle_weight,
    export_alist,
    has_four_cycles,
    import_alist,
    lift,
    random_basematrix,
    validate,
)
from .surrogate import (
    ShapedFamily,
    SurrogateSet,
    UniformFamily,
    bmd_limit_snr,
    match_surrogate,
    shaped_family,
    surrogate_set,
    uniform_family,
)

__all__ = [
    "BitChannelProfile",
    "Basematrix",
    "BracketError",
    "ChannelSpec",
    "CodecContext",
    "Constellation",
    "ConstructionError",
    "DegenerateLevelError",
    "Diagnostics",
    "Lineage",
    "NumericError",
    "OptimizeResult",
    "ParameterError",
    "ParityCheckMatrix",
    "ParseError",
    "PexitResult",
    "PointResult",
    "ProtoLdpcError",
    "RankDeficiencyError",
    "SearchError",
    "SearchSpec",
    "ShapedFamily",
    "SimulationReport",
    "SurrogateSet",
    "UniformFamily",
    "awgn_capacity",
    "bit_channel_entropies",
    "bmd_limit_snr",
    "bmd_rate",
    "brgc_labels",
    "build_encoder",
    "choose_stage_sizes",
    "default_bit_map",
    "deg2_cycle_weight",
    "export_alist",
    "has_four_cycles",
    "import_alist",
    "j_fun",
    "j_inv",
    "lift",
    "lvalues",
    "match_surrogate",
    "maxwell_boltzmann",
    "operating_point",
    "optimize",
    "optimize_shaping",
    "pexit_converges",
    "pexit_run",
    "random_basematrix",
    "shaped_constellation",
    "shaped_family",
    "shaping_for_entropy",
    "simulate",
    "snr_for_capacity",
    "snr_for_rate",
    "surrogate_set",
    "symbol_mi",
    "threshold",
    "transmission_rate",
    "uniform_constellation",
    "uniform_family",
    "validate",
    "with_snr",
]
