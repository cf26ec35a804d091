"""Multivariate causal discovery for nonlinear dynamical systems.

Pairwise convergent cross mapping proposes a directed graph; multivariate
partial cross mapping then prunes links that are explained by mediating
variables.
"""
from .crossmap import (
    CCMResult,
    ConvergenceCurve,
    NeighborSet,
    NeighborTable,
    ccm_pair,
    ccm_score,
    convergence_curve,
    knn_neighbors,
    neighbor_table,
    project,
    simplex_reconstruct,
)
from .discovery import DiscoveryReport, MXMapConfig, PruneRecord, discover, orient, phase1, phase2
from .embedding import (
    Dataset,
    EmbedParams,
    Embedding,
    TimeSeries,
    build_delay_embedding,
    build_multivariate_embedding,
    delay_matrix,
)
from .errors import (
    DataError,
    DegenerateInputError,
    GenerationError,
    MXMapError,
    ParameterError,
    PathLimitError,
    SingularConditioningError,
)
from .graph import CausalGraph
from .gridsearch import (
    GridResult,
    SweepCase,
    admissible_thresholds,
    case_ratios,
    case_results,
    cases_from_graph,
    pcm_grid,
    threshold_sweep,
)
from .metrics import MetricsReport, evaluate
from .pcm import (
    COMPOSE,
    COORDINATES,
    REEMBED,
    Link,
    PCMConfig,
    PCMResult,
    classify_link,
    classify_link_threshold,
    multi_pcm,
    pcm_univariate,
)
from .simgen import NO_NOISE, NoiseConfig, SystemPreset, chain_preset, generate, get_preset, mirage_subsequences, presets
from .stats import correlation, partial_correlation

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
