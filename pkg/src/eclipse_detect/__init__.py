"""Eclipse-attack detection on blockchain communication networks.

Offline Fréchet change-point detection over sequences of adjacency
matrices, with optional Johnson-Lindenstrauss compression and Brownian
bridge threshold calibration.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .graph import AdjacencyMatrix, GraphSequence, GroundTruth, frobenius_distance, vectorize  # noqa: E402
from .simulate import (  # noqa: E402
    AttackScenario,
    apply_observation_noise,
    generate_sequence,
    benchmark_scenario,
    sample_attack_snapshot,
    sample_honest_snapshot,
)
from .projection import JlMap, ProjectedSequence, build_jl_map, min_jl_dimension, project_sequence  # noqa: E402
from .frechet import (  # noqa: E402
    SegmentStats,
    StatisticCurve,
    frechet_mean,
    pooled_sigma_sq,
    segment_stats,
    statistic_curve,
)
from .detector import (  # noqa: E402
    BridgeQuantileTable,
    DetectConfig,
    DetectionReport,
    detect,
    estimate_onset,
    simulate_bridge_quantile,
)
