"""Graph sampling on unknown networks with core-periphery structure."""
from .access import AccessLog, UnknownNetworkView, view
from .errors import (DataError, EmptyGraphError, InvariantViolation, MetricUndefinedError,
                     ParameterError, ParseError, PeripheryShortfallError, SampleTooSmallError,
                     SlsrError)
from .estimator import EstimatedParams, estimate_params
from .graph import (CorePeripheryStats, Graph, generate_ba, generate_ba_mixed, generate_gnp,
                    load_edge_list, partition_stats, read_edge_list, write_edge_list)
from .pipeline import SlsrConfig, SlsrOutput, assemble, bisect_x, slsr_sample
from .traversal import (TraversalConfig, forest_fire, non_backtracking_walk, periphery_sampling,
                        rank_degree, sample_baseline, simple_random_walk)

__version__ = "0.1.0"
