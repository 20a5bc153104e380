"""
信道核心模块
信道表示、校验、结构分析、信息量、化简与型工具
"""
from .types import (
    AuxChannel,
    ChannelGraph,
    Dmc,
    ExtendedReal,
    Factorization,
    Pmf,
    SupportStructure,
    log_ratio_term,
)
from .io import dump_channel, load_channel, load_channel_file
from .structure import (
    MergeResult,
    QStar,
    ambiguous_output_upper_bound,
    binary_input_reduce,
    channel_graph,
    check_factorization,
    cutoff_positive,
    disjoint_support_pairs,
    epsilon_noise_level,
    erasure_positive,
    find_alternating_cycle,
    has_positive_zero_error,
    merge_equivalent_outputs,
    q_star,
    supports_and_graph,
)
from .functionals import InfoFunctionals, info_functionals, mutual_information
from .product import product_channel
from .typeclass import (
    ConditionalType,
    TypeClass,
    closest_type,
    conditional_type,
    enumerate_conditional_types,
    enumerate_types,
    in_shell,
    message_set,
    type_of,
)
from .fixtures import CHANNELS, get_channel, parse_channel_string

__all__ = [
    'Dmc',
    'AuxChannel',
    'Pmf',
    'ChannelGraph',
    'SupportStructure',
    'Factorization',
    'ExtendedReal',
    'log_ratio_term',
    'load_channel',
    'load_channel_file',
    'dump_channel',
    'supports_and_graph',
    'channel_graph',
    'find_alternating_cycle',
    'epsilon_noise_level',
    'merge_equivalent_outputs',
    'MergeResult',
    'check_factorization',
    'binary_input_reduce',
    'disjoint_support_pairs',
    'has_positive_zero_error',
    'erasure_positive',
    'cutoff_positive',
    'q_star',
    'QStar',
    'ambiguous_output_upper_bound',
    'info_functionals',
    'InfoFunctionals',
    'mutual_information',
    'product_channel',
    'TypeClass',
    'ConditionalType',
    'enumerate_types',
    'enumerate_conditional_types',
    'type_of',
    'conditional_type',
    'in_shell',
    'message_set',
    'closest_type',
    'CHANNELS',
    'get_channel',
    'parse_channel_string',
]
