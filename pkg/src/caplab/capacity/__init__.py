"""
容量模块
Shannon 容量、π0 线性规划、带反馈容量报告、二输入精确值与 min C(V)
"""
from .shannon import CapacityResult, blahut_arimoto, shannon_capacity
from .pi0 import Pi0Result, pi0
from .binary import BinaryExact, binary_input_exact
from .subchannels import SubchannelResult, min_capacity_subchannels
from .report import CapacityReport, feedback_capacity_report

__all__ = [
    'CapacityResult',
    'blahut_arimoto',
    'shannon_capacity',
    'Pi0Result',
    'pi0',
    'BinaryExact',
    'binary_input_exact',
    'SubchannelResult',
    'min_capacity_subchannels',
    'CapacityReport',
    'feedback_capacity_report',
]
