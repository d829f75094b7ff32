from .base import MethodBase
from .fibonacci import FibonacciMethod
from .repair import PcfgRepairMethod, RepairMethod
from .unary import UnaryMethod

__all__ = ["FibonacciMethod", "MethodBase", "PcfgRepairMethod", "RepairMethod", "UnaryMethod"]
