"""Discrete-event simulator for a functional processor farm.

Programs are ordered sets of typed functions.  They are decoded, given
kind-prefixed function IDs, fed to heterogeneous functional processor units
through a multilevel FIFO priority queue, and re-sequenced into program order
by an integration block.  A one-at-a-time fetch baseline is provided for
comparison.
"""

from .config import ConfigError, SimulationConfig, load_config, parse_config
from .engine import (
    Deadlock,
    IntegrationBuffer,
    NoFpuForKind,
    Simulation,
    compare,
    handle_sleep,
    integrate_commit,
    run,
    run_fetch_baseline,
)
from .fpu import FPUnit, Interconnect, LocalStore, begin_execution, local_store_lookup, utilization
from .funpiler import FID, FunctionInstance, FunctionState, assign_fid, decode, route
from .program import (
    FunctionKind,
    FunctionSpec,
    Mutability,
    PriorityDescriptor,
    ProgramGraph,
    critical_path_length,
    parse_program,
    ready_set,
    serialize_program,
)
from .scheduler import MultilevelPriorityQueue
from .stats import RunStats, compute_stats
from .trace import Trace, read_trace, write_trace

__version__ = "0.1.0"
