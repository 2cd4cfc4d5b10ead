# src/domain/models/__init__.py
from src.domain.models.demand import demand_matrix, demand_profile, write_demand_csv
from src.domain.models.gas import GasStatistics, build_gas, chain_topology, gas_statistics
from src.domain.models.pid import build_pid, pid_time_partition

__all__ = [
    "GasStatistics",
    "build_gas",
    "build_pid",
    "chain_topology",
    "demand_matrix",
    "demand_profile",
    "gas_statistics",
    "pid_time_partition",
    "write_demand_csv",
]
