"""Finite-volume simulation with boundary-trace projection."""
from .core import (CLOSURES, PROFILES, SCHEMES, SimConfig, SimState, SimulationError, TimeSeries,
                   boundary_residual, discretize, energy, initial_from_spec, probes,
                   profile_function, project_traces, run, stable_dt, step, write_snapshots)
from .kernels import BACKEND

__all__ = ["BACKEND", "CLOSURES", "PROFILES", "SCHEMES", "SimConfig", "SimState", "SimulationError",
           "TimeSeries", "boundary_residual", "discretize", "energy", "initial_from_spec",
           "probes", "profile_function", "project_traces", "run", "stable_dt", "step",
           "write_snapshots"]
