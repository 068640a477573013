"""Macrospin simulation of voltage-controlled MTJ switching and crossbar writes."""
from .device import DeviceParams, InvalidParameterError
from .dynamics import SolverConfig, Trajectory, heun_step, llg_rhs, simulate
from .montecarlo import SwitchEstimate, estimate_probability
from .waveform import Waveform, combined_pulse, vcma_pulse

__all__ = ["DeviceParams", "InvalidParameterError", "SolverConfig", "Trajectory", "heun_step",
           "llg_rhs", "simulate", "SwitchEstimate", "estimate_probability", "Waveform",
           "combined_pulse", "vcma_pulse"]
__version__ = "0.1.0"
