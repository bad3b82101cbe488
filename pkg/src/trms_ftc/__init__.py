"""Twin-rotor rig toolkit: simulation, gain synthesis, fault estimation, FTC."""

__version__ = "0.1.0"
