"""Double-slit diffraction simulation and fringe-visibility forensics."""

from slitaudit.geometry import ApparatusConfig, DomainError, FringePrediction, predict

__all__ = ["ApparatusConfig", "DomainError", "FringePrediction", "predict"]
__version__ = "0.1.0"
