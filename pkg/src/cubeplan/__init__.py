"""3D floorplanning with a Corner Block List representation."""
from .cbl import Cbl3, Decoded, Direction, Floorplan, PlacedBlock, decode, decode_full
from .kernel import BACKEND
from .metrics import CostBreakdown, Reference, cost
from .model import (AnnealConfig, BlockSpec, CostWeights, CriticalLoop, Design, DesignConfig,
                    DesignError, ImplementationCandidate, Net, Strategy, ThermalConfig,
                    generate_candidates, load_design)

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig", "BACKEND", "BlockSpec", "Cbl3", "CostBreakdown", "CostWeights",
    "CriticalLoop", "Decoded", "Design", "DesignConfig", "DesignError", "Direction",
    "Floorplan", "ImplementationCandidate", "Net", "PlacedBlock", "Reference", "Strategy",
    "ThermalConfig", "cost", "decode", "decode_full", "generate_candidates", "load_design",
]
