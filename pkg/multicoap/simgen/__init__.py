from .generator import SimConfig, SimTruth, generate
