"""coopguards - Cooperative guards in polygons with holes, placed centrally or by simulated agents."""

__version__ = "0.1.0"
