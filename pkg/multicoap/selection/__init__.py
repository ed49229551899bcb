# `cup` depends on the engine, which imports `rrr` -> `selection.cut`; keep this light
from .cut import cup_cut, cumulative_ratio, DEFAULT_TAU
