"""Movable-antenna placement on a sampled aperture via fixed-hop shortest paths."""

from .channel import (
    GainProfile,
    PathSet,
    SamplingGrid,
    ScenarioConfig,
    channel_gains,
    draw_path_set,
    draw_power_fractions,
    field_response,
    make_grid,
)
from .selectors import (
    AntennaLayout,
    fpa_as_select,
    fpa_no_as_positions,
    mrt_received_power,
    sequential_update,
)
from .solver import (
    InfeasibleError,
    PointGraph,
    Selection,
    brute_force_oracle,
    build_point_graph,
    fixed_hop_shortest_path,
    solve_optimal,
)

__version__ = "0.1.0"
