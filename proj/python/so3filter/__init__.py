"""Stochastic attitude filter on SO(3): geometry helpers, simulation and Monte Carlo runs."""

from ._so3filter import (
    FilterGains,
    Scenario,
    So3FilterError,
    TRAJECTORY_COLUMNS,
    ecl_dist,
    exp_map,
    filter_step,
    from_angle_axis,
    from_euler_zyx,
    from_rodriguez,
    monte_carlo,
    pa,
    paper_scenario,
    phi,
    reproject,
    run,
    skew,
    to_euler_zyx,
    to_rodriguez,
    verify,
    vex,
    weighted_dist,
)

__all__ = [
    "FilterGains",
    "Scenario",
    "So3FilterError",
    "TRAJECTORY_COLUMNS",
    "ecl_dist",
    "exp_map",
    "filter_step",
    "from_angle_axis",
    "from_euler_zyx",
    "from_rodriguez",
    "monte_carlo",
    "pa",
    "paper_scenario",
    "phi",
    "reproject",
    "run",
    "skew",
    "to_euler_zyx",
    "to_rodriguez",
    "verify",
    "vex",
    "weighted_dist",
]
