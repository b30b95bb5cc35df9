"""UAV deployment planning toolkit.

Feasible hovering regions under joint localization-accuracy and
communication-rate requirements, and minimum-UAV deployment via geometric
minimum hitting set solvers.
"""

from .channel import (LinkBudget, RadioEnvironment, g2a_gain, g2a_rate,
                      g2g_gain, g2g_rate, los_probability,
                      rayleigh_power_quantile)
from .errors import (CommInfeasibleError, ConfigError, DegenerateGeometryError,
                     DomainError, GridTooCoarseError, InvalidConicError,
                     InvalidThresholdError, PlanningError,
                     ScenarioInfeasibleError)
from .geometry import (Conic2D, EllipseParams, Point3, UnitVector3,
                       conic_to_ellipse, elevation_angle_deg, is_ellipse,
                       unit_vector)
from .localization import (CrlbResult, LocalizationSetting, NprsConfig,
                           ToaNoiseModel, crlb, det_R_closed_form, fim,
                           jacobian_H, lemma1_holds, nprs_psi, opt_d, opt_d1,
                           opt_d2, tdoa_covariance)
from .regions import (AlphaCoefficients, CommRegion, LocalizationRegion,
                      alpha_coefficients, bs_covers, choose_epsilon,
                      comm_region_uav, det_H_via_alphas, feasibility_range,
                      hat_theta, in_localization_region, localization_region)
from .scenario import (DEFAULT_AREA, AreaBounds, ScenarioConfig, UserSpec,
                       deployment_preset, load_scenario, motivating_preset,
                       random_users, save_scenario)
from .solvers import (DeploymentPlan, RegionIncidence, RegionSet, SOLVERS,
                      build_incidence, build_region_set, make_grid, run_solver,
                      solve_comm_first, solve_df, solve_exact, solve_spiral,
                      solve_strip, verify_plan)

__version__ = "1.0.0"
