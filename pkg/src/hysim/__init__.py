"""hysim: numerical solvers for a hybrid spectrum-leasing and
spectrum-information market with network externalities.

Three nested layers: users choosing among basic, advanced, and leasing
services (market equilibrium); the licensee and database competing in prices
(solved through a market-share game transformation); and the two sellers
bargaining over a revenue share.  Benchmarks, a Monte Carlo interference
module that derives the externality functions from first principles, and a
CLI scenario runner round out the suite.
"""

from .bargaining import (BargainingOutcome, disagreement_points,
                         equivalent_wholesale_price, nash_objective,
                         pure_info_optimum, solve_bargaining)
from .benchmarks import (BenchmarkResult, coordination_benchmark,
                         noncooperation_benchmark, third_party_benchmark)
from .errors import (DegenerateModelError, DistributionError, GridError,
                     HysimError, MultipleEquilibria, MultiplicityWarning,
                     ParameterError, ShapeError)
from .externality import (ExternalityModel, ValidationReport, g_derivative,
                          make_constant_model, make_linear_family,
                          make_power_family, make_table_model, validate_model)
from .interference import (DerivedTables, DistSpec, InfoValueEstimate,
                           InterferenceModel, derive_externality, exponential,
                           lognormal, point, simulate_info_value, uniform)
from .market import (DynamicsTrace, MarketShares, PriceVector, Thresholds,
                     UniquenessReport, check_me_uniqueness, clamp_shares,
                     derived_shares, equilibrium_residual, iterate_dynamics,
                     pure_info_equilibrium, solve_equilibrium,
                     theta_grid_oracle, thresholds)
from .pricing import (NashEquilibrium, NEUniquenessReport, PayoffPair,
                      best_response_db, best_response_sl, check_ne_uniqueness,
                      payoffs_mscg, pcg_equilibrium, prices_from_shares,
                      solve_mscg)
from .scenario import (ConfigError, ScenarioConfig, build_model, load_config,
                       run_scenario, run_scenario_rows, run_sweep_point,
                       write_rows)

__version__ = "0.1.0"
