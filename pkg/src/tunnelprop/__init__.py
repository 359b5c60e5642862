"""Deep-indoor propagation modelling toolkit.

Reconstructs tunnel measurement positions from surveyed endpoints and LIDAR
geometry, derives indoor propagation features by ray queries against a voxel
occupancy grid, evaluates the outdoor-to-indoor path-loss decomposition, and
compares linear regression models of the observed received power.
"""

from .errors import TunnelPropError
from .features import (CorridorOpening, FeatureRow, FeatureVector, angles_to_tx,
                       corridor_avg_distance, detect_corridor_openings,
                       extract_features, indoor_depth, indoor_distance,
                       penetration_distance)
from .geo import GeoPoint, LocalPoint, PointCloud, load_point_cloud, to_geo, to_local
from .grid import OccupancyGrid, build_occupancy, is_occupied
from .pathloss import (IndoorLossModel, PathLossComponents, TransmitterConfig,
                       pl_basic, pl_in, pl_tw, predict_rsrp, predict_total_loss,
                       sample_shadowing)
from .positioning import (MeasurementPoint, MeasurementSession,
                          interpolate_positions, load_sessions)
from .rays import KERNEL_BACKEND, RayTrace, ray_march
from .stats import (BUILTIN_MODELS, EvaluationReport, ModelSpec, RegressionFit,
                    compare_models, fit_ols, log_likelihood, mae_by_variant,
                    r_squared, residual_mse)
from .synth import (SideCorridor, SynthCampaign, TunnelLayout, analytic_features,
                    generate_campaign, generate_cloud, rasterize_solid)

__version__ = "0.1.0"
