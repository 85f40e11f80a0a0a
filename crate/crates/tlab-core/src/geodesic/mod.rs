//! Geodesic rays and segments in templates, boundary intervals, the
//! brute-force distance oracle and the derived experiments.
//!
//! Geodesics are found in developments: a transversal geodesic develops to a
//! straight line and bends only at origins.

mod angles;
mod boundary;
mod cluster;
mod oracle;
mod path;
mod points;
mod shoot;

pub use angles::{comparison_angle, comparison_angle_from_lengths, ray_point, tits_angle_estimate};
pub use boundary::{
    boundary_interval, boundary_run, union_width, BoundaryEstimate, BoundaryRun, DirectionInterval, DEFAULT_BRANCH_CAP,
};
pub use cluster::{cluster_excess_experiment, ClusterConfig, ClusterReport, ClusterSample};
pub use oracle::{dijkstra_oracle, LineGraph, OracleConfig};
pub use path::{geodesic, straight_distance, GeodesicKind, GeodesicResult, StraightPiece};
pub use points::{locate_basepoint, TemplatePoint};
pub use shoot::{shoot, shoot_auto, CrossingTrace, ShootFailure, ShootFailureReason, WallCrossing};
