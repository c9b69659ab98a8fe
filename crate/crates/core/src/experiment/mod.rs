//! Scenario setup, stepping loops, metrics and file output.

mod config;
mod grasp;
mod metrics;
mod output;
mod ring;
mod run;

pub use config::{Method, Resolution, RunConfig, Scenario};
pub use grasp::{grasp_object, simulate_grasp};
pub use metrics::{
    contact_centroid, metric_alignment, metric_separation, metric_sliding, metric_slippage, metric_total_geodesic,
    metrics_row, MetricsRow,
};
pub use output::{metrics_file_name, read_metrics_csv, write_all, write_metrics_csv};
pub use ring::{prescribed_twist, ring_setup, ring_side, simulate_ring, RingRolling, RingSetup};
pub use run::{run, simulate, ContactRecord, ContactSummary, PoseRecord, RunOutput, Sample, Summary};
