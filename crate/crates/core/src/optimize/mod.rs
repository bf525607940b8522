//! Optimizers and closed forms built on the Bell and SDP layers.

pub mod noise;
pub mod npa;
pub mod psiplus;
pub mod seesaw;
pub mod table;
pub mod wopt;

pub use crate::bell::RankProfile;
pub use noise::{linear_grid, noise_threshold, noise_threshold_curve, NoiseCurve, NoiseReading, Threshold};
pub use npa::{npa_upper_bound, NpaBound};
pub use psiplus::{PovmAdvantage, Crossover};
pub use seesaw::{best_report, seesaw, seesaw_run, MeasurementClass, OptimizationReport, SeesawConfig, StateMode};
pub use table::{qubit_table, table_row, TableRow};
pub use wopt::{maximize_w_povm, maximize_w_projective, PovmOptimum, ProjectiveOptimum};
