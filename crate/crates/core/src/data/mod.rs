//! Tabular regression datasets: loading, validation, unit scaling and the
//! common process features shared by the two deposition processes.

mod dataset;
mod features;
mod scaling;

pub use dataset::{load_csv, LabeledDataset};
pub use features::{derive_common_features, CommonFeatures, ProcessFeatureRow, ProcessKind};
pub use scaling::{fit_unit_scaler, ColumnRange, ScalingSpec};
