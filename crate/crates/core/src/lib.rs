//! Source data selection for transfer-learning regression.
//!
//! Every source row gets a set of distances to the target domain (spatial:
//! Euclidean and cosine; model-based: performance and feature distances from
//! leave-one-out ELM refits). Pareto frontiers over those distances are peeled
//! one layer at a time, and each cumulative subset is scored by training a
//! transfer model under a multi-run leave-one-out protocol. The subset with the
//! best score (exhaustive search) or the first local optimum (local search) is
//! returned.
//!
//! Three transfer learners are included:
//!
//! - [`transfer::idtr`]: two-stage TrAdaBoost.R2 over depth-6 CART trees.
//! - [`transfer::ftann`]: a three-hidden-layer MLP pre-trained on the source and
//!   fine-tuned on the target.
//! - [`transfer::msann`]: a multi-source network with a shared extractor and one
//!   branch per source, trained with MMD/CORAL and regressor-agreement losses.
//!
//! The [`evaluation`] module wires everything into a reproducible task driver.
//!
//! ## Examples
//!
//! Each capability has a runnable example:
//!
//! ```text
//! examples/
//! ├── process_features.rs    two deposition processes mapped onto shared features
//! ├── distance_table.rs      spatial and model-based distances per source row
//! ├── pareto_peeling.rs      frontier peeling, by hand and on a distance table
//! ├── instance_transfer.rs   two-stage TrAdaBoost.R2 versus target-only boosting
//! ├── fine_tuning.rs         source pre-training then target fine-tuning
//! ├── multi_source.rs        multi-branch network with alignment losses
//! ├── source_selection.rs    the full local and exhaustive search
//! └── synthetic_fixture.rs   regenerates the shipped test fixture
//! ```
//!
//! ```bash
//! cargo run --release --example source_selection
//! ```

pub mod data;
pub mod distances;
pub mod error;
pub mod evaluation;
pub mod models;
pub mod pareto;
pub mod reproduce;
pub mod synthetic;
pub mod transfer;

pub mod cli;

pub use data::{LabeledDataset, ScalingSpec};
pub use error::{Error, ErrorKind, Result};

/// Dense row-major-by-convention real matrix (rows are samples).
pub type Matrix = nalgebra::DMatrix<f64>;
