//! Small from-scratch learners: an extreme learning machine, the
//! three-hidden-layer MLP used for fine-tuning, and a weighted CART tree.

pub mod elm;
pub mod mlp;
pub(crate) mod nn;
pub mod tree;

pub use elm::{elm_train, ElmConfig, ElmHidden, ElmModel};
pub use mlp::{mlp_param_count, MlpParams, MlpSpec};
pub use nn::Adam;
pub use tree::{tree_fit, RegressionTree};
