//! Transfer-learning trainers: boosted trees, fine-tuned networks and the
//! multi-source network with its loss terms.

pub mod ftann;
pub mod idtr;
pub mod losses;
pub mod msann;

pub use ftann::{fit_ftann, fit_mlp, FineTuneConfig};
pub use idtr::{fit_idtr, idtr_predict, weighted_median, EnsembleMember, IdtrModel, TwoStageBoostConfig};
pub use losses::{beta_step, coral, mmd, regressor_distance, total_loss, Bandwidth, BetaSchedule};
pub use msann::{fit_msann, fit_msann_until, msann_param_count, msann_predict, LossParts, MsAnnConfig, MsAnnModel};
