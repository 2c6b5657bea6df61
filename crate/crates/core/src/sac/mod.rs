//! Goal-conditioned soft actor-critic with twin critics, target networks,
//! automatic entropy tuning, and hindsight goal relabeling.

mod checkpoint;
mod her;
mod policy;
mod replay;
mod update;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointError, CheckpointMeta};
pub use her::{her_relabel, RewardCtx};
pub use policy::{policy_input_dim, GaussianPolicy, LOG_STD_MAX, LOG_STD_MIN};
pub use replay::{critic_input, obs_core, policy_input, ReplayBuffer, Transition, CORE_DIM};
pub use update::{
    EvalNets,
    critic_loss_and_grads, critic_targets, policy_loss_and_grads, LossReport, SacConfig, SacError,
    SacNets,
};
