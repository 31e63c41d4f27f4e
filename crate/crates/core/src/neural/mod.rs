//! Small from-scratch networks: MLP, vanilla RNN, GRU and attention-GRU.
//!
//! A window of `d` lagged values is read as `d` scalar timesteps by the
//! recurrent kinds and as one `d`-vector by the MLP. Every model ends in a
//! sigmoid unit, so targets are expected in `[0, 1]`.

pub mod cells;
pub mod format;
pub mod gradcheck;
pub mod linalg;
pub mod model;
pub mod train;

pub use gradcheck::{gradient_check, GradCheckReport};
pub use model::{
    backward, batch_loss, predict_sequence, ModelKind, ModelSpec, Network, NetworkParams,
};
pub use train::{train, Optimizer, TrainConfig, TrainOutcome};
