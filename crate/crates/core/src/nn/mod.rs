//! Small convolutional actor-critic network with hand-written backprop.

pub mod adam;
pub mod checkpoint;
pub mod conv;
pub mod gradcheck;
pub mod network;
pub mod policy;
pub mod tensor;

pub use adam::{Adam, AdamConfig};
pub use checkpoint::{Checkpoint, CheckpointError};
pub use conv::Conv2x2;
pub use gradcheck::{check_network_gradients, GradCheckReport};
pub use network::{NetShape, NetworkParams, Workspace, DEFAULT_CONV_CHANNELS, PARAM_NAMES};
pub use policy::{argmax, entropy, masked_log_softmax, sample};
pub use tensor::{NnError, Real, Tensor};
