//! Three-layer sigmoid network, per-class sigmoid cross-entropy, analytic
//! backpropagation and Adam. Double precision throughout.

mod adam;
mod checkpoint;
mod matrix;
mod network;

pub use adam::{adam_step, AdamConfig, AdamState, DEFAULT_LEARN_RATE};
pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use matrix::Matrix;
pub use network::{
    backward, classify_logits, element_agreement, forward, init_network, logits_for, loss, output_delta,
    predict, sigmoid, sigmoid_cross_entropy, DnnParams, ForwardTrace, Gradients, LayerParams, Prediction,
};
