//! Exact solutions of the linearized system: per-mode matrix exponentials
//! on the torus and radial decay integrals on ℝ².

pub mod decay;
pub mod expm;
pub mod mode;
pub mod propagate;
pub mod quadrature;

pub use decay::{
    convolution_bound_check, damping_envelope, linear_decay_integral, pure_envelope,
    trtau_linear_decay, ConvolutionCheck, Envelope, OracleError, Profile, ProfileShape,
};
pub use mode::{mode_energy, mode_propagator, ModeSystem};
pub use propagate::linear_field_propagate;
