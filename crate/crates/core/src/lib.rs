//! Pseudo-spectral solver for the two-dimensional inviscid Oldroyd-B system
//! with fractional stress diffusion and damping,
//!
//! u_t + u·∇u + ∇P = div τ,  div u = 0,
//! τ_t + u·∇τ + aτ + Q(∇u, τ) + (−Δ)^β τ = D(u),
//!
//! on a doubly periodic box, together with an exact oracle for the
//! linearized system on ℝ² and on the torus.

pub mod spectral;
pub mod model;
pub mod integrator;
pub mod functionals;
pub mod oracle;
