//! Reference computations of C(t)f and S(t)f that do not go through the
//! resonance expansion.

pub mod bromwich;
pub mod exact;
pub mod leapfrog;

pub use bromwich::{bromwich_apply, default_gamma, BromwichResult};
pub use exact::{dalembert_cosine, dalembert_sine, delta_cosine, delta_sine, exact_propagator};
pub use leapfrog::{timestep_fields, timestep_wave, LeapfrogRun, WaveState};
