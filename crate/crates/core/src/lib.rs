//! Resonance expansions of cosine and sine families for 1-D wave equations
//! u_tt = u_xx + V(x)u with compactly supported potentials and δ-interactions.

pub mod cli;
pub mod error;
pub mod expansion;
pub mod io;
pub mod jost;
pub mod laplace;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod resolvent;
pub mod resonances;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
