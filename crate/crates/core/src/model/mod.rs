//! Potentials, grids, cutoff windows, localized states, contours and problem documents.

pub mod config;
pub mod contour;
pub mod grid;
pub mod potential;
pub mod state;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use config::{load_problem, load_problem_file, serialize_problem, AlphaSweep, ProblemSpec, StateSpec};
pub use contour::ContourSpec;
pub use grid::{cutoff_window, taper, CutoffWindow, UniformGrid};
pub use potential::PotentialSpec;
pub use state::{sample_state, Field, LocalizedState, Profile, Shape};

/// Cosine (κ = 1) or sine (κ = 0) family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cosine,
    Sine,
}

impl Family {
    /// Exponent κ of the λ^κ weight in the Laplace pair.
    pub fn kappa(self) -> i32 {
        match self {
            Family::Cosine => 1,
            Family::Sine => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Cosine => "cosine",
            Family::Sine => "sine",
        }
    }
}

/// Axis-aligned box in the λ-plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl ScanRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        ScanRegion {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }
}
