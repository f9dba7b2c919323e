use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1-D grid with `n_points` nodes including both ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl UniformGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::config("grid", "bounds must be finite"));
        }
        if n_points < 2 {
            return Err(Error::config("grid.n_points", "n_points must be at least 2"));
        }
        if x_max <= x_min {
            return Err(Error::config("grid", "x_max must exceed x_min"));
        }
        Ok(UniformGrid {
            x_min,
            x_max,
            n_points,
        })
    }

    /// Symmetric grid on [-half_width, half_width] with spacing `h`
    /// (rounded so that the spacing divides the width).
    pub fn symmetric(half_width: f64, h: f64) -> Result<Self> {
        let cells = (2.0 * half_width / h).round() as usize;
        Self::new(-half_width, half_width, cells + 1)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        // pin the last node so that x(n-1) == x_max exactly
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Index of the node at `x`, if `x` is a node (to 1e-9 of a spacing).
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let r = (x - self.x_min) / self.spacing();
        let i = r.round();
        if (r - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < self.n_points {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Index of the nearest node, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let r = ((x - self.x_min) / self.spacing()).round();
        r.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    pub fn covers(&self, a: f64, b: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.x_max.abs().max(self.x_min.abs()));
        self.x_min <= a + slack && b <= self.x_max + slack
    }

    /// Same interval, `factor` times finer.
    pub fn refined(&self, factor: usize) -> Self {
        UniformGrid {
            x_min: self.x_min,
            x_max: self.x_max,
            n_points: (self.n_points - 1) * factor + 1,
        }
    }
}

/// Smooth cutoff φ_i: 1 on [-i, i], 0 outside [-i-1, i+1], C¹ cubic taper
/// 1 - 3u² + 2u³ (u = |x| - i) in between.
#[derive(Clone, Debug, PartialEq)]
pub struct CutoffWindow {
    pub index: usize,
    pub grid: UniformGrid,
    pub samples: Vec<f64>,
}

/// Value of the cutoff φ_i at x.
pub fn taper(index: usize, x: f64) -> f64 {
    let u = x.abs() - index as f64;
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        1.0 - 3.0 * u * u + 2.0 * u * u * u
    }
}

impl CutoffWindow {
    pub fn new(index: usize, grid: &UniformGrid) -> Result<Self> {
        if index == 0 {
            return Err(Error::config("window.i", "window index must be positive"));
        }
        let r = index as f64 + 1.0;
        if !grid.covers(-r, r) {
            return Err(Error::GridTooSmall(format!(
                "window {index} needs [-{r}, {r}], grid is [{}, {}]",
                grid.x_min, grid.x_max
            )));
        }
        let samples = grid.points().into_iter().map(|x| taper(index, x)).collect();
        Ok(CutoffWindow {
            index,
            grid: grid.clone(),
            samples,
        })
    }

    /// Outer radius i + 1 of the window's support.
    pub fn outer_radius(&self) -> f64 {
        self.index as f64 + 1.0
    }

    /// The smallest symmetric sub-grid of `self.grid` that still covers the
    /// window's support; used to keep output fields small.
    pub fn support_grid(&self) -> UniformGrid {
        let g = &self.grid;
        let h = g.spacing();
        let r = self.outer_radius();
        let last = (g.n_points - 1) as f64;
        let lo = ((-r - g.x_min) / h - 1e-9).floor().clamp(0.0, last) as usize;
        let hi = ((r - g.x_min) / h + 1e-9).ceil().clamp(0.0, last) as usize;
        UniformGrid {
            x_min: g.x(lo),
            x_max: g.x(hi),
            n_points: hi - lo + 1,
        }
    }
}

/// `cutoff_window(i, grid)`.
pub fn cutoff_window(index: usize, grid: &UniformGrid) -> Result<CutoffWindow> {
    CutoffWindow::new(index, grid)
}
