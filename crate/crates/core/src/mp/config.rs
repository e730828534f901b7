use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the second-order attractor system shared by DMP and ProDMP:
/// `tau² ÿ = alpha (beta (g - y) - tau ẏ) + f(x)`, with phase `tau ẋ = -alpha_x x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmpConfig {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_x: f64,
    /// Movement time constant in seconds.
    pub tau: f64,
    pub n_basis: usize,
    /// Activation of a Gaussian at its neighbour's center, in (0, 1).
    pub basis_width: f64,
}

impl Default for DmpConfig {
    fn default() -> Self {
        Self {
            alpha: 25.0,
            beta: 25.0 / 4.0,
            alpha_x: 3.0,
            tau: 1.0,
            n_basis: 10,
            basis_width: 0.3,
        }
    }
}

impl DmpConfig {
    /// Default gains with `tau` matched to a movement duration.
    pub fn for_duration(duration: f64) -> Self {
        Self {
            tau: duration,
            ..Self::default()
        }
    }

    pub fn with_basis(mut self, n_basis: usize) -> Self {
        self.n_basis = n_basis;
        self
    }

    /// Number of weights per dimension (basis weights plus goal).
    pub fn weights_per_dim(&self) -> usize {
        self.n_basis + 1
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("alpha_x", self.alpha_x),
            ("tau", self.tau),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.n_basis < 2 {
            return Err(Error::Config(format!("n_basis must be >= 2, got {}", self.n_basis)));
        }
        if !(self.basis_width > 0.0 && self.basis_width < 1.0) {
            return Err(Error::Config(format!(
                "basis_width must lie in (0, 1), got {}",
                self.basis_width
            )));
        }
        Ok(())
    }
}
