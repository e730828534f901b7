use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform time grid `0, dt, 2dt, ..., duration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    duration: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(duration: f64, n_steps: usize) -> Result<Self> {
        if n_steps < 2 {
            return Err(Error::Config(format!("time grid needs >= 2 steps, got {n_steps}")));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Config(format!("time grid duration must be > 0, got {duration}")));
        }
        Ok(Self { duration, n_steps })
    }

    /// Grid with spacing `dt` covering `duration` (which must be a multiple of `dt`
    /// up to rounding).
    pub fn with_dt(duration: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {dt}")));
        }
        let intervals = (duration / dt).round();
        if (intervals * dt - duration).abs() > 1e-9 * duration.max(1.0) {
            return Err(Error::Config(format!(
                "duration {duration} is not a multiple of dt {dt}"
            )));
        }
        Self::new(duration, intervals as usize + 1)
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.duration / (self.n_steps - 1) as f64
    }

    pub fn time(&self, step: usize) -> f64 {
        if step + 1 == self.n_steps {
            self.duration
        } else {
            step as f64 * self.dt()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_steps).map(|k| self.time(k))
    }

    /// Index of the grid point closest to `t`, clamped to the grid.
    pub fn nearest_step(&self, t: f64) -> usize {
        let k = (t / self.dt()).round();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.n_steps - 1)
        }
    }

    /// `n`-times finer grid over the same interval.
    pub fn refined(&self, factor: usize) -> TimeGrid {
        TimeGrid {
            duration: self.duration,
            n_steps: (self.n_steps - 1) * factor.max(1) + 1,
        }
    }

    pub(crate) fn same_as(&self, other: &TimeGrid) -> bool {
        self.n_steps == other.n_steps
            && (self.duration - other.duration).abs() <= 1e-12 * self.duration.max(1.0)
    }
}

/// Multi-dimensional trajectory sampled on a [`TimeGrid`]; row `t`, column `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    values: DMatrix<f64>,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != grid.n_steps() {
            return Err(Error::Shape(format!(
                "trajectory has {} rows but the grid has {} steps",
                values.nrows(),
                grid.n_steps()
            )));
        }
        if values.ncols() == 0 {
            return Err(Error::Shape("trajectory needs at least one dimension".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "trajectory entry ({}, {}) is not finite",
                pos % values.nrows(),
                pos / values.nrows()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_rows(grid: TimeGrid, rows: &[Vec<f64>]) -> Result<Self> {
        let n_dims = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_dims) {
            return Err(Error::Shape("ragged trajectory rows".into()));
        }
        let values = DMatrix::from_fn(rows.len(), n_dims, |t, d| rows[t][d]);
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn n_dims(&self) -> usize {
        self.values.ncols()
    }

    pub fn n_steps(&self) -> usize {
        self.values.nrows()
    }

    pub fn row(&self, step: usize) -> DVector<f64> {
        self.values.row(step).transpose()
    }

    pub fn column(&self, dim: usize) -> DVector<f64> {
        self.values.column(dim).into_owned()
    }

    /// Columns `start..start+len` as a new trajectory.
    pub fn columns(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > self.n_dims() {
            return Err(Error::Shape(format!(
                "columns {start}..{} out of range for {} dims",
                start + len,
                self.n_dims()
            )));
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.columns(start, len).into_owned(),
        })
    }

    /// Velocity estimate at every step: central differences inside,
    /// one-sided at the ends.
    pub fn velocities(&self) -> DMatrix<f64> {
        let n = self.n_steps();
        let dt = self.grid.dt();
        DMatrix::from_fn(n, self.n_dims(), |t, d| {
            let v = &self.values;
            if t == 0 {
                (v[(1, d)] - v[(0, d)]) / dt
            } else if t + 1 == n {
                (v[(n - 1, d)] - v[(n - 2, d)]) / dt
            } else {
                (v[(t + 1, d)] - v[(t - 1, d)]) / (2.0 * dt)
            }
        })
    }

    /// Initial state taken from the first row and forward-difference velocity.
    pub fn initial_state(&self) -> InitialState {
        let y = self.row(0);
        let dy = (self.row(1) - &y) / self.grid.dt();
        InitialState::new(y, dy)
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }
}

/// Start position and velocity `(y_b, ẏ_b)` per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub position: DVector<f64>,
    pub velocity: DVector<f64>,
}

impl InitialState {
    pub fn new(position: DVector<f64>, velocity: DVector<f64>) -> Self {
        Self { position, velocity }
    }

    pub fn at_rest(position: DVector<f64>) -> Self {
        let n = position.len();
        Self::new(position, DVector::zeros(n))
    }

    pub fn zeros(n_dims: usize) -> Self {
        Self::new(DVector::zeros(n_dims), DVector::zeros(n_dims))
    }

    pub fn n_dims(&self) -> usize {
        self.position.len()
    }

    pub(crate) fn validate(&self, n_dims: usize) -> Result<()> {
        if self.position.len() != n_dims || self.velocity.len() != n_dims {
            return Err(Error::Shape(format!(
                "initial state has {}/{} entries, expected {n_dims}",
                self.position.len(),
                self.velocity.len()
            )));
        }
        if self.position.iter().chain(self.velocity.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("initial state is not finite".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_and_endpoints() {
        let g = TimeGrid::new(2.0, 5).unwrap();
        assert_eq!(g.dt(), 0.5);
        assert_eq!(g.times().collect::<Vec<_>>(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(g.nearest_step(0.74), 1);
        assert_eq!(g.nearest_step(9.0), 4);
        assert_eq!(g.refined(10).n_steps(), 41);
    }

    #[test]
    fn grid_rejects_degenerate() {
        assert!(TimeGrid::new(1.0, 1).is_err());
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::with_dt(1.0, 0.3).is_err());
        assert_eq!(TimeGrid::with_dt(4.5, 0.01).unwrap().n_steps(), 451);
    }

    #[test]
    fn trajectory_rejects_nan() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        assert!(Trajectory::from_rows(g, &[vec![0.0], vec![f64::NAN]]).is_err());
        assert!(Trajectory::from_rows(g, &[vec![0.0]]).is_err());
    }
}
