use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::Trajectory;

/// Split of a joint trajectory into `D` position and `F` force dimensions.
/// Position columns come first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpaceConfig {
    pub d_pos: usize,
    pub f_force: usize,
    pub labels: Vec<String>,
}

impl JointSpaceConfig {
    pub fn new(d_pos: usize, f_force: usize) -> Result<Self> {
        let labels = (0..d_pos)
            .map(|d| format!("pos{d}"))
            .chain((0..f_force).map(|f| format!("force{f}")))
            .collect();
        Self::with_labels(d_pos, f_force, labels)
    }

    pub fn with_labels(d_pos: usize, f_force: usize, labels: Vec<String>) -> Result<Self> {
        if d_pos == 0 || f_force == 0 {
            return Err(Error::Config(format!(
                "need at least one position and one force dimension, got D={d_pos}, F={f_force}"
            )));
        }
        if labels.len() != d_pos + f_force {
            return Err(Error::Config(format!(
                "{} labels for {} dimensions",
                labels.len(),
                d_pos + f_force
            )));
        }
        Ok(Self { d_pos, f_force, labels })
    }

    pub fn total(&self) -> usize {
        self.d_pos + self.f_force
    }

    /// Joint index of force dimension `f`.
    pub fn force_index(&self, f: usize) -> usize {
        self.d_pos + f
    }
}

/// Column-concatenates paired position and force demonstrations.
pub fn assemble_joint_demos(pos_demos: &[Trajectory], force_demos: &[Trajectory]) -> Result<Vec<Trajectory>> {
    if pos_demos.is_empty() || force_demos.is_empty() {
        return Err(Error::InsufficientData("no demonstrations to assemble".into()));
    }
    if pos_demos.len() != force_demos.len() {
        return Err(Error::Shape(format!(
            "{} position demos but {} force demos",
            pos_demos.len(),
            force_demos.len()
        )));
    }
    pos_demos
        .iter()
        .zip(force_demos)
        .enumerate()
        .map(|(i, (p, f))| {
            if !p.grid().same_as(f.grid()) {
                return Err(Error::Shape(format!("demo {i}: position and force grids differ")));
            }
            let (n, d, k) = (p.n_steps(), p.n_dims(), f.n_dims());
            let values = DMatrix::from_fn(n, d + k, |t, c| {
                if c < d {
                    p.values()[(t, c)]
                } else {
                    f.values()[(t, c - d)]
                }
            });
            Trajectory::new(*p.grid(), values)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::TimeGrid;

    #[test]
    fn concatenates_position_first() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        let p = Trajectory::from_rows(g, &[vec![0.0], vec![1.0]]).unwrap();
        let f = Trajectory::from_rows(g, &[vec![5.0], vec![5.0]]).unwrap();
        let j = assemble_joint_demos(&[p], &[f]).unwrap();
        assert_eq!(j[0].values(), &DMatrix::from_row_slice(2, 2, &[0.0, 5.0, 1.0, 5.0]));
    }

    #[test]
    fn rejects_empty_and_mismatched() {
        assert!(matches!(assemble_joint_demos(&[], &[]), Err(Error::InsufficientData(_))));
        let p = Trajectory::from_rows(TimeGrid::new(1.0, 2).unwrap(), &[vec![0.0], vec![1.0]]).unwrap();
        let f = Trajectory::from_rows(TimeGrid::new(2.0, 2).unwrap(), &[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(assemble_joint_demos(&[p], &[f]), Err(Error::Shape(_))));
    }

    #[test]
    fn d_and_f_may_differ() {
        let j = JointSpaceConfig::new(7, 3).unwrap();
        assert_eq!(j.total(), 10);
        assert_eq!(j.force_index(0), 7);
        assert!(JointSpaceConfig::new(2, 0).is_err());
    }
}
