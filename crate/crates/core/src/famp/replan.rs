//! Force-triggered replanning: deviation test, dimension selection, sigmoid
//! blending and the replanning step that ties them together.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::condition::{condition, ConditioningSpec};
use super::joint::JointSpaceConfig;
use crate::error::{Error, Result};
use crate::mp::{BasisSystem, InitialState, Trajectory, WeightDistribution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplanConfig {
    /// Force deviation threshold δ.
    pub delta: f64,
    /// Fraction of the total deviation the selected dimensions must cover.
    pub coverage_ratio: f64,
    /// Sigmoid steepness γ in 1/s.
    pub gamma: f64,
    /// `t_mix - t_now` in seconds.
    pub mix_lead: f64,
    /// `t_cond - t_now` in seconds.
    pub cond_lead: f64,
    /// Minimum time between replans in seconds.
    pub cooldown: f64,
    /// Observation variance used when conditioning on measured forces.
    pub obs_noise: f64,
}

impl Default for ReplanConfig {
    fn default() -> Self {
        Self {
            delta: 1.0,
            coverage_ratio: 0.5,
            gamma: 20.0,
            mix_lead: 0.25,
            cond_lead: 0.1,
            cooldown: 0.5,
            obs_noise: 1e-4,
        }
    }
}

impl ReplanConfig {
    /// Defaults with `delta` set to three times the pooled per-step standard
    /// deviation of the demonstrated forces.
    pub fn from_force_demos(force_demos: &[Trajectory]) -> Result<Self> {
        Ok(Self {
            delta: 3.0 * pooled_force_std(force_demos)?,
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("delta", self.delta > 0.0),
            ("coverage_ratio", self.coverage_ratio > 0.0 && self.coverage_ratio <= 1.0),
            ("gamma", self.gamma > 0.0),
            ("mix_lead", self.mix_lead > 0.0),
            ("cond_lead", self.cond_lead >= 0.0),
            ("cooldown", self.cooldown >= 0.0),
            ("obs_noise", self.obs_noise >= 0.0),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(Error::Config(format!("replan parameter {name} out of range")));
            }
        }
        Ok(())
    }
}

/// Root-mean over time steps and force dimensions of the across-demo variance.
pub fn pooled_force_std(force_demos: &[Trajectory]) -> Result<f64> {
    if force_demos.len() < 2 {
        return Err(Error::InsufficientData("need >= 2 force demonstrations".into()));
    }
    let (n, f) = (force_demos[0].n_steps(), force_demos[0].n_dims());
    if force_demos.iter().any(|d| d.n_steps() != n || d.n_dims() != f) {
        return Err(Error::Shape("force demonstrations differ in shape".into()));
    }
    let m = force_demos.len() as f64;
    let mut total = 0.0;
    for t in 0..n {
        for d in 0..f {
            let mean = force_demos.iter().map(|x| x.values()[(t, d)]).sum::<f64>() / m;
            total += force_demos
                .iter()
                .map(|x| (x.values()[(t, d)] - mean).powi(2))
                .sum::<f64>()
                / (m - 1.0);
        }
    }
    Ok((total / (n * f) as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceMeasurement {
    pub t: f64,
    pub tau: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplanEvent {
    pub t_trigger: f64,
    pub deviations: Vec<f64>,
    /// Force-dimension indices (0-based within the force block).
    pub selected_dims: Vec<usize>,
    pub conditioned_values: Vec<f64>,
    pub t_cond: f64,
    pub t_mix: f64,
}

/// Per-dimension absolute deviations and whether their sum strictly exceeds
/// `delta`.
pub fn replan_trigger(expected: &[f64], measured: &[f64], delta: f64) -> Result<(bool, Vec<f64>)> {
    if expected.len() != measured.len() {
        return Err(Error::Shape(format!(
            "{} expected forces vs {} measured",
            expected.len(),
            measured.len()
        )));
    }
    let deviations: Vec<f64> = expected.iter().zip(measured).map(|(e, m)| (e - m).abs()).collect();
    let total: f64 = deviations.iter().sum();
    Ok((total > delta, deviations))
}

/// Shortest prefix of dimensions, ranked by descending deviation (ties by
/// index), whose deviation sum reaches `coverage_ratio` of the total.
pub fn select_dims(deviations: &[f64], coverage_ratio: f64) -> Result<Vec<usize>> {
    if deviations.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
        return Err(Error::Config("deviations must be finite and >= 0".into()));
    }
    if !(coverage_ratio > 0.0 && coverage_ratio <= 1.0) {
        return Err(Error::Config(format!("coverage ratio {coverage_ratio} not in (0, 1]")));
    }
    let mut order: Vec<usize> = (0..deviations.len()).collect();
    order.sort_by(|&a, &b| deviations[b].total_cmp(&deviations[a]).then(a.cmp(&b)));
    let total: f64 = order.iter().map(|&i| deviations[i]).sum();
    if total <= 0.0 {
        return Err(Error::EmptySelection);
    }
    let target = coverage_ratio * total;
    let mut covered = 0.0;
    let mut selected = Vec::new();
    for i in order {
        selected.push(i);
        covered += deviations[i];
        if covered >= target {
            break;
        }
    }
    Ok(selected)
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `Λ_old · σ(-γ (t - t_mix)) + Λ_cond · σ(γ (t - t_mix))`, pointwise.
pub fn blend(lam_old: &Trajectory, lam_cond: &Trajectory, t_mix: f64, gamma: f64) -> Result<Trajectory> {
    if !lam_old.grid().same_as(lam_cond.grid()) || lam_old.n_dims() != lam_cond.n_dims() {
        return Err(Error::Shape("blended trajectories differ in grid or dimension".into()));
    }
    let grid = *lam_old.grid();
    let (a, b) = (lam_old.values(), lam_cond.values());
    let values = DMatrix::from_fn(grid.n_steps(), lam_old.n_dims(), |t, d| {
        let u = gamma * (grid.time(t) - t_mix);
        a[(t, d)] * sigmoid(-u) + b[(t, d)] * sigmoid(u)
    });
    Trajectory::new(grid, values)
}

/// Inputs describing the execution state at a replanning instant.
#[derive(Debug, Clone)]
pub struct ReplanRequest<'a> {
    pub wd: &'a WeightDistribution,
    /// Unanchored basis of the movement.
    pub basis: &'a BasisSystem,
    /// State the movement started from; fixes the homogeneous terms of `wd`.
    pub init_start: &'a InitialState,
    /// Desired trajectory currently being executed (all D+F dimensions).
    pub lam_old: &'a Trajectory,
    /// Desired state at `t_now`, all D+F dimensions.
    pub init_now: InitialState,
    pub t_now: f64,
    pub measurement: &'a ForceMeasurement,
    pub expected: &'a [f64],
    pub last_replan: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ReplanOutcome {
    pub wd: WeightDistribution,
    pub lam_cond: Trajectory,
    pub lam_des: Trajectory,
    pub event: ReplanEvent,
}

/// Conditions the current distribution on the measured forces of the most
/// deviating dimensions and blends the regenerated mean into the desired
/// trajectory.
pub fn replan(req: &ReplanRequest<'_>, cfg: &ReplanConfig, layout: &JointSpaceConfig) -> Result<ReplanOutcome> {
    cfg.validate()?;
    let (triggered, deviations) = replan_trigger(req.expected, req.measurement.tau.as_slice(), cfg.delta)?;
    if deviations.len() != layout.f_force {
        return Err(Error::Shape(format!(
            "{} force readings for {} force dimensions",
            deviations.len(),
            layout.f_force
        )));
    }
    if !triggered {
        return Err(Error::Precondition(format!(
            "force deviation {:.4} does not exceed delta {}",
            deviations.iter().sum::<f64>(),
            cfg.delta
        )));
    }
    if let Some(last) = req.last_replan {
        if req.t_now - last < cfg.cooldown {
            return Err(Error::Precondition(format!(
                "replan at t={:.3}s within cooldown of previous replan at t={last:.3}s",
                req.t_now
            )));
        }
    }
    let grid = *req.basis.grid();
    let step_now = grid.nearest_step(req.t_now);
    let step_cond = grid.nearest_step(req.t_now + cfg.cond_lead).max(step_now);
    let t_cond = grid.time(step_cond);
    let t_mix = req.t_now + cfg.mix_lead;

    let selected = select_dims(&deviations, cfg.coverage_ratio)?;
    let values: Vec<f64> = selected.iter().map(|&f| req.measurement.tau[f]).collect();
    let spec = ConditioningSpec::new(
        t_cond,
        selected.iter().map(|&f| layout.force_index(f)).collect(),
        values.clone(),
        cfg.obs_noise,
    );

    // The posterior is a statement about the whole movement, so it is formed
    // through the original basis; only the regenerated mean starts from the
    // current desired state.
    let wd = condition(req.wd, req.basis, &spec, req.init_start)?;
    let anchored = req.basis.anchored_at(step_now)?;
    let regenerated = anchored.compose(&wd.mean_weights(), &req.init_now)?;
    // Rows before the anchor belong to the past; keep the executed plan there.
    let n_dims = regenerated.n_dims();
    let lam_cond_values = DMatrix::from_fn(grid.n_steps(), n_dims, |t, d| {
        if t < step_now {
            req.lam_old.values()[(t, d)]
        } else {
            regenerated.values()[(t, d)]
        }
    });
    let lam_cond = Trajectory::new(grid, lam_cond_values)?;
    let lam_des = blend(req.lam_old, &lam_cond, t_mix, cfg.gamma)?;

    Ok(ReplanOutcome {
        wd,
        lam_cond,
        lam_des,
        event: ReplanEvent {
            t_trigger: req.t_now,
            deviations,
            selected_dims: selected,
            conditioned_values: values,
            t_cond,
            t_mix,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::TimeGrid;

    #[test]
    fn trigger_worked_example() {
        let (hit, dev) = replan_trigger(&[10.0, 0.0, 5.0], &[12.0, 0.5, 1.0], 5.0).unwrap();
        assert!(hit);
        assert_eq!(dev, vec![2.0, 0.5, 4.0]);
        assert_eq!(dev.iter().sum::<f64>(), 6.5);
    }

    #[test]
    fn trigger_is_strict() {
        assert!(!replan_trigger(&[1.0, 2.0], &[1.0, 2.0], 0.1).unwrap().0);
        assert!(!replan_trigger(&[0.0, 0.0], &[2.0, -3.0], 5.0).unwrap().0);
        assert!(replan_trigger(&[1.0], &[2.0, 3.0], 5.0).is_err());
    }

    #[test]
    fn selection_worked_examples() {
        // z deviates by 4, x by 2, y by 0.5
        assert_eq!(select_dims(&[2.0, 0.5, 4.0], 0.5).unwrap(), vec![2]);
        assert_eq!(select_dims(&[3.0, 3.0], 0.5).unwrap(), vec![0]);
        assert_eq!(select_dims(&[1.0; 4], 1.0).unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(select_dims(&[0.0, 0.0], 0.5), Err(Error::EmptySelection)));
    }

    #[test]
    fn blend_worked_examples() {
        let g = TimeGrid::new(4.0, 5).unwrap();
        let zeros = Trajectory::new(g, DMatrix::zeros(5, 1)).unwrap();
        let ones = Trajectory::new(g, DMatrix::from_element(5, 1, 1.0)).unwrap();
        let t_mix = 2.0 - 3f64.ln();
        let out = blend(&zeros, &ones, t_mix, 1.0).unwrap();
        assert!((out.values()[(2, 0)] - 0.75).abs() < 1e-15);
        let mid = blend(&zeros, &ones, 1.0, 7.0).unwrap();
        assert_eq!(mid.values()[(1, 0)], 0.5);
        let same = blend(&ones, &ones, 1.3, 5.0).unwrap();
        assert!(same.values().iter().all(|v| (*v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
    }
}
