use super::config::EnvConfig;

/// Axial resistance (N) of the detent chain at `depth` meters into the channel.
///
/// Inside detent `i` the plug compresses an elastic ramp starting at the
/// previous detent; once a detent is passed only `residual_ratio` of its peak
/// remains, so the force never drops below that residual before the next ramp
/// catches up. The socket floor is not included, see [`floor_force`].
pub fn detent_force(depth: f64, cfg: &EnvConfig) -> f64 {
    if depth <= 0.0 {
        return 0.0;
    }
    let mut prev_depth = 0.0;
    let mut residual = 0.0;
    for det in &cfg.detents {
        let ramp = cfg.k_plug * det.peak_scale * (depth - prev_depth);
        if depth <= det.depth {
            return ramp.max(residual);
        }
        let peak = (cfg.k_plug * det.peak_scale * (det.depth - prev_depth)).max(residual);
        residual = cfg.residual_ratio * peak;
        prev_depth = det.depth;
    }
    residual
}

/// Peak resistance of each detent, in order.
pub fn detent_peaks(cfg: &EnvConfig) -> Vec<f64> {
    let mut prev_depth = 0.0;
    let mut residual = 0.0;
    cfg.detents
        .iter()
        .map(|det| {
            let peak = (cfg.k_plug * det.peak_scale * (det.depth - prev_depth)).max(residual);
            residual = cfg.residual_ratio * peak;
            prev_depth = det.depth;
            peak
        })
        .collect()
}

/// Spring-damper end stop once the plug reaches the socket floor.
/// `axial_velocity` is positive when moving deeper.
pub fn floor_force(depth: f64, axial_velocity: f64, cfg: &EnvConfig) -> f64 {
    let pen = depth - cfg.floor_depth();
    if pen <= 0.0 {
        return 0.0;
    }
    (cfg.floor_stiffness * pen + cfg.floor_damping * axial_velocity).max(0.0)
}

/// Number of detents strictly passed at `depth`.
pub fn detents_passed(depth: f64, cfg: &EnvConfig) -> usize {
    cfg.detents.iter().filter(|d| depth > d.depth).count()
}
