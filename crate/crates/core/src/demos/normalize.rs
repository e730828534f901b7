use super::dataset::DemoRecord;
use crate::error::{Error, Result};
use crate::mp::TimeGrid;

/// Resamples a record onto `target` by linear interpolation. Both endpoints
/// are copied exactly.
pub fn time_normalize(record: &DemoRecord, target: &TimeGrid) -> Result<DemoRecord> {
    record.validate()?;
    let src = record.grid()?;
    if target.duration() > src.duration() * (1.0 + 1e-12) {
        return Err(Error::Extrapolation { target: target.duration(), available: src.duration() });
    }
    if target.same_as(&src) {
        return Ok(record.clone());
    }
    let last = src.n_steps() - 1;
    let resample = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..target.n_steps())
            .map(|j| {
                let s = target.time(j) / src.dt();
                let nearest = s.round();
                if (s - nearest).abs() < 1e-9 || nearest as usize >= last && s >= last as f64 {
                    return rows[(nearest as usize).min(last)].clone();
                }
                let i = (s.floor() as usize).min(last - 1);
                let frac = s - i as f64;
                rows[i].iter().zip(&rows[i + 1]).map(|(a, b)| a + frac * (b - a)).collect()
            })
            .collect()
    };
    Ok(DemoRecord {
        dt: target.dt(),
        duration: target.duration(),
        positions: resample(&record.positions),
        forces: resample(&record.forces),
        meta: record.meta.clone(),
    })
}
