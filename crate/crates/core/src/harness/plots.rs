use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::famp::ExecutionLog;

pub fn save_execution_log(log: &ExecutionLog, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(log)
        .map_err(|source| Error::Parse { context: path.display().to_string(), source })?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_execution_log(path: impl AsRef<Path>) -> Result<ExecutionLog> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Parse { context: path.display().to_string(), source })
}

fn cell(v: Option<&f64>) -> String {
    v.map_or(String::new(), f64::to_string)
}

/// Writes one CSV per position dimension (`position_<d>.csv`), one per force
/// dimension with the expected ±1σ band (`force_<f>.csv`) and the replan
/// markers (`replan_events.csv`). Returns the written paths.
pub fn export_plots(log: &ExecutionLog, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut write = |name: String, text: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        files.push(path);
        Ok(())
    };

    for d in 0..log.layout.d_pos {
        let mut csv = String::from("t,desired,actual\n");
        for r in &log.records {
            let _ = writeln!(csv, "{},{},{}", r.t, cell(r.desired_position.get(d)), cell(r.actual_position.get(d)));
        }
        write(format!("position_{d}.csv"), csv)?;
    }

    for f in 0..log.layout.f_force {
        let mut csv = String::from("t,expected,lower,upper,measured,replanned\n");
        for r in &log.records {
            let (mean, lower, upper) = match (r.expected_force.get(f), r.expected_force_std.get(f)) {
                (Some(m), Some(s)) => (Some(*m), Some(m - s), Some(m + s)),
                (Some(m), None) => (Some(*m), Some(*m), Some(*m)),
                _ => (None, None, None),
            };
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                r.t,
                cell(mean.as_ref()),
                cell(lower.as_ref()),
                cell(upper.as_ref()),
                cell(r.measured_force.get(f)),
                u8::from(r.replanned)
            );
        }
        write(format!("force_{f}.csv"), csv)?;
    }

    let mut csv = String::from("t_trigger,t_cond,t_mix,selected_dims,total_deviation\n");
    for e in &log.events {
        let dims: Vec<String> = e.selected_dims.iter().map(usize::to_string).collect();
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            e.t_trigger,
            e.t_cond,
            e.t_mix,
            dims.join(";"),
            e.deviations.iter().sum::<f64>()
        );
    }
    write("replan_events.csv".into(), csv)?;
    Ok(files)
}
