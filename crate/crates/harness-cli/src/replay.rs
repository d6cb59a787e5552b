//! Human-readable step table of a stored trajectory.

use std::fmt::Write as _;
use std::path::Path;

use sim_core::io::load_trajectory;

use crate::error::{HarnessError, Result};

/// One row per `every`-th step (and the last): seed, then pose, speed and
/// action of every vehicle, followed by the terminal status.
pub fn step_table(path: &Path, every: usize) -> Result<String> {
    if !path.is_file() {
        return Err(HarnessError::Invalid(format!("trajectory {} not found", path.display())));
    }
    let (trajectory, provenance) = load_trajectory(path)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# scenario {} policy {} dt {} seed {}",
        provenance.scenario_id, provenance.policy_id, trajectory.config.dt, trajectory.config.rng_seed
    );
    let vehicles = trajectory.states.first().map_or(0, |s| s.len());
    let mut header = format!("{:>5} {:>20}", "step", "seed");
    for slot in 0..vehicles {
        let _ = write!(header, " | {:>7} {:>7} {:>5} {:>6} {:>6} {:>6}", format!("x{slot}"), "y", "v", "h", "alpha", "phi");
    }
    let _ = writeln!(out, "{header}");
    let last = trajectory.states.len().saturating_sub(1);
    for (i, s) in trajectory.states.iter().enumerate() {
        if i % every.max(1) != 0 && i != last {
            continue;
        }
        let seed = trajectory.seeds.get(i).map_or("-".to_string(), |x| x.to_string());
        let _ = write!(out, "{:>5} {:>20}", s.step_index, seed);
        for (v, a) in s.vehicles.iter().zip(&s.actions) {
            let _ = write!(out, " | {:>7.2} {:>7.2} {:>5.2} {:>6.2} {:>6.2} {:>6.2}", v.x, v.y, v.v, v.h, a.alpha, a.phi);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "terminal: {}", trajectory.terminal.label());
    Ok(out)
}
