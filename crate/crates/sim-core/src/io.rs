//! JSON Lines trajectory dumps: a header record, one record per state, and a
//! terminal record.
//!
//! ```text
//! {"kind":"header","config":{..},"policy_assignment":[..],"failure":{..},"end":{..},"provenance":{..}}
//! {"kind":"state","seed":123,"state":{"step_index":0,"vehicles":[..],"actions":[..]}}
//! ...
//! {"kind":"terminal","terminal":{"status":"collision_vehicle","other":2}}
//! ```
//! `seed` on a state line is the seed that drove the transition out of it and
//! is absent on the final state.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::state::{EndPredicate, FailurePredicate, SimConfig, SimState, TerminalStatus, Trajectory};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub campaign_seed: u64,
    pub scenario_id: String,
    pub policy_id: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Record {
    Header {
        config: SimConfig,
        policy_assignment: Vec<String>,
        failure: FailurePredicate,
        end: EndPredicate,
        provenance: Provenance,
    },
    State {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        state: SimState,
    },
    Terminal {
        terminal: TerminalStatus,
    },
}

fn fmt_err(e: impl std::fmt::Display) -> SimError {
    SimError::Format(e.to_string())
}

pub fn write_trajectory<W: Write>(mut w: W, traj: &Trajectory, provenance: &Provenance) -> Result<()> {
    let mut line = |r: &Record| -> Result<()> {
        serde_json::to_writer(&mut w, r).map_err(fmt_err)?;
        w.write_all(b"\n").map_err(fmt_err)
    };
    line(&Record::Header {
        config: traj.config,
        policy_assignment: traj.policy_assignment.clone(),
        failure: traj.failure,
        end: traj.end,
        provenance: provenance.clone(),
    })?;
    for (i, state) in traj.states.iter().enumerate() {
        line(&Record::State {
            seed: traj.seeds.get(i).copied(),
            state: state.clone(),
        })?;
    }
    line(&Record::Terminal {
        terminal: traj.terminal,
    })
}

pub fn read_trajectory<R: BufRead>(r: R) -> Result<(Trajectory, Provenance)> {
    let mut header = None;
    let mut states = Vec::new();
    let mut seeds = Vec::new();
    let mut terminal = None;
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(fmt_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line)
            .map_err(|e| SimError::Format(format!("line {}: {e}", n + 1)))?;
        match rec {
            Record::Header {
                config,
                policy_assignment,
                failure,
                end,
                provenance,
            } => header = Some((config, policy_assignment, failure, end, provenance)),
            Record::State { seed, state } => {
                states.push(state);
                seeds.extend(seed);
            }
            Record::Terminal { terminal: t } => terminal = Some(t),
        }
    }
    let (config, policy_assignment, failure, end, provenance) =
        header.ok_or_else(|| SimError::Format("missing header record".into()))?;
    let terminal = terminal.ok_or_else(|| SimError::Format("missing terminal record".into()))?;
    if states.is_empty() || seeds.len() + 1 != states.len() {
        return Err(SimError::Format(format!(
            "{} states but {} transition seeds",
            states.len(),
            seeds.len()
        )));
    }
    Ok((
        Trajectory {
            config,
            policy_assignment,
            failure,
            end,
            states,
            seeds,
            terminal,
        },
        provenance,
    ))
}

pub fn save_trajectory(path: &std::path::Path, traj: &Trajectory, provenance: &Provenance) -> Result<()> {
    let file = std::fs::File::create(path).map_err(fmt_err)?;
    let mut w = std::io::BufWriter::new(file);
    write_trajectory(&mut w, traj, provenance)?;
    w.flush().map_err(fmt_err)
}

pub fn load_trajectory(path: &std::path::Path) -> Result<(Trajectory, Provenance)> {
    let file = std::fs::File::open(path).map_err(|e| SimError::Format(format!("{}: {e}", path.display())))?;
    read_trajectory(std::io::BufReader::new(file))
}
