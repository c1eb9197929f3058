//! `run rauzy|rips`: step a system, write per-step artifacts, report cycles.

use std::fs;
use std::path::{Path, PathBuf};

use band_rips::{complex_from_iis, detect_rips_cycle, rips_step, to_svg, Policy, RipsError};
use iis_core::systems::{build_system, SystemId};
use iis_core::{detect_self_similarity, rauzy_step, Iis, Side};
use serde_json::json;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunKind {
    Rauzy,
    Rips,
}

/// `s1`, `s2`, or a path to a system JSON file.
pub fn load_system(spec: &str) -> Result<Iis, CliError> {
    if let Some(id) = SystemId::parse(spec) {
        return Ok(build_system(id));
    }
    let text = fs::read_to_string(spec)?;
    Ok(Iis::from_json(&serde_json::from_str(&text)?)?)
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub emit_json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub steps_done: usize,
    /// Set when a step could not be taken; artifacts up to that point remain.
    pub stopped: Option<String>,
    pub report: serde_json::Value,
    pub log: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.stopped.is_some() {
            3
        } else {
            0
        }
    }
}

fn write(dir: &Option<PathBuf>, name: &str, body: &str) -> Result<(), CliError> {
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
        fs::write(Path::new(d).join(name), body)?;
    }
    Ok(())
}

pub fn run(kind: RunKind, s: &Iis, steps: usize, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    match kind {
        RunKind::Rauzy => run_rauzy(s, steps, opts),
        RunKind::Rips => run_rips(s, steps, opts),
    }
}

/// Right-side Rauzy steps.
fn run_rauzy(s: &Iis, steps: usize, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let mut cur = s.clone();
    let mut log = Vec::new();
    let mut stopped = None;
    let mut done = 0;
    write(&opts.emit_json, "step_000.json", &serde_json::to_string_pretty(&cur.to_json())?)?;
    write(&opts.svg, "step_000.svg", &to_svg(&complex_from_iis(&cur)))?;
    for k in 1..=steps {
        match rauzy_step(&cur, Side::Right) {
            Ok((next, moves)) => {
                for m in &moves {
                    log.push(format!("step {k}: {:?} {} pair {}", m.kind, m.side.name(), m.pair));
                }
                cur = next;
                done = k;
                write(&opts.emit_json, &format!("step_{k:03}.json"), &serde_json::to_string_pretty(&cur.to_json())?)?;
                write(&opts.svg, &format!("step_{k:03}.svg"), &to_svg(&complex_from_iis(&cur)))?;
            }
            Err(e) => {
                stopped = Some(e.to_string());
                break;
            }
        }
    }
    let report = match detect_self_similarity(s, steps, iis_core::Policy::Fixed(Side::Right)) {
        Some(r) => json!({
            "period": r.period,
            "sides": r.sides,
            "contraction": r.contraction,
            "contraction_approx": r.contraction.to_f64(),
            "translation": r.translation,
            "verified": r.verify(s),
        }),
        None => serde_json::Value::Null,
    };
    Ok(RunOutcome { steps_done: done, stopped, report, log })
}

/// Rips machine iterations with the sweep policy.
fn run_rips(s: &Iis, steps: usize, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let x = complex_from_iis(s);
    let mut cur = x.clone();
    let mut log = Vec::new();
    let mut stopped = None;
    let mut done = 0;
    write(&opts.emit_json, "step_000.json", &serde_json::to_string_pretty(&cur.to_json())?)?;
    write(&opts.svg, "step_000.svg", &to_svg(&cur))?;
    for k in 1..=steps {
        match rips_step(&cur, Policy::Sweep) {
            Ok((next, l)) => {
                log.push(format!(
                    "step {k}: {} collapses, {} merges, {} dead arcs deleted; {} arcs, {} bands",
                    l.collapses.len(),
                    l.merges,
                    l.dead_deleted,
                    next.arcs.len(),
                    next.bands.len()
                ));
                cur = next;
                done = k;
                write(&opts.emit_json, &format!("step_{k:03}.json"), &serde_json::to_string_pretty(&cur.to_json())?)?;
                write(&opts.svg, &format!("step_{k:03}.svg"), &to_svg(&cur))?;
            }
            Err(RipsError::Halted) => {
                stopped = Some(RipsError::Halted.to_string());
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let report = match detect_rips_cycle(&x, steps, Policy::Sweep) {
        Some(r) => r.to_json(),
        None => serde_json::Value::Null,
    };
    Ok(RunOutcome { steps_done: done, stopped, report, log })
}
