//! `section`: trace sampled or listed levels and summarize the census.

use std::collections::BTreeMap;

use serde::Serialize;
use surface_sections::{
    build_surface, component_census, sample_levels, section_json, section_svg, trace_window, Census, SectionComponent,
    SurfaceError, Window,
};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug)]
pub enum Levels {
    Count(usize),
    List(Vec<f64>),
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelResult {
    pub level: f64,
    pub census: Option<Census>,
    /// Why the level was skipped (NearSaddle).
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionSummary {
    pub example: u8,
    pub radius: f64,
    pub seed: u64,
    pub eps: f64,
    pub levels: Vec<LevelResult>,
    /// Number of spanning components -> number of levels.
    pub spanning_histogram: BTreeMap<usize, usize>,
    pub closed_total: usize,
    pub fraction_single_spanning: f64,
}

/// Traces every level; the components of the first traced level are returned
/// for rendering.
pub fn cmd_section(
    example: u8,
    levels: &Levels,
    radius: f64,
    seed: u64,
    eps: f64,
) -> Result<(SectionSummary, Option<(f64, Vec<SectionComponent>)>), CliError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(SurfaceError::EmptyWindow(radius).into());
    }
    let s = build_surface(example)?;
    let ys = match levels {
        Levels::Count(n) => sample_levels(&s, seed, *n, radius, eps.max(1e-9) * 1e3),
        Levels::List(v) => v.clone(),
    };
    let w = Window::centered(radius);
    // levels are independent; trace them in parallel and keep the input order
    let traced: Vec<Result<Vec<SectionComponent>, SurfaceError>> = std::thread::scope(|sc| {
        let hs: Vec<_> = ys.iter().map(|&y| sc.spawn({ let s = &s; move || trace_window(s, y, &w, eps) })).collect();
        hs.into_iter().map(|h| h.join().expect("trace thread")).collect()
    });
    let mut results = Vec::new();
    let mut first = None;
    let mut hist = BTreeMap::new();
    let mut closed_total = 0;
    for (&y, t) in ys.iter().zip(traced) {
        match t {
            Ok(c) => {
                let census = component_census(&c, radius);
                *hist.entry(census.spanning).or_insert(0) += 1;
                closed_total += census.closed;
                results.push(LevelResult { level: y, census: Some(census), skipped: None });
                if first.is_none() {
                    first = Some((y, c));
                }
            }
            Err(e @ SurfaceError::NearSaddle { .. }) => {
                results.push(LevelResult { level: y, census: None, skipped: Some(e.to_string()) });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let traced_n: usize = hist.values().sum();
    let single = hist.get(&1).copied().unwrap_or(0);
    let summary = SectionSummary {
        example,
        radius,
        seed,
        eps,
        levels: results,
        spanning_histogram: hist,
        closed_total,
        fraction_single_spanning: if traced_n == 0 { 0.0 } else { single as f64 / traced_n as f64 },
    };
    Ok((summary, first))
}

pub fn render_svg(radius: f64, comps: &[SectionComponent]) -> String {
    section_svg(comps, &Window::centered(radius))
}

pub fn render_json(summary: &SectionSummary, first: Option<&(f64, Vec<SectionComponent>)>) -> serde_json::Value {
    let mut v = serde_json::to_value(summary).expect("summary serializes");
    if let Some((y, c)) = first {
        v["first_level"] = section_json(*y, &Window::centered(summary.radius), summary.eps, c);
    }
    v
}
