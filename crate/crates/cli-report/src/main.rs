use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cli_report::*;

#[derive(Parser)]
#[command(name = "thinsections", version, about = "Thin interval systems, the Rips machine and sections of a periodic surface")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    All,
    S1,
    S2,
    Surface,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Rauzy,
    Rips,
}

#[derive(Subcommand)]
enum Cmd {
    /// Recompute every stated number and identity.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        scope: ScopeArg,
        #[arg(long)]
        json: bool,
    },
    /// Run Rauzy induction or the Rips machine.
    Run {
        #[arg(value_enum)]
        kind: KindArg,
        /// s1, s2, or a system JSON file.
        #[arg(long)]
        system: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        emit_json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Trace plane sections x2 = level.
    Section {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
        /// Number of seeded random levels.
        #[arg(long, conflicts_with = "level")]
        levels: Option<usize>,
        /// Explicit levels, comma separated.
        #[arg(long, value_delimiter = ',')]
        level: Vec<f64>,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Verify { scope, json } => {
            let scope = match scope {
                ScopeArg::All => Scope::All,
                ScopeArg::S1 => Scope::S1,
                ScopeArg::S2 => Scope::S2,
                ScopeArg::Surface => Scope::Surface,
            };
            let rows = verify_rows(scope, &Inputs::default())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                print!("{}", render_table(&rows));
            }
            Ok(exit_code(&rows))
        }
        Cmd::Run { kind, system, steps, emit_json, svg } => {
            let s = load_system(&system)?;
            let kind = match kind {
                KindArg::Rauzy => RunKind::Rauzy,
                KindArg::Rips => RunKind::Rips,
            };
            let out = run(kind, &s, steps, &RunOptions { emit_json, svg })?;
            for l in &out.log {
                println!("{l}");
            }
            if let Some(why) = &out.stopped {
                eprintln!("stopped after {} steps: {why}", out.steps_done);
            }
            if out.report.is_null() {
                println!("no self-similarity within {steps} steps");
            } else {
                println!("{}", serde_json::to_string_pretty(&out.report)?);
            }
            Ok(out.exit_code())
        }
        Cmd::Section { example, levels, level, radius, seed, svg, json } => {
            let spec = match (levels, level.is_empty()) {
                (Some(n), _) => Levels::Count(n),
                (None, false) => Levels::List(level),
                (None, true) => return Err(CliError::Usage("give --levels N or --level X[,Y..]".into())),
            };
            let eps = precision()?;
            let (summary, first) = cmd_section(example, &spec, radius, seed, eps)?;
            println!("example {example}, radius {radius}, seed {seed}, eps {eps:e}");
            for l in &summary.levels {
                match (&l.census, &l.skipped) {
                    (Some(c), _) => println!(
                        "level {:.12}: spanning {}, clipped {}, closed {}, wide {}",
                        l.level, c.spanning, c.clipped, c.closed, c.wide
                    ),
                    (None, Some(why)) => println!("level {:.12}: skipped ({why})", l.level),
                    _ => {}
                }
            }
            println!("spanning histogram {:?}, fraction with one spanning component {:.3}", summary.spanning_histogram, summary.fraction_single_spanning);
            if let (Some(p), Some((_, c))) = (&svg, &first) {
                std::fs::write(p, section::render_svg(radius, c))?;
            }
            if let Some(p) = &json {
                std::fs::write(p, serde_json::to_string_pretty(&section::render_json(&summary, first.as_ref()))?)?;
            }
            Ok(0)
        }
    }
}
