//! Command-line front end: `resonances`, `expand`, `verify`, `scan-alpha`.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::expansion::{expand, ExpandRequest};
use crate::io::{expansion_json, resonances_csv, resonances_json, series_csv, sweep_csv, OutputDir, RunManifest};
use crate::model::{load_problem_file, sample_state, CutoffWindow, ProblemSpec};
use crate::resonances::{scan_classified, Resonance};
use crate::verify::run_suite;

pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "resonwave", version, about = "Resonance expansions for 1-D wave equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides contour.quad_tol.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads; falls back to RESONWAVE_THREADS, then to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Locate and classify the zeros of W in the scan region.
    Resonances(Common),
    /// Windowed resonance expansion with tail and oracle comparison.
    Expand(Common),
    /// Run the self-checks for the configured model.
    Verify(Common),
    /// Track zeros over the coupling sweep.
    ScanAlpha(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Resonances(_) => "resonances",
            Command::Expand(_) => "expand",
            Command::Verify(_) => "verify",
            Command::ScanAlpha(_) => "scan-alpha",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Resonances(c) | Command::Expand(c) | Command::Verify(c) | Command::ScanAlpha(c) => c,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() || matches!(e, Error::Io(_)) {
        EXIT_CONFIG
    } else {
        EXIT_NUMERIC
    }
}

fn error_json(e: &Error) -> String {
    json!({"error": e.kind(), "message": e.to_string(), "exit_code": exit_code(e)}).to_string()
}

fn thread_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("RESONWAVE_THREADS") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::config("RESONWAVE_THREADS", format!("not a thread count: {s:?}"))),
        Err(_) => Ok(0),
    }
}

fn load(c: &Common) -> Result<ProblemSpec> {
    let mut p = load_problem_file(&c.config)?;
    if let Some(t) = c.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::config("--tol", "must be positive"));
        }
        p.contour.quad_tol = t;
    }
    p.contour.validate()?;
    Ok(p)
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
/// Errors are printed to stderr as one JSON object.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    let c = cmd.common();
    let threads = thread_count(c.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config("--threads", e.to_string()))?;
    pool.install(|| execute(cmd, c, pool.current_num_threads()))
}

fn execute(cmd: &Command, c: &Common, threads: usize) -> Result<i32> {
    let start = Instant::now();
    let p = load(c)?;
    let mut out = OutputDir::create(&c.out)?;
    let mut timings = vec![("load".to_string(), start.elapsed().as_secs_f64())];
    let mut code = 0;
    match cmd {
        Command::Resonances(_) => {
            let scan = scan_classified(&p.scan_region(), &p.potential, &p.contour)?;
            out.write("resonances.csv", &resonances_csv(&scan.resonances))?;
            out.write_json("resonances.json", &resonances_json(&scan))?;
        }
        Command::Expand(_) => {
            let f = sample_state(&p.state.shape, p.state.direction.clone(), &p.grid)?;
            let window = CutoffWindow::new(p.window, &p.grid)?;
            let rep = expand(&ExpandRequest {
                family: p.family,
                times: &p.times,
                state: &f,
                potential: &p.potential,
                contour: &p.contour,
                window: &window,
                n: p.n,
                region: p.scan.clone(),
            })?;
            out.write_json("expansion.json", &expansion_json(&rep))?;
            out.write("series.csv", &series_csv(&rep))?;
        }
        Command::Verify(_) => {
            let checks = run_suite(&p)?;
            for ch in &checks {
                println!("{}", ch.line());
            }
            if checks.iter().any(|ch| !ch.passed) {
                code = EXIT_VERIFY;
            }
            out.write_json("verify.json", &json!({ "checks": checks }))?;
        }
        Command::ScanAlpha(_) => {
            let sweep = p
                .sweep
                .clone()
                .ok_or_else(|| Error::config("sweep", "scan-alpha needs a sweep block"))?;
            let region = p.scan_region();
            let rows: Vec<Result<(num_complex::Complex64, Vec<Resonance>)>> = sweep
                .values()
                .into_par_iter()
                .map(|a| {
                    let v = p.potential.with_coupling(a)?;
                    Ok((a, scan_classified(&region, &v, &p.contour)?.resonances))
                })
                .collect();
            let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
            out.write("scan_alpha.csv", &sweep_csv(&rows))?;
        }
    }
    timings.push((cmd.name().to_string(), start.elapsed().as_secs_f64()));
    out.finish(RunManifest {
        command: cmd.name().into(),
        config: c.config.clone(),
        out_dir: c.out.clone(),
        tol: c.tol,
        threads,
        version: format!("resonwave-{}", env!("CARGO_PKG_VERSION")),
        timings,
        files: Vec::new(),
    })?;
    Ok(code)
}
