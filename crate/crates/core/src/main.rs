use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lamhyp::io::{exit_code, parse_surface, parse_sweep, run_scenario, Command, Scenario};
use lamhyp::{Error, Result};

#[derive(Parser)]
#[command(name = "lamhyp", version, about = "Checks and experiments for λ-hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Identity and λ-equation checks on one surface.
    Verify(Common),
    /// Volume-preserving flow of a perturbed circle.
    Flow(Common),
    /// Laplacian and stability-operator spectrum of a round sphere.
    Spectrum(Common),
    /// Stability verdicts over a radius grid; CSV on stdout without --out.
    Stability(Common),
    /// Shoot closed λ-curves.
    Curve(Common),
    /// Area growth against the predicted exponent.
    Growth(Common),
    /// Numeric vs analytic first variation.
    Variation(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// e.g. `--surface "sphere n=2 r=1.4142135623730951"`
    #[arg(long)]
    surface: Option<String>,
    /// e.g. `--sweep n=2 r=1.0:2.0:0.05`
    #[arg(long, num_args = 1..)]
    sweep: Option<Vec<String>>,
}

fn split(cmd: Cmd) -> (Command, Common) {
    match cmd {
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Flow(c) => (Command::Flow, c),
        Cmd::Spectrum(c) => (Command::Spectrum, c),
        Cmd::Stability(c) => (Command::Stability, c),
        Cmd::Curve(c) => (Command::Curve, c),
        Cmd::Growth(c) => (Command::Growth, c),
        Cmd::Variation(c) => (Command::Variation, c),
    }
}

fn threads() -> Result<()> {
    if let Ok(v) = std::env::var("LAMHYP_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::Config(format!("LAMHYP_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Error::Config("LAMHYP_THREADS must be positive".into()));
        }
        // Fails only if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn execute(cmd: Command, c: Common) -> Result<bool> {
    threads()?;
    let (mut scenario, base) = match &c.config {
        Some(p) => (Scenario::load(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (Scenario::default(), PathBuf::from(".")),
    };
    if let Some(r) = c.resolution {
        scenario.resolution = r;
    }
    if c.tol.is_some() {
        scenario.tolerance = c.tol;
    }
    if let Some(s) = &c.surface {
        scenario.surface = Some(parse_surface(s)?);
    }
    if let Some(t) = &c.sweep {
        scenario.stability = parse_sweep(t)?;
    }
    if c.out.is_some() {
        scenario.out = c.out.clone();
    }
    let outcome = run_scenario(&scenario, Some(cmd), &base)?;
    match &scenario.out {
        Some(dir) => {
            outcome.write(dir)?;
            eprintln!("wrote {}", dir.join("report.json").display());
        }
        None if cmd == Command::Stability => print!("{}", outcome.artifacts[0].contents),
        None => print!("{}", outcome.report.to_json()),
    }
    for c in outcome.report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: {:e} (tolerance {:e})", c.name, c.value, c.tolerance);
    }
    Ok(outcome.report.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (cmd, common) = split(cli.command);
    match execute(cmd, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
