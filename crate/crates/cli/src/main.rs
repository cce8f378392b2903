use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use knotchar::{Error, KnotPresentation};
use serde_json::{json, Value};

mod commands;
mod driver;

/// Character varieties, A-polynomials, norms, surgeries and regulator
/// checks for two-bridge knot presets.
#[derive(Parser, Debug)]
#[command(name = "knotchar", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Builtin preset name or path to a `.knot` file.
    #[arg(long, global = true, default_value = "fig8")]
    pub knot: String,
    /// Write the JSON report here; `-` prints it instead of the text.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write a CSV table here (samples for `volcs`, slopes for `surgery --range`).
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Integration error target for paths.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Bound on `|∫η|` and on the distance to a rational on closed loops.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub loop_tol: f64,
    #[arg(long, global = true, default_value_t = 64)]
    pub max_den: u64,
    /// Seed for the random coordinate changes and sample points.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads for batch commands; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Defining polynomial of the character variety and its reducible characters.
    Charvar,
    /// Traces of meridian, longitude and their product on the nonabelian component.
    Restrict,
    /// The A-polynomial factor of the nonabelian component.
    Apoly,
    /// Culler-Shalen norm of the slope p/q with the per-ideal-point terms.
    Norm {
        #[arg(allow_negative_numbers = true)]
        p: i64,
        #[arg(allow_negative_numbers = true)]
        q: i64,
        /// Also read each term directly off the branch series.
        #[arg(long)]
        direct: bool,
    },
    /// Characters killed by p/q surgery, or a norm comparison over a range.
    Surgery {
        #[arg(allow_negative_numbers = true, required_unless_present = "range")]
        p: Option<i64>,
        #[arg(allow_negative_numbers = true, required_unless_present = "range")]
        q: Option<i64>,
        /// Compare with the norm for every primitive slope with |p|, |q| ≤ N.
        #[arg(long, value_name = "N", conflicts_with_all = ["p", "q"])]
        range: Option<i64>,
    },
    /// Vol and CS along a path from the base point, and loop quantization.
    Volcs {
        /// `;`-separated pieces starting at m = 1: `circle(c, r[, turns])`,
        /// `line(to)`, `arc(center, turns)`.
        #[arg(long)]
        driver: Option<String>,
        /// `auto` runs the generated loop library.
        #[arg(long)]
        loops: Option<String>,
        /// Samples per piece (per turn on arcs) before refinement.
        #[arg(long, default_value_t = 256)]
        resolution: usize,
    },
    /// Tame symbols of f and g at the points of the A-curve over m.
    Tame {
        /// Function of m and l, `num` or `num / den`.
        f: String,
        g: String,
        /// Complex m value, or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Runs the acceptance checks against the preset.
    Verify,
}

/// Exit codes.
const VERIFICATION_FAILED: u8 = 2;
const INPUT_ERROR: u8 = 3;
const NUMERIC_ERROR: u8 = 4;

pub struct Output {
    pub result: Value,
    pub text: String,
    pub csv: Option<String>,
    pub failed: bool,
}

fn envelope(g: &Global, preset: &str, command: &str, body: (&str, Value)) -> Value {
    let mut v = json!({
        "schema": 1,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "preset": preset,
        "seed": g.seed,
        "tolerances": { "tol": g.tol, "loop_tol": g.loop_tol, "max_den": g.max_den },
    });
    v[body.0] = body.1;
    v
}

fn exit_code(e: &anyhow::Error) -> (u8, &'static str) {
    match e.downcast_ref::<Error>() {
        Some(Error::Verification(_)) => (VERIFICATION_FAILED, "verification"),
        Some(Error::Numeric(_) | Error::NearBranchPoint { .. } | Error::DepthExceeded(_)) => {
            (NUMERIC_ERROR, "numeric")
        }
        Some(Error::Algebra(knotchar::AlgebraError::RootsFailed(_))) => (NUMERIC_ERROR, "numeric"),
        _ => (INPUT_ERROR, "input"),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Charvar => "charvar",
        Command::Restrict => "restrict",
        Command::Apoly => "apoly",
        Command::Norm { .. } => "norm",
        Command::Surgery { .. } => "surgery",
        Command::Volcs { .. } => "volcs",
        Command::Tame { .. } => "tame",
        Command::Verify => "verify",
    }
}

fn run(cli: &Cli, pres: &KnotPresentation) -> anyhow::Result<Output> {
    let g = &cli.global;
    match &cli.command {
        Command::Charvar => commands::charvar(g, pres),
        Command::Restrict => commands::restrict(g, pres),
        Command::Apoly => commands::apoly(g, pres),
        Command::Norm { p, q, direct } => commands::norm(g, pres, *p, *q, *direct),
        Command::Surgery { p, q, range } => match (p, q, range) {
            (_, _, Some(n)) => commands::surgery_range(g, pres, *n),
            (Some(p), Some(q), None) => commands::surgery(g, pres, *p, *q),
            _ => Err(Error::Input("surgery needs p and q or --range".into()).into()),
        },
        Command::Volcs { driver, loops, resolution } => {
            commands::volcs(g, pres, driver.as_deref(), loops.as_deref(), *resolution)
        }
        Command::Tame { f, g: gs, at } => commands::tame(g, pres, f, gs, at),
        Command::Verify => commands::verify(g, pres),
    }
}

fn emit(g: &Global, report: &Value, text: &str) -> anyhow::Result<()> {
    let pretty = serde_json::to_string_pretty(report)? + "\n";
    match &g.json {
        Some(p) if p.as_os_str() == "-" => print!("{pretty}"),
        Some(p) => {
            fs::write(p, &pretty)?;
            print!("{text}");
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    if g.jobs > 0 {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(g.jobs).build_global();
    }
    let name = command_name(&cli.command);
    let checked = check_tolerances(g).and_then(|_| Ok(KnotPresentation::load(&g.knot)?));
    let result = checked.and_then(|pres| {
        let out = run(&cli, &pres)?;
        let report = envelope(g, &pres.name, name, ("result", out.result));
        if let (Some(path), Some(csv)) = (&g.csv, &out.csv) {
            fs::write(path, csv)?;
        }
        emit(g, &report, &out.text)?;
        Ok(out.failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(VERIFICATION_FAILED),
        Err(e) => {
            let (code, kind) = exit_code(&e);
            let report = envelope(g, &g.knot, name, ("error", json!({ "kind": kind, "message": format!("{e:#}") })));
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_default());
            if let Some(p) = g.json.as_ref().filter(|p| p.as_os_str() != "-") {
                let _ = fs::write(p, serde_json::to_string_pretty(&report).unwrap_or_default() + "\n");
            }
            ExitCode::from(code)
        }
    }
}

fn check_tolerances(g: &Global) -> anyhow::Result<()> {
    if !(g.tol > 0.0 && g.loop_tol > 0.0 && g.max_den >= 1) {
        return Err(Error::Input("tolerances must be positive and --max-den at least 1".into()).into());
    }
    Ok(())
}
