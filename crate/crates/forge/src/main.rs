use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use soliton_core::soliton::ModelParams;
use soliton_forge::export::{cmd_bryant, BryantArgs};
use soliton_forge::{aggregate, suites, ForgeError, VerifySpec};

#[derive(Parser)]
#[command(name = "soliton-forge", version, about = "Verify gradient Ricci soliton identities numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a rotationally symmetric profile and write CSV + summary.
    Bryant(BryantCmd),
    /// Run a verification suite and write a JSON run report.
    Verify(VerifyCmd),
    /// Merge run reports into a residual matrix and plot data.
    Report(ReportCmd),
}

#[derive(Args)]
struct BryantCmd {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Center value f''(0); default -1/n (steady) or -1 (expanding).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// 0 (steady) or -0.5 (expanding).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    rho: f64,
    /// Default 1000 (steady) or 200 (expanding).
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyCmd {
    /// JSON spec file; flags given alongside override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Linear term of the line-cigar potential.
    #[arg(long, allow_hyphen_values = true)]
    slope: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    /// Integrator tolerance of profile models.
    #[arg(long)]
    profile_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override, repeatable.
    #[arg(long = "tolerance", value_name = "ID=VALUE")]
    tolerances: Vec<String>,
    /// Mark an identity as an expected failure, repeatable.
    #[arg(long = "expect-fail", value_name = "ID")]
    expect_fail: Vec<String>,
    /// Record wall-clock seconds per suite.
    #[arg(long)]
    timings: bool,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportCmd {
    /// Run report JSON files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn build_spec(c: &VerifyCmd) -> Result<VerifySpec, ForgeError> {
    let mut spec = match &c.spec {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| ForgeError::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| ForgeError::Usage(format!("{}: {e}", path.display())))?
        }
        None => {
            let model = c.model.as_deref().ok_or_else(|| ForgeError::Usage("--model is required".into()))?;
            let suite = c.suite.as_deref().ok_or_else(|| ForgeError::Usage("--suite is required".into()))?;
            VerifySpec::new(model, ModelParams::default(), suite)
        }
    };
    if c.spec.is_some() {
        if let Some(m) = &c.model {
            spec.model = m.clone();
        }
        if let Some(s) = &c.suite {
            spec.suite = s.clone();
        }
    }
    let p = &mut spec.params;
    p.dim = c.dim.or(p.dim);
    p.a = c.a.or(p.a);
    p.slope = c.slope.or(p.slope);
    p.rmax = c.rmax.or(p.rmax);
    p.tol = c.profile_tol.or(p.tol);
    if let Some(seed) = c.seed {
        spec.seed = seed;
    }
    for t in &c.tolerances {
        let (id, v) = t
            .split_once('=')
            .ok_or_else(|| ForgeError::Usage(format!("--tolerance expects ID=VALUE, got `{t}`")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| ForgeError::Usage(format!("--tolerance value `{v}` is not a number")))?;
        spec.tolerances.insert(id.to_string(), v);
    }
    for id in &c.expect_fail {
        if !spec.expects_failure(id) {
            spec.expected_failures.push(id.clone());
        }
    }
    spec.timings |= c.timings;
    if let Some(out) = &c.out {
        spec.output = Some(out.display().to_string());
    }
    Ok(spec)
}

fn verify(c: &VerifyCmd) -> Result<bool, ForgeError> {
    let spec = build_spec(c)?;
    let report = suites::run(&spec)?;
    let json = report.to_json();
    match &c.out {
        Some(path) => fs::write(path, &json)?,
        None => print!("{json}"),
    }
    for r in report.reports.iter().filter(|r| r.pass == spec.expects_failure(&r.identity)) {
        eprintln!(
            "unexpected {}: {} {} residual {:e} (tolerance {:e})",
            if r.pass { "pass" } else { "failure" },
            r.case,
            r.identity,
            r.max_abs_residual,
            r.tolerance
        );
    }
    Ok(report.overall_pass)
}

fn run(cli: Cli) -> Result<bool, ForgeError> {
    match cli.command {
        Command::Bryant(b) => {
            let args = BryantArgs {
                dim: b.dim,
                a: b.a,
                rho: b.rho,
                rmax: b.rmax,
                tol: b.tol,
                out: b.out,
            };
            let summary = cmd_bryant(&args)?;
            if let Some(m) = &summary.message {
                eprintln!("{m}");
            }
            println!("{}", args.out.join("summary.json").display());
            Ok(true)
        }
        Command::Verify(v) => verify(&v),
        Command::Report(r) => {
            for p in aggregate::cmd_report(&r.inputs, &r.out)? {
                println!("{}", p.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
