use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rigidity_core::deformation_basis as db;
use rigidity_core::exact::{RatFn, RatMatrix};
use rigidity_core::numeric_harness::{closed_forms, run_suites, ConfigEcho, FDConfig, ParamsEcho, Report, SuiteParams, Summary, SCHEMA_VERSION};
use rigidity_core::obstruction as ob;
use rigidity_core::product_rigidity::{product_obstruction, ProductConfig};
use rigidity_core::scalar_algebra::GlobalParams;

#[derive(Parser)]
#[command(name = "rigidity", version, about = "Exact and numeric checks for the third-order obstruction on complex projective space")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and write a report.
    Verify(VerifyArgs),
    /// Print an exact object in canonical form.
    Show(ShowArgs),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum MArg {
    Sym,
    Int(i64),
}

impl MArg {
    fn as_option(self) -> Option<i64> {
        match self {
            MArg::Sym => None,
            MArg::Int(m) => Some(m),
        }
    }

    fn echo(self) -> String {
        match self {
            MArg::Sym => "sym".into(),
            MArg::Int(m) => m.to_string(),
        }
    }
}

fn parse_m(s: &str) -> Result<MArg, String> {
    if s == "sym" {
        return Ok(MArg::Sym);
    }
    s.parse::<i64>().map(MArg::Int).map_err(|_| format!("expected an integer or `sym`, got `{s}`"))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Suite id, comma-separated ids, or `all`.
    #[arg(long, default_value = "all", value_delimiter = ',')]
    suite: Vec<String>,
    /// Integer m >= 2, or `sym` for the exact checks only.
    #[arg(long, default_value = "2", value_parser = parse_m)]
    m: MArg,
    /// Dimension of the second factor in the product checks.
    #[arg(long, default_value_t = 3)]
    n2: i64,
    /// Monte Carlo samples per estimate.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-4)]
    fd_step: f64,
    /// Disable Richardson extrapolation.
    #[arg(long)]
    no_richardson: bool,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Object {
    H0,
    Ftt,
    LMatrix,
    LInverse,
    I1,
    I2,
    Total,
    Psi,
}

#[derive(clap::Args)]
struct ShowArgs {
    #[arg(long, value_enum)]
    object: Object,
    #[arg(long, default_value = "sym", value_parser = parse_m)]
    m: MArg,
    /// Second-factor dimension for `psi`.
    #[arg(long, default_value_t = 3)]
    n2: i64,
}

fn check_m(m: MArg) -> Result<()> {
    if let MArg::Int(k) = m {
        if k < 2 {
            bail!("m = {k} is excluded: the CP^1 case (m = 1) is not covered and m must be at least 2");
        }
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    check_m(a.m)?;
    let fd = FDConfig { step: a.fd_step, richardson: !a.no_richardson, ..FDConfig::default() };
    let params = SuiteParams { m: a.m.as_option(), n2: a.n2, samples: a.samples, seed: a.seed, fd };
    let ids: Vec<&str> = a.suite.iter().map(String::as_str).collect();
    let results = run_suites(&ids, &params)?;
    let closed = closed_forms(params.m, params.n2).map_err(|e| anyhow::anyhow!("{e}"))?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        params: ParamsEcho { m: a.m.echo(), n2: Some(a.n2) },
        config: ConfigEcho { suite: a.suite.join(","), samples: a.samples, seed: a.seed, fd_step: fd.step, richardson: fd.richardson },
        summary: Summary::of(&results),
        results,
        closed_forms: closed,
    };
    let body = match a.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    };
    match &a.out {
        Some(path) => {
            fs::write(path, &body).with_context(|| format!("cannot write report to {}", path.display()))?;
            eprintln!("{} passed, {} failed; report written to {}", report.summary.pass, report.summary.fail, path.display());
        }
        None => print!("{body}"),
    }
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn print_matrix(mm: &RatMatrix) {
    for i in 0..mm.rows() {
        let row: Vec<String> = (0..mm.cols()).map(|j| mm.get(i, j).to_string()).collect();
        println!("[{}]", row.join(", "));
    }
}

fn show(a: ShowArgs) -> Result<ExitCode> {
    check_m(a.m)?;
    let params = match a.m {
        MArg::Sym => GlobalParams::symbolic(),
        MArg::Int(m) => GlobalParams::concrete(m)?,
    };
    let e = |x: ob::ObstructionError| anyhow::anyhow!("{x}");
    match a.object {
        Object::H0 => {
            for (k, c) in db::solve_h0(&params)?.to_strings().iter().enumerate() {
                println!("e{} {c}", k + 1);
            }
        }
        Object::Ftt => println!("{}", db::f_tt(&params)?),
        Object::LMatrix => print_matrix(&db::l_matrix(&params)),
        Object::LInverse => print_matrix(&db::l_inverse(&params)?),
        Object::I1 => println!("{}", ob::compute_i1(&params).map_err(e)?.i1),
        Object::I2 => println!("{}", ob::compute_i2(&params).map_err(e)?.i2),
        Object::Total => {
            let t = ob::total_obstruction(&params).map_err(e)?.total;
            println!("{}", t.parse::<RatFn>().map(|r| r.to_string()).unwrap_or(t));
        }
        Object::Psi => {
            let po = product_obstruction(&ProductConfig::new(a.m.as_option(), a.n2)?)?;
            for (name, q) in [("psi1", &po.psi1), ("psi2", &po.psi2)] {
                println!("{name} ({})u^2 + ({})v^2 + ({})uv", q.u2, q.v2, q.uv);
            }
            println!("lambda {}", po.lam);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.cmd {
        Cmd::Verify(a) => verify(a),
        Cmd::Show(a) => show(a),
    };
    match out {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
