mod output;

use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use selberg_gas::averages::{duality_lhs, duality_rhs_complex, mc_density_matrix, DualityCase};
use selberg_gas::ensembles::{sample_jue_halfhalf, sample_jue_metropolis, RngStream, BURN_IN_SWEEPS, THINNING};
use selberg_gas::exact::{density_matrix_asymptote, morris_closed, occupation_number, selberg_closed};
use selberg_gas::fisherhartwig::{
    jacobi_fh_asymptote, jacobi_ratio_balanced, jacobi_ratio_literal, toeplitz_determinant, toeplitz_fh_asymptote,
};
use selberg_gas::orbitals::{occupation_ratio, orbital, scaled_occupation};
use selberg_gas::validation::{run_criterion, table1, CRITERIA, DEFAULT_SEED};
use selberg_gas::{Boundary, DensityMatrixQuery, EnsembleParams, MorrisParams, SymbolSpec};

use output::{emit, Document, Format};

#[derive(Debug, Parser)]
#[command(name = "selberg-gas", version, about = "Jacobi ensemble averages and the impenetrable Bose gas in a box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed for every random stream
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads (results do not depend on this)
    #[arg(long, global = true, env = "SELBERG_GAS_THREADS")]
    threads: Option<NonZeroUsize>,
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Monte Carlo over asymptotic density matrix ratio at the ten table points
    Table1(Table1Args),
    /// Monte Carlo density matrix
    DmMc(DmMcArgs),
    /// Large-N density matrix
    DmAsym(DmAsymArgs),
    /// Natural orbital normalizations and occupations
    Orbitals(OrbitalArgs),
    /// Both sides of the duality formula
    DualityCheck(DualityArgs),
    /// Selberg integral
    Selberg(SelbergArgs),
    /// Morris integral
    Morris(MorrisArgs),
    /// Hankel determinant drift against the Jacobi-weight asymptote
    FhJacobi(FhJacobiArgs),
    /// Toeplitz determinant drift against the Fisher–Hartwig asymptote
    FhToeplitz(FhToeplitzArgs),
    /// Eigenvalue samples from the Jacobi unitary ensemble
    SampleJue(SampleArgs),
    /// Run the acceptance criteria
    Validate(ValidateArgs),
}

#[derive(Debug, Args, Serialize)]
struct Table1Args {
    #[arg(long, default_value_t = 14)]
    n: usize,
    #[arg(long = "m-samples", default_value_t = 5000)]
    m_samples: usize,
}

#[derive(Debug, Args, Serialize)]
struct DmMcArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    y: f64,
    #[arg(long, value_enum, default_value = "dirichlet")]
    boundary: BoundaryArg,
    #[arg(long = "m-samples", default_value_t = 5000)]
    m_samples: usize,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum BoundaryArg {
    Dirichlet,
    Neumann,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Dirichlet => Boundary::Dirichlet,
            BoundaryArg::Neumann => Boundary::Neumann,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct DmAsymArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    y: f64,
}

#[derive(Debug, Args, Serialize)]
struct OrbitalArgs {
    #[arg(long = "j-max", default_value_t = 8)]
    j_max: usize,
    /// Particle number for the unscaled occupations
    #[arg(long, default_value_t = 14)]
    n: usize,
    /// Box length
    #[arg(long, default_value_t = 1.0)]
    l: f64,
}

#[derive(Debug, Args, Serialize)]
struct DualityArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    lambda2: f64,
}

#[derive(Debug, Args, Serialize)]
struct SelbergArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    lambda1: f64,
    #[arg(long, allow_hyphen_values = true)]
    lambda2: f64,
}

#[derive(Debug, Args, Serialize)]
struct MorrisArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
}

#[derive(Debug, Args, Serialize)]
struct FhJacobiArgs {
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 0.5)]
    y: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    lambda2: f64,
    /// Polynomial h(x), coefficients from the constant term up
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    h: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 48])]
    sizes: Vec<usize>,
}

#[derive(Debug, Args, Serialize)]
struct FhToeplitzArgs {
    /// Zero strength a
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    /// Cosine coefficients g_0, g_1, … of g(θ)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    g: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 48])]
    sizes: Vec<usize>,
}

#[derive(Debug, Args, Serialize)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    lambda2: f64,
    #[arg(long = "m-samples", default_value_t = 10)]
    m_samples: usize,
    /// Metropolis sweeps per sample (other exponents than 1/2, 1/2)
    #[arg(long, default_value_t = BURN_IN_SWEEPS + THINNING)]
    sweeps: usize,
}

#[derive(Debug, Args, Serialize)]
struct ValidateArgs {
    /// Criteria to run (default: all)
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
}

/// Rows plus whether the command's own verdict was success.
struct Outcome {
    rows: Vec<Value>,
    ok: bool,
}

impl From<Vec<Value>> for Outcome {
    fn from(rows: Vec<Value>) -> Self {
        Outcome { rows, ok: true }
    }
}

fn run(cmd: &Command, seed: u64) -> anyhow::Result<Outcome> {
    Ok(match cmd {
        Command::Table1(a) => table1(a.n, a.m_samples, seed)?
            .into_iter()
            .map(|r| {
                json!({"x": r.x, "mc": r.mc, "std_error": r.mc_std_error, "asymptote": r.asymptote, "ratio": r.ratio})
            })
            .collect::<Vec<_>>()
            .into(),
        Command::DmMc(a) => {
            let q = DensityMatrixQuery::new(a.n, a.x, a.y, a.boundary.into());
            let est = mc_density_matrix(&q, a.m_samples, seed)?;
            let asym = density_matrix_asymptote(&q)?;
            vec![json!({
                "n": a.n, "x": a.x, "y": a.y, "boundary": a.boundary,
                "value": est.value, "std_error": est.std_error, "m_samples": est.m_samples, "asymptote": asym,
            })]
            .into()
        }
        Command::DmAsym(a) => {
            let q = DensityMatrixQuery::new(a.n, a.x, a.y, Boundary::Dirichlet);
            vec![json!({"n": a.n, "x": a.x, "y": a.y, "value": density_matrix_asymptote(&q)?})].into()
        }
        Command::Orbitals(a) => (0..=a.j_max)
            .map(|j| {
                let o = orbital(j, a.l)?;
                Ok(json!({
                    "j": j,
                    "scaled_occupation": scaled_occupation(j),
                    "ratio_to_ground": occupation_ratio(j),
                    "occupation": occupation_number(j, a.n),
                    "normalization": o.normalization,
                }))
            })
            .collect::<anyhow::Result<Vec<_>>>()?
            .into(),
        Command::DualityCheck(a) => {
            let case = DualityCase::new(a.n, a.m, a.t, a.lambda1, a.lambda2)?;
            let lhs = duality_lhs(&case)?;
            let rhs = duality_rhs_complex(&case)?;
            vec![json!({
                "lhs": lhs, "rhs": rhs.re, "rhs_imag": rhs.im,
                "relative_difference": (lhs - rhs.re).abs() / lhs.abs(),
            })]
            .into()
        }
        Command::Selberg(a) => {
            let v = selberg_closed(&EnsembleParams::jue(a.n, a.lambda1, a.lambda2)?)?;
            vec![json!({"log_value": v.log_abs, "value": v.value()})].into()
        }
        Command::Morris(a) => {
            let v = morris_closed(&MorrisParams { n: a.n, a: a.a, b: a.b })?;
            vec![json!({"log_abs": v.log_abs, "sign": v.sign, "value": v.value()})].into()
        }
        Command::FhJacobi(a) => {
            let sym = SymbolSpec::jacobi(a.h.clone(), vec![(a.y, a.q)])?;
            a.sizes
                .par_iter()
                .map(|&n| {
                    let p = EnsembleParams::jue(n, a.lambda1, a.lambda2)?;
                    let balanced = jacobi_ratio_balanced(&p, &sym, n)?;
                    let pred = jacobi_fh_asymptote(&p, &sym, n)?;
                    Ok(json!({
                        "n": n,
                        "log_ratio_balanced": balanced,
                        "log_ratio_literal": jacobi_ratio_literal(&p, &sym, n)?,
                        "log_asymptote": pred,
                        "delta": balanced - pred,
                    }))
                })
                .collect::<anyhow::Result<Vec<_>>>()?
                .into()
        }
        Command::FhToeplitz(a) => {
            let sym = SymbolSpec::toeplitz(a.g.clone(), vec![(a.phi, a.a)])?;
            a.sizes
                .par_iter()
                .map(|&n| {
                    let d = toeplitz_determinant(&sym, n)?.log_abs;
                    let pred = toeplitz_fh_asymptote(&sym, n)?;
                    Ok(json!({"n": n, "log_det": d, "log_asymptote": pred, "delta": d - pred}))
                })
                .collect::<anyhow::Result<Vec<_>>>()?
                .into()
        }
        Command::SampleJue(a) => {
            let p = EnsembleParams::jue(a.n, a.lambda1, a.lambda2)?;
            let recurrence = a.lambda1 == 0.5 && a.lambda2 == 0.5;
            (0..a.m_samples as u64)
                .into_par_iter()
                .map(|k| {
                    let mut s = RngStream::new(seed, k);
                    let smp = if recurrence {
                        sample_jue_halfhalf(a.n, &mut s)?
                    } else {
                        sample_jue_metropolis(&p, a.sweeps, &mut s)?
                    };
                    if let Some(w) = &smp.warning {
                        eprintln!("sample {k}: {w}");
                    }
                    let mut row = serde_json::Map::new();
                    row.insert("sample".into(), json!(k));
                    row.insert("provenance".into(), json!(format!("{:?}", smp.provenance).to_lowercase()));
                    for (i, x) in smp.points.iter().enumerate() {
                        row.insert(format!("x{}", i + 1), json!(x));
                    }
                    Ok(Value::Object(row))
                })
                .collect::<anyhow::Result<Vec<_>>>()?
                .into()
        }
        Command::Validate(a) => {
            let ids: Vec<u8> = if a.criteria.is_empty() { (1..=CRITERIA).collect() } else { a.criteria.clone() };
            let mut rows = Vec::new();
            let mut ok = true;
            for id in ids {
                if id == 0 || id > CRITERIA {
                    bail!("no criterion {id} (valid: 1..={CRITERIA})");
                }
                let o = run_criterion(id, seed);
                eprintln!("{}", o.line());
                ok &= o.passed;
                rows.push(json!({"id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail}));
            }
            Outcome { rows, ok }
        }
    })
}

fn config(cli: &Cli) -> anyhow::Result<Value> {
    let mut v = serde_json::to_value(&cli.command)?;
    let m = v.as_object_mut().context("config is not an object")?;
    m.insert("seed".into(), json!(cli.seed));
    m.insert("format".into(), json!(cli.format));
    Ok(v)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn real_main(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.get())
            .build_global()
            .context("building the worker pool")?;
    }
    let outcome = run(&cli.command, cli.seed)?;
    let doc = Document::new(config(cli)?, outcome.rows, cli.seed);
    emit(&doc.render(cli.format)?, cli.out.as_deref())?;
    Ok(outcome.ok)
}
