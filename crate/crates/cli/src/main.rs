mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gafzero::analysis::ap_norm;
use gafzero::coeffs::CoefficientSequence;
use gafzero::gaf::{sample_gaf_with, EPS_TRUNC};
use gafzero::measure::RadialMeasure;
use gafzero::montecarlo::{
    run_fernique_tail, run_fock_membership_scan, run_gaussian_moment_checks, run_noslepian_check,
    run_noslepian_trend, run_quant2_check, run_quant3_check, run_quant_check, run_slepian_check,
    run_tonelli_check, FockFamily, McReport, Witness,
};
use gafzero::suite::{
    flexible_checks, horowitz_report, jensen_check, mm_checks, run_suite_with, stokes_checks, SuiteOptions,
};
use gafzero::zeros::zero_multiset;
use num_complex::Complex64;
use serde_json::json;

use output::{Document, Format, Payload};
use settings::Settings;

#[derive(Parser)]
#[command(name = "gafzero", version, about = "Gaussian analytic function zero sets, norms and Monte Carlo checks")]
struct Cli {
    /// `key=value` file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one truncated GAF sample.
    Sample(Params),
    /// Zeros of one sample inside the working disk.
    Zeros(Params),
    /// Coefficient norm `∫‖a^(r)‖^p dμ` and the `A^p(μ,s)` norm of one sample.
    Norm(Params),
    /// Monte Carlo check of one inequality.
    Verify {
        #[arg(value_enum)]
        check: VerifyKind,
        #[command(flatten)]
        params: Params,
    },
    /// Deterministic numerical checks.
    Check {
        #[arg(value_enum)]
        check: CheckKind,
        #[command(flatten)]
        params: Params,
    },
    /// The full acceptance battery.
    Suite(Params),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VerifyKind {
    Tonelli,
    Quant,
    Quant2,
    Quant3,
    Noslepian,
    Slepian,
    Moments,
    Fernique,
    FockScan,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckKind {
    Jensen,
    Mm,
    Stokes,
    Flexible,
    Horowitz,
}

#[derive(Args, Default)]
struct Params {
    /// Coefficient descriptor, e.g. `unit`, `geom:rho=0.8`, `fock:p=2,alpha=1`.
    #[arg(long)]
    coeffs: Option<String>,
    /// Measure descriptor, e.g. `disk`, `bergman:alpha=1`, `fock:p=2,alpha=1`.
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    /// Exponent list for `verify fock-scan`, or exponent for `check horowitz`.
    #[arg(long)]
    q: Option<String>,
    /// Working radius.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    index: Option<u64>,
    /// Relative truncation tail.
    #[arg(long)]
    eps: Option<f64>,
    /// Power N in quant2 and the moment checks.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    a0: Option<f64>,
    /// Complex constant, e.g. `-1` or `0.5+1i`.
    #[arg(long, allow_hyphen_values = true)]
    b0: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<String>,
    #[arg(long)]
    rho: Option<f64>,
    /// `pz` or `shifted`.
    #[arg(long)]
    witness: Option<String>,
    /// Dyadic indices for the noslepian trend, or blocks for `check flexible`.
    #[arg(long)]
    j: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Γ offset of the Fock family, or Stokes `b`.
    #[arg(long)]
    b: Option<f64>,
    /// Logarithmic exponent.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    moduli: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Multiplies every suite sample count.
    #[arg(long)]
    sample_scale: Option<f64>,
}

macro_rules! apply_flags {
    ($params:expr, $settings:expr, $($field:ident),*) => {
        $(if let Some(v) = &$params.$field {
            $settings.set(stringify!($field), v);
        })*
    };
}

impl Params {
    fn apply(&self, s: &mut Settings) {
        apply_flags!(
            self, s, coeffs, measure, p, q, s, samples, seed, index, eps, n, a0, b0, beta, shift, rho, witness, j,
            alpha, b, c, t, terms, degree, radius, trials, k, depth, moduli, n_max, sample_scale
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GAFZERO_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("GAFZERO_THREADS={v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    let mut settings = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let (name, payload) = match &cli.command {
        Command::Sample(p) => {
            p.apply(&mut settings);
            ("sample".to_string(), sample(&mut settings)?)
        }
        Command::Zeros(p) => {
            p.apply(&mut settings);
            ("zeros".to_string(), zeros(&mut settings)?)
        }
        Command::Norm(p) => {
            p.apply(&mut settings);
            ("norm".to_string(), norm(&mut settings)?)
        }
        Command::Verify { check, params } => {
            params.apply(&mut settings);
            let name = format!("verify {}", check.to_possible_value().expect("named").get_name());
            (name, Payload::Reports(verify(*check, &mut settings)?))
        }
        Command::Check { check, params } => {
            params.apply(&mut settings);
            let name = format!("check {}", check.to_possible_value().expect("named").get_name());
            (name, Payload::Reports(check_cmd(*check, &mut settings)?))
        }
        Command::Suite(p) => {
            p.apply(&mut settings);
            let opts = SuiteOptions { seed: settings.or("seed", 0)?, sample_scale: settings.or("sample-scale", 1.0)? };
            ("suite".to_string(), Payload::Reports(run_suite_with(&opts)?))
        }
    };
    let format = match cli.format {
        Some(f) => f,
        None => match settings.raw("format") {
            Some(v) => Format::from_str(v, true).map_err(|e| anyhow::anyhow!("format: {e}"))?,
            None => Format::Json,
        },
    };
    let doc = Document { command: name, provenance: settings.into_map(), payload };
    let text = doc.render(format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(doc.all_pass().unwrap_or(true))
}

fn coeffs(s: &mut Settings) -> Result<CoefficientSequence> {
    let spec: String = s.or("coeffs", "unit".to_string())?;
    spec.parse().with_context(|| format!("coefficient descriptor {spec:?}"))
}

fn measure(s: &mut Settings) -> Result<RadialMeasure> {
    let spec: String = s.or("measure", "disk".to_string())?;
    spec.parse().with_context(|| format!("measure descriptor {spec:?}"))
}

fn complex(s: &mut Settings, key: &str, default: &str) -> Result<Complex64> {
    let v: String = s.or(key, default.to_string())?;
    v.parse().map_err(|e| anyhow::anyhow!("invalid complex {v:?} for {key}: {e:?}"))
}

fn sample_of(s: &mut Settings) -> Result<gafzero::gaf::GafSample> {
    let a = coeffs(s)?;
    let radius = s.or("s", 0.9)?;
    let seed = s.or("seed", 0)?;
    let index = s.or("index", 0)?;
    let eps = s.or("eps", EPS_TRUNC)?;
    Ok(sample_gaf_with(&a, radius, seed, index, eps)?)
}

fn sample(s: &mut Settings) -> Result<Payload> {
    let f = sample_of(s)?;
    let rows = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| vec![n.to_string(), c.re.to_string(), c.im.to_string()])
        .collect();
    Ok(Payload::Table { json: serde_json::to_value(&f)?, header: vec!["n", "re", "im"], rows })
}

fn zeros(s: &mut Settings) -> Result<Payload> {
    let f = sample_of(s)?;
    let z = zero_multiset(&f.polynomial(), f.working_radius)?;
    let list: Vec<_> = z
        .zeros
        .iter()
        .map(|(w, m)| json!({ "re": w.re, "im": w.im, "multiplicity": m }))
        .collect();
    let rows = z
        .zeros
        .iter()
        .map(|(w, m)| vec![w.re.to_string(), w.im.to_string(), m.to_string()])
        .collect();
    let json = json!({
        "degree": f.degree,
        "radius": z.radius,
        "certified": z.certified,
        "residual": z.residual,
        "count": z.len(),
        "zeros": list,
    });
    Ok(Payload::Table { json, header: vec!["re", "im", "multiplicity"], rows })
}

fn norm(s: &mut Settings) -> Result<Payload> {
    let a = coeffs(s)?;
    let mu = measure(s)?;
    let p = s.or("p", 2.0)?;
    let f = sample_of(s)?;
    let coeff = a.lp_radial_integral(&mu, p, f.working_radius, &Default::default())?;
    let sample = ap_norm(&f.polynomial(), &mu, p, f.working_radius)?;
    let json = json!({
        "coefficient_integral": coeff,
        "sample_norm": sample,
    });
    let row = |name: &str, r: &gafzero::measure::IntegralResult| {
        vec![name.to_string(), r.value.to_string(), r.abs_error.to_string(), r.diverged.to_string()]
    };
    let rows = vec![row("coefficient_integral", &coeff), row("sample_norm", &sample)];
    Ok(Payload::Table { json, header: vec!["quantity", "value", "abs_error", "diverged"], rows })
}

fn verify(kind: VerifyKind, s: &mut Settings) -> Result<Vec<McReport>> {
    let seed = s.or("seed", 0)?;
    let m = s.or("samples", 10_000usize)?;
    let one = |r: McReport| vec![r];
    Ok(match kind {
        VerifyKind::Slepian => one(run_slepian_check(s.or("rho", 0.5)?, m, seed)?),
        VerifyKind::Moments => {
            let n = s.or("n", 1)?;
            let a0 = s.or("a0", 1.0)?;
            let b0 = complex(s, "b0", "-1")?;
            let beta = s.or("beta", 1.0 / n as f64)?;
            let shift = complex(s, "shift", "1")?;
            run_gaussian_moment_checks(n, a0, b0, beta, shift, m, seed)?
        }
        VerifyKind::FockScan => {
            let p = s.or("p", 2.0)?;
            let family = FockFamily { p, alpha: s.or("alpha", 1.0)?, b: s.get("b")?, log_c: s.get("c")? };
            let qs = s.list_or("q", &[p + 2.0, p])?;
            run_fock_membership_scan(&family, &qs, seed)?
        }
        _ => {
            let a = coeffs(s)?;
            let mu = measure(s)?;
            let p = s.or("p", 2.0)?;
            match kind {
                VerifyKind::Noslepian if s.raw("j").is_some() => {
                    let js: Vec<u32> = s.list("j")?.unwrap_or_default();
                    one(run_noslepian_trend(&a, &mu, p, &js, m, seed)?)
                }
                _ => {
                    let radius = s.or("s", 0.9)?;
                    match kind {
                        VerifyKind::Tonelli => one(run_tonelli_check(&a, &mu, p, radius, m, seed)?),
                        VerifyKind::Quant => {
                            let witness: Witness = s.or("witness", Witness::ZeroPolynomial)?;
                            one(run_quant_check(&a, &mu, p, radius, m, seed, witness)?)
                        }
                        VerifyKind::Quant2 => {
                            let n = s.or("n", 1)?;
                            let b0 = complex(s, "b0", "-1")?;
                            one(run_quant2_check(&a, &mu, p, n, b0, radius, m, seed)?)
                        }
                        VerifyKind::Quant3 => run_quant3_check(&a, &mu, p, radius, m, seed)?,
                        VerifyKind::Noslepian => one(run_noslepian_check(&a, &mu, p, radius, m, seed)?),
                        VerifyKind::Fernique => run_fernique_tail(&a, &mu, p, radius, m, seed)?.reports,
                        VerifyKind::Slepian | VerifyKind::Moments | VerifyKind::FockScan => unreachable!(),
                    }
                }
            }
        }
    })
}

fn check_cmd(kind: CheckKind, s: &mut Settings) -> Result<Vec<McReport>> {
    let seed = s.or("seed", 0)?;
    Ok(match kind {
        CheckKind::Jensen => {
            let degrees = match s.get::<usize>("degree")? {
                Some(0) => bail!("degree must be at least 1"),
                Some(d) => d..=d,
                None => 1..=40,
            };
            let radii = s.list_or("radius", &[0.5, 0.9])?;
            vec![jensen_check(seed, s.or("trials", 100)?, degrees, &radii)?]
        }
        CheckKind::Mm => mm_checks(s.or("depth", 40)?, seed)?,
        CheckKind::Stokes => {
            let ts = s.list_or("t", &[10.0, 100.0, 1000.0])?;
            stokes_checks(s.or("b", 1.0)?, s.or("c", 0.0)?, &ts, s.or("terms", 1_000_000)?, seed)?
        }
        CheckKind::Flexible => {
            let mu = measure(s)?;
            let p = s.or("p", 1.0)?;
            let k = s.or("k", 8)?;
            let js = s.list_or("j", &[2usize, 4])?;
            flexible_checks(&mu, p, k, &js, seed)?
        }
        CheckKind::Horowitz => {
            let moduli = match s.list::<f64>("moduli")? {
                Some(m) => m,
                None => {
                    let f = sample_of(s)?;
                    let z = zero_multiset(&f.polynomial(), f.working_radius)?;
                    let mut m: Vec<f64> = z.expanded().iter().map(|w| w.norm()).collect();
                    m.sort_by(f64::total_cmp);
                    m
                }
            };
            let q = s.or("q", 2.0)?;
            let n_max = s.or("n-max", moduli.len())?;
            vec![horowitz_report(&moduli, q, n_max, seed)?]
        }
    })
}
