//! Command-line front end. Every subcommand is a thin wrapper over library calls.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::FixtureCatalog;
use crate::classes::{
    class_level, class_level_high_alpha, decompose_rho_b, in_c_alpha, in_l_infty, rho_b_moment_bound,
    verify_selfdec_identity, MembershipReport, MomentBound, RhoDecomposition,
};
use crate::config::{RunConfig, CONFIG_ENV};
use crate::error::{LevyError, Result};
use crate::limits::{
    array_from_selfdec, array_variant_with_cn, convergence_report, normalization_null_check, pooled_decay_slope,
    sup_decay_slope, ConvergenceReport, NullRow,
};
use crate::mc::{choose_horizon, compare_cf, simulate_integral, truncation_bound, SimReport, SimSpec};
use crate::polar::{extract_polar, h_function, write_h_csv};
use crate::report::{csv_string, emit, fmt_f64, to_json_string};
use crate::transform::{
    apply_phi, apply_phi_m, beta_identity_check, domain_check, verify_range, BetaIdentity, TransformResult,
};
use crate::triplet::LevyTriplet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "levynest", version, about = "Nested α-selfdecomposability toolkit for infinitely divisible laws")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for all randomness; overrides the config value
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Class membership verdicts L<α>_m, C_α and L<α>_∞
    Classify {
        /// Triplet JSON path or fixture:<name>
        input: String,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 3)]
        max_m: u32,
        /// Also write the sampled h-functions as CSV
        #[arg(long)]
        h_out: Option<PathBuf>,
    },
    /// Apply Φ_α (iterated) and check the range
    Transform {
        input: String,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
    },
    /// Residual law ρ_b of μ̂(z) = μ̂(z/b)^{b^α} ρ̂_b(z)
    Decompose {
        input: String,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        b: f64,
    },
    /// Partial products of the triangular arrays
    LimitDemo {
        input: String,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Use the shifted variant array and run the null normalization check
        #[arg(long)]
        variant: bool,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 5, 10, 20, 50])]
        n_list: Vec<usize>,
    },
    /// Monte Carlo check of the stochastic-integral representation
    Simulate {
        input: String,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        /// Horizon T for α ≥ 0; chosen from the truncation bound when absent
        #[arg(long)]
        truncation: Option<f64>,
    },
    /// Closed-form identities: beta integral, stable eigen-relation, Gaussian contraction
    VerifyIdentities,
    /// Built-in fixtures
    Catalog {
        #[arg(long)]
        list: bool,
        #[arg(long)]
        show: Option<String>,
        /// Write every fixture as <name>.json into this directory
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    result: T,
}

/// Exit code for an error: 1 for mathematical verdicts, 3 for numerical failures, 2 otherwise.
pub fn exit_code(e: &LevyError) -> i32 {
    match e {
        _ if e.is_numerical() => EXIT_NUMERICAL,
        LevyError::Domain(_)
        | LevyError::NotMeanZero(_)
        | LevyError::InfiniteMoment(_)
        | LevyError::NotRepresentable(_) => EXIT_VERDICT,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let mut cfg = RunConfig::load(cli.common.config.as_deref())?;
    if let Some(s) = cli.common.seed {
        cfg.seed = s;
    }
    let out = cli.common.out.as_deref();
    let fmt = cli.common.format;
    match cli.command {
        Command::Classify { input, alpha, max_m, h_out } => {
            let mu = load_input(&input, &cfg)?;
            classify(&mu, alpha, max_m, h_out.as_deref(), &cfg, fmt, out)
        }
        Command::Transform { input, alpha, iterations } => {
            let mu = load_input(&input, &cfg)?;
            transform(&mu, alpha, iterations, &cfg, fmt, out)
        }
        Command::Decompose { input, alpha, b } => {
            let mu = load_input(&input, &cfg)?;
            decompose(&mu, alpha, b, &cfg, fmt, out)
        }
        Command::LimitDemo { input, alpha, variant, n_list } => {
            let mu = load_input(&input, &cfg)?;
            limit_demo(&mu, alpha, variant, &n_list, &cfg, fmt, out)
        }
        Command::Simulate { input, alpha, paths, truncation } => {
            let mu = load_input(&input, &cfg)?;
            simulate(&mu, alpha, paths, truncation, &cfg, fmt, out)
        }
        Command::VerifyIdentities => verify_identities(&cfg, fmt, out),
        Command::Catalog { list, show, export } => catalog(list, show, export.as_deref(), fmt, out),
    }
}

/// Reads a triplet from a JSON file or from `fixture:<name>`.
pub fn load_input(input: &str, cfg: &RunConfig) -> Result<LevyTriplet> {
    let t = match input.strip_prefix("fixture:") {
        Some(name) => FixtureCatalog::standard().get(name)?.clone(),
        None => serde_json::from_str(&std::fs::read_to_string(input)?)?,
    };
    t.validated(cfg)
}

fn write<T: Serialize>(command: &str, cfg: &RunConfig, result: T, out: Option<&Path>) -> Result<()> {
    emit(&to_json_string(&Envelope { command, config: cfg, result })?, out)
}

const REPORT_HEADER: [&str; 6] = ["class", "verdict", "margin", "tolerance", "tested", "note"];

fn report_rows(reports: &[&MembershipReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                r.class.clone(),
                r.verdict.to_string(),
                fmt_f64(r.margin),
                fmt_f64(r.tolerance),
                r.tested.to_string(),
                r.note.clone(),
            ]
        })
        .collect()
}

fn emit_reports(reports: &[&MembershipReport], out: Option<&Path>) -> Result<()> {
    emit(&csv_string(&REPORT_HEADER, &report_rows(reports))?, out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub alpha: f64,
    /// L<α>_m for m = 0..=max_m, or the α ≥ 2 classes.
    pub levels: Vec<MembershipReport>,
    pub c_alpha: Option<MembershipReport>,
    pub l_infty: Option<MembershipReport>,
    pub domain: MembershipReport,
    /// Verdict of the highest requested level.
    pub verdict: bool,
}

pub fn classify_report(mu: &LevyTriplet, alpha: f64, max_m: u32, cfg: &RunConfig) -> Result<ClassifyReport> {
    let levels = if alpha >= 2.0 {
        vec![class_level_high_alpha(mu, alpha)?]
    } else {
        (0..=max_m).map(|m| class_level(mu, alpha, m, cfg)).collect::<Result<Vec<_>>>()?
    };
    let c_alpha = if alpha > 0.0 && alpha < 2.0 { Some(in_c_alpha(mu, alpha)?) } else { None };
    let l_infty = if alpha < 2.0 { Some(in_l_infty(mu, alpha, cfg)?) } else { None };
    let domain = domain_check(mu, alpha, cfg)?;
    let verdict = levels.last().map(|r| r.verdict).unwrap_or(false);
    Ok(ClassifyReport { alpha, levels, c_alpha, l_infty, domain, verdict })
}

fn classify(
    mu: &LevyTriplet,
    alpha: f64,
    max_m: u32,
    h_out: Option<&Path>,
    cfg: &RunConfig,
    fmt: Format,
    out: Option<&Path>,
) -> Result<i32> {
    let rep = classify_report(mu, alpha, max_m, cfg)?;
    if let Some(p) = h_out {
        let pd = extract_polar(&mu.nu, alpha)?;
        let file = std::fs::File::create(p)?;
        write_h_csv(&h_function(&pd), max_m as usize + 1, file)?;
    }
    match fmt {
        Format::Json => write("classify", cfg, &rep, out)?,
        Format::Csv => {
            let mut all: Vec<&MembershipReport> = rep.levels.iter().collect();
            all.extend(rep.c_alpha.iter());
            all.extend(rep.l_infty.iter());
            all.push(&rep.domain);
            emit_reports(&all, out)?;
        }
    }
    Ok(if rep.verdict { EXIT_OK } else { EXIT_VERDICT })
}

fn transform(
    mu: &LevyTriplet,
    alpha: f64,
    iterations: usize,
    cfg: &RunConfig,
    fmt: Format,
    out: Option<&Path>,
) -> Result<i32> {
    let mut res: TransformResult = apply_phi_m(mu, alpha, iterations, cfg)?;
    if res.output.is_some() && alpha < 2.0 {
        res.range_report = verify_range(&res, alpha, cfg)?;
    }
    match fmt {
        Format::Json => write("transform", cfg, &res, out)?,
        Format::Csv => {
            let mut all = vec![&res.domain];
            all.extend(res.range_report.iter());
            emit_reports(&all, out)?;
        }
    }
    if !res.domain_ok {
        eprintln!("outside the domain of Phi_{alpha}: {}", res.domain.note);
        return Ok(EXIT_VERDICT);
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
struct DecomposeReport {
    decomposition: RhoDecomposition,
    /// max_z |C_μ(z) − b^α C_μ(z/b) − C_{ρ_b}(z)| on the z-grid.
    identity_error: f64,
    moment_bound: Option<MomentBound>,
    validity: MembershipReport,
}

fn decompose(mu: &LevyTriplet, alpha: f64, b: f64, cfg: &RunConfig, fmt: Format, out: Option<&Path>) -> Result<i32> {
    let dec = decompose_rho_b(mu, alpha, b, cfg)?;
    let identity_error = verify_selfdec_identity(mu, &dec.rho_b, alpha, b, &cfg.z_grid(mu.d), cfg)?;
    let moment_bound = if alpha > 0.0 && alpha < 2.0 { Some(rho_b_moment_bound(mu, alpha, b, cfg)?) } else { None };
    let validity = MembershipReport::new(
        format!("rho_{b} is a law"),
        dec.valid,
        dec.margin,
        cfg.tol_mono,
        "most negative signed mass of ν_b",
    );
    let rep = DecomposeReport { decomposition: dec, identity_error, moment_bound, validity };
    match fmt {
        Format::Json => write("decompose", cfg, &rep, out)?,
        Format::Csv => {
            let id = MembershipReport::new(
                "selfdec identity",
                identity_error <= cfg.tol_cf,
                identity_error,
                cfg.tol_cf,
                "sup over the z-grid",
            );
            let mut rows = vec![&rep.validity, &id];
            let mb;
            if let Some(m) = &rep.moment_bound {
                mb = MembershipReport::new("rho_b moment bound", m.holds, m.rhs - m.lhs, 1e-10, "rhs − lhs");
                rows.push(&mb);
            }
            emit_reports(&rows, out)?;
        }
    }
    Ok(if rep.decomposition.valid { EXIT_OK } else { EXIT_VERDICT })
}

#[derive(Debug, Clone, Serialize)]
struct LimitReport {
    alpha: f64,
    variant: bool,
    convergence: ConvergenceReport,
    null_rows: Vec<NullRow>,
    pooled_slope: Option<f64>,
    sup_slope: Option<f64>,
}

fn limit_demo(
    mu: &LevyTriplet,
    alpha: f64,
    variant: bool,
    n_list: &[usize],
    cfg: &RunConfig,
    fmt: Format,
    out: Option<&Path>,
) -> Result<i32> {
    let array = if variant { array_variant_with_cn(mu, alpha, cfg)? } else { array_from_selfdec(mu, alpha, cfg)? };
    let zs = cfg.z_grid(mu.d);
    let convergence = convergence_report(&array, mu, &zs, n_list, cfg)?;
    let (null_rows, pooled_slope, sup_slope) = if variant && alpha > 0.0 && alpha < 2.0 {
        let rows = normalization_null_check(mu, alpha, &[10, 100, 1000], &zs, cfg)?;
        let (p, s) = (pooled_decay_slope(&rows), sup_decay_slope(&rows));
        (rows, p, s)
    } else {
        (Vec::new(), None, None)
    };
    let rep = LimitReport { alpha, variant, convergence, null_rows, pooled_slope, sup_slope };
    match fmt {
        Format::Json => write("limit-demo", cfg, &rep, out)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                rep.convergence.rows.iter().map(|r| vec![r.n.to_string(), fmt_f64(r.sup_error)]).collect();
            emit(&csv_string(&["n", "sup_error"], &rows)?, out)?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
struct SimulateReport {
    alpha: f64,
    horizon: f64,
    seed: u64,
    report: SimReport,
    agreement: MembershipReport,
}

fn simulate(
    mu: &LevyTriplet,
    alpha: f64,
    paths: usize,
    truncation: Option<f64>,
    cfg: &RunConfig,
    fmt: Format,
    out: Option<&Path>,
) -> Result<i32> {
    let zs = cfg.z_grid(mu.d);
    let z_max = zs.iter().map(|z| crate::triplet::norm(z)).fold(0.0, f64::max);
    let mut spec = SimSpec { triplet: mu.clone(), horizon: 1.0, n_paths: paths, seed: cfg.seed };
    spec.validate()?;
    spec.horizon = match truncation {
        Some(t) => t,
        None => choose_horizon(&spec, alpha, z_max)?,
    };
    let analytic = apply_phi(mu, alpha, cfg)?;
    if !analytic.domain_ok {
        eprintln!("outside the domain of Phi_{alpha}: {}", analytic.domain.note);
        return Ok(EXIT_VERDICT);
    }
    let samples = simulate_integral(&spec, alpha)?;
    let mut report = compare_cf(&samples, &analytic, &zs, cfg)?;
    if alpha >= 0.0 {
        report.truncation_bound = Some(truncation_bound(&spec, alpha, z_max)?);
    }
    let ok = report.flagged_fraction <= 0.05;
    let agreement = MembershipReport::new(
        "empirical cf agreement",
        ok,
        report.flagged_fraction,
        0.05,
        format!("fraction of z-grid points beyond {}/sqrt(N)", report.level),
    );
    let horizon = spec.effective_horizon(alpha)?;
    let rep = SimulateReport { alpha, horizon, seed: cfg.seed, report, agreement };
    match fmt {
        Format::Json => write("simulate", cfg, &rep, out)?,
        Format::Csv => {
            let r = &rep.report;
            let rows: Vec<Vec<String>> = (0..r.z_grid.len())
                .map(|i| {
                    vec![
                        r.z_grid[i].iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(";"),
                        fmt_f64(r.empirical[i].re),
                        fmt_f64(r.empirical[i].im),
                        fmt_f64(r.analytic[i].re),
                        fmt_f64(r.analytic[i].im),
                        fmt_f64(r.standardized[i]),
                    ]
                })
                .collect();
            emit(
                &csv_string(&["z", "empirical_re", "empirical_im", "analytic_re", "analytic_im", "deviation"], &rows)?,
                out,
            )?;
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_VERDICT })
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub beta: Vec<BetaIdentity>,
    /// One report per α: relative error of the coefficient ratio 1/(β−α) for β = 1.5.
    pub stable_eigen: Vec<MembershipReport>,
    /// One report per (α, m): max entry error of Φ_α^m(A) against A/(2−α)^m.
    pub gaussian: Vec<MembershipReport>,
    pub verdict: bool,
}

pub fn identity_report(cfg: &RunConfig) -> Result<IdentityReport> {
    let beta =
        [1.1, 1.3, 1.5, 1.7, 1.9].iter().map(|b| beta_identity_check(*b, &cfg.quad)).collect::<Result<Vec<_>>>()?;
    let cat = FixtureCatalog::standard();
    let stable = cat.get("stable15_centered")?;
    let mut stable_eigen = Vec::new();
    for alpha in [-1.0, 0.0, 0.5, 1.2] {
        let out = apply_phi(stable, alpha, cfg)?.output.ok_or_else(|| LevyError::Domain("no output".into()))?;
        let c = stable_coefficient(&out, 1.5)?;
        let err = (c * (1.5 - alpha) - 1.0).abs();
        stable_eigen.push(MembershipReport::new(
            format!("stable eigen alpha={alpha}"),
            err <= 1e-10,
            err,
            1e-10,
            "relative error",
        ));
    }
    let g = cat.get("gaussian2d")?;
    let mut gaussian = Vec::new();
    for alpha in [-1.0, 0.0, 0.5] {
        for m in 1..=5usize {
            let out = apply_phi_m(g, alpha, m, cfg)?.output.ok_or_else(|| LevyError::Domain("no output".into()))?;
            let f = (2.0 - alpha).powi(-(m as i32));
            let err =
                out.a.iter().flatten().zip(g.a.iter().flatten()).map(|(x, a)| (x - f * a).abs()).fold(0.0, f64::max);
            gaussian.push(MembershipReport::new(
                format!("gaussian alpha={alpha} m={m}"),
                err <= 1e-12,
                err,
                1e-12,
                "max entry error",
            ));
        }
    }
    let verdict = beta.iter().all(|b| b.abs_err <= 1e-9)
        && stable_eigen.iter().all(|r| r.verdict)
        && gaussian.iter().all(|r| r.verdict);
    Ok(IdentityReport { beta, stable_eigen, gaussian, verdict })
}

/// Coefficient of the stable term with exponent `beta` in a one-component triplet.
pub fn stable_coefficient(t: &LevyTriplet, beta: f64) -> Result<f64> {
    t.nu.components
        .iter()
        .find_map(|c| match &c.radial {
            crate::radial::RadialPart::StableMix { terms } => terms.iter().find(|s| s.beta == beta).map(|s| s.c),
            _ => None,
        })
        .ok_or_else(|| LevyError::NotRepresentable(format!("no stable term with exponent {beta}")))
}

fn verify_identities(cfg: &RunConfig, fmt: Format, out: Option<&Path>) -> Result<i32> {
    let rep = identity_report(cfg)?;
    match fmt {
        Format::Json => write("verify-identities", cfg, &rep, out)?,
        Format::Csv => {
            let beta: Vec<MembershipReport> = rep
                .beta
                .iter()
                .map(|b| {
                    MembershipReport::new(
                        format!("beta identity beta={}", b.beta),
                        b.abs_err <= 1e-9,
                        b.abs_err,
                        1e-9,
                        "absolute error",
                    )
                })
                .collect();
            let all: Vec<&MembershipReport> = beta.iter().chain(&rep.stable_eigen).chain(&rep.gaussian).collect();
            emit_reports(&all, out)?;
        }
    }
    Ok(if rep.verdict { EXIT_OK } else { EXIT_VERDICT })
}

fn catalog(list: bool, show: Option<String>, export: Option<&Path>, fmt: Format, out: Option<&Path>) -> Result<i32> {
    let cat = FixtureCatalog::standard();
    if let Some(dir) = export {
        std::fs::create_dir_all(dir)?;
        for (name, t) in cat.iter() {
            std::fs::write(dir.join(format!("{name}.json")), to_json_string(t)?)?;
        }
    }
    if let Some(name) = show {
        emit(&to_json_string(cat.get(&name)?)?, out)?;
    } else if list || export.is_none() {
        let text = match fmt {
            Format::Json => to_json_string(&cat.names())?,
            Format::Csv => csv_string(&["name"], &cat.names().iter().map(|n| vec![n.to_string()]).collect::<Vec<_>>())?,
        };
        emit(&text, out)?;
    }
    Ok(EXIT_OK)
}
