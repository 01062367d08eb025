//! Command-line front end: `solve`, `sweep`, `spectrum`, `pscheck`, `apxa`, `census`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver error, 4 inconclusive
//! certification. Failures print an error JSON on stderr and, when the output
//! directory is usable, write it to `error.json` too.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::asymptotics::{apxa_expansion, extrapolate_ratio, limit_constant, sweep, SweepOptions, SweepRow};
use crate::cache::{cache_key, ProfileCache};
use crate::domain::functionals::{talenti_grad_sq, talenti_grid};
use crate::domain::{functionals, FunctionalReport, ProblemParams, RadialProfile};
use crate::error::{Error, Result};
use crate::pucci_serrin::{check_condition, ScanSpec, Verdict};
use crate::radial_ode::{ground_state_census, shoot, ShootOptions, ShootingResult};
use crate::rescale::rescale;
use crate::spectral::{
    critical_linearization, linearize, linearize_rescaled, match_eigenfunction, spectrum_near_zero, KernelMatch,
    OperatorOptions, RESIDUAL_TOL,
};
pub use config::RunConfig;
use output::{num, write_json, Csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

/// Header of `sweep.csv`.
pub const SWEEP_HEADER: [&str; 10] = [
    "omega",
    "m_star",
    "alpha",
    "beta",
    "beta_over_alpha",
    "h1dot_dist",
    "l2_dist",
    "decay_sup",
    "exp_tail_ok",
    "errors",
];

#[derive(Debug, Parser)]
#[command(name = "groundstate", version, about = "Radial ground states of -Δu + ωu = u^p + u^((d+2)/(d-2))")]
pub struct Cli {
    /// TOML run configuration; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Profile cache directory (default `<out>/cache`).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Problem {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct Tol {
    #[arg(long)]
    pub bisection_tol: Option<f64>,
    #[arg(long)]
    pub ode_rtol: Option<f64>,
    #[arg(long)]
    pub ode_atol: Option<f64>,
    /// Log-spacing of the stored profile grid.
    #[arg(long)]
    pub log_step: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate the ground state and write its profile and functionals.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        tol: Tol,
    },
    /// Solve over a list of frequencies and tabulate the rescaled quantities.
    Sweep {
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated frequencies.
        #[arg(long, value_delimiter = ',')]
        omegas: Option<Vec<f64>>,
        #[command(flatten)]
        tol: Tol,
    },
    /// Eigenvalues nearest zero of a radial linearized operator.
    Spectrum {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        k: Option<usize>,
        /// `rescaled`, `profile`, `critical` or `subcritical`.
        #[arg(long)]
        operator: Option<String>,
        #[arg(long)]
        intervals: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        eigen_tol: Option<f64>,
        #[command(flatten)]
        tol: Tol,
    },
    /// Check the Pucci–Serrin condition.
    Pscheck {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        per_decade: Option<u32>,
        #[arg(long)]
        phi0: Option<f64>,
    },
    /// Energy expansion of cut-off bubbles.
    Apxa {
        #[command(flatten)]
        problem: Problem,
        /// Comma-separated ε values.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Classify shots over a range of central heights.
    Census {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        m_lo: Option<f64>,
        #[arg(long)]
        m_hi: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        tol: Tol,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::Sweep { .. } => "sweep",
            Command::Spectrum { .. } => "spectrum",
            Command::Pscheck { .. } => "pscheck",
            Command::Apxa { .. } => "apxa",
            Command::Census { .. } => "census",
        }
    }

    /// The flags as a partial configuration.
    fn flags(&self) -> RunConfig {
        let mut c = RunConfig { subcommand: Some(self.name().into()), ..Default::default() };
        let problem = |c: &mut RunConfig, p: &Problem| {
            c.d = p.d;
            c.p = p.p;
            c.omega = p.omega;
        };
        let tol = |c: &mut RunConfig, t: &Tol| {
            c.tolerances.bisection = t.bisection_tol;
            c.tolerances.ode_rtol = t.ode_rtol;
            c.tolerances.ode_atol = t.ode_atol;
            c.tolerances.quadrature = t.log_step;
        };
        match self {
            Command::Solve { problem: pr, tol: t } => {
                problem(&mut c, pr);
                tol(&mut c, t);
            }
            Command::Sweep { d, p, omegas, tol: t } => {
                c.d = *d;
                c.p = *p;
                c.omega_list = omegas.clone();
                tol(&mut c, t);
            }
            Command::Spectrum { problem: pr, k, operator, intervals, radius, eigen_tol, tol: t } => {
                problem(&mut c, pr);
                tol(&mut c, t);
                c.k = *k;
                c.operator = operator.clone();
                c.grid.intervals = *intervals;
                c.grid.radius = *radius;
                c.tolerances.eigen = *eigen_tol;
            }
            Command::Pscheck { problem: pr, per_decade, phi0 } => {
                problem(&mut c, pr);
                c.grid.per_decade = *per_decade;
                c.phi0 = *phi0;
            }
            Command::Apxa { problem: pr, eps } => {
                problem(&mut c, pr);
                c.eps_list = eps.clone();
            }
            Command::Census { problem: pr, m_lo, m_hi, samples, tol: t } => {
                problem(&mut c, pr);
                tol(&mut c, t);
                c.m_lo = *m_lo;
                c.m_hi = *m_hi;
                c.samples = *samples;
            }
        }
        c
    }
}

/// Resolved run: merged configuration plus the output and cache locations.
struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    cache: Option<ProfileCache>,
}

impl Ctx {
    fn shoot_options(&self) -> Result<ShootOptions> {
        let mut o = ShootOptions::default();
        let t = &self.cfg.tolerances;
        let positive = |name: &str, v: Option<f64>| -> Result<Option<f64>> {
            match v {
                Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::Config(format!("{name} must be positive, got {x}"))),
                _ => Ok(v),
            }
        };
        if let Some(x) = positive("bisection", t.bisection)? {
            o.bisection_tol = x;
        }
        if let Some(x) = positive("ode_rtol", t.ode_rtol)? {
            o.shot.control.rtol = x;
        }
        if let Some(x) = positive("ode_atol", t.ode_atol)? {
            o.shot.control.atol = x;
        }
        if let Some(x) = positive("quadrature", t.quadrature)? {
            o.log_step = x;
        }
        Ok(o)
    }

    fn params(&self) -> Result<ProblemParams> {
        ProblemParams::new(self.cfg.require_d()?, self.cfg.require_p()?, self.cfg.require_omega()?)
    }

    fn solve(&self, params: &ProblemParams, opts: &ShootOptions) -> Result<ShootingResult> {
        match &self.cache {
            Some(c) => {
                let (res, hit) = c.get_or_solve(params, opts)?;
                eprintln!("cache {}: {}", if hit { "hit" } else { "miss" }, cache_key(params, opts));
                Ok(res)
            }
            None => shoot(params, opts),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

/// Classification of errors into exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidDimension(_)
        | Error::InvalidParameter(_)
        | Error::InvalidInput(_)
        | Error::DivergentNorm(_)
        | Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

fn report_error(out: Option<&Path>, e: &Error) -> i32 {
    let code = exit_code(e);
    let rep = ErrorReport { error: e.kind(), message: e.to_string(), exit_code: code };
    if let Ok(text) = output::to_json(&rep) {
        eprint!("{text}");
        if let Some(dir) = out {
            if std::fs::create_dir_all(dir).is_ok() {
                let _ = std::fs::write(dir.join("error.json"), text);
            }
        }
    }
    code
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let file = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => return report_error(None, &e),
        },
        None => RunConfig::default(),
    };
    let mut flags = cli.command.flags();
    flags.output = cli.out.clone();
    flags.cache_dir = cli.cache_dir.clone();
    let cfg = file.overridden_by(flags);
    let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from("out"));
    match dispatch(cfg, &out, cli.no_cache) {
        Ok(code) => code,
        Err(e) => report_error(Some(&out), &e),
    }
}

fn dispatch(cfg: RunConfig, out: &Path, no_cache: bool) -> Result<i32> {
    std::fs::create_dir_all(out).map_err(|e| Error::Config(format!("cannot create {}: {e}", out.display())))?;
    let cache = if no_cache {
        None
    } else {
        let dir = cfg.cache_dir.clone().unwrap_or_else(|| out.join("cache"));
        Some(ProfileCache::new(dir)?)
    };
    let ctx = Ctx { cfg, out: out.to_path_buf(), cache };
    match ctx.cfg.subcommand.as_deref() {
        Some("solve") => cmd_solve(&ctx),
        Some("sweep") => cmd_sweep(&ctx),
        Some("spectrum") => cmd_spectrum(&ctx),
        Some("pscheck") => cmd_pscheck(&ctx),
        Some("apxa") => cmd_apxa(&ctx),
        Some("census") => cmd_census(&ctx),
        other => Err(Error::Config(format!("unknown subcommand {other:?}"))),
    }
}

fn print_summary<T: Serialize>(value: &T) -> Result<()> {
    print!("{}", output::to_json(value)?);
    Ok(())
}

#[derive(Serialize)]
struct FunctionalsOut {
    #[serde(flatten)]
    report: FunctionalReport,
    nehari_rel: f64,
    pohozaev_rel: f64,
}

#[derive(Serialize)]
struct SolveSummary {
    params: ProblemParams,
    m_star: f64,
    bracket: (f64, f64),
    ode_residual: f64,
    nodes: usize,
    shots: usize,
    action: f64,
    nehari_rel: f64,
    pohozaev_rel: f64,
    /// `‖∇Φ‖² / ‖∇W‖²`.
    grad_ratio: f64,
    cache_key: String,
}

fn profile_csv(u: &RadialProfile) -> Csv {
    let mut csv = Csv::new(&["r", "u", "u_prime"]);
    for ((r, v), dv) in u.grid().nodes().iter().zip(u.values()).zip(u.derivs()) {
        csv.row(&[num(*r), num(*v), num(*dv)]);
    }
    csv
}

fn cmd_solve(ctx: &Ctx) -> Result<i32> {
    let params = ctx.params()?;
    params.check_existence_range()?;
    let opts = ctx.shoot_options()?;
    let res = ctx.solve(&params, &opts)?;
    let rep = functionals(&res.profile, &params)?;
    let fout = FunctionalsOut { report: rep, nehari_rel: rep.nehari_rel(&params), pohozaev_rel: rep.pohozaev_rel(&params) };
    profile_csv(&res.profile).write(&ctx.path("profile.csv"))?;
    write_json(&ctx.path("functionals.json"), &fout)?;
    let summary = SolveSummary {
        params,
        m_star: res.m_star,
        bracket: res.bracket,
        ode_residual: res.ode_residual,
        nodes: res.profile.grid().len(),
        shots: res.trace.len(),
        action: rep.action,
        nehari_rel: fout.nehari_rel,
        pohozaev_rel: fout.pohozaev_rel,
        grad_ratio: rep.grad_sq / talenti_grad_sq(params.d)?,
        cache_key: cache_key(&params, &opts),
    };
    write_json(&ctx.path("solve.json"), &summary)?;
    print_summary(&summary)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SweepEntry {
    omega: f64,
    row: Option<SweepRow>,
    error: Option<String>,
}

#[derive(Serialize)]
struct SweepOut {
    d: u32,
    p: f64,
    limit_constant: Option<f64>,
    extrapolated_ratio: Option<f64>,
    rows: Vec<SweepEntry>,
}

fn cmd_sweep(ctx: &Ctx) -> Result<i32> {
    let d = ctx.cfg.require_d()?;
    let p = ctx.cfg.require_p()?;
    let omegas = match (&ctx.cfg.omega_list, ctx.cfg.omega) {
        (Some(list), _) if !list.is_empty() => list.clone(),
        (_, Some(w)) => vec![w],
        _ => return Err(Error::Config("missing omega_list".into())),
    };
    for &w in &omegas {
        ProblemParams::new(d, p, w)?.check_existence_range()?;
    }
    let opts = SweepOptions { shoot: ctx.shoot_options()?, cache: ctx.cache.clone() };
    let rows = sweep(d, p, &omegas, &opts)?;
    let mut csv = Csv::new(&SWEEP_HEADER);
    let mut entries = Vec::new();
    for (omega, row) in rows {
        match row {
            Ok(r) => {
                csv.row(&[
                    num(omega),
                    num(r.m_star),
                    num(r.alpha),
                    num(r.beta),
                    num(r.beta_over_alpha),
                    num(r.h1dot_dist),
                    r.l2_dist.map(num).unwrap_or_default(),
                    num(r.decay_sup),
                    r.exp_tail_ok.to_string(),
                    String::new(),
                ]);
                entries.push(SweepEntry { omega, row: Some(r), error: None });
            }
            Err(e) => {
                let mut cells = vec![num(omega)];
                cells.extend((0..8).map(|_| String::new()));
                cells.push(format!("{}: {e}", e.kind()));
                csv.row(&cells);
                entries.push(SweepEntry { omega, row: None, error: Some(e.to_string()) });
            }
        }
    }
    csv.write(&ctx.path("sweep.csv"))?;
    let ok_rows: Vec<SweepRow> = entries.iter().filter_map(|e| e.row.clone()).collect();
    let summary = SweepOut {
        d,
        p,
        limit_constant: limit_constant(d, p).ok(),
        extrapolated_ratio: extrapolate_ratio(&ok_rows),
        rows: entries,
    };
    write_json(&ctx.path("sweep.json"), &summary)?;
    print!("{}", csv.as_str());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SpectrumOut {
    operator: String,
    d: u32,
    p: Option<f64>,
    omega: Option<f64>,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
    residual_tol: f64,
    residual_ok: bool,
    gap: f64,
    negative_count: usize,
    radius: f64,
    intervals: usize,
    refinement_delta: Option<f64>,
    /// Alignment of the eigenfunctions with `ΛW` (critical operator only).
    lambda_w_match: Option<KernelMatch>,
}

fn cmd_spectrum(ctx: &Ctx) -> Result<i32> {
    let kind = ctx.cfg.operator.clone().unwrap_or_else(|| "rescaled".into());
    let k = ctx.cfg.k.unwrap_or(5);
    let d = ctx.cfg.require_d()?;
    let mut oo = if kind == "critical" { OperatorOptions::critical() } else { OperatorOptions::default() };
    if let Some(n) = ctx.cfg.grid.intervals {
        oo.intervals = n;
    }
    if let Some(r) = ctx.cfg.grid.radius {
        oo.radius = Some(r);
    }
    let tol = ctx.cfg.tolerances.eigen.unwrap_or(RESIDUAL_TOL);
    let (op, p, omega) = match kind.as_str() {
        "critical" => (critical_linearization(d, &oo)?, None, None),
        "rescaled" | "profile" => {
            let params = ctx.params()?;
            params.check_existence_range()?;
            let res = ctx.solve(&params, &ctx.shoot_options()?)?;
            let op = if kind == "rescaled" {
                linearize_rescaled(&rescale(&res, &params)?, &oo)?
            } else {
                linearize(&res.profile, &params, &oo)?
            };
            (op, Some(params.p), Some(params.omega))
        }
        "subcritical" => {
            let params = ProblemParams::subcritical_only(d, ctx.cfg.require_p()?, ctx.cfg.require_omega()?)?;
            let res = ctx.solve(&params, &ctx.shoot_options()?)?;
            (linearize(&res.profile, &params, &oo)?, Some(params.p), Some(params.omega))
        }
        other => return Err(Error::Config(format!("unknown operator {other:?}"))),
    };
    let rep = spectrum_near_zero(&op, k)?;
    let lambda_w_match = if kind == "critical" {
        Some(match_eigenfunction(&op, &rep, &RadialProfile::lambda_talenti(talenti_grid(d)?)?)?)
    } else {
        None
    };
    let residual_ok = rep.residuals.iter().all(|r| *r <= tol);
    let mut csv_header = vec!["r".to_string()];
    csv_header.extend((0..rep.eigenfunctions.len()).map(|i| format!("phi_{i}")));
    let hdr: Vec<&str> = csv_header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&hdr);
    for (i, r) in rep.nodes.iter().enumerate() {
        let mut cells = vec![num(*r)];
        cells.extend(rep.eigenfunctions.iter().map(|f| num(f[i])));
        csv.row(&cells);
    }
    csv.write(&ctx.path("eigenfunctions.csv"))?;
    let summary = SpectrumOut {
        operator: kind,
        d,
        p,
        omega,
        eigenvalues: rep.eigenvalues,
        residuals: rep.residuals,
        residual_tol: tol,
        residual_ok,
        gap: rep.gap,
        negative_count: rep.negative_count,
        radius: rep.radius,
        intervals: rep.intervals,
        refinement_delta: rep.refinement_delta,
        lambda_w_match,
    };
    write_json(&ctx.path("spectrum.json"), &summary)?;
    print_summary(&summary)?;
    Ok(if residual_ok { EXIT_OK } else { EXIT_INCONCLUSIVE })
}

fn cmd_pscheck(ctx: &Ctx) -> Result<i32> {
    let mut scan = ScanSpec { phi0: ctx.cfg.phi0, ..Default::default() };
    if let Some(n) = ctx.cfg.grid.per_decade {
        scan.per_decade = n;
    }
    let rep = check_condition(ctx.cfg.require_d()?, ctx.cfg.require_p()?, ctx.cfg.require_omega()?, &scan)?;
    write_json(&ctx.path("pscheck.json"), &rep)?;
    print_summary(&rep)?;
    Ok(if rep.verdict == Verdict::Inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK })
}

fn cmd_apxa(ctx: &Ctx) -> Result<i32> {
    let eps = ctx.cfg.eps_list.clone().unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3, 1e-4]);
    let rep = apxa_expansion(ctx.cfg.require_d()?, ctx.cfg.require_p()?, ctx.cfg.require_omega()?, &eps)?;
    write_json(&ctx.path("apxa.json"), &rep)?;
    print_summary(&rep)?;
    Ok(if rep.inconclusive.is_some() { EXIT_INCONCLUSIVE } else { EXIT_OK })
}

#[derive(Serialize)]
struct CensusSummary {
    params: ProblemParams,
    samples: usize,
    transitions: usize,
    inconclusive: usize,
    least_action_m_star: Option<f64>,
}

fn cmd_census(ctx: &Ctx) -> Result<i32> {
    let params = ctx.params()?;
    let samples = ctx.cfg.samples.unwrap_or(400);
    let census = ground_state_census(
        &params,
        ctx.cfg.m_lo.unwrap_or(1.0),
        ctx.cfg.m_hi.unwrap_or(1e6),
        samples,
        &ctx.shoot_options()?,
    )?;
    write_json(&ctx.path("census.json"), &census)?;
    let summary = CensusSummary {
        params,
        samples,
        transitions: census.transitions(),
        inconclusive: census.inconclusive(),
        least_action_m_star: census.least_action().map(|c| c.m_star),
    };
    print_summary(&summary)?;
    Ok(EXIT_OK)
}
