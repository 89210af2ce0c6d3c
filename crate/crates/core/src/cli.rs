//! Command-line front end. Every setting can come from a `key = value`
//! config file (`#` starts a comment) or from the matching flag; flags win.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid config or
//! domain, 3 divergence of a simulation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::closed_form::{f_map, g_limits, nonconstant_branches, xi_period, Chirality, TravellingWave, WaveBranch};
use crate::error::Error;
use crate::format::num;
use crate::model::ModelParams;
use crate::oracles::{
    identities_check, ode_solve_g, pde_residual, quad_period, DEFAULT_ODE_TOL, DEFAULT_QUAD_TOL,
};
use crate::pde_sim::{evolve, init_from_wave, Perturbation, SimConfig, SimDomain};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "gamma",
    "branch",
    "xi0",
    "chirality",
    "grid",
    "out",
    "tol",
    "probe",
    "gamma_grid",
    "domain",
    "m",
    "lo",
    "hi",
    "n",
    "cfl",
    "t_end",
    "record_every",
    "epsilon",
    "mode",
    "snapshot",
];

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::PoleProximity { .. } => EXIT_CONFIG,
            Error::NoConvergence { .. } => EXIT_VERIFY,
            Error::BlowUp { .. } => EXIT_DIVERGED,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::config(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "sgwave", version, about = "Travelling waves of the damped, driven sine-Gordon equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate `xi,y,F,g,phi` of a wave over a grid of xi.
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        wave: WaveArgs,
        /// `lo:hi:n`, n equally spaced samples including both ends.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Closed-form and quadrature period of the kink array.
    Period {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
    },
    /// Asymptotic values of g and phi.
    Limits {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        wave: WaveArgs,
    },
    /// Run the oracle cross-checks and report the worst residuals.
    Verify {
        #[command(flatten)]
        common: Common,
        /// `lo:hi:n` gamma values for the identity checks.
        #[arg(long, allow_hyphen_values = true)]
        gamma_grid: Option<String>,
        /// Deliberately evaluate the reduced ODE with the wrong sign of gamma.
        #[arg(long, hide = true)]
        corrupt_gamma_sign: bool,
    },
    /// Evolve a sampled wave with the finite-difference solver.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        wave: WaveArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct WaveArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long)]
    branch: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi0: Option<f64>,
    /// `+`/`plus`/`1` or `-`/`minus`/`-1`.
    #[arg(long, allow_hyphen_values = true)]
    chirality: Option<String>,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// `circle` or `segment`.
    #[arg(long)]
    domain: Option<String>,
    /// Winding number (circle length m*period).
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// dt = cfl*dx.
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    record_every: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    mode: Option<u32>,
    /// CSV path for the final field.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Record a blow-up instead of failing with exit code 3.
    #[arg(long)]
    probe: bool,
}

/// Merged view of the config file and the flags.
#[derive(Debug, Default)]
struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut settings = Self::default();
        let Some(path) = path else {
            return Ok(settings);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("{}:{}: expected `key = value`", path.display(), lineno + 1))
            })?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::config(format!(
                    "{}:{}: unknown key `{key}`",
                    path.display(),
                    lineno + 1
                )));
            }
            settings.values.insert(key, value.trim().to_string());
        }
        Ok(settings)
    }

    fn set<T: Display>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.to_string());
        }
    }

    fn set_path(&mut self, key: &str, value: Option<&PathBuf>) {
        self.set(key, value.map(|p| p.display().to_string()));
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::config(format!("invalid value `{raw}` for `{key}`"))),
        }
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&self, key: &str) -> CliResult<T> {
        self.get(key)?
            .ok_or_else(|| CliError::config(format!("missing required setting `{key}`")))
    }

    fn flag(&self, key: &str) -> CliResult<bool> {
        self.get_or(key, false)
    }

    fn tol(&self, default: f64) -> CliResult<f64> {
        let tol = self.get_or("tol", default)?;
        if !(tol > 0.0) {
            return Err(CliError::config(format!("tol must be > 0, got {tol}")));
        }
        Ok(tol)
    }

    fn params(&self) -> CliResult<ModelParams> {
        Ok(ModelParams::new(self.require("alpha")?, self.require("gamma")?)?)
    }

    fn wave(&self) -> CliResult<TravellingWave> {
        // parse the branch name before any numerics
        let branch: WaveBranch = self.require::<String>("branch")?.parse()?;
        let chirality = match self.get::<String>("chirality")? {
            None => Chirality::Plus,
            Some(c) => parse_chirality(&c)?,
        };
        let params = self.params()?;
        Ok(TravellingWave::new(params, branch, self.get_or("xi0", 0.0)?, chirality)?)
    }
}

fn open_output(path: &str) -> CliResult<Box<dyn Write>> {
    let file = File::create(path).map_err(|e| CliError::config(format!("cannot create {path}: {e}")))?;
    Ok(Box::new(BufWriter::new(file)))
}

fn parse_chirality(raw: &str) -> CliResult<Chirality> {
    match raw.trim() {
        "+" | "+1" | "1" | "plus" => Ok(Chirality::Plus),
        "-" | "-1" | "minus" => Ok(Chirality::Minus),
        other => Err(CliError::config(format!("chirality must be + or -, got `{other}`"))),
    }
}

/// Parses `lo:hi:n` into n equally spaced values.
pub fn parse_grid(raw: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = raw.split(':').map(str::trim).collect();
    let bad = || CliError::config(format!("grid must be lo:hi:n, got `{raw}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

/// Writes to `--out` when given, else to `stdout`.
fn emit(settings: &Settings, stdout: &mut dyn Write, body: &str) -> CliResult<()> {
    match settings.get::<String>("out")? {
        Some(path) => {
            let mut out = open_output(&path)?;
            out.write_all(body.as_bytes())?;
            out.flush()?;
        }
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn common_settings(common: &Common) -> CliResult<Settings> {
    let mut s = Settings::load(common.config.as_deref())?;
    s.set_path("out", common.out.as_ref());
    s.set("tol", common.tol);
    Ok(s)
}

fn apply_wave_args(s: &mut Settings, wave: &WaveArgs) {
    s.set("alpha", wave.alpha);
    s.set("gamma", wave.gamma);
    s.set("branch", wave.branch.as_ref());
    s.set("xi0", wave.xi0);
    s.set("chirality", wave.chirality.as_ref());
}

fn cmd_eval(s: &Settings, stdout: &mut dyn Write) -> CliResult<()> {
    let wave = s.wave()?;
    let grid = parse_grid(&s.get_or("grid", "-10:10:201".to_string())?)?;
    let sign = if wave.params().flipped() { -1.0 } else { 1.0 };
    let mut body = String::from("xi,y,F,g,phi\n");
    for xi in grid {
        let y = wave.y(xi);
        let g = wave.g(xi);
        let phi = if wave.branch().is_constant() {
            wave.phi(0.0, 0.0)
        } else {
            g - std::f64::consts::PI
        };
        body.push_str(&format!(
            "{},{},{},{},{}\n",
            num(xi),
            num(y),
            num(f_map(y)),
            num(g),
            num(sign * phi)
        ));
    }
    emit(s, stdout, &body)
}

fn cmd_period(s: &Settings, stdout: &mut dyn Write) -> CliResult<()> {
    let params = s.params()?;
    let closed = xi_period(&params)?;
    let quad = quad_period(&params, s.tol(DEFAULT_QUAD_TOL)?)?;
    let body = format!(
        "closed_form = {}\nquadrature = {}\ndifference = {}\n",
        num(closed),
        num(quad),
        num((closed - quad).abs())
    );
    emit(s, stdout, &body)
}

fn cmd_limits(s: &Settings, stdout: &mut dyn Write) -> CliResult<()> {
    let wave = s.wave()?;
    let (g_lo, g_hi) = g_limits(&wave)?;
    let (phi_lo, phi_hi) = wave.phi_limits()?;
    let body = format!(
        "g_minus_inf = {}\ng_plus_inf = {}\nphi_minus_inf = {}\nphi_plus_inf = {}\n",
        num(g_lo),
        num(g_hi),
        num(phi_lo),
        num(phi_hi)
    );
    emit(s, stdout, &body)
}

/// Running record of verification checks.
#[derive(Default)]
struct Tally {
    lines: Vec<String>,
    checks: usize,
    failures: usize,
    worst: Option<(String, f64, f64)>,
}

impl Tally {
    fn check(&mut self, name: String, residual: f64, tol: f64) {
        self.checks += 1;
        let ok = residual < tol;
        if !ok {
            self.failures += 1;
        }
        let ratio = residual / tol;
        if self.worst.as_ref().map_or(true, |(_, r, t)| ratio > r / t || ratio.is_nan()) {
            self.worst = Some((name.clone(), residual, tol));
        }
        self.lines.push(format!(
            "{name} = {} # tol {} {}",
            num(residual),
            num(tol),
            if ok { "pass" } else { "FAIL" }
        ));
    }
}

/// Sample points of `[lo, hi]` that keep `2h` away from poles of `wave`.
fn pole_free_samples(wave: &TravellingWave, lo: f64, hi: f64, count: usize, clearance: f64) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64)
        .filter(|xi| wave.pole_distance(*xi).map_or(true, |d| d > clearance))
        .collect()
}

fn cmd_verify(s: &Settings, stdout: &mut dyn Write, corrupt: bool) -> CliResult<i32> {
    let gammas = parse_grid(&s.get_or("gamma_grid", "0:1:101".to_string())?)?;
    let mut tally = Tally::default();

    let identity_tol = s.tol(1e-12)?;
    for gamma in &gammas {
        let report = identities_check(*gamma)?;
        let (which, worst) = report.worst();
        tally.check(format!("identity[{}].{which}", num(*gamma)), worst, identity_tol);
    }

    for (alpha, gamma) in [(0.3, 1.01), (1.0, 1.25), (1.0, std::f64::consts::SQRT_2), (2.0, 5.0)] {
        let params = ModelParams::new(alpha, gamma)?;
        let diff = (quad_period(&params, DEFAULT_QUAD_TOL)? - xi_period(&params)?).abs();
        tally.check(format!("period[{alpha},{gamma}]"), diff, 1e-9);
    }

    let sets = [(0.5, 0.0), (0.5, 0.5), (1.0, 1.0), (1.0, 1.5), (0.7, 3.0)];
    for (alpha, gamma) in sets {
        let params = ModelParams::new(alpha, gamma)?;
        let gamma_used = if corrupt { -gamma } else { gamma };
        for branch in nonconstant_branches(&params) {
            let wave = TravellingWave::new(params, branch, 0.0, Chirality::Plus)?;
            let label = format!("{branch}[{alpha},{gamma}]");

            let ode = pole_free_samples(&wave, -20.0, 20.0, 200, 1e-6)
                .into_iter()
                .map(|xi| (alpha * wave.g_prime(xi) - gamma_used + wave.g(xi).sin()).abs())
                .fold(0.0, f64::max);
            tally.check(format!("ode_residual.{label}"), ode, 1e-8);

            let h = 1e-3;
            let mut pde = 0.0f64;
            for xi in pole_free_samples(&wave, -8.0, 8.0, 40, 20.0 * h) {
                pde = pde.max(pde_residual(&wave, xi, 0.0, h)?.abs());
            }
            tally.check(format!("pde_residual.{label}"), pde, 1e-6);

            let span = (0.1, 10.0);
            let solution = ode_solve_g(&params, wave.g(span.0), span, DEFAULT_ODE_TOL)?;
            let oracle = solution
                .xs
                .iter()
                .zip(&solution.ys)
                .map(|(xi, g)| (g - wave.g(*xi)).abs())
                .fold(0.0, f64::max);
            tally.check(format!("ode_oracle.{label}"), oracle, 1e-8);
        }
    }

    let mut body = tally.lines.join("\n");
    body.push('\n');
    let status = if tally.failures == 0 { "pass" } else { "fail" };
    body.push_str(&format!("checks = {}\nfailures = {}\n", tally.checks, tally.failures));
    if let Some((name, residual, tol)) = &tally.worst {
        body.push_str(&format!(
            "worst = {name}\nworst_residual = {}\nworst_tol = {}\n",
            num(*residual),
            num(*tol)
        ));
    }
    body.push_str(&format!("status = {status}\n"));
    emit(s, stdout, &body)?;
    if tally.failures > 0 {
        let (name, residual, _) = tally.worst.expect("a failure implies a worst check");
        log::error!("verification failed; worst offender {name} = {residual:e}");
        return Ok(EXIT_VERIFY);
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(s: &Settings, stdout: &mut dyn Write) -> CliResult<i32> {
    let out: String = s
        .get("out")?
        .ok_or_else(|| CliError::config("simulate needs an output path (--out) for the deviation report"))?;
    let wave = s.wave()?;
    let params = *wave.params();
    let gamma = params.gamma();
    let default_domain = if gamma > 1.0 { "circle" } else { "segment" };
    let n: usize = s.get_or("n", 256)?;
    let domain = match s.get_or("domain", default_domain.to_string())?.as_str() {
        "circle" => SimDomain::Circle {
            winding: s.get_or("m", 1)?,
        },
        "segment" => {
            let default_half = if gamma < 1.0 {
                Some(40.0 * params.alpha() / (1.0 - gamma * gamma).sqrt())
            } else {
                None
            };
            let lo = match (s.get("lo")?, default_half) {
                (Some(v), _) => v,
                (None, Some(h)) => -h,
                (None, None) => return Err(CliError::config("segment needs `lo` when gamma >= 1")),
            };
            let hi = match (s.get("hi")?, default_half) {
                (Some(v), _) => v,
                (None, Some(h)) => h,
                (None, None) => return Err(CliError::config("segment needs `hi` when gamma >= 1")),
            };
            SimDomain::Segment { lo, hi }
        }
        other => return Err(CliError::config(format!("domain must be circle or segment, got `{other}`"))),
    };
    let cfl: f64 = s.get_or("cfl", crate::pde_sim::DEFAULT_CFL_GUARD)?;
    // dt is only known once dx is; build with a placeholder and rebuild
    let probe_state = init_from_wave(&wave, n, domain, 1.0)?;
    let dt = cfl * probe_state.dx;
    let mut state = init_from_wave(&wave, n, domain, dt)?;

    let mut config = SimConfig::new(dt, s.get_or("t_end", 10.0)?);
    config.record_every = s.get_or("record_every", 10)?;
    config.probe = s.flag("probe")?;
    let epsilon: f64 = s.get_or("epsilon", 0.0)?;
    if epsilon != 0.0 {
        config.perturbation = Some(Perturbation {
            amplitude: epsilon,
            mode: s.get_or("mode", 1)?,
        });
    }
    let snapshot: Option<String> = s.get("snapshot")?;
    // open outputs before the run so bad paths fail fast
    let mut report_out = open_output(&out)?;
    let mut snapshot_out = snapshot.as_deref().map(open_output).transpose()?;

    log::info!("simulating {} on {n} points, dt = {dt}, t_end = {}", wave.branch(), config.t_end);
    let report = evolve(&mut state, &params, &config, Some(&wave))?;
    report.write_csv(&mut report_out)?;
    report_out.flush()?;
    if let Some(w) = snapshot_out.as_mut() {
        state.write_csv(&mut *w)?;
        w.flush()?;
    }

    let mut summary = format!(
        "t_final = {}\nmax_deviation = {}\nfinal_deviation = {}\nfinal_winding = {}\n",
        num(state.t),
        num(report.max_deviation()),
        num(report.deviation.last().copied().unwrap_or(f64::NAN)),
        num(report.winding.last().copied().unwrap_or(f64::NAN)),
    );
    if let Some(t) = report.diverged_at {
        summary.push_str(&format!("diverged_at = {}\n", num(t)));
    }
    stdout.write_all(summary.as_bytes())?;
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::Eval { common, wave, grid } => {
            let mut s = common_settings(&common)?;
            apply_wave_args(&mut s, &wave);
            s.set("grid", grid);
            cmd_eval(&s, stdout).map(|_| EXIT_OK)
        }
        Command::Period { common, alpha, gamma } => {
            let mut s = common_settings(&common)?;
            s.set("alpha", alpha);
            s.set("gamma", gamma);
            cmd_period(&s, stdout).map(|_| EXIT_OK)
        }
        Command::Limits { common, wave } => {
            let mut s = common_settings(&common)?;
            apply_wave_args(&mut s, &wave);
            cmd_limits(&s, stdout).map(|_| EXIT_OK)
        }
        Command::Verify {
            common,
            gamma_grid,
            corrupt_gamma_sign,
        } => {
            let mut s = common_settings(&common)?;
            s.set("gamma_grid", gamma_grid);
            cmd_verify(&s, stdout, corrupt_gamma_sign)
        }
        Command::Simulate { common, wave, sim } => {
            let mut s = common_settings(&common)?;
            apply_wave_args(&mut s, &wave);
            s.set("domain", sim.domain);
            s.set("m", sim.m);
            s.set("lo", sim.lo);
            s.set("hi", sim.hi);
            s.set("n", sim.n);
            s.set("cfl", sim.cfl);
            s.set("t_end", sim.t_end);
            s.set("record_every", sim.record_every);
            s.set("epsilon", sim.epsilon);
            s.set("mode", sim.mode);
            s.set_path("snapshot", sim.snapshot.as_ref());
            if sim.probe {
                s.set("probe", Some(true));
            }
            cmd_simulate(&s, stdout)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code. Errors go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

/// Configures logging from `SGW_LOG` (`quiet`, `info` or `debug`; warnings
/// only when unset).
pub fn init_logging() {
    let level = match std::env::var("SGW_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).init();
}
