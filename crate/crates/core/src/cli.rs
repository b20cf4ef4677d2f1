//! Command-line runner: one subcommand per pipeline, CSV/JSON tables and a
//! JSON manifest next to them.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{precondition, Error, Result};
use crate::fokker_planck::{flux_residual, flux_scaled, flux_scaled_quadrature, StationaryDist};
use crate::io::fmt_num;
use crate::special::{airy, AiryValues};
use crate::stochastic::{default_theta_max, FrequencyProfile, HistogramSpec, NoiseSpec, PhaseIntegrator};
use crate::thermo::{self, ThermoPoint};
use crate::transitions::{self, gamma_of_rho};
use crate::wavefunc::{closed_forms, gram_matrix, s_local, FrameState};

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "QRHO_THREADS";

#[derive(Parser, Debug)]
#[command(name = "qrho", version, about = "Fluctuating-frequency oscillator experiments")]
pub struct Cli {
    /// Output directory for tables and the manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Re-run the configuration recorded in a manifest.json.
    #[arg(long, global = true)]
    pub replay: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "parameters", rename_all = "kebab-case")]
pub enum Command {
    /// Stationary density Q̄_s on a θ̄ grid for each (λ, γ).
    StationaryDist(StationaryArgs),
    /// Vacuum-vacuum transition probability over a (λ, ρ) grid.
    VacuumTransition(TransitionArgs),
    /// Ground-level energy, width and entropy over λ₊.
    Thermo(ThermoArgs),
    /// Phase SDE ensemble: long-time θ histogram.
    SdeEnsemble(SdeArgs),
    /// Local S-matrix between an in-frame and the out-channel frame.
    Smatrix(SmatrixArgs),
    /// Runs the invariant suite.
    Selftest(SelftestArgs),
}

/// Grids are comma lists (`0.5,5,50`) or ranges `start:stop:count`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Precondition(format!("cannot parse grid '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let v = match parts.len() {
        1 => s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?,
        3 => {
            let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
            match n {
                0 => return Err(bad()),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        _ => return Err(bad()),
    };
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(v)
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryArgs {
    #[arg(long, default_value = "0.5,5,50", allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub gamma: String,
    #[arg(long, default_value = "-10:10:201", allow_hyphen_values = true)]
    pub theta: String,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionArgs {
    #[arg(long, default_value = "0.3,1,3", allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, default_value = "0:0.9:10", allow_hyphen_values = true)]
    pub rho: String,
    /// Out-channel λ₊ grid; omitted means the wave-function final state.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_plus: Option<String>,
    #[arg(long, default_value_t = transitions::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoArgs {
    #[arg(long, default_value = "0.1,0.3,1,3,10,30,100,300,1000", allow_hyphen_values = true)]
    pub lambda_plus: String,
    #[arg(long, default_value_t = 1.0)]
    pub omega_as: f64,
    /// Boltzmann constant in the chosen units.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Lower cutoff for the divergent vacuum term; omitted means not computed.
    #[arg(long)]
    pub cutoff: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileArg {
    Constant,
    Step,
    SmoothTanh,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdeArgs {
    #[arg(long, value_enum, default_value_t = ProfileArg::Constant)]
    pub profile: ProfileArg,
    #[arg(long, default_value_t = 1.0)]
    pub omega_in: f64,
    /// Defaults to omega_in.
    #[arg(long)]
    pub omega_out: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t_c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub smoothing_scale: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub f0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 2e-3)]
    pub dt: f64,
    /// Defaults to t_c − 20/Ω_in.
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, default_value_t = 60.0, allow_hyphen_values = true)]
    pub t_final: f64,
    #[arg(long, default_value_t = 1000)]
    pub n_traj: usize,
    /// Defaults to 50·max(Ω_in, ε^{1/3}).
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Time after t0 before sampling starts.
    #[arg(long, default_value_t = 20.0)]
    pub burn_in: f64,
    #[arg(long, default_value_t = 48)]
    pub bins: usize,
    #[arg(long, default_value_t = -12.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 12.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 50)]
    pub sample_every: usize,
    /// Number of full trajectories to write out.
    #[arg(long, default_value_t = 0)]
    pub dump: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmatrixArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega_in: f64,
    #[arg(long, default_value_t = 2.0)]
    pub omega_out: f64,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Evaluation time after the step at t = 0.
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Noise strength of the in-frame; 0 uses the exact deterministic frame.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// One table cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Num(x) => write!(f, "{}", fmt_num(*x)),
            Cell::Text(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub stem: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(stem: impl Into<String>, header: &[&'static str]) -> Self {
        Table { stem: stem.into(), header: header.to_vec(), rows: Vec::new() }
    }

    fn push_nums(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| Cell::Num(x)).collect());
    }

    pub fn file_name(&self, format: Format) -> String {
        match format {
            Format::Csv => format!("{}.csv", self.stem),
            Format::Json => format!("{}.json", self.stem),
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&json!({ "columns": self.header, "rows": self.rows }))?;
                s.push('\n');
                s
            }
        })
    }
}

/// What a run produced: tables, human summary lines and the tolerances used.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
    pub tolerances: serde_json::Map<String, Value>,
    /// Set when an invariant check failed (exit status 2).
    pub failed: bool,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::StationaryDist(_) => "stationary-dist",
            Command::VacuumTransition(_) => "vacuum-transition",
            Command::Thermo(_) => "thermo",
            Command::SdeEnsemble(_) => "sde-ensemble",
            Command::Smatrix(_) => "smatrix",
            Command::Selftest(_) => "selftest",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::SdeEnsemble(a) => Some(a.seed),
            Command::Smatrix(a) => Some(a.seed),
            Command::Selftest(a) => Some(a.seed),
            _ => None,
        }
    }

    /// Validates every parameter, then computes.
    pub fn run(&self) -> Result<RunOutput> {
        match self {
            Command::StationaryDist(a) => run_stationary(a),
            Command::VacuumTransition(a) => run_transition(a),
            Command::Thermo(a) => run_thermo(a),
            Command::SdeEnsemble(a) => run_sde(a),
            Command::Smatrix(a) => run_smatrix(a),
            Command::Selftest(a) => run_selftest(a),
        }
    }
}

fn tol(pairs: &[(&str, f64)]) -> serde_json::Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), json!(v))).collect()
}

fn run_stationary(a: &StationaryArgs) -> Result<RunOutput> {
    let (lambdas, gammas, theta) = (parse_grid(&a.lambda)?, parse_grid(&a.gamma)?, parse_grid(&a.theta)?);
    let pairs: Vec<(f64, f64)> = lambdas.iter().flat_map(|&l| gammas.iter().map(move |&g| (l, g))).collect();
    for &(l, _) in &pairs {
        if !(l > 0.0) {
            return precondition(format!("lambda = {l} must be positive"));
        }
    }
    let dists: Vec<Result<(StationaryDist, f64, (f64, f64))>> = pairs
        .par_iter()
        .map(|&(l, g)| {
            let d = StationaryDist::new(l, g, &theta)?;
            let n = d.normalization()?;
            let split = d.split_mass()?;
            Ok((d, n, split))
        })
        .collect();
    let mut out = RunOutput { tolerances: tol(&[("quadrature_relative", 1e-10), ("density_relative", 1e-12)]), ..Default::default() };
    let mut summary = Table::new("stationary_summary", &["lambda", "gamma", "j0f", "normalization", "mass_negative", "mass_positive"]);
    for r in dists {
        let (d, n, (neg, pos)) = r?;
        let stem = d.file_name().trim_end_matches(".csv").to_string();
        let mut t = Table::new(stem, &["theta_bar", "q_s"]);
        for &(x, q) in &d.grid {
            t.push_nums(&[x, q]);
        }
        out.tables.push(t);
        summary.push_nums(&[d.lambda, d.gamma, d.j0f_scaled, n, neg, pos]);
        out.summary.push(format!(
            "lambda={} gamma={}: J0f={:.10e} norm={:.12} P(theta<0)={:.6}",
            d.lambda, d.gamma, d.j0f_scaled, n, neg
        ));
    }
    out.tables.push(summary);
    Ok(out)
}

fn run_transition(a: &TransitionArgs) -> Result<RunOutput> {
    let (lambdas, rhos) = (parse_grid(&a.lambda)?, parse_grid(&a.rho)?);
    let plus = a.lambda_plus.as_deref().map(parse_grid).transpose()?;
    if !(a.tolerance > 0.0 && a.tolerance < 1.0) {
        return precondition("tolerance must lie in (0, 1)");
    }
    for &l in lambdas.iter().chain(plus.iter().flatten()) {
        if !(l > 0.0 && l.is_finite()) {
            return precondition(format!("lambda = {l} must be positive and finite"));
        }
    }
    for &r in &rhos {
        gamma_of_rho(r)?;
    }
    let mut out = RunOutput { tolerances: tol(&[("quadrature_relative", a.tolerance)]), ..Default::default() };
    match plus {
        None => {
            let pts: Vec<(f64, f64)> = lambdas.iter().flat_map(|&l| rhos.iter().map(move |&r| (l, r))).collect();
            let res: Vec<_> = pts.par_iter().map(|&(l, r)| transitions::delta_00_simplified_with(l, r, a.tolerance)).collect();
            let mut t = Table::new("vacuum_transition", &["rho", "lambda", "delta"]);
            for r in res {
                let r = r?;
                t.push_nums(&[r.rho, r.lambda, r.delta]);
            }
            out.summary.push(format!("{} points (final state: wave function)", t.rows.len()));
            out.tables.push(t);
        }
        Some(plus) => {
            let mut pts = Vec::new();
            for &l in &lambdas {
                for &p in &plus {
                    pts.extend(rhos.iter().map(|&r| (l, p, r)));
                }
            }
            let res: Vec<_> = pts.par_iter().map(|&(l, p, r)| transitions::delta_00_with(l, p, r, a.tolerance)).collect();
            let mut t = Table::new("vacuum_transition", &["rho", "lambda", "lambda_plus", "delta"]);
            for r in res {
                let r = r?;
                t.push_nums(&[r.rho, r.lambda, r.lambda_plus.unwrap_or(f64::INFINITY), r.delta]);
            }
            out.summary.push(format!("{} points (two-sided)", t.rows.len()));
            out.tables.push(t);
        }
    }
    Ok(out)
}

fn run_thermo(a: &ThermoArgs) -> Result<RunOutput> {
    let lps = parse_grid(&a.lambda_plus)?;
    for &l in &lps {
        if !(l > 0.0) {
            return precondition(format!("lambda_plus = {l} must be positive"));
        }
    }
    if !(a.omega_as > 0.0 && a.k > 0.0) {
        return precondition("omega_as and k must be positive");
    }
    if let Some(c) = a.cutoff {
        if !(c > 0.0) {
            return precondition("cutoff must be positive");
        }
    }
    let res: Vec<Result<(ThermoPoint, thermo::GroundEnergy)>> = lps
        .par_iter()
        .map(|&l| Ok((ThermoPoint::new(l, a.omega_as, a.k)?, thermo::ground_energy(l, a.omega_as, a.cutoff)?)))
        .collect();
    let mut fig = Table::new("thermo", &["lambda_plus", "e_osc", "width", "entropy"]);
    let mut levels = match a.cutoff {
        Some(_) => Table::new("thermo_levels", &["lambda_plus", "beta_plus", "decay_time", "vacuum_term"]),
        None => Table::new("thermo_levels", &["lambda_plus", "beta_plus", "decay_time"]),
    };
    for r in res {
        let (p, g) = r?;
        fig.push_nums(&[p.lambda_plus, p.e_osc, p.level_width, p.entropy]);
        let mut row = vec![p.lambda_plus, p.beta_plus, g.decay_time];
        row.extend(g.vacuum_term);
        levels.push_nums(&row);
    }
    let mut out = RunOutput { tolerances: tol(&[("a_p_quadrature_relative", 1e-12)]), ..Default::default() };
    out.summary.push(format!("{} lambda_plus points", fig.rows.len()));
    out.tables.push(fig);
    out.tables.push(levels);
    Ok(out)
}

fn profile_of(a: &SdeArgs) -> Result<FrequencyProfile> {
    let wo = a.omega_out.unwrap_or(a.omega_in);
    match a.profile {
        ProfileArg::Constant => {
            if wo != a.omega_in {
                return precondition("constant profile needs omega_out == omega_in");
            }
            FrequencyProfile::constant(a.omega_in, a.f0)
        }
        ProfileArg::Step => FrequencyProfile::step(a.omega_in, wo, a.t_c, a.f0),
        ProfileArg::SmoothTanh => FrequencyProfile::smooth_tanh(a.omega_in, wo, a.t_c, a.smoothing_scale, a.f0),
    }
}

fn run_sde(a: &SdeArgs) -> Result<RunOutput> {
    let profile = profile_of(a)?;
    let t0 = a.t0.unwrap_or_else(|| profile.default_t0());
    let theta_max = a.theta_max.unwrap_or_else(|| default_theta_max(a.omega_in, a.epsilon));
    let integ = PhaseIntegrator::new(profile, t0, a.t_final, a.dt, theta_max)?;
    let noise = NoiseSpec::new(a.epsilon, a.seed, 0)?;
    if a.n_traj == 0 {
        return precondition("n_traj must be >= 1");
    }
    if !(a.burn_in >= 0.0 && t0 + a.burn_in < a.t_final) {
        return precondition("burn_in must leave a nonempty sampling window");
    }
    let spec = HistogramSpec {
        lo: a.lo,
        hi: a.hi,
        bins: a.bins,
        sample_from: t0 + a.burn_in,
        sample_every: a.sample_every,
        windows: 10,
    };
    let stats = integ.theta_statistics(&noise, a.n_traj, &spec)?;
    let dens = stats.density();
    let mut out = RunOutput { tolerances: tol(&[("stability_theta_dt", 1.0)]), ..Default::default() };
    // Stationary reference for a constant channel: θ̄ = θ/ε^{1/3}, λγ = U₀/ε^{2/3}.
    let reference = (a.profile == ProfileArg::Constant && a.epsilon > 0.0).then(|| {
        let e3 = a.epsilon.cbrt();
        let lambda = a.omega_in * a.omega_in / (e3 * e3);
        let gamma = profile.u0(0.0) / (a.omega_in * a.omega_in);
        (e3, StationaryDist { lambda, gamma, j0f_scaled: flux_scaled(lambda * gamma).unwrap_or(f64::NAN), grid: Vec::new() })
    });
    let mut hist = match reference {
        Some(_) => Table::new("sde_histogram", &["theta", "density_sde", "density_fp"]),
        None => Table::new("sde_histogram", &["theta", "density_sde"]),
    };
    for (i, &d) in dens.iter().enumerate() {
        let c = stats.bin_center(i);
        match &reference {
            Some((e3, q)) => {
                let w = stats.bin_width();
                let m = q.mass((c - 0.5 * w) / e3, (c + 0.5 * w) / e3)?;
                hist.push_nums(&[c, d, m / w]);
            }
            None => hist.push_nums(&[c, d]),
        }
    }
    let mut summary = Table::new("sde_summary", &["quantity", "value"]);
    let mut note = |k: &str, v: f64| summary.rows.push(vec![Cell::Text(k.into()), Cell::Num(v)]);
    note("trajectories", stats.trajectories as f64);
    note("samples", stats.samples as f64);
    note("mean_theta", stats.mean_theta());
    note("positive_fraction", stats.positive_fraction());
    note("reinjections", stats.reinjection_windows.iter().sum::<u64>() as f64);
    if let Some((e3, q)) = &reference {
        let l1 = stats.l1_distance(|x, y| q.mass(x / e3, y / e3))?;
        note("l1_vs_stationary", l1);
        out.summary.push(format!("L1 distance to the stationary density: {l1:.4}"));
    }
    out.summary.push(format!(
        "{} trajectories, {} samples, mean theta {:.6}",
        stats.trajectories,
        stats.samples,
        stats.mean_theta()
    ));
    out.tables.push(hist);
    out.tables.push(summary);
    if a.dump > 0 {
        let traj = integ.with_stride(a.sample_every).ensemble(&noise, a.dump)?;
        for tr in traj {
            let mut t = Table::new(format!("trajectory_{}", tr.stream_id), &["t", "theta", "phi", "sigma", "r", "tau"]);
            for k in 0..tr.len() {
                t.push_nums(&[tr.time_grid[k], tr.phase[k].theta, tr.phase[k].phi, tr.sigma[k], tr.r[k], tr.tau[k]]);
            }
            out.tables.push(t);
        }
    }
    Ok(out)
}

fn smatrix_in_frame(a: &SmatrixArgs) -> Result<FrameState> {
    if a.epsilon == 0.0 {
        return FrameState::after_sudden_step(a.omega_in, a.omega_out, a.t);
    }
    let profile = FrequencyProfile::step(a.omega_in, a.omega_out, 0.0, 0.0)?;
    if !(a.t > 0.0) {
        return precondition("a noisy in-frame needs t > 0");
    }
    let integ = PhaseIntegrator::new(profile, -a.dt, a.t, a.dt, default_theta_max(a.omega_in, a.epsilon))?;
    // Starts in the in-vacuum just before the step. The first stream at or after `stream` whose θ stays regular up to t.
    for stream in a.stream..a.stream + 64 {
        let tr = integ.run(&NoiseSpec::new(a.epsilon, a.seed, stream)?)?;
        if tr.regular_until(a.t) {
            return FrameState::from_trajectory(&tr, tr.len() - 1);
        }
    }
    Err(Error::Domain("no regular in-frame among 64 streams; lower epsilon or t".into()))
}

fn run_smatrix(a: &SmatrixArgs) -> Result<RunOutput> {
    if !(a.omega_in > 0.0 && a.omega_out > 0.0 && a.t >= 0.0) {
        return precondition("smatrix needs positive frequencies and t >= 0");
    }
    let fin = smatrix_in_frame(a)?;
    let fout = FrameState::deterministic(a.omega_out, a.t)?;
    let s = s_local(a.n_max, &fin, &fout)?;
    let mut t = Table::new("smatrix", &["n", "m", "re", "im", "abs2"]);
    for n in 0..=a.n_max {
        for m in 0..=a.n_max {
            let v = s.get(n, m);
            t.rows.push(vec![Cell::Int(n as i64), Cell::Int(m as i64), Cell::Num(v.re), Cell::Num(v.im), Cell::Num(v.norm_sqr())]);
        }
    }
    let k = a.n_max.min(4);
    let worst = (0..=k).flat_map(|n| (0..=k).map(move |m| (n, m))).map(|(n, m)| s.unitarity_defect(a.n_max, n, m)).fold(0.0, f64::max);
    let mut out = RunOutput::default();
    out.summary.push(format!("|S00|^2 = {:.15}", s.vacuum_persistence()));
    out.summary.push(format!("parity violation = {:.3e}", s.parity_violation()));
    out.summary.push(format!("unitarity defect (n,m <= {k}, K = {}) = {worst:.3e}", a.n_max));
    out.tables.push(t);
    Ok(out)
}

/// A named invariant with its measured value and bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

/// The invariant suite run by `selftest`.
pub fn selftest_checks(seed: u64) -> Result<Vec<Check>> {
    let mut c = Vec::new();
    let mut w = 0.0f64;
    for i in 0..=400 {
        let x = -20.0 + 0.1 * i as f64;
        let AiryValues { ai, ai_prime, bi, bi_prime, .. } = airy(x)?;
        w = w.max((ai * bi_prime - ai_prime * bi - 1.0 / std::f64::consts::PI).abs());
    }
    c.push(Check { name: "airy_wronskian", value: w, tolerance: 1e-10 });

    let mut f = 0.0f64;
    for i in 0..=20 {
        let x = -10.0 + i as f64;
        let (a, b) = (flux_scaled(x)?, flux_scaled_quadrature(x)?);
        f = f.max((a - b).abs() / a);
    }
    c.push(Check { name: "flux_two_routes", value: f, tolerance: 1e-8 });

    let d = StationaryDist::new(1.0, 1.0, &[])?;
    c.push(Check { name: "stationary_normalization", value: (d.normalization()? - 1.0).abs(), tolerance: 1e-6 });
    let mut r = 0.0f64;
    for i in 0..=20 {
        r = r.max(flux_residual(1.0, 1.0, -10.0 + i as f64)?.abs() / d.j0f_scaled);
    }
    c.push(Check { name: "stationary_flux_residual", value: r, tolerance: 1e-6 });

    let frame = FrameState::new(0.7, 0.4, 3.1, 1.3 / 0.49, 3.1 / 1.3, 1.3)?;
    let g = gram_matrix(8, &frame)?;
    let mut gd = 0.0f64;
    for (m, row) in g.iter().enumerate() {
        for (n, v) in row.iter().enumerate() {
            gd = gd.max((v - if m == n { 1.0 } else { 0.0 }).norm());
        }
    }
    c.push(Check { name: "psi_stc_orthonormality", value: gd, tolerance: 1e-10 });

    let other = FrameState::new(1.6, -0.9, -2.0, 0.4 / 2.56, -5.0, 0.4)?;
    let s = s_local(10, &frame, &other)?;
    let cf = closed_forms(&frame, &other)?;
    c.push(Check { name: "smatrix_parity", value: s.parity_violation(), tolerance: 1e-12 });
    c.push(Check { name: "smatrix_s11_s00_cubed", value: (s.get(1, 1) - s.get(0, 0).powu(3)).norm(), tolerance: 1e-10 });
    let closed = [(cf.s00, s.get(0, 0)), (cf.s20, s.get(2, 0)), (cf.s02, s.get(0, 2))];
    c.push(Check {
        name: "smatrix_closed_forms",
        value: closed.iter().map(|(a, b)| (a - b).norm()).fold(0.0, f64::max),
        tolerance: 1e-10,
    });
    let step = s_local(32, &FrameState::after_sudden_step(1.0, 4.0, 0.0)?, &FrameState::deterministic(4.0, 0.0)?)?;
    c.push(Check { name: "sudden_step_persistence", value: (step.vacuum_persistence() - 0.8).abs(), tolerance: 1e-12 });
    let uni = s_local(32, &FrameState::after_sudden_step(1.0, 2.0, 1.0)?, &FrameState::deterministic(2.0, 1.0)?)?;
    let ud = (0..=4).flat_map(|n| (0..=4).map(move |m| (n, m))).map(|(n, m)| uni.unitarity_defect(32, n, m)).fold(0.0, f64::max);
    c.push(Check { name: "smatrix_unitarity_k32", value: ud, tolerance: 1e-6 });

    let mut out_of_range = 0.0f64;
    for l in [0.3, 3.0, 30.0] {
        for rho in [0.0, 0.45, 0.9] {
            let dl = transitions::delta_00_simplified(l, rho)?.delta;
            out_of_range = out_of_range.max((-dl).max(dl - 1.0).max(0.0));
        }
    }
    c.push(Check { name: "delta_in_unit_interval", value: out_of_range, tolerance: 0.0 });

    c.push(Check { name: "e_osc_half_quantum", value: (thermo::e_osc(1e3, 1.0)? / 0.5 - 1.0).abs(), tolerance: 1e-2 });
    let mut er = 0.0f64;
    for lp in [0.3, 3.0, 30.0, 300.0] {
        let b = thermo::beta_plus(lp, 1.0)?;
        let (x, y) = (thermo::ground_entropy(lp, 1.0, 1.0)?, thermo::entropy_airy(b, 1.0)?);
        er = er.max((x - y).abs() / y.abs());
    }
    c.push(Check { name: "entropy_two_routes", value: er, tolerance: 1e-6 });

    // Ensemble results must not depend on the worker count.
    let profile = FrequencyProfile::constant(1.0, 0.0)?;
    let integ = PhaseIntegrator::new(profile, 0.0, 10.0, 2e-3, 50.0)?;
    let spec = HistogramSpec { lo: -6.0, hi: 6.0, bins: 24, sample_from: 2.0, sample_every: 25, windows: 2 };
    let noise = NoiseSpec::new(1.0, seed, 0)?;
    let run = |n: usize| -> Result<_> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::Io(e.to_string()))?;
        pool.install(|| integ.theta_statistics(&noise, 200, &spec))
    };
    let (a, b) = (run(1)?, run(3)?);
    c.push(Check { name: "ensemble_thread_independence", value: if a == b { 0.0 } else { 1.0 }, tolerance: 0.0 });
    Ok(c)
}

fn run_selftest(a: &SelftestArgs) -> Result<RunOutput> {
    let checks = selftest_checks(a.seed)?;
    let mut t = Table::new("selftest", &["check", "value", "tolerance", "pass"]);
    let mut out = RunOutput::default();
    for ch in &checks {
        let pass = ch.passed();
        out.failed |= !pass;
        t.rows.push(vec![Cell::Text(ch.name.into()), Cell::Num(ch.value), Cell::Num(ch.tolerance), Cell::Text(pass.to_string())]);
        out.summary.push(format!("{} {:<32} {:.3e} (<= {:.0e})", if pass { "PASS" } else { "FAIL" }, ch.name, ch.value, ch.tolerance));
    }
    out.tables.push(t);
    Ok(out)
}

/// Run manifest written next to the tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub tolerances: serde_json::Map<String, Value>,
    pub version: String,
    pub format: Format,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn command(&self) -> Result<Command> {
        Ok(serde_json::from_value(json!({ "subcommand": self.subcommand, "parameters": self.parameters }))?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Runs a command and writes its tables plus `manifest.json` into `out_dir`.
pub fn execute(command: &Command, out_dir: &Path, format: Format) -> Result<(RunOutput, Manifest)> {
    let out = command.run()?;
    fs::create_dir_all(out_dir)?;
    let mut outputs = Vec::new();
    for t in &out.tables {
        let name = t.file_name(format);
        fs::write(out_dir.join(&name), t.render(format)?)?;
        outputs.push(name);
    }
    let tagged = serde_json::to_value(command)?;
    let manifest = Manifest {
        subcommand: command.name().to_string(),
        parameters: tagged["parameters"].clone(),
        seed: command.seed(),
        tolerances: out.tolerances.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        format,
        outputs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(out_dir.join("manifest.json"), text)?;
    Ok((out, manifest))
}

/// Applies the thread-count variable to the global pool.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::Precondition(format!("{THREADS_ENV}='{v}' is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match drive(&cli) {
        Ok(failed) => {
            if failed {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn drive(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let (command, format) = match (&cli.replay, &cli.command) {
        (Some(path), None) => {
            let m = Manifest::read(path)?;
            (m.command()?, m.format)
        }
        (None, Some(c)) => (c.clone(), cli.format),
        (Some(_), Some(_)) => return precondition("--replay takes the subcommand from the manifest; do not give one"),
        (None, None) => return precondition("a subcommand or --replay is required"),
    };
    let (out, manifest) = execute(&command, &cli.out, format)?;
    for line in &out.summary {
        println!("{line}");
    }
    println!("wrote {} file(s) and manifest.json to {}", manifest.outputs.len(), cli.out.display());
    Ok(out.failed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5,5,50").unwrap(), vec![0.5, 5.0, 50.0]);
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-2:2:1").unwrap(), vec![-2.0]);
        assert!(parse_grid("1:2").is_err() && parse_grid("a").is_err() && parse_grid("0:1:0").is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let c = Command::Thermo(ThermoArgs { lambda_plus: "1,2".into(), omega_as: 1.0, k: 1.0, cutoff: Some(0.01) });
        let v = serde_json::to_value(&c).unwrap();
        let m = Manifest {
            subcommand: c.name().into(),
            parameters: v["parameters"].clone(),
            seed: None,
            tolerances: Default::default(),
            version: "x".into(),
            format: Format::Csv,
            outputs: vec![],
        };
        assert_eq!(m.command().unwrap(), c);
    }

    #[test]
    fn selftest_passes() {
        let checks = selftest_checks(1).unwrap();
        for c in &checks {
            assert!(c.passed(), "{c:?}");
        }
    }
}
