//! Command-line front end: JSON run configuration, dispatch, CSV/JSON
//! artifacts and a run record next to every output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::coupling::coupling_profile;
use crate::error::{QfcError, Result};
use crate::optimizer::{maximize_ce, sweep_od_seeded, BoundsMode, OptProblem, OptResult};
use crate::point::{Controls, OperatingPoint};
use crate::propagation::{
    conversion_metrics, nonabsorbing_transfer, transfer_matrix, Method, PropagationControls,
};
use crate::qubit::{
    epr_postselect, epr_surface, path_channel, polarization_channel, single_rail_channel, Encoding,
};
use crate::scheme::{build_scheme, AtomicScheme, Band, SchemeOverrides, SCHEME_TABLE_VERSION};
use crate::state::{
    coherent_amplitudes, coherent_dim, convert_state, fidelity, fidelity_curves, output_variances,
    squeezing_r_from_db, ChannelCoeff, DensityMatrix, DensityMatrixJson, InputSpec, DEFAULT_NMAX,
};
use crate::table::{interpolated_controls, Column};

/// Default output directory when neither the config nor this variable is set.
pub const OUTPUT_DIR_ENV: &str = "QFC_OUTPUT_DIR";
const FALLBACK_OUTPUT_DIR: &str = "qfc-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Single-point transfer matrix and efficiencies.
    Ce,
    /// Maximize the down-conversion efficiency at one OD.
    Optimize,
    /// Warm-started optimization along an OD grid.
    Sweep,
    /// Coupling-field profile along the medium.
    Coupling,
    /// Output quadrature variances versus efficiency.
    Variances,
    /// Convert a Fock-basis state; fidelity-versus-efficiency curves.
    Convert,
    /// Single-rail, path or polarization qubit map.
    Qubit,
    /// Post-selected EPR fidelity surface and CHSH value.
    Epr,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

impl TryFrom<String> for GridSpec {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        let (start, stop, step) = match parts.as_slice() {
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("expected start:stop:step, got `{s}`")),
        };
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
            return Err(format!("grid `{s}` needs finite start ≤ stop and step > 0"));
        }
        Ok(Self { start, stop, step })
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        format!("{}:{}:{}", g.start, g.stop, g.step)
    }
}

/// A single optical depth or a grid of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OdSpec {
    Value(f64),
    Grid(GridSpec),
}

impl OdSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OdSpec::Value(v) => vec![*v],
            OdSpec::Grid(g) => g.values(),
        }
    }
}

/// Input state for `variances` and `convert`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InputConfig {
    Fock(usize),
    /// `[re, im]`.
    Coherent(C64),
    SqueezedCoherent {
        alpha: C64,
        /// Squeezing below vacuum, in dB.
        db: f64,
        #[serde(default)]
        phi: f64,
    },
    /// Path to a density-matrix JSON file.
    File(PathBuf),
}

fn default_band() -> Band {
    Band::E1367
}
fn default_bounds() -> BoundsMode {
    BoundsMode::Unbounded
}
fn default_method() -> Method {
    Method::ExactSliced
}
fn default_true() -> bool {
    true
}

/// Everything a run depends on. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_band")]
    pub band: Band,
    #[serde(default)]
    pub od: Option<OdSpec>,
    /// Laser parameters; defaults come from the reference table.
    #[serde(default)]
    pub controls: Option<Controls>,
    /// Atomic-scheme overrides; `band` inside falls back to the run band.
    #[serde(default)]
    pub overrides: Option<SchemeOverrides>,
    #[serde(default = "default_bounds")]
    pub bounds: BoundsMode,
    /// Fock truncation `N_max`.
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Output directory.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub sampler_seed: u64,
    /// Objective evaluations per OD.
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default)]
    pub propagation: PropagationControls,
    /// Worker threads; defaults to the available cores.
    #[serde(default)]
    pub parallelism: Option<usize>,
    /// Efficiency axis for curves and surfaces.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Samples along the medium for `coupling`.
    #[serde(default)]
    pub grid_size: Option<usize>,
    #[serde(default)]
    pub input: Option<InputConfig>,
    /// `|C|²`, or `η_D` for dual-rail qubits.
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub eta_u: Option<f64>,
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub phase_u: f64,
    #[serde(default = "default_true")]
    pub corrected: bool,
    #[serde(default)]
    pub encoding: Option<Encoding>,
    /// Qubit input state; `|+⟩` when absent.
    #[serde(default)]
    pub rho: Option<DensityMatrixJson>,
    /// `[η_A1, η_A2, η_B1, η_B2]`.
    #[serde(default)]
    pub etas: Option<[f64; 4]>,
}

fn config_err(path: &str, msg: impl fmt::Display) -> QfcError {
    QfcError::Config(format!("{path}: {msg}"))
}

impl RunConfig {
    /// Parses and validates, reporting the offending field path.
    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            config_err(if path.is_empty() { "." } else { &path }, e.into_inner())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(s).map_err(|e| config_err(".", e))?;
        Self::from_value(value)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(od) = &self.od {
            if od.values().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(config_err("od", "optical depth must be finite and ≥ 0"));
            }
        }
        match self.command {
            Command::Ce | Command::Optimize | Command::Coupling => match self.od {
                Some(OdSpec::Value(_)) => {}
                Some(OdSpec::Grid(_)) => return Err(config_err("od", "a single value is required")),
                None => return Err(config_err("od", "required")),
            },
            Command::Sweep => {
                if self.od.is_none() {
                    return Err(config_err("od", "required"));
                }
            }
            Command::Convert | Command::Qubit => {
                if self.eta.is_none() {
                    return Err(config_err("eta", "required"));
                }
            }
            _ => {}
        }
        if let Some(c) = &self.controls {
            c.validate().map_err(|e| config_err("controls", e))?;
        }
        for (name, v) in [("eta", self.eta), ("eta_u", self.eta_u)] {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    return Err(config_err(name, "must lie in [0, 1]"));
                }
            }
        }
        if let Some(etas) = self.etas {
            if let Some(k) = etas.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(config_err(&format!("etas[{k}]"), "must lie in [0, 1]"));
            }
        }
        if self.parallelism == Some(0) {
            return Err(config_err("parallelism", "must be ≥ 1"));
        }
        if self.budget == Some(0) {
            return Err(config_err("budget", "must be ≥ 1"));
        }
        if matches!(self.grid_size, Some(n) if n < 2) {
            return Err(config_err("grid_size", "must be ≥ 2"));
        }
        if self.n_max == Some(0) {
            return Err(config_err("n_max", "must be ≥ 1"));
        }
        if let Some(g) = self.grid {
            if matches!(self.command, Command::Variances | Command::Convert | Command::Epr)
                && (g.start < 0.0 || g.stop > 1.0)
            {
                return Err(config_err("grid", "efficiencies must lie in [0, 1]"));
            }
        }
        if self.command == Command::Convert {
            if let Some(InputConfig::SqueezedCoherent { .. }) = self.input {
                return Err(config_err("input", "squeezed inputs are supported by `variances` only"));
            }
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(FALLBACK_OUTPUT_DIR))
    }

    fn scheme(&self) -> Result<AtomicScheme> {
        match &self.overrides {
            None => Ok(build_scheme(self.band)),
            Some(o) => {
                let mut o = o.clone();
                o.band.get_or_insert(self.band);
                o.apply().map_err(|e| config_err("overrides", e))
            }
        }
    }

    fn column(&self) -> Column {
        match self.bounds {
            BoundsMode::Unbounded => Column::Unbounded,
            BoundsMode::Capped => Column::Bounded,
        }
    }

    fn controls_at(&self, od: f64) -> Controls {
        self.controls
            .unwrap_or_else(|| interpolated_controls(self.band, self.column(), od))
    }

    fn single_od(&self) -> f64 {
        match self.od {
            Some(OdSpec::Value(v)) => v,
            _ => unreachable!("validated"),
        }
    }

    fn coeff(&self, eta: f64, phase: f64) -> Result<ChannelCoeff> {
        ChannelCoeff::new(C64::from_polar(eta.sqrt(), phase))
    }
}

/// Config echo, version, timing and result payload of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub artifact_version: String,
    pub started_unix_s: f64,
    pub wall_clock_s: f64,
    /// Library calls reproducing each output.
    pub library_calls: Vec<String>,
    pub outputs: Vec<String>,
    pub result: Value,
}

pub fn artifact_version() -> String {
    format!("diamond-qfc {} / {}", env!("CARGO_PKG_VERSION"), SCHEME_TABLE_VERSION)
}

struct Artifacts {
    dir: PathBuf,
    outputs: Vec<String>,
    calls: Vec<String>,
    result: Map<String, Value>,
}

impl Artifacts {
    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let s = serde_json::to_string_pretty(value)?;
        std::fs::write(self.dir.join(name), s + "\n")?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn call(&mut self, s: impl Into<String>) {
        self.calls.push(s.into());
    }

    fn set(&mut self, key: &str, v: impl Serialize) -> Result<()> {
        self.result.insert(key.to_string(), serde_json::to_value(v)?);
        Ok(())
    }
}

#[derive(Serialize)]
struct OptimizerRow {
    od: f64,
    eta_d: f64,
    eta_u: f64,
    #[serde(rename = "T_d")]
    t_d: f64,
    delta_p: f64,
    delta_c: f64,
    delta: f64,
    omega_c: f64,
    omega_d: f64,
    branch: &'static str,
    method: String,
    evals: usize,
}

impl From<&OptResult> for OptimizerRow {
    fn from(r: &OptResult) -> Self {
        Self {
            od: r.od,
            eta_d: r.eta_d,
            eta_u: r.eta_u,
            t_d: r.t_d,
            delta_p: r.best.delta_p,
            delta_c: r.best.delta_c,
            delta: r.best.delta,
            omega_c: r.best.omega_c,
            omega_d: r.best.omega_d,
            branch: r.branch.symbol(),
            method: r.final_method.to_string(),
            evals: r.evals,
        }
    }
}

/// Outcome of [`run`]: written files and the record.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub record: RunRecord,
    pub summary: Vec<String>,
}

/// Executes one configured run and writes its artifacts.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let threads = config
        .parallelism
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| QfcError::Resource(format!("thread pool: {e}")))?;
    let dir = config.output_dir();
    std::fs::create_dir_all(&dir)?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
    let clock = Instant::now();
    let mut art = Artifacts {
        dir: dir.clone(),
        outputs: Vec::new(),
        calls: Vec::new(),
        result: Map::new(),
    };
    let mut summary = Vec::new();
    pool.install(|| dispatch(config, &mut art, &mut summary))?;
    let record = RunRecord {
        config: config.clone(),
        artifact_version: artifact_version(),
        started_unix_s: started,
        wall_clock_s: clock.elapsed().as_secs_f64(),
        library_calls: art.calls,
        outputs: art.outputs,
        result: Value::Object(art.result),
    };
    let name = format!("{}.run.json", config.command);
    std::fs::write(dir.join(&name), serde_json::to_string_pretty(&record)? + "\n")?;
    Ok(RunOutcome { dir, record, summary })
}

fn dispatch(cfg: &RunConfig, art: &mut Artifacts, out: &mut Vec<String>) -> Result<()> {
    match cfg.command {
        Command::Ce => run_ce(cfg, art, out),
        Command::Optimize | Command::Sweep => run_optimize(cfg, art, out),
        Command::Coupling => run_coupling(cfg, art, out),
        Command::Variances => run_variances(cfg, art, out),
        Command::Convert => run_convert(cfg, art, out),
        Command::Qubit => run_qubit(cfg, art, out),
        Command::Epr => run_epr(cfg, art, out),
    }
}

fn eta_grid(cfg: &RunConfig) -> Vec<f64> {
    cfg.grid
        .unwrap_or(GridSpec {
            start: 0.0,
            stop: 1.0,
            step: 0.05,
        })
        .values()
}

fn run_ce(cfg: &RunConfig, art: &mut Artifacts, out: &mut Vec<String>) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        od: f64,
        eta_d: f64,
        eta_u: f64,
        #[serde(rename = "T_d")]
        t_d: f64,
        #[serde(rename = "T_u")]
        t_u: f64,
        eta_d_nonabsorbing: f64,
        delta_p: f64,
        delta_c: f64,
        delta: f64,
        omega_c: f64,
        omega_d: f64,
        method: String,
    }
    let od = cfg.single_od();
    let c = cfg.controls_at(od);
    let point = OperatingPoint::new(&cfg.scheme()?, od, c)?;
    let t = transfer_matrix(&point, cfg.method, &cfg.propagation)?;
    let m = conversion_metrics(&t);
    let na = conversion_metrics(&nonabsorbing_transfer(&point, cfg.method, &cfg.propagation)?);
    art.csv(
        "ce.csv",
        &[Row {
            od,
            eta_d: m.eta_d,
            eta_u: m.eta_u,
            t_d: m.t_d,
            t_u: m.t_u,
            eta_d_nonabsorbing: na.eta_d,
            delta_p: c.delta_p,
            delta_c: c.delta_c,
            delta: c.delta,
            omega_c: c.omega_c,
            omega_d: c.omega_d,
            method: cfg.method.to_string(),
        }],
    )?;
    art.call("propagation::transfer_matrix(&OperatingPoint::new(&scheme, od, controls), method, &propagation)");
    art.call("propagation::nonabsorbing_transfer(&point, method, &propagation)");
    art.set("transfer_matrix", &t)?;
    art.set("metrics", m)?;
    out.push(format!(
        "OD {od}: T_d = {:.6}, eta_d = {:.6}, T_u = {:.6}, eta_u = {:.6} ({})",
        m.t_d, m.eta_d, m.t_u, m.eta_u, cfg.method
    ));
    Ok(())
}

fn run_optimize(cfg: &RunConfig, art: &mut Artifacts, out: &mut Vec<String>) -> Result<()> {
    let scheme = cfg.scheme()?;
    let mut template = OptProblem::new(&scheme, 0.0, cfg.bounds);
    template.sampler_seed = cfg.sampler_seed;
    template.propagation = cfg.propagation;
    template.final_method = cfg.method;
    if let Some(b) = cfg.budget {
        template.budget = b;
    }
    let grid = cfg.od.expect("validated").values();
    let results = if cfg.command == Command::Optimize {
        let mut p = template.clone();
        p.alpha = grid[0];
        p.seeds.push(cfg.controls_at(grid[0]));
        vec![maximize_ce(&p)?]
    } else {
        sweep_od_seeded(&template, &grid, |od| vec![cfg.controls_at(od)])?
    };
    let rows: Vec<OptimizerRow> = results.iter().map(OptimizerRow::from).collect();
    let name = format!("{}.csv", cfg.command);
    art.csv(&name, &rows)?;
    art.call(if cfg.command == Command::Optimize {
        "optimizer::maximize_ce(&OptProblem { seeds: [controls or table::interpolated_controls(band, column, od)], .. })"
    } else {
        "optimizer::sweep_od_seeded(&template, &grid, |od| [controls or table::interpolated_controls(band, column, od)])"
    });

    if cfg.command == Command::Sweep {
        #[derive(Serialize)]
        struct Overlay {
            od: f64,
            eta_d: f64,
            eta_d_magnus2: f64,
            /// Constant-field model at the absorbing optimum.
            eta_d_nonabsorbing_same_point: f64,
            /// Constant-field model optimized on its own.
            eta_d_nonabsorbing: f64,
        }
        let mut constant = template.clone();
        constant.scheme.alpha_c_ratio = Some(0.0);
        let optima = sweep_od_seeded(&constant, &grid, |od| {
            let own = results.iter().find(|r| r.od == od).map(|r| r.best);
            std::iter::once(cfg.controls_at(od)).chain(own).collect()
        })?;
        let mut overlay = Vec::with_capacity(results.len());
        for (r, n) in results.iter().zip(&optima) {
            let p = r.point(&scheme)?;
            let m2 = transfer_matrix(&p, Method::Magnus2, &cfg.propagation)?;
            let na = nonabsorbing_transfer(&p, cfg.method, &cfg.propagation)?;
            overlay.push(Overlay {
                od: r.od,
                eta_d: r.eta_d,
                eta_d_magnus2: conversion_metrics(&m2).eta_d,
                eta_d_nonabsorbing_same_point: conversion_metrics(&na).eta_d,
                eta_d_nonabsorbing: n.eta_d,
            });
        }
        art.csv("sweep_overlay.csv", &overlay)?;
        art.call("propagation::transfer_matrix(&result.point(&scheme), magnus2, ..) and propagation::nonabsorbing_transfer(..) per sweep row");
        art.call("optimizer::sweep_od_seeded(&template with scheme.alpha_c_ratio = Some(0.0), &grid, |od| [table controls, absorbing optimum])");
        art.set("nonabsorbing_optimizer", &optima)?;
    }
    for r in &results {
        out.push(format!(
            "OD {}: eta_d = {:.4} branch {} ({} evals, {:.1} s){}",
            r.od,
            r.eta_d,
            r.branch.symbol(),
            r.evals,
            r.wall_clock_s,
            if r.warnings.is_empty() { String::new() } else { format!(" warnings {:?}", r.warnings) }
        ));
    }
    art.set("optimizer", &results)?;
    Ok(())
}

fn run_coupling(cfg: &RunConfig, art: &mut Artifacts, out: &mut Vec<String>) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        zeta: f64,
        omega_re: f64,
        omega_im: f64,
        omega_abs: f64,
        intensity: f64,
    }
    let od = cfg.single_od();
    let point = OperatingPoint::new(&cfg.scheme()?, od, cfg.controls_at(od))?;
    let prof = coupling_profile(&point, cfg.grid_size.unwrap_or(101))?;
    let rows: Vec<Row> = (0..prof.zeta.len())
        .map(|k| Row {
            zeta: prof.zeta[k],
            omega_re: prof.omega[k].re,
            omega_im: prof.omega[k].im,
            omega_abs: prof.omega[k].norm(),
            intensity: prof.intensity[k],
        })
        .collect();
    art.csv("coupling.csv", &rows)?;
    art.call("coupling::coupling_profile(&point, grid_size)");
    art.set("field", prof.field)?;
    let last = rows.last().expect("grid_size ≥ 2");
    out.push(format!(
        "|Omega_c|: {:.4} at entry, {:.4} at exit",
        rows[0].omega_abs, last.omega_abs
    ));
    Ok(())
}

fn input_spec(cfg: &RunConfig) -> Result<InputSpec> {
    Ok(match cfg.input.clone().unwrap_or(InputConfig::Fock(1)) {
        InputConfig::Fock(n) => InputSpec::Fock(n),
        InputConfig::Coherent(b) => InputSpec::Coherent(b),
        InputConfig::SqueezedCoherent { alpha, db, phi } => InputSpec::SqueezedCoherent {
            alpha,
            r: squeezing_r_from_db(db),
            phi,
        },
        InputConfig::File(p) => InputSpec::Generic(read_state(&p)?),
    })
}

fn read_state(p: &Path) -> Result<DensityMatrix> {
    DensityMatrix::read_json(p).map_err(|e| config_err("input.file", e))
}

fn run_variances(cfg: &RunConfig, art: &mut Artifacts, out: &mut Vec<String>) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        eta: f64,
        var_x: f64,
        var_y: f64,
    }
    let input = input_spec(cfg)?;
    let mut rows = Vec::new();
    for eta in eta_grid(cfg) {
        let q = output_variances(&input, cfg.coeff(eta, cfg.phase)?, cfg.corrected)?;
        rows.push(Row {
            eta,
            var_x: q.var_x,
            var_y: q.var_y,
        });
    }
    art.csv("variances.csv", &rows)?;
    art.call("state::output_variances(&input, ChannelCoeff::new(√eta·e^{i phase}), corrected) per grid eta");
    if let Some(r) = rows.last() {
        out.push(format!("eta = {}: var_x = {:.6}, var_y = {:.6}", r.eta, r.var_x, r.var_y));
    }
    Ok(())
}

fn run_convert(cfg: &RunConfig, art: &mut Artifacts, out: &mut Vec<String>) -> Result<()> {
    let eta = cfg.eta.expect("validated");
    let coeff = cfg.coeff(eta, cfg.phase)?;
    let base = cfg.n_max.unwrap_or(DEFAULT_NMAX) + 1;
    let (rho, psi) = match cfg.input.clone().unwrap_or(InputConfig::Fock(1)) {
        InputConfig::Fock(q) => {
            let dim = base.max(q + 1);
            let mut psi = vec![C64::new(0.0, 0.0); dim];
            psi[q] = C64::new(1.0, 0.0);
            (DensityMatrix::fock(q, dim)?, Some(psi))
        }
        InputConfig::Coherent(b) => {
            let dim = base.max(coherent_dim(b));
            (DensityMatrix::coherent(b, dim)?, Some(coherent_amplitudes(b, dim).0))
        }
        InputConfig::File(p) => (read_state(&p)?, None),
        InputConfig::SqueezedCoherent { .. } => unreachable!("validated"),
    };
    let converted = convert_state(&rho, coeff, cfg.corrected);
    art.json("convert.json", &converted.to_json())?;
    art.call("state::convert_state(&input, ChannelCoeff::new(√eta·e^{i phase}), corrected)");
    let diag = converted.diagonal();
    let shown: Vec<String> = diag.iter().take(8).map(|p| format!("{p:.6}")).collect();
    out.push(format!("diagonal: [{}{}]", shown.join(", "), if diag.len() > 8 { ", …" } else { "" }));
    if let Some(psi) = psi {
        let f = fidelity(&converted, &psi)?;
        art.set("fidelity", f)?;
        art.call("state::fidelity(&converted, &input_amplitudes)");
        out.push(format!("fidelity with input: {f:.9}"));
    }
    let curves = fidelity_curves(&eta_grid(cfg))?;
    art.csv("fidelity_curves.csv", &curves)?;
    art.call("state::fidelity_curves(&grid)");
    Ok(())
}

fn qubit_rho(cfg: &RunConfig) -> Result<Matrix2<C64>> {
    let rho = match &cfg.rho {
        None => return Ok(Matrix2::from_element(C64::new(0.5, 0.0))),
        Some(j) => DensityMatrix::from_json(j).map_err(|e| config_err("rho", e))?,
    };
    if rho.dim() != 2 {
        return Err(config_err("rho", format!("a qubit state has dimension 2, got {}", rho.dim())));
    }
    Ok(Matrix2::from_fn(|i, j| rho.get(i, j)))
}

fn matrix_entries<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> Vec<[f64; 2]> {
    let mut v = Vec::with_capacity(N * N);
    for i in 0..N {
        for j in 0..N {
            v.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    v
}

fn run_qubit(cfg: &RunConfig, art: &mut Artifacts, out: &mut Vec<String>) -> Result<()> {
    let rho = qubit_rho(cfg)?;
    let cd = cfg.coeff(cfg.eta.expect("validated"), cfg.phase)?;
    let cu = cfg.coeff(cfg.eta_u.unwrap_or(cfg.eta.expect("validated")), cfg.phase_u)?;
    let encoding = cfg.encoding.unwrap_or(Encoding::SingleRail);
    let payload = match encoding {
        Encoding::SingleRail => {
            let r = single_rail_channel(&rho, cd, cfg.corrected);
            art.call("qubit::single_rail_channel(&rho, coeff, corrected)");
            out.push(format!("leakage {:.6}", r.leakage));
            json!({ "encoding": encoding, "logical": matrix_entries(&r.rho), "leakage": r.leakage })
        }
        Encoding::Path | Encoding::Polarization => {
            let r = if encoding == Encoding::Path {
                art.call("qubit::path_channel(&rho, coeff_d, coeff_u, corrected)");
                path_channel(&rho, cd, cu, cfg.corrected)
            } else {
                art.call("qubit::polarization_channel(&rho, coeff_d, coeff_u, corrected)");
                polarization_channel(&rho, cd, cu, cfg.corrected)
            };
            out.push(format!("vacuum {:.6}", r.vacuum));
            json!({
                "encoding": encoding,
                "logical": matrix_entries(&r.logical),
                "vacuum": r.vacuum,
                "two_mode": matrix_entries(&r.two_mode),
            })
        }
    };
    art.json("qubit.json", &payload)?;
    Ok(())
}

fn run_epr(cfg: &RunConfig, art: &mut Artifacts, out: &mut Vec<String>) -> Result<()> {
    let surface = epr_surface(&eta_grid(cfg));
    art.csv("epr_surface.csv", &surface)?;
    art.call("qubit::epr_surface(&grid)");
    let violating = surface.iter().filter(|p| p.s > 2.0).count();
    out.push(format!("{violating} of {} grid points violate S ≤ 2", surface.len()));
    if let Some([a1, a2, b1, b2]) = cfg.etas {
        let r = epr_postselect(a1, a2, b1, b2)?;
        let point = json!({
            "rho_post": matrix_entries(&r.rho_post),
            "p_c": r.p_c,
            "F": r.fidelity,
            "S": r.s,
            "eta_bar_a": r.eta_bar_a,
            "eta_bar_b": r.eta_bar_b,
            "branch": r.branch,
        });
        art.json("epr_point.json", &point)?;
        art.call("qubit::epr_postselect(eta_a1, eta_a2, eta_b1, eta_b2)");
        out.push(format!("F = {:.6}, P_c = {:.6}, S = {:.6}", r.fidelity, r.p_c, r.s));
    }
    Ok(())
}

/// Flags mirror the JSON keys of the run configuration; a flag overrides
/// the same key from `--config`.
#[derive(Debug, Parser)]
#[command(name = "qfc", version, about = "Diamond-type four-wave-mixing frequency conversion toolkit")]
pub struct Cli {
    /// Subcommand; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Band tag: e or c.
    #[arg(long)]
    pub band: Option<String>,
    /// Optical depth, or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub od: Option<String>,
    /// `delta_p,delta_c,delta,omega_c,omega_d` in units of Γ.
    #[arg(long, allow_hyphen_values = true)]
    pub controls: Option<String>,
    /// JSON file of atomic-scheme overrides.
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// unbounded or capped.
    #[arg(long)]
    pub bounds: Option<String>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Output directory (default: $QFC_OUTPUT_DIR, then ./qfc-out).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, alias = "seed")]
    pub sampler_seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// exact-sliced, magnus1 or magnus2.
    #[arg(long)]
    pub method: Option<String>,
    /// Initial slice count of the sliced propagator.
    #[arg(long)]
    pub slices: Option<usize>,
    /// Refinement tolerance of the sliced propagator.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Efficiency axis `start:stop:step`.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Fock input `|n⟩`.
    #[arg(long)]
    pub fock: Option<usize>,
    /// Coherent amplitude `re[,im]` (the displacement when squeezed).
    #[arg(long, allow_hyphen_values = true)]
    pub coherent: Option<String>,
    /// Squeezing in dB below vacuum.
    #[arg(long)]
    pub squeezed_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub squeeze_phase: Option<f64>,
    /// Density-matrix JSON input.
    #[arg(long)]
    pub input_file: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta_u: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phase_u: Option<f64>,
    /// Keep the coefficient phases (no phase shifter).
    #[arg(long)]
    pub uncorrected: bool,
    /// single-rail, path or polarization.
    #[arg(long)]
    pub encoding: Option<String>,
    /// `eta_a1,eta_a2,eta_b1,eta_b2`.
    #[arg(long, allow_hyphen_values = true)]
    pub etas: Option<String>,
}

fn number_list(flag: &str, s: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| config_err(flag, format!("`{s}` is not a comma-separated list of numbers")))?;
    if v.len() != n {
        return Err(config_err(flag, format!("expected {n} numbers, got {}", v.len())));
    }
    Ok(v)
}

impl Cli {
    /// Merges the config file and flags into one JSON object.
    pub fn to_value(&self) -> Result<Value> {
        let mut obj = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| config_err("config", e))?;
                match serde_json::from_str(&text).map_err(|e| config_err("config", e))? {
                    Value::Object(m) => m,
                    _ => return Err(config_err("config", "top level must be an object")),
                }
            }
            None => Map::new(),
        };
        let mut put = |k: &str, v: Value| {
            obj.insert(k.to_string(), v);
        };
        if let Some(c) = self.command {
            put("command", json!(c));
        }
        if let Some(b) = &self.band {
            put("band", json!(b));
        }
        if let Some(od) = &self.od {
            put("od", od.parse::<f64>().map_or_else(|_| json!(od), |v| json!(v)));
        }
        if let Some(c) = &self.controls {
            let v = number_list("controls", c, 5)?;
            put("controls", json!(Controls::from_array([v[0], v[1], v[2], v[3], v[4]])));
        }
        if let Some(p) = &self.overrides {
            let text = std::fs::read_to_string(p).map_err(|e| config_err("overrides", e))?;
            put("overrides", serde_json::from_str(&text).map_err(|e| config_err("overrides", e))?);
        }
        if let Some(b) = &self.bounds {
            put("bounds", json!(b));
        }
        if let Some(n) = self.n_max {
            put("n_max", json!(n));
        }
        if let Some(o) = &self.output {
            put("output", json!(o));
        }
        if let Some(s) = self.sampler_seed {
            put("sampler_seed", json!(s));
        }
        if let Some(b) = self.budget {
            put("budget", json!(b));
        }
        if let Some(m) = &self.method {
            put("method", json!(m));
        }
        if let Some(p) = self.parallelism {
            put("parallelism", json!(p));
        }
        if let Some(g) = &self.grid {
            put("grid", json!(g));
        }
        if let Some(n) = self.grid_size {
            put("grid_size", json!(n));
        }
        if let Some(e) = self.eta {
            put("eta", json!(e));
        }
        if let Some(e) = self.eta_u {
            put("eta_u", json!(e));
        }
        if let Some(p) = self.phase {
            put("phase", json!(p));
        }
        if let Some(p) = self.phase_u {
            put("phase_u", json!(p));
        }
        if self.uncorrected {
            put("corrected", json!(false));
        }
        if let Some(e) = &self.encoding {
            put("encoding", json!(e));
        }
        if let Some(e) = &self.etas {
            put("etas", json!(number_list("etas", e, 4)?));
        }
        let coherent = match &self.coherent {
            Some(s) => {
                let v: Vec<f64> = s
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| config_err("input", format!("bad coherent amplitude `{s}`")))?;
                match v.as_slice() {
                    [re] => Some([*re, 0.0]),
                    [re, im] => Some([*re, *im]),
                    _ => return Err(config_err("input", format!("bad coherent amplitude `{s}`"))),
                }
            }
            None => None,
        };
        let input = match (self.fock, coherent, self.squeezed_db, &self.input_file) {
            (None, None, None, None) => None,
            (Some(n), None, None, None) => Some(json!({ "fock": n })),
            (None, Some(b), None, None) => Some(json!({ "coherent": b })),
            (None, b, Some(db), None) => Some(json!({ "squeezed_coherent": {
                "alpha": b.unwrap_or([0.0, 0.0]),
                "db": db,
                "phi": self.squeeze_phase.unwrap_or(0.0),
            }})),
            (None, None, None, Some(p)) => Some(json!({ "file": p })),
            _ => return Err(config_err("input", "choose one of --fock, --coherent, --squeezed-db, --input-file")),
        };
        if let Some(i) = input {
            put("input", i);
        }
        if self.slices.is_some() || self.tolerance.is_some() {
            let mut prop = obj
                .get("propagation")
                .and_then(|v| v.as_object().cloned())
                .unwrap_or_default();
            if let Some(s) = self.slices {
                prop.insert("slices".into(), json!(s));
            }
            if let Some(t) = self.tolerance {
                prop.insert("tolerance".into(), json!(t));
            }
            obj.insert("propagation".into(), Value::Object(prop));
        }
        Ok(Value::Object(obj))
    }
}

pub fn exit_code(e: &QfcError) -> i32 {
    match e {
        QfcError::Config(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Parses `args`, runs, prints a summary and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = cli.to_value().and_then(RunConfig::from_value).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(o) => {
            for line in &o.summary {
                println!("{line}");
            }
            for f in &o.record.outputs {
                println!("wrote {}", o.dir.join(f).display());
            }
            EXIT_OK
        }
        Err(e) => {
            let kind = if exit_code(&e) == EXIT_CONFIG { "config" } else { "numerical" };
            eprintln!("error [{kind}]: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: Value) -> Result<RunConfig> {
        RunConfig::from_value(v)
    }

    #[test]
    fn grid_parsing() {
        let g = GridSpec::try_from("0:1:0.05".to_string()).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[3], 0.15);
        assert_eq!(v[20], 1.0);
        assert_eq!(GridSpec::try_from("50:250:50".to_string()).unwrap().values(), [50.0, 100.0, 150.0, 200.0, 250.0]);
        assert!(GridSpec::try_from("1:0:0.1".to_string()).is_err());
        assert!(GridSpec::try_from("0:1".to_string()).is_err());
    }

    #[test]
    fn unknown_key_reports_path() {
        let e = cfg(json!({ "command": "ce", "od": 1.0, "propagation": { "slicez": 3 } })).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
        let msg = e.to_string();
        assert!(msg.contains("propagation") && msg.contains("slicez"), "{msg}");
        let e = cfg(json!({ "command": "ce", "od": 1.0, "bogus": 1 })).unwrap_err();
        assert!(e.to_string().contains("bogus"));
    }

    #[test]
    fn value_errors_name_the_field() {
        let e = cfg(json!({ "command": "epr", "etas": [0.5, 0.5, 1.5, 0.5] })).unwrap_err();
        assert!(e.to_string().starts_with("configuration error: etas[2]"), "{e}");
        let e = cfg(json!({ "command": "ce" })).unwrap_err();
        assert!(e.to_string().contains("od: required"));
        let e = cfg(json!({ "command": "ce", "od": 5.0, "band": "x" })).unwrap_err();
        assert!(e.to_string().contains("band"));
    }

    #[test]
    fn ce_at_zero_od_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(json!({
            "command": "ce", "od": 0.0, "output": dir.path(), "parallelism": 1
        }))
        .unwrap();
        let o = run(&c).unwrap();
        let m: crate::propagation::ConversionMetrics =
            serde_json::from_value(o.record.result["metrics"].clone()).unwrap();
        assert_eq!((m.t_d, m.eta_d), (1.0, 0.0));
        let text = std::fs::read_to_string(dir.path().join("ce.csv")).unwrap();
        assert!(text.starts_with("od,eta_d,eta_u,T_d,"));
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for d in [&a, &b] {
            let c = cfg(json!({
                "command": "epr", "grid": "0:1:0.25", "etas": [0.9, 0.9, 0.4, 0.4],
                "output": d.path(),
            }))
            .unwrap();
            run(&c).unwrap();
        }
        for f in ["epr_surface.csv", "epr_point.json"] {
            assert_eq!(
                std::fs::read(a.path().join(f)).unwrap(),
                std::fs::read(b.path().join(f)).unwrap()
            );
        }
        let head = std::fs::read_to_string(a.path().join("epr_surface.csv")).unwrap();
        assert!(head.starts_with("eta_bar_a,eta_bar_b,F,S\n"));
    }

    #[test]
    fn flags_override_config_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"command": "qubit", "eta": 0.5}"#).unwrap();
        let cli = Cli::try_parse_from([
            "qfc", "--config", path.to_str().unwrap(), "--eta", "0.64", "--encoding", "path",
        ])
        .unwrap();
        let c = RunConfig::from_value(cli.to_value().unwrap()).unwrap();
        assert_eq!(c.command, Command::Qubit);
        assert_eq!(c.eta, Some(0.64));
        assert_eq!(c.encoding, Some(Encoding::Path));
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(main_with_args(["qfc", "qubit", "--eta", "0.64", "--output", out]), EXIT_OK);
        assert_eq!(main_with_args(["qfc", "qubit", "--eta", "1.5", "--output", out]), EXIT_CONFIG);
        assert_eq!(main_with_args(["qfc", "qubit", "--etaa", "1"]), EXIT_CONFIG);
        assert_eq!(
            main_with_args(["qfc", "epr", "--etas", "0,0,0,0", "--grid", "0:1:0.5", "--output", out]),
            EXIT_NUMERICAL
        );
    }
}
