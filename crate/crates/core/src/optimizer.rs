//! Maximization of the down-conversion efficiency over the five controls.
//!
//! Multi-start Nelder–Mead from user seeds plus Latin-hypercube restarts.
//! Candidates are scored with a cheap propagator during the search, then
//! polished and re-scored with the sliced reference.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QfcError, Result};
use crate::point::{Controls, OperatingPoint};
use crate::propagation::{conversion_metrics, transfer_matrix, Method, PropagationControls};
use crate::scheme::AtomicScheme;

/// Cap applied in the nominally unbounded mode, units of Γ.
pub const UNBOUNDED_CAP: f64 = 1e3;
/// Cap of the restricted scan, units of Γ.
pub const CAPPED_LIMIT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundsMode {
    Unbounded,
    #[serde(alias = "capped50")]
    Capped,
}

impl BoundsMode {
    pub fn limit(self) -> f64 {
        match self {
            BoundsMode::Unbounded => UNBOUNDED_CAP,
            BoundsMode::Capped => CAPPED_LIMIT,
        }
    }

    /// Projects controls onto the feasible box.
    pub fn clamp(self, c: Controls) -> Controls {
        let l = self.limit();
        let v = c.to_array();
        Controls::from_array(std::array::from_fn(|k| {
            if k < 3 {
                v[k].clamp(-l, l)
            } else {
                v[k].clamp(0.0, l)
            }
        }))
    }

    pub fn contains(self, c: &Controls) -> bool {
        self.clamp(*c) == *c
    }
}

impl std::str::FromStr for BoundsMode {
    type Err = QfcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unbounded" => Ok(BoundsMode::Unbounded),
            "capped" | "capped50" => Ok(BoundsMode::Capped),
            other => Err(QfcError::Config(format!("unknown bounds mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for BoundsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundsMode::Unbounded => "unbounded",
            BoundsMode::Capped => "capped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptProblem {
    pub scheme: AtomicScheme,
    pub alpha: f64,
    pub bounds: BoundsMode,
    pub seeds: Vec<Controls>,
    /// Total objective evaluations across all starts, polish included.
    pub budget: usize,
    /// Latin-hypercube restarts added to the seeds.
    pub restarts: usize,
    pub sampler_seed: u64,
    pub search_method: Method,
    pub final_method: Method,
    /// Evaluations of the final method spent refining the best point.
    pub polish_budget: usize,
    pub propagation: PropagationControls,
    /// Simplex collapse tolerance on the parameters, units of Γ.
    pub xtol: f64,
    /// Objective spread tolerance.
    pub ftol: f64,
}

impl OptProblem {
    pub fn new(scheme: &AtomicScheme, alpha: f64, bounds: BoundsMode) -> Self {
        Self {
            scheme: scheme.clone(),
            alpha,
            bounds,
            seeds: Vec::new(),
            budget: 20_000,
            restarts: 8,
            sampler_seed: 0,
            search_method: Method::Magnus2,
            final_method: Method::ExactSliced,
            polish_budget: 300,
            propagation: PropagationControls::default(),
            xtol: 1e-3,
            ftol: 1e-9,
        }
    }

    pub fn with_seeds(mut self, seeds: Vec<Controls>) -> Self {
        self.seeds = seeds;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(QfcError::Config("optimizer budget must be ≥ 1".into()));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(QfcError::Domain(format!("optical depth must be ≥ 0, got {}", self.alpha)));
        }
        for s in &self.seeds {
            s.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Seed,
    WarmStart,
    LatinHypercube,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: StartKind,
    pub start: Controls,
    pub best: Controls,
    /// Objective under the search method.
    pub eta_d: f64,
    pub evals: usize,
    /// Best objective after each simplex restart.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptWarning {
    /// Objective is identically zero (no medium).
    DegenerateObjective,
    /// No start improved on its initial point.
    NoImprovement,
    /// At least one start stopped on its evaluation share.
    BudgetExhausted,
}

/// Sign branch of the detunings, keyed on `Δp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub fn of(c: &Controls) -> Self {
        if c.delta_p >= 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchScore {
    pub branch: Branch,
    pub controls: Controls,
    pub eta_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub od: f64,
    pub bounds: BoundsMode,
    pub best: Controls,
    /// Under the final method.
    pub eta_d: f64,
    pub eta_u: f64,
    pub t_d: f64,
    /// Best objective seen under the search method.
    pub eta_d_search: f64,
    pub branch: Branch,
    /// Both sign branches scored with the final method.
    pub branches: Vec<BranchScore>,
    pub trajectories: Vec<Trajectory>,
    /// OD whose optimum seeded this run, for sweeps.
    pub warm_start_parent: Option<f64>,
    pub evals: usize,
    pub restarts: usize,
    pub budget: usize,
    pub search_method: Method,
    pub final_method: Method,
    pub propagation: PropagationControls,
    pub xtol: f64,
    pub ftol: f64,
    pub wall_clock_s: f64,
    pub warnings: Vec<OptWarning>,
}

impl OptResult {
    pub fn point(&self, scheme: &AtomicScheme) -> Result<OperatingPoint> {
        OperatingPoint::new(scheme, self.od, self.best)
    }
}

/// The same point with all detunings negated.
pub fn branch_mirror(point: &OperatingPoint) -> OperatingPoint {
    OperatingPoint {
        controls: point.controls.mirrored(),
        ..point.clone()
    }
}

struct Objective<'a> {
    base: OperatingPoint,
    bounds: BoundsMode,
    method: Method,
    controls: &'a PropagationControls,
}

impl Objective<'_> {
    /// Value to minimize: `−η_d` at the projected point plus a small
    /// penalty on the distance outside the box.
    fn value(&self, x: &[f64; 5]) -> f64 {
        let raw = Controls::from_array(*x);
        let c = self.bounds.clamp(raw);
        let outside: f64 = raw
            .to_array()
            .iter()
            .zip(c.to_array())
            .map(|(a, b)| (a - b).abs())
            .sum();
        -self.eta(&c).unwrap_or(0.0) + 1e-3 * outside
    }

    fn eta(&self, c: &Controls) -> Result<f64> {
        let p = self.base.with_controls(*c)?;
        let m = conversion_metrics(&transfer_matrix(&p, self.method, self.controls)?);
        if self.method != Method::ExactSliced
            && (m.t_d + m.eta_d > 1.0 + 1e-9 || m.t_u + m.eta_u > 1.0 + 1e-9)
        {
            // truncated Magnus series left the passive region; use the reference
            let exact = transfer_matrix(&p, Method::ExactSliced, self.controls)?;
            return Ok(conversion_metrics(&exact).eta_d);
        }
        Ok(m.eta_d)
    }
}

struct NmOutcome {
    x: [f64; 5],
    f: f64,
    evals: usize,
    history: Vec<f64>,
    exhausted: bool,
}

fn initial_step(x: &[f64; 5], scale: f64) -> [f64; 5] {
    std::array::from_fn(|k| (0.1 * x[k].abs()).max(scale))
}

/// One Nelder–Mead descent from a given simplex.
fn nelder_mead_once<F: Fn(&[f64; 5]) -> f64>(
    f: &F,
    x0: [f64; 5],
    step: [f64; 5],
    budget: usize,
    xtol: f64,
    ftol: f64,
) -> (Vec<([f64; 5], f64)>, usize, bool) {
    let mut simplex: Vec<([f64; 5], f64)> = Vec::with_capacity(6);
    simplex.push((x0, f(&x0)));
    for k in 0..5 {
        let mut x = x0;
        x[k] += step[k];
        simplex.push((x, f(&x)));
    }
    let mut evals = 6;
    let order = |s: &mut Vec<([f64; 5], f64)>| {
        s.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_cmp(&a.0, &b.0)))
    };
    loop {
        order(&mut simplex);
        let best = simplex[0].1;
        let worst = simplex[5].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (worst - best).abs() <= ftol && size <= xtol {
            return (simplex, evals, false);
        }
        if evals + 2 > budget {
            return (simplex, evals, true);
        }
        let centroid: [f64; 5] =
            std::array::from_fn(|k| simplex[..5].iter().map(|(x, _)| x[k]).sum::<f64>() / 5.0);
        let along = |t: f64| -> [f64; 5] {
            std::array::from_fn(|k| centroid[k] + t * (simplex[5].0[k] - centroid[k]))
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[5] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[4].1 {
            simplex[5] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[5].1 {
                let xc = along(-0.5);
                (xc, f(&xc))
            } else {
                let xc = along(0.5);
                (xc, f(&xc))
            };
            evals += 1;
            if fc < fr.min(simplex[5].1) {
                simplex[5] = (xc, fc);
            } else {
                let x_best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    v.0 = std::array::from_fn(|k| x_best[k] + 0.5 * (v.0[k] - x_best[k]));
                    v.1 = f(&v.0);
                }
                evals += 5;
            }
        }
    }
}

/// Nelder–Mead with simplex restarts at the incumbent until a restart stops
/// improving or the budget is used.
fn nelder_mead<F: Fn(&[f64; 5]) -> f64>(
    f: &F,
    x0: [f64; 5],
    scale: f64,
    budget: usize,
    xtol: f64,
    ftol: f64,
) -> NmOutcome {
    let mut x = x0;
    let mut fx = f64::INFINITY;
    let mut evals = 0;
    let mut history = Vec::new();
    let mut step = initial_step(&x0, scale);
    let mut exhausted = false;
    while evals + 8 <= budget {
        let (simplex, used, out) = nelder_mead_once(f, x, step, budget - evals, xtol, ftol);
        evals += used;
        exhausted = out;
        let (bx, bf) = simplex[0];
        let improved = fx - bf;
        if bf < fx {
            x = bx;
            fx = bf;
        }
        history.push(-fx);
        if out || improved <= ftol {
            break;
        }
        step = initial_step(&x, 0.1 * scale).map(|s| 0.5 * s);
    }
    if fx.is_infinite() {
        fx = f(&x);
        evals += 1;
        exhausted = true;
    }
    NmOutcome {
        x,
        f: fx,
        evals,
        history,
        exhausted,
    }
}

fn lex_cmp(a: &[f64; 5], b: &[f64; 5]) -> std::cmp::Ordering {
    for k in 0..5 {
        match a[k].total_cmp(&b[k]) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Latin-hypercube samples in the box `|Δ| ≤ l`, `0 ≤ Ω ≤ l`.
pub fn latin_hypercube(n: usize, l: f64, rng: &mut ChaCha8Rng) -> Vec<Controls> {
    if n == 0 {
        return Vec::new();
    }
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(5);
    for k in 0..5 {
        let mut strata: Vec<f64> = (0..n)
            .map(|i| (i as f64 + rng.random::<f64>()) / n as f64)
            .collect();
        for i in (1..n).rev() {
            strata.swap(i, rng.random_range(0..=i));
        }
        let (lo, hi) = if k < 3 { (-l, l) } else { (0.0, l) };
        columns.push(strata.into_iter().map(|u| lo + u * (hi - lo)).collect());
    }
    (0..n)
        .map(|i| Controls::from_array(std::array::from_fn(|k| columns[k][i])))
        .collect()
}

fn sampling_box(problem: &OptProblem, seeds: &[Controls]) -> f64 {
    let seed_scale = seeds
        .iter()
        .flat_map(|s| s.to_array())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    (1.5 * seed_scale).max(CAPPED_LIMIT).min(problem.bounds.limit())
}

fn maximize_inner(problem: &OptProblem, warm: Option<(f64, Controls)>) -> Result<OptResult> {
    problem.validate()?;
    let started = Instant::now();
    let base = OperatingPoint::new(&problem.scheme, problem.alpha, Controls::default())?;
    let mut starts: Vec<(StartKind, Controls)> = Vec::new();
    if let Some((_, c)) = warm {
        starts.push((StartKind::WarmStart, problem.bounds.clamp(c)));
    }
    for s in &problem.seeds {
        starts.push((StartKind::Seed, problem.bounds.clamp(*s)));
    }
    let known: Vec<Controls> = starts.iter().map(|s| s.1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(problem.sampler_seed);
    let lhs = latin_hypercube(problem.restarts, sampling_box(problem, &known), &mut rng);
    starts.extend(lhs.into_iter().map(|c| (StartKind::LatinHypercube, c)));
    if starts.is_empty() {
        starts.push((StartKind::Seed, problem.bounds.clamp(Controls::new(0.0, 0.0, 0.0, 1.0, 1.0))));
    }

    let mut warnings = Vec::new();
    let search = Objective {
        base: base.clone(),
        bounds: problem.bounds,
        method: problem.search_method,
        controls: &problem.propagation,
    };

    if problem.alpha == 0.0 {
        warnings.push(OptWarning::DegenerateObjective);
    }

    let search_budget = problem.budget.saturating_sub(problem.polish_budget).max(starts.len());
    let share = (search_budget / starts.len()).max(1);
    let scale = 1.0;
    let trajectories: Vec<Trajectory> = if problem.alpha == 0.0 {
        starts
            .iter()
            .map(|(kind, c)| Trajectory {
                kind: *kind,
                start: *c,
                best: *c,
                eta_d: 0.0,
                evals: 0,
                history: Vec::new(),
            })
            .collect()
    } else {
        let runs: Vec<(Trajectory, bool, bool)> = starts
            .par_iter()
            .map(|(kind, c)| {
                let f = |x: &[f64; 5]| search.value(x);
                let f0 = f(&c.to_array());
                let out = nelder_mead(&f, c.to_array(), scale, share.saturating_sub(1), problem.xtol, problem.ftol);
                let (best, fb) = if out.f <= f0 { (out.x, out.f) } else { (c.to_array(), f0) };
                (
                    Trajectory {
                        kind: *kind,
                        start: *c,
                        best: problem.bounds.clamp(Controls::from_array(best)),
                        eta_d: -fb,
                        evals: out.evals + 1,
                        history: out.history,
                    },
                    out.exhausted,
                    fb < f0 - problem.ftol,
                )
            })
            .collect::<Vec<_>>();
        if runs.iter().any(|r| r.1) {
            warnings.push(OptWarning::BudgetExhausted);
        }
        if !runs.iter().any(|r| r.2) {
            warnings.push(OptWarning::NoImprovement);
        }
        runs.into_iter().map(|r| r.0).collect()
    };

    let finals = Objective {
        base: base.clone(),
        bounds: problem.bounds,
        method: problem.final_method,
        controls: &problem.propagation,
    };
    let eta_d_search = trajectories.iter().map(|t| t.eta_d).fold(f64::NEG_INFINITY, f64::max);
    let mut evals: usize = trajectories.iter().map(|t| t.evals).sum();
    // re-score every local optimum with the final method before choosing
    let mut best = trajectories[0].best;
    let mut best_eta = f64::NEG_INFINITY;
    for t in &trajectories {
        let eta = if problem.alpha == 0.0 { 0.0 } else { finals.eta(&t.best)? };
        evals += 1;
        let better = eta > best_eta
            || (eta == best_eta && lex_cmp(&t.best.to_array(), &best.to_array()).is_lt());
        if better {
            best = t.best;
            best_eta = eta;
        }
    }

    if problem.alpha > 0.0 && problem.polish_budget > 0 && problem.final_method != problem.search_method {
        let f = |x: &[f64; 5]| finals.value(x);
        let f0 = f(&best.to_array());
        let out = nelder_mead(&f, best.to_array(), 0.2, problem.polish_budget - 1, problem.xtol, problem.ftol);
        evals += out.evals + 1;
        if out.f < f0 {
            best = problem.bounds.clamp(Controls::from_array(out.x));
        }
    }

    let mut branches = Vec::with_capacity(2);
    for c in [best, best.mirrored()] {
        let eta = if problem.alpha == 0.0 { 0.0 } else { finals.eta(&c)? };
        evals += 1;
        branches.push(BranchScore {
            branch: Branch::of(&c),
            controls: c,
            eta_d: eta,
        });
    }
    // the curve follows the higher-scoring branch, ties to the first
    let chosen = if branches[1].eta_d > branches[0].eta_d { 1 } else { 0 };
    best = branches[chosen].controls;
    let tm = transfer_matrix(&base.with_controls(best)?, problem.final_method, &problem.propagation)?;
    let metrics = conversion_metrics(&tm);

    Ok(OptResult {
        od: problem.alpha,
        bounds: problem.bounds,
        best,
        eta_d: metrics.eta_d,
        eta_u: metrics.eta_u,
        t_d: metrics.t_d,
        eta_d_search,
        branch: Branch::of(&best),
        branches,
        trajectories,
        warm_start_parent: warm.map(|w| w.0),
        evals,
        restarts: problem.restarts,
        budget: problem.budget,
        search_method: problem.search_method,
        final_method: problem.final_method,
        propagation: problem.propagation,
        xtol: problem.xtol,
        ftol: problem.ftol,
        wall_clock_s: started.elapsed().as_secs_f64(),
        warnings,
    })
}

/// Best operating point for one OD.
pub fn maximize_ce(problem: &OptProblem) -> Result<OptResult> {
    maximize_inner(problem, None)
}

/// Optimizes along an increasing OD grid, warm-starting each OD from the
/// previous optimum; `seeds_at` supplies extra seeds per OD.
pub fn sweep_od_seeded<S>(template: &OptProblem, od_grid: &[f64], seeds_at: S) -> Result<Vec<OptResult>>
where
    S: Fn(f64) -> Vec<Controls>,
{
    if od_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(QfcError::Domain("OD grid must be strictly increasing".into()));
    }
    let mut out: Vec<OptResult> = Vec::with_capacity(od_grid.len());
    for (i, &od) in od_grid.iter().enumerate() {
        let mut problem = template.clone();
        problem.alpha = od;
        problem.sampler_seed = template.sampler_seed.wrapping_add(i as u64);
        problem.seeds.extend(seeds_at(od));
        let warm = out.last().map(|r| (r.od, r.best));
        out.push(maximize_inner(&problem, warm)?);
    }
    Ok(out)
}

pub fn sweep_od(template: &OptProblem, od_grid: &[f64]) -> Result<Vec<OptResult>> {
    sweep_od_seeded(template, od_grid, |_| Vec::new())
}

/// Absorbing and constant-field optima at one OD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionGap {
    pub absorbing: OptResult,
    /// Optimum of the model whose coupling field is not absorbed.
    pub constant: OptResult,
    /// Constant-field efficiency at the absorbing optimum.
    pub constant_at_absorbing: f64,
}

impl AbsorptionGap {
    /// `η_d` lost to coupling absorption, comparing the two optima.
    pub fn gap(&self) -> f64 {
        self.constant.eta_d - self.absorbing.eta_d
    }

    pub fn gap_same_point(&self) -> f64 {
        self.constant_at_absorbing - self.absorbing.eta_d
    }
}

/// Optimizes the absorbing model and the same model with `α_c = 0`, then
/// reruns each seeded with both optima.
pub fn absorption_gap(problem: &OptProblem) -> Result<AbsorptionGap> {
    let mut absorbing = problem.clone();
    let mut constant = problem.clone();
    constant.scheme.alpha_c_ratio = Some(0.0);
    let a0 = maximize_ce(&absorbing)?;
    let n0 = maximize_ce(&constant)?;
    absorbing.seeds = vec![a0.best, n0.best];
    constant.seeds = vec![n0.best, a0.best];
    let a = maximize_ce(&absorbing)?;
    let n = maximize_ce(&constant)?;
    let (a, n) = (better(a, a0), better(n, n0));
    let at = crate::propagation::conversion_metrics(&crate::propagation::nonabsorbing_transfer(
        &a.point(&problem.scheme)?,
        problem.final_method,
        &problem.propagation,
    )?);
    Ok(AbsorptionGap {
        absorbing: a,
        constant: n,
        constant_at_absorbing: at.eta_d,
    })
}

fn better(x: OptResult, y: OptResult) -> OptResult {
    if y.eta_d > x.eta_d {
        y
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{build_scheme, Band};

    #[test]
    fn clamp_respects_box() {
        let c = Controls::new(-80.0, 70.0, 3.0, 60.0, -2.0);
        let k = BoundsMode::Capped.clamp(c);
        assert_eq!(k.to_array(), [-50.0, 50.0, 3.0, 50.0, 0.0]);
        assert!(BoundsMode::Capped.contains(&k));
        assert!(!BoundsMode::Capped.contains(&c));
    }

    #[test]
    fn mirror_is_involution() {
        let s = build_scheme(Band::E1367);
        let p = OperatingPoint::new(&s, 50.0, Controls::new(13.0, -31.0, 14.0, 50.0, 7.0)).unwrap();
        let m = branch_mirror(&p);
        assert_eq!(m.controls.to_array(), [-13.0, 31.0, -14.0, 50.0, 7.0]);
        assert_eq!(branch_mirror(&m), p);
        let z = p.with_controls(Controls::new(0.0, 0.0, 0.0, 4.0, 2.0)).unwrap();
        let mz = branch_mirror(&z);
        assert_eq!(mz.controls.to_array().map(f64::abs), z.controls.to_array());
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let f = |x: &[f64; 5]| {
            x.iter()
                .enumerate()
                .map(|(k, v)| (k as f64 + 1.0) * (v - k as f64).powi(2))
                .sum::<f64>()
        };
        let out = nelder_mead(&f, [5.0; 5], 1.0, 20_000, 1e-8, 1e-14);
        for k in 0..5 {
            assert!((out.x[k] - k as f64).abs() < 1e-5, "{:?}", out.x);
        }
    }

    #[test]
    fn lhs_covers_strata() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = latin_hypercube(10, 50.0, &mut rng);
        for k in 0..5 {
            let mut bins: Vec<usize> = s
                .iter()
                .map(|c| {
                    let v = c.to_array()[k];
                    let u = if k < 3 { (v + 50.0) / 100.0 } else { v / 50.0 };
                    (u * 10.0).floor() as usize
                })
                .collect();
            bins.sort();
            assert_eq!(bins, (0..10).collect::<Vec<_>>());
        }
    }

    #[test]
    fn zero_od_is_degenerate() {
        let s = build_scheme(Band::E1367);
        let mut p = OptProblem::new(&s, 0.0, BoundsMode::Capped);
        p.restarts = 2;
        let r = maximize_ce(&p).unwrap();
        assert_eq!(r.eta_d, 0.0);
        assert!(r.warnings.contains(&OptWarning::DegenerateObjective));
    }

    #[test]
    fn non_increasing_grid_rejected() {
        let s = build_scheme(Band::E1367);
        let p = OptProblem::new(&s, 50.0, BoundsMode::Capped);
        assert!(sweep_od(&p, &[100.0, 50.0]).is_err());
    }
}
