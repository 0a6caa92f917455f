//! Restricted (≤ 50 Γ) maximization of the E-band efficiency at OD 50.
//!
//! `cargo run --release --example optimize_bounded [od] [budget]`

use diamond_qfc::optimizer::{maximize_ce, BoundsMode, OptProblem};
use diamond_qfc::{build_scheme, Band, Controls};

fn main() -> diamond_qfc::Result<()> {
    let mut args = std::env::args().skip(1);
    let od: f64 = args.next().map_or(50.0, |s| s.parse().expect("od"));
    let budget: usize = args.next().map_or(20_000, |s| s.parse().expect("budget"));

    let scheme = build_scheme(Band::E1367);
    let mut problem = OptProblem::new(&scheme, od, BoundsMode::Capped)
        .with_seeds(vec![Controls::new(5.0, -12.0, 6.0, 20.0, 7.0)]);
    problem.budget = budget;
    problem.sampler_seed = 2024;

    let r = maximize_ce(&problem)?;
    let c = r.best;
    println!(
        "OD {od}: eta_d = {:.4} (search {:.4}), eta_u = {:.4}, T_d = {:.4}",
        r.eta_d, r.eta_d_search, r.eta_u, r.t_d
    );
    println!(
        "  dp = {:.3}, dc = {:.3}, delta = {:.3}, Wc = {:.3}, Wd = {:.3}",
        c.delta_p, c.delta_c, c.delta, c.omega_c, c.omega_d
    );
    for b in &r.branches {
        println!("  branch {}: eta_d = {:.6}", b.branch.symbol(), b.eta_d);
    }
    println!(
        "  {} evaluations over {} starts in {:.1} s, warnings {:?}",
        r.evals,
        r.trajectories.len(),
        r.wall_clock_s,
        r.warnings
    );
    Ok(())
}
